"""Backend selection for the numerical kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_kernels_py`` module stands in. Setting ``POVMINFO_PURE_PYTHON=1``
forces the fallback.
"""

import contextlib
import os

from . import _kernels_py

KIND_PROJECTIVE = _kernels_py.KIND_PROJECTIVE
KIND_GENERALIZED = _kernels_py.KIND_GENERALIZED
KIND_MATRIX = _kernels_py.KIND_MATRIX

_compiled = None
if os.environ.get("POVMINFO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

backend = _compiled if _compiled is not None else _kernels_py
BACKEND_NAME = "cython" if _compiled is not None else "python"

channel_mi = backend.channel_mi
objective = backend.objective
pattern_search = backend.pattern_search


def available_backends():
    """Mapping of backend name to module, compiled first when present."""
    out = {}
    if _compiled is not None:
        out["cython"] = _compiled
    out["python"] = _kernels_py
    return out


@contextlib.contextmanager
def use_backend(name):
    """Temporarily route ``objective``/``pattern_search`` through backend ``name``."""
    global channel_mi, objective, pattern_search
    mod = available_backends()[name]
    saved = (channel_mi, objective, pattern_search)
    channel_mi, objective, pattern_search = mod.channel_mi, mod.objective, mod.pattern_search
    try:
        yield mod
    finally:
        channel_mi, objective, pattern_search = saved
