"""Pairs of real pure states with priors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

_EPS = 1e-12


@dataclass(frozen=True)
class StatePair:
    """Two pure states at angle ``alpha`` sent with priors ``(prior_p, prior_q)``.

    The states are embedded symmetrically about the first axis:
    ``vec_p = (cos(alpha/2), sin(alpha/2))`` and ``vec_q = (cos(alpha/2), -sin(alpha/2))``,
    so measurement angles are measured from their bisector.
    """

    alpha: float
    prior_p: float
    prior_q: float
    vec_p: tuple
    vec_q: tuple

    @property
    def priors(self):
        return (self.prior_p, self.prior_q)

    @property
    def gram(self):
        """Gram matrix of (vec_p, vec_q)."""
        c = overlap(self)
        return np.array([[1.0, c], [c, 1.0]])

    def basis_matrix(self):
        """2x2 array whose columns are vec_p and vec_q."""
        return np.column_stack([self.vec_p, self.vec_q])


def make_state_pair(alpha, prior_p=0.5):
    """Build a :class:`StatePair`; ``alpha`` in radians within [0, pi/2]."""
    alpha = float(alpha)
    prior_p = float(prior_p)
    if not (0.0 <= alpha <= math.pi / 2 + _EPS) or math.isnan(alpha):
        raise DomainError("alpha", alpha, f"alpha={alpha!r} must lie in [0, pi/2]")
    if not (0.0 <= prior_p <= 1.0) or math.isnan(prior_p):
        raise DomainError("prior_p", prior_p, f"prior_p={prior_p!r} must lie in [0, 1]")
    alpha = min(alpha, math.pi / 2)
    half = alpha / 2
    c, s = math.cos(half), math.sin(half)
    return StatePair(alpha, prior_p, 1.0 - prior_p, (c, s), (c, -s))


def overlap(pair):
    """Inner product of the two states, equal to cos(alpha)."""
    return pair.vec_p[0] * pair.vec_q[0] + pair.vec_p[1] * pair.vec_q[1]
