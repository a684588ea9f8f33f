"""Generalized measurements and the classical channels they induce.

A :class:`GeneralizedPovm` is described at the level of its ancilla branches:
each :class:`Subchannel` carries the branch weights for the two inputs, the
overlap of the two post-interaction states and the angle of the two-outcome
readout basis (measured from the bisector of the post-states).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateSpanError, ValidationError
from .states import overlap

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Subchannel:
    weight_p: float
    weight_q: float
    cos_alpha: float
    theta: float

    def __post_init__(self):
        if self.weight_p < 0.0 or self.weight_q < 0.0:
            raise ValidationError("subchannel weights must be non-negative")
        if abs(self.cos_alpha) > 1.0 + 1e-12:
            raise ValidationError(f"|cos_alpha| = {abs(self.cos_alpha)!r} exceeds 1")


@dataclass(frozen=True)
class GeneralizedPovm:
    subchannels: tuple

    def __post_init__(self):
        object.__setattr__(self, "subchannels", tuple(self.subchannels))
        if not self.subchannels:
            raise ValidationError("a POVM needs at least one subchannel")

    def __len__(self):
        return len(self.subchannels)

    def to_dict(self):
        return {
            "subchannels": [
                {"p": s.weight_p, "q": s.weight_q, "cos_alpha": s.cos_alpha, "theta": s.theta}
                for s in self.subchannels
            ]
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple(
                Subchannel(float(s["p"]), float(s["q"]), float(s["cos_alpha"]), float(s["theta"]))
                for s in data["subchannels"]
            )
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class MatrixPovm:
    """POVM given directly by its 2x2 real symmetric elements."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(np.array(e, dtype=float).reshape(2, 2) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ValidationError("a POVM needs at least one element")
        for k, e in enumerate(elems):
            if np.max(np.abs(e - e.T)) > 1e-12:
                raise ValidationError(f"element {k} is not symmetric")
            if np.linalg.eigvalsh(e)[0] < -1e-10:
                raise ValidationError(f"element {k} is not positive semidefinite")
        resid = float(np.max(np.abs(sum(elems) - np.eye(2))))
        if resid > 1e-10:
            raise ValidationError(
                "elements do not sum to the identity", {"completeness": resid}
            )

    def __len__(self):
        return len(self.elements)

    def to_dict(self):
        return {"elements": [e.tolist() for e in self.elements]}


@dataclass(frozen=True, eq=False)
class ConditionalChannel:
    """2 x m matrix; ``rows[x][k]`` is P(outcome k | input x), x=0 for |p>."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != 2:
            raise ValidationError(f"channel must be 2 x m, got shape {rows.shape}")
        if np.any(rows < -1e-12) or np.any(rows > 1.0 + 1e-12):
            raise ValidationError("channel entries must lie in [0, 1]")
        sums = rows.sum(axis=1)
        resid = float(np.max(np.abs(sums - 1.0)))
        if resid > DEFAULT_TOL:
            raise ValidationError("channel rows must sum to 1", {"row_sum": resid})
        rows = np.clip(rows, 0.0, 1.0)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n_outcomes(self):
        return self.rows.shape[1]


@dataclass(frozen=True)
class ValidationReport:
    sum_p_residual: float
    sum_q_residual: float
    overlap_residual: float
    bound_violations: tuple = field(default_factory=tuple)
    tolerance: float = DEFAULT_TOL

    @property
    def passed(self):
        return (
            self.sum_p_residual <= self.tolerance
            and self.sum_q_residual <= self.tolerance
            and self.overlap_residual <= self.tolerance
            and not self.bound_violations
        )

    @property
    def max_residual(self):
        return max(self.sum_p_residual, self.sum_q_residual, self.overlap_residual)

    def to_dict(self):
        return {
            "sum_p": self.sum_p_residual,
            "sum_q": self.sum_q_residual,
            "overlap": self.overlap_residual,
            "bound_violations": list(self.bound_violations),
        }


def _amplitudes(cos_alpha, theta):
    half = 0.5 * math.acos(min(1.0, max(-1.0, cos_alpha)))
    a = (math.cos(theta - half), math.sin(theta - half))
    b = (math.cos(theta + half), math.sin(theta + half))
    return a, b


def subchannel_conditionals(sub):
    """[[a0^2, a1^2], [b0^2, b1^2]] for the subchannel's two-outcome readout."""
    a, b = _amplitudes(sub.cos_alpha, sub.theta)
    return np.array([[a[0] ** 2, a[1] ** 2], [b[0] ** 2, b[1] ** 2]])


def validate_povm(povm, pair, tol=DEFAULT_TOL):
    subs = povm.subchannels
    sum_p = math.fsum(s.weight_p for s in subs)
    sum_q = math.fsum(s.weight_q for s in subs)
    preserved = math.fsum(math.sqrt(s.weight_p * s.weight_q) * s.cos_alpha for s in subs)
    violations = []
    for i, s in enumerate(subs):
        if s.weight_p < 0.0 or s.weight_q < 0.0:
            violations.append(f"subchannel {i}: negative weight")
        if abs(s.cos_alpha) > 1.0 + tol:
            violations.append(f"subchannel {i}: |cos_alpha| > 1")
    return ValidationReport(
        abs(sum_p - 1.0),
        abs(sum_q - 1.0),
        abs(preserved - overlap(pair)),
        tuple(violations),
        tol,
    )


def _require_valid(povm, pair, tol=DEFAULT_TOL):
    report = validate_povm(povm, pair, tol)
    if not report.passed:
        raise ValidationError("POVM violates its constraints", report.to_dict())
    return report


def channel_from_povm(povm, pair, tol=DEFAULT_TOL):
    """Concatenate the subchannels into one 2 x 2n conditional channel."""
    _require_valid(povm, pair, tol)
    cols = []
    for s in povm.subchannels:
        cond = subchannel_conditionals(s)
        cols.append(cond * np.array([[s.weight_p], [s.weight_q]]))
    return ConditionalChannel(np.hstack(cols))


def channel_from_matrix_povm(povm, pair):
    """Born-rule channel P(k | psi) = psi^T E_k psi."""
    vp = np.asarray(pair.vec_p)
    vq = np.asarray(pair.vec_q)
    rows = [[float(vp @ e @ vp) for e in povm.elements], [float(vq @ e @ vq) for e in povm.elements]]
    return ConditionalChannel(np.array(rows))


def effective_matrix_povm(povm, pair, tol=DEFAULT_TOL):
    """Elements on span{|p>, |q>} reproducing every outcome's statistics.

    Each outcome fixes <p|E|p>, <q|E|q> and <p|E|q>; with V = [vec_p vec_q]
    this is V^T E V = G, solved as E = V^-T G V^-1. G = u u^T is rank one with
    u = (sqrt(p_i) a_j, sqrt(q_i) b_j), so E = w w^T with w = V^-T u.
    """
    _require_valid(povm, pair, tol)
    if pair.alpha <= 0.0:
        raise DegenerateSpanError("states are parallel; effective elements are underdetermined")
    vinv = np.linalg.inv(pair.basis_matrix())
    elements = []
    for s in povm.subchannels:
        a, b = _amplitudes(s.cos_alpha, s.theta)
        rp, rq = math.sqrt(s.weight_p), math.sqrt(s.weight_q)
        for j in (0, 1):
            w = vinv.T @ np.array([rp * a[j], rq * b[j]])
            elements.append(np.outer(w, w))
    # V^-1 amplifies round-off like 1/alpha^2; restore exact completeness.
    w, v = np.linalg.eigh(sum(elements))
    fix = (v / np.sqrt(w)) @ v.T
    return MatrixPovm(tuple(fix @ e @ fix for e in elements))


def _sqrtm_psd(m):
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def random_povm(pair, n_subchannels, rng):
    """Draw a valid GeneralizedPovm with ``n_subchannels`` branches.

    Random PSD blocks are congruence-rescaled so that they sum to the Gram
    matrix of the pair; each block is one branch's weights and overlap.
    """
    rng = np.random.default_rng(rng)
    blocks = []
    for _ in range(n_subchannels):
        f = rng.normal(size=(2, 2))
        blocks.append(f.T @ f)
    total = sum(blocks)
    w, v = np.linalg.eigh(total)
    inv_root = (v / np.sqrt(w)) @ v.T
    outer = _sqrtm_psd(pair.gram) @ inv_root
    subs = []
    for g in blocks:
        h = outer @ g @ outer.T
        wp, wq = float(h[0, 0]), float(h[1, 1])
        c = float(h[0, 1]) / math.sqrt(wp * wq) if wp * wq > 0.0 else 1.0
        subs.append(Subchannel(wp, wq, min(1.0, max(-1.0, c)), float(rng.uniform(0.0, math.pi))))
    return _renormalize(GeneralizedPovm(tuple(subs)), pair)


def _renormalize(povm, pair):
    # Round-off from the congruence leaves ~1e-16 residuals; scale them out.
    subs = povm.subchannels
    sp = math.fsum(s.weight_p for s in subs)
    sq = math.fsum(s.weight_q for s in subs)
    scaled = [Subchannel(s.weight_p / sp, s.weight_q / sq, s.cos_alpha, s.theta) for s in subs]
    return GeneralizedPovm(tuple(scaled))
