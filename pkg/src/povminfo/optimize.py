"""Maximize extracted information over measurements of a state pair.

Three search spaces are offered: single projective readouts
(:func:`optimize_projective`), multi-branch generalized measurements in
subchannel form (:func:`optimize_generalized`) and raw matrix POVMs with any
number of elements (:func:`optimize_matrix_povm`). All use multi-start
Hooke-Jeeves search from :mod:`povminfo.kernels`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .exceptions import EmptyReportError, InfeasibleError
from .information import mutual_information
from .measurement import (
    GeneralizedPovm,
    MatrixPovm,
    Subchannel,
    _amplitudes,
    channel_from_matrix_povm,
    channel_from_povm,
    random_povm,
    validate_povm,
)
from .states import overlap

_MAX_RESAMPLES = 64
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    tolerance: float = 1e-10  # objective gap treated as a tie between restarts
    step_scale: float = 0.1
    seed: int = 0
    min_step: float = 1e-9
    # Weight of sum_i sqrt(p_i q_i) added to the generalized objective. The
    # information maximum is degenerate across branches; this term is maximal
    # exactly on the balanced representative, so it selects it without moving
    # the optimum value.
    balance_weight: float = 0.05
    floor: float = 1e-9
    workers: int = 1

    def __post_init__(self):
        for name in ("restarts", "max_iterations", "workers"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("tolerance", "step_scale", "min_step", "floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.balance_weight < 0:
            raise ValueError("balance_weight must be non-negative")

    def restart_rng(self, index):
        """Independent generator for restart ``index``; unaffected by ``restarts``."""
        seq = np.random.SeedSequence(self.seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(index,))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class StationarityReport:
    gamma_values: tuple
    gamma_residual: float
    eq16_values: tuple
    eq16_residual: float | None
    excluded_outcomes: tuple

    def to_dict(self):
        return {
            "gamma_values": list(self.gamma_values),
            "gamma_residual": self.gamma_residual,
            "eq16_values": list(self.eq16_values),
            "eq16_residual": self.eq16_residual,
            "excluded_outcomes": [list(t) for t in self.excluded_outcomes],
        }


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    chi_opt: float
    povm: object
    stationarity: StationarityReport | None
    constraint_residuals: dict
    converged: bool
    iterations_used: int
    objective: float = 0.0
    best_restart: int = 0
    restart_objectives: tuple = field(default_factory=tuple)

    @property
    def gamma_residual(self):
        return None if self.stationarity is None else self.stationarity.gamma_residual

    def to_dict(self):
        return {
            "chi_opt": self.chi_opt,
            "converged": self.converged,
            "iterations": self.iterations_used,
            "povm": self.povm.to_dict(),
            "gamma_residual": self.gamma_residual,
            "constraint_residuals": dict(self.constraint_residuals),
        }


def stationarity_report(povm, pair, floor=1e-9):
    """Spread of the quantities that must be constant at an optimum.

    For each outcome (i, j) with both joint probabilities above ``floor``:
    gamma = p sqrt(p_i/q_i) a/b + q sqrt(q_i/p_i) b/a. Per branch, the ratio
    (p p_i + q q_i) / (sqrt(p_i q_i) cos alpha_i) must agree with gamma.
    """
    p, q = pair.priors
    gammas = []
    ratios = []
    excluded = []
    for i, s in enumerate(povm.subchannels):
        a, b = _amplitudes(s.cos_alpha, s.theta)
        for j in (0, 1):
            jp = p * s.weight_p * a[j] ** 2
            jq = q * s.weight_q * b[j] ** 2
            if jp <= floor or jq <= floor:
                excluded.append((i, j))
                continue
            r = a[j] / b[j]
            gammas.append(
                p * math.sqrt(s.weight_p / s.weight_q) * r
                + q * math.sqrt(s.weight_q / s.weight_p) / r
            )
        denom = math.sqrt(s.weight_p * s.weight_q) * s.cos_alpha
        if s.weight_p > floor and s.weight_q > floor and abs(denom) > floor:
            ratios.append((p * s.weight_p + q * s.weight_q) / denom)
    if not gammas:
        raise EmptyReportError("every outcome is below the probability floor")
    return StationarityReport(
        tuple(gammas),
        max(gammas) - min(gammas),
        tuple(ratios),
        (max(ratios) - min(ratios)) if ratios else None,
        tuple(excluded),
    )


def _safe_report(povm, pair, floor):
    try:
        return stationarity_report(povm, pair, floor)
    except EmptyReportError:
        return None


def _wrap_theta(theta):
    # theta -> theta + pi/2 only swaps the two readout outcomes.
    return math.fmod(math.fmod(theta, _HALF_PI) + _HALF_PI, _HALF_PI)


def _run_restarts(kind, starts, consts, config):
    """Run the local search from each start; None entries mark infeasible restarts."""

    def one(x0):
        if x0 is None:
            return None
        return kernels.pattern_search(
            kind, x0, consts, config.step_scale, config.min_step, config.max_iterations
        )

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            return list(pool.map(one, starts))
    return [one(x0) for x0 in starts]


def _best(runs, tolerance):
    best = None
    for idx, run in enumerate(runs):
        if run is None or not math.isfinite(run[1]):
            continue
        if best is None or run[1] > runs[best][1] + tolerance:
            best = idx
    return best


def _objectives(runs):
    return tuple(float("-inf") if r is None else r[1] for r in runs)


def optimize_projective(pair, config=None):
    """Best single projective readout, by multi-start search over its angle."""
    config = config or OptimizerConfig()
    consts = (pair.alpha, pair.prior_p, 1, 0.0)
    starts = [[(k + 0.5) * _HALF_PI / config.restarts] for k in range(config.restarts)]
    runs = _run_restarts(kernels.KIND_PROJECTIVE, starts, consts, config)
    best = _best(runs, config.tolerance)
    x, fval, iters, conv = runs[best]
    povm = GeneralizedPovm((Subchannel(1.0, 1.0, overlap(pair), _wrap_theta(x[0])),))
    return _finish(povm, pair, config, fval, iters, conv, best, runs)


def _encode_generalized(povm):
    subs = povm.subchannels
    x = [math.log(s.weight_p) for s in subs]
    x += [math.log(s.weight_q) for s in subs]
    x += [math.acos(s.cos_alpha) for s in subs[:-1]]
    x += [s.theta for s in subs]
    return x


def decode_generalized(x, n, pair):
    """GeneralizedPovm for unconstrained coordinates ``x``, or None if infeasible."""
    dec = kernels._kernels_py.generalized_decode(list(x), n, math.cos(pair.alpha))
    if dec is None:
        return None
    wp, wq, cos, thetas = dec
    return GeneralizedPovm(
        tuple(Subchannel(wp[i], wq[i], cos[i], thetas[i]) for i in range(n))
    )


def _generalized_start(pair, n, rng):
    for _ in range(_MAX_RESAMPLES):
        try:
            x = _encode_generalized(random_povm(pair, n, rng))
        except ValueError:
            continue
        consts = (pair.alpha, pair.prior_p, n, 0.0)
        if math.isfinite(kernels.objective(kernels.KIND_GENERALIZED, x, consts)):
            return x
    return None


def optimize_generalized(pair, n_subchannels, config=None):
    """Maximize the total information over ``n_subchannels``-branch measurements."""
    config = config or OptimizerConfig()
    n = int(n_subchannels)
    if n < 1:
        raise ValueError("n_subchannels must be at least 1")
    consts = (pair.alpha, pair.prior_p, n, config.balance_weight)
    starts = [_generalized_start(pair, n, config.restart_rng(r)) for r in range(config.restarts)]
    runs = _run_restarts(kernels.KIND_GENERALIZED, starts, consts, config)
    best = _best(runs, config.tolerance)
    if best is None:
        raise InfeasibleError("no restart found a point satisfying overlap preservation")
    x, fval, iters, conv = runs[best]
    raw = decode_generalized(x, n, pair)
    povm = GeneralizedPovm(
        tuple(
            Subchannel(s.weight_p, s.weight_q, s.cos_alpha, _wrap_theta(s.theta))
            for s in raw.subchannels
        )
    )
    return _finish(povm, pair, config, fval, iters, conv, best, runs)


def _finish(povm, pair, config, fval, iters, conv, best, runs):
    report = validate_povm(povm, pair)
    chi = mutual_information(channel_from_povm(povm, pair), pair.priors)
    return OptimizationResult(
        chi_opt=chi,
        povm=povm,
        stationarity=_safe_report(povm, pair, config.floor),
        constraint_residuals=report.to_dict(),
        converged=bool(conv) and report.passed,
        iterations_used=int(iters),
        objective=float(fval),
        best_restart=best,
        restart_objectives=_objectives(runs),
    )


def decode_matrix(x, n):
    """MatrixPovm for the unconstrained factor entries ``x``, or None if singular."""
    elems = kernels._kernels_py.matrix_decode(list(x), n)
    if elems is None:
        return None
    return MatrixPovm(tuple(np.array([[e00, e01], [e01, e11]]) for e00, e01, e11 in elems))


def _matrix_start(n, rng):
    for _ in range(_MAX_RESAMPLES):
        x = rng.normal(size=4 * n).tolist()
        if kernels._kernels_py.matrix_decode(x, n) is not None:
            return x
    return None


def optimize_matrix_povm(pair, n_elements, config=None):
    """Maximize information over POVMs with ``n_elements`` 2x2 elements."""
    config = config or OptimizerConfig()
    n = int(n_elements)
    if n < 2:
        raise ValueError("n_elements must be at least 2")
    consts = (pair.alpha, pair.prior_p, n, 0.0)
    starts = [_matrix_start(n, config.restart_rng(r)) for r in range(config.restarts)]
    runs = _run_restarts(kernels.KIND_MATRIX, starts, consts, config)
    best = _best(runs, config.tolerance)
    if best is None:
        raise InfeasibleError("every restart produced a singular element sum")
    x, fval, iters, conv = runs[best]
    povm = decode_matrix(x, n)
    chi = mutual_information(channel_from_matrix_povm(povm, pair), pair.priors)
    completeness = float(np.max(np.abs(sum(povm.elements) - np.eye(2))))
    return OptimizationResult(
        chi_opt=chi,
        povm=povm,
        stationarity=None,
        constraint_residuals={"completeness": completeness},
        converged=bool(conv),
        iterations_used=int(iters),
        objective=float(fval),
        best_restart=best,
        restart_objectives=_objectives(runs),
    )
