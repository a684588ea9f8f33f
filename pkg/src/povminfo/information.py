"""Entropies and mutual-information functionals, all in bits."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError
from .measurement import subchannel_conditionals

_CLAMP = 1e-12


def _clamp_bits(value, name="value"):
    if value < 0.0:
        if value < -_CLAMP:
            raise ValueError(f"{name} evaluated to {value!r} bits, below zero")
        return 0.0
    return value


def binary_entropy(x):
    """Shannon entropy of a Bernoulli(x) variable, with 0 log 0 = 0."""
    x = float(x)
    if x < -_CLAMP or x > 1.0 + _CLAMP or math.isnan(x):
        raise DomainError("x", x, f"x={x!r} must lie in [0, 1]")
    x = min(max(x, 0.0), 1.0)
    h = 0.0
    for t in (x, 1.0 - x):
        if t > 0.0:
            h -= t * math.log2(t)
    return _clamp_bits(h, "binary_entropy")


def mutual_information(channel, priors):
    """I(X;Y) for a 2 x m row-stochastic ``channel`` and input ``priors``.

    Cells with zero joint probability contribute nothing.
    """
    rows = np.asarray(getattr(channel, "rows", channel), dtype=float)
    pri = np.asarray(priors, dtype=float).reshape(-1, 1)
    joint = pri * rows
    marginal = joint.sum(axis=0)
    mask = joint > 0.0
    ratio = np.ones_like(rows)
    ratio[mask] = rows[mask] / np.broadcast_to(marginal, rows.shape)[mask]
    total = float(np.sum(joint[mask] * np.log2(ratio[mask])))
    return _clamp_bits(total, "mutual_information")


def subchannel_mutual_information(sub, pair):
    """Information carried by one subchannel under its renormalized priors."""
    wp = pair.prior_p * sub.weight_p
    wq = pair.prior_q * sub.weight_q
    total = wp + wq
    if total <= 0.0:
        return 0.0
    return mutual_information(subchannel_conditionals(sub), (wp / total, wq / total))


def holevo_eigenvalues(pair):
    """Eigenvalues (larger first) of the mixture prior_p |p><p| + prior_q |q><q|."""
    disc = 1.0 - 4.0 * pair.prior_p * pair.prior_q * math.sin(pair.alpha) ** 2
    root = math.sqrt(max(disc, 0.0))
    return (0.5 * (1.0 + root), 0.5 * (1.0 - root))


def holevo_bound(pair):
    # Pure signal states, so the Holevo quantity is the entropy of the mixture.
    return binary_entropy(holevo_eigenvalues(pair)[0])


def optimal_projective_chi(alpha):
    """Accessible information of two equiprobable states at angle ``alpha``."""
    return _clamp_bits(1.0 - binary_entropy((1.0 + math.sin(alpha)) / 2.0), "chi")


def holevo_equal_priors(alpha):
    return binary_entropy((1.0 + math.cos(alpha)) / 2.0)
