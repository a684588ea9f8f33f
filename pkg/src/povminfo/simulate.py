"""Monte Carlo replay of the coin-toss game.

Trials are generated in fixed-size blocks; block ``b`` draws from its own
stream derived from ``(seed, b)``, so counts do not depend on how blocks are
spread over workers.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .information import mutual_information
from .measurement import channel_from_povm

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class TrialCounts:
    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != 2:
            raise ValueError(f"counts must be 2 x m, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if int(counts.sum()) != int(self.total):
            raise ValueError("counts do not add up to total")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(self.total))

    def __eq__(self, other):
        return (
            isinstance(other, TrialCounts)
            and self.total == other.total
            and np.array_equal(self.counts, other.counts)
        )

    def to_dict(self):
        return {"counts": self.counts.tolist(), "total": self.total}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data["counts"]), int(data["total"]))


def _block(rows, prior_p, size, seed, index):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    n_p = int(rng.binomial(size, prior_p))
    return np.vstack([rng.multinomial(n_p, rows[0]), rng.multinomial(size - n_p, rows[1])])


def simulate_game(pair, povm, n_trials, seed, workers=1):
    """Play ``n_trials`` rounds: draw the input from the priors, then an outcome.

    Per block, the number of |p> inputs is binomial and the outcomes for each
    input are multinomial, which has the same law as trial-by-trial sampling.
    """
    n_trials = int(n_trials)
    if n_trials < 1:
        raise DomainError("n_trials", n_trials, "n_trials must be at least 1")
    rows = channel_from_povm(povm, pair).rows
    # multinomial rejects probability vectors that overshoot 1 by round-off
    rows = rows / rows.sum(axis=1, keepdims=True)
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    sizes = [BLOCK_SIZE] * (n_trials // BLOCK_SIZE)
    if n_trials % BLOCK_SIZE:
        sizes.append(n_trials % BLOCK_SIZE)

    def run(index):
        return _block(rows, pair.prior_p, sizes[index], seed, index)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return TrialCounts(np.sum(parts, axis=0), n_trials)


def empirical_mutual_information(counts):
    """Plug-in mutual information of the empirical joint distribution."""
    c = np.asarray(counts.counts, dtype=float)
    if counts.total <= 0:
        raise ValueError("no trials recorded")
    n_x = c.sum(axis=1)
    priors = n_x / counts.total
    keep = n_x > 0
    if keep.sum() < 2:
        return 0.0
    rows = c / n_x[:, None]
    return mutual_information(rows, priors)
