import math

import numpy as np
import pytest

from povminfo.exceptions import DomainError
from povminfo.information import mutual_information
from povminfo.measurement import GeneralizedPovm, Subchannel, channel_from_povm
from povminfo.simulate import TrialCounts, empirical_mutual_information, simulate_game
from povminfo.states import make_state_pair

QUARTER = math.pi / 4
CHI_P_QUARTER = 0.39912396330714390


def _readout(alpha, theta=QUARTER):
    return GeneralizedPovm((Subchannel(1.0, 1.0, math.cos(alpha), theta),))


def test_uninformative_measurement():
    pair = make_state_pair(0.0, 0.5)
    counts = simulate_game(pair, _readout(0.0), 10_000, 1)
    assert empirical_mutual_information(counts) == pytest.approx(0.0, abs=5e-3)


def test_identity_channel_is_diagonal():
    pair = make_state_pair(math.pi / 2, 0.5)
    counts = simulate_game(pair, _readout(math.pi / 2), 10_000, 1)
    assert counts.counts[0, 1] == 0 and counts.counts[1, 0] == 0
    assert counts.counts[0, 0] + counts.counts[1, 1] == 10_000


def test_optimal_readout_million_trials():
    pair = make_state_pair(QUARTER, 0.5)
    counts = simulate_game(pair, _readout(QUARTER), 1_000_000, 42)
    assert counts.total == 1_000_000
    assert abs(empirical_mutual_information(counts) - CHI_P_QUARTER) < 5e-3


def test_estimator_examples():
    assert empirical_mutual_information(TrialCounts([[10, 0], [0, 0]], 10)) == 0.0
    assert empirical_mutual_information(TrialCounts([[500, 0], [0, 500]], 1000)) == 1.0
    pair = make_state_pair(QUARTER, 0.5)
    rows = channel_from_povm(_readout(QUARTER), pair).rows
    expected = np.rint(rows * 5_000_000).astype(int)
    est = empirical_mutual_information(TrialCounts(expected, int(expected.sum())))
    assert est == pytest.approx(CHI_P_QUARTER, abs=1e-6)


def test_zero_trials_rejected():
    pair = make_state_pair(QUARTER, 0.5)
    with pytest.raises(DomainError):
        simulate_game(pair, _readout(QUARTER), 0, 1)


def test_determinism_and_sharding():
    pair = make_state_pair(0.9, 0.3)
    povm = _readout(0.9, 0.7)
    n = 3 * 65_536 + 17
    a = simulate_game(pair, povm, n, 123)
    assert a == simulate_game(pair, povm, n, 123)
    assert a == simulate_game(pair, povm, n, 123, workers=4)
    assert a != simulate_game(pair, povm, n, 124)


def test_input_frequencies_follow_priors():
    pair = make_state_pair(0.9, 0.3)
    counts = simulate_game(pair, _readout(0.9), 200_000, 5)
    freq = counts.counts[0].sum() / counts.total
    assert abs(freq - 0.3) < 4 * math.sqrt(0.3 * 0.7 / counts.total)


def test_json_round_trip():
    counts = TrialCounts([[3, 1], [0, 6]], 10)
    assert counts.to_dict() == {"counts": [[3, 1], [0, 6]], "total": 10}
    assert TrialCounts.from_dict(counts.to_dict()) == counts


def test_counts_validation():
    with pytest.raises(ValueError):
        TrialCounts([[1, 2], [3, 4]], 11)
    with pytest.raises(ValueError):
        TrialCounts([[1, -1], [3, 4]], 7)


@pytest.mark.slow
def test_estimator_error_shrinks_with_trials():
    pair = make_state_pair(QUARTER, 0.5)
    povm = _readout(QUARTER)
    exact = mutual_information(channel_from_povm(povm, pair), pair.priors)
    medians = []
    for n in (10_000, 100_000, 1_000_000):
        errs = [abs(empirical_mutual_information(simulate_game(pair, povm, n, s)) - exact) for s in range(20)]
        medians.append(float(np.median(errs)))
    assert medians[0] > medians[1] > medians[2]


def test_cell_frequencies_within_four_sigma():
    pair = make_state_pair(1.0, 0.4)
    c = math.cos(1.0)
    povm = GeneralizedPovm((Subchannel(0.6, 0.6, c, 0.3), Subchannel(0.4, 0.4, c, 1.1)))
    rows = channel_from_povm(povm, pair).rows
    hits = total = 0
    for seed in range(30):
        counts = simulate_game(pair, povm, 20_000, seed).counts
        for x in (0, 1):
            n_x = counts[x].sum()
            dev = np.abs(counts[x] / n_x - rows[x])
            hits += int(np.sum(dev <= 4 * np.sqrt(rows[x] * (1 - rows[x]) / n_x)))
            total += rows.shape[1]
    assert hits >= 0.95 * total
