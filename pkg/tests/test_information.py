import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povminfo.exceptions import DomainError
from povminfo.information import (
    binary_entropy,
    holevo_bound,
    holevo_equal_priors,
    mutual_information,
    optimal_projective_chi,
    subchannel_mutual_information,
)
from povminfo.measurement import Subchannel, channel_from_povm, random_povm, subchannel_conditionals
from povminfo.states import make_state_pair

# Frozen from 40-digit mpmath evaluation of the entropy formulas.
H_AT_08535 = 0.60087603667575056
CHI_P_QUARTER = 0.39912396330714390
CHI_H_QUARTER = 0.60087603669285610
HOLEVO_THIRD_03 = 0.71357423535498562
HELSTROM = np.array([[0.85355339059327376, 0.14644660940672624],
                     [0.14644660940672624, 0.85355339059327376]])


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.8535533906) == pytest.approx(H_AT_08535, abs=1e-14)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_symmetric(x):
    assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x), abs=1e-12)
    assert 0.0 <= binary_entropy(x) <= 1.0


@pytest.mark.parametrize("x", [-0.01, 1.01, math.nan])
def test_binary_entropy_domain(x):
    with pytest.raises(DomainError):
        binary_entropy(x)


def test_mutual_information_examples():
    assert mutual_information(np.eye(2), (0.5, 0.5)) == pytest.approx(1.0)
    assert mutual_information(np.array([[0.3, 0.7], [0.3, 0.7]]), (0.2, 0.8)) == 0.0
    mi = mutual_information(HELSTROM, (0.5, 0.5))
    assert mi == pytest.approx(CHI_P_QUARTER, abs=1e-12)
    assert mi == pytest.approx(1.0 - binary_entropy((1 - math.sin(math.pi / 4)) / 2), abs=1e-12)


def test_zero_columns_contribute_nothing():
    rows = np.array([[0.5, 0.0, 0.5], [0.0, 0.0, 1.0]])
    assert np.isfinite(mutual_information(rows, (0.5, 0.5)))
    assert mutual_information(rows, (0.5, 0.5)) == pytest.approx(
        mutual_information(rows[:, [0, 2]], (0.5, 0.5))
    )


def _random_channel(draw_rows, m):
    rows = np.abs(np.array(draw_rows).reshape(2, m)) + 1e-3
    return rows / rows.sum(axis=1, keepdims=True)


channels = st.integers(2, 6).flatmap(
    lambda m: st.tuples(
        st.just(m),
        st.lists(st.floats(0.0, 1.0), min_size=2 * m, max_size=2 * m),
        st.floats(0.0, 1.0),
    )
)


@given(channels)
def test_mutual_information_bounds(data):
    m, raw, prior = data
    rows = _random_channel(raw, m)
    mi = mutual_information(rows, (prior, 1.0 - prior))
    assert -1e-12 <= mi <= binary_entropy(prior) + 1e-12


@given(channels)
def test_merging_columns_never_increases_information(data):
    m, raw, prior = data
    rows = _random_channel(raw, m)
    merged = np.column_stack([rows[:, 0] + rows[:, 1], rows[:, 2:]])
    pri = (prior, 1.0 - prior)
    assert mutual_information(merged, pri) <= mutual_information(rows, pri) + 1e-12


def test_subchannel_information_examples():
    pair = make_state_pair(math.pi / 4, 0.5)
    assert subchannel_mutual_information(Subchannel(1, 1, 1.0, 0.3), pair) == 0.0
    assert subchannel_mutual_information(Subchannel(1, 1, 0.0, math.pi / 4), pair) == pytest.approx(1.0)
    sub = Subchannel(1, 1, math.cos(math.pi / 4), math.pi / 4)
    assert subchannel_mutual_information(sub, pair) == pytest.approx(CHI_P_QUARTER, abs=1e-12)
    assert subchannel_mutual_information(Subchannel(0.0, 0.0, 0.2, 0.1), pair) == 0.0


@settings(max_examples=50)
@given(st.floats(0.0, math.pi / 2), st.floats(0.01, 0.99), st.integers(0, 2**32 - 1))
def test_subchannel_information_is_renormalized_channel_information(alpha, prior, seed):
    pair = make_state_pair(alpha, prior)
    for sub in random_povm(pair, 3, seed).subchannels:
        wp, wq = prior * sub.weight_p, (1 - prior) * sub.weight_q
        ref = mutual_information(subchannel_conditionals(sub), (wp / (wp + wq), wq / (wp + wq)))
        assert subchannel_mutual_information(sub, pair) == pytest.approx(ref, abs=1e-12)


def test_holevo_examples():
    assert holevo_bound(make_state_pair(0.0, 0.3)) == 0.0
    assert holevo_bound(make_state_pair(math.pi / 2, 0.5)) == pytest.approx(1.0, abs=1e-12)
    assert holevo_bound(make_state_pair(math.pi / 4, 0.5)) == pytest.approx(CHI_H_QUARTER, abs=1e-12)
    assert holevo_bound(make_state_pair(math.pi / 3, 0.3)) == pytest.approx(HOLEVO_THIRD_03, abs=1e-12)


def test_holevo_matches_numeric_eigendecomposition():
    pair = make_state_pair(math.pi / 3, 0.3)
    vp, vq = np.array(pair.vec_p), np.array(pair.vec_q)
    lam = np.linalg.eigvalsh(0.3 * np.outer(vp, vp) + 0.7 * np.outer(vq, vq))
    assert holevo_bound(pair) == pytest.approx(float(-(lam * np.log2(lam)).sum()), abs=1e-12)


@given(st.floats(0.0, math.pi / 2))
def test_equal_priors_holevo_reduces_to_closed_form(alpha):
    assert holevo_bound(make_state_pair(alpha, 0.5)) == pytest.approx(holevo_equal_priors(alpha), abs=1e-12)


def test_optimal_projective_chi_examples():
    assert optimal_projective_chi(0.0) == 0.0
    assert optimal_projective_chi(math.pi / 2) == 1.0
    assert optimal_projective_chi(math.pi / 4) == pytest.approx(CHI_P_QUARTER, abs=1e-12)


def test_holevo_dominates_closed_form_on_grid():
    grid = np.linspace(0.0, math.pi / 2, 181)
    gaps = np.array([holevo_equal_priors(a) - optimal_projective_chi(a) for a in grid])
    assert gaps.min() >= -1e-12
    assert gaps[0] == pytest.approx(0.0, abs=1e-12) and gaps[-1] == pytest.approx(0.0, abs=1e-12)
    assert np.all(gaps[1:-1] > 1e-6)


@settings(max_examples=100)
@given(st.floats(0.0, math.pi / 2), st.floats(0.0, 1.0), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_holevo_bounds_random_measurements(alpha, prior, n, seed):
    pair = make_state_pair(alpha, prior)
    povm = random_povm(pair, n, seed)
    mi = mutual_information(channel_from_povm(povm, pair), pair.priors)
    assert mi <= holevo_bound(pair) + 1e-9
