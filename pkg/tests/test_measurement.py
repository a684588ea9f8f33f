import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povminfo.exceptions import DegenerateSpanError, ValidationError
from povminfo.information import mutual_information
from povminfo.measurement import (
    ConditionalChannel,
    GeneralizedPovm,
    MatrixPovm,
    Subchannel,
    channel_from_matrix_povm,
    channel_from_povm,
    effective_matrix_povm,
    random_povm,
    subchannel_conditionals,
    validate_povm,
)
from povminfo.states import make_state_pair

QUARTER = math.pi / 4
HELSTROM = np.array([[0.85355339059327376, 0.14644660940672624],
                     [0.14644660940672624, 0.85355339059327376]])


def _projector(theta):
    v = np.array([math.cos(theta), math.sin(theta)])
    return np.outer(v, v)


def _single(pair, theta=QUARTER):
    return GeneralizedPovm((Subchannel(1.0, 1.0, math.cos(pair.alpha), theta),))


def test_identical_post_states_give_identical_rows():
    for theta in (0.0, 0.4, 2.0):
        m = subchannel_conditionals(Subchannel(1, 1, 1.0, theta))
        assert np.allclose(m[0], m[1])


def test_orthogonal_post_states_aligned_readout():
    assert np.allclose(subchannel_conditionals(Subchannel(1, 1, 0.0, QUARTER)), np.eye(2), atol=1e-15)


def test_helstrom_conditionals():
    m = subchannel_conditionals(Subchannel(1, 1, math.cos(QUARTER), QUARTER))
    # direct evaluation of cos/sin(theta -+ alpha/2) squared
    half = QUARTER / 2
    direct = np.array([[math.cos(QUARTER - half) ** 2, math.sin(QUARTER - half) ** 2],
                       [math.cos(QUARTER + half) ** 2, math.sin(QUARTER + half) ** 2]])
    assert np.allclose(m, direct, atol=1e-15)
    assert np.allclose(m, HELSTROM, atol=1e-12)


def test_channel_single_subchannel_reduction():
    pair = make_state_pair(QUARTER, 0.5)
    ch = channel_from_povm(_single(pair), pair)
    assert np.allclose(ch.rows, subchannel_conditionals(_single(pair).subchannels[0]))
    assert np.allclose(ch.rows, HELSTROM, atol=1e-12)


def test_duplicated_subchannels_carry_no_extra_information():
    pair = make_state_pair(0.9, 0.4)
    c = math.cos(pair.alpha)
    single = channel_from_povm(_single(pair, 0.5), pair)
    double = channel_from_povm(
        GeneralizedPovm((Subchannel(0.5, 0.5, c, 0.5), Subchannel(0.5, 0.5, c, 0.5))), pair
    )
    assert double.n_outcomes == 4
    assert mutual_information(double, pair.priors) == pytest.approx(
        mutual_information(single, pair.priors), abs=1e-14
    )


def test_channel_rejects_invalid_povm():
    pair = make_state_pair(QUARTER, 0.5)
    bad = GeneralizedPovm((Subchannel(0.9, 1.0, math.cos(QUARTER), 0.0),))
    with pytest.raises(ValidationError) as info:
        channel_from_povm(bad, pair)
    assert info.value.residuals["sum_p"] == pytest.approx(0.1)


def test_matrix_channel_examples():
    pair = make_state_pair(QUARTER, 0.5)
    trivial = channel_from_matrix_povm(MatrixPovm((np.eye(2),)), pair)
    assert np.allclose(trivial.rows, [[1.0], [1.0]])
    assert mutual_information(trivial, pair.priors) == 0.0

    helstrom = MatrixPovm((_projector(QUARTER), _projector(QUARTER + math.pi / 2)))
    assert np.allclose(channel_from_matrix_povm(helstrom, pair).rows, HELSTROM, atol=1e-12)

    orth = make_state_pair(math.pi / 2, 0.5)
    assert np.allclose(channel_from_matrix_povm(helstrom, orth).rows, np.eye(2), atol=1e-12)


def test_matrix_povm_validation():
    with pytest.raises(ValidationError):
        MatrixPovm((np.eye(2) * 0.5,))
    with pytest.raises(ValidationError):
        MatrixPovm((np.array([[1.0, 0.2], [0.0, 1.0]]),))
    with pytest.raises(ValidationError):
        MatrixPovm((np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))


def test_effective_povm_orthogonal_case():
    pair = make_state_pair(math.pi / 2, 0.5)
    eff = effective_matrix_povm(_single(pair), pair)
    assert np.allclose(eff.elements[0], np.outer(pair.vec_p, pair.vec_p), atol=1e-12)
    assert np.allclose(eff.elements[1], np.outer(pair.vec_q, pair.vec_q), atol=1e-12)


def test_effective_povm_quarter_matches_born_rule():
    pair = make_state_pair(QUARTER, 0.5)
    eff = effective_matrix_povm(_single(pair), pair)
    assert np.allclose(channel_from_matrix_povm(eff, pair).rows, HELSTROM, atol=1e-12)
    # the Helstrom readout is the projective basis at theta = pi/4 from the bisector
    assert np.allclose(eff.elements[0], _projector(QUARTER), atol=1e-12)


def test_effective_povm_degenerate_span():
    pair = make_state_pair(0.0, 0.5)
    with pytest.raises(DegenerateSpanError):
        effective_matrix_povm(_single(pair), pair)


def test_validate_povm_examples():
    pair = make_state_pair(0.7, 0.5)
    c = math.cos(0.7)
    assert validate_povm(_single(pair), pair).max_residual <= 1e-15
    two = GeneralizedPovm((Subchannel(0.5, 0.5, c, 0.1), Subchannel(0.5, 0.5, c, 1.0)))
    report = validate_povm(two, pair)
    assert report.passed and report.max_residual < 1e-15
    short = GeneralizedPovm((Subchannel(0.45, 0.5, c, 0.1), Subchannel(0.45, 0.5, c, 1.0)))
    report = validate_povm(short, pair)
    assert not report.passed
    assert report.sum_p_residual == pytest.approx(0.1)


def test_zero_weight_subchannel_allowed():
    pair = make_state_pair(0.7, 0.5)
    povm = GeneralizedPovm((Subchannel(1.0, 1.0, math.cos(0.7), 0.3), Subchannel(0.0, 0.0, -0.4, 0.0)))
    ch = channel_from_povm(povm, pair)
    assert np.all(ch.rows[:, 2:] == 0.0)


def test_subchannel_rejects_negative_weight():
    with pytest.raises(ValidationError):
        Subchannel(-0.1, 0.5, 0.0, 0.0)


def test_conditional_channel_checks_rows():
    with pytest.raises(ValidationError):
        ConditionalChannel(np.array([[0.5, 0.4], [0.5, 0.5]]))


def test_json_round_trip():
    pair = make_state_pair(1.1, 0.4)
    povm = random_povm(pair, 3, 5)
    text = povm.to_json()
    assert list(povm.to_dict()["subchannels"][0]) == ["p", "q", "cos_alpha", "theta"]
    assert GeneralizedPovm.from_json(text) == povm


povm_cases = st.tuples(
    st.floats(1e-3, math.pi / 2), st.floats(0.0, 1.0), st.integers(1, 5), st.integers(0, 2**32 - 1)
)


@settings(max_examples=100)
@given(povm_cases)
def test_random_povms_are_valid_and_row_stochastic(case):
    alpha, prior, n, seed = case
    pair = make_state_pair(alpha, prior)
    povm = random_povm(pair, n, seed)
    assert validate_povm(povm, pair).passed
    rows = channel_from_povm(povm, pair).rows
    assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-10)


@settings(max_examples=100)
@given(povm_cases)
def test_representation_equivalence(case):
    alpha, prior, n, seed = case
    pair = make_state_pair(alpha, prior)
    povm = random_povm(pair, n, seed)
    eff = effective_matrix_povm(povm, pair)
    assert len(eff) == 2 * n
    assert np.allclose(sum(eff.elements), np.eye(2), atol=1e-9)
    for e in eff.elements:
        assert np.linalg.eigvalsh(e)[0] >= -1e-10
    direct = channel_from_povm(povm, pair).rows
    assert np.allclose(channel_from_matrix_povm(eff, pair).rows, direct, atol=1e-9)


@settings(max_examples=50)
@given(povm_cases, st.randoms(use_true_random=False))
def test_permuting_subchannels_permutes_columns(case, rnd):
    alpha, prior, n, seed = case
    pair = make_state_pair(alpha, prior)
    povm = random_povm(pair, n, seed)
    order = list(range(n))
    rnd.shuffle(order)
    shuffled = GeneralizedPovm(tuple(povm.subchannels[i] for i in order))
    a = channel_from_povm(povm, pair).rows
    b = channel_from_povm(shuffled, pair).rows
    cols = [c for i in order for c in (2 * i, 2 * i + 1)]
    assert np.allclose(b, a[:, cols], atol=1e-15)
    assert mutual_information(b, pair.priors) == pytest.approx(mutual_information(a, pair.priors), abs=1e-12)


def test_random_povm_at_zero_angle():
    pair = make_state_pair(0.0, 0.5)
    povm = random_povm(pair, 3, 1)
    assert validate_povm(povm, pair).passed
    for s in povm.subchannels:
        assert s.weight_p == pytest.approx(s.weight_q, abs=1e-9)
