import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcgame.errors import DomainError
from bcgame.models import (
    ProblemConfig,
    RecordState,
    fullinfo_continue_reward,
    fullinfo_stop_reward,
    fullinfo_threshold,
    fullinfo_thresholds,
    rank_transition,
    record_transition_density,
    secretary_continue_reward,
    secretary_cutoff,
    secretary_stop_reward,
)
from bcgame.numerics import integrate


def cfg(n, p=0.5):
    return ProblemConfig(horizon=n, priority=p)


def test_config_validation():
    with pytest.raises(ValueError):
        ProblemConfig(horizon=1)
    with pytest.raises(ValueError):
        ProblemConfig(horizon=5, priority=1.2)


def test_record_state_validation():
    with pytest.raises(ValueError):
        RecordState(index=0, value=0.5)
    with pytest.raises(ValueError):
        RecordState(index=1, value=1.5)


def test_record_density_first_step_convention():
    # 0**0 = 1: the very first transition needs no intermediate observation
    assert record_transition_density(RecordState(1, 0.0), 2) == 1.0
    assert record_transition_density(RecordState(3, 0.5), 5) == 0.5
    assert record_transition_density(RecordState(3, 0.5), 3) == 0.0


def test_record_kernel_mass_identity():
    n, big_n, x = 2, 6, 0.3
    state = RecordState(n, x)
    mass = sum(
        record_transition_density(state, m) * (1 - x) for m in range(n + 1, big_n + 1)
    )
    assert mass + x ** (big_n - n) == pytest.approx(1.0, abs=1e-12)


@given(
    st.integers(min_value=1, max_value=99),
    st.floats(min_value=0.0, max_value=0.999999),
)
@settings(max_examples=60, derandomize=True)
def test_record_kernel_normalization_property(n, x):
    big_n = 100
    state = RecordState(n, x)
    mass = math.fsum(
        record_transition_density(state, m) * (1 - x) for m in range(n + 1, big_n + 1)
    ) + x ** (big_n - n)
    assert abs(mass - 1.0) < 1e-12


def test_rank_transition_values():
    assert rank_transition(1, 2) == pytest.approx(0.5)
    assert rank_transition(2, 4) == pytest.approx(1 / 6)
    assert rank_transition(4, 3) == 0.0
    with pytest.raises(DomainError):
        rank_transition(0, 2)


@given(st.integers(min_value=1, max_value=99))
@settings(max_examples=50, derandomize=True)
def test_rank_kernel_normalization_property(n):
    big_n = 100
    mass = math.fsum(rank_transition(n, m) for m in range(n + 1, big_n + 1))
    assert abs(mass + n / big_n - 1.0) < 1e-12


def test_rank_telescoping_example():
    assert math.fsum(rank_transition(3, m) for m in range(4, 11)) == pytest.approx(
        0.7, abs=1e-12
    )


def test_secretary_rewards():
    c = cfg(10)
    assert secretary_stop_reward(10, c) == 1.0
    assert secretary_stop_reward(4, c) == pytest.approx(0.4)
    assert secretary_stop_reward(1, c) == pytest.approx(0.1)
    assert secretary_continue_reward(10, c) == 0.0
    # exact rational oracles
    want3 = Fraction(3, 10) * sum(Fraction(1, k - 1) for k in range(4, 11))
    want4 = Fraction(4, 10) * sum(Fraction(1, k - 1) for k in range(5, 11))
    assert secretary_continue_reward(3, c) == pytest.approx(float(want3), abs=1e-12)
    assert secretary_continue_reward(4, c) == pytest.approx(float(want4), abs=1e-12)
    assert float(want3) == pytest.approx(0.398690, abs=1e-6)
    assert float(want4) == pytest.approx(0.398254, abs=1e-6)


@pytest.mark.parametrize("horizon,want", [(5, 3), (10, 4), (20, 8), (30, 12), (50, 19)])
def test_secretary_cutoff_table(horizon, want):
    assert secretary_cutoff(cfg(horizon)) == want


def test_secretary_cutoff_characterization():
    c = cfg(37)
    nstar = secretary_cutoff(c)
    for n in range(1, 38):
        stop = secretary_stop_reward(n, c)
        cont = secretary_continue_reward(n, c)
        if n < nstar:
            assert cont > stop
        else:
            assert cont <= stop


def test_secretary_cutoff_trend():
    assert 0.35 <= secretary_cutoff(cfg(50)) / 50 <= 0.40


def test_fullinfo_stop_reward():
    c = cfg(10)
    assert fullinfo_stop_reward(RecordState(10, 0.3), c) == 1.0
    assert fullinfo_stop_reward(RecordState(8, 0.5), c) == pytest.approx(0.25)
    assert fullinfo_stop_reward(RecordState(1, 0.0), c) == 0.0


def test_fullinfo_continue_reward_last_and_single_term():
    c = cfg(10)
    assert fullinfo_continue_reward(RecordState(10, 0.7), c) == 0.0
    # one remaining observation: win iff the last draw beats x, so 1 - x;
    # cross-checked against the kernel quadrature route below
    assert fullinfo_continue_reward(RecordState(9, 0.5), c) == pytest.approx(
        0.5, abs=1e-12
    )
    assert fullinfo_continue_reward(RecordState(9, 0.2), c) == pytest.approx(
        0.8, abs=1e-12
    )


def test_fullinfo_continue_reward_matches_kernel_quadrature():
    # independent route: integrate the stop reward against the record kernel
    c = cfg(7)
    state = RecordState(3, 0.4)
    direct = fullinfo_continue_reward(state, c)
    via_quad = sum(
        record_transition_density(state, k)
        * integrate(lambda y, k=k: y ** (7 - k), 0.4, 1.0)
        for k in range(4, 8)
    )
    assert direct == pytest.approx(via_quad, abs=1e-12)


def test_fullinfo_continue_reward_from_zero():
    assert fullinfo_continue_reward(RecordState(1, 0.0), cfg(3)) == pytest.approx(0.5)


def test_fullinfo_threshold_values():
    assert fullinfo_threshold(0) == 0.0
    assert fullinfo_threshold(1) == 0.5
    assert fullinfo_threshold(2) == pytest.approx(0.689898, abs=1e-5)
    with pytest.raises(DomainError):
        fullinfo_threshold(-1)


def test_fullinfo_threshold_residuals():
    for d in range(1, 50):
        x = fullinfo_threshold(d)
        residual = math.fsum((x**-k - 1.0) / k for k in range(1, d + 1)) - 1.0
        assert abs(residual) < 1e-9


def test_fullinfo_thresholds_vector():
    tv = fullinfo_thresholds(cfg(2))
    assert tv.x(1) == 0.5 and tv.x(2) == 0.0
    tv10 = fullinfo_thresholds(cfg(10))
    assert tv10.x(9) == 0.5
    assert tv10.x(8) == pytest.approx(0.689898, abs=1e-5)
    diffs = np.diff(tv10.values)
    assert np.all(diffs < 0)


def test_threshold_vector_immutable():
    tv = fullinfo_thresholds(cfg(5))
    with pytest.raises(ValueError):
        tv.values[0] = 0.9


def test_indifference_at_thresholds():
    c = cfg(12)
    tv = fullinfo_thresholds(c)
    for n in range(1, 12):
        state = RecordState(n, tv.x(n))
        gap = fullinfo_stop_reward(state, c) - fullinfo_continue_reward(state, c)
        assert abs(gap) < 1e-9
