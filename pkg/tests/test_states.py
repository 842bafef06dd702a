import math

import numpy as np
import pytest

from conftest import make_displacements
from states import ConditionedState, ConditioningError, ModeIndexError, coherent_overlap, condition_full, condition_ir


def test_coherent_overlap():
    a, b = 1.0 + 0.5j, -0.3 + 0.2j
    assert coherent_overlap(a, a) == pytest.approx(1.0)
    assert abs(coherent_overlap(b, a)) ** 2 == pytest.approx(math.exp(-abs(a - b) ** 2))
    assert coherent_overlap(b, a) == pytest.approx(np.conj(coherent_overlap(a, b)))
    assert coherent_overlap(0.0, a) == pytest.approx(math.exp(-0.5 * abs(a) ** 2))


def test_single_mode_conditioning():
    state = condition_full(make_displacements([1.0]))
    assert state.xi_ir == pytest.approx(math.exp(-0.5))
    assert state.xi_uv == 1.0
    assert state.norm_squared() == pytest.approx(1.0 - math.exp(-1.0))
    assert state.form == "full"


def test_full_conditioning(harmonic_displacements):
    state = condition_full(harmonic_displacements)
    chi = harmonic_displacements.chi
    assert state.amplitudes.shape == (2, 3)
    assert np.all(state.amplitudes[1] == 0)
    assert state.xi_ir == pytest.approx(math.exp(-0.5 * abs(chi[0]) ** 2))
    assert state.xi_uv == pytest.approx(math.exp(-0.5 * (abs(chi[1]) ** 2 + abs(chi[2]) ** 2)))
    assert state.norm_squared() == pytest.approx(1.0 - math.exp(-np.sum(np.abs(chi) ** 2)))


def test_fundamental_mode_conditioning(harmonic_displacements):
    state = condition_ir(harmonic_displacements)
    xi_ir, xi_uv = state.xi_ir, state.xi_uv
    assert list(state.orders) == [1]
    assert state.amplitudes[0, 0] == harmonic_displacements[1]
    assert state.coefficients[1] == pytest.approx(-xi_ir * xi_uv ** 2)
    assert state.norm_squared() == pytest.approx(1.0 + xi_ir ** 2 * xi_uv ** 4 - 2.0 * xi_ir ** 2 * xi_uv ** 2)


@pytest.mark.parametrize("chi", [[0.0, 0.0], [1e-10]])
def test_vanishing_displacement_annihilates_the_state(chi):
    with pytest.raises(ConditioningError):
        condition_full(make_displacements(chi))


def test_unknown_mode(harmonic_displacements):
    state = condition_full(harmonic_displacements)
    with pytest.raises(ModeIndexError) as e:
        state.reduced(4)
    assert e.value.order == 4


def test_displacement_operator():
    state = ConditionedState(orders=np.array([1]), amplitudes=np.array([[0.5 + 0j]]), coefficients=np.array([1 + 0j]))
    moved = state.displaced(0.3j, 1)
    assert moved.amplitudes[0, 0] == pytest.approx(0.5 + 0.3j)
    assert moved.coefficients[0] == pytest.approx(np.exp(0.15j))
    assert state.amplitudes[0, 0] == 0.5


def test_normalization_and_phase(harmonic_displacements):
    state = condition_full(harmonic_displacements)
    assert state.normalized().norm_squared() == pytest.approx(1.0)
    assert state.with_phase(1.3).norm_squared() == pytest.approx(state.norm_squared())


def test_reduced_mode(harmonic_displacements):
    state = condition_full(harmonic_displacements)
    for order in (1, 2, 3):
        reduced = state.reduced(order)
        assert reduced.trace() == pytest.approx(state.norm_squared())
        assert np.allclose(reduced.normalized_weights(), reduced.normalized_weights().conj().T)
        assert 0.5 <= reduced.purity() <= 1.0 + 1e-12
    assert condition_full(make_displacements([1.0])).reduced(1).purity() == pytest.approx(1.0)
