import math

import numpy as np
import pytest

from zeno_lab.errors import ModelError
from zeno_lab.linalg import eig_hermitian, hermiticity_residual
from zeno_lab.model import (
    ModelParams,
    build_mm_hamiltonian,
    build_qm_hamiltonian,
    build_schedule,
    build_total_hamiltonian,
    excitation_number,
)


def basis_index(bits):
    """Register index of a bit string with Q as the leftmost qubit."""
    return int("".join(str(b) for b in bits), 2)


def test_qm_matrix_element():
    p = ModelParams(n_memory=1, omega=0.8)
    h = build_qm_hamiltonian(p, 1)
    assert h[basis_index([0, 1]), basis_index([1, 0])] == pytest.approx(0.8j)
    assert h[basis_index([1, 0]), basis_index([0, 1])] == pytest.approx(-0.8j)
    assert h[0, 0] == 0 and h[3, 3] == 0


def test_qm_embedding_acts_on_chosen_memory_qubit():
    p = ModelParams(n_memory=3)
    h = build_qm_hamiltonian(p, 2)
    # Q excited, memory blank -> Q ground, memory qubit 2 excited
    assert h[basis_index([0, 0, 1, 0]), basis_index([1, 0, 0, 0])] == pytest.approx(1j)
    assert h[basis_index([0, 1, 0, 0]), basis_index([1, 0, 0, 0])] == 0


def test_qm_commutes_with_excitation_number():
    p = ModelParams(n_memory=2)
    n_op = excitation_number(3)
    for k in (1, 2):
        h = build_qm_hamiltonian(p, k)
        assert np.max(np.abs(h @ n_op - n_op @ h)) <= 1e-12


def test_index_errors():
    p = ModelParams(n_memory=3)
    with pytest.raises(ModelError):
        build_qm_hamiltonian(p, 0)
    with pytest.raises(ModelError):
        build_qm_hamiltonian(p, 4)
    with pytest.raises(ModelError):
        build_mm_hamiltonian(p, 3)
    with pytest.raises(ModelError):
        build_total_hamiltonian(p, 4)


def test_mm_zero_coupling():
    p = ModelParams(n_memory=3, r=0.0)
    assert not build_mm_hamiltonian(p, 1).any()


def test_mm_matrix_element():
    p = ModelParams(n_memory=3, omega=1.0, r=1.5)
    h = build_mm_hamiltonian(p, 2)
    assert h[basis_index([0, 0, 0, 1]), basis_index([0, 0, 1, 0])] == pytest.approx(1.5j)
    assert hermiticity_residual(h) <= 1e-14


@pytest.mark.parametrize("r", [0.0, 1.62, 2.7])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_total_hamiltonian_invariants(r, k):
    p = ModelParams(n_memory=3, r=r)
    h = build_total_hamiltonian(p, k).h_total
    n_op = excitation_number(4)
    assert np.max(np.abs(h @ n_op - n_op @ h)) <= 1e-12
    assert not np.real(h).any()
    np.testing.assert_array_equal(np.imag(h), -np.imag(h).T)


def test_total_rebuild_and_compare():
    p = ModelParams(n_memory=3, r=0.9)
    for k in (1, 2, 3):
        seg = build_total_hamiltonian(p, k)
        rebuilt = build_qm_hamiltonian(p, k) + build_mm_hamiltonian(p, 1) + build_mm_hamiltonian(p, 2)
        np.testing.assert_array_equal(seg.h_total, rebuilt)
        assert seg.active_pair == k


def test_total_single_memory_qubit():
    p = ModelParams(n_memory=1, r=3.0)
    np.testing.assert_array_equal(build_total_hamiltonian(p, 1).h_total, build_qm_hamiltonian(p, 1))


def test_total_uncorrelated_is_qm_only():
    p = ModelParams(n_memory=3, r=0.0)
    for k in (1, 2, 3):
        np.testing.assert_array_equal(build_total_hamiltonian(p, k).h_total, build_qm_hamiltonian(p, k))


def test_total_operator_norm():
    h = build_total_hamiltonian(ModelParams(n_memory=3, r=1.62), 1).h_total
    w, _ = eig_hermitian(h)
    assert np.linalg.norm(h, 2) == pytest.approx(np.max(np.abs(w)), rel=1e-12)
    assert 0 < np.max(np.abs(w)) < np.inf


def test_schedule():
    p = ModelParams(n_memory=3, delta_t=0.6)
    s = build_schedule(p, 3)
    assert s.total_duration == pytest.approx(1.8)
    assert [seg.active_pair for _, seg in s.segments] == [1, 2, 3]
    assert s.segments[1][1].active_pair == 2
    np.testing.assert_allclose(s.boundaries, [0, 0.6, 1.2, 1.8])


def test_schedule_total_is_n_intervals():
    p = ModelParams(n_memory=5, delta_t=math.pi / 10)
    assert build_schedule(p).total_duration == pytest.approx(5 * p.delta_t)


def test_schedule_too_many_intervals():
    with pytest.raises(ModelError):
        build_schedule(ModelParams(n_memory=3), 4)


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"nu": 1.5}, "nu must lie in"),
        ({"nu": -0.1}, "nu must lie in"),
        ({"n_memory": 0}, "n_memory"),
        ({"omega": 0.0}, "omega"),
        ({"r": -1.0}, "r must be"),
        ({"delta_t": 0.0}, "delta_t"),
    ],
)
def test_params_validation(kwargs, field):
    with pytest.raises(ModelError, match=field):
        ModelParams(**kwargs)
