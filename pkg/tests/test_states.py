import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qnetcert.linalg import DensityMatrix, is_psd, numerical_rank, partial_trace, purity
from qnetcert.network import Network, cycle, star, triangle
from qnetcert.sampling import parity_unitary, sample_cqn_state, sample_iqn_state
from qnetcert.states import (
    PAULI,
    CovarianceMatrix,
    Decomposition,
    MeasurementCollection,
    covariance,
    expectations,
    gamma_c,
    ghz,
    pauli_measurements,
    random_measurements,
    rho_alpha,
)

Z3 = pauli_measurements(3, "Z")


def test_ghz_basics():
    rho = ghz(3)
    assert purity(rho) == pytest.approx(1) and numerical_rank(rho) == 1
    zz = np.kron(np.kron(PAULI["Z"], PAULI["Z"]), np.eye(2))
    assert np.trace(rho.matrix @ zz).real == pytest.approx(1)
    assert np.allclose(partial_trace(rho, [2]).matrix, np.eye(2) / 2)
    with pytest.raises(ValueError):
        ghz(1)


def test_rho_alpha():
    assert purity(rho_alpha(1)) == pytest.approx(1)
    assert purity(rho_alpha(0.5)) == pytest.approx(0.5)
    assert numerical_rank(rho_alpha(0.5)) == 2
    assert purity(rho_alpha(0.25)) == pytest.approx(0.625)
    with pytest.raises(ValueError):
        rho_alpha(1.5)


def _covariance_oracle(rho, m):
    ops = m.global_ops(rho.dims)
    mean = [np.trace(rho.matrix @ a).real for a in ops]
    return np.array([[np.trace(rho.matrix @ (a @ b + b @ a) / 2).real - mean[i] * mean[j]
                      for j, b in enumerate(ops)] for i, a in enumerate(ops)])


@pytest.mark.parametrize("alpha", [0, 0.1, 0.25, 0.5, 0.9, 1])
def test_covariance_of_rho_alpha_is_all_ones(alpha):
    gamma = covariance(rho_alpha(alpha), Z3)
    assert np.allclose(gamma.matrix, np.ones((3, 3)), atol=1e-14)


def test_covariance_product_state_is_block_diagonal(rng):
    a = DensityMatrix((2,), np.diag([0.3, 0.7]))
    b = DensityMatrix((3,), np.diag([0.2, 0.5, 0.3]))
    rho = DensityMatrix((2, 3), np.kron(a.matrix, b.matrix))
    m = random_measurements((2, 3), 2, rng)
    gamma = covariance(rho, m)
    assert np.allclose(gamma.block(0, 1), 0, atol=1e-14)


@given(st.integers(0, 2**32 - 1))
def test_covariance_matches_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    rho, _ = sample_iqn_state(triangle(), local_channels=True, seed=rng)
    m = random_measurements(rho.dims, [2, 1, 2], rng)
    gamma = covariance(rho, m)
    assert np.allclose(gamma.matrix, _covariance_oracle(rho, m), atol=1e-12)
    assert is_psd(gamma.matrix, 1e-10)


def test_covariance_dimension_mismatch():
    with pytest.raises(ValueError):
        covariance(ghz(2), Z3)


def test_gamma_c_examples():
    one = Decomposition((1.0,), (ghz(3),))
    assert np.allclose(gamma_c(one, Z3), 0)
    pm = Decomposition((0.5, 0.5), (ghz(3, 1), ghz(3, -1)))
    assert np.allclose(gamma_c(pm, Z3), 0)
    e0 = np.zeros(8)
    e0[0] = 1
    e7 = np.zeros(8)
    e7[7] = 1
    classical = Decomposition((0.5, 0.5), (DensityMatrix.from_vector(e0, (2, 2, 2)),
                                           DensityMatrix.from_vector(e7, (2, 2, 2))))
    assert np.allclose(gamma_c(classical, Z3), np.ones((3, 3)))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_covariance_splits_into_components_plus_classical(seed, k):
    rng = np.random.default_rng(seed)
    rho, dec = sample_cqn_state(triangle(), k, seed=seed)
    m = random_measurements(rho.dims, 2, rng)
    parts = sum(p * covariance(c, m).matrix for p, c in zip(dec.weights, dec.components))
    gc = gamma_c(dec, m)
    assert np.allclose(covariance(rho, m).matrix, parts + gc, atol=1e-8)
    assert is_psd(gc, 1e-10)


def test_measurement_collection_validation():
    with pytest.raises(ValueError):
        MeasurementCollection(((2 * PAULI["Z"],),))
    with pytest.raises(ValueError):
        MeasurementCollection(((np.array([[0, 1], [0, 0]]),),))
    with pytest.raises(ValueError):
        MeasurementCollection(((PAULI["Z"], np.eye(3)),))
    m = MeasurementCollection(((PAULI["Z"], PAULI["X"]), (np.diag([1, 0.5]),)))
    assert m.sizes == (2, 1) and m.total == 3
    assert not m.dichotomic
    assert Z3.dichotomic
    assert m.party_of_row() == [0, 0, 1]


def test_covariance_matrix_validation():
    with pytest.raises(ValueError):
        CovarianceMatrix(np.array([[1, 0.5], [0, 1]]), (1, 1))
    with pytest.raises(ValueError):
        CovarianceMatrix(np.diag([1, -1.0]), (1, 1))
    with pytest.raises(ValueError):
        CovarianceMatrix(np.eye(3), (1, 1))


def test_decomposition_validation():
    with pytest.raises(ValueError):
        Decomposition((0.5, 0.6), (ghz(2), ghz(2)))
    with pytest.raises(ValueError):
        Decomposition((1.0, 0.0), (ghz(2), ghz(2)))


# --- sampler -------------------------------------------------------------

def test_parity_unitary_is_permutation():
    u = parity_unitary(2, 3)
    assert np.allclose(u @ u.T, np.eye(8))
    assert u[np.ravel_multi_index((0, 1, 0), (2, 2, 2)), np.ravel_multi_index((1, 1, 0), (2, 2, 2))] == 1


def test_sample_triangle_dimensions():
    rho, prov = sample_iqn_state(triangle(), seed=1)
    assert rho.dims == (2, 2, 2)
    assert len(prov["source_states"]) == 3
    assert prov["party_dims"] == (2, 2, 2)


def test_sample_uncompressed_product_is_pure():
    rho, _ = sample_iqn_state(Network(2, ((0,), (1,))), seed=3, party_dim=None)
    assert purity(rho) == pytest.approx(1)
    rho, _ = sample_iqn_state(star(2), seed=3, party_dim=None, local_channels=True)
    assert rho.dims == (4, 2, 2)
    assert purity(rho) == pytest.approx(1)


def test_sampler_determinism():
    a, _ = sample_iqn_state(cycle(4), local_channels=True, seed=11)
    b, _ = sample_iqn_state(cycle(4), local_channels=True, seed=11)
    assert a == b
    c, d1 = sample_cqn_state(triangle(), 3, seed=5)
    e, d2 = sample_cqn_state(triangle(), 3, seed=5)
    assert c == e and d1.weights == d2.weights


def test_sampler_overflow():
    with pytest.raises(OverflowError):
        sample_iqn_state(cycle(7), seed=0)


def test_single_component_cqn_is_iqn_sample():
    rho, dec = sample_cqn_state(triangle(), 1, seed=9)
    assert dec.weights == (1.0,)
    assert rho == dec.components[0]


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_mixture_purity_below_max_component(seed, k):
    rho, dec = sample_cqn_state(triangle(), k, seed=seed, depolarize=True)
    assert purity(rho) <= max(purity(c) for c in dec.components) + 1e-12
    assert dec.average_purity() >= purity(rho) - 1e-12


def test_expectations_pm_means():
    assert np.allclose(expectations(ghz(3), Z3), 0)
