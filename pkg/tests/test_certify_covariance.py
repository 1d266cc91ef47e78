import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from qnetcert.bounds import PurityProfile, fidelity_trace_bound
from qnetcert.certify import (
    CertStatus,
    certify_cqn_covariance,
    certify_iqn_covariance,
    fidelity_from_distance,
    fidelity_upper_bound,
    known_noise_check,
    min_covariance_distance,
)
from qnetcert.network import Network, cycle, triangle
from qnetcert.sampling import sample_iqn_state
from qnetcert.states import CovarianceMatrix, covariance, ghz, pauli_measurements, random_measurements, rho_alpha

Z3 = pauli_measurements(3)
ONES = CovarianceMatrix(np.ones((3, 3)), (1, 1, 1))


def test_iqn_covariance_ghz_incompatible():
    rep = certify_iqn_covariance(covariance(ghz(3), Z3), triangle())
    assert rep.status is CertStatus.INCOMPATIBLE
    assert rep.margin < -0.1


def test_iqn_covariance_block_diagonal_compatible():
    gamma = CovarianceMatrix(np.diag([1.0, 0.5, 0.25, 0.8]), (2, 1, 1))
    rep = certify_iqn_covariance(gamma, Network(3, ((0, 1), (1, 2))))
    assert rep.status is CertStatus.COMPATIBLE
    blocks = rep.details["source_blocks"]
    total = np.zeros((4, 4))
    for e, rows in (((0, 1), [0, 1, 2]), ((1, 2), [2, 3])):
        total[np.ix_(rows, rows)] += blocks[str(e)]
    assert np.allclose(total, gamma.matrix, atol=1e-7)


def test_block_mismatch():
    with pytest.raises(ValueError):
        certify_iqn_covariance(CovarianceMatrix(np.eye(2), (1, 1)), triangle())


@pytest.mark.parametrize("alpha", [0, 0.1, 0.25, 0.4])
def test_cqn_covariance_rho_alpha_incompatible(alpha):
    rho = rho_alpha(alpha)
    rep = certify_cqn_covariance(covariance(rho, Z3), triangle(), PurityProfile.from_state(rho, Z3))
    assert rep.status is CertStatus.INCOMPATIBLE


def test_cqn_covariance_half_compatible_with_all_ones_witness():
    rho = rho_alpha(0.5)
    rep = certify_cqn_covariance(covariance(rho, Z3), triangle(), PurityProfile.from_state(rho, Z3))
    assert rep.status is CertStatus.COMPATIBLE
    assert np.allclose(rep.details["gamma_c"], np.ones((3, 3)), atol=1e-6)


def test_cqn_covariance_pure_limit_matches_iqn():
    p = PurityProfile.from_state(ghz(3), Z3)
    cqn = certify_cqn_covariance(ONES, triangle(), p)
    iqn = certify_iqn_covariance(ONES, triangle())
    assert cqn.status is iqn.status is CertStatus.INCOMPATIBLE


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_nesting_iqn_excluded_whenever_cqn_is(seed):
    rng = np.random.default_rng(seed)
    alpha = float(rng.uniform(0, 1))
    rho = rho_alpha(alpha)
    m = random_measurements((2, 2, 2), 1, rng) if seed % 2 else Z3
    gamma = covariance(rho, m)
    cqn = certify_cqn_covariance(gamma, triangle(), PurityProfile.from_state(rho, m))
    iqn = certify_iqn_covariance(gamma, triangle())
    if cqn.status is CertStatus.INCOMPATIBLE:
        assert iqn.status is CertStatus.INCOMPATIBLE


def test_cqn_covariance_monotone_in_tau():
    rho = rho_alpha(0.3)
    gamma = covariance(rho, Z3)
    base = PurityProfile.from_state(rho, Z3)
    seen_compatible = False
    for tau in np.linspace(base.tau, 0.3, 8):
        rep = certify_cqn_covariance(gamma, triangle(), base.with_tau(float(tau)))
        if seen_compatible:
            assert rep.status is not CertStatus.INCOMPATIBLE
        seen_compatible |= rep.status is CertStatus.COMPATIBLE
    assert seen_compatible


# --- known noise -----------------------------------------------------------

def test_known_noise_all_ones_incompatible():
    rep = known_noise_check(ONES, triangle(), np.eye(3))
    assert rep.status is CertStatus.INCOMPATIBLE
    p = PurityProfile(r=1, tau=1.0, l1=3.0)
    assert known_noise_check(ONES, triangle(), np.eye(3), p=p).status is CertStatus.INCOMPATIBLE


def test_known_noise_identity_compatible():
    rep = known_noise_check(CovarianceMatrix(np.eye(3), (1, 1, 1)), triangle(), np.eye(3))
    assert rep.status is CertStatus.COMPATIBLE


@pytest.mark.parametrize("eta", [0.3, 0.6, 0.9])
def test_known_noise_true_eta(eta):
    rho, _ = sample_iqn_state(cycle(4), local_channels=True, seed=17)
    m = random_measurements(rho.dims, 2, np.random.default_rng(4))
    gq = covariance(rho, m).matrix
    mixed = CovarianceMatrix(eta * gq + (1 - eta) * np.eye(len(gq)), m.sizes)
    rep = known_noise_check(mixed, cycle(4), np.eye(len(gq)), eta_range=(eta, eta))
    assert rep.status is CertStatus.COMPATIBLE
    assert rep.details["eta"] == pytest.approx(eta, abs=1e-7)


def test_known_noise_validation():
    with pytest.raises(ValueError):
        known_noise_check(ONES, triangle(), np.eye(2))
    with pytest.raises(ValueError):
        known_noise_check(ONES, triangle(), -np.eye(3))
    with pytest.raises(ValueError):
        known_noise_check(ONES, triangle(), np.eye(3), eta_range=(0.5, 0.2))


# --- covariance distance / fidelity ---------------------------------------

def test_min_distance_all_ones_triangle():
    t0, verdict = min_covariance_distance(ONES, triangle())
    assert verdict.status.value == "Feasible"
    assert t0 == pytest.approx(0.5, abs=1e-6)


def test_min_distance_without_variance_cap_is_smaller():
    # dropping the variance cap lets the diagonal grow and gives 1/3
    t0, _ = min_covariance_distance(ONES, triangle(), variance_cap=None)
    assert t0 == pytest.approx(1 / 3, abs=1e-6)


def test_fidelity_modes_on_ghz():
    assert fidelity_upper_bound(ONES, triangle(), "stabilizer") == pytest.approx(11 / 12, abs=1e-12)
    generic = fidelity_upper_bound(ONES, triangle(), "generic")
    oracle = brentq(lambda f: 2 * math.sqrt(1 - f) + 2 * math.sqrt(1 - f * f) - 0.5, 0, 1, xtol=1e-14)
    assert generic == pytest.approx(oracle, abs=1e-9)
    assert fidelity_trace_bound(generic) == pytest.approx(0.5, abs=1e-9)


def test_fidelity_of_network_state_is_one():
    rho, _ = sample_iqn_state(triangle(), local_channels=True, seed=2)
    gamma = covariance(rho, Z3)
    assert fidelity_upper_bound(gamma, triangle(), "generic") == 1.0


def test_fidelity_from_distance_edges():
    assert fidelity_from_distance(0.0) == 1.0
    assert fidelity_from_distance(10.0) == 0.0
    assert fidelity_from_distance(6.0, "stabilizer") == 0.0
    with pytest.raises(ValueError):
        fidelity_upper_bound(ONES, triangle(), "exact")
