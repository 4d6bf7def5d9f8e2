"""Tests for gaugethermo.models."""

import math

import numpy as np
import pytest

from gaugethermo.errors import InvalidJ, InvalidParams, SingularPoint
from gaugethermo.models import (
    LMGParams,
    LZParams,
    collective_spin_ops,
    ground_level_state,
    ground_state,
    lmg_family,
    lmg_hamiltonian,
    lz_analytic,
    lz_crossing_work,
    lz_family,
    lz_hamiltonian,
)
from gaugethermo.operators import HermitianOperator
from gaugethermo.spectral import decompose, to_energy_basis
from gaugethermo.thermo import quench_report

_DELTA_GS = (0.05, 0.1, 0.2, 0.4)


def _lz_numeric(p: LZParams, g0: float, delta_g: float):
    family = lz_family(p)
    h0 = family.at(g0)
    return quench_report(ground_state(h0).state, h0, family.direction, delta_g)


def test_lz_hamiltonian_direct_substitution():
    """a=2, Δ=1, ε=0.001, g=0 gives [[−0.5, 0.001], [0.001, 0.5]]."""
    h = lz_hamiltonian(LZParams(a=2.0, delta=1.0, eps=0.001, g=0.0))
    np.testing.assert_allclose(h.matrix, [[-0.5, 0.001], [0.001, 0.5]])


def test_lz_hamiltonian_vanishes_at_crossing():
    """γ0 = 0 and ε = 0 give the zero matrix."""
    h = lz_hamiltonian(LZParams(a=2.0, delta=1.0, eps=0.0, g=0.25))
    np.testing.assert_array_equal(h.matrix, np.zeros((2, 2)))


def test_lz_eigenvalues_are_plus_minus_lambda(lz_params):
    """Eigenvalues are ±√(γ0² + ε²)."""
    p = lz_params.at(0.13)
    lam = math.hypot(p.gamma0, p.eps)
    np.testing.assert_allclose(decompose(lz_hamiltonian(p)).eigenvalues, [-lam, lam], atol=1e-15)


def test_lz_family_matches_direct_builder(lz_params):
    """base + g·aσ_z equals the direct Hamiltonian."""
    family = lz_family(lz_params)
    np.testing.assert_allclose(family.at(0.37).matrix, lz_hamiltonian(lz_params.at(0.37)).matrix, atol=1e-15)


def test_lz_params_validation():
    """a must be positive and parameters finite."""
    with pytest.raises(InvalidParams):
        LZParams(a=0.0, delta=1.0, eps=0.1)
    with pytest.raises(InvalidParams):
        LZParams(a=1.0, delta=float("inf"), eps=0.1)
    with pytest.raises(InvalidParams):
        LZParams(a=1.0, delta=1.0, eps=-0.1)


def test_lz_analytic_zero_quench(lz_params):
    """δg = 0 gives no invariant work and no coherent heat."""
    result = lz_analytic(lz_params.at(0.2), 0.0)
    assert result.w_inv == 0.0
    assert result.q_c == 0.0


def test_lz_analytic_eigenvalues_and_signs(lz_params):
    """E0 = −λ ≤ 0 ≤ λ = E1 and Q_c ≥ 0."""
    result = lz_analytic(lz_params.at(0.1), 0.2)
    assert result.e0 == -result.lam
    assert result.e0 <= 0 <= result.e1
    assert result.q_c >= 0


def test_lz_analytic_singular_point():
    """ε = 0 at the crossing is singular."""
    with pytest.raises(SingularPoint):
        lz_analytic(LZParams(a=2.0, delta=1.0, eps=0.0, g=0.25), 0.1)


def test_lz_analytic_large_gap_decay():
    """For large ε, Q_c approaches a²δg²/(2ε)."""
    delta_g = 0.01
    for eps in (1e3, 1e4):
        result = lz_analytic(LZParams(a=2.0, delta=1.0, eps=eps, g=0.1), delta_g)
        assert result.q_c == pytest.approx(4.0 * delta_g**2 / (2 * eps), rel=1e-3)


def test_lz_analytic_matches_numeric_quench(lz_params):
    """Closed-form W_inv and Q_c equal the numeric pipeline to 1e-10 on the whole grid."""
    for delta_g in _DELTA_GS:
        for g0 in np.linspace(0.0, 0.5, 101):
            exact = lz_analytic(lz_params.at(float(g0)), delta_g)
            numeric = _lz_numeric(lz_params, float(g0), delta_g)
            assert abs(numeric.w_inv - exact.w_inv) <= 1e-10, (g0, delta_g)
            assert abs(numeric.q_c - exact.q_c) <= 1e-10, (g0, delta_g)


def test_lz_analytic_energy_basis_populations(lz_params):
    """Populations, coherence modulus and S_d match the numeric energy-basis state."""
    p = LZParams(a=2.0, delta=1.0, eps=0.05, g=0.2)
    delta_g = 0.1
    exact = lz_analytic(p, delta_g)
    family = lz_family(p)
    rho = ground_state(family.at(p.g)).state
    post = decompose(family.at(p.g + delta_g))
    rho_e = to_energy_basis(rho, post).matrix
    assert rho_e[0, 0].real == pytest.approx(exact.rho_e_ground, abs=1e-12)
    assert rho_e[1, 1].real == pytest.approx(exact.rho_e_excited, abs=1e-12)
    assert abs(rho_e[0, 1]) == pytest.approx(exact.rho_e_offdiag, abs=1e-12)
    report = quench_report(rho, family.at(p.g), family.direction, delta_g)
    assert report.s_d == pytest.approx(exact.diagonal_entropy, abs=1e-10)


def test_lz_derivatives_match_finite_differences():
    """Closed-form g0-derivatives agree with central differences (step 1e-5)."""
    step = 1e-5
    delta_g = 0.1
    for g0 in (0.0, 0.1, 0.4, 0.5):
        p = LZParams(a=2.0, delta=1.0, eps=0.1, g=g0)
        exact = lz_analytic(p, delta_g)
        plus = lz_analytic(p.at(g0 + step), delta_g)
        minus = lz_analytic(p.at(g0 - step), delta_g)
        fd_w = (plus.w_inv - minus.w_inv) / (2 * step)
        fd_q = (plus.q_c - minus.q_c) / (2 * step)
        assert fd_w == pytest.approx(exact.dw_inv_dg0, rel=1e-6)
        assert fd_q == pytest.approx(exact.dq_c_dg0, rel=1e-6)


def test_lz_crossing_work_signs():
    """−(aδg/2)·sgn(γ0), with zero at the crossing."""
    delta_g = 0.05
    assert lz_crossing_work(LZParams(a=2.0, delta=1.0, eps=0.0, g=0.4), delta_g) == pytest.approx(-0.05)
    assert lz_crossing_work(LZParams(a=2.0, delta=1.0, eps=0.0, g=0.1), delta_g) == pytest.approx(0.05)
    assert lz_crossing_work(LZParams(a=2.0, delta=1.0, eps=0.0, g=0.25), delta_g) == 0.0


@pytest.mark.parametrize("gamma0", [0.3, -0.3])
def test_lz_crossing_work_matches_numeric(gamma0):
    """The ε = 0 formula agrees with the numeric engine away from the crossing."""
    delta_g = 0.05
    p = LZParams(a=2.0, delta=1.0, eps=0.0, g=(gamma0 + 0.5) / 2.0)
    report = _lz_numeric(p, p.g, delta_g)
    assert report.w_inv == pytest.approx(lz_crossing_work(p, delta_g), abs=1e-12)


def test_lz_crossing_work_matches_twirled_ground_level():
    """At the fully degenerate point the ground-level mixture carries zero invariant work."""
    delta_g = 0.05
    p = LZParams(a=2.0, delta=1.0, eps=0.0, g=0.25)
    family = lz_family(p)
    rho0 = ground_level_state(family.at(p.g))
    report = quench_report(rho0, family.at(p.g), family.direction, delta_g)
    assert report.w_inv == pytest.approx(lz_crossing_work(p, delta_g), abs=1e-12)


def test_lz_ground_state_matches_closed_form_vector(lz_params):
    """The g0 = 0 ground state is (−ε, φ0)/norm up to a global phase."""
    p = lz_params.at(0.0)
    lam0 = math.hypot(p.gamma0, p.eps)
    phi0 = lam0 + p.gamma0
    expected = np.array([-p.eps, phi0]) / math.hypot(p.eps, phi0)
    vector = ground_state(lz_hamiltonian(p)).vector
    assert abs(np.vdot(expected, vector)) == pytest.approx(1.0, abs=1e-12)


def test_spin_half_operators_are_half_paulis():
    """j = 1/2 gives σ/2."""
    jx, jy, jz = collective_spin_ops(0.5)
    np.testing.assert_allclose(jx.matrix, [[0, 0.5], [0.5, 0]])
    np.testing.assert_allclose(jy.matrix, [[0, -0.5j], [0.5j, 0]])
    np.testing.assert_allclose(jz.matrix, [[0.5, 0], [0, -0.5]])


@pytest.mark.parametrize("j", [1.0, 3.5, 50.0, 1000.0])
def test_spin_commutators_and_casimir(j):
    """Cyclic commutators hold and J² = j(j+1)."""
    jx, jy, jz = (op.matrix for op in collective_spin_ops(j))
    dim = jx.shape[0]
    scale = max(1.0, j)
    np.testing.assert_allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-12 * scale)
    np.testing.assert_allclose(jy @ jz - jz @ jy, 1j * jx, atol=1e-12 * scale)
    np.testing.assert_allclose(jz @ jx - jx @ jz, 1j * jy, atol=1e-12 * scale)
    casimir = jx @ jx + jy @ jy + jz @ jz
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(dim), atol=1e-10 * scale**2)


def test_invalid_j_rejected():
    """j must be a positive half-integer."""
    with pytest.raises(InvalidJ):
        collective_spin_ops(0.3)
    with pytest.raises(InvalidJ):
        LMGParams(k=1.0, gamma=0.5, j=0.0)


def test_lmg_params_validation():
    """k > 0, 0 ≤ γ ≤ 1 and g ≥ 0."""
    with pytest.raises(InvalidParams):
        LMGParams(k=0.0, gamma=0.5, j=1.0)
    with pytest.raises(InvalidParams):
        LMGParams(k=1.0, gamma=1.5, j=1.0)
    with pytest.raises(InvalidParams):
        LMGParams(k=1.0, gamma=0.5, j=1.0, g=-0.1)
    with pytest.raises(InvalidParams, match="must be finite"):
        LMGParams(k=float("nan"), gamma=0.5, j=1.0)


def test_lmg_spin_half_eigenvalues():
    """At j = 1/2 the eigenvalues are −k(1+γ)/4 ∓ g/2."""
    k, gamma, g = 1.3, 0.6, 0.4
    h = lmg_hamiltonian(LMGParams(k=k, gamma=gamma, j=0.5, g=g))
    expected = sorted([-k * (1 + gamma) / 4 - g / 2, -k * (1 + gamma) / 4 + g / 2])
    np.testing.assert_allclose(decompose(h).eigenvalues, expected, atol=1e-14)


def test_lmg_is_hermitian_and_has_dimension():
    """The LMG Hamiltonian is exactly Hermitian with dimension 2j+1."""
    h = lmg_hamiltonian(LMGParams(k=1.0, gamma=0.75, j=10.0, g=0.5))
    assert h.dim == 21
    assert np.linalg.norm(h.matrix - h.matrix.conj().T) == pytest.approx(0.0, abs=1e-15)


def test_lmg_spectrum_invariant_under_field_reflection():
    """Parity conjugation maps g·J_x to −g·J_x with the same spectrum."""
    p = LMGParams(k=1.0, gamma=0.5, j=4.0, g=0.7)
    family = lmg_family(p)
    plus = decompose(family.at(0.7)).eigenvalues
    minus = decompose(HermitianOperator(family.base.matrix - 0.7 * family.direction.matrix)).eigenvalues
    np.testing.assert_allclose(plus, minus, atol=1e-12)


@pytest.mark.parametrize("j", [50.0, 100.0])
def test_lmg_ground_doublet_in_ferromagnetic_phase(j):
    """Twofold ground level at small g, single ground level deep in the paramagnet."""
    family = lmg_family(LMGParams(k=1.0, gamma=0.75, j=j))
    for g0 in (0.0, 0.1, 0.3):
        assert decompose(family.at(g0), 1e-6).ground_degeneracy == 2, g0
    for g0 in (1.5, 3.0):
        assert decompose(family.at(g0), 1e-6).ground_degeneracy == 1, g0


def test_lmg_isotropic_doublet_at_small_j():
    """With γ = 0 and j = 10 the ground level is a doublet for g ≪ k."""
    family = lmg_family(LMGParams(k=1.0, gamma=0.0, j=10.0))
    assert decompose(family.at(0.05), 1e-6).ground_degeneracy == 2
    assert decompose(family.at(2.0), 1e-6).ground_degeneracy == 1


def test_lmg_ground_energy_non_increasing_in_field():
    """Ground energy per spin never rises as g grows."""
    family = lmg_family(LMGParams(k=1.0, gamma=0.75, j=20.0))
    energies = [decompose(family.at(g)).eigenvalues[0] for g in np.linspace(0.0, 2.0, 41)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


def test_ground_state_of_diagonal():
    """diag(0, 1) has ground state |0⟩."""
    prepared = ground_state(HermitianOperator(np.diag([0.0, 1.0])))
    np.testing.assert_allclose(prepared.state.matrix, np.diag([1.0, 0.0]))
    assert prepared.degeneracy == 1
    assert prepared.gap == pytest.approx(1.0)


def test_ground_state_follows_hint_in_degenerate_cluster():
    """The selected vector overlaps the hint at least as much as any cluster basis vector."""
    family = lmg_family(LMGParams(k=1.0, gamma=0.75, j=50.0))
    previous = ground_state(family.at(0.2), 1e-6)
    current = ground_state(family.at(0.21), 1e-6, hint=previous.vector)
    assert current.degeneracy == 2

    s = decompose(family.at(0.21), 1e-6)
    cluster = s.basis[:, s.structure.clusters[0].indices]
    chosen = abs(np.vdot(previous.vector, current.vector))
    for column in cluster.T:
        assert chosen >= abs(np.vdot(previous.vector, column)) - 1e-12


def test_ground_level_state_is_uniform_on_cluster():
    """The microcanonical ground state has weight 1/n on each degenerate vector."""
    rho = ground_level_state(HermitianOperator(np.diag([0.0, 0.0, 1.0])))
    np.testing.assert_allclose(np.diag(rho.matrix).real, [0.5, 0.5, 0.0], atol=1e-15)
