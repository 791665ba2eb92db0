from functools import reduce

import numpy as np
import pytest
import scipy.linalg

from conftest import random_params
from heisenberg_mpo import model, mpo, oracles, tebd
from heisenberg_mpo.errors import DimensionError
from heisenberg_mpo.params import ParameterSchedule, XYParameters
from heisenberg_mpo.pauli import I2, SM, SP, SX, SY, SZ


def embed(h2, bond, n):
    return reduce(np.kron, [np.eye(2 ** (bond - 1)), h2, np.eye(2 ** (n - bond - 1))])


# -- parameters ----------------------------------------------------------------------


def test_parameter_validation():
    with pytest.raises(ValueError):
        XYParameters(1)
    with pytest.raises(ValueError):
        XYParameters(4, gamma_L_plus=-0.1)
    p = XYParameters(4, gamma_R_minus=0.2)
    assert p.rates("right") == (0.0, 0.2) and not p.is_closed
    assert XYParameters(3).is_closed


def test_schedule_validation():
    p = XYParameters(4)
    with pytest.raises(ValueError):
        ParameterSchedule(((1.0, p),))
    with pytest.raises(ValueError):
        ParameterSchedule(((0.0, p), (0.0, p)))
    with pytest.raises(ValueError):
        ParameterSchedule(((0.0, p), (1.0, XYParameters(5))))
    s = ParameterSchedule(((0.0, p), (2.0, p.replace(B=1.0))))
    assert s.params_at(1.9).B == 0.0 and s.params_at(2.0).B == 1.0
    assert [(a, b) for a, b, _ in s.boundaries(3.0)] == [(0.0, 2.0), (2.0, 3.0)]
    assert len(s.boundaries(1.0)) == 1


# -- Hamiltonian pieces ----------------------------------------------------------------


def test_bond_hamiltonian_ising_limit():
    p = XYParameters(4, J=1.3, gamma=1.0, B=0.0)
    assert np.allclose(model.bond_hamiltonian(p, 2), 1.3 * np.kron(SX, SX))


def test_bond_hamiltonian_two_sites():
    p = XYParameters(2, J=0.7, gamma=0.3, B=0.4)
    assert np.allclose(model.bond_hamiltonian(p, 1), oracles.dense_hamiltonian(p))


def test_bond_terms_sum_to_hamiltonian(rng):
    for _ in range(5):
        p = random_params(5, rng)
        total = sum(embed(model.bond_hamiltonian(p, b), b, 5) for b in range(1, 5))
        assert np.allclose(total, oracles.dense_hamiltonian(p), atol=1e-12)


def test_bond_out_of_range():
    with pytest.raises(ValueError):
        model.bond_hamiltonian(XYParameters(3), 3)


def test_adjoint_gate_trivial(rng):
    p = random_params(4, rng)
    assert np.allclose(model.adjoint_bond_gate(p, 1, 0.0), np.eye(16))
    g = model.adjoint_bond_gate(p, 2, 0.37)
    vid = np.kron(I2.reshape(4), I2.reshape(4))  # pair-order vec of the 2-site identity
    assert np.allclose(g @ vid, vid)


def test_adjoint_gate_matches_conjugation(rng):
    p = random_params(4, rng)
    tau = 0.31
    h = model.bond_hamiltonian(p, 2)
    u = scipy.linalg.expm(1j * tau * h)
    g = model.adjoint_bond_gate(p, 2, tau)
    for _ in range(20):
        o = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        vec = o.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(16)
        out = (g @ vec).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
        assert np.allclose(out, u @ o @ u.conj().T, atol=1e-11)


def test_adjoint_gate_preserves_frobenius(rng):
    g = model.adjoint_bond_gate(random_params(3, rng), 1, 0.9)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert np.linalg.norm(g @ v) == pytest.approx(np.linalg.norm(v), rel=1e-11)


def test_heisenberg_generator_is_commutator(rng):
    h = rng.normal(size=(3, 3))
    h = h + h.T
    o = rng.normal(size=(3, 3))
    assert np.allclose((model.heisenberg_generator(h) @ o.reshape(-1)).reshape(3, 3), 1j * (h @ o - o @ h))


# -- dissipator ----------------------------------------------------------------------


def test_dissipator_trivial():
    assert np.allclose(model.boundary_dissipator_gate(XYParameters(3), "left", 0.5), np.eye(4))
    p = XYParameters(3, gamma_L_plus=0.4, gamma_L_minus=0.9)
    g = model.boundary_dissipator_gate(p, "left", 2.0)
    assert np.allclose(g @ I2.reshape(4), I2.reshape(4))


def test_dissipator_relaxation_pure_loss():
    # Heisenberg picture with s- only: Z(t) = e^{-G t} Z - (1 - e^{-G t}) 1
    gam, t = 0.8, 1.7
    p = XYParameters(3, gamma_R_minus=gam)
    g = model.boundary_dissipator_gate(p, "right", t)
    out = (g @ SZ.reshape(4)).reshape(2, 2)
    expect = np.exp(-gam * t) * SZ - (1 - np.exp(-gam * t)) * I2
    assert np.allclose(out, expect, atol=1e-12)
    # an independent 4x4 generator assembled from the definition
    L = np.sqrt(gam) * SM
    def gen(o):
        return L.conj().T @ o @ L - 0.5 * (L.conj().T @ L @ o + o @ L.conj().T @ L)
    k = np.column_stack([gen(e.reshape(2, 2)).reshape(4) for e in np.eye(4)])
    assert np.allclose(scipy.linalg.expm(t * k), g, atol=1e-12)


def test_dissipator_contracts_traceless_part(rng):
    p = XYParameters(3, gamma_L_plus=0.3, gamma_L_minus=0.5)
    g = model.boundary_dissipator_gate(p, "left", 0.4)
    for _ in range(100):
        o = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        o0 = o - np.trace(o) / 2 * I2
        out = (g @ o0.reshape(4)).reshape(2, 2)
        out0 = out - np.trace(out) / 2 * I2
        assert np.linalg.norm(out0) <= np.linalg.norm(o0) + 1e-12


def test_dissipator_bad_side():
    with pytest.raises(ValueError):
        model.boundary_dissipator_gate(XYParameters(3), "middle", 0.1)


# -- closed-system coefficients ------------------------------------------------------------


def test_closed_solution_initial():
    c = model.closed_solution_coefficients(XYParameters(5, gamma=0.3, B=0.2), 0.0, 3)
    assert np.allclose(c.alpha, np.eye(5)[2]) and np.allclose(c.beta, 0)


def test_closed_solution_pure_field():
    b, t = 0.45, 1.3
    p = XYParameters(4, J=0.0, B=b)
    c = model.closed_solution_coefficients(p, t, 2)
    assert c.alpha[1] == pytest.approx(np.exp(2j * b * t))
    assert np.allclose(np.delete(c.alpha, 1), 0) and np.allclose(c.beta, 0)
    cd = model.closed_solution_coefficients(p, t, 2, kind="creation")
    assert cd.beta[1] == pytest.approx(np.exp(-2j * b * t))


def test_closed_solution_norm_conserved(rng):
    p = random_params(8, rng, open_system=False)
    for t in (0.5, 3.0, 11.0):
        assert model.closed_solution_coefficients(p, t, 4).norm == pytest.approx(1.0, abs=1e-10)


def test_closed_solution_vs_dense_heisenberg(rng):
    n = 4
    for kind in ("annihilation", "creation"):
        p = random_params(n, rng)  # rates are ignored
        t = 1.9
        c = model.closed_solution_coefficients(p, t, 2, kind)
        u = scipy.linalg.expm(1j * t * oracles.dense_hamiltonian(p))
        c0 = oracles.jw_annihilators(n)[1]
        if kind == "creation":
            c0 = c0.conj().T
        assert np.allclose(mpo.to_dense(model.c_operator_mpo(c, n)), u @ c0 @ u.conj().T, atol=1e-8)


def test_c_operator_local_cases():
    n = 3
    a = model.CoherentCoefficients(np.eye(n)[0].astype(complex), np.zeros(n, complex), 1, 0.0)
    assert np.allclose(mpo.to_dense(model.c_operator_mpo(a, n)), reduce(np.kron, [SP, I2, I2]))
    b = model.CoherentCoefficients(np.zeros(n, complex), np.eye(n)[1].astype(complex), 2, 0.0)
    assert np.allclose(mpo.to_dense(model.c_operator_mpo(b, n)), reduce(np.kron, [SZ, SM, I2]))


def test_c_operator_generic(rng):
    n = 4
    al = rng.normal(size=n) + 1j * rng.normal(size=n)
    be = rng.normal(size=n) + 1j * rng.normal(size=n)
    m = model.c_operator_mpo(model.CoherentCoefficients(al, be, 1, 0.0), n)
    ref = sum(reduce(np.kron, [SZ] * j + [al[j] * SP + be[j] * SM] + [I2] * (n - j - 1)) for j in range(n))
    assert np.allclose(mpo.to_dense(m), ref, atol=1e-12)


def test_c_operator_length_mismatch():
    with pytest.raises(DimensionError):
        model.c_operator_mpo(model.CoherentCoefficients(np.ones(3), np.ones(3), 1, 0.0), 4)


def test_parity():
    assert np.allclose(mpo.to_dense(model.parity_mpo(1)), SZ)
    assert np.allclose(mpo.to_dense(model.parity_mpo(2)), np.kron(SZ, SZ))
    p4 = mpo.to_dense(model.parity_mpo(4))
    assert np.allclose(p4 @ p4, np.eye(16))
    # prod (1 - 2 n_j) over the Jordan-Wigner modes
    cs = oracles.jw_annihilators(4)
    assert np.allclose(reduce(np.matmul, [np.eye(16) - 2 * c.conj().T @ c for c in cs]), p4)


def test_parity_conservation_dense(rng):
    n = 4
    p = random_params(n, rng)
    L = oracles.build_dense_adjoint_liouvillian(p)
    par = mpo.to_dense(model.parity_mpo(n))
    for o in (oracles.pauli_string_dense([(2, "Z")], n), oracles.pauli_string_dense([(1, "X"), (3, "Y")], n)):
        lhs = par @ oracles.dense_evolve(o, L, 2.0) @ par
        rhs = oracles.dense_evolve(par @ o @ par, L, 2.0)
        assert np.allclose(lhs, rhs, atol=1e-9)


# -- Trotter consistency ---------------------------------------------------------------


def _one_step_error(p, o, dt):
    L = oracles.build_dense_adjoint_liouvillian(p)
    exact = oracles.dense_evolve(o, L, dt)
    got = mpo.to_dense(tebd.strang_step(mpo.mpo_from_dense(o), p, dt, 64, 0.0))
    return np.linalg.norm(got - exact)


def test_strang_one_step_error_is_third_order():
    p = XYParameters(3, J=1.0, gamma=0.6, B=0.8, gamma_L_plus=0.3, gamma_L_minus=0.5,
                     gamma_R_plus=0.7, gamma_R_minus=0.2)
    o = oracles.pauli_string_dense([(1, "X"), (2, "Z")], 3) + oracles.pauli_string_dense([(2, "Z")], 3)
    e1, e2 = _one_step_error(p, o, 0.1), _one_step_error(p, o, 0.05)
    assert 7.0 <= e1 / e2 <= 9.0


def test_strang_global_error_is_second_order():
    p = XYParameters(3, J=1.0, gamma=0.6, B=0.8, gamma_L_plus=0.3, gamma_L_minus=0.5,
                     gamma_R_plus=0.7, gamma_R_minus=0.2)
    o = oracles.pauli_string_dense([(2, "Z")], 3)
    L = oracles.build_dense_adjoint_liouvillian(p)
    exact = oracles.dense_evolve(o, L, 2.0)
    errs = []
    for dt in (0.1, 0.05):
        rec = tebd.evolve(mpo.mpo_from_dense(o), p, tebd.EvolutionConfig(dt=dt, t_final=2.0, chi_max=64, eps=0.0))
        errs.append(np.linalg.norm(mpo.to_dense(rec.final) - exact))
    assert 3.5 <= errs[0] / errs[1] <= 4.5
