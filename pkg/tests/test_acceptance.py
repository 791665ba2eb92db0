"""Acceptance run: one PASS/FAIL line per criterion.

The long criteria (chi spectrum, approach to stationarity, quench) take
several minutes each on one core; the others finish in seconds.
"""

import time

import numpy as np
import pytest

from conftest import BENCHMARK_CHAIN, random_params
from heisenberg_mpo import linalg, model, mpo, oracles, tebd
from heisenberg_mpo.params import ParameterSchedule, XYParameters
from heisenberg_mpo.pauli import I2, SX, SY, SZ

# quoted reference magnetizations of the central spin
QUOTED_BULK_B1 = -0.0391
QUOTED_BULK_B10 = -0.0161

_PAULI = {"X": SX, "Y": SY, "Z": SZ}


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")


def string_mpo(factors, n):
    ops = [I2] * n
    for site, p in factors:
        ops[site - 1] = _PAULI[p]
    return mpo.mpo_from_product(ops)


def product_rho(states):
    rho = np.array([[1.0]])
    for r in oracles.product_density(states):
        rho = np.kron(rho, r)
    return rho


def random_pure_states(n, rng):
    out = []
    for _ in range(n):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        out.append(np.outer(v, v.conj()))
    return out


# -- 1 ----------------------------------------------------------------------------------


def test_criterion_1_open_chain_matches_dense(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    states = {"down": ["down"] * 4, "neel": ["up", "down", "up", "down"]}
    for seed in range(5):
        p = random_params(4, np.random.default_rng(seed))
        L = oracles.build_dense_adjoint_liouvillian(p)
        for factors in ([(2, "Z")], [(1, "Z"), (4, "Z")]):
            cfg = tebd.EvolutionConfig(dt=0.005, t_final=10.0, eps=1e-10, chi_max=64, measure_every=200)
            rec = tebd.evolve(string_mpo(factors, 4), p, cfg, states=states)
            o = oracles.pauli_string_dense(factors, 4)
            for t in (1.0, 5.0, 10.0):
                i = int(np.argmin(np.abs(np.asarray(rec.times) - t)))
                ot = oracles.dense_evolve(o, L, t)
                for label, st in states.items():
                    ref = np.trace(product_rho(st) @ ot)
                    worst = max(worst, abs(rec.values[label][i] - ref))
    runtime = time.perf_counter() - t0
    ok = worst <= 1e-5 and runtime <= 60
    report(capsys, 1, ok, f"max |dO| = {worst:.2e} (<= 1e-5), runtime {runtime:.1f} s (<= 60 s)")
    assert ok


# -- 2 ----------------------------------------------------------------------------------


def test_criterion_2_closed_chain_exact_solution(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    n, source, t_final = 20, 7, 10.0
    p = random_params(n, rng, open_system=False)
    exact = model.c_operator_mpo(model.closed_solution_coefficients(p, t_final, source), n)
    initial = model.c_operator_mpo(model.closed_solution_coefficients(p, 0.0, source), n)
    states = {k: random_pure_states(n, rng) for k in range(10)}
    chis = []

    def track(t, m):
        c = mpo.canonicalize(m)
        chis.append(max(mpo.effective_chi(mpo.schmidt_spectrum(c, b), 1e-8) for b in range(1, n)))

    cfg = tebd.EvolutionConfig(dt=0.001, t_final=t_final, chi_max=4, eps=1e-10, measure_every=1000)
    rec = tebd.evolve(initial, p, cfg, states=states, callback=track)
    worst = max(abs(rec.values[k][-1] - mpo.expectation(exact, st)) for k, st in states.items())
    runtime = time.perf_counter() - t0
    # the source operator is a product at t = 0, two-dimensional from then on
    ok = (worst <= 1e-6 and chis[0] == 1 and min(chis[1:]) == max(chis[1:]) == 2
          and rec.effective_chi_max_seen == 2 and runtime <= 60)
    report(capsys, 2, ok, f"max |dC| over 10 product states = {worst:.2e} (<= 1e-6), "
                          f"chi over time {sorted(set(chis))}, max bond {rec.effective_chi_max_seen}, "
                          f"runtime {runtime:.1f} s")
    assert ok


# -- 3 ----------------------------------------------------------------------------------


@pytest.mark.parametrize("expr, factors, chi, budget", [
    ("Z25", [(25, "Z")], 4, 300.0),
    ("Z1*Z50", [(1, "Z"), (50, "Z")], 16, 1800.0),
    ("X24*Y27", [(24, "X"), (27, "Y")], 64, 1800.0),
])
def test_criterion_3_schmidt_cutoff(capsys, expr, factors, chi, budget):
    t0 = time.perf_counter()
    p = XYParameters(**BENCHMARK_CHAIN)
    # eps just above double rounding: see the decision log on noise accumulation
    cfg = tebd.EvolutionConfig(dt=0.1, t_final=50.0, chi_max=2 * chi, eps=1e-14, measure_every=10 ** 6)
    rec = tebd.evolve(string_mpo(factors, 50), p, cfg)
    spec = mpo.schmidt_spectrum(mpo.canonicalize(rec.final), 25)
    eff = mpo.effective_chi(spec, 1e-8)
    s = mpo.two_site_spectrum(rec.final, 25)
    drop = float(np.log10(s[chi - 1] / s[chi]))
    runtime = time.perf_counter() - t0
    ref = oracles.covariance_model(p, ["down"] * 50).evolved(50.0).pauli_expectation(factors)
    ok = eff == chi and drop >= 10 and runtime <= budget
    report(capsys, 3, ok, f"{expr}: effective chi {eff} (expected {chi}), drop {drop:.1f} orders (>= 10), "
                          f"<O>(50) = {rec.series()[-1].real:+.5f} vs free-fermion {ref.real:+.5f}, "
                          f"runtime {runtime:.0f} s (<= {budget:.0f} s)")
    assert ok


# -- 4 ----------------------------------------------------------------------------------


def test_criterion_4_stationary_magnetization(capsys):
    t0 = time.perf_counter()
    s1 = oracles.stationary_profile(XYParameters(**BENCHMARK_CHAIN))[24]
    s10 = oracles.stationary_profile(XYParameters(**{**BENCHMARK_CHAIN, "B": 10.0}))[24]
    runtime = time.perf_counter() - t0
    ok1 = abs(s1 - QUOTED_BULK_B1) <= 5e-4
    ok10 = abs(s10 - QUOTED_BULK_B10) <= 5e-4
    ok = ok1 and ok10 and runtime <= 1.0
    report(capsys, 4, ok, f"B/J=1: {s1:+.5f} vs {QUOTED_BULK_B1} ({'ok' if ok1 else 'outside 5e-4'}); "
                          f"B/J=10: {s10:+.5f} vs {QUOTED_BULK_B10} ({'ok' if ok10 else 'outside 5e-4'}); "
                          f"runtime {runtime:.2f} s")
    assert ok


# -- 5 ----------------------------------------------------------------------------------


def test_criterion_5_approach_to_stationarity(capsys):
    t0 = time.perf_counter()
    p = XYParameters(**BENCHMARK_CHAIN)
    ness = oracles.stationary_profile(p)
    cfg = tebd.EvolutionConfig(dt=0.05, t_final=500.0, chi_max=8, eps=1e-10, measure_every=2000)
    vals = {}
    for site in (1, 50, 25):
        rec = tebd.evolve(string_mpo([(site, "Z")], 50), p, cfg)
        vals[site] = rec.series()[-1].real
    free = oracles.covariance_model(p, ["down"] * 50).evolved(500.0).sz()
    runtime = time.perf_counter() - t0
    ok_b = abs(vals[1] - ness[0]) <= 0.01 and abs(vals[50] - ness[49]) <= 0.01
    ok_c = abs(vals[25] - QUOTED_BULK_B1) > 0.02
    ok = ok_b and ok_c and runtime <= 1800
    report(capsys, 5, ok, f"<Z1> {vals[1]:+.4f} vs stationary {ness[0]:+.4f}, "
                          f"<Z50> {vals[50]:+.4f} vs {ness[49]:+.4f} (within 0.01); "
                          f"<Z25>(500) {vals[25]:+.4f}, |. - ({QUOTED_BULK_B1})| = "
                          f"{abs(vals[25] - QUOTED_BULK_B1):.4f} (> 0.02); free-fermion "
                          f"{free[0]:+.4f}/{free[49]:+.4f}/{free[24]:+.4f}; runtime {runtime:.0f} s")
    assert ok


# -- 6 ----------------------------------------------------------------------------------


def test_criterion_6_quench_memory(capsys):
    t0 = time.perf_counter()
    p10 = XYParameters(**{**BENCHMARK_CHAIN, "B": 10.0})
    p1 = p10.replace(B=1.0)
    sched = ParameterSchedule(((0.0, p10), (500.0, p1)))
    cfg = tebd.EvolutionConfig(dt=0.02, t_final=530.0, chi_max=8, eps=1e-10, measure_every=250)
    rec = tebd.evolve(string_mpo([(25, "Z")], 50), sched, cfg)
    times = np.asarray(rec.times)
    vals = rec.series().real
    tau = times - 500.0
    at_quench = vals[np.argmin(np.abs(tau))]
    post = tau > 1e-9
    window = (tau >= 15 - 1e-9) & (tau <= 30 + 1e-9)
    transient = np.max(np.abs(vals[post & (tau < 15 - 1e-9)] - at_quench))
    spread = np.ptp(vals[window])
    settled = float(np.mean(vals[window]))

    # free-fermion reference for the same protocol
    c500 = oracles.covariance_model(p10, ["down"] * 50).evolved(500.0).c
    x1, y1 = oracles.covariance_dynamics(oracles.xy_to_couplings(p1))
    ref = [oracles.CovarianceMatrix(c).sz()[24]
           for c in oracles.covariance_trajectory(c500, x1, y1, np.r_[0.0, tau[post]])][1:]
    dev = float(np.max(np.abs(vals[post] - ref)))
    runtime = time.perf_counter() - t0
    ok = (spread < 0.5 * transient and abs(settled - QUOTED_BULK_B1) > 0.01 and runtime <= 3600)
    report(capsys, 6, ok, f"<Z25> at quench {at_quench:+.4f}, transient change {transient:.4f}, "
                          f"window 15-30 spread {spread:.4f}, settled {settled:+.4f}, "
                          f"|settled - ({QUOTED_BULK_B1})| = {abs(settled - QUOTED_BULK_B1):.4f} (> 0.01); "
                          f"max deviation from free-fermion {dev:.1e}; runtime {runtime:.0f} s")
    assert ok


# -- 7 ----------------------------------------------------------------------------------


def test_criterion_7_property_suites(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    checks = {}

    p = random_params(6, rng)
    rec = tebd.evolve(mpo.mpo_identity(6), p, tebd.EvolutionConfig(dt=0.05, t_final=5.0))
    checks["identity"] = np.abs(rec.series() - 1).max() <= 1e-9 and rec.effective_chi_max_seen == 1

    imag = 0.0
    p = random_params(4, rng)
    for factors in ([(2, "Z")], [(1, "Z"), (4, "Z")], [(1, "X"), (2, "Y")]):
        rec = tebd.evolve(string_mpo(factors, 4), p, tebd.EvolutionConfig(dt=0.02, t_final=5.0, measure_every=5),
                          states=[["up", "down", "down", "up"], ["down"] * 4])
        imag = max(imag, max(np.abs(np.imag(v)).max() for v in rec.values.values()))
    checks["hermiticity"] = imag <= 1e-8

    p = XYParameters(3, J=1.0, gamma=0.6, B=0.8, gamma_L_plus=0.3, gamma_L_minus=0.5,
                     gamma_R_plus=0.7, gamma_R_minus=0.2)
    o = oracles.pauli_string_dense([(2, "Z")], 3)
    exact = oracles.dense_evolve(o, oracles.build_dense_adjoint_liouvillian(p), 2.0)
    errs = []
    for dt in (0.1, 0.05):
        r = tebd.evolve(mpo.mpo_from_dense(o), p, tebd.EvolutionConfig(dt=dt, t_final=2.0, chi_max=64, eps=0.0))
        errs.append(np.linalg.norm(mpo.to_dense(r.final) - exact))
    ratio = errs[0] / errs[1]
    checks["trotter"] = 3.5 <= ratio <= 4.5

    worst_res = 0.0
    for k in range(100):
        n = int(rng.integers(2, 21))
        a = rng.normal(size=(n, n))
        x = a - (np.max(np.linalg.eigvals(a).real) + rng.uniform(0.2, 1.0)) * np.eye(n)
        y = rng.normal(size=(n, n)) + (1j * rng.normal(size=(n, n)) if k % 2 else 0)
        c = linalg.solve_lyapunov(x, y)
        worst_res = max(worst_res, np.linalg.norm(x @ c + c @ x.T + y) / np.linalg.norm(y))
    checks["lyapunov"] = worst_res <= 1e-9

    worst_cov = 0.0
    for _ in range(6):
        n = int(rng.integers(2, 5))
        p = random_params(n, rng)
        states = [str(s) for s in rng.choice(["up", "down"], size=n)]
        cov = oracles.covariance_model(p, states)
        L = oracles.build_dense_adjoint_liouvillian(p)
        ws = oracles.majoranas(n)
        rho = product_rho(states)
        for t in (1.0, 5.0):
            ct = cov.evolved(t).c
            for a_, b_ in [(0, 1), (0, 2 * n - 1), (1, 2), (2 * n - 2, 2 * n - 1)]:
                ref = np.trace(rho @ oracles.dense_evolve(ws[a_] @ ws[b_], L, t))
                worst_cov = max(worst_cov, abs(ct[a_, b_] - ref))
    checks["covariance"] = worst_cov <= 1e-7

    p = random_params(4, rng)
    L = oracles.build_dense_adjoint_liouvillian(p)
    par = mpo.to_dense(model.parity_mpo(4))
    par_dev = 0.0
    for o in (oracles.pauli_string_dense([(2, "Z")], 4), oracles.pauli_string_dense([(1, "X"), (3, "Y")], 4),
              oracles.pauli_string_dense([(2, "X")], 4)):
        par_dev = max(par_dev, np.abs(par @ oracles.dense_evolve(o, L, 2.0) @ par
                                      - oracles.dense_evolve(par @ o @ par, L, 2.0)).max())
    checks["parity"] = par_dev <= 1e-9

    runtime = time.perf_counter() - t0
    ok = all(checks.values()) and runtime <= 120
    report(capsys, 7, ok, f"{', '.join(k + ('' if v else ' FAILED') for k, v in checks.items())}; "
                          f"|Im| {imag:.1e}, Trotter ratio {ratio:.2f}, Lyapunov residual {worst_res:.1e}, "
                          f"covariance {worst_cov:.1e}, parity {par_dev:.1e}; runtime {runtime:.1f} s")
    assert ok
