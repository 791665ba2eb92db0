"""Memory of a field quench in a short driven chain.

Prepares the chain under B/J = 10 for a long time, switches to B/J = 1 and
follows the central magnetization with TEBD and with the free-fermion
covariance oracle. The post-quench value settles away from the B/J = 1
stationary value for a long time.

Run: python demos/field_quench.py
"""

import numpy as np

from heisenberg_mpo import mpo, oracles, tebd
from heisenberg_mpo.params import ParameterSchedule, XYParameters
from heisenberg_mpo.pauli import I2, SZ

N, T_Q, T_END = 12, 40.0, 60.0


def main():
    p10 = XYParameters(N, J=1.0, gamma=0.75, B=10.0, gamma_L_minus=0.5, gamma_L_plus=0.3,
                       gamma_R_minus=0.5, gamma_R_plus=0.7)
    p1 = p10.replace(B=1.0)
    c = N // 2
    ops = [I2] * N
    ops[c - 1] = SZ
    cfg = tebd.EvolutionConfig(dt=0.02, t_final=T_END, chi_max=8, measure_every=250)
    rec = tebd.evolve(mpo.mpo_from_product(ops), ParameterSchedule(((0.0, p10), (T_Q, p1))), cfg)

    cq = oracles.covariance_model(p10, ["down"] * N).evolved(T_Q).c
    x1, y1 = oracles.covariance_dynamics(oracles.xy_to_couplings(p1))
    post = [t for t in rec.times if t >= T_Q]
    ref = [oracles.CovarianceMatrix(m).sz()[c - 1]
           for m in oracles.covariance_trajectory(cq, x1, y1, np.asarray(post) - T_Q)]
    print(f"stationary <Z{c}> at B/J = 1: {oracles.stationary_profile(p1)[c - 1]:+.5f}")
    print(" tau     TEBD      free fermions")
    for t, v, r in zip(post, rec.series()[-len(post):], ref):
        print(f"{t - T_Q:5.1f}  {v.real:+.5f}  {r:+.5f}")


if __name__ == "__main__":
    main()
