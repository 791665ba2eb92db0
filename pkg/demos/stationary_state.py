"""Stationary magnetization profile from the covariance Lyapunov equation.

Solves X C + C X^T + Y = 0 for the driven chain and prints <Z_j>. The
bulk is flat and the ends sit near the values set by the reservoir rates.
A short chain is cross-checked against the dense Liouvillian kernel.

Run: python demos/stationary_state.py
"""

import numpy as np

from heisenberg_mpo import oracles
from heisenberg_mpo.params import XYParameters

RATES = dict(gamma_L_minus=0.5, gamma_L_plus=0.3, gamma_R_minus=0.5, gamma_R_plus=0.7)


def main():
    for B in (1.0, 10.0):
        prof = oracles.stationary_profile(XYParameters(50, J=1.0, gamma=0.75, B=B, **RATES))
        print(f"B/J = {B:4.1f}: <Z1> = {prof[0]:+.5f}, <Z25> = {prof[24]:+.5f}, <Z50> = {prof[49]:+.5f}")
        print("  sites 20-30:", " ".join(f"{v:+.4f}" for v in prof[19:30]))

    # dense check: the long-time limit of any product state
    p = XYParameters(4, J=1.0, gamma=0.75, B=1.0, **RATES)
    L = oracles.build_dense_adjoint_liouvillian(p)
    rho = np.diag([0.0] * 15 + [1.0])
    dense = [np.trace(rho @ oracles.dense_evolve(oracles.pauli_string_dense([(j, "Z")], 4), L, 2000.0)).real
             for j in range(1, 5)]
    print("N = 4 covariance:", np.round(oracles.stationary_profile(p), 8))
    print("N = 4 dense     :", np.round(dense, 8))


if __name__ == "__main__":
    main()
