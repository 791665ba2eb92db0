"""Gates and exact constructions for the boundary-driven XY chain.

Superoperators act on the ket-major coefficient vector used by :mod:`.mpo`:
``vec(A X B) = kron(A, B.T) @ vec(X)``.  The adjoint (Heisenberg) generator of
a Hamiltonian term is therefore ``i (kron(h, 1) - kron(1, h.T))`` and that of
a Lindblad operator ``L`` is
``kron(L^H, L.T) - (kron(L^H L, 1) + kron(1, (L^H L).T)) / 2``.

Jordan-Wigner convention: ``c_j = (prod_{k<j} Z_k) s+_j``, so an occupied
mode is spin down and ``1 - 2 c_j^dag c_j = Z_j``.  The one-particle basis is
ordered ``(c_1 .. c_N, c_1^dag .. c_N^dag)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError
from .mpo import MPO, TriangularSiteMatrix, mpo_from_product, mpo_from_triangular, triangular_product
from .params import XYParameters
from .pauli import I2, SM, SP, SX, SY, SZ

_I4 = np.eye(4, dtype=complex)


def _check_bond(p: XYParameters, bond: int) -> None:
    if not 1 <= bond <= p.n_sites - 1:
        raise ValueError(f"bond must be in [1, {p.n_sites - 1}], got {bond}")


def bond_hamiltonian(p: XYParameters, bond: int) -> np.ndarray:
    """4x4 term on sites ``(bond, bond + 1)``; the bond terms sum to ``H_xy``.

    Each site's field ``B Z`` is split evenly between its two bonds; the end
    sites carry their full field on their single bond.
    """
    _check_bond(p, bond)
    h = p.J * ((1 + p.gamma) / 2 * np.kron(SX, SX) + (1 - p.gamma) / 2 * np.kron(SY, SY))
    w_left = p.B if bond == 1 else p.B / 2
    w_right = p.B if bond == p.n_sites - 1 else p.B / 2
    return h + w_left * np.kron(SZ, I2) + w_right * np.kron(I2, SZ)


def pair_order(superop: np.ndarray) -> np.ndarray:
    """Reorder a two-site superoperator from ``(j1 j2, k1 k2)`` to ``(j1 k1, j2 k2)`` vectors."""
    s = np.asarray(superop).reshape((2,) * 8)
    return s.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)


def heisenberg_generator(h: np.ndarray) -> np.ndarray:
    """Superoperator of ``O -> i [h, O]`` on ket-major vectors."""
    n = h.shape[0]
    eye = np.eye(n)
    return 1j * (np.kron(h, eye) - np.kron(eye, h.T))


def dissipator_generator(lindblads) -> np.ndarray:
    """Superoperator of ``O -> sum L^H O L - {L^H L, O} / 2`` on ket-major vectors."""
    lindblads = list(lindblads)
    n = lindblads[0].shape[0]
    eye = np.eye(n)
    k = np.zeros((n * n, n * n), dtype=complex)
    for L in lindblads:
        ld = L.conj().T
        ldl = ld @ L
        k += np.kron(ld, L.T) - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return k


def adjoint_bond_gate(p: XYParameters, bond: int, tau: float) -> np.ndarray:
    """16x16 gate for ``O -> exp(i h tau) O exp(-i h tau)`` in pair order."""
    h = bond_hamiltonian(p, bond)
    u = linalg.matrix_exp(1j * tau * h)
    return pair_order(np.kron(u, u.conj()))


def boundary_lindblads(p: XYParameters, side: str) -> list[np.ndarray]:
    g_plus, g_minus = p.rates(side)
    return [np.sqrt(g_plus) * SP, np.sqrt(g_minus) * SM]


def boundary_dissipator_gate(p: XYParameters, side: str, tau: float) -> np.ndarray:
    """4x4 exact single-site propagator of the adjoint dissipator on one chain end."""
    g_plus, g_minus = p.rates(side)
    if g_plus < 0 or g_minus < 0:
        raise ValueError("dissipation rates must be non-negative")
    if g_plus == 0 and g_minus == 0:
        return _I4.copy()
    return linalg.matrix_exp(tau * dissipator_generator(boundary_lindblads(p, side)))


# -- closed-system solution ------------------------------------------------------------


@dataclass
class CoherentCoefficients:
    """``C(t) = sum_j alpha[j] c_j + beta[j] c_j^dag`` for the evolved ``C(0)``."""

    alpha: np.ndarray
    beta: np.ndarray
    source_site: int
    time: float

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.alpha) ** 2 + np.abs(self.beta) ** 2))


def one_particle_generator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``M`` with ``d/dt (c, c^dag) = M (c, c^dag)`` under ``O -> i[H, O]``."""
    return np.block([[-1j * a, -1j * b], [1j * b, 1j * a]])


def closed_solution_coefficients(p: XYParameters, t: float, source: int,
                                 kind: str = "annihilation") -> CoherentCoefficients:
    """Heisenberg-evolved ``c_source`` (or ``c_source^dag``) of the closed chain.

    Dissipation rates in ``p`` are ignored.
    """
    from .oracles import xy_to_couplings

    n = p.n_sites
    if not 1 <= source <= n:
        raise ValueError(f"source must be in [1, {n}], got {source}")
    if kind not in ("annihilation", "creation"):
        raise ValueError(f"kind must be 'annihilation' or 'creation', got {kind!r}")
    cm = xy_to_couplings(p)
    prop = linalg.matrix_exp(t * one_particle_generator(cm.a, cm.b))
    row = prop[source - 1] if kind == "annihilation" else prop[n + source - 1]
    return CoherentCoefficients(row[:n].copy(), row[n:].copy(), source, t)


def c_operator_sites(coeffs: CoherentCoefficients, n_sites: int) -> list[TriangularSiteMatrix]:
    """chi = 2 lower-triangular sites ``[[1, 0], [X_j, Z]]``, ``X_j = alpha_j s+ + beta_j s-``."""
    alpha = np.asarray(coeffs.alpha)
    beta = np.asarray(coeffs.beta)
    if alpha.shape != (n_sites,) or beta.shape != (n_sites,):
        raise DimensionError(f"coefficient vectors must have length {n_sites}")
    sites = []
    for j in range(n_sites):
        x = alpha[j] * SP + beta[j] * SM
        sites.append(TriangularSiteMatrix.from_blocks([[I2, 0], [x, SZ]]))
    return sites


def c_operator_mpo(coeffs: CoherentCoefficients, n_sites: int) -> MPO:
    """MPO of ``sum_j (prod_{k<j} Z_k)(alpha_j s+_j + beta_j s-_j)``."""
    return mpo_from_triangular(c_operator_sites(coeffs, n_sites))


def c_string_sites(coeff_list, n_sites: int) -> list[TriangularSiteMatrix]:
    """Site matrices of the ordered product ``C_1 C_2 ... C_n`` (dimension ``2^n``)."""
    coeff_list = list(coeff_list)
    sites = c_operator_sites(coeff_list[0], n_sites)
    for c in coeff_list[1:]:
        sites = triangular_product(sites, c_operator_sites(c, n_sites))
    return sites


def c_string_mpo(coeff_list, n_sites: int) -> MPO:
    return mpo_from_triangular(c_string_sites(coeff_list, n_sites))


def parity_mpo(n_sites: int) -> MPO:
    """``prod_j (1 - 2 c_j^dag c_j) = Z (x) Z (x) ... (x) Z``."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    return mpo_from_product([SZ] * n_sites)
