"""Independent reference engines.

Two routes that share no code with the tensor-network path:

* dense vectorized adjoint Liouvillian for short chains (``N <= 5``);
* free-fermion Majorana covariance dynamics for any ``N``, including the
  stationary state from a Lyapunov solve.

Conventions: ``c_j = (prod_{k<j} Z_k) s+_j`` and Majoranas
``w_{2j-1} = c_j + c_j^dag``, ``w_{2j} = -i (c_j - c_j^dag)``, so that
``Z_j = -i w_{2j-1} w_{2j}``.  Arrays use zero-based Majorana indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import linalg
from .errors import DimensionError, SizeGuardError
from .params import XYParameters
from .pauli import I2, SM, SP, SX, SY, SZ

DENSE_MAX_SITES = 5

_PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


# -- dense spin-chain operators ---------------------------------------------------------


def local_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """``op`` on ``site`` (one-based) with identities elsewhere."""
    return reduce(np.kron, [op if k == site else I2 for k in range(1, n_sites + 1)])


def pauli_string_dense(factors, n_sites: int) -> np.ndarray:
    """Dense ``prod (P_site)`` for ``factors = [(site, 'X'|'Y'|'Z'), ...]``."""
    ops = [I2] * n_sites
    for site, p in factors:
        ops[site - 1] = _PAULI[p.upper()]
    return reduce(np.kron, ops)


def dense_hamiltonian(p: XYParameters) -> np.ndarray:
    """Open-boundary ``H_xy`` assembled directly from Pauli products."""
    n = p.n_sites
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for j in range(1, n):
        h += p.J * (1 + p.gamma) / 2 * local_op(SX, j, n) @ local_op(SX, j + 1, n)
        h += p.J * (1 - p.gamma) / 2 * local_op(SY, j, n) @ local_op(SY, j + 1, n)
    for j in range(1, n + 1):
        h += p.B * local_op(SZ, j, n)
    return h


def dense_lindblads(p: XYParameters) -> list[np.ndarray]:
    """The four boundary jump operators in spin form."""
    n = p.n_sites
    return [
        np.sqrt(p.gamma_L_plus) * local_op(SP, 1, n),
        np.sqrt(p.gamma_L_minus) * local_op(SM, 1, n),
        np.sqrt(p.gamma_R_plus) * local_op(SP, n, n),
        np.sqrt(p.gamma_R_minus) * local_op(SM, n, n),
    ]


def jw_annihilators(n_sites: int) -> list[np.ndarray]:
    """Dense ``c_1 .. c_N`` under the Jordan-Wigner map."""
    out = []
    for j in range(1, n_sites + 1):
        ops = [SZ] * (j - 1) + [SP] + [I2] * (n_sites - j)
        out.append(reduce(np.kron, ops))
    return out


def majoranas(n_sites: int) -> list[np.ndarray]:
    """Dense ``w_1 .. w_2N`` (returned zero-based)."""
    out = []
    for c in jw_annihilators(n_sites):
        cd = c.conj().T
        out.append(c + cd)
        out.append(-1j * (c - cd))
    return out


# -- dense adjoint Liouvillian -------------------------------------------------------


@dataclass
class DenseAdjointLiouvillian:
    """Generator of ``dO/dt`` acting on ket-major ``vec(O) = O.reshape(-1)``."""

    n_sites: int
    k: np.ndarray

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites


def build_dense_adjoint_liouvillian(p: XYParameters) -> DenseAdjointLiouvillian:
    if p.n_sites > DENSE_MAX_SITES:
        raise SizeGuardError(f"dense Liouvillian limited to {DENSE_MAX_SITES} sites, got {p.n_sites}")
    h = dense_hamiltonian(p)
    d = h.shape[0]
    eye = np.eye(d)
    # row-major vec: vec(A X B) = kron(A, B.T) vec(X)
    k = 1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for L in dense_lindblads(p):
        if not np.any(L):
            continue
        ld = L.conj().T
        ldl = ld @ L
        k += np.kron(ld, L.T) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
    return DenseAdjointLiouvillian(p.n_sites, k)


def dense_evolve(o0: np.ndarray, L: DenseAdjointLiouvillian, t: float) -> np.ndarray:
    """``O(t) = exp(t K) O(0)`` for a single time."""
    o0 = np.asarray(o0, dtype=complex)
    if o0.shape != (L.dim, L.dim):
        raise DimensionError(f"operator shape {o0.shape} does not match {L.dim}x{L.dim}")
    v = linalg.matrix_exp(t * L.k) @ o0.reshape(-1)
    return v.reshape(L.dim, L.dim)


def dense_trajectory(o0: np.ndarray, L: DenseAdjointLiouvillian, times) -> list[np.ndarray]:
    """``O(t)`` on a uniform grid ``times`` (first entry 0), one propagator reused."""
    times = np.asarray(times, dtype=float)
    o0 = np.asarray(o0, dtype=complex)
    if len(times) == 1:
        return [o0.copy()]
    steps = np.diff(times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12) or abs(times[0]) > 1e-15:
        return [dense_evolve(o0, L, t) for t in times]
    prop = linalg.matrix_exp(steps[0] * L.k)
    v = o0.reshape(-1)
    out = [o0.copy()]
    for _ in steps:
        v = prop @ v
        out.append(v.reshape(L.dim, L.dim))
    return out


def product_density(states, n_sites: int | None = None) -> list[np.ndarray]:
    """Local density matrices from spin labels (``'up'``/``'down'``, ``+1``/``-1``) or 2x2 arrays."""
    rho = []
    for s in states:
        if isinstance(s, str):
            s = {"up": 1, "down": -1, "u": 1, "d": -1}[s.lower()]
        if np.isscalar(s):
            rho.append(np.diag([1.0, 0.0]).astype(complex) if s > 0 else np.diag([0.0, 1.0]).astype(complex))
        else:
            rho.append(np.asarray(s, dtype=complex))
    if n_sites is not None and len(rho) != n_sites:
        raise DimensionError(f"expected {n_sites} local states, got {len(rho)}")
    return rho


# -- free-fermion couplings ----------------------------------------------------------


@dataclass
class CouplingMatrices:
    """Quadratic Hamiltonian and linear Lindblads in fermion language.

    ``H = c^dag a c + (c^dag b c^dag + h.c.) / 2 + offset``;
    ``L_g = ell_g . c^dag + l_g . c`` with ``lindblad_vectors[g] = concat(ell_g, l_g)``.
    """

    a: np.ndarray
    b: np.ndarray
    lindblad_vectors: list[np.ndarray] = field(default_factory=list)
    offset: float = 0.0

    @property
    def n_modes(self) -> int:
        return self.a.shape[0]


def xy_to_couplings(p: XYParameters) -> CouplingMatrices:
    """Jordan-Wigner image of the boundary-driven XY chain.

    The right-end jump operators carry a string ``prod_{k<N} Z_k = P Z_N``;
    for even observables ``P`` drops out of every dissipator term, so
    ``s+_N -> c_N`` and ``s-_N -> c_N^dag`` exactly on that sector.
    """
    n = p.n_sites
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    for j in range(n - 1):
        a[j, j + 1] = a[j + 1, j] = p.J
        b[j, j + 1] = p.J * p.gamma
        b[j + 1, j] = -p.J * p.gamma
    a[np.diag_indices(n)] = -2.0 * p.B
    vecs = []
    for site, (g_plus, g_minus) in ((0, p.rates("left")), (n - 1, p.rates("right"))):
        plus = np.zeros(2 * n, dtype=complex)
        plus[n + site] = np.sqrt(g_plus)  # s+ -> c
        minus = np.zeros(2 * n, dtype=complex)
        minus[site] = np.sqrt(g_minus)  # s- -> c^dag
        vecs += [plus, minus]
    return CouplingMatrices(a, b, vecs, offset=p.B * n)


def quadratic_form_dense(cm: CouplingMatrices) -> np.ndarray:
    """Dense ``H`` from the fermionic quadratic form (for cross-checks)."""
    cs = jw_annihilators(cm.n_modes)
    cds = [c.conj().T for c in cs]
    d = cs[0].shape[0]
    h = cm.offset * np.eye(d, dtype=complex)
    for i in range(cm.n_modes):
        for j in range(cm.n_modes):
            if cm.a[i, j]:
                h += cm.a[i, j] * cds[i] @ cs[j]
            if cm.b[i, j]:
                pair = cm.b[i, j] * cds[i] @ cds[j]
                h += 0.5 * (pair + pair.conj().T)
    return h


def _majorana_transform(n: int) -> np.ndarray:
    """``T`` with ``c = T w`` (and ``c^dag = T.conj() w``)."""
    t = np.zeros((n, 2 * n), dtype=complex)
    t[np.arange(n), 2 * np.arange(n)] = 0.5
    t[np.arange(n), 2 * np.arange(n) + 1] = 0.5j
    return t


def majorana_hamiltonian(cm: CouplingMatrices) -> np.ndarray:
    """Real antisymmetric ``h`` with ``H = (i/4) w^T h w + const``."""
    t = _majorana_transform(cm.n_modes)
    q = t.conj().T @ cm.a @ t + 0.5 * t.conj().T @ cm.b @ t.conj() + 0.5 * t.T @ cm.b.T @ t
    h = -2j * (q - q.T)
    return np.real_if_close(h, tol=1e6).real


def majorana_lindblad(cm: CouplingMatrices, vec: np.ndarray) -> np.ndarray:
    """``lam`` with ``L = lam . w`` for one stored ``(ell, l)`` vector."""
    n = cm.n_modes
    t = _majorana_transform(n)
    ell, l = vec[:n], vec[n:]
    return t.conj().T @ ell + t.T @ l


def covariance_dynamics(cm: CouplingMatrices) -> tuple[np.ndarray, np.ndarray]:
    """Drift ``X`` (real) and noise ``Y`` with ``dC/dt = X C + C X^T + Y``.

    ``C[a, b] = <w_a w_b>``.  With ``K = sum_g conj(lam_g) lam_g^T`` the drift is
    ``h - 2 Re K`` and ``Y = 4 K``.  ``Y`` is Hermitian, not real: its
    imaginary antisymmetric part is the bath bias.
    """
    h = majorana_hamiltonian(cm)
    k = np.zeros_like(h, dtype=complex)
    for v in cm.lindblad_vectors:
        lam = majorana_lindblad(cm, v)
        k += np.outer(lam.conj(), lam)
    return h - 2.0 * k.real, 4.0 * k


# -- covariance matrices ---------------------------------------------------------


def pfaffian(a: np.ndarray) -> complex:
    """Pfaffian of an antisymmetric matrix by pivoted Parlett-Reid elimination."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError("pfaffian needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1]) - np.outer(a[k + 2:, k + 1], tau)
    return pf


def pauli_to_majorana(factors) -> tuple[complex, tuple[int, ...]]:
    """Write a Pauli string as ``phase * w_{i1} w_{i2} ...`` with sorted zero-based indices."""
    phase = 1.0 + 0j
    idx: list[int] = []
    for site, p in sorted(factors):
        j0 = site - 1
        p = p.upper()
        if p == "Z":
            phase *= -1j
            idx += [2 * j0, 2 * j0 + 1]
        elif p in "XY":
            phase *= (-1j) ** j0
            idx += list(range(2 * j0)) + [2 * j0 + (0 if p == "X" else 1)]
        elif p != "I":
            raise ValueError(f"unknown Pauli symbol {p!r}")
    # bubble sort with anticommutation signs, then cancel w^2 = 1
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    out: list[int] = []
    for i in idx:
        if out and out[-1] == i:
            out.pop()
        else:
            out.append(i)
    return phase * sign, tuple(out)


@dataclass
class CovarianceMatrix:
    """Majorana two-point matrix ``c[a, b] = <w_a w_b>`` with its dynamics."""

    c: np.ndarray
    drift: np.ndarray | None = None
    noise: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return self.c.shape[0] // 2

    def sz(self) -> np.ndarray:
        """``<Z_j> = -i <w_{2j-1} w_{2j}>`` for every site."""
        n = self.n_sites
        return np.real(-1j * self.c[2 * np.arange(n), 2 * np.arange(n) + 1])

    def majorana_monomial(self, idx) -> complex:
        """``<w_{i1} ... w_{i2k}>`` for distinct sorted indices (Wick)."""
        idx = list(idx)
        if len(idx) % 2:
            return 0j
        sub = self.c[np.ix_(idx, idx)].copy()
        np.fill_diagonal(sub, 0)
        return pfaffian(sub)

    def pauli_expectation(self, factors) -> complex:
        phase, idx = pauli_to_majorana(factors)
        return phase * self.majorana_monomial(idx)

    def evolved(self, t: float, max_step: float = 1.0) -> CovarianceMatrix:
        return CovarianceMatrix(evolve_covariance(self.c, self.drift, self.noise, t, max_step),
                                self.drift, self.noise)


def covariance_from_z_product(states) -> np.ndarray:
    """Covariance of a product of ``Z`` eigenstates (labels as in :func:`product_density`)."""
    rho = product_density(states)
    s = np.array([np.real(r[0, 0] - r[1, 1]) for r in rho])
    n = len(s)
    c = np.eye(2 * n, dtype=complex)
    c[2 * np.arange(n), 2 * np.arange(n) + 1] = 1j * s
    c[2 * np.arange(n) + 1, 2 * np.arange(n)] = -1j * s
    return c


def _affine_step(x: np.ndarray, y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """``(Phi, W)`` with ``C(t+h) = Phi C Phi^T + W`` (Van Loan block exponential)."""
    n = x.shape[0]
    big = np.zeros((2 * n, 2 * n), dtype=complex)
    big[:n, :n] = -x
    big[:n, n:] = y
    big[n:, n:] = x.T
    e = linalg.matrix_exp(h * big)
    phi_t = e[n:, n:]  # exp(X^T h)
    w = phi_t.T @ e[:n, n:]
    return phi_t.T, w


def evolve_covariance(c0: np.ndarray, x: np.ndarray, y: np.ndarray, t: float,
                      max_step: float = 1.0) -> np.ndarray:
    """Exact ``C(t)`` for ``dC/dt = X C + C X^T + Y``."""
    return covariance_trajectory(c0, x, y, [0.0, t], max_step)[-1]


def _affine_power(phi: np.ndarray, w: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """``k``-fold composition of ``C -> Phi C Phi^T + W`` by repeated squaring."""
    acc_phi = np.eye(phi.shape[0], dtype=complex)
    acc_w = np.zeros_like(w, dtype=complex)
    while k:
        if k & 1:
            acc_phi, acc_w = phi @ acc_phi, phi @ acc_w @ phi.T + w
        k >>= 1
        if k:
            phi, w = phi @ phi, phi @ w @ phi.T + w
    return acc_phi, acc_w


def covariance_trajectory(c0: np.ndarray, x: np.ndarray, y: np.ndarray, times,
                          max_step: float = 1.0) -> list[np.ndarray]:
    """``C`` at each of the increasing ``times`` (starting from ``C(times[0]) = c0``).

    Each interval is cut into equal chunks no longer than ``max_step / ||X||``;
    the exact chunk map is then composed by repeated squaring.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing")
    scale = max(np.linalg.norm(x, 2), 1e-300)
    c = np.array(c0, dtype=complex)
    out = [c.copy()]
    for dt in np.diff(times):
        if dt == 0:
            out.append(c.copy())
            continue
        n_chunks = max(1, int(np.ceil(dt * scale / max_step)))
        phi, w = _affine_power(*_affine_step(x, y, dt / n_chunks), n_chunks)
        c = phi @ c @ phi.T + w
        out.append(c.copy())
    return out


def covariance_model(p: XYParameters, states) -> CovarianceMatrix:
    """Initial covariance for ``states`` bundled with the dynamics of ``p``."""
    x, y = covariance_dynamics(xy_to_couplings(p))
    return CovarianceMatrix(covariance_from_z_product(states), x, y)


def stationary_covariance(p: XYParameters) -> CovarianceMatrix:
    """NESS covariance from ``X C + C X^T + Y = 0``; refuses a marginal drift."""
    x, y = covariance_dynamics(xy_to_couplings(p))
    return CovarianceMatrix(linalg.solve_lyapunov(x, y), x, y)


def stationary_profile(p: XYParameters) -> np.ndarray:
    """Stationary ``<Z_j>`` for ``j = 1..N``."""
    return stationary_covariance(p).sz()
