"""Matrix product operators over spin-1/2 chains.

An operator ``O = sum_{j,k} o_{j,k} |j><k|`` on ``N`` sites is stored as a train
of rank-3 tensors ``A[n]`` with legs ``(left bond, m, right bond)``, where the
composite physical index is ``m = j * d + k`` (ket-major).  Flattening a
single-site operator in C order therefore gives its coefficient vector, and
superoperators act on that vector as ``vec(A X B) = kron(A, B.T) @ vec(X)``.

The train is always kept in mixed-canonical form around an orthogonality
centre: tensors left of it are left isometries, tensors right of it are right
isometries and the centre carries unit Frobenius norm.  The physical norm lives
in ``log_prefactor`` so that ``O = exp(log_prefactor) * contract(tensors)``.

``lambdas[b - 1]`` holds the Schmidt coefficients across bond ``b`` (between
sites ``b`` and ``b + 1``, one-based).  They are exact after
:func:`canonicalize`; gate applications refresh the bond they split and mark
the rest stale, which is what :attr:`MPO.canonical` reports.

Sites and bonds are one-based throughout the public API.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import (
    CanonicalFormError,
    DegenerateInputError,
    DimensionError,
    NormalizationError,
    SizeGuardError,
    StructureError,
)
from .pauli import D, I2

DENSE_MAX_SITES = 12
ZERO_LOG = complex(-math.inf, 0.0)

_FORMAT_TAG = "heisenberg_mpo/1"


def site_vector(op) -> np.ndarray:
    """Coefficient vector of a single-site operator in the composite index."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (D, D):
        raise DimensionError(f"local operator must be {D}x{D}, got {op.shape}")
    return op.reshape(D * D)


@dataclass
class MPO:
    """Mixed-canonical matrix product operator; see the module docstring."""

    tensors: list[np.ndarray]
    lambdas: list[np.ndarray]
    log_prefactor: complex = 0.0j
    center: int = 1
    canonical: bool = False
    d: int = D

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1)

    @property
    def is_zero(self) -> bool:
        return self.log_prefactor.real == -math.inf

    @property
    def prefactor(self) -> complex:
        if self.is_zero:
            return 0.0j
        return complex(np.exp(self.log_prefactor))

    @property
    def frobenius_norm(self) -> float:
        return 0.0 if self.is_zero else float(math.exp(self.log_prefactor.real))

    def copy(self) -> MPO:
        # tensors are replaced, never mutated, so sharing arrays is safe
        return MPO(list(self.tensors), list(self.lambdas), self.log_prefactor,
                   self.center, self.canonical, self.d)

    def scaled(self, factor: complex) -> MPO:
        out = self.copy()
        if factor == 0:
            out.log_prefactor = ZERO_LOG
        else:
            out.log_prefactor = out.log_prefactor + complex(np.log(complex(factor)))
        return out

    def vidal_gammas(self, cutoff: float = 1e-300) -> list[np.ndarray]:
        """Vidal tensors ``Gamma[n]`` with ``A = Lambda[n-1] Gamma[n]`` (left gauge).

        Requires fresh Schmidt values; inverse Schmidt values below ``cutoff``
        are set to zero.
        """
        m = self.copy()
        if not m.canonical:
            m = canonicalize(m)
        m._move_center(m.n_sites)
        gammas = []
        for n, t in enumerate(m.tensors):
            if n == 0:
                gammas.append(t)
                continue
            lam = m.lambdas[n - 1]
            inv = np.where(lam > cutoff, 1.0 / np.where(lam > cutoff, lam, 1.0), 0.0)
            gammas.append(inv[:, None, None] * t)
        return gammas

    # -- in-place kernels used by the engine -----------------------------------------

    def _normalize_center(self) -> None:
        c = self.center - 1
        nrm = float(np.linalg.norm(self.tensors[c]))
        if nrm == 0.0:
            self.log_prefactor = ZERO_LOG
            return
        self.tensors[c] = self.tensors[c] / nrm
        self.log_prefactor = self.log_prefactor + math.log(nrm)

    def _move_center(self, target: int) -> None:
        while self.center < target:
            c = self.center - 1
            t = self.tensors[c]
            chi_l, m, chi_r = t.shape
            q, r = np.linalg.qr(t.reshape(chi_l * m, chi_r))
            self.tensors[c] = q.reshape(chi_l, m, q.shape[1])
            nxt = self.tensors[c + 1]
            self.tensors[c + 1] = (r @ nxt.reshape(nxt.shape[0], -1)).reshape(r.shape[0], *nxt.shape[1:])
            self.center += 1
        while self.center > target:
            c = self.center - 1
            t = self.tensors[c]
            chi_l, m, chi_r = t.shape
            q, r = np.linalg.qr(t.reshape(chi_l, m * chi_r).conj().T)
            # t = r^H q^H
            self.tensors[c] = q.conj().T.reshape(q.shape[1], m, chi_r)
            prv = self.tensors[c - 1]
            self.tensors[c - 1] = (prv.reshape(-1, prv.shape[2]) @ r.conj().T).reshape(*prv.shape[:2], r.shape[0])
            self.center -= 1

    def _apply_site(self, gate: np.ndarray, site: int) -> None:
        self._move_center(site)
        t = self.tensors[site - 1]
        self.tensors[site - 1] = np.matmul(gate, t)
        self._normalize_center()
        self.canonical = False

    def _apply_bond(self, gate: np.ndarray, bond: int, chi_max: int, eps: float,
                    move_right: bool = True) -> float:
        """Apply a 16x16 gate across ``bond``; return the relative discarded weight."""
        if abs(self.center - bond) <= abs(self.center - bond - 1):
            self._move_center(bond)
        else:
            self._move_center(bond + 1)
        a = self.tensors[bond - 1]
        b = self.tensors[bond]
        chi_l, m, _ = a.shape
        chi_r = b.shape[2]
        theta = a.reshape(chi_l * m, -1) @ b.reshape(b.shape[0], -1)
        theta = np.matmul(gate, theta.reshape(chi_l, m * m, chi_r))
        res = linalg.svd_truncated(theta.reshape(chi_l * m, m * chi_r), chi_max, eps)
        s = res.singular_values
        nrm = float(np.linalg.norm(s))
        if nrm == 0.0:
            self.log_prefactor = ZERO_LOG
            s = np.ones(1)
            nrm = 1.0
        else:
            self.log_prefactor = self.log_prefactor + math.log(nrm)
            s = s / nrm
        r = len(s)
        if move_right:
            self.tensors[bond - 1] = res.U.reshape(chi_l, m, r)
            self.tensors[bond] = (s[:, None] * res.Vh).reshape(r, m, chi_r)
            self.center = bond + 1
        else:
            self.tensors[bond - 1] = (res.U * s[None, :]).reshape(chi_l, m, r)
            self.tensors[bond] = res.Vh.reshape(r, m, chi_r)
            self.center = bond
        self.lambdas[bond - 1] = s
        self.canonical = False
        return res.truncation_error / nrm


# -- constructors ------------------------------------------------------------------


def _from_raw(raw: list[np.ndarray], log_prefactor: complex = 0.0j) -> MPO:
    m = MPO([np.asarray(t, dtype=complex) for t in raw],
            [np.ones(1) for _ in range(len(raw) - 1)],
            complex(log_prefactor), center=1, canonical=False)
    return canonicalize(m)


def mpo_identity(n_sites: int) -> MPO:
    """Identity on ``n_sites`` spins (chi = 1, ``log_prefactor = N ln(2) / 2``)."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    return mpo_from_product([I2] * n_sites)


def mpo_from_product(ops) -> MPO:
    """Product operator ``ops[0] (x) ops[1] (x) ...`` as a chi = 1 MPO.

    A zero factor yields the zero-norm MPO (``log_prefactor = -inf``).
    """
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one local operator")
    tensors, logp = [], 0.0j
    for op in ops:
        v = site_vector(op)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            logp = ZERO_LOG
            tensors.append(v.reshape(1, D * D, 1).copy())
        else:
            tensors.append((v / nrm).reshape(1, D * D, 1))
            if logp != ZERO_LOG:
                logp += math.log(nrm)
    center = len(ops)
    return MPO(tensors, [np.ones(1) for _ in range(len(ops) - 1)], logp, center,
               canonical=logp != ZERO_LOG)


@dataclass
class TriangularSiteMatrix:
    """Block-lower-triangular MPO site matrix ``blocks[a, b]`` of local operators.

    ``blocks`` has shape ``(chi, chi, d, d)``.  The boundary vectors default to
    ``left = (0, ..., 0, 1)`` and ``right = (1, 0, ..., 0)``, which pick the
    bottom-left entry of the matrix product.
    """

    blocks: np.ndarray
    left_boundary: np.ndarray | None = None
    right_boundary: np.ndarray | None = None
    check_triangular: bool = True

    def __post_init__(self) -> None:
        b = np.asarray(self.blocks, dtype=complex)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2:] != (D, D):
            raise StructureError(f"blocks must have shape (chi, chi, {D}, {D}), got {b.shape}")
        if self.check_triangular and np.any(np.triu(np.ones(b.shape[:2], bool), 1)[:, :, None, None] & (b != 0)):
            raise StructureError("blocks above the diagonal must vanish")
        self.blocks = b
        chi = b.shape[0]
        if self.left_boundary is None:
            self.left_boundary = np.eye(chi)[chi - 1].astype(complex)
        if self.right_boundary is None:
            self.right_boundary = np.eye(chi)[0].astype(complex)
        self.left_boundary = np.asarray(self.left_boundary, dtype=complex)
        self.right_boundary = np.asarray(self.right_boundary, dtype=complex)
        if self.left_boundary.shape != (chi,) or self.right_boundary.shape != (chi,):
            raise StructureError("boundary vectors must have length chi")

    @property
    def chi(self) -> int:
        return self.blocks.shape[0]

    @classmethod
    def from_blocks(cls, rows, **kw) -> TriangularSiteMatrix:
        """Build from a nested list of local operators; ``0`` or ``None`` marks a zero block."""
        chi = len(rows)
        blocks = np.zeros((chi, chi, D, D), dtype=complex)
        for a, row in enumerate(rows):
            if len(row) != chi:
                raise StructureError("block matrix must be square")
            for b, op in enumerate(row):
                if op is not None and not (np.isscalar(op) and op == 0):
                    blocks[a, b] = op
        return cls(blocks, **kw)

    def tensor(self) -> np.ndarray:
        """Site tensor with legs ``(left bond, m, right bond)``."""
        chi = self.chi
        return self.blocks.reshape(chi, chi, D * D).transpose(0, 2, 1)

    def transfer(self, rho) -> np.ndarray:
        """``T[a, b] = tr(rho @ blocks[a, b])``, the site traced against ``rho``."""
        return np.einsum("abjk,kj->ab", self.blocks, np.asarray(rho, dtype=complex))


def triangular_tensors(sites: list[TriangularSiteMatrix]) -> list[np.ndarray]:
    """Raw site tensors with the boundary vectors folded into the end sites."""
    if not sites:
        raise StructureError("need at least one site")
    for n, (a, b) in enumerate(zip(sites, sites[1:])):
        if a.chi != b.chi:
            raise StructureError(f"block dimension mismatch between sites {n + 1} and {n + 2}: {a.chi} != {b.chi}")
    raw = [s.tensor() for s in sites]
    left = sites[0].left_boundary
    right = sites[-1].right_boundary
    raw[0] = np.einsum("a,amb->mb", left, raw[0])[None]
    raw[-1] = np.einsum("amb,b->am", raw[-1], right)[..., None]
    return raw


def mpo_from_triangular(sites: list[TriangularSiteMatrix]) -> MPO:
    """Canonical MPO of ``<L| A[1] A[2] ... A[N] |R>``."""
    return _from_raw(triangular_tensors(sites))


def triangular_product(sites_a: list[TriangularSiteMatrix],
                       sites_b: list[TriangularSiteMatrix]) -> list[TriangularSiteMatrix]:
    """Site matrices of the operator product ``O_A O_B`` (dimension chi_A * chi_B)."""
    if len(sites_a) != len(sites_b):
        raise StructureError("operands must have the same number of sites")
    out = []
    for n, (sa, sb) in enumerate(zip(sites_a, sites_b)):
        blocks = np.einsum("acij,bdjk->abcdik", sa.blocks, sb.blocks)
        chi = sa.chi * sb.chi
        blocks = blocks.reshape(chi, chi, D, D)
        out.append(TriangularSiteMatrix(
            blocks,
            np.kron(sa.left_boundary, sb.left_boundary),
            np.kron(sa.right_boundary, sb.right_boundary),
            check_triangular=False,
        ))
    return out


def trace_out_triangular(sites: list[TriangularSiteMatrix], rho) -> list[TriangularSiteMatrix]:
    """Trace the last site against ``rho``, folding it into the right boundary.

    The remaining site matrices are unchanged; the new right boundary is
    ``T @ R`` with ``T`` the traced last-site matrix.
    """
    if len(sites) < 2:
        raise StructureError("need at least two sites to trace one out")
    last = sites[-1]
    new_right = last.transfer(rho) @ last.right_boundary
    keep = list(sites[:-1])
    tail = keep[-1]
    keep[-1] = TriangularSiteMatrix(tail.blocks, tail.left_boundary, new_right,
                                    check_triangular=False)
    return keep


def mpo_from_dense(op, n_sites: int | None = None, chi_max: int | None = None, eps: float = 0.0) -> MPO:
    """Decompose a dense ``2^N x 2^N`` operator by successive SVDs."""
    op = np.asarray(op, dtype=complex)
    dim = op.shape[0]
    n = int(round(math.log2(dim))) if n_sites is None else n_sites
    if op.shape != (D ** n, D ** n):
        raise DimensionError(f"expected a {D ** n}x{D ** n} matrix, got {op.shape}")
    t = op.reshape([D] * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    psi = t.transpose(order).reshape(-1)
    nrm = float(np.linalg.norm(psi))
    if nrm == 0.0:
        raise DegenerateInputError("cannot decompose the zero operator")
    psi = psi / nrm
    tensors, lambdas = [], []
    rest = psi.reshape(1, -1)
    chi = 1
    for k in range(n - 1):
        res = linalg.svd_truncated(rest.reshape(chi * D * D, -1), chi_max or 10 ** 9, eps)
        r = res.rank
        tensors.append(res.U.reshape(chi, D * D, r))
        lambdas.append(res.singular_values / np.linalg.norm(res.singular_values))
        rest = res.singular_values[:, None] * res.Vh
        chi = r
    tensors.append(rest.reshape(chi, D * D, 1))
    m = MPO(tensors, lambdas, complex(math.log(nrm)), center=n, canonical=True)
    m._normalize_center()
    return m


# -- operations --------------------------------------------------------------------


def canonicalize(m: MPO, chi_max: int | None = None, eps: float = 0.0) -> MPO:
    """Return a copy with exact Schmidt values on every bond.

    A right-to-left QR sweep is followed by a left-to-right SVD sweep; the
    centre ends on the last site.  Optional truncation by ``chi_max``/``eps``.

    Raises:
        DegenerateInputError: the MPO encodes the zero operator.
    """
    if m.is_zero:
        raise DegenerateInputError("cannot canonicalize a zero-norm MPO")
    out = m.copy()
    # rebuild isometries from scratch so arbitrary raw tensors are accepted
    out.center = out.n_sites
    out._move_center(1)
    out._normalize_center()
    if out.is_zero:
        raise DegenerateInputError("cannot canonicalize a zero-norm MPO")
    cap = chi_max or 10 ** 9
    for bond in range(1, out.n_sites):
        a = out.tensors[bond - 1]
        chi_l, mm, chi_r = a.shape
        res = linalg.svd_truncated(a.reshape(chi_l * mm, chi_r), cap, eps)
        s = res.singular_values
        nrm = float(np.linalg.norm(s))
        if nrm == 0.0:
            raise DegenerateInputError("cannot canonicalize a zero-norm MPO")
        s = s / nrm
        out.log_prefactor += math.log(nrm)
        r = len(s)
        out.tensors[bond - 1] = res.U.reshape(chi_l, mm, r)
        nxt = out.tensors[bond]
        out.tensors[bond] = ((s[:, None] * res.Vh) @ nxt.reshape(chi_r, -1)).reshape(r, *nxt.shape[1:])
        out.lambdas[bond - 1] = s
        out.center = bond + 1
    out._normalize_center()
    out.canonical = True
    return out


def to_dense(m: MPO) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of the encoded operator (``N <= 12``)."""
    n = m.n_sites
    if n > DENSE_MAX_SITES:
        raise SizeGuardError(f"to_dense is limited to {DENSE_MAX_SITES} sites, got {n}")
    if m.is_zero:
        return np.zeros((D ** n, D ** n), dtype=complex)
    psi = m.tensors[0].reshape(D * D, -1)
    for t in m.tensors[1:]:
        psi = (psi @ t.reshape(t.shape[0], -1)).reshape(-1, t.shape[2])
    psi = psi.reshape([D] * (2 * n))
    order = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return m.prefactor * psi.transpose(order).reshape(D ** n, D ** n)


def _check_density(rho, site: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (D, D):
        raise DimensionError(f"density factor at site {site} must be {D}x{D}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-10:
        raise NormalizationError(f"density factor at site {site} has trace {tr}")
    return rho


def expectation(m: MPO, rho) -> complex:
    """``tr(rho O)`` for a product density matrix ``rho = rho_1 (x) ... (x) rho_N``."""
    rho = list(rho)
    if len(rho) != m.n_sites:
        raise DimensionError(f"need {m.n_sites} density factors, got {len(rho)}")
    if m.is_zero:
        for k, r in enumerate(rho, 1):
            _check_density(r, k)
        return 0.0j
    v = np.ones(1, dtype=complex)
    for k, (t, r) in enumerate(zip(m.tensors, rho), 1):
        w = _check_density(r, k).T.reshape(D * D)
        v = v @ np.tensordot(t, w, axes=([1], [0]))
    return complex(v[0]) * m.prefactor


@dataclass
class SchmidtSpectrum:
    bond: int
    values: np.ndarray = field(repr=False)


def schmidt_spectrum(m: MPO, bond: int) -> SchmidtSpectrum:
    """Schmidt coefficients across ``bond``; raises if ``m`` is not canonical."""
    if not 1 <= bond <= m.n_sites - 1:
        raise ValueError(f"bond must be in [1, {m.n_sites - 1}], got {bond}")
    if not m.canonical:
        raise CanonicalFormError("Schmidt values are stale; call canonicalize() first")
    vals = np.sort(np.asarray(m.lambdas[bond - 1], dtype=float))[::-1]
    return SchmidtSpectrum(bond, vals)


def two_site_spectrum(m: MPO, bond: int) -> np.ndarray:
    """Untruncated singular values of the two-site block across ``bond``.

    Unlike :func:`schmidt_spectrum` nothing is discarded: the result has
    ``min(4 chi_left, 4 chi_right)`` entries, so values beyond the stored bond
    dimension show how far the spectrum falls off (rounding level for an
    exactly representable operator).
    """
    if not 1 <= bond <= m.n_sites - 1:
        raise ValueError(f"bond must be in [1, {m.n_sites - 1}], got {bond}")
    c = canonicalize(m)
    c._move_center(bond)
    a = c.tensors[bond - 1]
    b = c.tensors[bond]
    theta = a.reshape(-1, a.shape[2]) @ b.reshape(b.shape[0], -1)
    s = np.linalg.svd(theta.reshape(a.shape[0] * a.shape[1], -1), compute_uv=False)
    return s / np.linalg.norm(s)


def effective_chi(s: SchmidtSpectrum, eps: float) -> int:
    """Number of Schmidt coefficients ``>= eps``."""
    return int(np.count_nonzero(np.asarray(s.values) >= eps))


def apply_two_site_gate(m: MPO, gate, bond: int, chi_max: int, eps: float) -> MPO:
    """Return ``m`` with a ``16 x 16`` superoperator applied to sites ``bond, bond + 1``.

    The gate acts on the pair index ``m_bond * 4 + m_{bond+1}``.
    """
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != ((D * D) ** 2,) * 2:
        raise DimensionError(f"two-site gate must be 16x16, got {gate.shape}")
    if not 1 <= bond <= m.n_sites - 1:
        raise ValueError(f"bond must be in [1, {m.n_sites - 1}], got {bond}")
    out = m.copy()
    out._apply_bond(gate, bond, chi_max, eps)
    return out


def apply_one_site_gate(m: MPO, gate, site: int) -> MPO:
    """Return ``m`` with a ``4 x 4`` superoperator applied to ``site``."""
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (D * D, D * D):
        raise DimensionError(f"one-site gate must be 4x4, got {gate.shape}")
    if not 1 <= site <= m.n_sites:
        raise ValueError(f"site must be in [1, {m.n_sites}], got {site}")
    out = m.copy()
    out._apply_site(gate, site)
    return out


def partial_trace_last_site(m: MPO, rho_a) -> MPO:
    """Partial expectation ``tr_a[(1 (x) rho_a) O]`` over the last site."""
    if m.n_sites < 2:
        raise StructureError("cannot trace out the only site of a single-site MPO")
    rho_a = _check_density(rho_a, m.n_sites)
    w = rho_a.T.reshape(D * D)
    last = m.tensors[-1]
    tvec = np.tensordot(last, w, axes=([1], [0]))[:, 0]
    prev = m.tensors[-2]
    tensors = list(m.tensors[:-2]) + [np.tensordot(prev, tvec, axes=([2], [0]))[..., None]]
    out = MPO(tensors, list(m.lambdas[:-1]), m.log_prefactor,
              center=min(m.center, m.n_sites - 1), canonical=False)
    if m.is_zero:
        return out
    try:
        return canonicalize(out)
    except DegenerateInputError:
        out.log_prefactor = ZERO_LOG
        return out


# -- serialisation -----------------------------------------------------------------


def save_mpo(m: MPO, path) -> None:
    """Write ``m`` as one JSON header line followed by little-endian binary data.

    Payload: every site tensor in C order over ``(left, m, right)`` as
    ``complex128`` (real/imag float64 pairs), then every Schmidt vector as
    float64, all little-endian.
    """
    header = {
        "format": _FORMAT_TAG,
        "n_sites": m.n_sites,
        "d": m.d,
        "bond_dims": m.bond_dims,
        "lambda_sizes": [len(l) for l in m.lambdas],
        "log_prefactor": [m.log_prefactor.real, m.log_prefactor.imag],
        "center": m.center,
        "canonical": m.canonical,
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for t in m.tensors:
            fh.write(np.ascontiguousarray(t, dtype="<c16").tobytes())
        for lam in m.lambdas:
            fh.write(np.ascontiguousarray(lam, dtype="<f8").tobytes())


def load_mpo(path) -> MPO:
    data = Path(path).read_bytes()
    nl = data.index(b"\n")
    header = json.loads(data[:nl].decode("utf-8"))
    if header.get("format") != _FORMAT_TAG:
        raise StructureError(f"unrecognised MPO file format {header.get('format')!r}")
    n, d = header["n_sites"], header["d"]
    dims = [1] + list(header["bond_dims"]) + [1]
    off = nl + 1
    tensors = []
    for k in range(n):
        shape = (dims[k], d * d, dims[k + 1])
        size = int(np.prod(shape)) * 16
        tensors.append(np.frombuffer(data, dtype="<c16", count=size // 16, offset=off)
                       .reshape(shape).astype(complex))
        off += size
    lambdas = []
    for size in header["lambda_sizes"]:
        lambdas.append(np.frombuffer(data, dtype="<f8", count=size, offset=off).astype(float))
        off += size * 8
    re, im = header["log_prefactor"]
    return MPO(tensors, lambdas, complex(re, im), header["center"], header["canonical"], d)
