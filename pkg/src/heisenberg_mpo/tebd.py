"""Heisenberg-picture TEBD for the boundary-driven XY chain.

One step is the symmetric composition

    D(dt/2) . Odd(dt/2) . Even(dt) . Odd(dt/2) . D(dt/2)

where ``D`` is the exact boundary dissipator on sites 1 and N.  ``D`` acts
on a single end site, so it is multiplied into the matrix of the
neighbouring boundary bond gate of the layer it abuts.  This is the same
operator product, but it costs no extra sweep to reach the chain ends.
Consecutive steps that are not separated by a measurement fuse the trailing
odd layer of one step with the leading odd layer of the next.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import model
from .errors import NumericalAbort
from .mpo import MPO, canonicalize, expectation, save_mpo
from .params import ParameterSchedule, XYParameters

log = logging.getLogger(__name__)

_I4 = np.eye(4, dtype=complex)
_TIME_TOL = 1e-9


@dataclass
class EvolutionConfig:
    """Numerical settings of one trajectory."""

    dt: float = 0.01
    t_final: float = 0.0
    chi_max: int = 64
    eps: float = 1e-10
    measure_every: int = 1
    checkpoint_every: int | None = None
    checkpoint_dir: str | None = None
    schmidt_bonds: Sequence[int] | None = None
    schmidt_eps: float | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_final >= 0:
            raise ValueError(f"t_final must be non-negative, got {self.t_final}")
        if int(self.chi_max) != self.chi_max or self.chi_max < 1:
            raise ValueError(f"chi_max must be a positive integer, got {self.chi_max}")
        if not 0 <= self.eps < 1:
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")
        if int(self.measure_every) != self.measure_every or self.measure_every < 1:
            raise ValueError(f"measure_every must be a positive integer, got {self.measure_every}")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ValueError("checkpoint_every must be positive when given")


@dataclass
class TrajectoryRecord:
    """Measured expectation values per labelled product state."""

    times: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    schmidt_snapshots: list = field(default_factory=list)  # (t, {bond: values})
    cumulative_truncation: float = 0.0
    effective_chi_max_seen: int = 1
    n_steps: int = 0
    checkpoints: list = field(default_factory=list)
    final: MPO | None = None

    def series(self, label=None) -> np.ndarray:
        if label is None:
            if len(self.values) != 1:
                raise KeyError("several measurement states; pass a label")
            label = next(iter(self.values))
        return np.asarray(self.values[label])


# -- gate sets -------------------------------------------------------------------------


class GateSet:
    """All gates of one Strang step for fixed parameters and step size."""

    def __init__(self, p: XYParameters, dt: float):
        self.params = p
        self.dt = dt
        n = p.n_sites
        self.odd_bonds = list(range(1, n, 2))
        self.even_bonds = list(range(2, n, 2))
        d_left = model.boundary_dissipator_gate(p, "left", dt / 2)
        d_right = model.boundary_dissipator_gate(p, "right", dt / 2)
        fold: dict[int, np.ndarray] = {}
        fold[1] = np.kron(d_left, _I4)
        right = np.kron(_I4, d_right)
        fold[n - 1] = fold[n - 1] @ right if n - 1 in fold else right

        self.lead, self.trail = {}, {}
        for b in self.odd_bonds:
            g = model.adjoint_bond_gate(p, b, dt / 2)
            f = fold.get(b)
            self.lead[b] = g if f is None else g @ f
            self.trail[b] = g if f is None else f @ g
        self.fused = {b: self.lead[b] @ self.trail[b] for b in self.odd_bonds}
        self.even = {}
        for b in self.even_bonds:
            g = model.adjoint_bond_gate(p, b, dt)
            f = fold.get(b)
            self.even[b] = g if f is None else f @ g @ f


class _GateCache:
    def __init__(self):
        self._sets: dict = {}

    def get(self, p: XYParameters, dt: float) -> GateSet:
        key = (p, round(dt, 14))
        if key not in self._sets:
            self._sets[key] = GateSet(p, dt)
        return self._sets[key]


def _sweep_odd(m: MPO, gates: Mapping[int, np.ndarray], chi_max: int, eps: float) -> float:
    err = 0.0
    for b in sorted(gates):
        err += m._apply_bond(gates[b], b, chi_max, eps, move_right=True)
    return err


def _sweep_even(m: MPO, gates: Mapping[int, np.ndarray], chi_max: int, eps: float) -> float:
    err = 0.0
    for b in sorted(gates, reverse=True):
        err += m._apply_bond(gates[b], b, chi_max, eps, move_right=False)
    return err


class _Stepper:
    """In-place stepping with lazy application of the trailing odd layer."""

    def __init__(self, m: MPO, chi_max: int, eps: float):
        self.m = m
        self.chi_max = chi_max
        self.eps = eps
        self.pending: GateSet | None = None
        self.truncation = 0.0
        self.max_bond = m.max_bond

    def step(self, gs: GateSet) -> None:
        if self.pending is gs:
            self.truncation += _sweep_odd(self.m, gs.fused, self.chi_max, self.eps)
        else:
            self.flush()
            self.truncation += _sweep_odd(self.m, gs.lead, self.chi_max, self.eps)
        self.truncation += _sweep_even(self.m, gs.even, self.chi_max, self.eps)
        self.pending = gs
        self.max_bond = max(self.max_bond, self.m.max_bond)

    def flush(self) -> None:
        if self.pending is not None:
            self.truncation += _sweep_odd(self.m, self.pending.trail, self.chi_max, self.eps)
            self.pending = None
            self.max_bond = max(self.max_bond, self.m.max_bond)


def strang_step(m: MPO, p: XYParameters, dt: float, chi_max: int, eps: float) -> MPO:
    """One second-order step of the adjoint master equation (returns a new MPO)."""
    out = m.copy()
    st = _Stepper(out, chi_max, eps)
    st.step(GateSet(p, dt))
    st.flush()
    return out


# -- evolution ----------------------------------------------------------------------


def _step_plan(schedule: ParameterSchedule, dt: float, t_final: float):
    """``(t_end, h, params, segment)`` per step; steps never straddle a segment boundary."""
    plan = []
    for seg, (t0, t1, p) in enumerate(schedule.boundaries(t_final)):
        span = t1 - t0
        if span <= _TIME_TOL * dt:
            continue
        k = int(math.floor(span / dt + _TIME_TOL))
        for i in range(k):
            plan.append((t0 + (i + 1) * dt, dt, p, seg))
        rest = span - k * dt
        if rest > _TIME_TOL * dt:
            plan.append((t1, rest, p, seg))
    return plan


def _normalize_states(states, n_sites: int) -> dict:
    from .oracles import product_density

    if states is None:
        states = {"down": ["down"] * n_sites}
    elif not isinstance(states, Mapping):
        states = {i: s for i, s in enumerate(states)}
    out = {}
    for k, s in states.items():
        rho = product_density(s, n_sites)
        out[k] = rho
    return out


def _check_finite(m: MPO) -> bool:
    if not (math.isfinite(m.log_prefactor.real) or m.is_zero) or not math.isfinite(m.log_prefactor.imag):
        return False
    return all(np.isfinite(t).all() for t in m.tensors)


def snapshot_spectra(m: MPO, bonds: Sequence[int], eps: float = 0.0) -> dict:
    """Schmidt values at ``bonds`` from a freshly canonicalized copy (``m`` untouched)."""
    c = canonicalize(m, eps=eps)
    return {b: np.sort(c.lambdas[b - 1])[::-1].copy() for b in bonds}


def evolve(m0: MPO, schedule: ParameterSchedule | XYParameters, cfg: EvolutionConfig,
           states=None, callback: Callable | None = None) -> TrajectoryRecord:
    """Evolve ``m0`` and measure it against product states.

    For a time-dependent schedule the Heisenberg operator at time ``t`` is
    ``E_1^dag(E_2^dag(... E_k^dag(O)))`` with ``E_k`` the latest stretch, so
    the segments act on the observable in reverse chronological order.
    Measurement times inside the first segment come from one forward pass.
    Each later measurement carries the operator of its own segment back
    through all earlier segments, which costs one pass over ``[0, t_k]``.

    Args:
        m0: initial observable (not modified).
        schedule: piecewise-constant parameters, or a single parameter set.
        cfg: step size, truncation and measurement settings.
        states: product states as a list or a label -> list mapping; each entry
            is a per-site list of ``'up'``/``'down'`` labels or 2x2 density
            matrices.  Defaults to all spins down.
        callback: optional ``callback(t, mpo)`` invoked at every measurement.

    Returns:
        TrajectoryRecord with one complex series per state.  The prefactor is
        included, so values are physical expectation values.

    Raises:
        NumericalAbort: on a non-finite MPO; carries the last checkpoint path.
    """
    if isinstance(schedule, XYParameters):
        schedule = ParameterSchedule.constant(schedule)
    n = m0.n_sites
    if schedule.n_sites != n:
        raise ValueError(f"schedule has {schedule.n_sites} sites, observable has {n}")
    rhos = _normalize_states(states, n)
    rec = TrajectoryRecord(values={k: [] for k in rhos})
    bonds = list(cfg.schmidt_bonds or [])
    for b in bonds:
        if not 1 <= b <= n - 1:
            raise ValueError(f"schmidt bond {b} out of range")

    start = canonicalize(m0) if not m0.is_zero else m0.copy()
    cache = _GateCache()
    stats = {"truncation": 0.0, "max_bond": start.max_bond}
    last_ckpt = None

    def measure(t: float, m: MPO) -> None:
        rec.times.append(t)
        for k, rho in rhos.items():
            rec.values[k].append(expectation(m, rho))
        if bonds:
            rec.schmidt_snapshots.append((t, snapshot_spectra(m, bonds, cfg.schmidt_eps or 0.0)))
        if callback is not None:
            callback(t, m)

    def checkpoint(i: int, m: MPO) -> None:
        nonlocal last_ckpt
        if cfg.checkpoint_every is None or i % cfg.checkpoint_every or not cfg.checkpoint_dir:
            return
        os.makedirs(cfg.checkpoint_dir, exist_ok=True)
        last_ckpt = os.path.join(cfg.checkpoint_dir, f"step_{i:08d}.mpo")
        save_mpo(m, last_ckpt)
        rec.checkpoints.append(last_ckpt)

    def run(m: MPO, steps, t_abort: float) -> MPO:
        """Apply ``steps`` to ``m`` in the given order (in place)."""
        st = _Stepper(m, cfg.chi_max, cfg.eps)
        for _, h, p, _ in steps:
            st.step(cache.get(p, h))
        st.flush()
        stats["truncation"] += st.truncation
        stats["max_bond"] = max(stats["max_bond"], st.max_bond)
        if not _check_finite(m):
            raise NumericalAbort("non-finite MPO entries", time=t_abort, checkpoint=last_ckpt)
        return m

    plan = _step_plan(schedule, cfg.dt, cfg.t_final)
    measure(0.0, start)
    first_segment = [i for i, s in enumerate(plan) if s[3] == plan[0][3]] if plan else []
    n_first = len(first_segment)

    # first segment: a single forward pass serves every measurement
    m = start.copy()
    stepper = _Stepper(m, cfg.chi_max, cfg.eps)
    for i in range(1, n_first + 1):
        t, h, p, _ = plan[i - 1]
        stepper.step(cache.get(p, h))
        due = i % cfg.measure_every == 0 or i == len(plan)
        ckpt_due = cfg.checkpoint_every is not None and i % cfg.checkpoint_every == 0
        if due or ckpt_due:
            stepper.flush()
        if not _check_finite(m):
            raise NumericalAbort("non-finite MPO entries", time=t, checkpoint=last_ckpt)
        if ckpt_due:
            checkpoint(i, m)
        if due:
            measure(t, m)
    stepper.flush()
    stats["truncation"] += stepper.truncation
    stats["max_bond"] = max(stats["max_bond"], stepper.max_bond)
    final = m

    # later segments: the latest stretch acts first, earlier segments wrap it
    seg_start = {}
    for i, s in enumerate(plan):
        seg_start.setdefault(s[3], i)
    inner, inner_seg, inner_done = None, None, 0
    for i in range(n_first + 1, len(plan) + 1):
        if not (i % cfg.measure_every == 0 or i == len(plan)):
            continue
        t, _, _, seg = plan[i - 1]
        s0 = seg_start[seg]
        local = plan[s0:i]
        if all(abs(h - cfg.dt) <= _TIME_TOL * cfg.dt for _, h, _, _ in local):
            if inner_seg != seg:
                inner, inner_seg, inner_done = start.copy(), seg, 0
            run(inner, local[inner_done:], t)
            inner_done = len(local)
            x = inner.copy()
        else:
            x = run(start.copy(), local[::-1], t)
        run(x, plan[:s0][::-1], t)
        checkpoint(i, x)
        measure(t, x)
        final = x

    rec.n_steps = len(plan)
    rec.cumulative_truncation = stats["truncation"]
    rec.effective_chi_max_seen = stats["max_bond"]
    rec.final = final
    log.debug("evolve: %d steps, max bond %d, truncation %.3e", rec.n_steps,
              rec.effective_chi_max_seen, rec.cumulative_truncation)
    return rec
