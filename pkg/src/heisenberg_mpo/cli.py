"""Experiment runner and command-line front end.

A run is described by one JSON document::

    {
      "chain": {"n_sites": 50, "J": 1.0, "gamma": 0.75, "B": 1.0,
                "gamma_L_plus": 0.3, "gamma_L_minus": 0.5,
                "gamma_R_plus": 0.7, "gamma_R_minus": 0.5},
      "schedule": [{"t_start": 0, "B": 10.0}, {"t_start": 500, "B": 1.0}],
      "evolution": {"dt": 0.01, "t_final": 50, "eps": 1e-10, "measure_every": 10},
      "observables": ["Z25", "Z1*Z50"],
      "initial_state": "down",
      "outputs": "runs/demo",
      "emit_schmidt": true,
      "schmidt_bonds": [25],
      "emit_stationary_reference": true
    }

``schedule`` entries override chain fields from ``t_start`` on; it may be
omitted for constant parameters.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import platform
import re
import sys
import time
import warnings
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np
import scipy

from . import oracles
from .errors import ConfigError, NumericalAbort, ObservableParseError, StabilityError
from .mpo import MPO, mpo_from_product
from .params import ParameterSchedule, XYParameters
from .pauli import I2, SX, SY, SZ
from .tebd import EvolutionConfig, TrajectoryRecord, evolve

log = logging.getLogger(__name__)

CHI_CAP = 256
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

_TERM = re.compile(r"\s*([A-Za-z])\s*(\d+)\s*")
_OPS = {"X": SX, "Y": SY, "Z": SZ}


class OddParityWarning(UserWarning):
    """Observable outside the even sector; its bond dimension is not bounded."""


@dataclass(frozen=True)
class ObservableSpec:
    expression: str
    parsed: tuple

    @property
    def label(self) -> str:
        return "*".join(f"{p}{s}" for s, p in self.parsed)

    @property
    def fermion_order(self) -> int:
        """Number of Majorana factors of the string."""
        return len(oracles.pauli_to_majorana(self.parsed)[1])

    @property
    def is_even(self) -> bool:
        return self.fermion_order % 2 == 0

    @property
    def analytic_chi(self) -> int | None:
        """``2**order`` for even strings; ``None`` when no bound applies."""
        return 2 ** self.fermion_order if self.is_even else None


def parse_observable(expr: str, n_sites: int | None = None) -> ObservableSpec:
    """Parse ``term ('*' term)*`` with ``term = [XYZxyz] site``.

    Raises:
        ObservableParseError: unknown symbol, bad or duplicate site; the error
            carries the character position.
    """
    if not isinstance(expr, str) or not expr.strip():
        raise ObservableParseError("empty observable expression", 0)
    factors = []
    seen = set()
    pos = 0
    while True:
        mt = _TERM.match(expr, pos)
        if mt is None:
            bad = pos + len(expr[pos:]) - len(expr[pos:].lstrip())
            raise ObservableParseError(f"expected Pauli term in {expr!r}", bad)
        sym = mt.group(1).upper()
        if sym not in _OPS:
            raise ObservableParseError(f"unknown symbol {mt.group(1)!r}", mt.start(1))
        site = int(mt.group(2))
        if site < 1 or (n_sites is not None and site > n_sites):
            bound = f"[1, {n_sites}]" if n_sites is not None else ">= 1"
            raise ObservableParseError(f"site {site} outside {bound}", mt.start(2))
        if site in seen:
            raise ObservableParseError(f"duplicate site {site}", mt.start(2))
        seen.add(site)
        factors.append((site, sym))
        pos = mt.end()
        if pos == len(expr):
            break
        if expr[pos] != "*":
            raise ObservableParseError(f"unexpected character {expr[pos]!r}", pos)
        pos += 1
    return ObservableSpec(expr, tuple(factors))


def observable_mpo(spec: ObservableSpec, n_sites: int) -> MPO:
    """chi = 1 product MPO of the string; warns for odd strings."""
    ops = [I2] * n_sites
    for site, p in spec.parsed:
        if site > n_sites:
            raise ObservableParseError(f"site {site} outside [1, {n_sites}]", 0)
        ops[site - 1] = _OPS[p]
    if not spec.is_even:
        warnings.warn(f"{spec.label} is odd in the fermions; its MPO dimension may grow "
                      "without bound", OddParityWarning, stacklevel=2)
    return mpo_from_product(ops)


def default_chi_max(spec: ObservableSpec, cap: int = CHI_CAP) -> int:
    chi = spec.analytic_chi
    return cap if chi is None else min(2 * chi, cap)


# -- configuration ---------------------------------------------------------------


@dataclass
class ExperimentConfig:
    chain: XYParameters
    schedule: ParameterSchedule
    evolution: EvolutionConfig
    observables: list
    initial_state: list
    outputs: str
    emit_schmidt: bool = False
    emit_stationary_reference: bool = False
    schmidt_bonds: list = field(default_factory=list)
    chi_max: int | None = None
    raw: dict = field(default_factory=dict)


def _get(d: dict, key: str, path: str, kind, default=None, required=False):
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}: missing required field")
        return default
    v = d[key]
    if kind is float and isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if kind is int and isinstance(v, int) and not isinstance(v, bool):
        return v
    if kind not in (float, int) and isinstance(v, kind):
        return v
    raise ConfigError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}, got {v!r}")


_CHAIN_FIELDS = ("J", "gamma", "B", "gamma_L_plus", "gamma_L_minus", "gamma_R_plus", "gamma_R_minus")


def config_from_dict(raw: dict, out_dir: str | None = None) -> ExperimentConfig:
    """Validate a parsed JSON document; errors name the offending path."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    chain_raw = _get(raw, "chain", "config", dict, required=True)
    unknown = set(chain_raw) - set(_CHAIN_FIELDS) - {"n_sites"}
    if unknown:
        raise ConfigError(f"config.chain: unknown fields {sorted(unknown)}")
    kw = {"n_sites": _get(chain_raw, "n_sites", "config.chain", int, required=True)}
    for f in _CHAIN_FIELDS:
        v = _get(chain_raw, f, "config.chain", float)
        if v is not None:
            kw[f] = v
    try:
        chain = XYParameters(**kw)
    except ValueError as exc:
        raise ConfigError(f"config.chain: {exc}") from exc
    n = chain.n_sites

    segs = _get(raw, "schedule", "config", list, default=[])
    try:
        if segs:
            built = []
            cur = chain
            for i, s in enumerate(segs):
                path = f"config.schedule[{i}]"
                if not isinstance(s, dict):
                    raise ConfigError(f"{path}: expected object")
                t0 = _get(s, "t_start", path, float, required=True)
                extra = set(s) - set(_CHAIN_FIELDS) - {"t_start"}
                if extra:
                    raise ConfigError(f"{path}: unknown fields {sorted(extra)}")
                cur = cur.replace(**{k: float(s[k]) for k in _CHAIN_FIELDS if k in s})
                built.append((t0, cur))
            schedule = ParameterSchedule(tuple(built))
        else:
            schedule = ParameterSchedule.constant(chain)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config.schedule: {exc}") from exc

    ev = _get(raw, "evolution", "config", dict, required=True)
    allowed = {"dt", "t_final", "chi_max", "eps", "measure_every", "checkpoint_every"}
    if set(ev) - allowed:
        raise ConfigError(f"config.evolution: unknown fields {sorted(set(ev) - allowed)}")
    chi_max = _get(ev, "chi_max", "config.evolution", int)
    ckpt_every = _get(ev, "checkpoint_every", "config.evolution", int)
    outputs = out_dir or _get(raw, "outputs", "config", str, default="outputs")
    try:
        evolution = EvolutionConfig(
            dt=_get(ev, "dt", "config.evolution", float, default=0.01),
            t_final=_get(ev, "t_final", "config.evolution", float, required=True),
            chi_max=chi_max or CHI_CAP,
            eps=_get(ev, "eps", "config.evolution", float, default=1e-10),
            measure_every=_get(ev, "measure_every", "config.evolution", int, default=1),
            checkpoint_every=ckpt_every,
            checkpoint_dir=os.path.join(outputs, "checkpoints") if ckpt_every else None,
        )
    except ValueError as exc:
        raise ConfigError(f"config.evolution: {exc}") from exc

    obs_raw = _get(raw, "observables", "config", list, required=True)
    if not obs_raw:
        raise ConfigError("config.observables: need at least one observable")
    observables = []
    for i, e in enumerate(obs_raw):
        try:
            observables.append(parse_observable(e, n))
        except ObservableParseError as exc:
            raise ConfigError(f"config.observables[{i}]: {exc}") from exc

    st = raw.get("initial_state", "down")
    if isinstance(st, str):
        st = [st] * n
    if not isinstance(st, list) or len(st) != n:
        raise ConfigError(f"config.initial_state: expected 'up', 'down' or a list of {n} labels")
    for i, s in enumerate(st):
        if s not in ("up", "down"):
            raise ConfigError(f"config.initial_state[{i}]: expected 'up' or 'down', got {s!r}")

    bonds = _get(raw, "schmidt_bonds", "config", list, default=[n // 2])
    for i, b in enumerate(bonds):
        if not isinstance(b, int) or not 1 <= b <= n - 1:
            raise ConfigError(f"config.schmidt_bonds[{i}]: bond must be in [1, {n - 1}]")

    return ExperimentConfig(
        chain=chain, schedule=schedule, evolution=evolution, observables=observables,
        initial_state=list(st), outputs=outputs,
        emit_schmidt=bool(raw.get("emit_schmidt", False)),
        emit_stationary_reference=bool(raw.get("emit_stationary_reference", False)),
        schmidt_bonds=list(bonds), chi_max=chi_max, raw=raw,
    )


def load_config(path: str, out_dir: str | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    try:
        return config_from_dict(raw, out_dir)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# -- running ------------------------------------------------------------------------


@dataclass
class RunResult:
    status: int
    files: dict
    records: dict
    manifest: dict


def _fmt(x: float) -> str:
    return repr(float(x))


def _package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def run_experiment(cfg: ExperimentConfig, quiet: bool = True) -> RunResult:
    """Evolve every observable and write the output files.

    Returns:
        RunResult whose ``files`` maps the logical name to the written path.
    """
    os.makedirs(cfg.outputs, exist_ok=True)
    states = {"initial": cfg.initial_state}
    records: dict[str, TrajectoryRecord] = {}
    obs_meta = []
    caught: list[str] = []
    t_start = time.perf_counter()
    for k, spec in enumerate(cfg.observables):
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always", OddParityWarning)
            m0 = observable_mpo(spec, cfg.chain.n_sites)
        for w in wlist:
            caught.append(str(w.message))
            if not quiet:
                print(f"warning: {w.message}", file=sys.stderr)
        chi = cfg.chi_max or default_chi_max(spec)
        ev = EvolutionConfig(**{**cfg.evolution.__dict__, "chi_max": chi,
                                "schmidt_bonds": cfg.schmidt_bonds if (cfg.emit_schmidt and k == 0) else None})
        t0 = time.perf_counter()
        rec = evolve(m0, cfg.schedule, ev, states=states)
        records[spec.label] = rec
        obs_meta.append({
            "expression": spec.expression, "label": spec.label,
            "fermion_order": spec.fermion_order, "analytic_chi": spec.analytic_chi,
            "chi_max": chi, "n_steps": rec.n_steps,
            "effective_chi_max_seen": rec.effective_chi_max_seen,
            "cumulative_truncation": rec.cumulative_truncation,
            "runtime_s": round(time.perf_counter() - t0, 3),
        })
        if not quiet:
            print(f"{spec.label}: {rec.n_steps} steps, max bond {rec.effective_chi_max_seen}")

    files = {}
    path = os.path.join(cfg.outputs, "trajectory.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "observable", "re", "im"])
        first = next(iter(records.values()))
        for i, t in enumerate(first.times):
            for label, rec in records.items():
                v = rec.values["initial"][i]
                w.writerow([_fmt(t), label, _fmt(v.real), _fmt(v.imag)])
    files["trajectory"] = path

    if cfg.emit_schmidt:
        path = os.path.join(cfg.outputs, "schmidt.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "bond", "index", "lambda"])
            for t, spectra in first.schmidt_snapshots:
                for b in sorted(spectra):
                    for nu, lam in enumerate(spectra[b], start=1):
                        w.writerow([_fmt(t), b, nu, _fmt(lam)])
        files["schmidt"] = path

    if cfg.emit_stationary_reference:
        p_end = cfg.schedule.params_at(cfg.evolution.t_final)
        prof = stationary_reference(p_end)
        path = os.path.join(cfg.outputs, "stationary_reference.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["site", "sz"])
            for j, v in enumerate(prof, start=1):
                w.writerow([j, _fmt(v)])
        files["stationary_reference"] = path

    manifest = {
        "code_version": _package_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "chain": cfg.chain.as_dict(),
        "schedule": [{"t_start": t0, **p.as_dict()} for t0, p in cfg.schedule.segments],
        "evolution": {k: v for k, v in cfg.evolution.__dict__.items()
                      if k not in ("schmidt_bonds", "schmidt_eps")},
        "chi_max_override": cfg.chi_max,
        "initial_state": cfg.initial_state,
        "emit_schmidt": cfg.emit_schmidt,
        "schmidt_bonds": cfg.schmidt_bonds if cfg.emit_schmidt else [],
        "schmidt_observable": cfg.observables[0].label if cfg.emit_schmidt else None,
        "emit_stationary_reference": cfg.emit_stationary_reference,
        "observables": obs_meta,
        "warnings": caught,
        "files": {k: os.path.basename(v) for k, v in files.items()},
        "runtime_s": round(time.perf_counter() - t_start, 3),
    }
    path = os.path.join(cfg.outputs, "run_manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files["manifest"] = path
    return RunResult(EXIT_OK, files, records, manifest)


def stationary_reference(p: XYParameters) -> np.ndarray:
    try:
        return oracles.stationary_profile(p)
    except StabilityError as exc:
        raise ConfigError(f"emit_stationary_reference: {exc}") from exc


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="heisenberg-mpo",
                                 description="Heisenberg-picture MPO evolution of the boundary-driven XY chain.")
    ap.add_argument("--config", required=True, help="JSON experiment description")
    ap.add_argument("--out", help="output directory (overrides 'outputs')")
    ap.add_argument("--quiet", action="store_true", help="suppress progress output")
    ap.add_argument("--validate-only", action="store_true", help="check the config and exit")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args.out)
        if args.validate_only:
            if cfg.emit_stationary_reference:
                stationary_reference(cfg.schedule.params_at(cfg.evolution.t_final))
            if not args.quiet:
                print(f"{args.config}: ok")
            return EXIT_OK
        res = run_experiment(cfg, quiet=args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not args.quiet:
        for k, v in res.files.items():
            print(f"{k}: {v}")
    return res.status


if __name__ == "__main__":
    sys.exit(main())
