"""Physical parameters of the boundary-driven XY chain and piecewise-constant schedules."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field


@dataclass(frozen=True)
class XYParameters:
    """Couplings of an open XY chain with boundary pumping.

    ``H = sum_j J[(1+gamma)/2 X_j X_{j+1} + (1-gamma)/2 Y_j Y_{j+1}] + B sum_j Z_j``
    on an open chain, with Lindblad operators ``sqrt(gamma_L_plus) s+_1``,
    ``sqrt(gamma_L_minus) s-_1``, ``sqrt(gamma_R_plus) s+_N`` and
    ``sqrt(gamma_R_minus) s-_N``.
    """

    n_sites: int
    J: float = 1.0
    gamma: float = 0.0
    B: float = 0.0
    gamma_L_plus: float = 0.0
    gamma_L_minus: float = 0.0
    gamma_R_plus: float = 0.0
    gamma_R_minus: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        for name in ("gamma_L_plus", "gamma_L_minus", "gamma_R_plus", "gamma_R_minus"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def is_closed(self) -> bool:
        return not any(self.rates("left") + self.rates("right"))

    def rates(self, side: str) -> tuple[float, float]:
        """Return ``(rate_plus, rate_minus)`` for ``side`` in {"left", "right"}."""
        if side == "left":
            return self.gamma_L_plus, self.gamma_L_minus
        if side == "right":
            return self.gamma_R_plus, self.gamma_R_minus
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def replace(self, **changes) -> XYParameters:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ParameterSchedule:
    """Piecewise-constant parameters: ``segments[i] = (t_start, params)``."""

    segments: tuple[tuple[float, XYParameters], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        segs = tuple((float(t), p) for t, p in self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        if segs[0][0] != 0.0:
            raise ValueError("first segment must start at t = 0")
        for (t0, p0), (t1, p1) in zip(segs, segs[1:]):
            if t1 <= t0:
                raise ValueError("segment start times must be strictly increasing")
            if p1.n_sites != p0.n_sites:
                raise ValueError("all segments must share n_sites")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, params: XYParameters) -> ParameterSchedule:
        return cls(((0.0, params),))

    @property
    def n_sites(self) -> int:
        return self.segments[0][1].n_sites

    def params_at(self, t: float) -> XYParameters:
        current = self.segments[0][1]
        for t_start, p in self.segments:
            if t_start <= t:
                current = p
        return current

    def boundaries(self, t_final: float) -> list[tuple[float, float, XYParameters]]:
        """Split ``[0, t_final]`` into ``(t_begin, t_end, params)`` pieces."""
        out = []
        for i, (t_start, p) in enumerate(self.segments):
            t_end = self.segments[i + 1][0] if i + 1 < len(self.segments) else t_final
            t_end = min(t_end, t_final)
            if t_end > t_start:
                out.append((t_start, t_end, p))
        return out
