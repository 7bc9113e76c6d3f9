"""Shared configuration dataclasses: tolerances and sampling regions."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used by the checks.

    alg         algebraic identities (no differentiation involved)
    diff        identities involving one differentiation of derived fields
    angle       slant-angle constancy and classification threshold (radians)
    angle_guard proper-slant gate: the angle must be at least this far from
                0 and pi/2 before secant/cosecant frames are built
    pd          smallest metric eigenvalue accepted as positive definite
    rank        relative singular-value cutoff separating kernel from range
    cond_max    metric condition number beyond which inversion is refused
    """

    alg: float = 1e-9
    diff: float = 1e-7
    angle: float = 1e-6
    angle_guard: float = 1e-4
    pd: float = 1e-10
    rank: float = 1e-8
    cond_max: float = 1e12

    def with_overrides(self, **kwargs) -> "Tolerances":
        clean = {k: float(v) for k, v in kwargs.items() if v is not None}
        return replace(self, **clean) if clean else self


@dataclass(frozen=True)
class Region:
    """Axis-aligned box in chart coordinates."""

    lows: tuple
    highs: tuple

    def __post_init__(self):
        if len(self.lows) != len(self.highs):
            raise ValueError("region bounds have mismatched lengths")
        for lo, hi in zip(self.lows, self.highs):
            if not (lo < hi):
                raise ValueError(f"empty region interval [{lo}, {hi}]")

    @classmethod
    def from_bounds(cls, lows, highs) -> "Region":
        return cls(tuple(float(x) for x in lows), tuple(float(x) for x in highs))

    @property
    def dim(self) -> int:
        return len(self.lows)

    def contains(self, p) -> bool:
        return all(lo <= x <= hi for x, lo, hi in
                   zip(p, self.lows, self.highs))

    def rescale(self, unit: np.ndarray) -> np.ndarray:
        lows = np.asarray(self.lows)
        highs = np.asarray(self.highs)
        return lows + unit * (highs - lows)
