"""Shared floating point tolerance policy"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Absolute floor plus a relative factor scaled by the magnitudes involved

    Attributes:
        absolute: Floor added to every comparison
        relative: Factor applied to the largest finite magnitude in play
        root_slack: Relative distance a computed root may stray outside its
            piece before it is reported instead of clamped
    """
    absolute: float = 1e-12
    relative: float = 1e-9
    root_slack: float = 1e-6

    def slack(self, *magnitudes: float) -> float:
        """Allowed error for quantities of the given magnitudes"""
        scale = 0.0
        for m in magnitudes:
            if math.isfinite(m):
                scale = max(scale, abs(m))
        return self.absolute + self.relative * scale

    def close(self, u: float, v: float, *scales: float) -> bool:
        """True when u and v agree (infinities must match exactly)"""
        if u == v:
            return True
        if not (math.isfinite(u) and math.isfinite(v)):
            return False
        return abs(u - v) <= self.slack(u, v, *scales)

    def leq(self, u: float, v: float, *scales: float) -> bool:
        """u <= v up to the slack"""
        if u <= v:
            return True
        if not (math.isfinite(u) and math.isfinite(v)):
            return False
        return u - v <= self.slack(u, v, *scales)


DEFAULT_TOLERANCE = Tolerance()
