"""Physical constants (hbar, c, m0) for the numeric layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysParams:
    hbar: float = 1.0
    c: float = 1.0
    m0: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.c > 0 and self.m0 > 0):
            raise ValueError("hbar, c and m0 must all be strictly positive")

    @staticmethod
    def natural() -> "PhysParams":
        return PhysParams(1.0, 1.0, 1.0)

    def energy(self, p):
        """Relativistic dispersion E_p = +sqrt(p^2 c^2 + m0^2 c^4)."""
        return np.sqrt((np.asarray(p) * self.c) ** 2 + (self.m0 * self.c**2) ** 2)

    def label(self) -> str:
        return f"hbar={self.hbar:.17g} c={self.c:.17g} m0={self.m0:.17g}"
