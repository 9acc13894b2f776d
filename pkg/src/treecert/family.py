"""The cross family: two lists of N real vectors with <mu_i|nu_j> = 1 - [i == j]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class CrossFamily:
    """Vectors ``mu_i``, ``nu_i`` in R^N with cross inner products ``1 - delta_ij``.

    Every vector has squared norm ``2(N-1)/N``.  For ``N = 1`` both vectors are
    zero, which keeps constraints of the form ``0 = 1 - 1`` satisfied.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"family size must be positive, got {self.N}")

    @property
    def theta(self) -> float:
        if self.N == 1:
            return 0.0
        # clamp tiny negative roundoff at N=2, where the exact value is 0
        return math.sqrt(max(0.0, 0.5 - math.sqrt(self.N - 1) / self.N))

    @property
    def scale(self) -> float:
        return math.sqrt(2 * (self.N - 1) / self.N)

    def norm_sq(self) -> float:
        return 2 * (self.N - 1) / self.N

    def _check(self, i: int) -> None:
        if not 0 <= i < self.N:
            raise IndexError(f"index {i} outside [0, {self.N})")

    def _coefficients(self) -> tuple[float, float, float, float]:
        """(mu diagonal, mu off-diagonal, nu diagonal, nu off-diagonal)."""
        N, c, t = self.N, self.scale, self.theta
        if N == 1:
            return 0.0, 0.0, 0.0, 0.0
        s = math.sqrt(1 - t * t)
        r = math.sqrt(N - 1)
        return -t * c, c * s / r, c * s, c * t / r

    def mu(self, i: int) -> np.ndarray:
        self._check(i)
        d, o, _, _ = self._coefficients()
        v = np.full(self.N, o)
        v[i] = d
        return v

    def nu(self, i: int) -> np.ndarray:
        self._check(i)
        _, _, d, o = self._coefficients()
        v = np.full(self.N, o)
        v[i] = d
        return v

    def mu_matrix(self) -> np.ndarray:
        """Rows are ``mu_0 .. mu_{N-1}``."""
        d, o, _, _ = self._coefficients()
        return np.full((self.N, self.N), o) + np.eye(self.N) * (d - o)

    def nu_matrix(self) -> np.ndarray:
        _, _, d, o = self._coefficients()
        return np.full((self.N, self.N), o) + np.eye(self.N) * (d - o)

    def cross_inner(self, i: int, j: int) -> float:
        self._check(i)
        self._check(j)
        if self.N == 1:
            return 0.0
        return 0.0 if i == j else 1.0


@lru_cache(maxsize=None)
def cross_family(N: int) -> CrossFamily:
    return CrossFamily(N)
