"""The phase F(t) = t log(tau/n) - t/2 - pi/8 with tau = sqrt(t/2pi), and the
five-way split of the frequency index n used to organise the integral of Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hardyz.errors import WindowCollisionError

TWO_PI = 2.0 * math.pi


def tau(t):
    return np.sqrt(np.asarray(t, dtype=float) / TWO_PI)


@dataclass(frozen=True)
class PhaseFunction:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"frequency index must be a positive integer, got {self.n}")

    @property
    def saddle(self) -> float:
        return TWO_PI * self.n * self.n

    def __call__(self, t):
        return f(self, t)

    def derivative(self, t, k: int):
        return f_k(self, t, k)


def _check_t(t) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("the phase is defined for t > 0")
    return t_arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def f(phase: PhaseFunction, t):
    t = _check_t(t)
    # t log(tau/n) = (t/2) log(t / c_n); exact zero at the saddle
    return _out(0.5 * t * np.log(t / phase.saddle) - 0.5 * t - math.pi / 8)


def f_prime(phase: PhaseFunction, t):
    t = _check_t(t)
    return _out(0.5 * np.log(t / phase.saddle))


def f_second(phase: PhaseFunction, t):
    t = _check_t(t)
    return _out(0.5 / t)


def f_k(phase: PhaseFunction, t, k: int):
    """k-th derivative; for k >= 2 the closed form (-1)^k (k-2)! t^(1-k) / 2."""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k == 0:
        return f(phase, t)
    if k == 1:
        return f_prime(phase, t)
    t = _check_t(t)
    return _out((-1) ** k * math.factorial(k - 2) * t ** (1 - k) / 2)


def saddle(phase: PhaseFunction) -> float:
    """The unique stationary point c_n = 2 pi n^2 of F on (0, inf)."""
    return phase.saddle


@dataclass(frozen=True)
class RangeSplit:
    """Partition of 1 <= n <= 2 sqrt(T/pi) into the five summation ranges.

    ``ranges[j]`` holds the integers n with ``edges[j] < n <= edges[j + 1]``
    where ``edges = (0, *boundaries, 2 sqrt(T/pi))``.
    """

    T: float
    epsilon: float
    boundaries: tuple[float, float, float, float]
    ranges: tuple[range, range, range, range, range] = field(repr=False)

    @property
    def n_max(self) -> int:
        return self.ranges[-1].stop - 1

    def range_index(self, n: int) -> int:
        """1-based index of the range containing n."""
        for j, r in enumerate(self.ranges, start=1):
            if n in r:
                return j
        raise ValueError(f"n={n} lies outside (0, 2 sqrt(T/pi)]")

    def t1(self, n) -> float:
        """Lower integration limit max(T, 2 pi (n/2)^2): where n <= 2 tau(t) starts to hold."""
        return max(self.T, TWO_PI * (n / 2.0) ** 2)


def split_ranges(T: float, epsilon: float = 0.1) -> RangeSplit:
    if T < 100:
        raise ValueError(f"split_ranges requires T >= 100, got {T}")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    w = T ** epsilon
    lo = math.sqrt(T / TWO_PI)
    hi = math.sqrt(T / math.pi)
    if not w < (hi - lo) / 2:
        raise WindowCollisionError(
            f"T^eps = {w:.4g} must be below (sqrt(T/pi) - sqrt(T/2pi))/2 = {(hi - lo) / 2:.4g}"
        )
    bounds = (lo - w, lo + w, hi - w, hi + w)
    edges = (0.0, *bounds, 2.0 * hi)
    ints = [math.floor(e) for e in edges]
    ranges = tuple(range(ints[j] + 1, ints[j + 1] + 1) for j in range(5))
    return RangeSplit(float(T), float(epsilon), bounds, ranges)
