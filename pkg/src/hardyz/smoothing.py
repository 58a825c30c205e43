"""The smoothing kernel rho of the approximate functional equation.

rho is built in the logarithmic coordinate y = log x:

    rho(e^y) = 1 - S((y + log b) / (2 log b)),   |y| <= log b,

with the symmetric step S(u) = s(u) / (s(u) + s(1 - u)), s(u) = exp(-1/u).
Because S(u) + S(1 - u) = 1 and y -> -y maps u -> 1 - u, the partition
identity rho(x) + rho(1/x) = 1 holds by construction.  Collapsing the
algebra gives the closed form used below,

    rho(e^y) = expit(-4 L y / (L^2 - y^2)),   L = log b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from hardyz import _jets

# Beyond this |h| the logistic factor and all its derivatives are below 1e-300.
_SATURATION = 700.0


@dataclass(frozen=True)
class SmoothingKernel:
    b: float = 2.0
    max_derivative_order: int = 4

    def __post_init__(self):
        if not 1.0 < self.b <= 2.0:
            raise ValueError(f"kernel plateau parameter b must lie in (1, 2], got {self.b}")
        if self.max_derivative_order < 1:
            raise ValueError("max_derivative_order must be at least 1")

    @property
    def log_b(self) -> float:
        return math.log(self.b)

    def profile(self, u):
        """The smooth step S on [0, 1]."""
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            h = 1.0 / (1.0 - u) - 1.0 / u
        return expit(h)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 1.0 / self.b, 1.0, 0.0)
        mid = (x > 1.0 / self.b) & (x < self.b)
        if np.any(mid):
            y = np.log(x[mid])
            L = self.log_b
            out[mid] = expit(-4.0 * L * y / (L * L - y * y))
        return float(out) if out.ndim == 0 else out

    def jet(self, x_jet: np.ndarray) -> np.ndarray:
        """Taylor jet of rho(x(.)) given the jet of the inner function x(.)."""
        L = self.log_b
        x0 = x_jet[0]
        out = np.zeros_like(x_jet)
        out[0] = np.where(x0 <= 1.0 / self.b, 1.0, 0.0)
        mid = (x0 > 1.0 / self.b) & (x0 < self.b)
        if not np.any(mid):
            return out
        xm = x_jet[:, mid]
        y = _jets.log(xm)
        den = -_jets.mul(y, y)
        den[0] += L * L
        h = -4.0 * L * _jets.mul(y, _jets.reciprocal(den))
        live = np.abs(h[0]) < _SATURATION
        pos = h[0] > 0
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            # expit(h) = 1/(1 + e^-h) for h > 0 and e^h/(1 + e^h) otherwise,
            # so the exponential never exceeds 1
            e = _jets.exp(np.where(pos, -h, h))
            d = e.copy()
            d[0] += 1.0
            inv = _jets.reciprocal(d)
            r = np.where(pos, inv, _jets.mul(e, inv))
        r[:, ~live] = 0.0
        r[0, ~live] = np.where(h[0, ~live] > 0, 1.0, 0.0)
        out[:, mid] = r
        return out


def make_kernel(b: float = 2.0, max_derivative_order: int = 4) -> SmoothingKernel:
    """Kernel with plateau rho = 1 on [0, 1/b] and rho = 0 on [b, inf)."""
    return SmoothingKernel(float(b), int(max_derivative_order))


def rho(kernel: SmoothingKernel, x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("rho is defined for x >= 0")
    return kernel(x_arr)


def rho_deriv(kernel: SmoothingKernel, x, order: int):
    """d^order rho / dx^order; exactly zero on the plateau and the tail."""
    if not 1 <= order <= kernel.max_derivative_order:
        raise ValueError(f"order must lie in [1, {kernel.max_derivative_order}], got {order}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    d = _jets.derivatives(kernel.jet(_jets.variable(x_arr, order)))[order]
    return float(d[0]) if np.ndim(x) == 0 else d


def rho_of_t_derivs(kernel: SmoothingKernel, n: int, t, order: int) -> np.ndarray:
    """Derivatives 0..order of t -> rho(n / sqrt(t / 2pi)).

    Each derivative in t is smaller than the previous one by a factor of
    order t, which is what licenses truncating a Taylor development of the
    weight around a saddle point.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    x = n * math.sqrt(2.0 * math.pi) * _jets.power(_jets.variable(t_arr, order), -0.5)
    return _jets.derivatives(kernel.jet(x))
