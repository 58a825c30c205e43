"""Hardy's Z function and the functions it is built from.

Three independent routes to ``Z(t)`` live here:

* ``oracle`` - a slow but error-controlled evaluation of zeta(1/2 + it)
  (Borwein's accelerated eta series for small t, Euler-Maclaurin above),
  rotated by the Riemann-Siegel theta function;
* ``riemann_siegel`` - the truncated Dirichlet sum plus up to five
  Riemann-Siegel remainder terms;
* ``afe_k1`` - the smoothed approximate functional equation with k = 1.

Everything is binary64.  Sums over ``n`` are compensated and the phase
``t*log(n)`` is formed once and handed straight to ``cos``/``sin``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import bernoulli, gammaln, loggamma

from hardyz._rs_tables import PSI_EVEN
from hardyz._summation import NeumaierAccumulator, fsum_complex, fsum_real
from hardyz.errors import DomainError, ToleranceError

TWO_PI = 2.0 * math.pi
EPS = np.finfo(float).eps

#: Heights above this are computed but carry no accuracy guarantee.
T_ACCURACY_CAP = 1e7
#: Crossover between the exact log-gamma theta and its asymptotic series.
THETA_SERIES_MIN_T = 10.0
#: Crossover between the eta-series oracle and Euler-Maclaurin.
ETA_MAX_T = 500.0
#: Largest supported number of Riemann-Siegel remainder terms (C0..C4).
RS_MAX_CORRECTIONS = 5
#: Pointwise constant in |afe_z_k1(t) - Z(t)| <= AFE_ERROR_CONSTANT * t**(-3/4).
#: The largest observed ratio on [2*pi, 1e5] is below 0.8.
AFE_ERROR_CONSTANT = 2.0


class AccuracyWarning(UserWarning):
    """Result produced outside the range covered by the accuracy claims."""


class Method(str, enum.Enum):
    ORACLE = "oracle"
    RIEMANN_SIEGEL = "riemann_siegel"
    AFE_K1 = "afe_k1"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        aliases = {"rs": cls.RIEMANN_SIEGEL, "afe": cls.AFE_K1}
        key = str(value).lower().replace("-", "_")
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown Z method {value!r}") from None


@dataclass(frozen=True)
class ZSample:
    t: float
    value: float
    method: Method
    err_est: float


@dataclass(frozen=True)
class ChiValue:
    s: complex
    value: complex

    @property
    def residual(self) -> float:
        """|chi(s) chi(1 - s) - 1|."""
        return abs(self.value * chi(1.0 - self.s) - 1.0)


# ---------------------------------------------------------------------------
# chi and theta
# ---------------------------------------------------------------------------

def _log_sin(z: np.ndarray) -> np.ndarray:
    # log sin z without overflow for large |Im z|; any branch is fine since
    # callers only exponentiate.
    out = np.empty_like(z)
    small = np.abs(z.imag) < 20.0
    up = ~small & (z.imag > 0)
    down = ~small & (z.imag < 0)
    out[small] = np.log(np.sin(z[small]))
    zu = z[up]
    out[up] = np.log(0.5j) - 1j * zu + np.log1p(-np.exp(2j * zu))
    zd = z[down]
    out[down] = np.log(-0.5j) + 1j * zd + np.log1p(-np.exp(-2j * zd))
    return out


def log_chi(s):
    """log chi(s) on some branch, stable for large |Im s|."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    bad = (s_arr.imag == 0) & (s_arr.real == np.round(s_arr.real))
    if np.any(bad):
        raise DomainError(
            f"chi(s) is a zero, pole or removable point at real integer s={s_arr[bad][0].real:g}"
        )
    out = (s_arr * math.log(2.0) + (s_arr - 1.0) * math.log(math.pi)
           + _log_sin(0.5 * math.pi * s_arr) + loggamma(1.0 - s_arr))
    return out if np.ndim(s) else complex(out[0])


def chi(s):
    """The functional-equation factor chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s).

    Evaluated through logarithms so that |Im s| up to ~1e8 neither overflows
    nor loses the modulus.  Raises :class:`DomainError` at real integers and
    :class:`OverflowError` when |chi(s)| exceeds the binary64 range.
    """
    lc = np.atleast_1d(log_chi(s))
    if np.any(lc.real > 709.0):
        raise OverflowError(f"|chi(s)| overflows binary64 (log-modulus {lc.real.max():.1f})")
    out = np.exp(lc)
    return out if np.ndim(s) else complex(out[0])


def theta_loggamma(t):
    """Riemann-Siegel theta from its definition via the complex log-gamma."""
    t_arr = np.asarray(t, dtype=float)
    out = loggamma(0.25 + 0.5j * t_arr).imag - 0.5 * t_arr * math.log(math.pi)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _theta_series_coefficients(terms: int = 8) -> tuple[float, ...]:
    b = bernoulli(2 * terms + 2)
    return tuple((1.0 - 2.0 ** (1 - 2 * k)) * abs(b[2 * k]) / (4 * k * (2 * k - 1))
                 for k in range(1, terms + 2))


def theta_series_remainder(t: float, terms: int = 7) -> float:
    """Bound on the first omitted term of the asymptotic theta series."""
    c = _theta_series_coefficients()
    return c[terms] * t ** (-(2 * terms + 1))


def rs_theta(t, terms: int = 7):
    """Riemann-Siegel theta function.

    For ``t >= 10`` uses
    ``(t/2) log(t/2pi) - t/2 - pi/8 + sum_k c_k t^(1-2k)`` with ``terms``
    corrections (remainder below 1e-16 at t = 10); below 10 falls back to
    :func:`theta_loggamma`.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("theta(t) requires t >= 0")
    c = _theta_series_coefficients()
    big = t_arr >= THETA_SERIES_MIN_T
    out = np.empty_like(t_arr)
    tb = t_arr[big]
    if tb.size:
        acc = 0.5 * tb * (np.log(tb / TWO_PI) - 1.0) - math.pi / 8
        inv = 1.0 / tb
        inv2 = inv * inv
        corr = np.zeros_like(tb)
        for k in reversed(range(terms)):
            corr = corr * inv2 + c[k]
        out[big] = acc + corr * inv
    if np.any(~big):
        out[~big] = theta_loggamma(t_arr[~big])
    return float(out) if out.ndim == 0 else out


def rs_theta_prime(t):
    """theta'(t) = log(t/2pi)/2 + O(t^-2); used to size quadrature panels."""
    t_arr = np.asarray(t, dtype=float)
    return 0.5 * np.log(np.maximum(t_arr, 1e-300) / TWO_PI)


# ---------------------------------------------------------------------------
# zeta on the critical line: the oracle
# ---------------------------------------------------------------------------

def precision_floor(t: float, terms: int) -> float:
    """Smallest absolute error binary64 can promise for an n-sum of ``terms`` terms at height t."""
    return 4.0 * EPS * (1.0 + t * math.log(max(terms, 2)))


def _dirichlet_head(t: float, n_stop: int, chunk: int = 1 << 20) -> complex:
    """sum_{1 <= n < n_stop} n^(-1/2 - it), exactly rounded per chunk."""
    parts = []
    for lo in range(1, n_stop, chunk):
        n = np.arange(lo, min(lo + chunk, n_stop), dtype=float)
        ph = t * np.log(n)
        amp = 1.0 / np.sqrt(n)
        parts.append(complex(fsum_real(amp * np.cos(ph)), -fsum_real(amp * np.sin(ph))))
    return fsum_complex(parts) if parts else 0j


def _zeta_eta(t: float, tol: float) -> tuple[complex, float, int]:
    s = complex(0.5, t)
    denom = 1.0 - np.exp((1.0 - s) * math.log(2.0))
    rate = math.log(3.0 + math.sqrt(8.0))
    n = math.ceil((math.log(30.0 * (1.0 + 2.0 * t) / (tol * abs(denom))) + 0.5 * math.pi * t) / rate)
    n = max(n, 10)
    i = np.arange(n + 1, dtype=float)
    log_e = gammaln(n + i) + i * math.log(4.0) - gammaln(n - i + 1.0) - gammaln(2.0 * i + 1.0)
    e = np.exp(log_e - log_e.max())
    # tail[k] = sum_{i > k} e_i, formed from the small end to avoid cancellation
    tail = np.cumsum(e[::-1])[::-1][1:]
    w = tail / e.sum()
    k = np.arange(n, dtype=float)
    ph = t * np.log(k + 1.0)
    amp = w * (1.0 - 2.0 * (k % 2)) / np.sqrt(k + 1.0)
    eta = complex(fsum_real(amp * np.cos(ph)), -fsum_real(amp * np.sin(ph)))
    bound = math.exp(math.log(3.0 * (1.0 + 2.0 * t)) + 0.5 * math.pi * t - n * rate) / abs(denom)
    return eta / denom, bound, n


def _zeta_euler_maclaurin(t: float, tol: float) -> tuple[complex, float, int]:
    s = complex(0.5, t)
    N = math.ceil(10.0 + t / 2.0)
    head = _dirichlet_head(t, N)
    logN = math.log(N)
    n_pow = np.exp(-s * logN)  # N^(-s)
    tail_terms = [N * n_pow / (s - 1.0), 0.5 * n_pow]
    b = bernoulli(64)
    poch = s
    err = math.inf
    for k in range(1, 31):
        term = b[2 * k] / math.factorial(2 * k) * poch * n_pow * N ** (1 - 2 * k)
        nxt = (b[2 * k + 2] / math.factorial(2 * k + 2) * poch * (s + 2 * k - 1) * (s + 2 * k)
               * n_pow * N ** (-1 - 2 * k))
        tail_terms.append(term)
        err = abs(nxt) * abs(s + 2 * k + 1) / (0.5 + 2 * k + 1)
        if err < 0.1 * tol:
            break
        poch *= (s + 2 * k - 1) * (s + 2 * k)
    return head + fsum_complex(tail_terms), err, N


def zeta_critical_oracle(t: float, tol: float = 1e-10) -> complex:
    """zeta(1/2 + it) with absolute error at most ``tol``.

    Slow on purpose: the cost is linear in ``t``.  ``t <= 500`` uses the
    Borwein-accelerated alternating series, larger ``t`` Euler-Maclaurin
    with ``ceil(10 + t/2)`` head terms.
    """
    t = float(t)
    if not 0.0 <= t <= T_ACCURACY_CAP:
        raise DomainError(f"oracle requires 0 <= t <= {T_ACCURACY_CAP:g}, got {t}")
    if tol < 1e-12:
        raise ToleranceError(f"tol={tol:g} is below the supported minimum 1e-12")
    terms = ETA_MAX_T if t <= ETA_MAX_T else 10.0 + t / 2.0
    floor = precision_floor(t, int(terms))
    if tol < floor:
        raise ToleranceError(f"tol={tol:g} unachievable at t={t:g}; binary64 floor is {floor:.2g}")
    if t <= ETA_MAX_T:
        value, err, _ = _zeta_eta(t, tol)
    else:
        value, err, _ = _zeta_euler_maclaurin(t, tol)
    if err > tol:
        raise ToleranceError(f"truncation bound {err:.2g} exceeds tol={tol:g} at t={t:g}")
    return value


def default_oracle_tol(t: float) -> float:
    terms = ETA_MAX_T if t <= ETA_MAX_T else 10.0 + t / 2.0
    return max(1e-12, 2.0 * precision_floor(t, int(terms)))


# ---------------------------------------------------------------------------
# Riemann-Siegel
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _psi_derivative_polys(max_order: int = 12) -> tuple[np.ndarray, ...]:
    base = np.zeros(2 * len(PSI_EVEN))
    base[0::2] = PSI_EVEN
    return tuple(P.polyder(base, m) if m else base for m in range(max_order + 1))


def rs_remainder_coefficients(p, count: int) -> list[np.ndarray]:
    """C_0(p) .. C_{count-1}(p) of the Riemann-Siegel remainder, 0 <= p < 1."""
    x = np.asarray(p, dtype=float) - 0.5
    polys = _psi_derivative_polys()
    d = [P.polyval(x, c) for c in polys]
    pi2 = math.pi ** 2
    forms = (
        lambda: d[0],
        lambda: -d[3] / (96 * pi2),
        lambda: d[2] / (64 * pi2) + d[6] / (18432 * pi2 ** 2),
        lambda: -d[1] / (64 * pi2) - d[5] / (3840 * pi2 ** 2) - d[9] / (5308416 * pi2 ** 3),
        lambda: (d[0] / (128 * pi2) + 19 * d[4] / (24576 * pi2 ** 2)
                 + 11 * d[8] / (5898240 * pi2 ** 3) + d[12] / (2038431744 * pi2 ** 4)),
    )
    return [forms[k]() for k in range(count)]


# |R_K(t)| <= D_K (t/2pi)^(-(2K+1)/4).  K = 0 is the bare sum, whose error is
# the C0 term itself (|C0| <= cos(pi/8)); K >= 1 are Gabcke's bounds for t >= 200.
_RS_BOUND = (1.1, 0.127, 0.053, 0.011, 0.031, 0.017)
# Inflation applied to the Gabcke constants below t = 200, where they are
# not proven; measured ratios stay below 3 on [2*pi, 200].
_RS_SMALL_T_FACTOR = 10.0


def rs_error_bound(t, num_corrections: int):
    t_arr = np.asarray(t, dtype=float)
    bound = _RS_BOUND[num_corrections] * (t_arr / TWO_PI) ** (-(2 * num_corrections + 1) / 4)
    if num_corrections:
        bound = np.where(t_arr < 200.0, _RS_SMALL_T_FACTOR * bound, bound)
    # rounding of theta(t) - t log n
    bound = bound + 4.0 * EPS * t_arr * np.log(np.maximum(t_arr, 2.0))
    return float(bound) if bound.ndim == 0 else bound


def rs_z_values(t, num_corrections: int = RS_MAX_CORRECTIONS) -> np.ndarray:
    """Vectorised Riemann-Siegel evaluation of Z on an array of heights t >= 2*pi."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if not 0 <= num_corrections <= RS_MAX_CORRECTIONS:
        raise DomainError(f"num_corrections must lie in [0, {RS_MAX_CORRECTIONS}]")
    if np.any(t_arr < TWO_PI):
        raise DomainError("Riemann-Siegel evaluation requires t >= 2*pi")
    a = np.sqrt(t_arr / TWO_PI)
    N = np.floor(a)
    th = rs_theta(t_arr)
    acc = NeumaierAccumulator(t_arr.shape)
    for n in range(1, int(N.max()) + 1):
        live = N >= n
        term = np.cos(th - t_arr * math.log(n)) / math.sqrt(n)
        acc.add(np.where(live, term, 0.0))
    total = 2.0 * acc.result()
    if num_corrections:
        p = a - N
        coeffs = rs_remainder_coefficients(p, num_corrections)
        inv_a = 1.0 / a
        rem = np.zeros_like(t_arr)
        for c in reversed(coeffs):
            rem = rem * inv_a + c
        sign = np.where(N % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
        total = total + sign * a ** -0.5 * rem
    return total


def riemann_siegel_z(t: float, num_corrections: int = 1) -> ZSample:
    """Z(t) from the Riemann-Siegel formula.

    ``num_corrections = 0`` is the bare truncated sum (error of order
    t^(-1/4)); each further unit adds the next remainder term C_0, C_1, ...
    and gains another factor t^(-1/2).
    """
    t = float(t)
    value = float(rs_z_values(t, num_corrections)[0])
    _flag_cap(t)
    return ZSample(t, value, Method.RIEMANN_SIEGEL, rs_error_bound(t, num_corrections))


# ---------------------------------------------------------------------------
# smoothed approximate functional equation, k = 1
# ---------------------------------------------------------------------------

def afe_error_bound(t):
    return AFE_ERROR_CONSTANT * np.asarray(t, dtype=float) ** -0.75


def afe_terms(t: float, kernel=None) -> tuple[np.ndarray, np.ndarray]:
    """Indices n <= 2*tau and summands 2*rho(n/tau) n^(-1/2) cos(t log(tau/n) - t/2 - pi/8)."""
    from hardyz.smoothing import make_kernel

    kernel = kernel or make_kernel()
    tau = math.sqrt(t / TWO_PI)
    n = np.arange(1, math.floor(2.0 * tau) + 1, dtype=float)
    weight = kernel(n / tau)
    ph = 0.5 * t * np.log(t / (TWO_PI * n * n)) - 0.5 * t - math.pi / 8
    return n, 2.0 * weight * np.cos(ph) / np.sqrt(n)


def afe_z_k1(t: float, kernel=None) -> ZSample:
    """Z(t) from the smoothed approximate functional equation with k = 1."""
    t = float(t)
    if t < TWO_PI:
        raise DomainError("afe_z_k1 requires t >= 2*pi")
    _, terms = afe_terms(t, kernel)
    _flag_cap(t)
    return ZSample(t, fsum_real(terms), Method.AFE_K1, float(afe_error_bound(t)))


# ---------------------------------------------------------------------------
# Z
# ---------------------------------------------------------------------------

def _flag_cap(t: float) -> None:
    if t > T_ACCURACY_CAP:
        warnings.warn(f"t={t:g} exceeds the accuracy cap {T_ACCURACY_CAP:g}", AccuracyWarning,
                      stacklevel=3)


def hardy_z(t: float, method="oracle", *, kernel=None, tol: float | None = None,
            num_corrections: int = RS_MAX_CORRECTIONS) -> ZSample:
    """Hardy's function Z(t) = exp(i theta(t)) zeta(1/2 + it) by the chosen route."""
    method = Method.parse(method)
    t = float(t)
    if t < 0:
        raise DomainError("Z(t) is evaluated for t >= 0")
    if method is Method.RIEMANN_SIEGEL:
        return riemann_siegel_z(t, num_corrections)
    if method is Method.AFE_K1:
        return afe_z_k1(t, kernel)
    tol = default_oracle_tol(t) if tol is None else tol
    zeta = zeta_critical_oracle(t, tol)
    rotated = np.exp(1j * rs_theta(t)) * zeta
    theta_err = 1e-15 * max(1.0, t * math.log(t + 2.0))
    err = tol + abs(zeta) * theta_err
    if abs(rotated.imag) > 10.0 * err + 1e-12:
        raise RuntimeError(f"exp(i theta) zeta(1/2+it) not real at t={t}: imag={rotated.imag:.3g}")
    return ZSample(t, float(rotated.real), Method.ORACLE, err)


def z_oracle_values(t) -> np.ndarray:
    """Oracle Z on an array of heights (scalar loop; meant for short ranges)."""
    return np.array([hardy_z(x, Method.ORACLE).value for x in np.atleast_1d(t)])
