"""The integral of Hardy's function.

Two independent routes to int_T^{2T} Z(t) dt:

* :func:`integrate_z_direct` integrates Z itself (oracle below t = 200,
  Riemann-Siegel above) with phase-aware Gauss-Legendre panels;
* :func:`integrate_z_afe` integrates the smoothed k = 1 sum term by term,
  sum_n n^(-1/2) Re int_{T1(n)}^{2T} rho(n/tau) e^{iF_n(t)} dt, and sorts
  the n-integrals into the five ranges of :func:`hardyz.phase.split_ranges`,
  checking each against the derivative test or saddle-point lemma that
  governs it.

:func:`primitive_scan` accumulates int_0^T Z on a geometric grid to probe the
T^(1/4) growth of the primitive from both sides.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from hardyz._summation import fsum_real
from hardyz.errors import DomainError, InsufficientDataError
from hardyz.oscillatory import (
    DEFAULT_MAX_EVALS,
    IntegralEstimate,
    SaddleEvaluation,
    first_derivative_bound,
    oscillatory_quadrature,
    panel_quadrature,
    saddle_point_eval,
    second_derivative_bound,
)
from hardyz.phase import PhaseFunction, f, f_k, f_prime, split_ranges
from hardyz.smoothing import SmoothingKernel, make_kernel
from hardyz.special_fns import (
    AFE_ERROR_CONSTANT,
    RS_MAX_CORRECTIONS,
    T_ACCURACY_CAP,
    rs_error_bound,
    rs_theta_prime,
    rs_z_values,
    z_oracle_values,
)

TWO_PI = 2.0 * math.pi
DEFAULT_EPSILON = 0.1
#: Below this height Z is integrated from the oracle instead of Riemann-Siegel.
RS_SWITCH_T = 200.0
#: Default direct-integration tolerance per unit length.
DIRECT_TOL_DENSITY = 1e-6
#: Default tolerance per unit length for each n-integral of the smoothed sum.
AFE_TOL_DENSITY = 1e-10
#: Half-width T^(1-eps) ("wide") or T^eps ("narrow") for the saddle window J(T, n).
WINDOW_MODES = ("wide", "narrow")


@dataclass(frozen=True)
class TermCheck:
    """One n-integral compared with the a-priori statement that governs it."""

    n: int
    range_index: int
    kind: str  # "first", "second", "saddle"
    value: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.value <= self.bound


@dataclass
class IntegralRecord:
    T: float
    value_direct: float
    value_afe: float
    sum_contributions: tuple[float, float, float, float, float]
    afe_error_budget: float
    normalized: float
    epsilon: float = DEFAULT_EPSILON
    checks: list[TermCheck] = field(default_factory=list, repr=False, compare=False)
    saddle_main_total: float = math.nan

    @property
    def discrepancy(self) -> float:
        return abs(self.value_direct - self.value_afe)

    @property
    def within_budget(self) -> bool:
        return self.discrepancy <= self.afe_error_budget


@dataclass
class ScanResult:
    grid: list[IntegralRecord]
    sup_normalized: float
    argmax_T: float
    sign_changes: int

    @classmethod
    def from_records(cls, records: list[IntegralRecord]) -> "ScanResult":
        norm = np.array([abs(r.normalized) for r in records])
        k = int(np.argmax(norm)) if len(records) else 0
        signs = np.sign([r.value_direct for r in records])
        signs = signs[signs != 0]
        changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
        return cls(records, float(norm[k]) if len(records) else math.nan,
                   records[k].T if records else math.nan, changes)

    @classmethod
    def from_values(cls, T, values) -> "ScanResult":
        """Scan built from raw (T, int_0^T Z) pairs, e.g. synthetic test data."""
        recs = [IntegralRecord(float(t), float(v), math.nan, (math.nan,) * 5, math.nan,
                               float(v) / float(t) ** 0.25) for t, v in zip(T, values)]
        return cls.from_records(recs)


def _map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# direct integration of Z
# ---------------------------------------------------------------------------

def _rs_integrand(t):
    return rs_z_values(t, RS_MAX_CORRECTIONS)


def _rs_rate(t):
    return np.abs(rs_theta_prime(t)) + 0.5


def _oracle_rate(t):
    return 0.5 * np.abs(np.log(np.maximum(t, 1.0) / TWO_PI)) + 2.0


def integrate_z_direct(T1: float, T2: float, tol: float | None = None, *, full_output: bool = False,
                       max_evals: int = DEFAULT_MAX_EVALS):
    """int_{T1}^{T2} Z(t) dt by quadrature of Z itself.

    Below t = 200 the integrand is the oracle, above it the Riemann-Siegel
    formula with all five remainder terms.  The returned error (with
    ``full_output``) adds the integrated Riemann-Siegel bound to the
    quadrature estimate.
    """
    T1, T2 = float(T1), float(T2)
    if not 0.0 <= T1 <= T2 <= T_ACCURACY_CAP:
        raise DomainError(f"need 0 <= T1 <= T2 <= {T_ACCURACY_CAP:g}, got [{T1}, {T2}]")
    length = T2 - T1
    if tol is None:
        tol = DIRECT_TOL_DENSITY * max(1.0, length)
    if length == 0:
        est = IntegralEstimate(0.0, 0.0, 0)
        return est if full_output else 0.0
    parts, err, evals = [], 0.0, 0
    split = min(max(T1, RS_SWITCH_T), T2)
    if split > T1:
        e = panel_quadrature(z_oracle_values, T1, split, tol * (split - T1) / length,
                             rate=_oracle_rate, max_evals=max_evals)
        parts.append(e.value.real)
        err += e.abs_error_est + 1e-10 * (split - T1)
        evals += e.evaluations
    if T2 > split:
        e = panel_quadrature(_rs_integrand, split, T2, tol * (T2 - split) / length,
                             rate=_rs_rate, max_evals=max_evals)
        parts.append(e.value.real)
        ends = rs_error_bound(np.array([split, T2]), RS_MAX_CORRECTIONS)
        err += e.abs_error_est + float(np.max(ends)) * (T2 - split)
        evals += e.evaluations
    value = fsum_real(parts)
    return IntegralEstimate(value, err, evals) if full_output else value


# ---------------------------------------------------------------------------
# term-by-term integration of the smoothed sum
# ---------------------------------------------------------------------------

def saddle_window(T: float, n: int, epsilon: float = DEFAULT_EPSILON,
                  window: str = "wide") -> tuple[float, float]:
    """The window J(T, n) centred on c_n = 2 pi n^2 (before clipping)."""
    if window not in WINDOW_MODES:
        raise DomainError(f"window must be one of {WINDOW_MODES}, got {window!r}")
    half = T ** (1.0 - epsilon) if window == "wide" else T ** epsilon
    c = TWO_PI * n * n
    return c - half, c + half


def _weight(kernel: SmoothingKernel, n: int):
    def phi(t):
        return kernel(n / np.sqrt(np.asarray(t, dtype=float) / TWO_PI))
    return phi


def _lemma_phase(phase: PhaseFunction):
    # f = F / 2pi with four derivatives, as the saddle lemma expects
    return [partial(lambda t, k: f_k(phase, t, k) / TWO_PI, k=k) for k in range(5)]


def n_integral(n: int, lo: float, hi: float, kernel: SmoothingKernel, tol: float | None = None,
               max_evals: int = DEFAULT_MAX_EVALS) -> IntegralEstimate:
    """int_lo^hi rho(n/tau(t)) e^{iF_n(t)} dt by the brute-force oracle."""
    if hi <= lo:
        return IntegralEstimate(0.0, 0.0, 0)
    phase = PhaseFunction(n)
    tol = AFE_TOL_DENSITY * (hi - lo) if tol is None else tol
    return oscillatory_quadrature(_weight(kernel, n), partial(f, phase), lo, hi, tol,
                                  dF=lambda t: np.abs(f_prime(phase, t)) + 1e-3, max_evals=max_evals)


def saddle_check(n: int, T: float, kernel: SmoothingKernel | None = None,
                 epsilon: float = DEFAULT_EPSILON, window: str = "wide",
                 lo: float | None = None, hi: float | None = None
                 ) -> tuple[IntegralEstimate, SaddleEvaluation, tuple[float, float]]:
    """Quadrature over J(T, n) clipped to [lo, hi] (default [T, 2T]) against the lemma with H=1, A=U=T."""
    kernel = kernel or make_kernel()
    lo = T if lo is None else lo
    hi = 2.0 * T if hi is None else hi
    j0, j1 = saddle_window(T, n, epsilon, window)
    a, b = max(j0, lo), min(j1, hi)
    if not a < TWO_PI * n * n < b and not a <= TWO_PI * n * n <= b:
        raise DomainError(f"saddle c_n = {TWO_PI * n * n:g} lies outside [{lo:g}, {hi:g}]")
    quad = n_integral(n, a, b, kernel)
    lemma = saddle_point_eval(_weight(kernel, n), _lemma_phase(PhaseFunction(n)), a, b,
                              H=1.0, A=T, U=T)
    return quad, lemma, (a, b)


def _n_term(n: int, *, T: float, hi: float, kernel: SmoothingKernel, split, window: str):
    """Integral, quadrature error and checks for one n of the smoothed sum over [T1(n), hi]."""
    lo = split.t1(n)
    j = split.range_index(n)
    phase = PhaseFunction(n)
    phi = _weight(kernel, n)
    checks = []
    if j != 3:
        est = n_integral(n, lo, hi, kernel)
        value, err = est.value, est.abs_error_est
        if j in (1, 5):
            slope = min(abs(f_prime(phase, lo)), abs(f_prime(phase, hi)))
            bound = first_derivative_bound(slope, float(phi(hi)))
            checks.append(TermCheck(n, j, "first", abs(value), bound))
        else:
            bound = second_derivative_bound(f_k(phase, hi, 2), float(phi(hi)), hi - lo)
            checks.append(TermCheck(n, j, "second", abs(value), bound))
        return n, j, value, err, checks, math.nan
    quad, lemma, (a, b) = saddle_check(n, T, kernel, split.epsilon, window, lo, hi)
    checks.append(TermCheck(n, j, "saddle", abs(quad.value - lemma.main_term), lemma.budget))
    value, err = quad.value, quad.abs_error_est
    for k0, k1, edge in ((lo, a, a), (b, hi, b)):
        if k1 > k0:
            est = n_integral(n, k0, k1, kernel)
            value += est.value
            err += est.abs_error_est
            bound = first_derivative_bound(abs(f_prime(phase, edge)), float(phi(hi)))
            checks.append(TermCheck(n, j, "first", abs(est.value), bound))
    return n, j, value, err, checks, lemma.main_term.real / math.sqrt(n)


def afe_error_budget_integral(T1: float, T2: float) -> float:
    """int_{T1}^{T2} AFE_ERROR_CONSTANT t^(-3/4) dt."""
    return AFE_ERROR_CONSTANT * 4.0 * (T2 ** 0.25 - T1 ** 0.25)


def integrate_z_afe(T: float, kernel: SmoothingKernel | None = None, epsilon: float = DEFAULT_EPSILON,
                    *, window: str = "wide", with_direct: bool = True, workers: int = 1
                    ) -> IntegralRecord:
    """int_T^{2T} of the smoothed k = 1 sum, decomposed over the five n-ranges.

    Ranges 1 and 5 are checked against the first derivative test, ranges 2
    and 4 against the second derivative test, and range 3 is split into the
    saddle window J(T, n) (checked against the saddle lemma) and its
    complement K(T, n) (first derivative test).
    """
    kernel = kernel or make_kernel()
    split = split_ranges(T, epsilon)
    job = partial(_n_term, T=T, hi=2.0 * T, kernel=kernel, split=split, window=window)
    results = _map(job, range(1, split.n_max + 1), workers)
    parts = [[] for _ in range(5)]
    errs, checks, mains = [], [], []
    for n, j, value, err, chk, main in results:
        parts[j - 1].append(value.real / math.sqrt(n))
        errs.append(err / math.sqrt(n))
        checks.extend(chk)
        if j == 3:
            mains.append(main)
    sums = tuple(fsum_real(p) for p in parts)
    value_afe = 2.0 * fsum_real(sums)
    budget = afe_error_budget_integral(T, 2.0 * T) + 2.0 * fsum_real(errs)
    value_direct = math.nan
    if with_direct:
        d = integrate_z_direct(T, 2.0 * T, full_output=True)
        value_direct = d.value
        budget += d.abs_error_est
    return IntegralRecord(float(T), value_direct, value_afe, sums, budget,
                          value_direct / T ** 0.25, epsilon, checks,
                          fsum_real(mains) if mains else 0.0)


# ---------------------------------------------------------------------------
# the main term and its cancellation
# ---------------------------------------------------------------------------

def alternating_sqrt_sum(K1: int, K2: int) -> float:
    """sum_{K1 < n <= K2} (-1)^n sqrt(n), exactly rounded."""
    K1, K2 = int(K1), int(K2)
    if not 0 <= K1 < K2:
        raise DomainError(f"need 0 <= K1 < K2, got {K1}, {K2}")
    n = np.arange(K1 + 1, K2 + 1, dtype=np.int64)
    terms = np.sqrt(n.astype(float))
    terms[n % 2 == 1] *= -1.0
    return fsum_real(terms)


def sum3_main_term(T: float, epsilon: float = DEFAULT_EPSILON, weight: float = 1.0) -> float:
    """sqrt(8) pi cos(pi/8) sum_{n in range 3} (-1)^n sqrt(n), times ``weight``.

    ``weight`` is the value of the smoothing weight at the saddle; the
    closed form is stated with weight 1, while the kernel built here has
    rho(1) = 1/2.
    """
    r3 = split_ranges(T, epsilon).ranges[2]
    if not len(r3):
        raise DomainError(f"range 3 is empty at T={T:g}, epsilon={epsilon:g}")
    n = np.arange(r3.start, r3.stop, dtype=np.int64)
    # exp(-i pi n^2) = (-1)^(n^2) = (-1)^n
    assert np.all((n * n) % 2 == n % 2)
    return weight * math.sqrt(8.0) * math.pi * math.cos(math.pi / 8) * alternating_sqrt_sum(r3.start - 1, r3.stop - 1)


def sum24_bound(T: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """Second-derivative-test bound for the n-integrals of ranges 2 and 4, summed with weights n^(-1/2)."""
    split = split_ranges(T, epsilon)
    total = []
    for r in (split.ranges[1], split.ranges[3]):
        for n in r:
            lo = split.t1(n)
            total.append(second_derivative_bound(0.25 / T, 1.0, 2.0 * T - lo) / math.sqrt(n))
    return fsum_real(total)


# ---------------------------------------------------------------------------
# the primitive int_0^T Z
# ---------------------------------------------------------------------------

def _direct_segment(bounds):
    a, b = bounds
    return integrate_z_direct(a, b, full_output=True)


def _afe_segment(bounds, kernel: SmoothingKernel):
    """2 sum_n n^(-1/2) Re int_a^b rho(n/tau) e^{iF_n} over the n active somewhere in [a, b]."""
    a, b = bounds
    n_top = math.floor(2.0 * math.sqrt(b / TWO_PI))
    vals, errs = [], []
    for n in range(1, n_top + 1):
        lo = max(a, TWO_PI * (n / 2.0) ** 2)
        est = n_integral(n, lo, b, kernel)
        vals.append(est.value.real / math.sqrt(n))
        errs.append(est.abs_error_est / math.sqrt(n))
    return 2.0 * fsum_real(vals), 2.0 * fsum_real(errs)


def primitive_scan(T_max: float, grid_points: int = 64, kernel: SmoothingKernel | None = None,
                   epsilon: float = DEFAULT_EPSILON, *, T_min: float = 100.0, workers: int = 1,
                   with_afe: bool = False) -> ScanResult:
    """int_0^T Z(t) dt on a geometric grid of ``grid_points`` heights in [T_min, T_max].

    Segments between grid points are integrated independently and summed in
    grid order, so the output does not depend on ``workers``.  With
    ``with_afe`` the smoothed-sum primitive is accumulated alongside from
    T_min on (below T_min both columns share the direct value).
    """
    if not T_max <= T_ACCURACY_CAP:
        raise DomainError(f"T_max must not exceed {T_ACCURACY_CAP:g}")
    if grid_points < 2:
        raise DomainError("grid_points must be at least 2")
    if not 2 * math.pi <= T_min < T_max:
        raise DomainError(f"need 2*pi <= T_min < T_max, got {T_min}, {T_max}")
    kernel = kernel or make_kernel()
    grid = np.geomspace(T_min, T_max, grid_points)
    grid[0], grid[-1] = T_min, T_max
    edges = np.concatenate([[0.0], grid])
    segments = list(zip(edges[:-1], edges[1:]))
    direct = _map(_direct_segment, segments, workers)
    afe = [(0.0, 0.0)] * len(segments)
    if with_afe:
        afe[1:] = _map(partial(_afe_segment, kernel=kernel), segments[1:], workers)
    records = []
    for i, T in enumerate(grid):
        seg = direct[: i + 1]
        value = fsum_real([d.value for d in seg])
        err = fsum_real([d.abs_error_est for d in seg])
        if with_afe:
            value_afe = direct[0].value + fsum_real([v for v, _ in afe[1: i + 1]])
            budget = (afe_error_budget_integral(T_min, T) + err + direct[0].abs_error_est
                      + fsum_real([e for _, e in afe[1: i + 1]]))
        else:
            value_afe, budget = math.nan, err
        records.append(IntegralRecord(float(T), value, value_afe, (math.nan,) * 5, budget,
                                      value / T ** 0.25, epsilon))
    return ScanResult.from_records(records)


def exponent_fit(scan: ScanResult) -> float:
    """Least-squares slope of log(running max of |int_0^T Z|) against log T."""
    if len(scan.grid) < 10:
        raise InsufficientDataError(f"exponent_fit needs at least 10 grid points, got {len(scan.grid)}")
    T = np.array([r.T for r in scan.grid])
    env = np.maximum.accumulate(np.abs([r.value_direct for r in scan.grid]))
    if np.any(env <= 0):
        raise InsufficientDataError("primitive vanishes identically at the start of the grid")
    slope, _ = np.polyfit(np.log(T), np.log(env), 1)
    return float(slope)


def decade_maxima(scan: ScanResult, decades=(2, 3, 4)) -> dict[int, float]:
    """max |normalized| over grid points with 10^k <= T <= 10^(k+1)."""
    out = {}
    for k in decades:
        vals = [abs(r.normalized) for r in scan.grid if 10.0 ** k <= r.T <= 10.0 ** (k + 1)]
        out[k] = max(vals) if vals else math.nan
    return out
