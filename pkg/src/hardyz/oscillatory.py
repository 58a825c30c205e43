"""Exponential integrals: a trusted adaptive quadrature, the saddle-point
lemma with its error budget, the first and second derivative tests, and
the Gaussian integral with its even moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import gamma

from hardyz._summation import fsum_complex
from hardyz.errors import BudgetExceededError, DomainError, HypothesisError, NoSaddleError

GL_ORDER = 16
_GL_X, _GL_W = leggauss(GL_ORDER)

#: Phase change allowed across one initial panel (12 nodes per 2*pi with 16-point rules).
PANEL_PHASE = 8.0 / 3.0 * math.pi
DEFAULT_MAX_EVALS = 10**8
#: Panels whose two estimates differ by less than this fraction of int |g| are accepted.
ROUNDOFF_FLOOR = 64 * np.finfo(float).eps
#: Constant c in |int phi e^{iF}| <= c * max|phi| / min|F'|.
FIRST_DERIVATIVE_CONSTANT = 4.0
#: Constant c in |int phi e^{iF}| <= c * max|phi| / sqrt(min F'').
SECOND_DERIVATIVE_CONSTANT = 8.0
#: Measured lemma constants outside [1/SLACK, SLACK] are reported as warnings.
HYPOTHESIS_SLACK = 100.0


@dataclass(frozen=True)
class IntegralEstimate:
    value: complex
    abs_error_est: float
    evaluations: int


@dataclass(frozen=True)
class SaddleEvaluation:
    main_term: complex
    err_interior: float
    err_left: float
    err_right: float
    saddle_location: float
    H: float
    A: float
    U: float
    ratios: dict = field(default_factory=dict, compare=False)
    warnings: tuple[str, ...] = ()

    @property
    def budget(self) -> float:
        return self.err_interior + self.err_left + self.err_right


# ---------------------------------------------------------------------------
# adaptive panel quadrature
# ---------------------------------------------------------------------------

def _gauss_panels(g, lo: np.ndarray, hi: np.ndarray, chunk: int = 1 << 16):
    """Per-panel integrals of g and of |g|."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    out, mag = None, np.empty(lo.size)
    for s in range(0, lo.size, chunk):
        nodes = mid[s:s + chunk, None] + half[s:s + chunk, None] * _GL_X
        vals = np.asarray(g(nodes.ravel())).reshape(nodes.shape)
        part = half[s:s + chunk] * (vals @ _GL_W)
        if out is None:
            out = np.empty(lo.size, dtype=part.dtype)
        out[s:s + chunk] = part
        mag[s:s + chunk] = half[s:s + chunk] * (np.abs(vals) @ _GL_W)
    return out, mag


def _initial_edges(a: float, b: float, rate=None, phase=None, min_panels: int = 1) -> np.ndarray:
    if rate is None and phase is None:
        return np.linspace(a, b, min_panels + 1)
    grid = np.linspace(a, b, 1025 if rate is None else 257)
    if rate is not None:
        r = np.abs(np.asarray(rate(grid), dtype=float))
        cell = 1.1 * np.maximum(r[:-1], r[1:]) * np.diff(grid)
    else:
        cell = 1.1 * np.abs(np.diff(np.asarray(phase(grid), dtype=float)))
    counts = np.maximum(1, np.ceil(cell / PANEL_PHASE)).astype(np.int64)
    total = int(counts.sum())
    if total < min_panels:
        return np.linspace(a, b, min_panels + 1)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    j = np.arange(total) - starts
    width = np.repeat(np.diff(grid) / counts, counts)
    edges = np.repeat(grid[:-1], counts) + j * width
    return np.append(edges, b)


def panel_quadrature(g: Callable, a: float, b: float, tol: float, *, rate=None, phase=None,
                     max_evals: int = DEFAULT_MAX_EVALS, min_panels: int = 8,
                     max_depth: int = 40) -> IntegralEstimate:
    """Integrate a vectorised ``g`` over [a, b] with 16-point Gauss-Legendre panels.

    The initial panels are sized from ``rate`` (a bound on the local angular
    frequency) or from the variation of ``phase``; each panel is then halved
    until coarse and refined values differ by less than its share of tol/2.
    """
    a, b = float(a), float(b)
    if tol <= 0:
        raise DomainError("quadrature tolerance must be positive")
    if a == b:
        return IntegralEstimate(0.0, 0.0, 0)
    if b < a:
        est = panel_quadrature(g, b, a, tol, rate=rate, phase=phase, max_evals=max_evals,
                               min_panels=min_panels, max_depth=max_depth)
        return IntegralEstimate(-est.value, est.abs_error_est, est.evaluations)

    edges = _initial_edges(a, b, rate, phase, min_panels)
    lo, hi = edges[:-1], edges[1:]
    evals = GL_ORDER * lo.size
    if evals * 3 > max_evals:
        raise BudgetExceededError(f"{evals * 3} evaluations needed, cap is {max_evals}")
    coarse, _ = _gauss_panels(g, lo, hi)
    density = 0.5 * tol / (b - a)
    values, errors = [], []
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        left, mag_l = _gauss_panels(g, lo, mid)
        right, mag_r = _gauss_panels(g, mid, hi)
        evals += 2 * GL_ORDER * lo.size
        fine = left + right
        diff = np.abs(fine - coarse)
        # a disagreement at rounding level of int |g| cannot be refined away
        ok = (diff <= density * (hi - lo)) | (diff <= ROUNDOFF_FLOOR * (mag_l + mag_r))
        if depth == max_depth:
            ok[:] = True
        values.append(fine[ok])
        errors.append(diff[ok])
        if ok.all():
            break
        bad = ~ok
        lo, hi = np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
        if evals + 2 * GL_ORDER * lo.size > max_evals:
            raise BudgetExceededError(f"adaptive refinement would exceed {max_evals} evaluations")
    value = fsum_complex(np.concatenate(values))
    err = math.fsum(np.concatenate(errors))
    return IntegralEstimate(value, err, evals)


def oscillatory_quadrature(phi: Callable, F: Callable, a: float, b: float, tol: float = 1e-10, *,
                           dF: Callable | None = None,
                           max_evals: int = DEFAULT_MAX_EVALS) -> IntegralEstimate:
    """Brute-force value of int_a^b phi(t) exp(i F(t)) dt.

    Panels carry at least 8 nodes per 2*pi of phase; ``dF`` (the phase
    derivative) sizes them when given, otherwise the sampled variation of F.
    """
    if not b > a:
        raise DomainError("oscillatory_quadrature requires b > a")

    def g(t):
        return phi(t) * np.exp(1j * F(t))

    return panel_quadrature(g, a, b, tol, rate=dF, phase=None if dF else F, max_evals=max_evals)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def gaussian_integral(A: complex, B: complex) -> complex:
    """int_R exp(A x - B x^2) dx = sqrt(pi/B) exp(A^2 / 4B), Re B > 0."""
    A, B = complex(A), complex(B)
    if B.real <= 0:
        raise DomainError("gaussian_integral requires Re B > 0")
    return np.sqrt(math.pi / B) * np.exp(A * A / (4.0 * B))


def gaussian_moment(k: int, B: complex) -> complex:
    """int_R x^(2k) exp(-B x^2) dx = Gamma(k + 1/2) B^(-k - 1/2)."""
    B = complex(B)
    if B.real <= 0:
        raise DomainError("gaussian_moment requires Re B > 0")
    if k < 0:
        raise DomainError("moment index must be non-negative")
    return gamma(k + 0.5) * np.exp(-(k + 0.5) * np.log(B))


# ---------------------------------------------------------------------------
# derivative tests
# ---------------------------------------------------------------------------

def first_derivative_bound(f_prime_min: float, phi_max: float) -> float:
    """Bound for int phi e^{iF} when |F'| >= f_prime_min and F', phi are monotone."""
    if not f_prime_min > 0:
        raise HypothesisError("first derivative test needs min |F'| > 0")
    return FIRST_DERIVATIVE_CONSTANT * phi_max / f_prime_min


def second_derivative_bound(f_second_min: float, phi_max: float, interval_len: float) -> float:
    """Bound for int phi e^{iF} when F'' >= f_second_min > 0 and phi is monotone.

    Never larger than the trivial bound phi_max * interval_len.
    """
    if not f_second_min > 0:
        raise HypothesisError("second derivative test needs min F'' > 0")
    return min(SECOND_DERIVATIVE_CONSTANT * phi_max / math.sqrt(f_second_min),
               phi_max * interval_len)


# ---------------------------------------------------------------------------
# saddle-point lemma
# ---------------------------------------------------------------------------

def _find_saddle(f1: Callable, f2: Callable, a: float, b: float) -> float:
    fa, fb = float(f1(a)), float(f1(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NoSaddleError(f"f' has no sign change on [{a}, {b}]")
    c = brentq(f1, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(2):
        step = float(f1(c)) / float(f2(c))
        if not a <= c - step <= b:
            break
        c -= step
    return c


def saddle_point_eval(phi: Callable, f: Sequence[Callable], a: float, b: float,
                      H: float, A: float, U: float, *, samples: int = 65) -> SaddleEvaluation:
    """Main term and error budget of the saddle-point lemma for int_a^b phi e^{2 pi i f}.

    ``f`` holds f, f', f'' and optionally f''', f''''.  The lemma's hypotheses
    are sampled on ``samples`` points; measured constants go to ``ratios``
    and anything out of range becomes a warning rather than an exception.
    """
    if not b > a:
        raise DomainError("saddle_point_eval requires b > a")
    if len(f) < 3:
        raise DomainError("f must provide at least f, f' and f''")
    c = _find_saddle(f[1], f[2], a, b)
    f2c = float(f[2](c))
    if f2c <= 0:
        raise HypothesisError(f"f''(c) = {f2c} is not positive")
    fc = float(f[0](c))
    frac = fc - math.floor(fc)
    main = complex(phi(c)) / math.sqrt(f2c) * np.exp(2j * math.pi * frac + 0.25j * math.pi)

    with np.errstate(divide="ignore"):
        inv_a = 1.0 / abs(float(f[1](a)))
        inv_b = 1.0 / abs(float(f[1](b)))
    err_left = H * min(inv_a, math.sqrt(A))
    err_right = H * min(inv_b, math.sqrt(A))

    notes = []
    if not H > 0 or not A > 0:
        notes.append("H and A must be positive")
    if A > U:
        notes.append(f"A = {A:g} exceeds U = {U:g}")
    if b - a > U:
        notes.append(f"interval length {b - a:g} exceeds U = {U:g}")
    xs = np.linspace(a, b, samples)
    f2 = np.asarray(f[2](xs), dtype=float)
    ratios = {"f2_times_A": (float(np.min(f2) * A), float(np.max(f2) * A))}
    if np.any(f2 <= 0):
        notes.append("f'' is not positive on [a, b]")
    if ratios["f2_times_A"][0] < 1 / HYPOTHESIS_SLACK or ratios["f2_times_A"][1] > HYPOTHESIS_SLACK:
        notes.append(f"f'' * A spans {ratios['f2_times_A']}, not comparable to 1")
    for k, scale in ((3, A * U), (4, A * U * U)):
        if len(f) > k:
            ratios[f"f{k}"] = float(np.max(np.abs(f[k](xs))) * scale)
    ph = np.asarray(phi(xs), dtype=complex)
    step = xs[1] - xs[0]
    d1 = np.gradient(ph, step)
    d2 = np.gradient(d1, step)
    for r, vals in enumerate((ph, d1, d2)):
        ratios[f"phi{r}"] = float(np.max(np.abs(vals)) * U ** r / H)
    for key, val in ratios.items():
        if key != "f2_times_A" and val > HYPOTHESIS_SLACK:
            notes.append(f"{key} ratio {val:.3g} exceeds {HYPOTHESIS_SLACK:g}")
    return SaddleEvaluation(main, H * A / U, err_left, err_right, c, H, A, U, ratios, tuple(notes))
