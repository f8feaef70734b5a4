"""Closed-form population quantities under a bivariate Gaussian copula.

With ``(X, Y)`` standard bivariate normal with correlation ``rho`` (or any
pair of strictly monotone transforms of it) the population split statistic

    k(x) = sup_y |F(y | X > x) - F(y | X <= x)|

is attained at ``y* = x (1 - sqrt(1 - rho^2)) / rho`` and reduces to a
one-dimensional integral of a normal CDF against the normal density.  The
cumulative statistic ``K = E k(X~)`` averages ``k`` over an independent
standard normal split point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import InvalidInputError, NumericFailureError, UndefinedParameterError

ENDPOINT_SNAP = 1e-12
KJ_TOL = 1e-10
POPULATION_TOL = 1e-8

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_cdf(t):
    return 0.5 * special.erfc(-t / _SQRT2)


def norm_pdf(t):
    return _INV_SQRT_2PI * np.exp(-0.5 * t * t)


@dataclass(frozen=True)
class CopulaParams:
    rho: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and abs(self.rho) <= 1.0):
            raise InvalidInputError(f"rho must lie in [-1, 1], got {self.rho}")
        if not math.isfinite(self.x):
            raise InvalidInputError(f"x must be finite, got {self.x}")


def _params(params, x=None) -> CopulaParams:
    if isinstance(params, CopulaParams):
        return params
    return CopulaParams(float(params), float(x))


def ystar(params, x=None) -> float:
    """Response value at which the ECDF difference peaks, ``x rho / (1 + sqrt(1 - rho^2))``."""
    p = _params(params, x)
    if p.rho == 0.0:
        raise UndefinedParameterError("y* is undefined at rho = 0 (independence)")
    return p.x * p.rho / (1.0 + math.sqrt(1.0 - p.rho * p.rho))


def _quad(f, a, b, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, info = integrate.quad(
            f, a, b, epsabs=tol * 1e-3, epsrel=1e-12, limit=500, full_output=True
        )[:3]
    if not math.isfinite(value) or err > tol:
        raise NumericFailureError(
            f"quadrature did not reach tolerance {tol:g} (error estimate {err:g})", residual=err
        )
    return value


def lemma_kj(params, x=None) -> float:
    """Population split statistic k(x) for correlation ``rho``.

    Accepts either a :class:`CopulaParams` or ``(rho, x)``.  Exact 0 at
    ``rho = 0`` and exact 1 at ``|rho| = 1`` (within ``ENDPOINT_SNAP``).
    """
    p = _params(params, x)
    r = abs(p.rho)
    if r <= ENDPOINT_SNAP:
        return 0.0
    if r >= 1.0 - ENDPOINT_SNAP:
        return 1.0
    rho, xv = p.rho, p.x
    s = math.sqrt(1.0 - rho * rho)
    ys = ystar(p)
    denom = float(norm_cdf(xv) * norm_cdf(-xv))
    if xv <= 0.0:
        integral = _quad(
            lambda u: norm_cdf((xv - rho * u) / s) * norm_pdf(u), -np.inf, ys, KJ_TOL * denom
        )
        gap = integral - norm_cdf(xv) * norm_cdf(ys)
    else:
        # same quantity through P(U <= y*, X > x); avoids cancelling two O(1) terms
        upper = _quad(
            lambda u: norm_cdf((rho * u - xv) / s) * norm_pdf(u), -np.inf, ys, KJ_TOL * denom
        )
        gap = norm_cdf(-xv) * norm_cdf(ys) - upper
    value = abs(gap) / denom
    return min(value, 1.0)


def lemma_kj_drho(params, x=None) -> float:
    """Derivative of k(x) with respect to ``rho``.

    ``sgn(rho) / (Phi(x)(1 - Phi(x))) * (1 - rho^2)^(-1/2) / (2 pi) * exp(-x^2 h(rho))``
    with ``h(rho) = 1 / (1 + sqrt(1 - rho^2))``.
    """
    p = _params(params, x)
    if p.rho == 0.0 or abs(p.rho) == 1.0:
        raise UndefinedParameterError(f"derivative is undefined at rho = {p.rho}")
    s = math.sqrt(1.0 - p.rho * p.rho)
    denom = float(norm_cdf(p.x) * norm_cdf(-p.x))
    h = 1.0 / (1.0 + s)
    return math.copysign(1.0, p.rho) / denom / s / (2.0 * math.pi) * math.exp(-p.x * p.x * h)


def population_K(rho: float) -> float:
    """``E k(X~)`` for a standard normal split point ``X~``."""
    if not (math.isfinite(rho) and abs(rho) <= 1.0):
        raise InvalidInputError(f"rho must lie in [-1, 1], got {rho}")
    r = abs(rho)
    if r <= ENDPOINT_SNAP:
        return 0.0
    if r >= 1.0 - ENDPOINT_SNAP:
        return 1.0
    # k is bounded by 1, so the normal tails beyond |x| = 10 contribute < 1e-22
    value = _quad(lambda t: lemma_kj(rho, t) * float(norm_pdf(t)), -10.0, 10.0, POPULATION_TOL)
    return min(max(value, 0.0), 1.0)


def sure_screening_bound(n: int, p: int, delta: float) -> float:
    """Failure-probability bound ``p (4 n exp(-n D^2/128) + 2 exp(-n D^2/16))``.

    Only meaningful for ``delta > 4 / n``; returned as-is (it is often > 1).
    """
    return p * (4 * n * math.exp(-n * delta**2 / 128) + 2 * math.exp(-n * delta**2 / 16))


DEFAULT_RHO_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
DEFAULT_X_GRID = (-2.0, -1.0, 0.0, 1.0, 2.0)


@dataclass
class GridCheck:
    rows: list  # (rho, x, k, dk/drho or nan, finite difference or nan, relative residual or nan)
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def check_grid(rhos=DEFAULT_RHO_GRID, xs=DEFAULT_X_GRID, step=1e-5, rel_tol=1e-6) -> GridCheck:
    """Evaluate k on a grid and check endpoints, |rho|-monotonicity and the derivative."""
    rows, failures = [], []
    for x in xs:
        prev = None
        for rho in sorted(rhos, key=abs):
            k = lemma_kj(rho, x)
            d = fd = resid = math.nan
            if 0.0 < abs(rho) < 1.0:
                d = lemma_kj_drho(rho, x)
                fd = (lemma_kj(rho + step, x) - lemma_kj(rho - step, x)) / (2 * step)
                resid = abs(fd - d) / abs(d)
                if resid > rel_tol:
                    failures.append(f"derivative at rho={rho}, x={x}: relative residual {resid:.3g}")
            if rho == 0.0 and k != 0.0:
                failures.append(f"k(0, {x}) = {k}, expected 0")
            if abs(rho) == 1.0 and k != 1.0:
                failures.append(f"k({rho}, {x}) = {k}, expected 1")
            if prev is not None and abs(rho) > abs(prev[0]) and not k > prev[1]:
                failures.append(f"not increasing in |rho| at x={x}: k({prev[0]})={prev[1]}, k({rho})={k}")
            prev = (rho, k)
            rows.append((rho, x, k, d, fd, resid))
    orthant = lemma_kj(0.5, 0.0)
    if abs(orthant - 1.0 / 3.0) > 1e-8:
        failures.append(f"k(0.5, 0) = {orthant!r}, expected 1/3")
    return GridCheck(rows, failures)
