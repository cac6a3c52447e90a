"""
Adaptive 15-point Gauss-Kronrod quadrature and the thermal sinh-Gaussian
integrals built on it
"""

import heapq
import logging
import math
from typing import Callable, List, Sequence

import numpy as np
from pydantic import Field

from decokit.errors import ConvergenceError, DomainError
from decokit.physics.base import PhysicsModel

logger = logging.getLogger(__name__)

# Kronrod abscissae on [0, 1]; the odd-indexed ones are the 7-point Gauss nodes
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# All 15 nodes on [-1, 1] with their Kronrod and Gauss weights
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_KRONROD_WEIGHTS = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GAUSS_WEIGHTS = np.zeros(15)
_GAUSS_WEIGHTS[1:7:2] = _WG[:3]
_GAUSS_WEIGHTS[7] = _WG[3]
_GAUSS_WEIGHTS[9:14:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# Tail of the Gaussian beyond the peak that is integrated
GAUSSIAN_REACH = 12.0


class QuadratureResult(PhysicsModel):
    """Integral estimate with its error bound and the work it took"""

    value: float
    abs_error: float = Field(ge=0)
    intervals: int = Field(ge=1)


def gauss_kronrod_15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    """
    One 15-point Kronrod rule on [a, b] with the QUADPACK error estimate

    Returns:
        tuple: (integral, error estimate)
    """
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = np.asarray(f(center + half * _NODES), dtype=float)

    kronrod = float(np.dot(_KRONROD_WEIGHTS, values))
    gauss = float(np.dot(_GAUSS_WEIGHTS, values))
    mean = 0.5 * kronrod
    abs_sum = float(np.dot(_KRONROD_WEIGHTS, np.abs(values))) * abs(half)
    asc = float(np.dot(_KRONROD_WEIGHTS, np.abs(values - mean))) * abs(half)

    error = abs((kronrod - gauss) * half)
    if asc != 0.0 and error != 0.0:
        error = asc * min(1.0, (200.0 * error / asc) ** 1.5)
    if abs_sum > _TINY / (50.0 * _EPS):
        error = max(50.0 * _EPS * abs_sum, error)
    return kronrod * half, error


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    abs_tol: float = 0.0,
    rel_tol: float = 1e-11,
    limit: int = 2000,
) -> QuadratureResult:
    """
    Globally adaptive bisection of Gauss-Kronrod panels

    Args:
        f: Vectorised integrand
        breakpoints: Increasing points; every gap starts as one panel
        abs_tol: Absolute error target
        rel_tol: Relative error target
        limit: Maximum number of panels before giving up

    Raises:
        ConvergenceError: max(abs_tol, rel_tol * |I|) not met within `limit` panels
    """
    if abs_tol < 0.0 or rel_tol < 0.0 or (abs_tol == 0.0 and rel_tol == 0.0):
        raise DomainError("quadrature needs a positive tolerance")
    points = list(breakpoints)
    if len(points) < 2 or any(b <= a for a, b in zip(points, points[1:])):
        raise DomainError(f"breakpoints must increase strictly, got {points}")

    # Max-heap on the error estimate
    heap: List[tuple] = []
    for a, b in zip(points, points[1:]):
        value, error = gauss_kronrod_15(f, a, b)
        heapq.heappush(heap, (-error, a, b, value))

    while True:
        total = math.fsum(item[3] for item in heap)
        error = math.fsum(-item[0] for item in heap)
        if error <= max(abs_tol, rel_tol * abs(total)):
            logger.debug("quadrature converged on %d panels, error %.3g", len(heap), error)
            return QuadratureResult(value=total, abs_error=error, intervals=len(heap))
        if len(heap) >= limit:
            raise ConvergenceError(
                f"quadrature error {error:.3g} above tolerance after {limit} panels"
            )
        _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for left, right in ((a, mid), (mid, b)):
            value, err = gauss_kronrod_15(f, left, right)
            heapq.heappush(heap, (-err, left, right, value))


def _half_gaussian_difference(t: np.ndarray, power: float, x: float) -> np.ndarray:
    """t^power exp(-x^2) exp(-t^2) sinh(2 t x) written as t^power (exp(-(t-x)^2) - exp(-(t+x)^2)) / 2"""
    # t > 0 at every Kronrod node
    return -0.5 * np.exp(power * np.log(t) - (t - x) ** 2) * np.expm1(-4.0 * t * x)


def thermal_integral_quadrature(
    power: float,
    x: float,
    abs_tol: float = 0.0,
    rel_tol: float = 1e-11,
    limit: int = 2000,
) -> QuadratureResult:
    """
    int_0^inf t^power exp(-x^2) exp(-t^2) sinh(2 t x) dt by adaptive quadrature

    The integrand behaves as 2 x exp(-x^2) t^(power + 1) at the origin, so
    power > -2 keeps it integrable. For power + 1 < 0 the piece [0, eps] is
    integrated from that leading power and only [eps, x + sqrt(power / 2) + 12] is sampled.
    """
    if not power > -2.0:
        raise DomainError(f"the thermal integral diverges for power {power} <= -2")
    if not x >= 0.0:
        raise DomainError(f"the thermal integral needs x >= 0, got {x}")
    if x == 0.0:
        return QuadratureResult(value=0.0, abs_error=0.0, intervals=1)

    def integrand(t: np.ndarray) -> np.ndarray:
        return _half_gaussian_difference(t, power, x)

    # the peak of t^power exp(-(t-x)^2) sits below x + sqrt(power / 2)
    upper = x + math.sqrt(max(power, 0.0) / 2.0) + GAUSSIAN_REACH
    start = 0.0
    head = 0.0
    if power + 1.0 < 0.0:
        start = 1e-6 / (1.0 + x)
        head = 2.0 * x * math.exp(-x * x) * start ** (power + 2.0) / (power + 2.0)

    breakpoints = [start]
    if x - GAUSSIAN_REACH > start:
        breakpoints.append(x - GAUSSIAN_REACH)
    if x > start:
        breakpoints.append(x)
    breakpoints.append(upper)

    result = integrate(integrand, breakpoints, abs_tol=abs_tol, rel_tol=rel_tol, limit=limit)
    if head == 0.0:
        return result
    return QuadratureResult(
        value=result.value + head,
        abs_error=result.abs_error + abs(head) * 1e-10,
        intervals=result.intervals,
    )


def gr_integral_quadrature(mu: float, g: float, rel_tol: float = 1e-12) -> float:
    """
    Quadrature of int_0^inf x^(2 mu - 1) exp(-x^2) sinh(g x) dx

    Same integral as specfun.gr_integral_closed_form, reached through
    thermal_integral_quadrature with power 2 mu - 1 and x = g / 2.
    """
    if not mu > -0.5:
        raise DomainError(f"the sinh-Gaussian moment needs mu > -1/2, got {mu}")
    half = 0.5 * g
    reduced = thermal_integral_quadrature(2.0 * mu - 1.0, half, rel_tol=rel_tol).value
    return math.exp(half * half) * reduced
