"""
Real-argument special functions: gamma, Kummer's confluent hypergeometric
function M(a, b; z) and the closed form of the sinh-Gaussian moment integral

    int_0^inf x^(2 mu - 1) exp(-x^2) sinh(g x) dx
        = (g / 2) Gamma(mu + 1/2) exp(g^2 / 4) M(1 - mu, 3/2; -g^2 / 4)

All functions are pure; nothing here keeps state between calls.
"""

import logging
import math
from typing import Optional

from pydantic import Field

from decokit.errors import ConvergenceError, DomainError, PoleError, RangeOverflowError
from decokit.physics.base import PhysicsModel

logger = logging.getLogger(__name__)

# Lanczos approximation with g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# gamma(x) overflows a double beyond this argument
GAMMA_MAX_ARG = 171.6243769563027

# Distance from a non-positive integer below which `a` terminates the series
TERMINATING_TOLERANCE = 1e-12

# exp(|z|) must stay finite when the Kummer-transformed series is the fallback
_SERIES_REACH = 600.0


class SpecfunConfig(PhysicsModel):
    """Accuracy and branch-selection knobs for the series evaluations"""

    series_tolerance: float = Field(default=1e-14, gt=0, lt=1e-6)
    max_series_terms: int = Field(default=500, ge=50)
    asymptotic_switch: float = Field(default=30.0, gt=0)


DEFAULT_CONFIG = SpecfunConfig()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _terminating_degree(a: float) -> Optional[int]:
    """Degree n when a is within TERMINATING_TOLERANCE of -n, else None"""
    if a > TERMINATING_TOLERANCE:
        return None
    nearest = round(a)
    if abs(a - nearest) <= TERMINATING_TOLERANCE:
        return int(-nearest)
    return None


def _sin_pi(x: float) -> float:
    """sin(pi x) with the argument reduced exactly to [-1/2, 1/2]"""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _lanczos_gamma(x: float) -> float:
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    # t**(z + 1/2) is split in two halves so it cannot overflow before exp(-t) scales it
    half_power = t ** ((z + 0.5) / 2.0)
    return _SQRT_TWO_PI * half_power * math.exp(-t) * half_power * acc


def gamma(x: float) -> float:
    """
    Gamma function for real arguments

    Args:
        x: Finite real number, not 0, -1, -2, ...

    Returns:
        float: Gamma(x)

    Raises:
        PoleError: x is a non-positive integer
        RangeOverflowError: Gamma(x) exceeds the double range
    """
    if not math.isfinite(x):
        raise DomainError(f"gamma needs a finite argument, got {x}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x > GAMMA_MAX_ARG:
        raise RangeOverflowError(f"gamma({x}) exceeds the floating-point range")

    if x < 0.5:
        # Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        s = _sin_pi(x)
        if 1.0 - x > GAMMA_MAX_ARG:
            return math.copysign(0.0, s)
        return math.pi / (s * _lanczos_gamma(1.0 - x))

    result = _lanczos_gamma(x)
    if not math.isfinite(result):
        raise RangeOverflowError(f"gamma({x}) exceeds the floating-point range")
    return result


def rgamma(x: float) -> float:
    """Reciprocal gamma function; zero at the poles and past the overflow point"""
    if _is_nonpositive_integer(x) or x > GAMMA_MAX_ARG:
        return 0.0
    return 1.0 / gamma(x)


def _kummer_polynomial(degree: int, b: float, z: float) -> float:
    """M(-degree, b; z), a polynomial of the given degree in z"""
    total = 1.0
    term = 1.0
    for k in range(degree):
        term *= (k - degree) * z / ((b + k) * (k + 1))
        total += term
    return total


def _kummer_series(a: float, b: float, z: float, cfg: SpecfunConfig) -> float:
    """Maclaurin series of M(a, b; z)"""
    total = 1.0
    term = 1.0
    for k in range(cfg.max_series_terms):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if term == 0.0:
            return total
        next_ratio = abs((a + k + 1) * z / ((b + k + 1) * (k + 2)))
        if abs(term) <= cfg.series_tolerance * abs(total) and next_ratio <= 0.5:
            return total
    raise ConvergenceError(
        f"M({a}, {b}; {z}) series did not converge in {cfg.max_series_terms} terms"
    )


def _kummer_negative_asymptotic(a: float, b: float, x: float, cfg: SpecfunConfig) -> Optional[float]:
    """
    Algebraic large-x expansion of M(a, b; -x), truncated at its smallest term

    Returns None when the smallest term does not reach the tolerance or when
    the exponentially small companion term, which is not summed, is too large
    to ignore.
    """
    prefactor = gamma(b) * rgamma(b - a) * x ** (-a)

    total = 1.0
    term = 1.0
    previous = 1.0
    decreasing = False
    converged = False
    for k in range(cfg.max_series_terms):
        term *= (a + k) * (a - b + 1.0 + k) / ((k + 1) * x)
        if term == 0.0:
            converged = True
            break
        if abs(term) > abs(previous) and decreasing:
            break
        decreasing = decreasing or abs(term) < abs(previous)
        total += term
        previous = term
        if abs(term) <= cfg.series_tolerance * abs(total):
            converged = True
            break

    value = prefactor * total
    if not converged:
        return None

    # Size of exp(-x) x^(a - b) Gamma(b) / Gamma(a), the dropped part
    dropped = abs(gamma(b) * rgamma(a)) * math.exp(-x + (a - b) * math.log(x))
    if dropped > cfg.series_tolerance * abs(value):
        return None
    return value


def _kummer_large(a: float, b: float, z: float, cfg: SpecfunConfig) -> float:
    x = abs(z)
    # Evaluate M(inner_a, b; -x); for z > 0 this is the Kummer-transformed function
    inner_a = a if z < 0 else b - a

    degree = _terminating_degree(b - inner_a)
    if degree is not None:
        value = math.exp(-x) * _kummer_polynomial(degree, b, x)
    else:
        value = _kummer_negative_asymptotic(inner_a, b, x, cfg)
        if value is None:
            if x > _SERIES_REACH:
                raise ConvergenceError(
                    f"M({a}, {b}; {z}): asymptotic expansion missed the tolerance "
                    "and the series is out of reach"
                )
            logger.debug("M(%g, %g; %g): asymptotic branch fell back to the series", a, b, z)
            value = math.exp(-x) * _kummer_series(b - inner_a, b, x, cfg)

    if z < 0:
        return value
    try:
        result = math.exp(x) * value
    except OverflowError as exc:
        raise RangeOverflowError(f"M({a}, {b}; {z}) exceeds the floating-point range") from exc
    if not math.isfinite(result):
        raise RangeOverflowError(f"M({a}, {b}; {z}) exceeds the floating-point range")
    return result


def kummer_m(a: float, b: float, z: float, cfg: SpecfunConfig = DEFAULT_CONFIG) -> float:
    """
    Kummer's confluent hypergeometric function M(a, b; z) = 1F1(a; b; z)

    Args:
        a, b, z: Finite reals; b must not be 0, -1, -2, ...
        cfg: Series tolerance, term budget and asymptotic switch

    Returns:
        float: M(a, b; z)

    Raises:
        PoleError: b is a non-positive integer
        ConvergenceError: neither the series nor the expansion met the tolerance
    """
    for name, value in (("a", a), ("b", b), ("z", z)):
        if not math.isfinite(value):
            raise DomainError(f"kummer_m needs finite {name}, got {value}")
    if _is_nonpositive_integer(b):
        raise PoleError(f"kummer_m is undefined for b = {b}")
    if z == 0.0:
        return 1.0

    degree = _terminating_degree(a)
    if degree is not None:
        return _kummer_polynomial(degree, b, z)

    if abs(z) > cfg.asymptotic_switch:
        logger.debug("M(%g, %g; %g): large-argument branch", a, b, z)
        return _kummer_large(a, b, z, cfg)
    if z < 0:
        # Kummer transformation, every summed term keeps one sign when b > a
        return math.exp(z) * _kummer_series(b - a, b, -z, cfg)
    return _kummer_series(a, b, z, cfg)


def gr_integral_closed_form(mu: float, g: float, cfg: SpecfunConfig = DEFAULT_CONFIG) -> float:
    """
    Closed form of int_0^inf x^(2 mu - 1) exp(-x^2) sinh(g x) dx

    Valid for mu > -1/2 and g >= 0.
    """
    if not mu > -0.5:
        raise DomainError(f"the sinh-Gaussian moment needs mu > -1/2, got {mu}")
    if not g >= 0.0:
        raise DomainError(f"the sinh-Gaussian moment needs g >= 0, got {g}")
    if g == 0.0:
        return 0.0
    quarter = 0.25 * g * g
    # exp(q) M(1 - mu, 3/2; -q) == M(mu + 1/2, 3/2; q)
    return 0.5 * g * gamma(mu + 0.5) * kummer_m(mu + 0.5, 1.5, quarter, cfg)
