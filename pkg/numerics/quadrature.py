import logging
import math
from typing import Callable

import numpy as np
from scipy import integrate

from shared.errors import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DECAY_RATIO = 1e-14
QUAD_LIMIT = 200


def _truncation_point(integrand: Callable[[float], float], a: float):
    # Walk a geometric grid past the peak until the integrand is negligible
    step = 1e-8
    running_max = 0.0
    peak = a
    past_peak = False
    for k in range(90):
        t = a + step * 2.0**k
        value = abs(integrand(t))
        if not math.isfinite(value):
            return None, peak
        if value > running_max:
            running_max = value
            peak = t
        elif value < running_max:
            past_peak = True
        if past_peak and value <= DECAY_RATIO * running_max:
            return t, peak
    return None, peak


def quad(
    integrand: Callable[[float], float],
    a: float,
    b: float = math.inf,
    tol: float = DEFAULT_TOL,
) -> float:
    points = None
    if math.isinf(b):
        upper, peak = _truncation_point(integrand, a)
        if upper is None:
            logger.debug("No truncation point found from %g, using infinite range", a)
        else:
            b = upper
            if a < peak < b:
                points = [peak]

    output = integrate.quad(
        integrand,
        a,
        b,
        epsabs=tol,
        epsrel=tol,
        limit=QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    value, abserr = output[0], output[1]
    if not math.isfinite(value):
        raise QuadratureError(f"Integral on [{a}, {b}] is not finite", value, abserr)

    if len(output) > 3:
        # Roundoff warnings at tight tolerances are harmless if the error is small
        if abserr > 1e3 * max(tol, tol * abs(value)):
            raise QuadratureError(
                f"Integral on [{a}, {b}] did not converge: {output[3]}", value, abserr
            )
        logger.debug("Quadrature warning on [%g, %g]: %s", a, b, output[3])

    return value


def omega(a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    if a < 0 or b <= 0:
        raise ValueError(f"omega requires a >= 0 and b > 0 (got a={a}, b={b})")

    def integrand(t):
        return t * math.exp(-b * t) / (1.0 + a * math.exp(-t))

    return quad(integrand, 0.0, math.inf, tol)


def omega2(a: float, b: float, c: float, d: float, tol: float = DEFAULT_TOL) -> float:
    if a < 0 or b <= 0 or c < 0 or d < 0:
        raise ValueError(
            f"omega2 requires a >= 0, b > 0, c >= 0, d >= 0 (got {a}, {b}, {c}, {d})"
        )

    def integrand(t):
        shrink = 1.0 + a * math.exp(-t)
        return t * math.exp(-b * t) * (1.0 - c * math.exp(-d * t)) / shrink**2

    return quad(integrand, 0.0, math.inf, tol)


def gauss_legendre(n: int, a: float, b: float):
    """Nodes and weights of the n-point Gauss-Legendre rule mapped to [a, b]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights
