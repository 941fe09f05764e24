"""
Special functions needed by the closed-form Ising solutions.

The complete elliptic integral of the second kind

    E(theta) = int_0^{pi/2} dq sqrt(1 - theta^2 sin^2 q)

is evaluated with the arithmetic-geometric mean, and a quadrature version of
the defining integral is kept around as an independent oracle.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

from scipy import integrate

from errors import DomainError

logger = logging.getLogger(__name__)

AGM_RTOL = 1e-15
AGM_MAX_ITER = 64


@dataclass(frozen=True)
class EllipticArg:
    """Elliptic modulus theta_t, restricted to [0, 1]."""

    theta_t: float

    def __post_init__(self):
        if not math.isfinite(self.theta_t) or not 0.0 <= self.theta_t <= 1.0:
            raise DomainError(f"elliptic modulus must lie in [0, 1], got {self.theta_t!r}")


def _as_modulus(theta: Union[EllipticArg, float]) -> float:
    if isinstance(theta, EllipticArg):
        return theta.theta_t
    return EllipticArg(float(theta)).theta_t


def ellipe(theta: Union[EllipticArg, float]) -> float:
    """
    Complete elliptic integral of the second kind E(theta).

    Args:
        theta: Modulus in [0, 1] (an EllipticArg or a plain float)

    Returns:
        E(theta), accurate to machine precision
    """
    k = _as_modulus(theta)
    if k == 1.0:
        return 1.0
    if k == 0.0:
        return math.pi / 2

    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    total = 0.5 * c * c
    power = 0.5
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        total += power * c * c
    else:
        logger.warning(f"AGM did not reach {AGM_RTOL} for modulus {k}")

    K = math.pi / (2.0 * a)
    return K * (1.0 - total)


def ellipe_quadrature(theta: Union[EllipticArg, float]) -> float:
    """Adaptive quadrature of the defining integral, used as a validation oracle."""
    k = _as_modulus(theta)
    value, _ = integrate.quad(
        lambda q: math.sqrt(1.0 - (k * math.sin(q)) ** 2),
        0.0,
        math.pi / 2,
        epsabs=1e-14,
        epsrel=1e-14,
        limit=200,
    )
    return value


def theta_from_lambda(lam: float) -> EllipticArg:
    """
    Modulus theta_t = sqrt(4 lambda / (1 + lambda)^2) of the Pfeuty integral.

    Symmetric under lambda -> 1/lambda and equal to 1 only at lambda = 1.
    """
    if not math.isfinite(lam) or lam < 0.0:
        raise DomainError(f"lambda must be finite and non-negative, got {lam!r}")
    value = 2.0 * math.sqrt(lam) / (1.0 + lam)
    return EllipticArg(min(value, 1.0))
