"""
Exact solution of the one-dimensional transverse-field Ising chain

    H = J sum_i sx_i sx_{i+1} + h_t sum_i sz_i

through the Jordan-Wigner and Bogoliubov transformations. Both variational
ansatze reduce the ISB chain to this model.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import DomainError
from specfun import ellipe, theta_from_lambda

logger = logging.getLogger(__name__)

GAPLESS_TOL = 1e-12
MAX_FINITE_SITES = 2 ** 20


@dataclass(frozen=True)
class TimParams:
    """Effective Ising couplings produced by a variational transformation."""

    J: float
    h_t: float
    h_l: float = 0.0

    def __post_init__(self):
        for name in ('J', 'h_t', 'h_l'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"TimParams.{name} must be finite")
        if self.h_t < 0.0:
            raise DomainError(f"transverse field must be non-negative, got {self.h_t}")

    @property
    def lam(self) -> float:
        """Control ratio h_t/|J|; +inf for a decoupled chain."""
        if self.J == 0.0:
            return math.inf
        return self.h_t / abs(self.J)


@dataclass(frozen=True)
class BogoliubovPair:
    """Bogoliubov coefficients at one momentum; gapless marks a convention-dependent pair."""

    u_q: complex
    v_q: complex
    qd: float
    gapless: bool = False


def heaviside(x: float) -> float:
    """Step function with theta(0) = 0."""
    return 1.0 if x > 0.0 else 0.0


def dispersion(p: TimParams, qd: float) -> float:
    """Quasiparticle energy eps_q = 2 sqrt((J cos qd + h_t)^2 + (J sin qd)^2)."""
    return 2.0 * math.hypot(p.J * math.cos(qd) + p.h_t, p.J * math.sin(qd))


def bdg_matrix(p: TimParams, qd: float) -> np.ndarray:
    """
    Bogoliubov-de Gennes block in the (c_q, c_{-q}^dagger) basis.

    The diagonal is xi = 2(J cos qd + h_t) and the pairing is Delta = 2iJ sin qd,
    so the eigenvalues are +/- dispersion(p, qd).
    """
    xi = 2.0 * (p.J * math.cos(qd) + p.h_t)
    delta = 2.0j * p.J * math.sin(qd)
    return np.array([[xi, delta], [np.conj(delta), -xi]], dtype=complex)


def bogoliubov(p: TimParams, qd: float) -> BogoliubovPair:
    """
    Positive-energy eigenvector (u_q, v_q) of the BdG block.

    u_q is real and non-negative, the phase sits on v_q. At a gapless momentum
    the pair is not unique and (1/sqrt2, i/sqrt2) is returned with gapless=True.
    """
    eps = dispersion(p, qd)
    if eps < GAPLESS_TOL:
        logger.debug(f"gapless momentum qd={qd} for {p}")
        return BogoliubovPair(1.0 / math.sqrt(2.0), 1.0j / math.sqrt(2.0), qd, gapless=True)

    xi = 2.0 * (p.J * math.cos(qd) + p.h_t)
    delta = 2.0j * p.J * math.sin(qd)
    u = math.sqrt(max(0.0, (eps + xi) / (2.0 * eps)))
    v_abs = math.sqrt(max(0.0, (eps - xi) / (2.0 * eps)))
    phase = np.conj(delta) / abs(delta) if abs(delta) > 0.0 else 1.0
    return BogoliubovPair(complex(u), complex(v_abs * phase), qd)


def ground_energy_per_site(p: TimParams) -> float:
    """
    Thermodynamic-limit ground energy density -(2|J|/pi)(1 + lambda) E(theta(lambda)).

    Uses |J| so antiferro and ferro chains share the same energy; J = 0 gives -h_t.
    """
    if p.h_l != 0.0:
        raise DomainError("closed-form Ising energy requires h_l = 0")
    if p.J == 0.0:
        return -p.h_t
    lam = p.lam
    if lam <= 1.0:
        return -(2.0 * abs(p.J) / math.pi) * (1.0 + lam) * ellipe(theta_from_lambda(lam))
    # same integral with the roles of |J| and h_t exchanged
    inv = abs(p.J) / p.h_t
    return -(2.0 * p.h_t / math.pi) * (1.0 + inv) * ellipe(theta_from_lambda(inv))


def finite_momenta(N: int) -> np.ndarray:
    """Antiperiodic-sector momenta qd = pi(2n+1)/N, n = 0..N-1."""
    return np.pi * (2.0 * np.arange(N) + 1.0) / N


def finite_ground_energy(p: TimParams, N: int) -> float:
    """
    Ground energy of the periodic N-site chain from the even fermion-parity sector.

    Args:
        p: Couplings with h_l = 0
        N: Even number of sites, 2 <= N <= 2**20

    Returns:
        Total energy -sum_q eps_q / 2
    """
    if p.h_l != 0.0:
        raise DomainError("free-fermion energy requires h_l = 0")
    if N % 2 or not 2 <= N <= MAX_FINITE_SITES:
        raise DomainError(f"finite chain needs an even N in [2, {MAX_FINITE_SITES}], got {N}")
    q = finite_momenta(N)
    eps = 2.0 * np.hypot(p.J * np.cos(q) + p.h_t, p.J * np.sin(q))
    return float(-0.5 * np.sum(eps))


def finite_energy_per_site(p: TimParams, N: int) -> float:
    return finite_ground_energy(p, N) / N


def magnetization(lam: float) -> float:
    """Order parameter (1 - lambda^2)^(1/8) theta(1 - lambda)."""
    if math.isnan(lam) or lam < 0.0:
        raise DomainError(f"lambda must be non-negative, got {lam!r}")
    if lam >= 1.0:
        return 0.0
    return (1.0 - lam * lam) ** 0.125 * heaviside(1.0 - lam)
