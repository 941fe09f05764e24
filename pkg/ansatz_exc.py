"""
Low-energy excitations above the Lang-Firsov ground state.

A boson-like branch omega_q and a spin-like branch eps_q mix through g_q; the
resulting 2x2 problem is solved at each momentum of the half Brillouin zone.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

import tim
from ansatz_gs import ChainParams, lf_effective
from errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandPoint:
    """
    Two-band solution at one momentum.

    mix_plus and mix_minus are normalized eigenvectors in the (beta_f, beta_b)
    basis, fermion (spin) component first.
    """

    qd: float
    omega_q: float
    eps_q: float
    g_q: complex
    e_plus: float
    e_minus: float
    mix_plus: np.ndarray
    mix_minus: np.ndarray

    @property
    def abs_g_q(self) -> float:
        return abs(self.g_q)

    def hamiltonian(self) -> np.ndarray:
        return two_band_matrix(self.eps_q, self.omega_q, self.g_q)

    def boson_weight(self, band: str) -> float:
        vec = self.mix_plus if band == '+' else self.mix_minus
        return float(abs(vec[1]) ** 2)

    def fermion_weight(self, band: str) -> float:
        vec = self.mix_plus if band == '+' else self.mix_minus
        return float(abs(vec[0]) ** 2)

    def to_row(self) -> Dict[str, float]:
        # arg(g_q) depends on the Bogoliubov phase convention and is not exported
        return {
            'qd': self.qd,
            'omega_q': self.omega_q,
            'eps_q': self.eps_q,
            'abs_g_q': self.abs_g_q,
            'e_minus': self.e_minus,
            'e_plus': self.e_plus,
            'beta_f2_minus': self.fermion_weight('-'),
            'beta_b2_minus': self.boson_weight('-'),
            'beta_f2_plus': self.fermion_weight('+'),
            'beta_b2_plus': self.boson_weight('+'),
        }


def two_band_matrix(eps_q: float, omega_q: float, g_q: complex) -> np.ndarray:
    return np.array([[eps_q, np.conj(g_q)], [g_q, omega_q]], dtype=complex)


def boson_branch(p: ChainParams, qd: float) -> float:
    """omega_q = omega + 4 h_t (2g/omega)^2 sin^2(qd/2)."""
    h_t = lf_effective(p).h_t
    ratio = 2.0 * p.g / p.omega
    return p.omega + 4.0 * h_t * ratio * ratio * math.sin(0.5 * qd) ** 2


def mixing(p: ChainParams, qd: float, v_sign: int = 1) -> complex:
    """
    g_q = h_t (2g/omega)(1 - e^{-i qd})(u_q + v_q*).

    v_sign = -1 evaluates the alternative Bogoliubov convention v_q -> -v_q.
    """
    eff = lf_effective(p)
    pair = tim.bogoliubov(eff, qd)
    factor = 1.0 - cmath.exp(-1j * qd)
    return eff.h_t * (2.0 * p.g / p.omega) * factor * (pair.u_q + v_sign * pair.v_q.conjugate())


def band_point(p: ChainParams, qd: float, v_sign: int = 1) -> BandPoint:
    """
    Diagonalize the two-band model at momentum qd.

    Energies come from the closed form; eigenvectors from a Hermitian solver.
    When g_q vanishes the eigenvectors are the bare states, with the boson
    assigned to the lower band on an exact tie.
    """
    if not math.isfinite(qd):
        raise DomainError(f"momentum must be finite, got {qd!r}")
    eff = lf_effective(p)
    omega_q = boson_branch(p, qd)
    eps_q = tim.dispersion(eff, qd)
    g_q = mixing(p, qd, v_sign)

    mean = 0.5 * (omega_q + eps_q)
    half_split = math.hypot(0.5 * (omega_q - eps_q), abs(g_q))
    e_plus, e_minus = mean + half_split, mean - half_split

    if g_q == 0:
        spin = np.array([1.0, 0.0], dtype=complex)
        boson = np.array([0.0, 1.0], dtype=complex)
        if omega_q <= eps_q:
            mix_minus, mix_plus = boson, spin
        else:
            mix_minus, mix_plus = spin, boson
    else:
        _, vecs = np.linalg.eigh(two_band_matrix(eps_q, omega_q, g_q))
        mix_minus, mix_plus = vecs[:, 0], vecs[:, 1]

    return BandPoint(qd, omega_q, eps_q, g_q, e_plus, e_minus, mix_plus, mix_minus)


def momentum_grid(n_q: Optional[int] = None, N: Optional[int] = None) -> np.ndarray:
    """
    Momenta inside the half Brillouin zone [0, pi).

    With N the finite-chain momenta 2 pi n / N, n = 0..ceil(N/2) - 1; otherwise
    n_q uniformly spaced points starting at 0.
    """
    if N is not None:
        if N < 2:
            raise DomainError(f"finite grid needs N >= 2, got {N}")
        return 2.0 * np.pi * np.arange(math.ceil(N / 2)) / N
    if n_q is None or n_q < 1:
        raise DomainError(f"uniform grid needs n_q >= 1, got {n_q}")
    return np.pi * np.arange(n_q) / n_q


def band_structure(p: ChainParams, n_q: Optional[int] = None, grid: str = 'uniform') -> List[BandPoint]:
    """
    Band structure on a uniform HBZ grid or on the momenta of an N-site chain.

    Args:
        p: Chain parameters; the 'finite' grid reads p.N
        n_q: Number of points for the uniform grid
        grid: 'uniform' or 'finite'
    """
    if grid == 'finite':
        if p.N is None:
            raise DomainError("finite momentum grid needs ChainParams.N")
        qs = momentum_grid(N=p.N)
    elif grid == 'uniform':
        qs = momentum_grid(n_q=n_q)
    else:
        raise DomainError(f"unknown momentum grid {grid!r}")
    logger.debug(f"band structure on {len(qs)} momenta ({grid}) for {p}")
    return [band_point(p, float(q)) for q in qs]
