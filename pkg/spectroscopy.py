"""
Spectroscopic protocols on the ISB chain: the Kubo response of a weakly coupled
probe resonator and the Fano transmission of a side-coupled waveguide.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

import ansatz_exc
from ansatz_gs import ChainParams, lf_solve
from config import SPECTROSCOPY_CONFIG, __version__
from errors import DomainError
from ed_oracle import EdResult, transition_weights

logger = logging.getLogger(__name__)

Label = Tuple[str, float]

# momenta closer than this are treated as equal when matching labels
MOMENTUM_TOL = 1e-9


@dataclass(frozen=True)
class ProbeParams:
    """
    System-probe coupling g_p, probe frequency omega_p, probe coherent
    amplitude alpha_p (Kubo), waveguide group velocity v_g (Fano) and the
    Lorentzian broadening eta.
    """

    g_p: float = 0.0
    omega_p: float = 1.0
    alpha_p: float = 0.0
    v_g: float = 1.0
    eta: float = 0.01

    def __post_init__(self):
        for name in ('g_p', 'omega_p', 'alpha_p', 'v_g', 'eta'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"ProbeParams.{name} must be finite")
        if self.g_p < 0.0:
            raise DomainError(f"probe coupling must be non-negative, got {self.g_p}")
        if self.eta <= 0.0:
            raise DomainError(f"broadening must be positive, got {self.eta}")
        if self.v_g <= 0.0:
            raise DomainError(f"group velocity must be positive, got {self.v_g}")
        if abs(self.alpha_p) > SPECTROSCOPY_CONFIG['alpha_warn']:
            logger.warning(f"probe amplitude alpha_p={self.alpha_p} is outside the linear-response regime")


@dataclass(frozen=True)
class Resonance:
    energy: float
    width: float
    label: Label


@dataclass(frozen=True)
class ResonanceSet:
    """Discrete resonances seen by the waveguide, labelled by (band, qd)."""

    resonances: Tuple[Resonance, ...] = ()

    def __post_init__(self):
        seen = set()
        for r in self.resonances:
            if not math.isfinite(r.energy) or not math.isfinite(r.width):
                raise DomainError(f"resonance {r.label} must have finite energy and width")
            if r.width < 0.0:
                raise DomainError(f"resonance {r.label} has negative width {r.width}")
            if r.label in seen:
                raise DomainError(f"duplicate resonance label {r.label}")
            seen.add(r.label)

    def __len__(self) -> int:
        return len(self.resonances)

    def __iter__(self):
        return iter(self.resonances)

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.resonances], dtype=float)

    @property
    def widths(self) -> np.ndarray:
        return np.array([r.width for r in self.resonances], dtype=float)

    def get(self, band: str, qd: float) -> Resonance:
        for r in self.resonances:
            if r.label[0] == band and abs(r.label[1] - qd) < MOMENTUM_TOL:
                return r
        raise KeyError((band, qd))

    @classmethod
    def from_lists(cls, energies: Iterable[float], widths: Iterable[float],
                   labels: Optional[Iterable[Label]] = None) -> 'ResonanceSet':
        energies, widths = list(energies), list(widths)
        if len(energies) != len(widths):
            raise DomainError("energies and widths must have the same length")
        labels = list(labels) if labels is not None else [('-', float(i)) for i in range(len(energies))]
        return cls(tuple(Resonance(float(e), float(w), lab) for e, w, lab in zip(energies, widths, labels)))


@dataclass
class SpectrumCurve:
    """
    Sampled spectrum with its axes and provenance.

    values has one dimension per axis, in the order the axes were given.
    """

    axis: Dict[str, np.ndarray]
    values: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.axis = {name: np.asarray(grid, dtype=float) for name, grid in self.axis.items()}
        self.values = np.asarray(self.values)
        for name, grid in self.axis.items():
            if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
                raise DomainError(f"axis {name!r} must be strictly increasing")
        expected = tuple(len(g) for g in self.axis.values())
        if self.values.shape != expected:
            raise DomainError(f"values shape {self.values.shape} does not match axes {expected}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("spectrum values must be finite")
        self.metadata.setdefault('code_version', __version__)

    def to_rows(self) -> List[Dict[str, float]]:
        names = list(self.axis)
        grids = np.meshgrid(*self.axis.values(), indexing='ij')
        flat_axes = [g.ravel() for g in grids]
        flat_values = self.values.ravel()
        rows = []
        for i, value in enumerate(flat_values):
            row = {name: float(flat_axes[k][i]) for k, name in enumerate(names)}
            if np.iscomplexobj(flat_values):
                row['value_re'] = float(value.real)
                row['value_im'] = float(value.imag)
            else:
                row['value'] = float(value)
            rows.append(row)
        return rows


def lorentzian(x: np.ndarray, center: float, eta: float) -> np.ndarray:
    """Unit-area Lorentzian (eta/pi) / ((x - center)^2 + eta^2)."""
    return (eta / math.pi) / ((x - center) ** 2 + eta ** 2)


def kubo_weights(point: ansatz_exc.BandPoint, chi: float = 0.0) -> Tuple[float, float]:
    """Residue weights (lower, upper) of the two poles: |beta_b|^2 + chi |beta_f|^2."""
    lower = point.boson_weight('-') + chi * point.fermion_weight('-')
    upper = point.boson_weight('+') + chi * point.fermion_weight('+')
    return lower, upper


def static_weight(p: ChainParams) -> float:
    """Weight of the staggered static peak at (k = pi, nu = 0)."""
    sites = p.N if p.N is not None else 1
    return math.pi * math.sqrt(sites) * lf_solve(p).boson_polarization


def kubo_response(
    p: ChainParams,
    probe: ProbeParams,
    nu_grid: Sequence[float],
    q_grid: Optional[Sequence[float]] = None,
    chi: float = 0.0,
) -> SpectrumCurve:
    """
    Pole model of |A_q(nu)|.

    Each band contributes i alpha_p g_p w_alpha / (nu - e_alpha(q) + i eta); at
    q = pi a static term A_pi times a Lorentzian of width eta centred at nu = 0
    is added. w_alpha is the boson weight of the band plus chi times its
    spin weight.

    Args:
        p: Chain parameters; q_grid defaults to the N-site momenta 2 pi n / N
        probe: Probe parameters (alpha_p, g_p, eta)
        nu_grid: Increasing frequency grid
        q_grid: Increasing momentum grid
        chi: Relative weight of the spin-branch propagator
    """
    nus = np.asarray(nu_grid, dtype=float)
    if q_grid is None:
        if p.N is None:
            raise DomainError("kubo_response needs q_grid or ChainParams.N")
        q_grid = 2.0 * np.pi * np.arange(p.N) / p.N
    qs = np.asarray(q_grid, dtype=float)

    a_pi = static_weight(p)
    amplitude = 1j * probe.alpha_p * probe.g_p
    values = np.empty((len(qs), len(nus)))
    for i, q in enumerate(qs):
        point = ansatz_exc.band_point(p, float(q))
        w_minus, w_plus = kubo_weights(point, chi)
        response = amplitude * (
            w_minus / (nus - point.e_minus + 1j * probe.eta)
            + w_plus / (nus - point.e_plus + 1j * probe.eta)
        )
        if abs(math.remainder(q - math.pi, 2.0 * math.pi)) < MOMENTUM_TOL:
            response = response + a_pi * lorentzian(nus, 0.0, probe.eta)
        values[i] = np.abs(response)

    return SpectrumCurve(
        axis={'qd': qs, 'nu': nus},
        values=values,
        metadata={
            'protocol': 'kubo',
            'chain': asdict(p),
            'probe': asdict(probe),
            'chi': chi,
            'static_weight': a_pi,
        },
    )


def transmission(res: ResonanceSet, omega_k: Sequence[float]) -> np.ndarray:
    """
    T(omega) = 1 / (1 + S^2) with S = sum Gamma / (omega - eps).

    Zero-width resonances are ignored and a point exactly on a pole with
    Gamma > 0 returns the limiting value 0.
    """
    omega = np.atleast_1d(np.asarray(omega_k, dtype=float))
    if len(res) == 0:
        return np.ones_like(omega)
    active = res.widths > 0.0
    eps = res.energies[active]
    gamma = res.widths[active]
    if len(eps) == 0:
        return np.ones_like(omega)

    detuning = omega[:, None] - eps[None, :]
    on_pole = np.any(detuning == 0.0, axis=1)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        s = np.sum(np.where(detuning == 0.0, 0.0, gamma[None, :] / detuning), axis=1)
        t = 1.0 / (1.0 + s * s)
    t[on_pole] = 0.0
    return t


def fano_transmission(res: ResonanceSet, omega_k_grid: Sequence[float]) -> SpectrumCurve:
    """Transmission spectrum of the side-coupled waveguide on an increasing grid."""
    omega = np.asarray(omega_k_grid, dtype=float)
    return SpectrumCurve(
        axis={'omega_k': omega},
        values=transmission(res, omega),
        metadata={
            'protocol': 'fano',
            'resonances': [
                {'energy': r.energy, 'width': r.width, 'band': r.label[0], 'qd': r.label[1]}
                for r in res
            ],
        },
    )


def _oracle_widths(p: ChainParams, probe: ProbeParams, bands: List[ansatz_exc.BandPoint],
                   oracle: EdResult) -> Dict[Label, float]:
    """
    Gamma = g_p^2 |M|^2 / v_g with |M|^2 the weight of sigma_x on site 0 that
    connects the ground state to the ED level of matching momentum nearest to
    the ansatz energy.
    """
    if oracle.truncation.N != p.N:
        raise DomainError(f"oracle has N={oracle.truncation.N} but the chain has N={p.N}")
    gaps = oracle.energies - oracle.energies[0]
    widths = {}
    for point in bands:
        weights = transition_weights(oracle, ('sigma_x_q', point.qd)) / p.N
        # ground manifold cannot host an excitation
        weights[0] = 0.0
        coupled = weights > 1e-12 * max(weights.max(), 1e-300)
        for band, energy in (('-', point.e_minus), ('+', point.e_plus)):
            if not coupled.any():
                widths[(band, point.qd)] = 0.0
                continue
            candidates = np.flatnonzero(coupled)
            target = candidates[np.argmin(np.abs(gaps[candidates] - energy))]
            # sum over levels degenerate with the match (q and -q partners)
            level = np.abs(gaps - gaps[target]) < 1e-8 * max(1.0, abs(gaps[target]))
            m2 = float(np.sum(weights[level]))
            widths[(band, point.qd)] = probe.g_p ** 2 * m2 / probe.v_g
    return widths


def resonances_from_ansatz(
    p: ChainParams,
    probe: ProbeParams,
    couplings: str = 'uniform',
    gamma0: Optional[float] = None,
    table: Optional[Mapping[Tuple[str, int], float]] = None,
    oracle: Optional[EdResult] = None,
) -> ResonanceSet:
    """
    Resonances at the two-band energies on the finite-N momentum grid.

    Args:
        p: Chain parameters with N set
        probe: Probe parameters (g_p, v_g)
        couplings: 'uniform' (gamma0 everywhere), 'oracle' (ED matrix elements)
            or 'table' (widths keyed by (band, momentum index))
        gamma0: Width for the uniform mode
        table: Widths for the table mode
        oracle: Exact-diagonalization result with the same N, for the oracle mode

    The upper band at qd = 0 never couples to the waveguide and always gets
    zero width.
    """
    if p.N is None:
        raise DomainError("resonances need a finite chain (ChainParams.N)")
    bands = ansatz_exc.band_structure(p, grid='finite')

    if couplings == 'uniform':
        if gamma0 is None or gamma0 < 0.0:
            raise DomainError(f"uniform couplings need gamma0 >= 0, got {gamma0}")
        widths = {(band, pt.qd): gamma0 for pt in bands for band in ('-', '+')}
    elif couplings == 'table':
        if table is None:
            raise DomainError("table couplings need a width table")
        widths = {}
        for n, pt in enumerate(bands):
            for band in ('-', '+'):
                if (band, n) not in table:
                    raise DomainError(f"width table has no entry for band {band} at momentum index {n}")
                widths[(band, pt.qd)] = float(table[(band, n)])
    elif couplings == 'oracle':
        if oracle is None:
            raise DomainError("oracle couplings need an EdResult")
        widths = _oracle_widths(p, probe, bands, oracle)
    else:
        raise DomainError(f"unknown coupling mode {couplings!r}")

    resonances = []
    for pt in bands:
        for band, energy in (('-', pt.e_minus), ('+', pt.e_plus)):
            width = 0.0 if (band == '+' and pt.qd == 0.0) else widths[(band, pt.qd)]
            resonances.append(Resonance(energy, width, (band, pt.qd)))
    logger.info(f"{len(resonances)} resonances ({couplings}) for N={p.N}")
    return ResonanceSet(tuple(resonances))


@dataclass
class ResolutionReport:
    """Gamma over nearest-neighbour spacing for each resonance."""

    ratios: Dict[Label, float]
    flagged: List[Label]
    threshold: float

    @property
    def ok(self) -> bool:
        return not self.flagged


def well_resolved_check(res: ResonanceSet, threshold: Optional[float] = None) -> ResolutionReport:
    if len(res) == 0:
        raise DomainError("well_resolved_check needs at least one resonance")
    threshold = SPECTROSCOPY_CONFIG['resolution_flag'] if threshold is None else threshold
    energies = res.energies
    ratios = {}
    for i, r in enumerate(res):
        others = np.delete(energies, i)
        spacing = float(np.min(np.abs(others - r.energy))) if len(others) else math.inf
        if r.width == 0.0:
            ratio = 0.0
        elif spacing == 0.0:
            ratio = math.inf
        else:
            ratio = r.width / spacing
        ratios[r.label] = ratio
    flagged = [label for label, ratio in ratios.items() if ratio > threshold]
    if flagged:
        logger.warning(f"{len(flagged)} resonances are not well resolved (ratio > {threshold})")
    return ResolutionReport(ratios, flagged, threshold)


def find_peak_positions(curve: SpectrumCurve, row: int = 0, rel_height: float = 0.05) -> np.ndarray:
    """Positions along the last axis of local maxima above rel_height times the row maximum."""
    values = np.atleast_2d(curve.values)[row]
    grid = list(curve.axis.values())[-1]
    peaks, _ = find_peaks(values, height=rel_height * values.max())
    return grid[peaks]


def transmission_dips(curve: SpectrumCurve, depth: float = 0.5) -> np.ndarray:
    """Positions of local transmission minima that drop below `depth`."""
    peaks, _ = find_peaks(-curve.values, height=-depth)
    return curve.axis['omega_k'][peaks]
