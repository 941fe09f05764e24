"""
Variational ground states of the ISB chain.

Two unitary ansatze reduce the chain to an effective Ising model:

* Lang-Firsov: fixed polaron displacement g/omega, closed form through the
  transverse-field Ising solution.
* Silbey-Harris: displacement f and coherent amplitude alpha are variational,
  the longitudinal field is treated with a Hartree-Fock decoupling and the
  energy is minimized numerically.

The module also locates the critical lines and sweeps phase diagrams.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

import tim
from config import SOLVER_CONFIG
from errors import ConvergenceError, DomainError, IsbError
from tim import TimParams

logger = logging.getLogger(__name__)


class AnsatzKind(str, Enum):
    LANG_FIRSOV = 'lf'
    SILBEY_HARRIS = 'sh'


@dataclass(frozen=True)
class ChainParams:
    """
    Physical parameters of the ISB chain.

    omega0 is the spin frequency, omega the boson frequency and g the coupling
    (antiferro choice g1 = -g2 = g). N is None for the thermodynamic limit.
    The lattice spacing is fixed to 1 so momenta are reported as qd.
    """

    omega0: float
    omega: float
    g: float
    N: Optional[int] = None
    d: float = 1.0

    def __post_init__(self):
        for name in ('omega0', 'omega', 'g'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"ChainParams.{name} must be finite")
        if self.omega <= 0.0:
            raise DomainError(f"boson frequency must be positive, got {self.omega}")
        if self.omega0 < 0.0:
            raise DomainError(f"spin frequency must be non-negative, got {self.omega0}")
        if self.d != 1.0:
            raise DomainError("lattice spacing is fixed to d = 1")
        if self.N is not None and (not isinstance(self.N, int) or self.N < 2):
            raise DomainError(f"N must be an integer >= 2 or None, got {self.N!r}")

    @property
    def scale(self) -> float:
        return max(self.omega, self.omega0, abs(self.g))

    def scaled(self, s: float) -> 'ChainParams':
        return ChainParams(self.omega0 * s, self.omega * s, self.g * s, self.N, self.d)


@dataclass(frozen=True)
class VariationalSolution:
    """Optimal variational parameters, energy density and order parameters."""

    kind: AnsatzKind
    f_star: float
    alpha_star: float
    energy_per_site: float
    lam: float
    spin_magnetization: float
    boson_polarization: float
    ordered: bool
    converged: bool = True
    evaluations: int = 0

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data['kind'] = self.kind.value
        data['lambda'] = data.pop('lam')
        return data


# --- Lang-Firsov -----------------------------------------------------------

def lf_effective(p: ChainParams) -> TimParams:
    """rTIM couplings J = 2g^2/omega and h_t = (omega0/2) exp(-4g^2/omega^2)."""
    ratio = p.g / p.omega
    return TimParams(J=2.0 * p.g * p.g / p.omega, h_t=0.5 * p.omega0 * math.exp(-4.0 * ratio * ratio))


def lf_solve(p: ChainParams) -> VariationalSolution:
    """Closed-form Lang-Firsov ground state: bosonic vacuum in the polaron frame."""
    eff = lf_effective(p)
    lam = eff.lam
    m = tim.magnetization(lam)
    energy = -2.0 * p.g * p.g / p.omega + tim.ground_energy_per_site(eff)
    return VariationalSolution(
        kind=AnsatzKind.LANG_FIRSOV,
        f_star=p.g,
        alpha_star=0.0,
        energy_per_site=energy,
        lam=lam,
        spin_magnetization=m,
        boson_polarization=2.0 * abs(p.g) / p.omega * m,
        ordered=lam < 1.0,
    )


def lf_critical_g(omega0: float, omega: float) -> float:
    """
    Coupling at which h_t = J in the Lang-Firsov theory.

    Solves (omega0/2) exp(-4x/omega^2) = 2x/omega for x = g^2; the left side
    decreases and the right side increases, so the root is unique.
    """
    if omega <= 0.0 or omega0 < 0.0:
        raise DomainError(f"need omega > 0 and omega0 >= 0, got omega={omega}, omega0={omega0}")
    if omega0 == 0.0:
        return 0.0

    def crossing(x: float) -> float:
        return 0.5 * omega0 * math.exp(-4.0 * x / omega ** 2) - 2.0 * x / omega

    x_hi = 0.25 * omega0 * omega
    x = optimize.brentq(crossing, 0.0, x_hi, xtol=1e-300, rtol=0.5 * SOLVER_CONFIG['lf_rtol'], maxiter=500)
    return math.sqrt(x)


def lf_finite_energy(p: ChainParams, N: int) -> float:
    """Total LF energy on a periodic N-site chain, using the finite-N Ising ground state."""
    return N * (-2.0 * p.g * p.g / p.omega) + tim.finite_ground_energy(lf_effective(p), N)


# --- Silbey-Harris ---------------------------------------------------------

def sh_effective(p: ChainParams, f: float, alpha: float) -> TimParams:
    """Mixed-field Ising couplings J(f), h_t(f), h_l(f, alpha) of the SH frame."""
    return TimParams(
        J=2.0 * f * (f - 2.0 * p.g) / p.omega,
        h_t=0.5 * p.omega0 * math.exp(-4.0 * f * f / p.omega ** 2),
        h_l=4.0 * alpha * (p.g - f),
    )


def _zero_field(eff: TimParams) -> TimParams:
    return TimParams(J=eff.J, h_t=eff.h_t)


def sh_energy(p: ChainParams, f: float, alpha: float) -> float:
    """
    SH variational energy per site with the Hartree-Fock longitudinal term.

    <sx> inside the longitudinal term is the zero-field Ising magnetization
    evaluated at lambda_t = h_t(f)/|J(f)|.
    """
    eff = sh_effective(p, f, alpha)
    m = tim.magnetization(eff.lam)
    return (
        eff.J
        + p.omega * alpha * alpha
        + tim.ground_energy_per_site(_zero_field(eff))
        + eff.h_l * m
    )


def sh_finite_energy(p: ChainParams, f: float, alpha: float, N: int) -> float:
    """
    Expectation value of H in the SH trial state on a periodic N-site chain.

    The finite-N Ising ground state has <sx> = 0, so the longitudinal term drops.
    """
    eff = sh_effective(p, f, alpha)
    return N * (eff.J + p.omega * alpha * alpha) + tim.finite_ground_energy(_zero_field(eff), N)


def _sh_solution(p: ChainParams, f: float, alpha: float, converged: bool, evaluations: int) -> VariationalSolution:
    eff = sh_effective(p, f, alpha)
    lam = eff.lam
    m = tim.magnetization(lam)
    return VariationalSolution(
        kind=AnsatzKind.SILBEY_HARRIS,
        f_star=f,
        alpha_star=abs(alpha),
        energy_per_site=sh_energy(p, f, alpha),
        lam=lam,
        spin_magnetization=m,
        boson_polarization=abs(2.0 * f / p.omega * m - alpha),
        ordered=lam < 1.0,
        converged=converged,
        evaluations=evaluations,
    )


def _minimize_from(p: ChainParams, start: Tuple[float, float]) -> optimize.OptimizeResult:
    # work in units of the largest frequency so tolerances are relative
    s = p.scale
    alpha_step = 0.1 * max(1.0, 2.0 * abs(p.g) / p.omega)
    x0 = np.array([start[0] / s, start[1]])
    simplex = np.array([x0, x0 + [0.05, 0.0], x0 + [0.0, alpha_step]])

    def objective(x: np.ndarray) -> float:
        return sh_energy(p, x[0] * s, x[1]) / s

    return optimize.minimize(
        objective,
        x0,
        method='Nelder-Mead',
        options={
            'initial_simplex': simplex,
            'xatol': SOLVER_CONFIG['xatol_rel'],
            'fatol': SOLVER_CONFIG['fatol'],
            'maxiter': SOLVER_CONFIG['maxiter'],
            'maxfev': 2 * SOLVER_CONFIG['maxiter'],
        },
    )


def sh_solve(p: ChainParams) -> VariationalSolution:
    """
    Minimize the SH energy over (f, alpha) from the LF start (g, 0) and the
    unpolarized start (0, 0), keeping the lower result.

    Raises:
        ConvergenceError: if neither start converged; `best` holds the lower iterate
    """
    if p.g == 0.0:
        return _sh_solution(p, 0.0, 0.0, True, 0)

    s = p.scale
    results = []
    for start in ((p.g, 0.0), (0.0, 0.0)):
        res = _minimize_from(p, start)
        logger.debug(f"SH start {start}: E={res.fun * s:.15g} success={res.success} nfev={res.nfev}")
        results.append(res)

    converged = [r for r in results if r.success]
    pool = converged or results
    best = min(pool, key=lambda r: r.fun)
    evaluations = sum(r.nfev for r in results)
    solution = _sh_solution(p, best.x[0] * s, best.x[1], bool(converged), evaluations)
    if not converged:
        logger.error(f"SH minimization did not converge for {p}")
        raise ConvergenceError("minimization did not converge", best=solution)
    return solution


def sh_critical_g(omega0: float, omega: float) -> float:
    """
    Smallest coupling at which the SH minimizer orders (lambda_t < 1).

    Brackets by doubling from the LF critical coupling, then bisects with a
    fresh SH minimization per point.
    """
    if omega <= 0.0 or omega0 < 0.0:
        raise DomainError(f"need omega > 0 and omega0 >= 0, got omega={omega}, omega0={omega0}")
    if omega0 == 0.0:
        return 0.0

    def ordered(g: float) -> bool:
        return sh_solve(ChainParams(omega0, omega, g)).ordered

    lo = 0.0
    hi = max(lf_critical_g(omega0, omega), 1e-6 * max(omega, omega0))
    for _ in range(SOLVER_CONFIG['max_bracket_doublings']):
        if ordered(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError(f"no ordered SH solution found up to g={hi}", best=hi)
    logger.info(f"SH critical bracket [{lo}, {hi}] for omega0={omega0}, omega={omega}")

    rtol = SOLVER_CONFIG['sh_rtol']
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if ordered(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve(p: ChainParams, kind: AnsatzKind) -> VariationalSolution:
    if AnsatzKind(kind) is AnsatzKind.LANG_FIRSOV:
        return lf_solve(p)
    return sh_solve(p)


def solution_finite_energy(p: ChainParams, solution: VariationalSolution, N: int) -> float:
    """Finite-N variational energy of a solved ansatz (total, not per site)."""
    if solution.kind is AnsatzKind.LANG_FIRSOV:
        return lf_finite_energy(p, N)
    return sh_finite_energy(p, solution.f_star, solution.alpha_star, N)


# --- phase diagrams --------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """
    Rectangular sweep grid.

    kind 'cartesian' reads (axis_a, axis_b) as (omega, omega0); kind 'polar'
    reads them as (delta, theta) with omega = delta cos theta and
    omega0 = delta sin theta, theta in [0, pi/2]. The coupling axis is innermost.
    """

    kind: str
    axis_a: Tuple[float, ...]
    axis_b: Tuple[float, ...]
    g: Tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ('cartesian', 'polar'):
            raise DomainError(f"unknown grid kind {self.kind!r}")
        for name in ('axis_a', 'axis_b', 'g'):
            values = getattr(self, name)
            if len(values) == 0 or not all(math.isfinite(v) for v in values):
                raise DomainError(f"grid axis {name} must be non-empty and finite")
        if self.kind == 'polar' and any(not 0.0 <= t <= math.pi / 2 for t in self.axis_b):
            raise DomainError("theta must lie in [0, pi/2]")

    @property
    def size(self) -> int:
        return len(self.axis_a) * len(self.axis_b) * len(self.g)

    def points(self) -> List[Tuple[Tuple[int, int, int], float, float, float]]:
        """Row-major (index, omega, omega0, g) tuples."""
        out = []
        for i, a in enumerate(self.axis_a):
            for j, b in enumerate(self.axis_b):
                omega, omega0 = polar_grid(a, b) if self.kind == 'polar' else (a, b)
                for k, g in enumerate(self.g):
                    out.append(((i, j, k), omega, omega0, g))
        return out


def polar_grid(delta: float, theta: float) -> Tuple[float, float]:
    """(omega, omega0) = (delta cos theta, delta sin theta)."""
    return delta * math.cos(theta), delta * math.sin(theta)


@dataclass
class PhaseRow:
    index: Tuple[int, int, int]
    omega: float
    omega0: float
    g: float
    solutions: Dict[str, VariationalSolution] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return not self.solutions


def _solve_point(task: Tuple[Tuple[int, int, int], float, float, float, Tuple[str, ...]]) -> PhaseRow:
    index, omega, omega0, g, kinds = task
    row = PhaseRow(index, omega, omega0, g)
    try:
        p = ChainParams(omega0, omega, g)
    except IsbError as e:
        for kind in kinds:
            row.errors[kind] = str(e)
        return row
    for kind in kinds:
        try:
            row.solutions[kind] = solve(p, AnsatzKind(kind))
        except IsbError as e:
            logger.warning(f"{kind} failed at omega={omega}, omega0={omega0}, g={g}: {e}")
            row.errors[kind] = str(e)
    return row


def phase_diagram(
    grid: GridSpec,
    kinds: Sequence[AnsatzKind] = (AnsatzKind.LANG_FIRSOV, AnsatzKind.SILBEY_HARRIS),
    workers: int = 1,
) -> List[PhaseRow]:
    """
    Solve every grid point with every requested ansatz.

    Rows come back in row-major order regardless of the worker count; failures
    are stored in the row and the sweep continues.
    """
    kind_values = tuple(AnsatzKind(k).value for k in kinds)
    tasks = [(index, omega, omega0, g, kind_values) for index, omega, omega0, g in grid.points()]
    logger.info(f"Phase diagram: {len(tasks)} points, kinds={kind_values}, workers={workers}")
    if workers <= 1 or len(tasks) <= 1:
        return [_solve_point(t) for t in tasks]
    chunksize = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_point, tasks, chunksize=chunksize))
