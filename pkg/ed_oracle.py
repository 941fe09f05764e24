"""
Exact diagonalization of the ISB chain in a truncated boson Fock space.

Basis layout: the 2^N spin configurations are the outer index and the
(n_max+1)^N boson occupations the inner index; inside each factor site 0 is the
most significant digit. Spin state 0 is sigma_z = +1. Sites are numbered from 0,
so the probe couples to sigma_x of site 0. Boson i sits between spins i and i+1
and couples to g (sigma_x_i - sigma_x_{i+1}).
"""

import cmath
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import signal

from ansatz_gs import ChainParams, sh_effective
from config import ED_CONFIG
from errors import ConvergenceError, DimensionCapError, DomainError
from tim import TimParams

if TYPE_CHECKING:
    from spectroscopy import ProbeParams, SpectrumCurve

logger = logging.getLogger(__name__)

BOUNDARIES = ('periodic', 'open')
DUMP_MAGIC = b'ISBV'
DUMP_VERSION = 1
# magic, version, N, n_max, boundary, k, dim
DUMP_HEADER = struct.Struct('<4sIIIIIQ')

SIGMA_X = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
SIGMA_Z = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))

OperatorSpec = Tuple


@dataclass(frozen=True)
class TruncationSpec:
    """Boson cutoff n_max per site, number of unit cells N and boundary condition."""

    n_max: int
    N: int
    boundary: str = 'periodic'

    def __post_init__(self):
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if not isinstance(self.N, int) or self.N < 2:
            raise DomainError(f"N must be an integer >= 2, got {self.N!r}")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.boundary == 'periodic' and self.N % 2:
            raise DomainError(f"periodic chains need an even N, got {self.N}")

    @property
    def spin_dim(self) -> int:
        return 2 ** self.N

    @property
    def boson_dim(self) -> int:
        return (self.n_max + 1) ** self.N

    @property
    def dimension(self) -> int:
        return self.spin_dim * self.boson_dim

    def check_cap(self, factor: int = 1, cap: Optional[int] = None):
        cap = ED_CONFIG['max_amplitudes'] if cap is None else cap
        dim = self.dimension * factor
        if dim > cap:
            raise DimensionCapError(f"Hilbert dimension {dim} exceeds the cap of {cap} amplitudes")
        return dim

    def with_n_max(self, n_max: int) -> 'TruncationSpec':
        return TruncationSpec(n_max, self.N, self.boundary)


def _embed(op: sp.spmatrix, site: int, sites: int, local_dim: int) -> sp.csr_matrix:
    left = sp.identity(local_dim ** site, format='csr')
    right = sp.identity(local_dim ** (sites - site - 1), format='csr')
    return sp.kron(sp.kron(left, op, format='csr'), right, format='csr')


def boson_ops(n_max: int) -> Dict[str, sp.csr_matrix]:
    a = sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format='csr')
    return {'a': a, 'x': (a + a.T).tocsr(), 'p': (a.T - a).tocsr(), 'n': (a.T @ a).tocsr()}


class ChainOperators:
    """
    Site operators of a truncated chain, built on demand and cached.

    spin() and boson() return operators on their own factor; full() embeds a
    site operator into the product space.
    """

    def __init__(self, t: TruncationSpec):
        self.truncation = t
        self._local_bosons = boson_ops(t.n_max)
        self._spin_cache: Dict[Tuple[str, int], sp.csr_matrix] = {}
        self._boson_cache: Dict[Tuple[str, int], sp.csr_matrix] = {}
        self._full_cache: Dict[Tuple[str, int], sp.csr_matrix] = {}

    @property
    def N(self) -> int:
        return self.truncation.N

    @property
    def dim(self) -> int:
        return self.truncation.dimension

    def spin(self, name: str, site: int) -> sp.csr_matrix:
        key = (name, site)
        if key not in self._spin_cache:
            local = {'sigma_x': SIGMA_X, 'sigma_z': SIGMA_Z}[name]
            self._spin_cache[key] = _embed(local, site, self.N, 2)
        return self._spin_cache[key]

    def boson(self, name: str, site: int) -> sp.csr_matrix:
        key = (name, site)
        if key not in self._boson_cache:
            self._boson_cache[key] = _embed(self._local_bosons[name], site, self.N, self.truncation.n_max + 1)
        return self._boson_cache[key]

    def full(self, name: str, site: int) -> sp.csr_matrix:
        key = (name, site)
        if key not in self._full_cache:
            t = self.truncation
            if name.startswith('sigma'):
                op = sp.kron(self.spin(name, site), sp.identity(t.boson_dim, format='csr'), format='csr')
            else:
                op = sp.kron(sp.identity(t.spin_dim, format='csr'), self.boson(name, site), format='csr')
            self._full_cache[key] = op
        return self._full_cache[key]

    def bond_spin(self, boson_site: int) -> sp.csr_matrix:
        """Spin combination sigma_x_i - sigma_x_{i+1} seen by boson i (sigma_x_i alone at an open end)."""
        i = boson_site
        if i + 1 < self.N:
            return (self.spin('sigma_x', i) - self.spin('sigma_x', i + 1)).tocsr()
        if self.truncation.boundary == 'periodic':
            return (self.spin('sigma_x', i) - self.spin('sigma_x', 0)).tocsr()
        return self.spin('sigma_x', i)

    def parity_diagonal(self) -> np.ndarray:
        """Diagonal of prod_i sigma_z_i (-1)^{n_i}, which commutes with H."""
        t = self.truncation
        spins = np.ones(1)
        for _ in range(t.N):
            spins = np.kron(spins, np.array([1.0, -1.0]))
        bosons = np.ones(1)
        local = (-1.0) ** np.arange(t.n_max + 1)
        for _ in range(t.N):
            bosons = np.kron(bosons, local)
        return np.kron(spins, bosons)

    def operator(self, spec: OperatorSpec) -> sp.csr_matrix:
        """
        Full-space operator from a spec tuple.

        Supported: ('sigma_x', j), ('sigma_z', j), ('a', j), ('n', j),
        ('a_q', qd), ('sigma_x_q', qd), ('staggered_sigma_x',), ('parity',).
        """
        if not spec:
            raise DomainError("empty operator spec")
        name = spec[0]
        if name in ('sigma_x', 'sigma_z', 'a', 'n'):
            site = int(spec[1])
            if not 0 <= site < self.N:
                raise DomainError(f"site {site} out of range for N={self.N}")
            return self.full(name, site)
        if name in ('a_q', 'sigma_x_q'):
            qd = float(spec[1])
            local = 'a' if name == 'a_q' else 'sigma_x'
            op = sum(cmath.exp(-1j * qd * j) * self.full(local, j) for j in range(self.N))
            return (op / math.sqrt(self.N)).tocsr()
        if name == 'staggered_sigma_x':
            op = sum((-1) ** j * self.full('sigma_x', j) for j in range(self.N))
            return (op / self.N).tocsr()
        if name == 'parity':
            return sp.diags(self.parity_diagonal(), format='csr')
        raise DomainError(f"unknown operator {spec!r}")


def build_hamiltonian(p: ChainParams, t: TruncationSpec, ops: Optional[ChainOperators] = None) -> sp.csr_matrix:
    """
    Sparse ISB Hamiltonian

        H = (omega0/2) sum_i sz_i + omega sum_i n_i + g sum_i sx_i (x_i - x_{i-1})

    with x_{-1} = x_{N-1} on a periodic chain and dropped on an open one.

    Raises:
        DimensionCapError: if the truncated space exceeds the amplitude cap
    """
    t.check_cap()
    if p.N is not None and p.N != t.N:
        raise DomainError(f"ChainParams.N={p.N} does not match truncation N={t.N}")
    ops = ops or ChainOperators(t)

    spin_part = sum(ops.spin('sigma_z', j) for j in range(t.N)) * (0.5 * p.omega0)
    boson_part = sum(ops.boson('n', j) for j in range(t.N)) * p.omega
    H = sp.kron(spin_part, sp.identity(t.boson_dim), format='csr')
    H = H + sp.kron(sp.identity(t.spin_dim), boson_part, format='csr')
    if p.g != 0.0:
        for i in range(t.N):
            H = H + sp.kron(ops.bond_spin(i), p.g * ops.boson('x', i), format='csr')
    logger.debug(f"Built H with dim={t.dimension}, nnz={H.nnz}")
    return H.tocsr()


def tim_hamiltonian(p: TimParams, N: int, boundary: str = 'periodic') -> sp.csr_matrix:
    """Spin-only chain J sum sx_i sx_{i+1} + h_t sum sz_i + h_l sum sx_i on 2^N states."""
    bonds = N if boundary == 'periodic' else N - 1
    H = sp.csr_matrix((2 ** N, 2 ** N))
    for i in range(bonds):
        H = H + p.J * (_embed(SIGMA_X, i, N, 2) @ _embed(SIGMA_X, (i + 1) % N, N, 2))
    for i in range(N):
        H = H + p.h_t * _embed(SIGMA_Z, i, N, 2) + p.h_l * _embed(SIGMA_X, i, N, 2)
    return H.tocsr()


@dataclass
class EdObservables:
    sigma_x: np.ndarray
    sigma_z: np.ndarray
    a: np.ndarray
    n: np.ndarray
    staggered_order: float
    correlator: np.ndarray
    parity: float

    def to_dict(self) -> Dict[str, object]:
        return {
            'sigma_x': self.sigma_x.tolist(),
            'sigma_z': self.sigma_z.tolist(),
            'a_real': self.a.real.tolist(),
            'a_imag': self.a.imag.tolist(),
            'n': self.n.tolist(),
            'staggered_order': self.staggered_order,
            'correlator': self.correlator.tolist(),
            'parity': self.parity,
        }


@dataclass
class EdResult:
    """Lowest eigenpairs of a truncated chain and ground-state observables."""

    params: ChainParams
    truncation: TruncationSpec
    energies: np.ndarray
    vectors: np.ndarray
    observables: EdObservables
    residual: float
    drift: Optional[float] = None
    converged: bool = True
    operators: ChainOperators = field(default=None, repr=False)
    hamiltonian: sp.csr_matrix = field(default=None, repr=False)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_vector(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def k(self) -> int:
        return len(self.energies)

    def summary(self) -> Dict[str, object]:
        return {
            'N': self.truncation.N,
            'n_max': self.truncation.n_max,
            'boundary': self.truncation.boundary,
            'energies': self.energies.tolist(),
            'residual': self.residual,
            'drift': self.drift,
            'converged': self.converged,
            **self.observables.to_dict(),
        }


def expectation(ops: ChainOperators, vector: np.ndarray, spec: OperatorSpec) -> complex:
    return complex(np.vdot(vector, ops.operator(spec) @ vector))


def _observables(ops: ChainOperators, v: np.ndarray) -> EdObservables:
    N = ops.N
    sx = np.array([expectation(ops, v, ('sigma_x', j)).real for j in range(N)])
    sz = np.array([expectation(ops, v, ('sigma_z', j)).real for j in range(N)])
    a = np.array([expectation(ops, v, ('a', j)) for j in range(N)])
    n = np.array([expectation(ops, v, ('n', j)).real for j in range(N)])
    stag = ops.operator(('staggered_sigma_x',))
    sv = stag @ v
    order = math.sqrt(max(0.0, float(np.vdot(sv, sv).real)))
    sx0v = ops.full('sigma_x', 0) @ v
    correlator = np.array([np.vdot(ops.full('sigma_x', j) @ v, sx0v).real for j in range(N)])
    parity = float(np.vdot(v, ops.parity_diagonal() * v).real)
    return EdObservables(sx, sz, a, n, order, correlator, parity)


def _diagonalize(H: sp.csr_matrix, k: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    dim = H.shape[0]
    if dim <= ED_CONFIG['dense_cutoff']:
        energies, vectors = np.linalg.eigh(H.toarray())
        return energies[:k], vectors[:, :k]

    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    ncv = min(dim, ED_CONFIG['krylov_cap'], max(2 * k + 1, 20))
    try:
        energies, vectors = spla.eigsh(H, k=k, which='SA', v0=v0, ncv=ncv, maxiter=10 * dim)
    except spla.ArpackNoConvergence as e:
        logger.error(f"Lanczos did not converge: {len(e.eigenvalues)} of {k} eigenpairs")
        raise ConvergenceError("Lanczos did not converge", best=e.eigenvalues)
    order = np.argsort(energies)
    return energies[order], vectors[:, order]


def ground_state(
    p: ChainParams,
    t: TruncationSpec,
    k: int = 1,
    seed: Optional[int] = None,
    check_drift: bool = True,
) -> EdResult:
    """
    Lowest k eigenpairs of the truncated chain.

    Args:
        p: Chain parameters
        t: Truncation; its N overrides an unset ChainParams.N
        k: Number of eigenpairs, at most ED_CONFIG['max_eigenpairs']
        seed: Start-vector seed for the sparse solver
        check_drift: Also solve at n_max - 1 and report the energy drift

    Returns:
        EdResult with energies ascending and observables of the lowest state

    Raises:
        ConvergenceError: if the eigensolver stops early or a residual is too large
    """
    if not 1 <= k <= ED_CONFIG['max_eigenpairs']:
        raise DomainError(f"k must lie in [1, {ED_CONFIG['max_eigenpairs']}], got {k}")
    if k > t.dimension:
        raise DomainError(f"k={k} exceeds the Hilbert dimension {t.dimension}")
    seed = ED_CONFIG['default_seed'] if seed is None else seed

    ops = ChainOperators(t)
    H = build_hamiltonian(p, t, ops)
    energies, vectors = _diagonalize(H, k, seed)

    h_norm = max(spla.norm(H, np.inf), 1.0)
    residual = max(float(np.linalg.norm(H @ vectors[:, i] - energies[i] * vectors[:, i])) for i in range(k))
    if residual > ED_CONFIG['residual_rtol'] * h_norm:
        raise ConvergenceError(f"eigenpair residual {residual:.3e} above tolerance", best=energies, residual=residual)

    observables = _observables(ops, vectors[:, 0])
    drift = None
    if check_drift and t.n_max > 1:
        lower = ground_state(p, t.with_n_max(t.n_max - 1), k=1, seed=seed, check_drift=False)
        drift = float(lower.energies[0] - energies[0])
    converged = bool(np.all(observables.n < 0.5 * t.n_max))
    if not converged:
        logger.warning(f"boson occupation {observables.n.max():.3g} too close to n_max={t.n_max}")

    logger.info(f"ED N={t.N} n_max={t.n_max} dim={t.dimension}: E0={energies[0]:.12g}")
    return EdResult(p, t, np.asarray(energies, dtype=float), vectors, observables, residual,
                    drift, converged, ops, H)


def matrix_element(result: EdResult, operator: OperatorSpec, bra: int = 0, ket: int = 0) -> complex:
    """<bra|O|ket> between computed eigenvectors of `result`."""
    for index in (bra, ket):
        if not 0 <= index < result.k:
            raise DomainError(f"eigen index {index} out of range (k={result.k})")
    op = result.operators.operator(operator)
    return complex(np.vdot(result.vectors[:, bra], op @ result.vectors[:, ket]))


def transition_weights(result: EdResult, operator: OperatorSpec) -> np.ndarray:
    """|<n|O|0>|^2 for every computed eigenvector n."""
    op = result.operators.operator(operator)
    projected = result.vectors.conj().T @ (op @ result.ground_vector)
    return np.abs(projected) ** 2


@dataclass
class BrokenSymmetryState:
    vector: np.ndarray
    staggered_magnetization: float
    sigma_x: np.ndarray
    a: np.ndarray


def broken_symmetry_state(result: EdResult, manifold_size: int = 2) -> BrokenSymmetryState:
    """
    Diagonalize the staggered magnetization inside the lowest `manifold_size`
    eigenstates and return the combination with the largest positive value.
    """
    if not 1 <= manifold_size <= result.k:
        raise DomainError(f"manifold size {manifold_size} needs at least that many eigenpairs (k={result.k})")
    ops = result.operators
    basis = result.vectors[:, :manifold_size]
    stag = ops.operator(('staggered_sigma_x',))
    block = basis.conj().T @ (stag @ basis)
    values, coeffs = np.linalg.eigh(0.5 * (block + block.conj().T))
    v = basis @ coeffs[:, -1]
    sx = np.array([expectation(ops, v, ('sigma_x', j)).real for j in range(ops.N)])
    a = np.array([expectation(ops, v, ('a', j)) for j in range(ops.N)])
    return BrokenSymmetryState(v, float(values[-1]), sx, a)


def coherent_state(alpha: float, n_max: int) -> np.ndarray:
    """Coherent state |alpha> cut at n_max and renormalized."""
    n = np.arange(n_max + 1)
    log_fact = np.cumsum(np.log(np.maximum(n, 1)))
    if alpha == 0.0:
        amp = (n == 0).astype(float)
    else:
        amp = np.sign(alpha) ** n * np.exp(n * math.log(abs(alpha)) - 0.5 * log_fact - 0.5 * alpha * alpha)
    return amp / np.linalg.norm(amp)


def ansatz_state(p: ChainParams, t: TruncationSpec, f: float, alpha: float, ops: Optional[ChainOperators] = None) -> np.ndarray:
    """
    Variational trial state in the truncated space.

    The spin factor is the exact ground state of the finite Ising chain
    -J(f) sum sx sx + h_t(f) sum sz, the bosons carry staggered coherent
    amplitudes (-1)^i alpha, and the spin-conditioned displacement
    exp(-(f/omega) sum_i S_i (a_i^dag - a_i)) is applied last. f = g, alpha = 0
    is the Lang-Firsov state.
    """
    if t.boundary != 'periodic':
        raise DomainError("trial states are defined on periodic chains")
    t.check_cap()
    ops = ops or ChainOperators(t)
    eff = sh_effective(p, f, alpha)
    spin_H = tim_hamiltonian(TimParams(J=-eff.J, h_t=eff.h_t), t.N)
    _, spin_vecs = np.linalg.eigh(spin_H.toarray())
    psi = spin_vecs[:, 0]

    bosons = np.ones(1)
    for i in range(t.N):
        bosons = np.kron(bosons, coherent_state((-1) ** i * alpha, t.n_max))
    state = np.kron(psi, bosons)

    if f != 0.0:
        generator = sum(sp.kron(ops.bond_spin(i), ops.boson('p', i), format='csr') for i in range(t.N))
        state = spla.expm_multiply((-f / p.omega) * generator.tocsc(), state)
    return state


def ansatz_expectation(p: ChainParams, t: TruncationSpec, f: float, alpha: float) -> float:
    """<H> in the truncated trial state built by ansatz_state."""
    ops = ChainOperators(t)
    H = build_hamiltonian(p, t, ops)
    state = ansatz_state(p, t, f, alpha, ops)
    return float(np.vdot(state, H @ state).real / np.vdot(state, state).real)


@dataclass
class ProbeSeries:
    """Time series of <a_j(t)> for every site and of the probe mode <b(t)>."""

    times: np.ndarray
    a: np.ndarray
    probe: np.ndarray
    norm_error: float

    def to_rows(self) -> List[Dict[str, float]]:
        rows = []
        for i, t in enumerate(self.times):
            row = {'t': float(t)}
            for j in range(self.a.shape[1]):
                row[f'a{j}_re'] = float(self.a[i, j].real)
                row[f'a{j}_im'] = float(self.a[i, j].imag)
            rows.append(row)
        return rows


def probe_dynamics(
    p: ChainParams,
    t: TruncationSpec,
    probe: 'ProbeParams',
    n_p: int,
    t_grid: Sequence[float],
    result: Optional[EdResult] = None,
) -> ProbeSeries:
    """
    Evolve chain ground state x probe coherent state |alpha_p> under

        H + omega_p b^dag b + g_p sx_0 (b + b^dag)

    and record <a_j(t)> on a uniform time grid.

    Raises:
        DimensionCapError: if the chain-plus-probe space is too large
        ConvergenceError: if the propagated norm drifts by more than 1e-8
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or len(times) < 2:
        raise DomainError("t_grid needs at least two points")
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise DomainError("t_grid must be uniform and increasing")
    if n_p < 1:
        raise DomainError(f"probe truncation must be >= 1, got {n_p}")
    t.check_cap(factor=n_p + 1)

    if result is None:
        result = ground_state(p, t, k=1, check_drift=False)
    ops = result.operators
    H = result.hamiltonian
    probe_ops = boson_ops(n_p)
    I_p = sp.identity(n_p + 1, format='csr')
    I_c = sp.identity(t.dimension, format='csr')
    H_aug = (
        sp.kron(H, I_p, format='csr')
        + probe.omega_p * sp.kron(I_c, probe_ops['n'], format='csr')
        + probe.g_p * sp.kron(ops.full('sigma_x', 0), probe_ops['x'], format='csr')
    )

    psi0 = np.kron(result.ground_vector, coherent_state(probe.alpha_p, n_p)).astype(complex)
    states = spla.expm_multiply(
        -1j * H_aug.tocsc(), psi0, start=times[0], stop=times[-1], num=len(times), endpoint=True
    )

    norms = np.linalg.norm(states, axis=1)
    norm_error = float(np.max(np.abs(norms - 1.0)))
    if norm_error > 1e-8:
        raise ConvergenceError(f"propagated norm drifted by {norm_error:.3e}", residual=norm_error)

    a_ops = [sp.kron(ops.full('a', j), I_p, format='csr') for j in range(t.N)]
    a_series = np.array([[np.vdot(s, op @ s) for op in a_ops] for s in states])
    b_op = sp.kron(I_c, probe_ops['a'], format='csr')
    b_series = np.array([np.vdot(s, b_op @ s) for s in states])
    logger.info(f"Probe dynamics: {len(times)} steps, dim={H_aug.shape[0]}, norm error {norm_error:.2e}")
    return ProbeSeries(times, a_series, b_series, norm_error)


def response_spectrum(series: ProbeSeries, window: str = 'hann') -> 'SpectrumCurve':
    """
    Space-time Fourier transform of <a_j(t)> - <a_j(t0)>, giving the ED
    counterpart of the Kubo observable |A_k(nu)|.
    """
    from spectroscopy import SpectrumCurve

    times = series.times
    dt = times[1] - times[0]
    M, N = series.a.shape
    deviation = series.a - series.a[0]
    taper = signal.get_window(window, M) if window else np.ones(M)

    ks = 2.0 * np.pi * np.arange(N) / N
    phases = np.exp(-1j * np.outer(ks, np.arange(N))) / math.sqrt(N)
    spatial = phases @ deviation.T
    # e^{+i nu t} convention, so a component e^{-i E t} peaks at nu = +E
    spectrum = np.fft.fftshift(M * dt * np.fft.ifft(spatial * taper, axis=1), axes=1)
    nus = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(M, dt))
    return SpectrumCurve(
        axis={'k': ks, 'nu': nus},
        values=np.abs(spectrum),
        metadata={'source': 'ed', 'window': window or 'none', 'dt': dt, 'steps': M},
    )


@dataclass
class ConvergenceTable:
    n_max: List[int]
    values: List[float]
    differences: List[Optional[float]]
    converged: bool

    def to_rows(self) -> List[Dict[str, object]]:
        return [
            {'n_max': n, 'value': v, 'difference': d}
            for n, v, d in zip(self.n_max, self.values, self.differences)
        ]


def convergence_sweep(
    p: ChainParams,
    t: TruncationSpec,
    quantity: Union[str, Callable[[EdResult], float]] = 'energy',
    tol: float = 1e-8,
    n_min: int = 1,
) -> ConvergenceTable:
    """
    Track a ground-state quantity for n_max = n_min..t.n_max.

    quantity is 'energy', 'staggered_order' or a callable on EdResult.
    """
    if not 1 <= n_min <= t.n_max:
        raise DomainError(f"n_min must lie in [1, {t.n_max}], got {n_min}")
    if isinstance(quantity, str):
        extract = {
            'energy': lambda r: r.ground_energy,
            'staggered_order': lambda r: r.observables.staggered_order,
        }.get(quantity)
        if extract is None:
            raise DomainError(f"unknown quantity {quantity!r}")
    else:
        extract = quantity

    levels, values, diffs = [], [], []
    for n_max in range(n_min, t.n_max + 1):
        value = float(extract(ground_state(p, t.with_n_max(n_max), k=1, check_drift=False)))
        diffs.append(value - values[-1] if values else None)
        levels.append(n_max)
        values.append(value)
        logger.debug(f"n_max={n_max}: {value:.15g}")
    last = diffs[-1] if len(diffs) > 1 else None
    converged = last is not None and abs(last) < tol
    return ConvergenceTable(levels, values, diffs, converged)


def vector_dump_bytes(result: EdResult) -> bytes:
    """
    Binary eigenvector dump.

    Layout: header '<4sIIIIIQ' (magic, version, N, n_max, boundary index, k,
    dim), k little-endian float64 energies, then k vectors of dim
    little-endian complex128 (real, imag pairs) in basis order.
    """
    t = result.truncation
    header = DUMP_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, t.N, t.n_max, BOUNDARIES.index(t.boundary),
                              result.k, t.dimension)
    return (
        header
        + np.asarray(result.energies, dtype='<f8').tobytes()
        + np.ascontiguousarray(result.vectors.T, dtype='<c16').tobytes()
    )


def dump_vectors(result: EdResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_bytes(vector_dump_bytes(result))
    return path


def load_vectors(path: Union[str, Path]) -> Tuple[TruncationSpec, np.ndarray, np.ndarray]:
    """Read a dump_vectors file back as (truncation, energies, vectors[dim, k])."""
    data = Path(path).read_bytes()
    magic, version, N, n_max, boundary, k, dim = DUMP_HEADER.unpack_from(data)
    if magic != DUMP_MAGIC or version != DUMP_VERSION:
        raise DomainError(f"{path} is not an eigenvector dump")
    t = TruncationSpec(n_max, N, BOUNDARIES[boundary])
    offset = DUMP_HEADER.size
    energies = np.frombuffer(data, dtype='<f8', count=k, offset=offset)
    offset += 8 * k
    vectors = np.frombuffer(data, dtype='<c16', count=k * dim, offset=offset).reshape(k, dim).T
    return t, energies.copy(), vectors.copy()
