"""
Command-line front end of the ISB chain laboratory.

Each subcommand reads an optional TOML file, applies flag overrides, validates
the merged configuration and writes CSV/JSON tables plus a manifest into the
output directory.
"""

import argparse
import logging
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

import ansatz_exc
import ansatz_gs
import ed_oracle
import spectroscopy
from ansatz_gs import AnsatzKind, ChainParams, GridSpec
from artifacts import ArtifactWriter, utc_now
from config import CLI_CONFIG, ED_CONFIG, __version__
from ed_oracle import TruncationSpec
from errors import ConfigError, ConvergenceError, DimensionCapError, DomainError, IsbError
from models import DatabaseManager
from spectroscopy import ProbeParams

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

SOLUTION_FIELDS = ('lambda', 'spin_magnetization', 'boson_polarization', 'energy_per_site',
                   'f_star', 'alpha_star', 'ordered', 'converged')


@dataclass(frozen=True)
class RunOptions:
    """[run] table: solver choice, output handling, workers and seed."""

    ansatz: str = 'lf'
    output_dir: Optional[str] = None
    formats: tuple = ('csv', 'json')
    workers: int = 1
    seed: int = ED_CONFIG['default_seed']
    k: int = 4
    quantity: str = 'energy'
    tol: float = 1e-8
    n_min: int = 1
    catalog: bool = True
    dump_vectors: bool = False
    dynamics: bool = False

    def __post_init__(self):
        if self.ansatz not in ('lf', 'sh', 'ed'):
            raise ConfigError(f"ansatz must be lf, sh or ed, got {self.ansatz!r}")
        if not self.formats or not set(self.formats) <= {'csv', 'json'}:
            raise ConfigError(f"formats must be a non-empty subset of csv, json, got {self.formats!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 1 <= self.k <= ED_CONFIG['max_eigenpairs']:
            raise ConfigError(f"k must lie in [1, {ED_CONFIG['max_eigenpairs']}], got {self.k}")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class SpectrumOptions:
    """[spectrum] table: momentum and frequency grids, Fano couplings, probe dynamics."""

    n_q: int = 64
    band_grid: str = 'uniform'
    nu_min: float = 0.0
    nu_max: float = 3.0
    n_nu: int = 601
    omega_min: float = 0.0
    omega_max: float = 3.0
    n_omega: int = 3001
    couplings: str = 'uniform'
    gamma0: float = 0.005
    chi: float = 0.0
    n_p: int = 4
    t_max: float = 100.0
    steps: int = 2048

    def __post_init__(self):
        if self.band_grid not in ('uniform', 'finite'):
            raise ConfigError(f"band_grid must be uniform or finite, got {self.band_grid!r}")
        if self.couplings not in ('uniform', 'oracle'):
            raise ConfigError(f"couplings must be uniform or oracle, got {self.couplings!r}")
        for lo, hi, n in (('nu_min', 'nu_max', 'n_nu'), ('omega_min', 'omega_max', 'n_omega')):
            if getattr(self, hi) <= getattr(self, lo) or getattr(self, n) < 2:
                raise ConfigError(f"{lo} < {hi} and {n} >= 2 required")
        if self.n_q < 1 or self.n_p < 1 or self.steps < 2 or self.t_max <= 0:
            raise ConfigError("n_q, n_p >= 1, steps >= 2 and t_max > 0 required")

    def nu_grid(self) -> np.ndarray:
        return np.linspace(self.nu_min, self.nu_max, self.n_nu)

    def omega_grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_omega)

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)


SECTIONS = {
    'chain': ChainParams,
    'probe': ProbeParams,
    'truncation': TruncationSpec,
    'grid': GridSpec,
    'spectrum': SpectrumOptions,
    'run': RunOptions,
}

REQUIRED = {
    'ground': ('chain',),
    'phase-diagram': ('grid',),
    'bands': ('chain',),
    'kubo': ('chain',),
    'fano': ('chain',),
    'ed': ('chain', 'truncation'),
    'convergence': ('chain', 'truncation'),
}


def _build_section(name: str, data: Dict[str, Any]):
    cls = SECTIONS[name]
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items() if v is not None}
    try:
        return cls(**values)
    except (DomainError, TypeError) as e:
        raise ConfigError(f"invalid [{name}]: {e}") from e


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration of one command."""

    command: str
    chain: Optional[ChainParams] = None
    probe: Optional[ProbeParams] = None
    truncation: Optional[TruncationSpec] = None
    grid: Optional[GridSpec] = None
    spectrum: SpectrumOptions = field(default_factory=SpectrumOptions)
    run: RunOptions = field(default_factory=RunOptions)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        data = dict(data)
        command = data.pop('command', None)
        if command not in REQUIRED:
            raise ConfigError(f"unknown command {command!r}")
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")

        sections = {name: _build_section(name, table) for name, table in data.items() if table is not None}
        missing = [name for name in REQUIRED[command] if name not in sections]
        if missing:
            raise ConfigError(f"{command} needs [{'], ['.join(missing)}]")
        if command in ('kubo', 'fano') and 'probe' not in sections:
            sections['probe'] = ProbeParams()
        config = cls(command=command, **sections)
        config._check_consistency()
        return config

    def _check_consistency(self):
        if self.chain is not None and self.truncation is not None:
            if self.chain.N is not None and self.chain.N != self.truncation.N:
                raise ConfigError(f"chain N={self.chain.N} differs from truncation N={self.truncation.N}")
        if self.command in ('kubo', 'fano') and self.chain.N is None:
            raise ConfigError(f"{self.command} needs a finite chain: set chain.N")
        if self.command == 'ground' and self.run.ansatz == 'ed' and self.truncation is None:
            raise ConfigError("ground --ansatz ed needs [truncation]")
        if self.command == 'fano' and self.spectrum.couplings == 'oracle' and self.truncation is None:
            raise ConfigError("oracle couplings need [truncation]")
        if self.grid is not None and self.grid.size > CLI_CONFIG['max_grid_points']:
            raise ConfigError(f"grid has {self.grid.size} points, above {CLI_CONFIG['max_grid_points']}")

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'command': self.command}
        for name in SECTIONS:
            value = getattr(self, name)
            if value is not None:
                data[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(value).items()}
        return data

    def output_dir(self) -> Path:
        return Path(self.run.output_dir or os.getenv(CLI_CONFIG['output_dir_env']) or CLI_CONFIG['default_output_dir'])


def load_toml(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'rb') as fh:
            return tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed config file {path}: {e}") from e


def merge_config(command: str, file_data: Dict[str, Any], args: argparse.Namespace) -> RunConfig:
    """File values first, then every flag that was given; flags win."""
    merged: Dict[str, Any] = {}
    for name, table in file_data.items():
        if name == 'command':
            continue
        merged[name] = dict(table) if isinstance(table, dict) else table
    for dest, value in vars(args).items():
        if '.' not in dest or value is None:
            continue
        section, key = dest.split('.', 1)
        merged.setdefault(section, {})[key] = value

    # the ED truncation shares the chain length
    chain_n = merged.get('chain', {}).get('N')
    if 'truncation' in merged and 'N' not in merged['truncation'] and chain_n is not None:
        merged['truncation']['N'] = chain_n
    return RunConfig.from_dict({'command': command, **merged})


# --- argument parser -------------------------------------------------------

def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', help='TOML run configuration; flags override it')
    parent.add_argument('--output-dir', dest='run.output_dir',
                        help=f"output directory (default ${CLI_CONFIG['output_dir_env']} or {CLI_CONFIG['default_output_dir']})")
    parent.add_argument('--format', dest='run.formats', nargs='+', choices=['csv', 'json'])
    parent.add_argument('--workers', dest='run.workers', type=int)
    parent.add_argument('--seed', dest='run.seed', type=int)
    parent.add_argument('--no-catalog', dest='run.catalog', action='store_const', const=False,
                        help='do not record the run in the catalog')
    parent.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    parent.add_argument('--quiet', action='store_true', help='warnings and errors only')
    return parent


def _chain_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('chain')
    group.add_argument('--omega0', dest='chain.omega0', type=float, help='spin frequency')
    group.add_argument('--omega', dest='chain.omega', type=float, help='boson frequency')
    group.add_argument('--g', dest='chain.g', type=float, help='spin-boson coupling')
    group.add_argument('--N', dest='chain.N', type=int, help='number of unit cells')
    return parent


def _probe_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('probe')
    group.add_argument('--g-p', dest='probe.g_p', type=float)
    group.add_argument('--omega-p', dest='probe.omega_p', type=float)
    group.add_argument('--alpha-p', dest='probe.alpha_p', type=float)
    group.add_argument('--v-g', dest='probe.v_g', type=float)
    group.add_argument('--eta', dest='probe.eta', type=float)
    return parent


def _truncation_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('truncation')
    group.add_argument('--n-max', dest='truncation.n_max', type=int)
    group.add_argument('--boundary', dest='truncation.boundary', choices=['periodic', 'open'])
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='isb', description='Interspersed spin-boson chain laboratory')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)
    common, chain, probe, trunc = _common_parent(), _chain_parent(), _probe_parent(), _truncation_parent()

    p = sub.add_parser('ground', parents=[common, chain, trunc], help='variational or ED ground state')
    p.add_argument('--ansatz', dest='run.ansatz', choices=['lf', 'sh', 'ed'])
    p.add_argument('--k', dest='run.k', type=int)

    p = sub.add_parser('phase-diagram', parents=[common], help='LF and SH sweep over a grid')
    p.add_argument('--grid-kind', dest='grid.kind', choices=['cartesian', 'polar'])
    p.add_argument('--axis-a', dest='grid.axis_a', type=float, nargs='+', help='omega values, or delta when polar')
    p.add_argument('--axis-b', dest='grid.axis_b', type=float, nargs='+', help='omega0 values, or theta when polar')
    p.add_argument('--g-values', dest='grid.g', type=float, nargs='+')

    p = sub.add_parser('bands', parents=[common, chain], help='two-band excitation spectrum')
    p.add_argument('--n-q', dest='spectrum.n_q', type=int)
    p.add_argument('--band-grid', dest='spectrum.band_grid', choices=['uniform', 'finite'])

    p = sub.add_parser('kubo', parents=[common, chain, probe], help='Kubo response |A_q(nu)|')
    p.add_argument('--nu-min', dest='spectrum.nu_min', type=float)
    p.add_argument('--nu-max', dest='spectrum.nu_max', type=float)
    p.add_argument('--n-nu', dest='spectrum.n_nu', type=int)
    p.add_argument('--chi', dest='spectrum.chi', type=float)

    p = sub.add_parser('fano', parents=[common, chain, probe, trunc], help='waveguide transmission T(omega_k)')
    p.add_argument('--omega-min', dest='spectrum.omega_min', type=float)
    p.add_argument('--omega-max', dest='spectrum.omega_max', type=float)
    p.add_argument('--n-omega', dest='spectrum.n_omega', type=int)
    p.add_argument('--couplings', dest='spectrum.couplings', choices=['uniform', 'oracle'])
    p.add_argument('--gamma0', dest='spectrum.gamma0', type=float)
    p.add_argument('--k', dest='run.k', type=int)

    p = sub.add_parser('ed', parents=[common, chain, probe, trunc], help='exact diagonalization')
    p.add_argument('--k', dest='run.k', type=int)
    p.add_argument('--dump-vectors', dest='run.dump_vectors', action='store_const', const=True)
    p.add_argument('--dynamics', dest='run.dynamics', action='store_const', const=True,
                   help='also propagate the probe and write the response spectrum')
    p.add_argument('--n-p', dest='spectrum.n_p', type=int)
    p.add_argument('--t-max', dest='spectrum.t_max', type=float)
    p.add_argument('--steps', dest='spectrum.steps', type=int)

    p = sub.add_parser('convergence', parents=[common, chain, trunc], help='ED quantity versus n_max')
    p.add_argument('--quantity', dest='run.quantity', choices=['energy', 'staggered_order'])
    p.add_argument('--tol', dest='run.tol', type=float)
    p.add_argument('--n-min', dest='run.n_min', type=int)

    p = sub.add_parser('runs', help='list recorded runs')
    p.add_argument('--output-dir', dest='run.output_dir')
    p.add_argument('--command-filter', dest='filter_command')
    p.add_argument('--limit', type=int, default=20)
    p.add_argument('-v', '--verbose', action='store_true')
    p.add_argument('--quiet', action='store_true')
    return parser


def log_level(args: argparse.Namespace) -> int:
    if getattr(args, 'verbose', False):
        return logging.DEBUG
    if getattr(args, 'quiet', False):
        return logging.WARNING
    return logging.INFO


# --- commands --------------------------------------------------------------

def solution_row(solution: ansatz_gs.VariationalSolution, prefix: str = '') -> Dict[str, Any]:
    data = solution.to_dict()
    return {f'{prefix}{k}': data[k] for k in SOLUTION_FIELDS}


def _ed_result(config: RunConfig, k: Optional[int] = None) -> ed_oracle.EdResult:
    return ed_oracle.ground_state(config.chain, config.truncation, k=k or config.run.k, seed=config.run.seed)


def _write_ed(writer: ArtifactWriter, config: RunConfig, result: ed_oracle.EdResult, stem: str):
    energies = result.energies
    rows = [{'index': i, 'energy': e, 'gap': e - energies[0]} for i, e in enumerate(energies)]
    obs = result.observables
    site_rows = [
        {'site': j, 'sigma_x': obs.sigma_x[j], 'sigma_z': obs.sigma_z[j], 'a_re': obs.a[j].real,
         'a_im': obs.a[j].imag, 'n': obs.n[j], 'correlator': obs.correlator[j]}
        for j in range(result.truncation.N)
    ]
    document = {'params': asdict(config.chain), 'truncation': asdict(config.truncation), 'result': result.summary()}
    writer.table(stem, rows, document=document)
    writer.table('observables', site_rows)
    if not result.converged:
        return [f"boson occupation close to n_max={result.truncation.n_max}"]
    return []


def cmd_ground(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    if config.run.ansatz == 'ed':
        return _write_ed(writer, config, _ed_result(config), 'solution')
    solution = ansatz_gs.solve(config.chain, AnsatzKind(config.run.ansatz))
    writer.table('solution', [solution_row(solution)],
                 document={'params': asdict(config.chain), 'solution': solution.to_dict()})
    return []


PHASE_COLUMNS = ['i', 'j', 'k', 'omega', 'omega0', 'g'] + [
    f'{kind}_{name}' for kind in ('lf', 'sh') for name in SOLUTION_FIELDS + ('error',)
]


def cmd_phase_diagram(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    rows = ansatz_gs.phase_diagram(config.grid, workers=config.run.workers)
    failed = [r for r in rows if r.failed]
    if len(failed) == len(rows):
        raise ConvergenceError(f"all {len(rows)} grid points failed")

    table = []
    for r in rows:
        row = {'i': r.index[0], 'j': r.index[1], 'k': r.index[2], 'omega': r.omega, 'omega0': r.omega0, 'g': r.g}
        for kind in ('lf', 'sh'):
            if kind in r.solutions:
                row.update(solution_row(r.solutions[kind], prefix=f'{kind}_'))
            row[f'{kind}_error'] = r.errors.get(kind, '')
        table.append(row)
    writer.table('grid', table, columns=PHASE_COLUMNS,
                 document={'grid': asdict(config.grid), 'rows': table})
    partial = sum(1 for r in rows if r.errors)
    return [f"{partial} of {len(rows)} grid points had solver errors"] if partial else []


BAND_COLUMNS = ['qd', 'omega_q', 'eps_q', 'abs_g_q', 'e_minus', 'e_plus',
                'beta_f2_minus', 'beta_b2_minus', 'beta_f2_plus', 'beta_b2_plus']


def cmd_bands(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    opts = config.spectrum
    bands = ansatz_exc.band_structure(config.chain, n_q=opts.n_q, grid=opts.band_grid)
    rows = [b.to_row() for b in bands]
    writer.table('bands', rows, columns=BAND_COLUMNS, document={'params': asdict(config.chain), 'rows': rows})
    return []


def _curve_document(curve: spectroscopy.SpectrumCurve) -> Dict[str, Any]:
    return {'metadata': curve.metadata, 'axis': curve.axis, 'values': curve.values}


def cmd_kubo(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    curve = spectroscopy.kubo_response(config.chain, config.probe, config.spectrum.nu_grid(),
                                       chi=config.spectrum.chi)
    writer.table('kubo', curve.to_rows(), columns=['qd', 'nu', 'value'], document=_curve_document(curve))
    return []


def cmd_fano(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    opts = config.spectrum
    oracle = _ed_result(config, k=ED_CONFIG['max_eigenpairs']) if opts.couplings == 'oracle' else None
    res = spectroscopy.resonances_from_ansatz(config.chain, config.probe, couplings=opts.couplings,
                                              gamma0=opts.gamma0, oracle=oracle)
    report = spectroscopy.well_resolved_check(res)
    curve = spectroscopy.fano_transmission(res, opts.omega_grid())
    writer.table('fano', curve.to_rows(), columns=['omega_k', 'value'], document=_curve_document(curve))
    rows = [
        {'band': r.label[0], 'qd': r.label[1], 'energy': r.energy, 'width': r.width,
         'resolution_ratio': report.ratios[r.label]}
        for r in res
    ]
    writer.table('resonances', rows, columns=['band', 'qd', 'energy', 'width', 'resolution_ratio'])
    return [f"resonance {label} not well resolved" for label in report.flagged]


def cmd_ed(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    # every solve runs before the first write
    if config.run.dynamics:
        config.truncation.check_cap(factor=config.spectrum.n_p + 1)
    result = _ed_result(config)
    series = curve = None
    if config.run.dynamics:
        probe = config.probe or ProbeParams()
        opts = config.spectrum
        series = ed_oracle.probe_dynamics(config.chain, config.truncation, probe, opts.n_p,
                                          opts.time_grid(), result=result)
        curve = ed_oracle.response_spectrum(series)

    warnings = _write_ed(writer, config, result, 'ed')
    if config.run.dump_vectors:
        writer.write_bytes('vectors.bin', ed_oracle.vector_dump_bytes(result))
    if series is not None:
        writer.table('dynamics', series.to_rows())
        writer.table('response', curve.to_rows(), columns=['k', 'nu', 'value'], document=_curve_document(curve))
    return warnings


def cmd_convergence(config: RunConfig, writer: ArtifactWriter) -> List[str]:
    table = ed_oracle.convergence_sweep(config.chain, config.truncation, quantity=config.run.quantity,
                                        tol=config.run.tol, n_min=config.run.n_min)
    writer.table('convergence', table.to_rows(), columns=['n_max', 'value', 'difference'],
                 document={'rows': table.to_rows(), 'converged': table.converged})
    return [] if table.converged else [f"not converged to tol={config.run.tol}"]


COMMANDS: Dict[str, Callable[[RunConfig, ArtifactWriter], List[str]]] = {
    'ground': cmd_ground,
    'phase-diagram': cmd_phase_diagram,
    'bands': cmd_bands,
    'kubo': cmd_kubo,
    'fano': cmd_fano,
    'ed': cmd_ed,
    'convergence': cmd_convergence,
}


def record_in_catalog(manifest, output_dir: Path, status: str):
    """Best effort: a catalog failure is logged and does not fail the run."""
    try:
        db = DatabaseManager(output_dir=str(output_dir))
        db.create_tables()
        run_id = db.record_run(manifest, status=status)
        logger.info(f"Recorded run {run_id} in the catalog")
    except Exception as e:
        logger.error(f"Could not record run in catalog: {e}")


def cmd_runs(args: argparse.Namespace) -> int:
    output_dir = getattr(args, 'run.output_dir') or os.getenv(CLI_CONFIG['output_dir_env']) \
        or CLI_CONFIG['default_output_dir']
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    db = DatabaseManager(output_dir=output_dir)
    db.create_tables()
    runs = db.list_runs(command=args.filter_command, limit=args.limit)
    out = sys.stdout
    out.write(f"{'id':>5}  {'command':<14} {'status':<8} {'finished (UTC)':<26} {'files':>5}  output_dir\n")
    for run in runs:
        out.write(f"{run.id:>5}  {run.command:<14} {run.status:<8} {run.finished_at.isoformat():<26} "
                  f"{len(run.outputs):>5}  {run.output_dir}\n")
    return EXIT_OK


def execute(args: argparse.Namespace) -> int:
    """Run a parsed command and map failures to exit codes 2 and 3."""
    if args.command == 'runs':
        try:
            return cmd_runs(args)
        except IsbError as e:
            logger.error(f"{e}")
            return EXIT_CONFIG

    try:
        file_data = load_toml(args.config) if args.config else {}
        config = merge_config(args.command, file_data, args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    started = utc_now()
    output_dir = config.output_dir()
    writer = ArtifactWriter(output_dir, config.run.formats)
    logger.info(f"Running {config.command} into {output_dir}")
    try:
        warnings = COMMANDS[config.command](config, writer)
    except ConvergenceError as e:
        residual = f" (residual {e.residual:.3e})" if e.residual is not None else ''
        logger.error(f"{config.command} did not converge: {e}{residual}")
        return EXIT_CONVERGENCE
    except (DomainError, DimensionCapError, ConfigError) as e:
        logger.error(f"{config.command} rejected its input: {e}")
        return EXIT_CONFIG

    for message in warnings:
        logger.warning(message)
    manifest = writer.finish(config.command, config.to_dict(), started, warnings)
    if config.run.catalog:
        record_in_catalog(manifest, output_dir, 'partial' if warnings else 'ok')
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse and execute; argparse usage errors come back as exit code 2."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return execute(args)
