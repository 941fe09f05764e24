"""
Configuration settings for the ISB chain laboratory.
"""

__version__ = "0.1.0"

# Variational solvers (ansatz_gs)
SOLVER_CONFIG = {
    'xatol_rel': 1e-10,  # simplex diameter, relative to max(omega, omega0, |g|)
    'fatol': 1e-13,  # on the energy in the same units
    'maxiter': 20000,
    'lf_rtol': 1e-10,
    'sh_rtol': 1e-6,
    'max_bracket_doublings': 60,
}

# Exact diagonalization (ed_oracle)
ED_CONFIG = {
    'max_amplitudes': 20_000_000,
    'dense_cutoff': 1500,  # below this dimension use a dense eigensolver
    'krylov_cap': 400,
    'residual_rtol': 1e-9,
    'default_seed': 1234,
    'max_eigenpairs': 20,
    'degeneracy_tol': 1e-8,
}

# Spectroscopy protocols
SPECTROSCOPY_CONFIG = {
    'alpha_warn': 0.2,  # probe amplitudes above this leave the linear regime
    'resolution_flag': 0.1,  # Gamma / level spacing above this is flagged
}

# Command-line front end
CLI_CONFIG = {
    'output_dir_env': 'ISB_OUTPUT_DIR',
    'default_output_dir': 'isb-output',
    'csv_digits': 17,
    'max_grid_points': 1_000_000,
}

# Logging configuration
LOGGING_CONFIG = {
    'level': 'INFO',
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'file': 'isb.log'
}

# Run catalog
DATABASE_CONFIG = {
    'url_env': 'ISB_DATABASE_URL',
    'sqlite_file': 'runs.db',
}
