"""
Configuration and constants for the secrecy toolkit.
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Logging Configuration
LOG_LEVEL = os.getenv("SECRECY_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Root Finding
BISECTION_TOL = float(os.getenv("SECRECY_BISECTION_TOL", "1e-10"))
BISECTION_MAXITER = 500
CUBIC_ROOT_TOL = 1e-15  # bisection fallback for the stationarity cubic
CARDANO_SLACK = 1e-9  # how far outside the bracket a Cardano root may land
LAMBERT_W_MAXITER = 100

# Monte-Carlo Defaults
MC_TRIALS = int(os.getenv("SECRECY_MC_TRIALS", "100000"))
MC_SEED = int(os.getenv("SECRECY_MC_SEED", "20151"))
MC_BLOCK_TRIALS = 1024
MC_CHUNK_ELEMENTS = 2 ** 21  # complex entries per channel-level matmul chunk
MC_TAIL_PROB = 1e-8  # single-Eve exceedance probability at the auto radius
MC_MIN_RADIUS = 1e-6
MAX_SINR_FLOOR_PROB = 1e-3  # max-SINR samples below this CDF level may miss far Eves

# Acceptance Settings
SIGMA_ACCEPT = 3.0
KS_ALPHA = 0.01
MAX_STD_ERR = float(os.getenv("SECRECY_MAX_STD_ERR", "0.01"))
APPROX_TOLERANCE = 0.05  # relative R_S* gap allowed for the large-N rho
LARGE_N_THRESHOLD = 20
GRID_STEP = 1e-4
GRID_MATCH_TOL = 1e-3

# Validation Workflow
VALIDATION_PROBLEMS = int(os.getenv("SECRECY_VALIDATION_PROBLEMS", "200"))
VALIDATION_SWEEP_POINTS = 100
BOUNDARY_PROBLEMS = 50

# Sweep Driver
SWEEP_WORKERS = int(os.getenv("SECRECY_SWEEP_WORKERS", "1"))
CSV_FLOAT_FORMAT = "{:.12g}"

# Scenario Files
DEFAULT_CONFIG = os.getenv("SECRECY_DEFAULT_CONFIG", "data/default.toml")
PRESET_DIR = os.getenv("SECRECY_PRESET_DIR", "data/presets")
PRESET_NAMES = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"]
