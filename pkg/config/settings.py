import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Parallelism cap (scipy.fft workers, thread pools)
KOSZUL_THREADS = max(1, int(os.getenv('KOSZUL_THREADS', '1')))

# Logging
LOG_LEVEL = os.getenv('KOSZUL_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('KOSZUL_LOG_FILE')  # None disables the file sink

# Grid defaults
DEFAULT_M = int(os.getenv('DEFAULT_M', '16'))
DEFAULT_RHO = float(os.getenv('DEFAULT_RHO', '0.9'))
DEFAULT_R_IN = float(os.getenv('DEFAULT_R_IN', '0.2'))
DEFAULT_R_OUT = float(os.getenv('DEFAULT_R_OUT', '0.4'))

# Symbolic backend
DEGREE_CAP = int(os.getenv('DEGREE_CAP', '12'))

# Taylor split
VANISHING_TOL = float(os.getenv('VANISHING_TOL', '1e-10'))
GAUSS_NODES = int(os.getenv('GAUSS_NODES', '16'))
CONTOUR_NODES = int(os.getenv('CONTOUR_NODES', '16'))
CONTOUR_RADIUS = float(os.getenv('CONTOUR_RADIUS', '0.05'))  # relative to min radius

# Gates
GATE_FACTOR = float(os.getenv('GATE_FACTOR', '10'))
BREAKDOWN_FACTOR = float(os.getenv('BREAKDOWN_FACTOR', '1e3'))
CLOSEDNESS_FACTOR = float(os.getenv('CLOSEDNESS_FACTOR', '50'))
TOL_ID_REL = float(os.getenv('TOL_ID_REL', '5e-3'))
DBAR_TOL_REL = float(os.getenv('DBAR_TOL_REL', '5e-2'))  # dbar command residual gate, relative to max|beta|
HOL_REDUCTION = float(os.getenv('HOL_REDUCTION', '0.25'))  # allowed share of the uncorrected lifts' dbar defect

# Convergence acceptance
ACCEPT_RATIO = float(os.getenv('ACCEPT_RATIO', '0.5'))
ACCEPT_ORDER = float(os.getenv('ACCEPT_ORDER', '1.0'))  # alternative: observed R_hol order
FLOOR_REL = float(os.getenv('FLOOR_REL', '1e-10'))  # residuals below this x scale are "at-floor"
