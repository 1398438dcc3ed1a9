# Spectralab configuration
# Numeric defaults for every module; a local .env can override the SPECTRALAB_* values

import os

from dotenv import load_dotenv

load_dotenv()

# Runtime
THREADS = int(os.getenv("SPECTRALAB_THREADS", str(min(8, os.cpu_count() or 1))))
SEED = int(os.getenv("SPECTRALAB_SEED", "20240601"))
LOG_LEVEL = os.getenv("SPECTRALAB_LOG_LEVEL", "WARNING")
OUTPUT_DIR = os.getenv("SPECTRALAB_OUTPUT_DIR", "results")

# Symbol analysis
NONDEGENERACY_THRESHOLD = 1e-8   # min |det Hess P| on Sigma
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13
SIGMA_SAMPLES_PER_DIM = 1000     # >= 10^3 n sample points
SUPPORT_STARTS = 16              # multi-start count for the support function
SUPPORT_TOL = 1e-8

# Grid calculus
DENSE_CAP = 4096                 # N^n cap for materialization and dense mode
ALPHA_MINUS_ONE_WIDTH = 0.02     # relative width of the S^{-1} window
MIN_WINDOW_POINTS = 30           # lattice points per spectral window

# Norm measurement
LOWER_BOUND_RESTARTS = 8
LOWER_BOUND_ITERS = 40
FIT_MIN_POINTS = 6
FIT_MIN_DECADES = 1.0
SLOPE_TOLERANCE = 0.15
R2_FLOOR = 0.9
FLAT_RATIO = 3.0                 # max/min bound when the predicted slope is 0

# Resolvent lab
BOUNDARY_EPS_FACTOR = 3.0        # eps = factor * median gap near lambda
BOUNDARY_EPS_BAND = 0.05         # relative band used for the median gap
IMAGE_SUM_RANGE = 1              # 3^n periods
HELMHOLTZ_TAPER = 6.0            # Gaussian taper width sigma = taper / Nyquist
IMAGE_DAMPING_MIN = 4.0          # Im zeta * L needed before kernels are compared across eps

# Perturbation
SMALLNESS_C0 = 0.5
NEUMANN_MAX_TERMS = 200
NEUMANN_TOL = 1e-10
WINDOW_OCCUPANCY_MARGIN = 1.25   # default lambda lists keep this multiple of MIN_WINDOW_POINTS
HEAT_FLOOR = 1e-12               # Davies-Gaffney block norms below this are dropped
