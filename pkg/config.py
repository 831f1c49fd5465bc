"""
Project configuration constants

This module contains all configurable constants for the project.
Tolerances, grid sizes and golden reference values live here so that every
module and test reads the same numbers.
"""

import os


def _env_float(name: str, default: float) -> float:
    """Read a positive float from the environment, falling back to default"""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        return default
    return value if value > 0 else default


# Output Configuration
SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12
OUTPUT_FORMATS = ("json", "csv")

# Tolerance Configuration
# ABELIAN_TOL overrides the relative level tolerance used by the tracer
DEFAULT_TOLERANCE = _env_float("ABELIAN_TOL", 1e-12)
LEVEL_TOL = DEFAULT_TOLERANCE          # |H(vertex) - h| <= LEVEL_TOL * max(1, |h|)
GEOM_TOL = 1e-10                       # closure gap of a traced orbit
SYM_TOL = 1e-10                        # symmetry-forced generators
QUAD_TOL = 1e-11                       # periodic trapezoid convergence (relative)
CLASSIFY_TOL = 0.0                     # region boundaries are exact unless overridden

# ODE integration of the Hamiltonian flow
ODE_METHOD = "DOP853"
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
MAX_CROSSINGS = 16                     # ray crossings examined while closing an orbit
ESCAPE_RADIUS_FACTOR = 1e3             # unbounded level set detection

# Orbit sampling
N_MIN_DEFAULT = 256
N_MIN_FLOOR = 64
N_MAX = 2 ** 20
MAX_MONOMIAL_DEGREE = 60

# Derivatives of Abelian integrals
FD_STEP_FRACTION = 1e-4                # of the annulus length, capped at 1
DERIVATIVE_AGREEMENT = 1e-5            # finite differences vs. period quadrature

# Picard-Fuchs / Riccati verification
PF_RESIDUAL_TOL = 1e-5
RICCATI_TOL = 1e-4
RICCATI_DENOMINATOR_FLOOR = 1e-8
GATING_MARGIN = 1e-3                   # relative margin around interior gating zeros
PF_GRID_POINTS = 11

# Period annuli
H_MAX_DEFAULT = 10.0                   # cutoff for unbounded annuli
BOUNDARY_MARGIN = 1e-6                 # relative distance kept from annulus endpoints
RAY_SAMPLES = 400

# Zero scanning
ZERO_GRID_MIN = 32
ZERO_GRID_DEFAULT = 64
ZERO_XTOL = 1e-12
IDENTICALLY_ZERO = 1e-12
TANGENT_DIP = 1e-9
TANH_EDGE_SHARE = 0.2                  # share of grid points placed in the outer edge band
TANH_EDGE_WIDTH = 0.01                 # edge band as a fraction of the interval

# Random sweeps
CEILING_SWEEP_COUNT = 1000
CEILING_SWEEP_SEED = 20240611

# The fixed family (a, b, c) = (-1, -2, 1) and its charts
FAMILY_PARAMS = (-1.0, -2.0, 1.0)
FAMILY_CENTER_LEVEL = 0.25
HOPF_EPSILON = 2e-3                    # staircase spacing in m^2
HOPF_MAX_HALVINGS = 6
HOPF_DESIGN_ORDER = 8                  # series order used when collocating
HOPF_CROSS_CHECK_TOL = 1e-8            # closed form vs. θ-quadrature
THETA_POINTS = 256

# Double homoclinic loop of H3
LOOP_SPLIT_X1 = 0.05
LOOP_SPLIT_X2 = 0.9
LOOP_QUAD_EPSABS = 1e-14
LOOP_QUAD_EPSREL = 1e-13
LOOP_QUAD_LIMIT = 200
HOMOCLINIC_WINDOW = (1e-6, 1e-2)       # |h3|
HOMOCLINIC_STAIRCASE = (1e-5, 1e-4, 1e-3)
HOMOCLINIC_RETRIES = 2
LOOP_GRID_POINTS = 48
SADDLE_FIT_RANGE = (1e-5, 1e-3)
SADDLE_FIT_POINTS = 9
SADDLE_CONSTANT_Q = None               # None: measured from the loop area
DISTRIBUTION_RETRIES = 2

# Published loop constants, reported next to the computed ones
PUBLISHED_LOOP_CONSTANTS = {
    "A0": 0.5301166457,
    "A1": 0.2939666274,
    "A2": 0.0543804979,
    "A3": 0.1912645804,
    "A4": 4.4879224539,
    "A5": 1.1424442577,
    "A6": 2.8725107531,
}
LOOP_CONSTANT_RTOL = {"A0": 1e-4, "A1": 1e-4, "A2": 1e-4, "A3": 1e-4,
                      "A4": 1e-2, "A5": 1e-2, "A6": 1e-2}

# The 18 coexistence patterns (N_M1, N_M2, N_I1, N_I2, N_I3)
DISTRIBUTIONS = (
    (3, 0, 0, 0, 0), (0, 3, 0, 0, 0), (0, 0, 3, 0, 0), (0, 0, 0, 3, 0),
    (1, 2, 0, 0, 0), (2, 1, 0, 0, 0), (2, 0, 1, 0, 0), (2, 0, 0, 1, 0),
    (0, 2, 0, 1, 0), (0, 2, 1, 0, 0), (1, 1, 1, 0, 0), (1, 1, 0, 1, 0),
    (1, 0, 1, 1, 0), (0, 1, 1, 1, 0), (1, 0, 0, 0, 2), (0, 1, 0, 0, 2),
    (0, 0, 1, 1, 2), (0, 0, 2, 2, 1),
)
