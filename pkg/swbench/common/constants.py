"""
Glossary:

- Vacuum threshold: hard floor on the density 1+q below which composition and the solver refuse to continue
- Padding factor: ratio between the physical grid used for a pointwise operation and the stored grid
- Sample: a stored solver state; ledgers and Chemin-Lerner norms are folds over samples

"""

import math
from typing import Final

# =============================================================
#                 Grid / Transform Constants
# =============================================================

MIN_GRID_POINTS: Final[int] = 8
DEFAULT_PERIOD: Final[float] = 2 * math.pi
SUPPORTED_DIMENSIONS: Final[tuple[int, ...]] = (1, 2, 3)

PRODUCT_PADDING: Final[float] = 1.5  # 3/2 zero padding == 2/3 truncation rule
COMPOSITION_PADDING: Final[int] = 2
ALIASING_REFERENCE_PADDING: Final[int] = 4

# =============================================================
#                 Littlewood-Paley Constants
# =============================================================

CHI_INNER_RADIUS: Final[float] = 3 / 4  # chi == 1 below
CHI_OUTER_RADIUS: Final[float] = 4 / 3  # chi == 0 above
BLOCK_SEARCH_MARGIN: Final[int] = 3  # extra dyadic indices scanned on each side of the lattice range

# =============================================================
#                 Solver Constants
# =============================================================

VACUUM_THRESHOLD: Final[float] = 1e-6
NEAR_VACUUM_DENSITY: Final[float] = 0.1  # initial data with min(1+q0) below this is flagged out-of-hypothesis
BLOWUP_VELOCITY_BOUND: Final[float] = 1e6
DEFAULT_CFL_FACTOR: Final[float] = 0.5  # dt = factor / (n * max|u| + 1)
MAX_CFL_FACTOR: Final[float] = 1.0
DEFAULT_GAMMA: Final[float] = 2.0
DEFAULT_PRESSURE_COEFFICIENT: Final[float] = 1.0
MIN_STEPS_PER_RUN: Final[int] = 8

# DevNote: Below this |z| the phi-functions of the exponential integrator switch to their Taylor series (to z^6).
# The closed forms lose about 1e-16 / z^2 relative accuracy to cancellation, the series about z^7 / 5040.
PHI_SERIES_THRESHOLD: Final[float] = 1e-2
# DevNote: The per-mode 2x2 exponential uses the cosh/sinh series once |omega t| (half the eigenvalue gap times t)
# drops below this value. The eigenvalue form loses about 1e-16 / |omega t| relative accuracy, the series
# (kept to order 6) loses about |omega t|^8 / 40320, so both sides of the switch stay near double precision.
COUPLED_SERIES_THRESHOLD: Final[float] = 1e-2

# =============================================================
#                 Estimate / Ledger Constants
# =============================================================

DEFAULT_ALPHA: Final[float] = 0.5
DEFAULT_ETA: Final[float] = 0.1
PILOT_HORIZON: Final[float] = 0.01  # In time units of the scaled system
PILOT_SAMPLES: Final[int] = 32
HORIZON_BISECTION_STEPS: Final[int] = 60

# Frequency bands of the damping sweep (physical |xi|) and the time at which rates are read off.
DAMPING_LOW_BAND: Final[float] = 0.5
DAMPING_HIGH_BAND: Final[float] = 8.0
DAMPING_SWEEP_RANGE: Final[tuple[float, float]] = (1e-2, 64.0)
DAMPING_SWEEP_POINTS: Final[int] = 161
DAMPING_RATE_TIME: Final[float] = 1.0
DAMPING_PLATEAU_SPREAD: Final[float] = 0.1
DAMPING_EXPONENT_TOLERANCE: Final[float] = 0.2
LEDGER_SCHEMA_VERSION: Final[int] = 1
CHECKPOINT_FORMAT_VERSION: Final[int] = 1

# =============================================================
#                 Verification Constants
# =============================================================

ROUNDTRIP_TOLERANCE: Final[float] = 1e-12
PARTITION_TOLERANCE: Final[float] = 1e-10
BONY_TOLERANCE: Final[float] = 1e-11
DEFAULT_RANDOM_SAMPLES: Final[int] = 100
DEFAULT_RANDOM_KMAX: Final[int] = 8
BERNSTEIN_LOWER: Final[float] = 3 / 4
BERNSTEIN_UPPER: Final[float] = 8 / 3

# =============================================================
#                 Exit Codes
# =============================================================

EXIT_OK: Final[int] = 0
EXIT_USAGE_ERROR: Final[int] = 1
EXIT_BLOWUP: Final[int] = 2
EXIT_VERIFICATION_FAILED: Final[int] = 3
