"""Configuration constants for the BQT workbench."""

import math

# Structural invariants (trace, Hermiticity, normalisation).
STRUCT_TOL = 1e-12
# Agreement between two independent computation paths.
AGREE_TOL = 1e-10
# Distance from p = 1 used when a limit has to be approached numerically.
LIMIT_EPS = 1e-6
# Denominators 1 + p^n cos(m pi) at or below this are degenerate.
DEGENERATE_TOL = 1e-15

# Negative eigenvalues in [-CLAMP_TOL, 0) are rounding noise and get clamped.
CLAMP_TOL = 1e-10
# Eigenvalues at or below this count as exact zeros when a density is factored.
RANK_TOL = 1e-14
# Inputs violating density invariants beyond this are malformed.
MALFORMED_TOL = 1e-9
# Eigenvalue gap below which eigenvector derivatives are ill-posed.
GAP_TOL = 1e-8
# Eigenvalues below this are dropped from the spectral QFI sums.
EIGEN_DROP = 1e-12
# Bloch radius treated as the sphere surface in the QFI formula.
PURE_TOL = 1e-9
# Bloch radius allowed above 1 before a vector is rejected.
BLOCH_TOL = 1e-9

# Numeric differentiation steps.
DENSITY_STEP = 1e-5
TRIGGER_STEP = 1e-6

# Simulator guards.
MAX_QUBITS = 10
SIM_TRACE_TOL = 1e-10
SIM_PSD_TOL = 1e-9
BRANCH_DROP = 1e-15

DEFAULT_SEED = 7
DEFAULT_SHOTS = 8192

# Default fig1 grid: concurrence against p for a handful of mode counts.
FIG1_P = tuple([round(0.05 * k, 2) for k in range(20)] + [1 - LIMIT_EPS])
FIG1_N = (3, 5, 10, 25)
FIG1_M = (0, 1)

# Overlap values swept as separate curves by fig4 and fig5.
FIGURE_P = (0.0, 0.2, 0.5, 1 - LIMIT_EPS)

# Figure panels. Angles are given in units of pi; the swept angle is None.
FIG4_PANELS = {
    "a": {"direction": "ab", "m": 0, "n": 3, "theta_e": None, "theta_o": 0.0},
    "b": {"direction": "ab", "m": 1, "n": 25, "theta_e": None, "theta_o": 1.0},
    "c": {"direction": "ba", "m": 0, "n": 3, "theta_e": 0.0, "theta_o": None},
    "d": {"direction": "ba", "m": 1, "n": 25, "theta_e": 1.0, "theta_o": None},
}
FIG5_PANELS = {
    "a": {"direction": "ab", "m": 0, "n": 3, "theta_e": None, "theta_o": 0.0},
    "b": {"direction": "ab", "m": 1, "n": 25, "theta_e": None, "theta_o": 1 / 6},
    "c": {"direction": "ba", "m": 0, "n": 3, "theta_e": 0.0, "theta_o": None},
    "d": {"direction": "ba", "m": 1, "n": 25, "theta_e": 1 / 6, "theta_o": None},
}
# fig5 panels e-h share the grids of a-d.
FIG5_PANELS.update(
    {"e": FIG5_PANELS["a"], "f": FIG5_PANELS["b"], "g": FIG5_PANELS["c"], "h": FIG5_PANELS["d"]}
)
FIG4_POINTS = 100
FIG5_POINTS = 200

# Published outcome table: probabilities of the first two outcomes per simulator.
TABLE3_REFERENCE = [
    {
        "direction": "ab",
        "p": 0.0,
        "m": 1,
        "phase": math.pi,
        "input_probabilities": [0.25, 0.25, 0.25, 0.25],
        "qasm": [0.249, 0.252],
        "aer": [0.240, 0.251],
        "device": [0.257, 0.235],
    },
    {
        "direction": "ba",
        "p": 1.0,
        "m": 0,
        "phase": 0.0,
        "input_probabilities": [0.25, 0.25, 0.25, 0.25],
        "qasm": [0.244, 0.253],
        "aer": [0.245, 0.247],
        "device": [0.234, 0.259],
    },
]
TABLE3_OUTCOMES = ("0000", "0001", "1000", "1001")
