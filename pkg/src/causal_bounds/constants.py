import enum

DEFAULT_TOL = 1e-9

# negative round-off tolerated (and clamped) when building distributions
CLAMP_TOL = 1e-12

# slice sums this close to 1 count as normalized and are left untouched
NORMALIZED_TOL = 8 * 2.0**-52

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10
UNITAL_TOL = 1e-9

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

FEASIBILITY_TOL = 1e-8
LP_AGREEMENT_TOL = 1e-7
PIVOT_TOL = 1e-12

DEFAULT_SEED = 42
SEED_ENV_VAR = "CAUSAL_BOUNDS_SEED"


class ExitCode(enum.IntEnum):
    OK = 0
    USAGE = 1
    INVALID = 2
    VIOLATION = 3
    MISMATCH = 4


class OutputFormat:
    table = "table"
    json = "json"
    csv = "csv"

    choices = ("table", "json", "csv")
