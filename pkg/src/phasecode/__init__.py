"""Design of unimodular codes with low autocorrelation sidelobes.

Coordinate descent over the code entries, with an exact-to-tolerance
bisection solver for continuous phases, an FFT-based exhaustive solver for
M-ary and binary alphabets, and an l_p-norm initialization.
"""

from .context import CodeState, CoordinateContext, EntryResult, build_context
from .continuous import cpm_entry_optimize, feasibility_check, lag_quartic, lag_quartics
from .core import (
    Alphabet,
    AutocorrVector,
    PhaseSequence,
    autocorrelation,
    generate,
    isl,
    load_sequence,
    lp_norm,
    objective_f_theta,
    psl,
    save_sequence,
)
from .discrete import binary_entry_optimize, dft_lag_table, dpm_entry_optimize
from .driver import (
    DesignConfig,
    DesignReport,
    cd_run,
    mbi_step,
    multi_start,
    pareto_sweep,
)
from .errors import (
    AlphabetMismatchError,
    FrankLengthError,
    PhaseCodeError,
    SchemaError,
    SequenceError,
    ZeroPolynomialError,
)
from .lpinit import (
    DEFAULT_SCHEDULE,
    SurrogateWeights,
    lp_entry_continuous,
    lp_entry_discrete,
    lp_schedule_run,
    surrogate_weights,
)
from .quartic import (
    IntervalSet,
    QuarticPoly,
    complement_witness,
    covers_reals,
    real_roots,
    strict_positive_set,
    union,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SCHEDULE",
    "Alphabet",
    "AlphabetMismatchError",
    "AutocorrVector",
    "CodeState",
    "CoordinateContext",
    "DesignConfig",
    "DesignReport",
    "EntryResult",
    "FrankLengthError",
    "IntervalSet",
    "PhaseCodeError",
    "PhaseSequence",
    "QuarticPoly",
    "SchemaError",
    "SequenceError",
    "SurrogateWeights",
    "ZeroPolynomialError",
    "autocorrelation",
    "binary_entry_optimize",
    "build_context",
    "cd_run",
    "complement_witness",
    "covers_reals",
    "cpm_entry_optimize",
    "dft_lag_table",
    "dpm_entry_optimize",
    "feasibility_check",
    "generate",
    "isl",
    "lag_quartic",
    "lag_quartics",
    "load_sequence",
    "lp_entry_continuous",
    "lp_entry_discrete",
    "lp_norm",
    "lp_schedule_run",
    "mbi_step",
    "multi_start",
    "objective_f_theta",
    "pareto_sweep",
    "psl",
    "real_roots",
    "save_sequence",
    "strict_positive_set",
    "surrogate_weights",
    "union",
]
