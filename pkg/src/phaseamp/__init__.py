"""Amplitude amplification driven by a subdivided phase oracle.

The oracle multiplies each basis amplitude by exp(i k f(x)); alternating it
with the inversion-about-the-mean diffusion concentrates probability on the
states with the largest objective value.
"""

__version__ = "0.1.0"

from .analysis import (
    QueryAnalysis,
    SuccessModel,
    advantage_report,
    beating,
    expected_queries,
    success_probability,
)
from .errors import DimensionError, DomainError, TableParseError, UndefinedExpectationError
from .objective import (
    DistributionSpec,
    InjectiveSpec,
    ObjectiveTable,
    absorb_constraint,
    load_table,
    make_injective,
    sample_distribution,
    shift_nonnegative,
    write_table,
)
from .schedule import (
    IterationRecord,
    OracleSchedule,
    RunTrace,
    alternating_k,
    greedy_dynamic_k,
    locate_k,
    run_fixed_k,
    run_schedule,
    scan_k,
    size_scaling_study,
    tune_k,
)
from .state import (
    QuantumState,
    apply_diffusion,
    apply_phase_oracle,
    compress,
    expand,
    is_amplifying,
    mean_amplitude,
    uniform_state,
)
