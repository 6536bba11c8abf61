"""BIC-approximated Bayes factors from minimal ANOVA summaries."""

from .anova import (
    AnovaTable,
    Effect,
    FactorialDataset,
    NConvention,
    effect_summary,
    sse_pair_for_effect,
    two_way_anova,
)
from .core import (
    AnovaSummary,
    BayesFactorResult,
    Path,
    SumsOfSquares,
    bf01_from_delta_bic,
    bf01_from_sse,
    bf01_from_summary,
    bf10_from_bf01,
    bic_from_loglik,
    classify_evidence,
    critical_f,
    delta_bic_from_f,
    delta_bic_from_sse,
)
from .errors import (
    BicBfError,
    DegenerateDataError,
    InvalidArgumentError,
    ParseError,
    RowError,
    SchemaError,
    ValidationError,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .parser import (
    SummaryRecord,
    WarningCode,
    check_p_consistency,
    format_summary,
    parse_batch_csv,
    parse_summary,
    read_batch_csv,
)
from .sim import (
    ConditionResult,
    SimulationConfig,
    five_number_summary,
    generate_dataset,
    render_report,
    run_simulation,
)

__version__ = "0.1.0"
