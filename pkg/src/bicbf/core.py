"""BIC-approximated Bayes factors for ANOVA effects.

Everything here works in natural-log space. Bayes factors are only
exponentiated when a :class:`BayesFactorResult` is built, and they saturate
at the ends of the float range instead of overflowing or reaching zero, so
``log_bf10`` is always the authoritative number.

Sign conventions:

* ``delta_bic`` is BIC(H1) - BIC(H0); positive values favour the null.
* ``log_bf10 = -delta_bic / 2`` and ``bf01 = exp(delta_bic / 2)``.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

from .errors import DegenerateDataError, InvalidArgumentError, ValidationError

__all__ = [
    "AnovaSummary",
    "SumsOfSquares",
    "BayesFactorResult",
    "Path",
    "bic_from_loglik",
    "delta_bic_from_sse",
    "delta_bic_from_f",
    "bf01_from_delta_bic",
    "bf01_from_summary",
    "bf10_from_bf01",
    "classify_evidence",
    "critical_f",
    "EVIDENCE_BANDS",
]

_FLOAT_MAX = sys.float_info.max
_FLOAT_TINY = math.ulp(0.0)
_LOG_FLOAT_MAX = math.log(_FLOAT_MAX)
_LOG_FLOAT_TINY = math.log(_FLOAT_TINY)

# Upper edges (inclusive) on |delta BIC| = |2 * log_bf10|.
EVIDENCE_BANDS: tuple[tuple[float, str], ...] = (
    (2.0, "weak"),
    (6.0, "positive"),
    (10.0, "strong"),
    (math.inf, "very strong"),
)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class AnovaSummary:
    """A reported ANOVA effect, ``F(df1, df2) = f_value`` on ``n`` observations.

    ``n`` may be ``None`` when it was not part of the published summary;
    Bayes-factor computation then refuses to proceed. ``reported_p`` is kept
    for screening only and never enters the computation. ``p_relation`` is
    one of ``"="``, ``"<"``, ``">"``.
    """

    f_value: float
    df1: int
    df2: int
    n: int | None = None
    label: str | None = None
    reported_p: float | None = None
    p_relation: str = "="

    def __post_init__(self):
        f = self.f_value
        if isinstance(f, bool) or not isinstance(f, (int, float)):
            raise ValidationError(f"F must be a real number, got {f!r}")
        if not math.isfinite(f) or f < 0:
            raise ValidationError(f"F must be finite and nonnegative, got {f!r}")
        object.__setattr__(self, "f_value", float(f))
        for name in ("df1", "df2"):
            v = getattr(self, name)
            if not _is_int(v) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        if self.n is not None and (not _is_int(self.n) or self.n < 2):
            raise ValidationError(f"n must be an integer >= 2, got {self.n!r}")
        p = self.reported_p
        if p is not None:
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0 < p < 1:
                raise ValidationError(f"reported p must lie in (0, 1), got {p!r}")
            object.__setattr__(self, "reported_p", float(p))
        if self.p_relation not in ("=", "<", ">"):
            raise ValidationError(f"unknown p relation {self.p_relation!r}")
        if p is None:
            object.__setattr__(self, "p_relation", "=")

    def with_n(self, n: int) -> "AnovaSummary":
        return AnovaSummary(
            self.f_value, self.df1, self.df2, n, self.label, self.reported_p, self.p_relation
        )


@dataclass(frozen=True)
class SumsOfSquares:
    """Effect and error sums of squares for one ANOVA effect."""

    ss_effect: float
    ss_error: float

    def __post_init__(self):
        if not (math.isfinite(self.ss_effect) and math.isfinite(self.ss_error)):
            raise InvalidArgumentError("sums of squares must be finite")
        if self.ss_effect < 0:
            raise InvalidArgumentError(f"ss_effect must be >= 0, got {self.ss_effect}")
        if self.ss_error <= 0:
            raise DegenerateDataError(f"ss_error must be > 0, got {self.ss_error}")

    @property
    def sse_h1(self) -> float:
        return self.ss_error

    @property
    def sse_h0(self) -> float:
        return self.ss_effect + self.ss_error


class Path(enum.Enum):
    FROM_SUMMARY = "from_summary"
    FROM_SSE = "from_sse"
    FROM_DELTA_BIC = "from_delta_bic"


def _saturating_exp(x: float) -> float:
    # keeps both Bayes factors finite and strictly positive
    if x > _LOG_FLOAT_MAX:
        return _FLOAT_MAX
    if x < _LOG_FLOAT_TINY:
        return _FLOAT_TINY
    return math.exp(x)


@dataclass(frozen=True)
class BayesFactorResult:
    """Bayes factor in both orientations; ``log_bf10`` is the source of truth."""

    log_bf10: float
    path: Path = Path.FROM_DELTA_BIC
    bf01: float = field(init=False)
    bf10: float = field(init=False)
    category: str = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.log_bf10):
            raise InvalidArgumentError(f"log_bf10 must be finite, got {self.log_bf10}")
        object.__setattr__(self, "bf01", _saturating_exp(-self.log_bf10))
        object.__setattr__(self, "bf10", _saturating_exp(self.log_bf10))
        object.__setattr__(self, "category", classify_evidence(self.log_bf10))

    @property
    def delta_bic(self) -> float:
        return -2.0 * self.log_bf10

    def to_dict(self) -> dict:
        return {
            "bf01": self.bf01,
            "bf10": self.bf10,
            "log_bf10": self.log_bf10,
            "category": self.category,
            "path": self.path.value,
        }


def _check_finite(name, x):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise InvalidArgumentError(f"{name} must be a finite real, got {x!r}")


def bic_from_loglik(log_likelihood: float, k: int, n: int) -> float:
    """Return ``-2 * log_likelihood + k * ln(n)``."""
    _check_finite("log_likelihood", log_likelihood)
    if not _is_int(k) or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k!r}")
    if not _is_int(n) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    return -2.0 * log_likelihood + k * math.log(n)


def delta_bic_from_sse(sse_h1: float, sse_h0: float, n: int, k_diff: int) -> float:
    """BIC(H1) - BIC(H0) from the residual sums of squares of both models.

    ``sse_h1`` is the residual SS of the alternative (the ANOVA error term),
    ``sse_h0`` that of the null (effect + error). ``k_diff`` is the number of
    extra parameters in H1, i.e. the effect df in an ANOVA.
    """
    _check_finite("sse_h1", sse_h1)
    _check_finite("sse_h0", sse_h0)
    if sse_h1 <= 0:
        raise DegenerateDataError(f"sse_h1 must be > 0, got {sse_h1}")
    if sse_h0 < sse_h1:
        raise InvalidArgumentError(
            f"sse_h0 ({sse_h0}) < sse_h1 ({sse_h1}): H1 cannot explain less than H0"
        )
    if not _is_int(n) or n < 2:
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    if not _is_int(k_diff) or k_diff < 1:
        raise InvalidArgumentError(f"k_diff must be a positive integer, got {k_diff!r}")
    # ln(sse_h1/sse_h0) = -ln(1 + (sse_h0 - sse_h1)/sse_h1), exact near equality
    log_ratio = -math.log1p((sse_h0 - sse_h1) / sse_h1)
    return n * log_ratio + k_diff * math.log(n)


def _require_n(summary: AnovaSummary) -> int:
    if summary.n is None:
        raise InvalidArgumentError(
            "summary has no sample size (N_MISSING); supply n explicitly"
        )
    return summary.n


def delta_bic_from_f(summary: AnovaSummary) -> float:
    """BIC(H1) - BIC(H0) from ``F``, ``df1``, ``df2`` and ``n`` alone."""
    n = _require_n(summary)
    x = summary.f_value * summary.df1 / summary.df2
    return -n * math.log1p(x) + summary.df1 * math.log(n)


def bf01_from_delta_bic(delta_bic: float, path: Path = Path.FROM_DELTA_BIC) -> BayesFactorResult:
    _check_finite("delta_bic", delta_bic)
    return BayesFactorResult(-delta_bic / 2.0, path)


def bf01_from_summary(summary: AnovaSummary) -> BayesFactorResult:
    """Bayes factor for an effect given only its published ANOVA summary.

    Equivalent to ``sqrt(n**df1 * (1 + F*df1/df2)**-n)`` for BF01, but
    evaluated in log space so large ``n`` cannot overflow.

    >>> round(bf01_from_summary(AnovaSummary(1.75, 1, 17, 18)).bf01, 3)
    1.757
    """
    return bf01_from_delta_bic(delta_bic_from_f(summary), Path.FROM_SUMMARY)


def bf01_from_sse(sums: SumsOfSquares, n: int, df1: int) -> BayesFactorResult:
    d = delta_bic_from_sse(sums.sse_h1, sums.sse_h0, n, df1)
    return bf01_from_delta_bic(d, Path.FROM_SSE)


def bf10_from_bf01(result: BayesFactorResult) -> BayesFactorResult:
    """Flip the direction of evidence (BF10 = 1 / BF01).

    The returned result describes the reversed comparison, so its
    ``log_bf10`` is the negation of the input's. Applying it twice restores
    the input exactly.
    """
    return BayesFactorResult(-result.log_bf10, result.path)


def classify_evidence(log_bf10: float) -> str:
    """Label the strength and direction of evidence.

    Bands are on ``|2 * log_bf10|``: up to 2 weak, up to 6 positive, up to 10
    strong, beyond that very strong.
    """
    _check_finite("log_bf10", log_bf10)
    if log_bf10 == 0:
        return "equivocal"
    magnitude = abs(2.0 * log_bf10)
    for upper, name in EVIDENCE_BANDS:
        if magnitude <= upper:
            break
    side = "the alternative" if log_bf10 > 0 else "the null"
    return f"{name} evidence for {side}"


def critical_f(n: int, df1: int, df2: int) -> float:
    """The F value at which BF01 is exactly 1 for the given design."""
    for name, v, lo in (("n", n, 2), ("df1", df1, 1), ("df2", df2, 1)):
        if not _is_int(v) or v < lo:
            raise InvalidArgumentError(f"{name} must be an integer >= {lo}, got {v!r}")
    return (df2 / df1) * math.expm1(df1 / n * math.log(n))
