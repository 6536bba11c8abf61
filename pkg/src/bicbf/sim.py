"""Monte Carlo harness for the BIC Bayes factor on simulated factorial data.

Datasets follow ``y[i, j, k] = alpha[i] + tau[j] + gamma[i, j] + eps[i, j, k]``
with effects drawn from Normal(0, g) and noise from Normal(0, error_sd**2).
Every replicate owns a Philox stream keyed by ``(master_seed, cell_n, g,
replicate_index)``, so results do not depend on how replicates are scheduled
across worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from . import kernels
from .anova import (
    Effect,
    FactorialDataset,
    NConvention,
    effect_summary,
    sse_pair_for_effect,
    table_from_ss,
)
from .core import bf01_from_sse, bf01_from_summary
from .errors import DegenerateDataError, InvalidArgumentError

__all__ = [
    "SimulationConfig",
    "FiveNumber",
    "ConditionResult",
    "five_number_summary",
    "generate_dataset",
    "run_simulation",
    "render_report",
    "REPORT_FORMATS",
]

REPORT_FORMATS = ("markdown", "csv", "json")
_CHUNK = 64
_DECISION_ROUNDING = 9


@dataclass(frozen=True)
class SimulationConfig:
    cell_sizes: tuple[int, ...] = (20, 50, 80)
    effect_variances: tuple[float, ...] = (0.0, 0.05, 0.2)
    replications: int = 1000
    master_seed: int = 0
    n_convention: NConvention = NConvention.TOTAL_OBSERVATIONS
    explicit_n: int | None = None
    error_sd: float = 1.0
    levels_a: int = 2
    levels_b: int = 3
    sum_to_zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cell_sizes", tuple(self.cell_sizes))
        object.__setattr__(self, "effect_variances", tuple(float(g) for g in self.effect_variances))
        object.__setattr__(self, "n_convention", NConvention(self.n_convention))
        if not self.cell_sizes or not self.effect_variances:
            raise InvalidArgumentError("need at least one cell size and one g value")
        if any(not isinstance(c, int) or c < 2 for c in self.cell_sizes):
            raise InvalidArgumentError(f"cell sizes must be integers >= 2: {self.cell_sizes}")
        if any(not math.isfinite(g) or g < 0 for g in self.effect_variances):
            raise InvalidArgumentError(f"g values must be >= 0: {self.effect_variances}")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise InvalidArgumentError(f"replications must be >= 1, got {self.replications}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise InvalidArgumentError("master_seed must be an unsigned 64-bit integer")
        if not (math.isfinite(self.error_sd) and self.error_sd > 0):
            raise InvalidArgumentError(f"error_sd must be > 0, got {self.error_sd}")
        if self.levels_a < 1 or self.levels_b < 1 or max(self.levels_a, self.levels_b) < 2:
            raise InvalidArgumentError("design needs a factor with at least two levels")
        if self.n_convention is NConvention.EXPLICIT and (
            self.explicit_n is None or self.explicit_n < 2
        ):
            raise InvalidArgumentError("explicit n convention requires explicit_n >= 2")

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def n_effective(self, cell_n: int) -> int:
        if self.n_convention is NConvention.TOTAL_OBSERVATIONS:
            return self.levels_a * self.levels_b * cell_n
        if self.n_convention is NConvention.CELL_COUNT:
            return cell_n
        return self.explicit_n


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def as_tuple(self):
        return (self.min, self.q1, self.median, self.q3, self.max)


def five_number_summary(values: Sequence[float]) -> FiveNumber:
    """Min, quartiles and max; quartiles interpolate at position ``(m - 1) * p``."""
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise InvalidArgumentError("five-number summary of an empty sample")
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    return FiveNumber(float(x.min()), float(q1), float(med), float(q3), float(x.max()))


@dataclass(frozen=True)
class ConditionResult:
    effect: Effect
    cell_n: int
    g: float
    n_effective: int
    df1: int
    df2: int
    replications: int
    five_number: FiveNumber
    alt_decision_rate: float
    path_consistency: float
    degenerate: int = 0
    log_bf10: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def floor(self) -> float:
        """Smallest attainable log BF10 (the value at F = 0)."""
        return -(self.df1 / 2.0) * math.log(self.n_effective)


def _g_key(g: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(g)))[0]


def _generator(config: SimulationConfig, cell_n: int, g: float, replicate_index: int):
    seq = np.random.SeedSequence(
        config.master_seed, spawn_key=(cell_n, _g_key(g), replicate_index)
    )
    return np.random.Generator(np.random.Philox(seq))


def _draw(config: SimulationConfig, cell_n: int, g: float, replicate_index: int) -> np.ndarray:
    a, b = config.levels_a, config.levels_b
    rng = _generator(config, cell_n, g, replicate_index)
    scale = math.sqrt(g)
    alpha = scale * rng.standard_normal(a)
    tau = scale * rng.standard_normal(b)
    gamma = scale * rng.standard_normal((a, b))
    eps = config.error_sd * rng.standard_normal((a, b, cell_n))
    if config.sum_to_zero:
        alpha -= alpha.mean()
        tau -= tau.mean()
        gamma = gamma - gamma.mean(axis=0) - gamma.mean(axis=1)[:, None] + gamma.mean()
    return alpha[:, None, None] + tau[None, :, None] + gamma[:, :, None] + eps


def generate_dataset(
    config: SimulationConfig, cell_n: int, g: float, replicate_index: int
) -> FactorialDataset:
    if replicate_index < 0:
        raise InvalidArgumentError("replicate_index must be >= 0")
    return FactorialDataset(_draw(config, cell_n, g, replicate_index))


def _effects(config: SimulationConfig) -> list[Effect]:
    a, b = config.levels_a, config.levels_b
    out = []
    if a > 1:
        out.append(Effect.A)
    if b > 1:
        out.append(Effect.B)
    if a > 1 and b > 1:
        out.append(Effect.AB)
    return out


def _decides_alternative(log_bf10: float) -> bool:
    # ties go to the null
    return round(log_bf10, _DECISION_ROUNDING) > 0


def _run_chunk(config, cell_n, g, start, stop, effects, backend):
    stack = np.stack([_draw(config, cell_n, g, r) for r in range(start, stop)])
    ss = backend.anova_ss_batch(stack)
    n_eff = config.n_effective(cell_n)
    out = []
    for row in ss:
        try:
            table = table_from_ss(row, config.levels_a, config.levels_b, cell_n)
        except DegenerateDataError:
            out.append(None)
            continue
        per_effect = []
        for e in effects:
            summary = effect_summary(table, e, config.n_convention, config.explicit_n)
            via_f = bf01_from_summary(summary).log_bf10
            via_sse = bf01_from_sse(sse_pair_for_effect(table, e), n_eff, summary.df1).log_bf10
            per_effect.append((via_f, via_sse))
        out.append(per_effect)
    return out


def run_simulation(config: SimulationConfig, threads: int = 1, backend=None) -> list[ConditionResult]:
    """Run every (cell size, g) condition and summarise log BF10 per effect.

    ``threads`` only changes scheduling; output is identical for any value.
    ``backend`` selects a kernel module (default: the active one).
    """
    if threads < 1:
        raise InvalidArgumentError(f"threads must be >= 1, got {threads}")
    backend = backend or kernels
    effects = _effects(config)
    results = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for cell_n in config.cell_sizes:
            n_eff = config.n_effective(cell_n)
            df2 = config.levels_a * config.levels_b * (cell_n - 1)
            for g in config.effect_variances:
                bounds = [
                    (s, min(s + _CHUNK, config.replications))
                    for s in range(0, config.replications, _CHUNK)
                ]
                args = [(config, cell_n, g, s, t, effects, backend) for s, t in bounds]
                if pool is None:
                    chunks = [_run_chunk(*a) for a in args]
                else:
                    chunks = list(pool.map(lambda a: _run_chunk(*a), args))
                reps = [r for chunk in chunks for r in chunk]
                good = [r for r in reps if r is not None]
                degenerate = len(reps) - len(good)
                for idx, e in enumerate(effects):
                    via_f = np.array([r[idx][0] for r in good])
                    via_sse = np.array([r[idx][1] for r in good])
                    results.append(
                        _condition(e, cell_n, g, n_eff, df2, config, via_f, via_sse, degenerate)
                    )
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def _effect_df(effect: Effect, config: SimulationConfig) -> int:
    a, b = config.levels_a - 1, config.levels_b - 1
    return {Effect.A: a, Effect.B: b, Effect.AB: a * b}[effect]


def _condition(effect, cell_n, g, n_eff, df2, config, via_f, via_sse, degenerate):
    if via_f.size == 0:
        raise DegenerateDataError(f"every replicate degenerate for cell_n={cell_n}, g={g}")
    alt_f = np.round(via_f, _DECISION_ROUNDING) > 0
    alt_sse = np.round(via_sse, _DECISION_ROUNDING) > 0
    via_f.setflags(write=False)
    return ConditionResult(
        effect=effect,
        cell_n=cell_n,
        g=g,
        n_effective=n_eff,
        df1=_effect_df(effect, config),
        df2=df2,
        replications=int(via_f.size),
        five_number=five_number_summary(via_f),
        alt_decision_rate=float(alt_f.mean()),
        path_consistency=float((alt_f == alt_sse).mean()),
        degenerate=degenerate,
        log_bf10=via_f,
    )


_COLUMNS = (
    "cell_n", "g", "effect", "n_effective", "df1", "df2", "replications",
    "min", "q1", "median", "q3", "max",
    "alt_decision_rate", "path_consistency", "degenerate",
)
_EFFECT_ORDER = {Effect.A: 0, Effect.B: 1, Effect.AB: 2}


def _sorted(results):
    return sorted(results, key=lambda r: (r.cell_n, r.g, _EFFECT_ORDER[r.effect]))


def _flat(r: ConditionResult) -> dict:
    five = r.five_number
    return {
        "cell_n": r.cell_n, "g": r.g, "effect": str(r.effect),
        "n_effective": r.n_effective, "df1": r.df1, "df2": r.df2,
        "replications": r.replications,
        "min": five.min, "q1": five.q1, "median": five.median, "q3": five.q3, "max": five.max,
        "alt_decision_rate": r.alt_decision_rate,
        "path_consistency": r.path_consistency,
        "degenerate": r.degenerate,
    }


def _fmt(x, precision):
    if isinstance(x, float):
        return f"{x:.{precision}g}"
    return str(x)


def render_report(results: Sequence[ConditionResult], format: str = "markdown", precision: int = 6) -> bytes:
    """Serialise results as a markdown table, CSV or JSON.

    CSV and JSON carry full float precision (``repr``); markdown rounds to
    ``precision`` significant digits. Rows are ordered by cell size, then g
    ascending, then effect A, B, AB.
    """
    if format not in REPORT_FORMATS:
        raise InvalidArgumentError(f"unknown report format {format!r}")
    rows = [_flat(r) for r in _sorted(results)]
    if format == "json":
        objs = []
        for row in rows:
            obj = {k: row[k] for k in _COLUMNS if k not in ("min", "q1", "median", "q3", "max")}
            obj["five_number"] = {k: row[k] for k in ("min", "q1", "median", "q3", "max")}
            objs.append(obj)
        return (json.dumps(objs, indent=2) + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_COLUMNS)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in _COLUMNS])
        return buf.getvalue().encode()
    lines = [
        "| " + " | ".join(_COLUMNS) + " |",
        "|" + "|".join("---" for _ in _COLUMNS) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(row[c], precision) for c in _COLUMNS) + " |")
    return ("\n".join(lines) + "\n").encode()
