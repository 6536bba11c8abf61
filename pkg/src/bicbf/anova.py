"""Fixed-effects ANOVA for balanced one- and two-way designs."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .core import AnovaSummary, SumsOfSquares
from .errors import DegenerateDataError, InvalidArgumentError

__all__ = [
    "Effect",
    "NConvention",
    "FactorialDataset",
    "EffectRow",
    "AnovaTable",
    "two_way_anova",
    "effect_summary",
    "sse_pair_for_effect",
    "read_dataset_csv",
]


class Effect(str, enum.Enum):
    A = "A"
    B = "B"
    AB = "AB"

    def __str__(self):
        return self.value


class NConvention(str, enum.Enum):
    """Which count plays the role of ``n`` when building a summary."""

    TOTAL_OBSERVATIONS = "total"
    CELL_COUNT = "cell"
    EXPLICIT = "explicit"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class FactorialDataset:
    """Balanced data indexed ``values[i, j, k]`` (level of A, level of B, replicate)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim == 2:
            v = v[:, None, :]
        if v.ndim != 3:
            raise InvalidArgumentError(
                f"values must have shape (levels_a, levels_b, cell_n), got {v.shape}"
            )
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise InvalidArgumentError("each factor needs at least one level")
        if v.shape[2] < 2:
            raise InvalidArgumentError(f"cell_n must be >= 2, got {v.shape[2]}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[float]]) -> "FactorialDataset":
        """One-way dataset from equally sized groups."""
        rows = [list(g) for g in groups]
        if len({len(r) for r in rows}) > 1:
            raise InvalidArgumentError("unbalanced design: groups differ in size")
        return cls(np.asarray(rows, dtype=np.float64)[:, None, :])

    @property
    def levels_a(self) -> int:
        return self.values.shape[0]

    @property
    def levels_b(self) -> int:
        return self.values.shape[1]

    @property
    def cell_n(self) -> int:
        return self.values.shape[2]

    @property
    def n_total(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class EffectRow:
    effect: Effect
    ss: float
    df: int
    f: float


@dataclass(frozen=True)
class AnovaTable:
    effects: dict[Effect, EffectRow]
    ss_error: float
    df_error: int
    total_ss: float
    n_total: int
    cell_n: int

    def __getitem__(self, effect) -> EffectRow:
        try:
            return self.effects[Effect(effect)]
        except (KeyError, ValueError):
            raise InvalidArgumentError(f"effect {effect!r} not in table") from None

    def to_rows(self) -> list[dict]:
        rows = [
            {"effect": str(r.effect), "ss": r.ss, "df": r.df, "f": r.f}
            for r in self.effects.values()
        ]
        rows.append({"effect": "error", "ss": self.ss_error, "df": self.df_error, "f": None})
        return rows


def table_from_ss(ss, levels_a: int, levels_b: int, cell_n: int) -> AnovaTable:
    """Build an :class:`AnovaTable` from a kernel output row."""
    ss_a, ss_b, ss_ab, ss_err, ss_tot = (float(x) for x in ss)
    df_error = levels_a * levels_b * (cell_n - 1)
    if ss_err <= 0:
        raise DegenerateDataError("error sum of squares is zero; F is undefined")
    ms_err = ss_err / df_error
    dfs = {
        Effect.A: levels_a - 1,
        Effect.B: levels_b - 1,
        Effect.AB: (levels_a - 1) * (levels_b - 1),
    }
    sss = {Effect.A: ss_a, Effect.B: ss_b, Effect.AB: ss_ab}
    effects = {
        e: EffectRow(e, sss[e], df, (sss[e] / df) / ms_err)
        for e, df in dfs.items()
        if df > 0
    }
    return AnovaTable(effects, ss_err, df_error, ss_tot, levels_a * levels_b * cell_n, cell_n)


def two_way_anova(data: FactorialDataset) -> AnovaTable:
    """Classical balanced decomposition into A, B, AB and error.

    Effects with zero degrees of freedom (a factor with one level) are left
    out of the table, so a ``levels_b == 1`` dataset yields a one-way table.
    """
    if data.levels_a < 2 and data.levels_b < 2:
        raise InvalidArgumentError("need at least one factor with two or more levels")
    # ss_error is zero exactly when every cell is constant; rounding in the
    # cell means would otherwise leave a tiny positive residue
    if not np.any(np.ptp(data.values, axis=2)):
        raise DegenerateDataError("every cell is constant; F is undefined")
    ss = kernels.anova_ss(data.values)
    return table_from_ss(ss, data.levels_a, data.levels_b, data.cell_n)


def effect_summary(
    table: AnovaTable,
    effect,
    n_convention: NConvention | str = NConvention.TOTAL_OBSERVATIONS,
    n: int | None = None,
) -> AnovaSummary:
    row = table[effect]
    conv = NConvention(n_convention)
    if conv is NConvention.TOTAL_OBSERVATIONS:
        n_eff = table.n_total
    elif conv is NConvention.CELL_COUNT:
        n_eff = table.cell_n
    else:
        if n is None or isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise InvalidArgumentError(f"explicit n must be an integer >= 2, got {n!r}")
        n_eff = n
    return AnovaSummary(row.f, row.df, table.df_error, n_eff, label=str(row.effect))


def sse_pair_for_effect(table: AnovaTable, effect) -> SumsOfSquares:
    row = table[effect]
    return SumsOfSquares(row.ss, table.ss_error)


def read_dataset_csv(stream) -> FactorialDataset:
    """Read long-format ``a_level,b_level,value`` CSV into a balanced dataset.

    Level labels are arbitrary strings, ordered by first appearance. The
    ``b_level`` column may be omitted for one-way data.
    """
    if hasattr(stream, "read"):
        data = stream.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8-sig")
        stream = io.StringIO(data)
    reader = csv.DictReader(stream)
    header = [h.strip().lower() for h in (reader.fieldnames or [])]
    for col in ("a_level", "value"):
        if col not in header:
            raise InvalidArgumentError(f"missing required column {col!r}")
    reader.fieldnames = header
    has_b = "b_level" in header

    cells: dict[tuple[str, str], list[float]] = {}
    a_levels: dict[str, int] = {}
    b_levels: dict[str, int] = {}
    for row_no, row in enumerate(reader, start=1):
        a = (row.get("a_level") or "").strip()
        b = (row.get("b_level") or "").strip() if has_b else ""
        try:
            y = float(row.get("value") or "")
        except ValueError:
            raise InvalidArgumentError(f"row {row_no}: cannot parse value") from None
        if not math.isfinite(y):
            raise InvalidArgumentError(f"row {row_no}: value must be finite")
        a_levels.setdefault(a, len(a_levels))
        b_levels.setdefault(b, len(b_levels))
        cells.setdefault((a, b), []).append(y)

    if not cells:
        raise InvalidArgumentError("no data rows")
    sizes = {len(cells.get((a, b), ())) for a in a_levels for b in b_levels}
    if len(sizes) != 1:
        raise InvalidArgumentError(f"unbalanced design: cell sizes {sorted(sizes)}")
    values = np.array(
        [[cells[(a, b)] for b in b_levels] for a in a_levels], dtype=np.float64
    )
    return FactorialDataset(values)
