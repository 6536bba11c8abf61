"""Parsing of published ANOVA summaries and batch CSV files.

Summary grammar (whitespace between tokens is ignored)::

    summary  := "F" "(" INT "," INT ")" "=" REAL tail*
    tail     := "," ( pclause | nclause )
    pclause  := ("p" | "P") ("=" | "<" | ">") REAL
    nclause  := ("n" | "N") "=" INT
    INT      := ["-"] DIGITS
    REAL     := ["-"] (DIGITS ["." [DIGITS]] | "." DIGITS) [("e"|"E") ["+"|"-"] DIGITS]

Each clause may appear at most once. Only ASCII is accepted; a unicode minus
sign is a parse error. A leading ``-`` parses, so that a negative F or df
reaches validation and is reported as a range problem rather than a syntax
one.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from scipy import stats

from .core import AnovaSummary
from .errors import ParseError, RowError, SchemaError, ValidationError

__all__ = [
    "WarningCode",
    "SummaryRecord",
    "parse_summary",
    "format_summary",
    "read_batch_csv",
    "parse_batch_csv",
    "implied_p",
    "check_p_consistency",
    "summary_warnings",
    "REQUIRED_COLUMNS",
    "OPTIONAL_COLUMNS",
]

REQUIRED_COLUMNS = ("f", "df1", "df2", "n")
OPTIONAL_COLUMNS = ("label", "p")
DEFAULT_P_TOLERANCE = 0.02


class WarningCode(str, enum.Enum):
    P_F_MISMATCH = "P_F_MISMATCH"
    N_MISSING = "N_MISSING"
    N_LT_DF_BOUND = "N_LT_DF_BOUND"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SummaryRecord:
    summary: AnovaSummary
    source_line: int
    warnings: tuple[WarningCode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.source_line < 1:
            raise ValueError("source_line must be >= 1")


_DIGITS = frozenset("0123456789")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        t = self.text
        while self.pos < len(t) and t[self.pos] in " \t\r\n":
            self.pos += 1

    def fail(self, expected: str):
        self._skip_ws()
        if self.pos < len(self.text):
            found = repr(self.text[self.pos])
        else:
            found = "end of input"
        raise ParseError(f"expected {expected}, found {found}", self.pos + 1, expected)

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, chars: str, expected: str | None = None) -> str:
        c = self.peek()
        if c and c in chars:
            self.pos += 1
            return c
        self.fail(expected or " or ".join(repr(ch) for ch in chars))

    def _digits(self) -> str:
        t, start = self.text, self.pos
        while self.pos < len(t) and t[self.pos] in _DIGITS:
            self.pos += 1
        return t[start:self.pos]

    def integer(self) -> int:
        self._skip_ws()
        start = self.pos
        neg = self.text.startswith("-", self.pos)
        if neg:
            self.pos += 1
        digits = self._digits()
        if not digits:
            self.pos = start
            self.fail("integer")
        if len(digits) > 18:
            raise ParseError("integer too large", start + 1, "integer")
        return -int(digits) if neg else int(digits)

    def real(self) -> float:
        self._skip_ws()
        t, start = self.text, self.pos
        if t.startswith("-", self.pos):
            self.pos += 1
        whole = self._digits()
        frac = ""
        if t.startswith(".", self.pos):
            self.pos += 1
            frac = self._digits()
        if not whole and not frac:
            self.pos = start
            self.fail("number")
        if self.pos < len(t) and t[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < len(t) and t[self.pos] in "+-":
                self.pos += 1
            if not self._digits():
                self.pos = mark + 1
                self.fail("exponent digits")
        value = float(t[start:self.pos])
        if not math.isfinite(value):
            raise ParseError("number out of range", start + 1, "finite number")
        return value

    def at_end(self) -> bool:
        return self.peek() == ""


def parse_summary(text: str | bytes) -> AnovaSummary:
    """Parse a summary such as ``"F(1,17)=1.75, p=0.20"``.

    Raises :class:`ParseError` (with a 1-based ``offset``) on malformed text
    and :class:`ValidationError` when the numbers are out of range.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError("non-ASCII byte", exc.start + 1, "ASCII text") from None
    for i, ch in enumerate(text):
        if ord(ch) > 127:
            raise ParseError(f"non-ASCII character {ch!r}", i + 1, "ASCII text")

    s = _Scanner(text)
    s.expect("F", "'F'")
    s.expect("(", "'('")
    df1 = s.integer()
    s.expect(",", "','")
    df2 = s.integer()
    s.expect(")", "')'")
    s.expect("=", "'='")
    f_value = s.real()

    p = None
    relation = "="
    n = None
    while not s.at_end():
        s.expect(",", "',' or end of input")
        key = s.peek()
        if key in ("p", "P") and p is None:
            s.pos += 1
            relation = s.expect("=<>", "'=', '<' or '>'")
            p = s.real()
        elif key in ("n", "N") and n is None:
            s.pos += 1
            s.expect("=", "'='")
            n = s.integer()
        else:
            wanted = [name for name, seen in (("'p'", p), ("'n'", n)) if seen is None]
            s.fail(" or ".join(wanted) if wanted else "end of input")

    if f_value < 0:
        raise ValidationError(f"F must be nonnegative, got {f_value}")
    if df1 < 1 or df2 < 1:
        raise ValidationError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    return AnovaSummary(f_value, df1, df2, n, None, p, relation)


def format_summary(summary: AnovaSummary) -> str:
    """Canonical text form; ``parse_summary`` inverts it exactly (label aside)."""
    out = f"F({summary.df1},{summary.df2})={summary.f_value!r}"
    if summary.reported_p is not None:
        out += f", p{summary.p_relation}{summary.reported_p!r}"
    if summary.n is not None:
        out += f", n={summary.n}"
    return out


def implied_p(f_value: float, df1: int, df2: int) -> float:
    """Upper-tail probability of the F(df1, df2) distribution at ``f_value``."""
    return float(stats.f.sf(f_value, df1, df2))


def check_p_consistency(summary: AnovaSummary, tolerance: float = DEFAULT_P_TOLERANCE):
    """Return ``WarningCode.P_F_MISMATCH`` if the reported p disagrees with F.

    For ``p < x`` only an implied p above ``x + tolerance`` is a mismatch, and
    for ``p > x`` only one below ``x - tolerance``.
    """
    if summary.reported_p is None:
        return None
    p = implied_p(summary.f_value, summary.df1, summary.df2)
    reported = summary.reported_p
    if summary.p_relation == "<":
        bad = p > reported + tolerance
    elif summary.p_relation == ">":
        bad = p < reported - tolerance
    else:
        bad = abs(p - reported) > tolerance
    return WarningCode.P_F_MISMATCH if bad else None


def summary_warnings(summary: AnovaSummary) -> list[WarningCode]:
    found = []
    if summary.n is None:
        found.append(WarningCode.N_MISSING)
    # df2/df1 <= n - 1 holds for between-subjects and repeated-measures layouts
    elif summary.n * summary.df1 < summary.df2 + summary.df1:
        found.append(WarningCode.N_LT_DF_BOUND)
    mismatch = check_p_consistency(summary)
    if mismatch:
        found.append(mismatch)
    return found


def _cell(row: dict, column: str, row_no: int, convert):
    raw = (row.get(column) or "").strip()
    if convert is None:
        return raw or None
    if not raw:
        raise RowError(row_no, column, "empty value")
    try:
        return convert(raw)
    except ValueError:
        raise RowError(row_no, column, f"cannot parse {raw!r}") from None


def _to_int(raw: str) -> int:
    value = float(raw)
    if not value.is_integer():
        raise ValueError(raw)
    return int(value)


def _to_real(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(raw)
    return value


def _parse_p(raw: str) -> tuple[str, float]:
    relation = "="
    if raw[:1] in "<>=":
        relation, raw = raw[0], raw[1:].strip()
    return relation, _to_real(raw)


def read_batch_csv(stream: BinaryIO | Iterable[str]) -> tuple[list[SummaryRecord], list[RowError]]:
    """Read a batch CSV, returning good records and per-row errors in input order.

    Row numbers count data rows from 1 (the header is row 0). A missing
    required column raises :class:`SchemaError` immediately.
    """
    if hasattr(stream, "read"):
        data = stream.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8-sig")
        stream = io.StringIO(data)
    reader = csv.DictReader(stream)
    header = [h.strip().lower() for h in (reader.fieldnames or [])]
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise SchemaError(col)
    reader.fieldnames = header

    records, errors = [], []
    for row_no, row in enumerate(reader, start=1):
        try:
            f = _cell(row, "f", row_no, _to_real)
            df1 = _cell(row, "df1", row_no, _to_int)
            df2 = _cell(row, "df2", row_no, _to_int)
            n_raw = _cell(row, "n", row_no, None)
            n = _cell(row, "n", row_no, _to_int) if n_raw else None
            label = _cell(row, "label", row_no, None)
            p_raw = _cell(row, "p", row_no, None)
            relation, p = _cell(row, "p", row_no, _parse_p) if p_raw else ("=", None)
            try:
                summary = AnovaSummary(f, df1, df2, n, label, p, relation)
            except ValidationError as exc:
                raise RowError(row_no, None, str(exc)) from None
        except RowError as exc:
            errors.append(exc)
            continue
        records.append(SummaryRecord(summary, row_no, tuple(summary_warnings(summary))))
    return records, errors


def parse_batch_csv(stream: BinaryIO | Iterable[str]) -> list[SummaryRecord]:
    """Strict variant of :func:`read_batch_csv`: the first bad row raises."""
    records, errors = read_batch_csv(stream)
    if errors:
        raise errors[0]
    return records
