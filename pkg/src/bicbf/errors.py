"""Exception hierarchy shared by every bicbf module."""


class BicBfError(Exception):
    """Base class for all errors raised by bicbf."""


class InvalidArgumentError(BicBfError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateDataError(BicBfError, ValueError):
    """Data leave a quantity undefined (e.g. zero error sum of squares)."""


class ValidationError(InvalidArgumentError):
    """A syntactically valid summary carries out-of-range values."""


class ParseError(BicBfError, ValueError):
    """Summary text does not match the grammar.

    ``offset`` is the 1-based character position of the offending token.
    """

    def __init__(self, message: str, offset: int, expected: str | None = None):
        self.offset = offset
        self.expected = expected
        super().__init__(f"{message} at offset {offset}")


class SchemaError(BicBfError, ValueError):
    """A batch CSV header lacks a required column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing required column {column!r}")


class RowError(BicBfError, ValueError):
    """A batch CSV data row could not be turned into a summary."""

    def __init__(self, row: int, column: str | None, message: str):
        self.row = row
        self.column = column
        self.message = message
        where = f"row {row}" + (f", column {column!r}" if column else "")
        super().__init__(f"{where}: {message}")
