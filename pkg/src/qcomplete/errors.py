"""Exception hierarchy shared across the package.

Everything user-facing derives from :class:`QcError`.  Errors caused by bad
input (malformed SQL, unknown columns, ragged CSVs, out-of-range k, ...) are
:class:`InputError` subclasses; the CLI maps those to exit code 2 and the
HTTP service to a 4xx status.  Anything else escaping is an internal fault.
"""

from __future__ import annotations


class QcError(Exception):
    """Base class for all errors raised by this package."""

    code = "INTERNAL"


class InputError(QcError):
    """The caller supplied something we cannot work with."""

    code = "BAD_REQUEST"


# --- SQL text and AST ----------------------------------------------------


class ParseError(InputError):
    """Query text does not match the supported grammar."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, position: int, expected: str | None = None):
        self.position = position
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {position}{suffix}")


class UnsupportedConstructError(ParseError):
    """Syntactically recognizable SQL that is outside the supported subset."""

    code = "UNSUPPORTED_CONSTRUCT"

    def __init__(self, construct: str, position: int):
        self.construct = construct
        # bypass ParseError's message shaping
        InputError.__init__(self, f"{construct} is not supported (position {position})")
        self.position = position
        self.expected = None


class EmptyConjunctionError(InputError):
    """inject() was handed a conjunction with no atoms."""

    code = "EMPTY_CONJUNCTION"


# --- schema validation ----------------------------------------------------


class ValidationError(InputError):
    """A query mentions something the database snapshot does not have."""

    code = "VALIDATION_ERROR"


class UnknownTableError(ValidationError):
    code = "UNKNOWN_TABLE"


class UnknownColumnError(ValidationError):
    code = "UNKNOWN_COLUMN"


class AmbiguousColumnError(ValidationError):
    code = "AMBIGUOUS_COLUMN"


class TypeMismatchError(ValidationError):
    code = "TYPE_MISMATCH"


# --- CSV ingestion ---------------------------------------------------------


class CsvError(InputError):
    code = "CSV_ERROR"


class RaggedRowError(CsvError):
    code = "RAGGED_ROW"


class DuplicateHeaderError(CsvError):
    code = "DUPLICATE_HEADER"


class ValueParseError(CsvError):
    code = "VALUE_PARSE_ERROR"


class SchemaMismatchError(CsvError):
    code = "SCHEMA_MISMATCH"


# --- pipeline --------------------------------------------------------------


class EmptyWorkingDataError(InputError):
    """The query returned no rows, so there is nothing to partition."""

    code = "EMPTY_WORKING_DATA"


class NoUsableFeaturesError(InputError):
    """Every column was dropped during feature preparation."""

    code = "NO_USABLE_FEATURES"


class KOutOfRangeError(InputError):
    """k must satisfy 2 <= k <= number of working rows."""

    code = "K_OUT_OF_RANGE"


class SizeMismatchError(QcError):
    """Labels and rows disagree in length; indicates a caller bug."""

    code = "SIZE_MISMATCH"


class CannotPruneError(QcError):
    """prune_to_k asked to reach more leaves than the tree has."""

    code = "CANNOT_PRUNE"


class BareRootError(QcError):
    """A single-leaf tree has no conditions to extract."""

    code = "BARE_ROOT"
