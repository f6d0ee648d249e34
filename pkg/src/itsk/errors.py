"""Exception hierarchy shared by all itsk modules.

Every error raised for bad *data* derives from :class:`ItskError` (and from
``ValueError``), so callers such as the CLI can map them to a single exit
code without catching programming errors.
"""


class ItskError(ValueError):
    pass


# codec
class CodecError(ItskError):
    pass


class InvalidDateError(CodecError):
    pass


class InvalidDatetimeError(CodecError):
    pass


class NonzeroFractionError(CodecError):
    pass


class InvalidEncodingError(CodecError):
    pass


class YearOutOfCenturyError(CodecError):
    pass


class UnitFinerThanFormatError(CodecError):
    pass


# timescale
class LeapTableParseError(ItskError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonMonotoneTableError(ItskError):
    pass


class LeapSecondError(ItskError):
    """A UTC ``second == 60`` that does not sit on a +1 table step."""


# compression
class EmptyInputError(ItskError):
    pass


class CorruptBlockError(ItskError):
    pass


# ingest / store
class FormatMismatchError(ItskError):
    pass


class InvalidTimestampError(ItskError):
    pass


class StoreWriteError(ItskError):
    pass


class UnsortedBatchError(ItskError):
    pass


class InvalidRangeError(ItskError):
    pass


class CorruptSegmentError(ItskError):
    pass


class CsvParseError(ItskError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# workloads
class InvalidSpecError(ItskError):
    pass


class MalformedBoundError(ItskError):
    pass
