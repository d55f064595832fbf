"""Exception types raised by phasecode.

Each error carries a short machine-readable ``code`` so callers (and the CLI)
can branch on it without parsing messages.
"""


class PhaseCodeError(Exception):
    code = "phasecode-error"

    def __init__(self, message=None):
        super().__init__(message or self.code)


class SequenceError(PhaseCodeError, ValueError):
    code = "invalid-sequence"


class FrankLengthError(SequenceError):
    code = "frank-length-not-square"


class AlphabetMismatchError(SequenceError):
    code = "alphabet-mismatch"


class SchemaError(PhaseCodeError, ValueError):
    """Malformed sequence file. ``field`` names the offending key."""

    code = "schema-error"

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ZeroPolynomialError(PhaseCodeError, ValueError):
    code = "zero-polynomial"
