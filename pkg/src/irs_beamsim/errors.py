"""Exception types raised across the package."""


class BeamSimError(Exception):
    """Base class for all package errors."""


class DegenerateGeometry(BeamSimError, ValueError):
    """Two points that must be distinct coincide."""


class LayoutError(BeamSimError, ValueError):
    """Site layout violates one of its invariants."""


class ParseError(BeamSimError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnitError(ParseError):
    """A parsed value is outside its physical range."""


class DimensionMismatch(BeamSimError, ValueError):
    pass


class IndexOutOfRange(BeamSimError, IndexError):
    pass


class UnsupportedCodebook(BeamSimError, TypeError):
    """Codebook lacks the DFT structure an FFT routine relies on."""


class EmptyCandidateSet(BeamSimError, ValueError):
    pass


class KTooLarge(BeamSimError, ValueError):
    pass


class FormatVersionMismatch(BeamSimError, ValueError):
    pass


class FingerprintMismatch(BeamSimError, ValueError):
    """Stored codebook geometry differs from the scenario's."""


class OverheadExceedsBlock(BeamSimError, ValueError):
    pass


class ConfigError(BeamSimError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
