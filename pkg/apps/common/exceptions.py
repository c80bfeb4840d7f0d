"""
Error kinds shared by every lab module.

Numerical modules raise these; management commands translate them into
``CommandError`` and the REST layer never sees them.
"""


class LabError(Exception):
    """Base class for all laboratory errors."""


class FormatError(LabError):
    """Malformed file or record (bad WAV header, truncated chunk, bad magic)."""


class UnsupportedError(LabError):
    """Well-formed input using an encoding or feature the lab does not handle."""


class SizeError(LabError, ValueError):
    """Input too short or empty for the requested operation."""


class ShapeError(LabError, ValueError):
    """Array shapes are incompatible."""


class ArgumentError(LabError, ValueError):
    """An argument lies outside its documented domain."""


class DegenerateSignalError(LabError):
    """A signal with zero energy where a nonzero one is required."""


class SignalLookupError(LabError, KeyError):
    """A referenced signal or record id does not exist."""


class ResourceError(LabError):
    """A data source (corpus, manifest) is empty or exhausted."""


class CompatibilityError(LabError):
    """Checkpoint, configuration or stream state do not belong together."""


class NumericalError(LabError):
    """A linear-algebra step failed (singular matrix after loading)."""
