"""Exception types shared by the library and the command line."""

from typing import Optional


class RadarEyeError(Exception):
    """Base class for every error raised by radareye."""


class ConfigError(RadarEyeError, ValueError):
    """A scenario/radar configuration file could not be used.

    Carries the file position so the CLI can point at the offending line.
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        key: Optional[str] = None,
    ):
        self.message = message
        self.path = path
        self.line = line
        self.key = key
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.path or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        if self.key:
            return f"{where}: {self.key}: {self.message}"
        return f"{where}: {self.message}"


class FrameFileError(RadarEyeError):
    """Malformed or incompatible frame file."""


class BadMagicError(FrameFileError):
    pass


class UnsupportedVersionError(FrameFileError):
    pass


class FrameFileSizeError(FrameFileError):
    """Payload shorter or longer than the header promises."""


class DimensionMismatchError(FrameFileError, ValueError):
    """Frame dimensions disagree with the radar configuration or grid."""


class TrackingError(RadarEyeError, RuntimeError):
    pass


class EnumerationTooLargeError(RadarEyeError, ValueError):
    pass
