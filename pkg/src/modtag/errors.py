"""Exception types shared across the package."""


class ModtagError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ModtagError):
    """A malformed input file; carries the path and 1-based line number."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class ModelFormatError(ModtagError):
    """A model file that cannot be loaded (bad magic, version, truncation)."""


class ConvergenceError(ModtagError):
    """The SVM optimizer hit its step cap before reaching tolerance."""
