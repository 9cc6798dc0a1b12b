"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class SeashellError(Exception):
    """Base class for all package errors."""


class ValidationError(SeashellError, ValueError):
    """Input data violates a structural invariant (exit code 2)."""


class DomainError(SeashellError, ValueError):
    """Arguments outside the domain where an operation is defined (exit code 2)."""


class NumericalError(SeashellError, RuntimeError):
    """A numerical routine failed: singular system, no convergence (exit code 3)."""


class GlmSingularError(NumericalError):
    pass


class CertificateRefused(SeashellError):
    """The a-priori certificate cannot be issued for this input (exit code 4)."""
