class AtsException(Exception):
    """Base error of the library.

    Mirrors the ``HTTPException(detail=..., status_code=...)`` shape: every error
    carries a human readable ``detail`` and the process ``exit_code`` the CLI
    should terminate with.
    """

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: int | None = None) -> None:
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class DomainError(AtsException):
    """Argument outside the domain of an operation (branch cut, strip, x <= 0, ...)."""

    exit_code = 2


class QuadratureError(AtsException):
    exit_code = 3

    def __init__(self, detail: str, error_estimate: float = float("nan")) -> None:
        super().__init__(f"{detail} (error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class BracketError(AtsException):
    exit_code = 4

    def __init__(self, detail: str, suggested_bracket: tuple[float, float] | None = None) -> None:
        if suggested_bracket is not None:
            detail = f"{detail}; re-bracket, e.g. [{suggested_bracket[0]:.6g}, {suggested_bracket[1]:.6g}]"
        super().__init__(detail)
        self.suggested_bracket = suggested_bracket


class SamplerError(AtsException):
    exit_code = 5


class FitError(AtsException):
    exit_code = 6

    def __init__(self, detail: str, trace: list[str] | None = None) -> None:
        self.trace = trace or []
        if self.trace:
            detail = detail + ": " + "; ".join(self.trace)
        super().__init__(detail)


class CalibrationError(AtsException):
    exit_code = 7


class DataFormatError(AtsException):
    exit_code = 8

    def __init__(self, detail: str, line: int | None = None) -> None:
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line
