from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    severity: str
    message: str
    kind: str = "error"

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.line}:{self.col}: {self.severity}: {self.message}"


class FrontendError(Exception):
    kind = "error"

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col

    @property
    def diagnostic(self) -> Diagnostic:
        return Diagnostic(self.line, self.col, "error", self.message, self.kind)


class SolSyntaxError(FrontendError):
    kind = "syntax"


class UnsupportedFeature(FrontendError):
    kind = "unsupported"


class UnboundedLoop(FrontendError):
    kind = "unbounded-loop"


class BoundExceeded(FrontendError):
    kind = "bound-exceeded"
