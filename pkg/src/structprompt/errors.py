"""Exception hierarchy shared across the package."""

from __future__ import annotations


class StructPromptError(Exception):
    """Base class for every error raised by structprompt."""


class InvalidStructuredInfo(StructPromptError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SerializationSyntaxError(StructPromptError, ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")


class ParseError(StructPromptError, ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.describe() for d in self.diagnostics))


class UnknownRelationPhrase(StructPromptError, KeyError):
    def __str__(self) -> str:
        return f"unknown relation phrase: {self.args[0]!r}"


class VocabularyExhausted(StructPromptError):
    pass


class SchemaError(StructPromptError, ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnplacedObject(StructPromptError, KeyError):
    pass


class InconsistentRelations(StructPromptError, ValueError):
    pass


class Unsatisfiable(StructPromptError):
    pass


class MalformedPPM(StructPromptError, ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")


class UnknownColor(StructPromptError, ValueError):
    pass


class EmptyScene(StructPromptError):
    pass


class CountMismatch(StructPromptError, ValueError):
    pass


class LengthMismatch(StructPromptError, ValueError):
    pass


class DegenerateRow(StructPromptError, ValueError):
    pass


class EmptyInput(StructPromptError, ValueError):
    pass


class PipelineError(StructPromptError):
    """A module error re-raised with the pipeline stage that produced it."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
