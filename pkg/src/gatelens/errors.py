"""Exception taxonomy for the whole engine.

Static (schema/type) errors, parse errors, CSV ingestion errors, identifier
resolution errors and provider errors all derive from GateLensError so the
pipeline can fold any of them into a Rejected/Failed outcome.
"""

from __future__ import annotations


class GateLensError(Exception):
    """Base class for all engine errors."""


# --- static analysis (infer_schema / compile_plan) ---

class UnknownTableError(GateLensError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown table: {name!r}")


class UnknownColumnError(GateLensError):
    def __init__(self, name: str, available: tuple[str, ...] = ()):
        self.name = name
        self.available = available
        hint = f" (available: {', '.join(available)})" if available else ""
        super().__init__(f"unknown column: {name!r}{hint}")


class TypeMismatchError(GateLensError):
    pass


class NotUnionCompatibleError(GateLensError):
    pass


class InvalidDivisionError(GateLensError):
    pass


class DuplicateOutputColumnError(GateLensError):
    def __init__(self, name: str, context: str = ""):
        self.name = name
        detail = f" in {context}" if context else ""
        super().__init__(
            f"duplicate output column {name!r}{detail}; rename one side first"
        )


# --- parsing ---

class ParseError(GateLensError):
    """Syntax error with a 1-based source position.

    `expected` is the set of token descriptions that would have been legal,
    `found` the token actually seen.
    """

    def __init__(self, message: str, line: int, column: int,
                 expected: frozenset[str] = frozenset(), found: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        self.message = message
        super().__init__(f"{line}:{column}: {message}")


# --- CSV ingestion ---

class HeaderMismatchError(GateLensError):
    pass


class TypeParseError(GateLensError):
    def __init__(self, row: int, column: str, value: str, expected: str):
        self.row = row
        self.column = column
        super().__init__(
            f"row {row}, column {column!r}: cannot parse {value!r} as {expected}"
        )


class NullInNonNullableError(GateLensError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: null in non-nullable column")


# --- execution ---

class RuntimeTypeError(GateLensError):
    """Raised when a value violates its compiled type; unreachable for plans
    produced by compile_plan over a consistent database."""


# --- identifier resolution ---

class UnresolvedError(GateLensError):
    def __init__(self, requested: str):
        self.requested = requested
        super().__init__(f"cannot resolve identifier {requested!r}")


class AmbiguousError(GateLensError):
    def __init__(self, requested: str, candidates: tuple[str, ...]):
        self.requested = requested
        self.candidates = candidates
        super().__init__(
            f"ambiguous identifier {requested!r}: ties between {', '.join(candidates)}"
        )


# --- model providers ---

class ProviderError(GateLensError):
    pass


class ProviderTimeout(ProviderError):
    pass


class TransportError(ProviderError):
    pass


class ProviderRejection(ProviderError):
    pass


class FixtureMissError(ProviderError):
    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(f"no fixture recorded for request {digest}")


class MalformedResponseError(GateLensError):
    """Model output carried neither a fenced ra block nor an OUT_OF_SCOPE line."""
