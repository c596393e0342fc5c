"""Exception hierarchy shared by the engine, generator and driver."""


class FintxnError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(FintxnError, ValueError):
    """Malformed textual value; ``field`` names the offending component."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class SchemaError(FintxnError):
    """Record violates the graph schema (kinds, attributes, endpoints)."""


class MultiplicityError(SchemaError):
    """Edge insert would violate a multiplicity or cardinality constraint."""


class MissingEntityError(FintxnError):
    """Referenced vertex or edge does not exist."""


class DuplicateEntityError(FintxnError):
    """Vertex id already exists within its kind."""


class TransactionError(FintxnError):
    """Operation attempted on a transaction in a terminal state."""


class SerializationConflict(TransactionError):
    """Transaction was chosen as a deadlock victim; caller must treat it as aborted."""


class EngineClosedError(FintxnError):
    """Engine handle was closed or crashed."""


class RecoveryError(FintxnError):
    """Write-ahead log or snapshot is unreadable beyond ``last_valid_seq``."""

    def __init__(self, message: str, last_valid_seq: int):
        super().__init__(f"{message} (last valid sequence number: {last_valid_seq})")
        self.last_valid_seq = last_valid_seq


class InsufficientUpdatesError(FintxnError):
    """Update stream is too short to cover the requested run at the given compression."""
