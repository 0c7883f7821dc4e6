# errors.py


class DomainError(ValueError):
    """A numeric precondition of an operation was violated."""


class UsageError(RuntimeError):
    """An API or command was used out of order or with missing inputs."""


class DatasetError(OSError):
    """A dataset, trace or checkpoint file is missing or malformed."""
