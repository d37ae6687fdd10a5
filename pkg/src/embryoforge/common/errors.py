"""Exception types shared across the package.

Every error that can reach the command line carries the exit code that
``main`` should return for it: 1 for bad input or configuration, 2 for a
numerical failure during training."""

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_ERROR = 2


class EmbryoForgeError(Exception):
    """Base class for errors raised by embryoforge"""

    exit_code = EXIT_INPUT_ERROR


class ConfigError(EmbryoForgeError):
    """The configuration files or flags are invalid"""


class InputError(EmbryoForgeError):
    """An input file or directory is missing or unusable"""


class PgmError(InputError):
    """A portable graymap could not be parsed"""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class CheckpointError(InputError):
    """A checkpoint file could not be decoded"""

    def __init__(self, message, record=None):
        if record is not None:
            message = f"{message} (record: {record})"
        super().__init__(message)
        self.record = record


class NumericalError(EmbryoForgeError):
    """A loss or score became non-finite"""

    exit_code = EXIT_NUMERICAL_ERROR

    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class DimensionError(ValueError):
    """Operand shapes do not agree"""


class BatchCouplingError(ValueError):
    """A per-sample quantity was requested through a layer that mixes the batch"""
