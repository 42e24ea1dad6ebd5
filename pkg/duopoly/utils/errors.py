class DuopolyError(Exception):
    """Base error. `code` is the machine-readable name printed by the CLI."""

    exit_code = 1

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail

    @property
    def code(self) -> str:
        return type(self).__name__


class ConfigInvalid(DuopolyError):
    exit_code = 3


class OrderingViolation(DuopolyError):
    exit_code = 10


class NonPositiveChoke(DuopolyError):
    exit_code = 11


class SingletonSet(DuopolyError):
    exit_code = 12


class DegenerateMap(DuopolyError):
    exit_code = 13


class NegativeInput(DuopolyError):
    exit_code = 14


class InvalidParameters(DuopolyError):
    exit_code = 15


class NotChaoticRegime(DuopolyError):
    exit_code = 20


class PieceCountNotPowerOfTwo(DuopolyError):
    exit_code = 21


class CriticalOrbitMismatch(PieceCountNotPowerOfTwo):
    """Cluster bounds found by simulation do not sit on critical-orbit iterates."""

    exit_code = 22


class ZeroSlopeEncountered(DuopolyError):
    exit_code = 23


class NotACycle(DuopolyError):
    exit_code = 24


class NotClassified(DuopolyError):
    exit_code = 25


class NotSquareGrid(DuopolyError):
    exit_code = 26


class EmptySweep(DuopolyError):
    exit_code = 27


class IoFailure(DuopolyError):
    exit_code = 30
