"""Exception hierarchy shared by every module.

Each error carries a human readable ``detail`` and the process ``exit_code``
the CLI should use when it escapes to the top level (1 = user error,
2 = runtime failure).
"""


class QftPulseError(Exception):
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UserError(QftPulseError):
    exit_code = 1


class UnsupportedDimension(UserError):
    pass


class InvalidConfig(UserError):
    pass


class InvalidSpec(UserError):
    pass


class InvalidDuration(UserError):
    pass


class DimensionMismatch(UserError):
    pass


class PhaseNotAdmissible(UserError):
    pass


class CorruptArchive(UserError):
    pass


class VersionMismatch(UserError):
    pass


class NonHermitianInput(QftPulseError):
    pass


class NonFiniteAmplitude(QftPulseError):
    pass


class AmbiguousPhase(QftPulseError):
    pass


class UnclassifiableGate(QftPulseError):
    pass


class NoPassingPoint(QftPulseError):
    pass


class StorageUnavailable(QftPulseError):
    pass


class OptimizationFailed(QftPulseError):
    pass
