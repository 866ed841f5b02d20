"""Exception hierarchy shared by all modules."""


class OshimaLabError(Exception):
    pass


class UnsupportedGroup(OshimaLabError):
    pass


class InvalidCartanData(OshimaLabError):
    pass


class NonSemisimpleAction(OshimaLabError):
    pass


class NotInGroup(OshimaLabError):
    pass


class NumericalBreakdown(OshimaLabError):
    pass


class UnknownRoot(OshimaLabError):
    pass


class NotInA(OshimaLabError):
    pass


class NotInCell(OshimaLabError):
    pass


class NotInChart(NotInCell):
    pass


class CenterAmbiguity(OshimaLabError):
    pass


class Unsupported(OshimaLabError):
    pass


class EmptySample(OshimaLabError):
    pass


class IncompatibleWindows(OshimaLabError):
    pass


class DimensionMismatch(OshimaLabError):
    pass


class NotComposable(OshimaLabError):
    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class WrongGroup(OshimaLabError):
    pass


class WrongOrbit(OshimaLabError):
    pass


class SignMismatch(OshimaLabError):
    pass
