"""Exception hierarchy. Every error is a ValueError so callers can catch broadly."""


class QSFError(ValueError):
    pass


class DimensionError(QSFError):
    pass


class FrameError(QSFError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotSlantError(QSFError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateAngleError(QSFError):
    pass


class ContainmentError(QSFError):
    pass


class ParameterError(QSFError):
    pass


class MarginError(QSFError):
    pass


class RankError(QSFError):
    pass


class PreconditionError(QSFError):
    pass
