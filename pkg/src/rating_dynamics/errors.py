"""Exception hierarchy. Each module raises its own subclass so the CLI can map
failures to distinct exit codes."""


class RatingDynamicsError(Exception):
    exit_code = 1


class IngestError(RatingDynamicsError, ValueError):
    exit_code = 3

    def __init__(self, message, source=None, line=None, reason=None):
        self.source = source
        self.line = line
        self.reason = reason or message
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class SeriesError(RatingDynamicsError, ValueError):
    exit_code = 4


class OscillatorError(RatingDynamicsError, ValueError):
    exit_code = 5


class FitError(RatingDynamicsError, ValueError):
    exit_code = 6


class PeriodicityError(RatingDynamicsError, ValueError):
    exit_code = 7


class SpatialError(RatingDynamicsError, ValueError):
    exit_code = 8
