"""Error types shared across the library."""


class CapacityError(Exception):
    """Requested object exceeds the configured size limits.

    Raised instead of attempting an allocation or enumeration that would
    be too large to be useful (Hilbert dimension above the cap, partition
    search over too many sites).
    """


class IntegrationFailureError(Exception):
    """The master-equation integrator left the physical state space.

    Carries the simulation time at which the violation was detected.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = float(time)
