"""Exception hierarchy shared by all bcgame modules."""


class BcgameError(Exception):
    """Base class for all bcgame errors."""


class NoBracket(BcgameError):
    """Root finder was given an interval whose endpoints do not bracket a sign change."""


class NoConvergence(BcgameError):
    """An iterative numeric routine exceeded its iteration budget."""


class InvalidInterval(BcgameError, ValueError):
    """Integration interval has a > b."""


class DomainError(BcgameError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class UnsupportedPriority(BcgameError, ValueError):
    """Game-layer operation invoked with priority p > 0.5, where the
    equilibrium classification is not established."""


class TooLarge(BcgameError, ValueError):
    """Brute-force oracle invoked beyond the horizon it is meant for."""
