"""Exception taxonomy shared by all hax modules."""


class HaxError(Exception):
    """Base class for all package errors."""


class DegenerateEverywhere(HaxError):
    """The discriminant vanishes identically: no isolated branch points."""


class DegeneratePoint(HaxError):
    """Eigenvalue gap below threshold: point too close to the branch locus."""


class NotSimpleZero(HaxError):
    """Shifted lowest coefficient vanishes to order >= 2 at the origin."""


class NotEquivariant(HaxError):
    """Cover filtration lacks (or contradicts) Galois descent data."""


class ParityViolation(HaxError):
    """Frame valuation incompatible with the rank's parity rule."""


class PairingDegenerate(HaxError):
    """An eigenline is isotropic for the symmetric pairing."""


class PreconditionViolated(HaxError):
    """Input fails a documented precondition."""


class NonPositiveError(HaxError):
    """A quantity that must be positive is zero or negative."""


class InsufficientRadii(HaxError):
    """Too few usable radii for a log-log growth fit."""


class RegionOutsideGrid(HaxError):
    """Requested region is not covered by the grid's interior."""


class NotPositive(HaxError):
    """Interpolated metric left the positive-definite cone."""


class NotConverged(HaxError):
    """Iteration hit max_iter; carries the stats collected so far."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class ParseError(HaxError):
    """Config or polynomial literal error with source position."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
