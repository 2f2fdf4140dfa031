"""Exception hierarchy shared across the package."""


class NoumenalError(Exception):
    """Base class for every error raised by this package."""


class UniverseMismatchError(NoumenalError):
    """Two systems were combined although they live over different site universes."""


class NotASubsystemError(NoumenalError):
    """A projection was requested onto a system that is not contained in the source."""


class NotDisjointError(NoumenalError):
    """A product or join was requested for systems that share sites."""


class SystemMismatchError(NoumenalError):
    """An operation and its argument belong to different systems."""


class BudgetError(NoumenalError):
    """A requested enumeration or exhaustive check does not fit the budget."""


class IncompatibleClassesError(NoumenalError):
    """Two noumenal classes have no common global representative."""


class TheoryLoadError(NoumenalError):
    """A theory could not be built, for instance because its operations are not reversible."""


class ConstructionRefused(NoumenalError):
    """The local model was not built because the theory failed its axiom checks."""

    def __init__(self, report):
        failing = [r.id for r in report.results if r.status == "fail"]
        super().__init__("theory failed axiom checks: " + ", ".join(failing))
        self.report = report
