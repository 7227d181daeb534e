"""Exception and warning types shared across the package."""


class GaplocError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GaplocError):
    """Input file is not syntactically valid."""


class SchemaError(GaplocError):
    """Input parses but does not match the documented schema."""


class ValidationError(GaplocError):
    """Schema-valid input violates a domain invariant.

    Carries the full list of problems so callers can print one per line.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


class UnknownId(GaplocError):
    """An id was looked up that the scenario does not define."""


class MalformedProblem(GaplocError):
    """A MILP problem description is internally inconsistent."""


class InfeasibleWarmStart(GaplocError):
    """A supplied warm start violates the problem rows or integrality."""


class InstanceTooLarge(GaplocError):
    """Exhaustive enumeration would exceed the configured cap."""


class DegenerateRange(GaplocError):
    """All normalization ranges of the weighted-sum scalarization are zero."""


class StageFailed(GaplocError):
    """A lexicographic stage found no incumbent within its budget."""

    def __init__(self, stage, objective, status):
        self.stage = stage
        self.objective = objective
        self.status = status
        super().__init__(
            "stage %d (objective %d) found no solution: %s"
            % (stage, objective, status)
        )


class EmptyPool(GaplocError):
    """No usable method report to build ranges from."""


class MissingSiteDistances(GaplocError):
    """Site graph requested but neither coordinates nor a site matrix exist."""


class UnknownPolicy(GaplocError):
    """Heuristic policy name not one of vol | dist | cost."""


class ExportWithoutCoordinates(GaplocError):
    """GeoJSON export requested for a scenario without coordinates."""


class ZeroRangeWarning(UserWarning):
    """An objective range collapsed to a point (nadir equals ideal)."""


class CoincidentSitesWarning(UserWarning):
    """Two sites share a location; edge weight uses a 1 m floor distance."""
