"""Exception hierarchy shared across the package.

Geometry errors are programming/precondition failures; config errors map to
CLI exit code 2, invariant violations to exit 3, non-convergence to exit 4.
"""


class MpdsError(Exception):
    """Base class for all package errors."""


# --- low-level geometry ---------------------------------------------------

class GeometryError(MpdsError):
    pass


class CollinearSites(GeometryError):
    """The three sites are collinear; no dual power vertex exists."""


class DegenerateSegment(GeometryError):
    """Segment endpoints coincide."""


class CoincidentCenters(GeometryError):
    """Two disk centers coincide; circle intersection is degenerate."""


# --- triangulation --------------------------------------------------------

class TriangulationError(MpdsError):
    pass


class RedundantSite(TriangulationError):
    """The site would be hidden (its power cell is empty).

    Under the sampling invariant (no center covered by another disk) this
    cannot happen; seeing it signals a caller bug.
    """

    def __init__(self, msg="site would be hidden", site_id=None):
        super().__init__(msg)
        self.site_id = site_id


class ConflictError(TriangulationError):
    """Operation would violate the no-covered-center sampling invariant."""


class TooFewSites(TriangulationError):
    pass


class AllCollinear(TriangulationError):
    pass


class UnknownSite(TriangulationError):
    pass


class OutsideDomain(TriangulationError):
    pass


class StaleReference(TriangulationError):
    """A (id, version) handle refers to a superseded structural state."""


class NotNeighbors(TriangulationError):
    pass


# --- gap engine -----------------------------------------------------------

class DegeneratePrimitive(MpdsError):
    """Primitive area below resolution; dropped and logged, never raised
    across the public API."""


# --- sampler --------------------------------------------------------------

class SamplerError(MpdsError):
    pass


class NonPositiveDensity(SamplerError):
    pass


class EmptyDomain(SamplerError):
    pass


class InvalidPolygon(SamplerError):
    pass


class IterationCapExceeded(SamplerError):
    """Gap filling hit the safety cap with gaps remaining (diagnostic)."""


class NonDecreasingSchedule(SamplerError):
    pass


# --- analysis -------------------------------------------------------------

class TooFewPoints(MpdsError):
    pass


class ConfigMismatch(MpdsError):
    pass


# --- cli ------------------------------------------------------------------

class ConfigError(MpdsError):
    """Bad flags/inputs; CLI exit code 2."""
