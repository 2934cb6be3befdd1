"""Exception hierarchy shared across the package."""


class MdlEpiError(Exception):
    """Base class for all library errors."""


class NotFound(MdlEpiError):
    """A requested record (e.g. region) is absent from an input file."""


class InvalidSplit(MdlEpiError):
    """Observed/forecast split date falls outside the series range."""


class ShapeError(MdlEpiError):
    """Two sequences that must be aligned have different lengths."""


class NumericalBlowup(MdlEpiError):
    """ODE state became NaN or infinite during integration."""


class NegativityViolation(MdlEpiError):
    """ODE state went negative beyond the tolerated excursion."""


class DegenerateEpidemic(MdlEpiError):
    """A ratio over total infections was requested but the total is zero."""


class UnsupportedObservable(MdlEpiError):
    """The model has no compartments for the requested observable."""


class UnsupportedModel(MdlEpiError):
    """The operation is defined only for a different model family."""


class CalibrationFailed(MdlEpiError):
    """Every optimizer restart diverged or produced a non-finite loss."""


class InvalidLatentSeries(MdlEpiError):
    """Candidate total-infection series drops below the observed series."""


class DegenerateReportedRate(MdlEpiError):
    """Fitted reported rate reached 1, making the data cost undefined."""


class SearchFailed(MdlEpiError):
    """No usable cell in the reported-rate grid search."""


class RefinementFailed(MdlEpiError):
    """Series refinement could not produce a feasible candidate."""


class ConfigError(MdlEpiError):
    """A configuration file is missing required entries or is malformed."""
