"""Exception types raised across the toolkit."""


class SpectrumError(ValueError):
    """Invalid spectral quantity (frequency, bandwidth, placement)."""


class CarrierRejectedError(SpectrumError):
    """Carrier occupied band does not fit inside the media channel."""


class LimitViolationError(ValueError):
    """Power policy would exceed the media channel power or PSD budget."""


class InsufficientDataError(ValueError):
    """Too few points for the requested fit or analysis."""


class FitRejectedError(ValueError):
    """Fitted characterization curve failed a quality or monotonicity gate."""


class CurveRangeError(ValueError):
    """Q reading falls outside the image of a characterization curve."""


class NoSignalError(RuntimeError):
    """No working probe result available for the requested analysis."""


class ScenarioError(ValueError):
    """Scenario or catalog file is malformed or internally inconsistent."""
