"""Back-to-back transceiver characterization.

A characterization curve maps the total GSNR seen by the decision circuit
(optical noise combined with the modem implementation noise) to the Q-factor
the unit reports. Building the curve sweeps an applied noise-loading grid
through the modem noise combination, so the achievable range is capped by the
modem SNR: readings better than the unit ceiling are not invertible, which is
exactly the behaviour of a real probing transceiver.

The analytic BER laws used here are the same ones the line-system simulator
maps SNR through, which keeps characterization bias-free by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import _rect_qam_params
from .errors import CurveRangeError, FitRejectedError, InsufficientDataError
from .spectrum import ModulationFormat, PltConfig
from .units import harmonic_db_sum, q_db_from_ber

from scipy.special import erfc

# Readings at or beyond this pre-FEC BER carry no usable decision quality
# and are dropped from characterization (far beyond any FEC threshold).
UNMEASURABLE_BER = 0.20

DEFAULT_FIT_DEGREE = 3
FIT_RMS_LIMIT_DB = 0.05
MONOTONICITY_STEP_DB = 0.01
GRID_STEP_DB = 0.5
GRID_BELOW_THRESHOLD_DB = 1.0
GRID_ABOVE_THRESHOLD_DB = 14.0


@dataclass(frozen=True)
class ModemModel:
    """Implementation noise of one virtual transceiver unit.

    ``snr_modem_db`` may be ``math.inf`` for an ideal unit. The same model
    instance must be used both to characterize a configuration and to probe
    with it; the simulator enforces this by carrying the model inside the
    virtual transceiver.
    """

    snr_modem_db: float = 26.0

    def __post_init__(self):
        if not self.snr_modem_db > 0:
            raise ValueError("modem SNR must be positive dB")


def ber_from_snr(fmt: ModulationFormat, snr_db: float) -> float:
    """Analytic AWGN pre-FEC BER of a format at a per-symbol SNR in dB.

    All three formats use the rectangular-QAM law for their constellation
    grid; DP-QPSK reduces to Q(sqrt(snr)) and DP-16QAM to
    (3/8)*erfc(sqrt(snr/10)).
    """
    prefactor, distance = _rect_qam_params(fmt)
    snr_lin = 10.0 ** (snr_db / 10.0)
    return prefactor * float(erfc(distance * math.sqrt(snr_lin)))


@dataclass(frozen=True)
class CharacterizationCurve:
    """Fitted Q-vs-GSNR mapping for one configuration."""

    config_id: str
    points: tuple[tuple[float, float], ...]
    coefficients: tuple[float, ...]  # ascending powers
    valid_range: tuple[float, float]
    snr_modem_db: float = math.inf

    def q_at(self, gsnr_db: float) -> float:
        lo, hi = self.valid_range
        if not lo - 1e-9 <= gsnr_db <= hi + 1e-9:
            raise CurveRangeError(
                f"{gsnr_db:.3f} dB outside curve validity [{lo:.3f}, {hi:.3f}]"
            )
        return float(np.polynomial.polynomial.polyval(gsnr_db, self.coefficients))

    @property
    def q_range(self) -> tuple[float, float]:
        return self.q_at(self.valid_range[0]), self.q_at(self.valid_range[1])


def default_gsnr_grid(config: PltConfig) -> list[float]:
    """Noise-loading grid: 0.5 dB steps around the FEC-limit GSNR."""
    start = config.required_gsnr_db - GRID_BELOW_THRESHOLD_DB
    stop = config.required_gsnr_db + GRID_ABOVE_THRESHOLD_DB
    n = int(round((stop - start) / GRID_STEP_DB))
    return [start + i * GRID_STEP_DB for i in range(n + 1)]


def generate_char_points(
    model: ModemModel,
    config: PltConfig,
    gsnr_grid: list[float] | None = None,
) -> list[tuple[float, float]]:
    """Synthesize back-to-back characterization points for one configuration.

    Each applied noise-loading GSNR g combines with the modem noise into the
    total GSNR the decision circuit sees; that total and the resulting
    Q-factor form one point. Points in the unmeasurable BER region are
    dropped.
    """
    if gsnr_grid is None:
        gsnr_grid = default_gsnr_grid(config)
    if any(b <= a for a, b in zip(gsnr_grid, gsnr_grid[1:])):
        raise ValueError("GSNR grid must be strictly ascending")
    if gsnr_grid and not (0.0 <= gsnr_grid[0] and gsnr_grid[-1] <= 40.0):
        raise ValueError("GSNR grid must lie within [0, 40] dB")
    points = []
    for g in gsnr_grid:
        total = harmonic_db_sum(g, model.snr_modem_db)
        ber = ber_from_snr(config.format, total)
        if ber >= UNMEASURABLE_BER:
            continue
        points.append((total, q_db_from_ber(ber)))
    return points


def fit_characterization(
    points: list[tuple[float, float]],
    degree: int = DEFAULT_FIT_DEGREE,
    config_id: str = "",
    snr_modem_db: float = math.inf,
) -> CharacterizationCurve:
    """Least-squares polynomial fit of characterization points.

    Rejects fits that are non-monotone over the validity range (sampled at
    0.01 dB) or whose RMS residual exceeds the quality gate; callers should
    raise the degree or prune points on rejection.
    """
    if len(points) < degree + 2:
        raise InsufficientDataError(
            f"{len(points)} points cannot support a degree-{degree} fit"
        )
    gs = np.array([p[0] for p in points])
    qs = np.array([p[1] for p in points])
    if np.any(np.diff(gs) <= 0) or np.any(np.diff(qs) <= 0):
        raise InsufficientDataError("characterization points must be strictly monotone")
    coeffs = np.polynomial.polynomial.polyfit(gs, qs, degree)
    residual_rms = float(np.sqrt(np.mean(
        (np.polynomial.polynomial.polyval(gs, coeffs) - qs) ** 2)))
    if residual_rms > FIT_RMS_LIMIT_DB:
        raise FitRejectedError(
            f"fit residual RMS {residual_rms:.4f} dB exceeds {FIT_RMS_LIMIT_DB} dB"
        )
    lo, hi = float(gs[0]), float(gs[-1])
    sample = np.arange(lo, hi + MONOTONICITY_STEP_DB / 2, MONOTONICITY_STEP_DB)
    values = np.polynomial.polynomial.polyval(sample, coeffs)
    if np.any(np.diff(values) <= 0):
        raise FitRejectedError("fitted curve is not monotone over the validity range")
    return CharacterizationCurve(
        config_id=config_id,
        points=tuple((float(g), float(q)) for g, q in points),
        coefficients=tuple(float(c) for c in coeffs),
        valid_range=(lo, hi),
        snr_modem_db=snr_modem_db,
    )


def characterize(model: ModemModel, config: PltConfig,
                 degree: int = DEFAULT_FIT_DEGREE,
                 gsnr_grid: list[float] | None = None) -> CharacterizationCurve:
    points = generate_char_points(model, config, gsnr_grid)
    return fit_characterization(points, degree, config.config_id,
                                model.snr_modem_db)


def gsnr_from_q(curve: CharacterizationCurve, q_db: float,
                tolerance_db: float = 1e-4) -> float:
    """Invert a characterization curve: measured Q back to estimated GSNR.

    The fitted polynomial is monotone over its validity range, so the unique
    root is found by bisection. Q readings outside the curve image mean the
    measurement cannot be converted and the probing layer must mark it
    unusable.
    """
    lo, hi = curve.valid_range
    q_lo, q_hi = curve.q_range
    if not q_lo - 1e-9 <= q_db <= q_hi + 1e-9:
        raise CurveRangeError(
            f"Q {q_db:.3f} dB outside curve image [{q_lo:.3f}, {q_hi:.3f}]"
        )
    while hi - lo > tolerance_db:
        mid = 0.5 * (lo + hi)
        if curve.q_at(mid) < q_db:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def curve_to_dict(curve: CharacterizationCurve) -> dict:
    return {
        "schema_version": 1,
        "config_id": curve.config_id,
        "points": [[round(g, 6), round(q, 6)] for g, q in curve.points],
        "coefficients": list(curve.coefficients),
        "valid_range": [curve.valid_range[0], curve.valid_range[1]],
        "snr_modem_db": None if math.isinf(curve.snr_modem_db) else curve.snr_modem_db,
    }


def curve_from_dict(data: dict) -> CharacterizationCurve:
    points = [(float(g), float(q)) for g, q in data["points"]]
    gs = [p[0] for p in points]
    qs = [p[1] for p in points]
    if any(b <= a for a, b in zip(gs, gs[1:])) or any(b <= a for a, b in zip(qs, qs[1:])):
        raise FitRejectedError("persisted curve points are not strictly monotone")
    modem = data.get("snr_modem_db")
    return CharacterizationCurve(
        config_id=data["config_id"],
        points=tuple(points),
        coefficients=tuple(float(c) for c in data["coefficients"]),
        valid_range=(float(data["valid_range"][0]), float(data["valid_range"][1])),
        snr_modem_db=math.inf if modem is None else float(modem),
    )


def save_curve(curve: CharacterizationCurve, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(curve_to_dict(curve), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_curve(path: str | Path) -> CharacterizationCurve:
    return curve_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
