"""Probing algorithms: extended symbol-rate-variable probing, penalties and
symbol-rate cap, link GSNR estimation, margins and configuration selection,
frequency sweeps with profile analytics, and operation-regime detection.

Everything here drives a line exclusively through its black-box probe surface
(:meth:`LineSystem.probe` or anything with the same signature) plus published
channel metadata. Ground-truth oracles of the simulator are off limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    CarrierRejectedError,
    CurveRangeError,
    InsufficientDataError,
    LimitViolationError,
    NoSignalError,
)
from .modem import CharacterizationCurve, gsnr_from_q
from .spectrum import (
    MediaChannel,
    PltConfig,
    PolicyKind,
    PowerPolicy,
    admissible_offsets_ghz,
)
from .units import q_db_from_ber

NEAR_ZERO_MARGIN_DB = 1.5
DEFAULT_CAP_THETA_DB = 2.0
REGIME_DEADBAND_DB = 0.1
MISALIGNMENT_FLAT_PROFILE_DB = 0.1


class ProbeStatus(Enum):
    WORKING = "working"
    OUTAGE = "outage"
    UNUSABLE = "unusable"


class Regime(Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"
    NEAR_OPTIMUM = "near_optimum"


class VerificationFlag(Enum):
    NO_FALSE_PREDICTIONS = "no_false_predictions"
    FALSE_PREDICTIONS = "false_predictions"
    UNVERIFIED = "unverified"


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of one probe measurement."""

    config_id: str
    carrier_center_thz: float
    policy: PowerPolicy
    status: ProbeStatus
    sim_time_h: float = 0.0
    q_db: float | None = None
    gsnr_est_db: float | None = None
    note: str = ""


@dataclass
class ProbeCampaign:
    """Ordered probe results against one line, sharing one catalog."""

    link_name: str
    media_channel: MediaChannel
    configs: dict[str, PltConfig]
    results: list[ProbeResult] = field(default_factory=list)

    def add(self, result: ProbeResult) -> None:
        if result.config_id not in self.configs:
            raise KeyError(f"{result.config_id} not in campaign catalog")
        key = (result.config_id, round(result.carrier_center_thz, 6),
               result.policy, round(result.sim_time_h, 9))
        for existing in self.results:
            if (existing.config_id, round(existing.carrier_center_thz, 6),
                    existing.policy, round(existing.sim_time_h, 9)) == key:
                raise ValueError(f"duplicate probe {key}")
        self.results.append(result)

    def working(self) -> list[ProbeResult]:
        return [r for r in self.results if r.status is ProbeStatus.WORKING]


@dataclass
class GsnrProfile:
    """Estimated GSNR against carrier center frequency, per configuration."""

    media_channel: MediaChannel
    step_ghz: float
    points: dict[str, list[tuple[float, float | None]]]
    configs: dict[str, PltConfig]
    skipped: dict[str, str] = field(default_factory=dict)


@dataclass
class MarginReport:
    gsnr_est_link_db: float
    symbol_rate_cap_gbd: float
    theta_db: float
    margins_db: dict[str, float]
    best_config: str | None
    accuracy_bound_db: float
    accuracy_flag: VerificationFlag
    estimate_spread_db: float
    campaign: ProbeCampaign


@dataclass
class RegimeEntry:
    classification: Regime
    delta_db: float | None
    recommended_power_delta_db: float
    note: str = ""


@dataclass
class RegimeReport:
    psd_ref_dbm_per_ghz: float
    rs_ref_gbd: float
    entries: dict[str, RegimeEntry]
    excluded: dict[str, str] = field(default_factory=dict)


def _classify_reading(reading, config: PltConfig,
                      curve: CharacterizationCurve) -> tuple[ProbeStatus, float | None, float | None, str]:
    if not reading.post_fec_ok:
        return ProbeStatus.OUTAGE, None, None, "post-FEC errors"
    if reading.pre_fec_ber <= 0.0:
        return ProbeStatus.UNUSABLE, None, None, "error-free reading, no Q estimate"
    q = q_db_from_ber(reading.pre_fec_ber)
    try:
        gsnr = gsnr_from_q(curve, q)
    except CurveRangeError as exc:
        return ProbeStatus.UNUSABLE, q, None, str(exc)
    return ProbeStatus.WORKING, q, gsnr, ""


def probe_once(line, config: PltConfig, curve: CharacterizationCurve,
               policy: PowerPolicy, carrier_center_thz: float | None = None,
               sim_time_h: float = 0.0) -> ProbeResult:
    """Run one probe and convert the BER reading into a GSNR estimate."""
    center = (carrier_center_thz if carrier_center_thz is not None
              else line.media_channel.center_thz)
    try:
        reading = line.probe(config, policy, carrier_center_thz, sim_time_h)
    except (CarrierRejectedError, LimitViolationError) as exc:
        return ProbeResult(config.config_id, center, policy,
                           ProbeStatus.UNUSABLE, sim_time_h, note=str(exc))
    status, q, gsnr, note = _classify_reading(reading, config, curve)
    return ProbeResult(config.config_id, center, policy, status, sim_time_h,
                       q_db=q, gsnr_est_db=gsnr, note=note)


def run_extended_probe(line, catalog: tuple[PltConfig, ...],
                       curves: dict[str, CharacterizationCurve],
                       policy: PowerPolicy,
                       carrier_center_thz: float | None = None,
                       sim_time_h: float = 0.0) -> ProbeCampaign:
    """Probe every catalog configuration once at one carrier position."""
    campaign = ProbeCampaign(
        link_name=getattr(line, "name", ""),
        media_channel=line.media_channel,
        configs={cfg.config_id: cfg for cfg in catalog},
    )
    for config in catalog:
        curve = curves[config.config_id]
        campaign.add(probe_once(line, config, curve, policy,
                                carrier_center_thz, sim_time_h))
    return campaign


def compute_penalties(campaign: ProbeCampaign) -> dict[str, float]:
    """Estimated-GSNR penalty of each configuration against the best one.

    Outage configurations get an infinite marker; unusable measurements carry
    no estimate and are left out.
    """
    working = campaign.working()
    if not working:
        raise NoSignalError("no working probe result in campaign")
    best = max(r.gsnr_est_db for r in working)
    penalties: dict[str, float] = {}
    for result in campaign.results:
        if result.status is ProbeStatus.WORKING:
            penalties[result.config_id] = best - result.gsnr_est_db
        elif result.status is ProbeStatus.OUTAGE:
            penalties[result.config_id] = math.inf
    return penalties


def detect_symbol_rate_cap(campaign: ProbeCampaign,
                           penalties: dict[str, float],
                           theta_db: float = DEFAULT_CAP_THETA_DB) -> float:
    """Highest usable symbol rate: working, and not significantly penalized.

    Falls back to the minimum-penalty working configuration when every other
    working configuration violates the threshold.
    """
    if not penalties:
        raise NoSignalError("no penalties to derive a symbol rate cap from")
    working = {r.config_id for r in campaign.working()}
    eligible = [campaign.configs[cid].symbol_rate_gbd
                for cid, pen in penalties.items()
                if cid in working and pen <= theta_db]
    if eligible:
        return max(eligible)
    best_cid = min((cid for cid in penalties if cid in working),
                   key=lambda cid: penalties[cid])
    return campaign.configs[best_cid].symbol_rate_gbd


def estimate_link_gsnr(campaign: ProbeCampaign, cap_gbd: float) -> float:
    """Mean estimated GSNR over working configurations within the cap."""
    included = [r.gsnr_est_db for r in campaign.working()
                if campaign.configs[r.config_id].symbol_rate_gbd <= cap_gbd + 1e-9]
    if not included:
        raise NoSignalError("no working result at or below the symbol rate cap")
    return float(np.mean(included))


def estimate_spread_db(campaign: ProbeCampaign, cap_gbd: float | None = None) -> float:
    """Max minus min of the working GSNR estimates, optionally cap-filtered."""
    values = [r.gsnr_est_db for r in campaign.working()
              if cap_gbd is None
              or campaign.configs[r.config_id].symbol_rate_gbd <= cap_gbd + 1e-9]
    if not values:
        raise NoSignalError("no working results")
    return max(values) - min(values)


def compute_margins(gsnr_est_link_db: float, catalog: tuple[PltConfig, ...],
                    cap_gbd: float) -> dict[str, float]:
    """Implementation margin per configuration within the symbol rate cap."""
    return {
        cfg.config_id: gsnr_est_link_db - cfg.required_gsnr_db
        for cfg in catalog
        if cfg.symbol_rate_gbd <= cap_gbd + 1e-9
    }


def select_best_config(margins_db: dict[str, float],
                       catalog: tuple[PltConfig, ...]) -> str | None:
    """Highest line rate among positive margins; ties prefer higher margin,
    then smaller spectral footprint."""
    by_id = {cfg.config_id: cfg for cfg in catalog}
    candidates = [(by_id[cid].line_rate_gbps, margin, -by_id[cid].symbol_rate_gbd, cid)
                  for cid, margin in margins_db.items() if margin > 0]
    if not candidates:
        return None
    return max(candidates)[3]


def verify_margin_accuracy(line, catalog: tuple[PltConfig, ...],
                           curves: dict[str, CharacterizationCurve],
                           margins_db: dict[str, float],
                           policy: PowerPolicy,
                           carrier_center_thz: float | None = None,
                           sim_time_h: float = 0.0,
                           near_zero_db: float = NEAR_ZERO_MARGIN_DB,
                           ) -> tuple[float, VerificationFlag]:
    """Check near-zero-margin predictions against actual signal condition.

    Every configuration whose predicted margin is within the near-zero band
    is probed; a prediction is false when its sign disagrees with the
    observed working status. Returns the largest false prediction magnitude,
    or zero with the appropriate flag.
    """
    by_id = {cfg.config_id: cfg for cfg in catalog}
    verified = False
    worst = 0.0
    for cid, margin in margins_db.items():
        if abs(margin) > near_zero_db:
            continue
        verified = True
        config = by_id[cid]
        try:
            reading = line.probe(config, policy, carrier_center_thz, sim_time_h)
            works = reading.post_fec_ok
        except (CarrierRejectedError, LimitViolationError):
            works = False
        false_positive = margin > 0 and not works
        false_negative = margin < 0 and works
        if false_positive or false_negative:
            worst = max(worst, abs(margin))
    if not verified:
        return 0.0, VerificationFlag.UNVERIFIED
    if worst > 0.0:
        return worst, VerificationFlag.FALSE_PREDICTIONS
    return 0.0, VerificationFlag.NO_FALSE_PREDICTIONS


def run_probe_workflow(line, catalog: tuple[PltConfig, ...],
                       curves: dict[str, CharacterizationCurve],
                       policy: PowerPolicy,
                       theta_db: float = DEFAULT_CAP_THETA_DB,
                       carrier_center_thz: float | None = None,
                       sim_time_h: float = 0.0) -> MarginReport:
    """Full narrow-band workflow: probe, cap, estimate, margins, verify."""
    campaign = run_extended_probe(line, catalog, curves, policy,
                                  carrier_center_thz, sim_time_h)
    penalties = compute_penalties(campaign)
    cap = detect_symbol_rate_cap(campaign, penalties, theta_db)
    est = estimate_link_gsnr(campaign, cap)
    margins = compute_margins(est, catalog, cap)
    best = select_best_config(margins, catalog)
    bound, flag = verify_margin_accuracy(line, catalog, curves, margins,
                                         policy, carrier_center_thz, sim_time_h)
    return MarginReport(
        gsnr_est_link_db=est,
        symbol_rate_cap_gbd=cap,
        theta_db=theta_db,
        margins_db=margins,
        best_config=best,
        accuracy_bound_db=bound,
        accuracy_flag=flag,
        estimate_spread_db=estimate_spread_db(campaign, cap),
        campaign=campaign,
    )


def run_frequency_sweep(line, configs: tuple[PltConfig, ...],
                        curves: dict[str, CharacterizationCurve],
                        step_ghz: float, policy: PowerPolicy,
                        sim_time_h: float = 0.0) -> GsnrProfile:
    """Probe each configuration across every admissible carrier position.

    Carrier placements keeping the occupied band inside the media channel are
    visited in frequency order; positions with post-FEC errors (or readings
    that cannot be converted) are recorded as outage points.
    """
    mc = line.media_channel
    profile = GsnrProfile(media_channel=mc, step_ghz=step_ghz, points={},
                          configs={cfg.config_id: cfg for cfg in configs})
    for config in configs:
        offsets = admissible_offsets_ghz(mc, config, step_ghz)
        if not offsets:
            profile.skipped[config.config_id] = (
                f"occupied band {config.occupied_bandwidth_ghz:.2f} GHz does not "
                f"fit inside the {mc.width_ghz:.0f} GHz media channel")
            continue
        series: list[tuple[float, float | None]] = []
        for offset in offsets:
            center = mc.center_thz + offset / 1000.0
            result = probe_once(line, config, curves[config.config_id],
                                policy, center, sim_time_h)
            value = result.gsnr_est_db if result.status is ProbeStatus.WORKING else None
            series.append((center, value))
        profile.points[config.config_id] = series
    return profile


def _working_points(profile: GsnrProfile, config_id: str) -> list[tuple[float, float]]:
    return [(freq, value) for freq, value in profile.points.get(config_id, [])
            if value is not None]


def detect_misalignment(profile: GsnrProfile) -> tuple[float, bool]:
    """Estimate the cascade center offset from the narrowest configuration.

    Fits a parabola through the three best GSNR points of the configuration
    with the smallest occupied bandwidth and reports the vertex offset from
    the nominal channel center, rounded to 0.1 GHz. Returns (offset_ghz,
    indeterminate); a flat profile is indeterminate.
    """
    usable = [cid for cid in profile.points
              if len(_working_points(profile, cid)) >= 3]
    if not usable:
        raise InsufficientDataError("no configuration has three working points")
    narrowest = min(usable,
                    key=lambda cid: profile.configs[cid].occupied_bandwidth_ghz)
    points = _working_points(profile, narrowest)
    values = [v for _, v in points]
    if max(values) - min(values) < MISALIGNMENT_FLAT_PROFILE_DB:
        return 0.0, True
    top = sorted(points, key=lambda p: p[1], reverse=True)[:3]
    top.sort()
    xs = np.array([(freq - profile.media_channel.center_thz) * 1000.0
                   for freq, _ in top])
    ys = np.array([v for _, v in top])
    a, b, _ = np.polyfit(xs, ys, 2)
    if abs(a) < 1e-12:
        return 0.0, True
    vertex = -b / (2.0 * a)
    if abs(vertex) > profile.media_channel.width_ghz / 2.0:
        # Monotone or tilt-dominated profile; the vertex extrapolates outside
        # the slot and carries no alignment information.
        return 0.0, True
    return round(vertex, 1), False


def profile_tilt_ripple(profile: GsnrProfile, config_id: str) -> tuple[float, float]:
    """Least-squares tilt across the media channel and peak ripple residual.

    Tilt is the fitted slope scaled to the full channel width (the quantity a
    service contract would quote); ripple is the largest absolute deviation
    from the fitted line.
    """
    points = _working_points(profile, config_id)
    if len(points) < 4:
        raise InsufficientDataError(
            f"{config_id}: {len(points)} working points, need at least 4")
    xs = np.array([(freq - profile.media_channel.center_thz) * 1000.0
                   for freq, _ in points])
    ys = np.array([v for _, v in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = ys - (slope * xs + intercept)
    tilt = abs(slope) * profile.media_channel.width_ghz
    return float(tilt), float(np.max(np.abs(residuals)))


def detect_operation_regime(line, catalog: tuple[PltConfig, ...],
                            curves: dict[str, CharacterizationCurve],
                            psd_ref_dbm_per_ghz: float,
                            rs_ref_gbd: float,
                            carrier_center_thz: float | None = None,
                            sim_time_h: float = 0.0,
                            deadband_db: float = REGIME_DEADBAND_DB) -> RegimeReport:
    """Compare constant-PSD and constant-total-power probing per configuration.

    The constant-power campaign launches the total power a reference-rate
    carrier would get under the reference PSD, so narrower configurations run
    at a higher PSD. A configuration that improves under the extra power is
    in the linear regime; one that degrades is past the optimum.
    """
    power_ref = psd_ref_dbm_per_ghz + 10.0 * math.log10(rs_ref_gbd)
    tested = tuple(cfg for cfg in catalog
                   if cfg.symbol_rate_gbd <= rs_ref_gbd + 1e-9)
    psd_policy = PowerPolicy(PolicyKind.CONSTANT_PSD, psd_ref_dbm_per_ghz)
    power_policy = PowerPolicy(PolicyKind.CONSTANT_TOTAL_POWER, power_ref)
    psd_campaign = run_extended_probe(line, tested, curves, psd_policy,
                                      carrier_center_thz, sim_time_h)
    power_campaign = run_extended_probe(line, tested, curves, power_policy,
                                        carrier_center_thz, sim_time_h)
    psd_by_id = {r.config_id: r for r in psd_campaign.results}
    power_by_id = {r.config_id: r for r in power_campaign.results}

    report = RegimeReport(psd_ref_dbm_per_ghz=psd_ref_dbm_per_ghz,
                          rs_ref_gbd=rs_ref_gbd, entries={})
    for config in tested:
        cid = config.config_id
        applied_delta = 10.0 * math.log10(rs_ref_gbd / config.symbol_rate_gbd)
        at_psd = psd_by_id[cid]
        at_power = power_by_id[cid]
        psd_ok = at_psd.status is ProbeStatus.WORKING
        power_ok = at_power.status is ProbeStatus.WORKING
        if not psd_ok and not power_ok:
            report.excluded[cid] = "outage under both power policies"
            continue
        if psd_ok and power_ok:
            delta = at_power.gsnr_est_db - at_psd.gsnr_est_db
            if delta > deadband_db:
                regime = Regime.LINEAR
            elif delta < -deadband_db:
                regime = Regime.NONLINEAR
            else:
                regime = Regime.NEAR_OPTIMUM
            note = ""
        elif psd_ok:
            delta, regime = None, Regime.NONLINEAR
            note = "outage under constant total power"
        else:
            delta, regime = None, Regime.LINEAR
            note = "outage under constant PSD"
        if regime is Regime.LINEAR:
            recommended = applied_delta
        elif regime is Regime.NONLINEAR:
            recommended = -applied_delta
        else:
            recommended = 0.0
        report.entries[cid] = RegimeEntry(regime, delta, recommended, note)
    return report
