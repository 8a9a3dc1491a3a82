"""Serialization of probing outputs.

Reports are JSON with sorted keys and rounded floats so identical runs
produce identical bytes; profiles and time series are CSV for plotting.
Margin reports embed the full probe evidence chain for auditability.
"""

from __future__ import annotations

import csv
import io
import math

from .probing import (
    GsnrProfile,
    MarginReport,
    ProbeCampaign,
    ProbeResult,
    RegimeReport,
)

REPORT_SCHEMA_VERSION = 1


def _num(value, digits=6):
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return round(float(value), digits)


def probe_result_to_dict(result: ProbeResult) -> dict:
    return {
        "config_id": result.config_id,
        "carrier_center_thz": _num(result.carrier_center_thz),
        "policy": {"kind": result.policy.kind.value,
                   "value": _num(result.policy.value, 2)},
        "status": result.status.value,
        "sim_time_h": _num(result.sim_time_h, 3),
        "q_db": _num(result.q_db),
        "gsnr_est_db": _num(result.gsnr_est_db),
        "note": result.note,
    }


def campaign_to_dict(campaign: ProbeCampaign) -> dict:
    return {
        "link_name": campaign.link_name,
        "media_channel": {
            "center_thz": _num(campaign.media_channel.center_thz),
            "width_ghz": _num(campaign.media_channel.width_ghz),
        },
        "results": [probe_result_to_dict(r) for r in campaign.results],
    }


def margin_report_to_dict(report: MarginReport, seed: int) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "seed": seed,
        "gsnr_est_link_db": _num(report.gsnr_est_link_db),
        "symbol_rate_cap_gbd": _num(report.symbol_rate_cap_gbd, 2),
        "theta_db": _num(report.theta_db, 3),
        "margins_db": {cid: _num(m) for cid, m in sorted(report.margins_db.items())},
        "best_config": report.best_config,
        "accuracy_bound_db": _num(report.accuracy_bound_db),
        "accuracy_flag": report.accuracy_flag.value,
        "estimate_spread_db": _num(report.estimate_spread_db),
        "evidence": campaign_to_dict(report.campaign),
    }


def profile_to_csv(profile: GsnrProfile) -> str:
    """Plot-ready sweep profile: freq_thz, config_id, gsnr_db or OUTAGE."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["freq_thz", "config_id", "gsnr_db"])
    for cid in sorted(profile.points):
        for freq, value in profile.points[cid]:
            writer.writerow([f"{freq:.6f}", cid,
                             "OUTAGE" if value is None else f"{value:.3f}"])
    return buffer.getvalue()


def sweep_summary_to_dict(profile: GsnrProfile, seed: int,
                          misalignment: tuple[float, bool] | None,
                          tilt_ripple: dict[str, tuple[float, float]]) -> dict:
    summary: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "seed": seed,
        "step_ghz": _num(profile.step_ghz, 3),
        "configs": sorted(profile.points),
        "skipped": dict(sorted(profile.skipped.items())),
    }
    if misalignment is not None:
        offset, indeterminate = misalignment
        summary["misalignment_ghz"] = _num(offset, 1)
        summary["misalignment_indeterminate"] = indeterminate
    summary["tilt_ripple_db"] = {
        cid: {"tilt_db": _num(t), "ripple_db": _num(r)}
        for cid, (t, r) in sorted(tilt_ripple.items())
    }
    return summary


def regime_report_to_dict(report: RegimeReport, seed: int) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "seed": seed,
        "psd_ref_dbm_per_ghz": _num(report.psd_ref_dbm_per_ghz, 2),
        "rs_ref_gbd": _num(report.rs_ref_gbd, 2),
        "entries": {
            cid: {
                "classification": entry.classification.value,
                "delta_db": _num(entry.delta_db),
                "recommended_power_delta_db": _num(entry.recommended_power_delta_db),
                "note": entry.note,
            }
            for cid, entry in sorted(report.entries.items())
        },
        "excluded": dict(sorted(report.excluded.items())),
    }


def monitor_series_to_csv(series: list[tuple[float, float | None]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["sim_time_h", "gsnr_est_db"])
    for t, value in series:
        writer.writerow([f"{t:.3f}", "OUTAGE" if value is None else f"{value:.3f}"])
    return buffer.getvalue()
