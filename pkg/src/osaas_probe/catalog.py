"""Transceiver catalog: the pre-characterized probing configurations.

The default catalog carries eleven configurations over the symbol rates
31.5, 34.5, 46.3, 52.0, 55.5, 58.0 and 69.4 GBd. Required GSNR per
configuration is derived by inverting the analytic BER law of its format at
the FEC threshold, so that a margin of exactly zero coincides with the FEC
limit of the simulated transceiver.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from scipy.special import erfcinv

from .errors import ScenarioError
from .spectrum import DEFAULT_ROLL_OFF, ModulationFormat, PltConfig

DEFAULT_FEC_THRESHOLD_BER = 2.0e-2

# (format, symbol rate GBd, line rate Gbit/s)
_DEFAULT_CONFIGS = (
    (ModulationFormat.DP_QPSK, 31.5, 100.0),
    (ModulationFormat.DP_QPSK, 52.0, 200.0),
    (ModulationFormat.DP_QPSK, 69.4, 200.0),
    (ModulationFormat.DP_P16QAM, 34.5, 150.0),
    (ModulationFormat.DP_P16QAM, 46.3, 200.0),
    (ModulationFormat.DP_P16QAM, 58.0, 200.0),
    (ModulationFormat.DP_P16QAM, 69.4, 300.0),
    (ModulationFormat.DP_16QAM, 34.5, 200.0),
    (ModulationFormat.DP_16QAM, 52.0, 300.0),
    (ModulationFormat.DP_16QAM, 55.5, 300.0),
    (ModulationFormat.DP_16QAM, 58.0, 400.0),
)

# 58 GBd units are deployed on the flex-grid network only; the probing pool
# for fixed-grid regional links is customized accordingly.
_REGIONAL_EXCLUDED_RATES = (58.0,)


def _rect_qam_params(fmt: ModulationFormat) -> tuple[float, float]:
    """Prefactor and distance coefficient of the rectangular-QAM BER law."""
    li, lj = fmt.constellation_grid
    prefactor = ((li - 1) / li + (lj - 1) / lj) / math.log2(li * lj)
    distance = math.sqrt(3.0 / (li * li + lj * lj - 2.0))
    return prefactor, distance


def required_snr_db(fmt: ModulationFormat, ber: float) -> float:
    """SNR in dB at which the analytic BER of the format equals ``ber``."""
    if not 0.0 < ber < 0.5:
        raise ValueError("target BER must be in (0, 0.5)")
    prefactor, distance = _rect_qam_params(fmt)
    snr_lin = (float(erfcinv(ber / prefactor)) / distance) ** 2
    return 10.0 * math.log10(snr_lin)


def default_catalog(fec_threshold_ber: float = DEFAULT_FEC_THRESHOLD_BER,
                    roll_off: float = DEFAULT_ROLL_OFF) -> tuple[PltConfig, ...]:
    return tuple(
        PltConfig(
            format=fmt,
            symbol_rate_gbd=rate,
            line_rate_gbps=line_rate,
            required_gsnr_db=required_snr_db(fmt, fec_threshold_ber),
            roll_off=roll_off,
            fec_threshold_ber=fec_threshold_ber,
        )
        for fmt, rate, line_rate in _DEFAULT_CONFIGS
    )


def regional_catalog(fec_threshold_ber: float = DEFAULT_FEC_THRESHOLD_BER,
                     roll_off: float = DEFAULT_ROLL_OFF) -> tuple[PltConfig, ...]:
    """Probing pool customized for fixed-grid regional links."""
    return tuple(cfg for cfg in default_catalog(fec_threshold_ber, roll_off)
                 if cfg.symbol_rate_gbd not in _REGIONAL_EXCLUDED_RATES)


NAMED_CATALOGS = {
    "default": default_catalog,
    "regional": regional_catalog,
}


def resolve_catalog(name_or_path: str) -> tuple[PltConfig, ...]:
    """Named catalog ('default', 'regional') or a JSON catalog file path."""
    if name_or_path in NAMED_CATALOGS:
        return NAMED_CATALOGS[name_or_path]()
    return load_catalog(name_or_path)


def catalog_to_records(catalog: tuple[PltConfig, ...]) -> list[dict]:
    return [
        {
            "format": cfg.format.label,
            "symbol_rate_gbd": cfg.symbol_rate_gbd,
            "roll_off": cfg.roll_off,
            "line_rate_gbps": cfg.line_rate_gbps,
            "required_gsnr_db": round(cfg.required_gsnr_db, 4),
            "fec_threshold_ber": cfg.fec_threshold_ber,
        }
        for cfg in catalog
    ]


def save_catalog(catalog: tuple[PltConfig, ...], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(catalog_to_records(catalog), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_catalog(path: str | Path) -> tuple[PltConfig, ...]:
    try:
        records = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read catalog {path}: {exc}") from exc
    if not isinstance(records, list):
        raise ScenarioError(f"catalog {path} must be a JSON array")
    configs = []
    for rec in records:
        try:
            configs.append(
                PltConfig(
                    format=ModulationFormat.from_label(rec["format"]),
                    symbol_rate_gbd=float(rec["symbol_rate_gbd"]),
                    roll_off=float(rec["roll_off"]),
                    line_rate_gbps=float(rec["line_rate_gbps"]),
                    required_gsnr_db=float(rec["required_gsnr_db"]),
                    fec_threshold_ber=float(rec["fec_threshold_ber"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad catalog record {rec!r}: {exc}") from exc
    return tuple(configs)
