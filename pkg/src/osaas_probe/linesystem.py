"""Deterministic open-line-system simulator with a black-box probe surface.

The simulated line is only meant to be driven through :meth:`LineSystem.probe`
(configure a carrier, read back a pre-FEC BER). Everything else on the class
is either configuration plumbing or a test-only oracle; the probing engine
must never depend on the oracles.

Physics is deliberately reduced to what a probing campaign can observe:

* ASE accumulates per amplified span from the launch power, span loss and
  noise figure, referenced to 0.1 nm and then to the signal bandwidth.
* Nonlinear interference is a parametric cubic per span (eta * P^3 in the
  signal band, incoherent accumulation); dispersion-compensated spans carry
  a coherence surcharge.
* Bandwidth narrowing is a cascade of super-Gaussian power transfers applied
  to the root-raised-cosine carrier spectrum; the resulting in-band loss is
  amplified by an ISI factor to account for shape distortion on top of pure
  power clipping.
* Tilt and ripple are injected frequency profiles; equalizer nodes re-level
  them per media channel or per network media channel. Diurnal drift is a
  sinusoid on the link GSNR in dB.

Measurement noise perturbs the Q readout. Each probe draws from an RNG
seeded by (link seed, carrier, realized power, time), so identical probe
settings always read identically and probe order never matters.
"""

from __future__ import annotations

import math
import threading
import zlib
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ScenarioError
from .modem import ModemModel, ber_from_snr
from .spectrum import (
    MediaChannel,
    PltConfig,
    PowerPolicy,
    carrier_power_dbm,
    check_carrier_fits,
    to_grid_units,
)
from .units import (
    ASE_BUDGET_CONSTANT_DB,
    ber_from_q_db,
    dbm_to_mw,
    harmonic_db_sum,
    osnr_to_snr_db,
    q_db_from_ber,
)

# Filter contributed automatically by every grating-based dispersion
# compensation span.
DCG_FILTER_BANDWIDTH_GHZ = 60.0
DCG_FILTER_ORDER = 5

# Extra nonlinear accumulation on dispersion-compensated spans.
DISPERSION_COMP_NLI_FACTOR = 1.5

# ISI amplification of the in-band clipping loss, calibrated once against the
# back-to-back filtering envelope; pure power clipping underestimates the
# penalty of wide carriers in tight cascades.
DEFAULT_ISI_FACTOR = 7.0

_PENALTY_GRID_POINTS = 1601


class DispersionComp(Enum):
    NONE = "none"
    DCF = "dcf"
    DCG = "dcg"


class EqualizerGranularity(Enum):
    PER_MEDIA_CHANNEL = "per_media_channel"
    PER_NMC = "per_nmc"


@dataclass(frozen=True)
class SpanSpec:
    """One amplified fiber span; the amplifier exactly recovers the loss."""

    length_km: float
    loss_db: float
    amp_gain_db: float
    amp_noise_figure_db: float
    nli_coeff_per_mw2: float
    dispersion_comp: DispersionComp = DispersionComp.NONE

    def __post_init__(self):
        if self.loss_db < 0:
            raise ScenarioError("span loss must be non-negative")
        if abs(self.amp_gain_db - self.loss_db) > 1e-9:
            raise ScenarioError("transparent span convention requires gain == loss")
        if self.nli_coeff_per_mw2 < 0:
            raise ScenarioError("nonlinear coefficient must be non-negative")


@dataclass(frozen=True)
class FilterElement:
    """Super-Gaussian power transfer element in the cascade."""

    center_offset_ghz: float
    bandwidth_3db_ghz: float
    order: int

    def __post_init__(self):
        if self.bandwidth_3db_ghz <= 0:
            raise ScenarioError("filter 3-dB bandwidth must be positive")
        if self.order < 1:
            raise ScenarioError("filter order must be >= 1")


@dataclass(frozen=True)
class EqualizerNode:
    """Power re-leveling node somewhere along the span chain.

    Per-media-channel equalization can only re-center the average level, so
    intra-channel tilt survives it. Per-NMC equalization re-levels every
    network media channel window separately.
    """

    position: int
    granularity: EqualizerGranularity
    target_psd_dbm_per_ghz: float
    nmc_width_ghz: float | None = None

    def __post_init__(self):
        if self.granularity is EqualizerGranularity.PER_NMC:
            if not self.nmc_width_ghz or self.nmc_width_ghz <= 0:
                raise ScenarioError("per-NMC equalizer needs a positive nmc_width_ghz")


@dataclass(frozen=True)
class LinkSpec:
    """Full description of one simulated open line system."""

    name: str
    media_channel: MediaChannel
    spans: tuple[SpanSpec, ...]
    filters: tuple[FilterElement, ...] = ()
    equalizers: tuple[EqualizerNode, ...] = ()
    tilt_db_per_mc: float = 0.0
    ripple: tuple[tuple[float, float], ...] = ()
    filter_misalignment_ghz: float = 0.0
    diurnal_amplitude_db: float = 0.0
    diurnal_period_h: float = 24.0
    isi_factor: float = DEFAULT_ISI_FACTOR
    seed: int = 1
    noise_sigma_q_db: float = 0.0

    def __post_init__(self):
        if self.diurnal_amplitude_db < 0:
            raise ScenarioError("diurnal amplitude must be non-negative")
        if self.diurnal_period_h <= 0:
            raise ScenarioError("diurnal period must be positive")
        if self.seed < 0:
            raise ScenarioError("seed must be non-negative")
        if self.noise_sigma_q_db < 0:
            raise ScenarioError("noise sigma must be non-negative")
        for eq in self.equalizers:
            if not 0 <= eq.position <= len(self.spans):
                raise ScenarioError(
                    f"equalizer position {eq.position} outside span chain")


@dataclass(frozen=True)
class BerReading:
    """What the black-box probe hands back for one carrier configuration."""

    pre_fec_ber: float
    post_fec_ok: bool
    rx_power_dbm: float


def span_osnr_db(span: SpanSpec, launch_dbm: float) -> float:
    """OSNR (0.1 nm) contributed by a single transparent span."""
    return (launch_dbm + ASE_BUDGET_CONSTANT_DB
            - span.loss_db - span.amp_noise_figure_db)


def cascade_osnr_db(spans: tuple[SpanSpec, ...], launch_dbm: float) -> float:
    """OSNR (0.1 nm) after a chain of transparent spans; ASE adds linearly."""
    if not spans:
        return math.inf
    acc = sum(10.0 ** (-span_osnr_db(s, launch_dbm) / 10.0) for s in spans)
    return -10.0 * math.log10(acc)


def ase_power_mw(spans: tuple[SpanSpec, ...], launch_dbm: float,
                 symbol_rate_gbd: float) -> float:
    """Accumulated ASE power in the signal bandwidth, linear mW."""
    osnr = cascade_osnr_db(spans, launch_dbm)
    if math.isinf(osnr):
        return 0.0
    snr_ase = osnr_to_snr_db(osnr, symbol_rate_gbd)
    return dbm_to_mw(launch_dbm) / (10.0 ** (snr_ase / 10.0))


def nli_power_mw(spans: tuple[SpanSpec, ...], launch_mw: float) -> float:
    """Nonlinear interference power in the signal band, incoherent sum."""
    if launch_mw < 0:
        raise ValueError("launch power must be non-negative")
    total = 0.0
    for span in spans:
        eta = span.nli_coeff_per_mw2
        if span.dispersion_comp is not DispersionComp.NONE:
            eta *= DISPERSION_COMP_NLI_FACTOR
        total += eta * launch_mw ** 3
    return total


def filter_transfer(filters: tuple[FilterElement, ...], f_offset_ghz: float) -> float:
    """Cascade power transfer at a frequency offset from the channel center."""
    value = 1.0
    for filt in filters:
        x = 2.0 * (f_offset_ghz - filt.center_offset_ghz) / filt.bandwidth_3db_ghz
        value *= math.exp(-math.log(2.0) * x ** (2 * filt.order))
    return value


def _rrc_shape(rs: float, roll_off: float, f: np.ndarray) -> np.ndarray:
    flat = (1.0 - roll_off) * rs / 2.0
    edge = (1.0 + roll_off) * rs / 2.0
    af = np.abs(f)
    shape = np.zeros_like(af)
    shape[af <= flat] = 1.0 / rs
    transition = (af > flat) & (af < edge)
    shape[transition] = 0.5 / rs * (
        1.0 + np.cos(np.pi / (roll_off * rs) * (af[transition] - flat)))
    return shape


def _transfer_array(filters: tuple[FilterElement, ...], f: np.ndarray) -> np.ndarray:
    value = np.ones_like(f)
    for filt in filters:
        x = 2.0 * (f - filt.center_offset_ghz) / filt.bandwidth_3db_ghz
        value *= np.exp(-math.log(2.0) * x ** (2 * filt.order))
    return value


@lru_cache(maxsize=4096)
def _penalty_cached(filters: tuple[FilterElement, ...], rs: float,
                    roll_off: float, offset_units: int, kappa: float) -> float:
    if not filters or kappa == 0.0:
        return 0.0
    offset = offset_units * 0.25
    edge = (1.0 + roll_off) * rs / 2.0
    f = np.linspace(-edge, edge, _PENALTY_GRID_POINTS)
    shape = _rrc_shape(rs, roll_off, f)
    transfer = _transfer_array(filters, f + offset)
    passed = np.trapezoid(shape * transfer, f)
    reference = np.trapezoid(shape, f)
    return -kappa * 10.0 * math.log10(passed / reference)


def filtering_penalty_db(filters: tuple[FilterElement, ...], config: PltConfig,
                         carrier_center_offset_ghz: float = 0.0,
                         kappa: float = DEFAULT_ISI_FACTOR) -> float:
    """GSNR penalty of the filter cascade on one carrier placement.

    The in-band power fraction surviving the cascade is amplified by the ISI
    factor kappa, covering both the clipped power and the residual symbol
    distortion the receiver cannot equalize away.
    """
    offset_units = to_grid_units(carrier_center_offset_ghz)
    return _penalty_cached(filters, config.symbol_rate_gbd, config.roll_off,
                           offset_units, kappa)


class LineSystem:
    """A line under test, combined with the attached virtual transceiver unit.

    The same :class:`ModemModel` must be used to characterize configurations
    and to probe through this instance; constructing both from one model
    object keeps that honest. Probes are serialized: a real line carries one
    probe carrier at a time.
    """

    def __init__(self, link: LinkSpec, modem: ModemModel | None = None):
        self.link = link
        self.modem = modem if modem is not None else ModemModel()
        self._lock = threading.Lock()
        self._profile_means: dict = {}

    @property
    def name(self) -> str:
        return self.link.name

    @property
    def media_channel(self) -> MediaChannel:
        return self.link.media_channel

    @property
    def effective_filters(self) -> tuple[FilterElement, ...]:
        """Explicit cascade plus one auto filter per DCG span, common offset."""
        filters = list(self.link.filters)
        for span in self.link.spans:
            if span.dispersion_comp is DispersionComp.DCG:
                filters.append(FilterElement(0.0, DCG_FILTER_BANDWIDTH_GHZ,
                                             DCG_FILTER_ORDER))
        if self.link.filter_misalignment_ghz:
            shift = self.link.filter_misalignment_ghz
            filters = [replace(f, center_offset_ghz=f.center_offset_ghz + shift)
                       for f in filters]
        return tuple(filters)

    # -- frequency profile -------------------------------------------------

    def _raw_profile_db(self, f_offset_ghz: np.ndarray | float):
        mc = self.link.media_channel
        tilt = self.link.tilt_db_per_mc * np.asarray(f_offset_ghz) / mc.width_ghz
        if self.link.ripple:
            pts = sorted(self.link.ripple)
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            tilt = tilt + np.interp(f_offset_ghz, xs, ys)
        return tilt

    def _profile_mean(self, lo: float, hi: float) -> float:
        key = (round(lo, 6), round(hi, 6))
        if key not in self._profile_means:
            grid = np.arange(lo, hi + 0.125, 0.25)
            self._profile_means[key] = float(np.mean(self._raw_profile_db(grid)))
        return self._profile_means[key]

    def gsnr_offset_db(self, f_offset_ghz: float) -> float:
        """Tilt/ripple GSNR offset at a carrier position, after equalization."""
        mc = self.link.media_channel
        raw = float(self._raw_profile_db(f_offset_ghz))
        per_nmc = [eq for eq in self.link.equalizers
                   if eq.granularity is EqualizerGranularity.PER_NMC]
        if per_nmc:
            width = per_nmc[-1].nmc_width_ghz
            index = math.floor((f_offset_ghz - mc.lower_edge_ghz) / width)
            index = min(max(index, 0), int(round(mc.width_ghz / width)) - 1)
            lo = mc.lower_edge_ghz + index * width
            return raw - self._profile_mean(lo, lo + width)
        if self.link.equalizers:
            return raw - self._profile_mean(mc.lower_edge_ghz, mc.upper_edge_ghz)
        return raw

    def _diurnal_db(self, sim_time_h: float) -> float:
        if self.link.diurnal_amplitude_db == 0.0:
            return 0.0
        return (self.link.diurnal_amplitude_db / 2.0
                * math.sin(2.0 * math.pi * sim_time_h / self.link.diurnal_period_h))

    # -- probe surface -----------------------------------------------------

    def _carrier_offset_ghz(self, config: PltConfig,
                            carrier_center_thz: float | None) -> float:
        mc = self.link.media_channel
        if carrier_center_thz is None:
            offset = 0.0
        else:
            offset = (carrier_center_thz - mc.center_thz) * 1000.0
            offset = to_grid_units(offset) * 0.25
        check_carrier_fits(mc, config, offset)
        return offset

    def _total_snr_db(self, config: PltConfig, policy: PowerPolicy,
                      offset_ghz: float, sim_time_h: float) -> tuple[float, float]:
        link = self.link
        power_dbm = carrier_power_dbm(policy, config, link.media_channel)
        power_mw = dbm_to_mw(power_dbm)
        osnr = cascade_osnr_db(link.spans, power_dbm)
        snr_ase = (osnr_to_snr_db(osnr, config.symbol_rate_gbd)
                   if math.isfinite(osnr) else math.inf)
        nli_mw = nli_power_mw(link.spans, power_mw)
        snr_nli = (10.0 * math.log10(power_mw / nli_mw)
                   if nli_mw > 0 else math.inf)
        optical = harmonic_db_sum(snr_ase, snr_nli)
        optical -= filtering_penalty_db(self.effective_filters, config,
                                        offset_ghz, link.isi_factor)
        optical += self.gsnr_offset_db(offset_ghz)
        optical += self._diurnal_db(sim_time_h)
        total = harmonic_db_sum(optical, self.modem.snr_modem_db)
        return total, power_dbm

    def _noise_db(self, config: PltConfig, offset_ghz: float,
                  power_dbm: float, sim_time_h: float) -> float:
        sigma = self.link.noise_sigma_q_db
        if sigma == 0.0:
            return 0.0
        entropy = (
            self.link.seed,
            zlib.crc32(config.config_id.encode()),
            to_grid_units(offset_ghz) + 2 ** 20,
            int(round((power_dbm + 200.0) * 100.0)),
            int(round(sim_time_h * 3600.0)),
        )
        rng = np.random.default_rng(np.random.SeedSequence(entropy))
        return sigma * float(rng.standard_normal())

    def probe(self, config: PltConfig, policy: PowerPolicy,
              carrier_center_thz: float | None = None,
              sim_time_h: float = 0.0) -> BerReading:
        """Configure one probe carrier and read back its pre-FEC BER.

        Deterministic for fixed link seed and probe settings; the noise draw
        is keyed on the realized carrier, not on the policy that produced it.
        """
        with self._lock:
            offset = self._carrier_offset_ghz(config, carrier_center_thz)
            total, power_dbm = self._total_snr_db(config, policy, offset,
                                                  sim_time_h)
            ber_true = ber_from_snr(config.format, total)
            if ber_true > 0.0:
                q_read = (q_db_from_ber(ber_true)
                          + self._noise_db(config, offset, power_dbm,
                                           sim_time_h))
                ber = ber_from_q_db(q_read)
            else:
                # noiseless line: the counter reads error-free
                ber = 0.0
            in_band = filtering_penalty_db(self.effective_filters, config,
                                           offset, 1.0)
            return BerReading(
                pre_fec_ber=ber,
                post_fec_ok=ber <= config.fec_threshold_ber,
                rx_power_dbm=power_dbm - in_band,
            )

    # -- test-only oracles ---------------------------------------------------

    def ground_truth_gsnr(self, config: PltConfig, policy: PowerPolicy,
                          carrier_center_thz: float | None = None,
                          sim_time_h: float = 0.0) -> float:
        """Oracle: the exact SNR behind a probe, before the BER mapping.

        Includes the modem term, i.e. it is the quantity probing estimates.
        Reserved for tests and simulator-assisted what-if analyses; probing
        algorithms must not call it.
        """
        offset = self._carrier_offset_ghz(config, carrier_center_thz)
        total, _ = self._total_snr_db(config, policy, offset, sim_time_h)
        return total

    def without_filters(self) -> "LineSystem":
        """What-if copy of the line with every filtering element removed."""
        clean_spans = tuple(
            replace(s, dispersion_comp=DispersionComp.DCF)
            if s.dispersion_comp is DispersionComp.DCG else s
            for s in self.link.spans
        )
        return LineSystem(replace(self.link, filters=(), spans=clean_spans),
                          self.modem)
