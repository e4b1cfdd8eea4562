"""
Per-pair link budget, per-MHz power density, measurement noise, and the
energy-detection threshold rule. All arithmetic is in the dB domain and all
functions accept scalars or arrays.
"""

from dataclasses import dataclass

import numpy as np


class LinkError(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudgetParams:
    """Emitter and receiver-side constants of the link budget."""

    eirp_max_dbm: float = 63.0
    incumbent_max_gain_dbi: float = 33.1
    bandwidth_hz: float = 30e6
    frequency_hz: float = 7.25e9
    noise_sigma_db: float = 3.0
    threshold_dbm_per_mhz: float = -89.0
    min_bandwidth_hz: float = 1e6
    psd_sign_paper_literal: bool = False

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise LinkError("bandwidth_hz must be positive")
        if self.bandwidth_hz < self.min_bandwidth_hz:
            raise LinkError("bandwidth_hz below the configured minimum")
        if self.noise_sigma_db < 0:
            raise LinkError("noise_sigma_db must be >= 0")
        if self.frequency_hz <= 0:
            raise LinkError("frequency_hz must be positive")


@dataclass(frozen=True)
class LinkResult:
    rx_power_dbm: float
    psd_dbm_per_mhz: float
    above_threshold: bool


def received_power(params, incumbent_gain_dbi, path_loss_db, sensor_gain_dbi):
    """Received power in dBm: EIRP - max emitter gain + emitter gain - loss + sensor gain."""
    return (
        params.eirp_max_dbm
        - params.incumbent_max_gain_dbi
        + incumbent_gain_dbi
        - path_loss_db
        + sensor_gain_dbi
    )


def to_psd(rx_power_dbm, bandwidth_hz, paper_literal_sign=False):
    """Convert total received power to a per-MHz density.

    The density of a signal of bandwidth B is the total power minus
    10*log10(B / 1 MHz); ``paper_literal_sign`` flips the sign of that term
    for sensitivity studies and is recorded in output provenance.
    """
    if np.any(np.asarray(bandwidth_hz) <= 0):
        raise LinkError("bandwidth_hz must be positive")
    offset = 10.0 * np.log10(np.asarray(bandwidth_hz, dtype=float) / 1e6)
    if paper_literal_sign:
        return rx_power_dbm + offset
    return rx_power_dbm - offset


def apply_noise(psd_dbm_per_mhz, sigma_db, rng):
    """Add dB-domain Gaussian measurement noise; sigma 0 is the identity."""
    if sigma_db < 0:
        raise LinkError("sigma_db must be >= 0")
    if sigma_db == 0:
        return psd_dbm_per_mhz
    return psd_dbm_per_mhz + rng.normal(0.0, sigma_db, size=np.shape(psd_dbm_per_mhz))


def threshold_test(noisy_psd_dbm_per_mhz, gamma_dbm_per_mhz):
    """Detection indicator: density at or above the threshold (inclusive)."""
    result = np.asarray(noisy_psd_dbm_per_mhz) >= gamma_dbm_per_mhz
    if np.ndim(noisy_psd_dbm_per_mhz) == 0:
        return bool(result)
    return result


def evaluate_link(params, incumbent_gain_dbi, path_loss_db, sensor_gain_dbi):
    """Full noise-free link evaluation for one pair."""
    p_rx = received_power(params, incumbent_gain_dbi, path_loss_db, sensor_gain_dbi)
    psd = to_psd(p_rx, params.bandwidth_hz, params.psd_sign_paper_literal)
    return LinkResult(
        rx_power_dbm=float(p_rx),
        psd_dbm_per_mhz=float(psd),
        above_threshold=bool(psd >= params.threshold_dbm_per_mhz),
    )
