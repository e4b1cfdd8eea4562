"""
3D antenna gain patterns, all in dBi and all parabolic-in-dB with floors.

Three families: the sectored array carried by tri-sector sensing sites, the
omnidirectional dipole of stand-alone sensors, and the incumbent's parabolic
dish. Gain evaluation accepts scalars or arrays and is pure.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SectorPattern:
    """Sectored-array pattern: separable azimuth/elevation parabolas in dB.

    ``front_to_back_db`` caps both the azimuth cut and the combined
    attenuation; ``sidelobe_floor_db`` caps the elevation cut.
    """

    max_gain_dbi: float = 15.4
    h_hpbw_deg: float = 90.0
    v_hpbw_deg: float = 9.0
    front_to_back_db: float = 30.0
    sidelobe_floor_db: float = 30.0
    electrical_downtilt_deg: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.h_hpbw_deg <= 180.0 and 0.0 < self.v_hpbw_deg <= 180.0):
            raise ValueError("HPBWs must lie in (0, 180] degrees")
        if not np.isfinite(self.max_gain_dbi):
            raise ValueError("max_gain_dbi must be finite")
        if self.front_to_back_db <= 0:
            raise ValueError("front_to_back_db must be positive")


@dataclass(frozen=True)
class OmniPattern:
    """Omnidirectional dipole: azimuth-independent, elevation parabola with floor."""

    max_gain_dbi: float = 7.0
    v_hpbw_deg: float = 18.0
    sidelobe_floor_db: float = 15.0

    def __post_init__(self):
        if not (0.0 < self.v_hpbw_deg <= 180.0):
            raise ValueError("v_hpbw_deg must lie in (0, 180] degrees")
        if self.sidelobe_floor_db <= 0:
            raise ValueError("sidelobe_floor_db must be positive")


@dataclass(frozen=True)
class DishPattern:
    """Parabolic dish: circularly symmetric mainlobe over total offset angle."""

    max_gain_dbi: float = 33.1
    hpbw_deg: float = 3.7
    front_to_back_db: float = 40.0

    def __post_init__(self):
        if not (0.0 < self.hpbw_deg <= 180.0):
            raise ValueError("hpbw_deg must lie in (0, 180] degrees")
        if self.front_to_back_db <= 0:
            raise ValueError("front_to_back_db must be positive")


def sector_gain(pattern, az_offset_deg, el_offset_deg):
    """Sector gain (dBi) at offsets from boresight.

    A_H = -min(12*(az/hpbw_h)^2, A_m), A_V = -min(12*((el - tilt)/hpbw_v)^2, SLA),
    combined A = -min(-(A_H + A_V), A_m); result = max gain + A.
    """
    az = np.asarray(az_offset_deg, dtype=float)
    el = np.asarray(el_offset_deg, dtype=float)
    a_h = np.minimum(12.0 * (az / pattern.h_hpbw_deg) ** 2, pattern.front_to_back_db)
    a_v = np.minimum(
        12.0 * ((el - pattern.electrical_downtilt_deg) / pattern.v_hpbw_deg) ** 2,
        pattern.sidelobe_floor_db,
    )
    attenuation = np.minimum(a_h + a_v, pattern.front_to_back_db)
    gain = pattern.max_gain_dbi - attenuation
    if np.ndim(az_offset_deg) == 0 and np.ndim(el_offset_deg) == 0:
        return float(gain)
    return gain


def omni_gain(pattern, el_offset_deg):
    """Omni gain (dBi) at an elevation offset from the horizontal boresight."""
    el = np.asarray(el_offset_deg, dtype=float)
    gain = np.maximum(
        pattern.max_gain_dbi - 12.0 * (el / pattern.v_hpbw_deg) ** 2,
        pattern.max_gain_dbi - pattern.sidelobe_floor_db,
    )
    if np.ndim(el_offset_deg) == 0:
        return float(gain)
    return gain


def boresight_offset_angle(az_offset_deg, el_offset_deg):
    """Total angular offset psi from boresight, via the spherical law of cosines."""
    az = np.radians(np.asarray(az_offset_deg, dtype=float))
    el = np.radians(np.asarray(el_offset_deg, dtype=float))
    cos_psi = np.clip(np.cos(az) * np.cos(el), -1.0, 1.0)
    return np.degrees(np.arccos(cos_psi))


def dish_gain(pattern, az_offset_deg, el_offset_deg):
    """Dish gain (dBi) at offsets from boresight; floor at max - front_to_back."""
    psi = boresight_offset_angle(az_offset_deg, el_offset_deg)
    gain = np.maximum(
        pattern.max_gain_dbi - 12.0 * (psi / pattern.hpbw_deg) ** 2,
        pattern.max_gain_dbi - pattern.front_to_back_db,
    )
    if np.ndim(az_offset_deg) == 0 and np.ndim(el_offset_deg) == 0:
        return float(gain)
    return gain
