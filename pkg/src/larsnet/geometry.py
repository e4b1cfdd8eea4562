"""
Deployment geometry: hexagonal site lattices, incumbent drops, and the
angular relations between emitter and sensor.

Azimuth convention used throughout the package: counter-clockwise,
0 deg = +x axis, 90 deg = +y axis. Elevations are signed, positive up.
"""

import math
from dataclasses import dataclass, field

import numpy as np

EARTH_RADIUS_M = 6371000.0

TRI_SECTOR_AZIMUTHS = (60.0, 180.0, 300.0)


class GeometryError(ValueError):
    pass


def wrap_360(angle_deg):
    """Normalize an angle (scalar or array) to [0, 360)."""
    return np.mod(angle_deg, 360.0)


def wrap_180(angle_deg):
    """Normalize an angle (scalar or array) to (-180, 180]."""
    wrapped = np.mod(-np.asarray(angle_deg, dtype=float) + 180.0, 360.0)
    result = -(wrapped - 180.0)
    if np.ndim(angle_deg) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class Area:
    """Square simulation area of side ``side_length_m`` centered at the origin."""

    side_length_m: float

    def __post_init__(self):
        if self.side_length_m <= 0:
            raise GeometryError("side_length_m must be positive")

    @property
    def half(self):
        return self.side_length_m / 2.0

    def contains(self, x_m, y_m):
        return (abs(x_m) <= self.half) and (abs(y_m) <= self.half)


@dataclass(frozen=True)
class DropRegion:
    """Region incumbents are drawn from: the full square or an origin-centered disk.

    ``kind`` is "square" (uses ``side_length_m``) or "disk" (uses ``radius_m``).
    """

    kind: str
    side_length_m: float = 0.0
    radius_m: float = 0.0

    @staticmethod
    def square(side_length_m):
        if side_length_m <= 0:
            raise GeometryError("square drop region needs a positive side length")
        return DropRegion("square", side_length_m=side_length_m)

    @staticmethod
    def disk(radius_m=None, area_km2=None):
        if radius_m is None:
            if area_km2 is None or area_km2 <= 0:
                raise GeometryError("disk drop region needs a positive area or radius")
            radius_m = math.sqrt(area_km2 * 1e6 / math.pi)
        if radius_m <= 0:
            raise GeometryError("disk drop region needs a positive radius")
        return DropRegion("disk", radius_m=radius_m)

    @property
    def area_m2(self):
        if self.kind == "square":
            return self.side_length_m ** 2
        return math.pi * self.radius_m ** 2

    def contains(self, x_m, y_m):
        if self.kind == "square":
            h = self.side_length_m / 2.0
            return (abs(x_m) <= h) and (abs(y_m) <= h)
        return math.hypot(x_m, y_m) <= self.radius_m


@dataclass(frozen=True)
class BsSite:
    """One lattice site with its sector boresights."""

    site_id: int
    x_m: float
    y_m: float
    height_m: float
    sector_azimuths_deg: tuple

    def __post_init__(self):
        n = len(self.sector_azimuths_deg)
        if n not in (1, 3):
            raise GeometryError("a site carries exactly 3 sectors (tri) or 1 (omni)")
        for az in self.sector_azimuths_deg:
            if not (0.0 <= az < 360.0):
                raise GeometryError("sector azimuths must lie in [0, 360)")


@dataclass(frozen=True)
class IncumbentDrop:
    """One incumbent realization: position, height, dish boresight azimuth."""

    x_m: float
    y_m: float
    height_m: float
    boresight_azimuth_deg: float

    def __post_init__(self):
        if not (0.0 <= self.boresight_azimuth_deg < 360.0):
            raise GeometryError("boresight azimuth must lie in [0, 360)")


@dataclass
class Deployment:
    """All sites of one hex layout plus the metadata downstream stages need.

    ``xy_m`` is an (n_sites, 2) array; ``center_index`` points at the site on
    (or nearest to) the origin, used as the single-sensor baseline.
    """

    area: Area
    isd_m: float
    bs_height_m: float
    antenna_mode: str
    xy_m: np.ndarray
    center_index: int
    sector_azimuths_deg: tuple = field(default=TRI_SECTOR_AZIMUTHS)

    @property
    def n_sites(self):
        return self.xy_m.shape[0]

    @property
    def n_sectors(self):
        return len(self.sector_azimuths_deg)

    def sites(self):
        """Materialize BsSite records (convenience view; arrays are the fast path)."""
        return [
            BsSite(i, float(x), float(y), self.bs_height_m, self.sector_azimuths_deg)
            for i, (x, y) in enumerate(self.xy_m)
        ]


@dataclass
class PairGeometry:
    """Angular/distance relation of one emitter-sensor pair.

    Fields accept scalars or aligned arrays; all downstream consumers are
    vectorized. ``elevation_deg`` is the sensor's elevation as seen from the
    emitter (positive when the sensor sits higher).
    """

    horizontal_distance_m: np.ndarray
    slant_distance_m: np.ndarray
    azimuth_at_incumbent_deg: np.ndarray
    azimuth_at_sensor_deg: np.ndarray
    elevation_deg: np.ndarray


def generate_hex_deployment(area, isd_m, bs_height_m, antenna_mode="tri_sector"):
    """Generate the hex lattice of sensing sites inside ``area``.

    Rows run parallel to the x axis at (sqrt(3)/2)*ISD spacing; odd rows are
    offset by ISD/2; one site is anchored at the origin. Sites are kept when
    their coordinate falls inside the area.

    Parameters
    ----------
    area : Area
    isd_m : float
        Inter-site distance, 0 < isd_m <= area side length.
    bs_height_m : float
    antenna_mode : str
        "tri_sector" (boresights 60/180/300) or "omni" (single sector).

    Returns
    -------
    Deployment
    """
    if isd_m <= 0:
        raise GeometryError("isd_m must be positive")
    if isd_m > area.side_length_m:
        raise GeometryError("isd_m exceeds the area side length")
    if antenna_mode not in ("tri_sector", "omni"):
        raise GeometryError(f"unknown antenna_mode {antenna_mode!r}")

    half = area.half
    row_spacing = math.sqrt(3.0) / 2.0 * isd_m
    r_max = int(math.floor(half / row_spacing))
    pts = []
    for r in range(-r_max, r_max + 1):
        y = r * row_spacing
        offset = isd_m / 2.0 if (r % 2) else 0.0
        j_min = int(math.ceil((-half - offset) / isd_m))
        j_max = int(math.floor((half - offset) / isd_m))
        for j in range(j_min, j_max + 1):
            pts.append((j * isd_m + offset, y))
    if not pts:
        raise GeometryError("area too small: deployment is empty")

    xy = np.asarray(pts, dtype=float)
    center = int(np.argmin(np.hypot(xy[:, 0], xy[:, 1])))
    azimuths = TRI_SECTOR_AZIMUTHS if antenna_mode == "tri_sector" else (0.0,)
    return Deployment(
        area=area,
        isd_m=isd_m,
        bs_height_m=bs_height_m,
        antenna_mode=antenna_mode,
        xy_m=xy,
        center_index=center,
        sector_azimuths_deg=azimuths,
    )


def clip_deployment_to_disk(deployment, radius_m):
    """Keep only the sites within ``radius_m`` of the origin (city footprints)."""
    keep = np.hypot(deployment.xy_m[:, 0], deployment.xy_m[:, 1]) <= radius_m
    if not keep.any():
        raise GeometryError("disk footprint contains no sites")
    xy = deployment.xy_m[keep]
    center = int(np.argmin(np.hypot(xy[:, 0], xy[:, 1])))
    return Deployment(
        area=deployment.area,
        isd_m=deployment.isd_m,
        bs_height_m=deployment.bs_height_m,
        antenna_mode=deployment.antenna_mode,
        xy_m=xy,
        center_index=center,
        sector_azimuths_deg=deployment.sector_azimuths_deg,
    )


def drop_incumbent(region, height_m, rng):
    """Draw one incumbent uniformly over ``region`` with uniform boresight azimuth.

    Stream order is fixed: position first (two uniforms for a square,
    radius/angle pair for a disk), then the azimuth.
    """
    if region.area_m2 <= 0:
        raise GeometryError("drop region has non-positive area")
    if region.kind == "square":
        h = region.side_length_m / 2.0
        x = rng.uniform(-h, h)
        y = rng.uniform(-h, h)
    elif region.kind == "disk":
        radius = region.radius_m * math.sqrt(rng.uniform(0.0, 1.0))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        x = radius * math.cos(theta)
        y = radius * math.sin(theta)
    else:
        raise GeometryError(f"unknown drop region kind {region.kind!r}")
    azimuth = rng.uniform(0.0, 360.0) % 360.0
    return IncumbentDrop(x_m=x, y_m=y, height_m=height_m, boresight_azimuth_deg=azimuth)


def pair_geometry(incumbent, site):
    """Geometry of one incumbent-site pair (scalar convenience wrapper)."""
    pg = pair_geometry_to_points(
        incumbent,
        np.asarray([site.x_m], dtype=float),
        np.asarray([site.y_m], dtype=float),
        site.height_m,
    )
    return PairGeometry(
        horizontal_distance_m=float(pg.horizontal_distance_m[0]),
        slant_distance_m=float(pg.slant_distance_m[0]),
        azimuth_at_incumbent_deg=float(pg.azimuth_at_incumbent_deg[0]),
        azimuth_at_sensor_deg=float(pg.azimuth_at_sensor_deg[0]),
        elevation_deg=float(pg.elevation_deg[0]),
    )


def pair_geometry_to_points(incumbent, x_m, y_m, height_m):
    """Vectorized pair geometry from one incumbent to many sensor points.

    ``x_m``/``y_m`` are arrays of sensor coordinates at common height
    ``height_m``. Raises on exact 3D co-location (zero slant distance).
    """
    dx = np.asarray(x_m, dtype=float) - incumbent.x_m
    dy = np.asarray(y_m, dtype=float) - incumbent.y_m
    horizontal = np.hypot(dx, dy)
    dh = height_m - incumbent.height_m
    slant = np.hypot(horizontal, dh)
    if np.any(slant == 0.0):
        raise GeometryError("emitter and sensor are co-located in 3D")
    az_at_incumbent = wrap_360(np.degrees(np.arctan2(dy, dx)))
    az_at_sensor = wrap_360(az_at_incumbent + 180.0)
    elevation = np.degrees(np.arctan2(dh, horizontal))
    return PairGeometry(
        horizontal_distance_m=horizontal,
        slant_distance_m=slant,
        azimuth_at_incumbent_deg=az_at_incumbent,
        azimuth_at_sensor_deg=az_at_sensor,
        elevation_deg=elevation,
    )


def local_to_geodetic(x_m, y_m, anchor_lat_deg, anchor_lon_deg):
    """Small-offset ENU -> geodetic conversion on a sphere.

    The anchor is the southwest corner of the area. Latitude offset is
    north/R, longitude offset east/(R*cos(anchor latitude)); valid for
    offsets far smaller than the Earth radius.
    """
    if abs(anchor_lat_deg) >= 90.0:
        raise GeometryError("anchor latitude must lie strictly between -90 and 90")
    lat = anchor_lat_deg + math.degrees(y_m / EARTH_RADIUS_M)
    lon = anchor_lon_deg + math.degrees(
        x_m / (EARTH_RADIUS_M * math.cos(math.radians(anchor_lat_deg)))
    )
    return lat, lon


def geodetic_to_local(lat_deg, lon_deg, anchor_lat_deg, anchor_lon_deg):
    """Inverse of :func:`local_to_geodetic` under the same spherical model."""
    if abs(anchor_lat_deg) >= 90.0:
        raise GeometryError("anchor latitude must lie strictly between -90 and 90")
    y = math.radians(lat_deg - anchor_lat_deg) * EARTH_RADIUS_M
    x = math.radians(lon_deg - anchor_lon_deg) * EARTH_RADIUS_M * math.cos(
        math.radians(anchor_lat_deg)
    )
    return x, y
