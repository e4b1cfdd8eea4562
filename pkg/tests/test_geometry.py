import math

import numpy as np
import pytest
from scipy.stats import chisquare

from larsnet.geometry import (
    Area,
    BsSite,
    DropRegion,
    GeometryError,
    IncumbentDrop,
    drop_incumbent,
    generate_hex_deployment,
    geodetic_to_local,
    local_to_geodetic,
    pair_geometry,
    wrap_180,
)


def lattice_points_by_enumeration(side_length_m, isd_m):
    """Oracle: brute-force membership scan over a generous index box."""
    row_spacing = math.sqrt(3.0) / 2.0 * isd_m
    half = side_length_m / 2.0
    n = int(side_length_m / isd_m) + 3
    points = set()
    for r in range(-2 * n, 2 * n + 1):
        for j in range(-2 * n, 2 * n + 1):
            x = j * isd_m + (isd_m / 2.0 if r % 2 else 0.0)
            y = r * row_spacing
            if abs(x) <= half and abs(y) <= half:
                points.add((round(x, 6), round(y, 6)))
    return points


@pytest.mark.parametrize("isd", [500.0, 750.0, 1000.0, 2000.0, 3300.0])
def test_site_set_matches_enumeration_oracle(isd):
    area = Area(10000.0)
    dep = generate_hex_deployment(area, isd, 25.0)
    oracle = lattice_points_by_enumeration(area.side_length_m, isd)
    got = {(round(x, 6), round(y, 6)) for x, y in dep.xy_m}
    assert got == oracle


def test_site_count_near_density_estimate():
    dep = generate_hex_deployment(Area(10000.0), 500.0, 25.0)
    density_count = math.floor(10000.0 ** 2 / (math.sqrt(3) / 2 * 500.0 ** 2))
    # one row of edge effects is ~21 sites at this ISD
    assert abs(dep.n_sites - density_count) <= 21


def test_degenerate_single_site():
    dep = generate_hex_deployment(Area(10000.0), 10000.0, 25.0)
    assert dep.n_sites == 1
    assert dep.xy_m[0, 0] == 0.0 and dep.xy_m[0, 1] == 0.0
    assert dep.center_index == 0


def test_tri_sector_boresights():
    dep = generate_hex_deployment(Area(10000.0), 2000.0, 25.0, "tri_sector")
    assert dep.sector_azimuths_deg == (60.0, 180.0, 300.0)
    for site in dep.sites():
        assert site.sector_azimuths_deg == (60.0, 180.0, 300.0)


def test_omni_mode_single_sector():
    dep = generate_hex_deployment(Area(10000.0), 2000.0, 25.0, "omni")
    assert dep.n_sectors == 1


def test_center_site_is_at_origin():
    dep = generate_hex_deployment(Area(10000.0), 700.0, 25.0)
    cx, cy = dep.xy_m[dep.center_index]
    assert cx == 0.0 and cy == 0.0


def test_invalid_isd_rejected():
    with pytest.raises(GeometryError):
        generate_hex_deployment(Area(10000.0), 0.0, 25.0)
    with pytest.raises(GeometryError):
        generate_hex_deployment(Area(10000.0), 10001.0, 25.0)
    with pytest.raises(GeometryError):
        generate_hex_deployment(Area(10000.0), 500.0, 25.0, "sideways")


def test_interior_sites_have_six_neighbors_at_isd():
    isd = 800.0
    dep = generate_hex_deployment(Area(10000.0), isd, 25.0)
    xy = dep.xy_m
    half = dep.area.half
    interior = (np.abs(xy[:, 0]) < half - isd) & (np.abs(xy[:, 1]) < half - isd)
    assert interior.sum() > 50
    for i in np.flatnonzero(interior):
        d = np.hypot(xy[:, 0] - xy[i, 0], xy[:, 1] - xy[i, 1])
        neighbors = np.sum(np.abs(d - isd) <= 1e-6 * isd)
        assert neighbors == 6


def test_site_count_non_increasing_in_isd():
    counts = [
        generate_hex_deployment(Area(10000.0), isd, 25.0).n_sites
        for isd in (300.0, 500.0, 800.0, 1300.0, 2100.0, 3400.0, 5500.0)
    ]
    assert counts == sorted(counts, reverse=True)


def test_disk_drops_stay_inside_radius():
    region = DropRegion.disk(area_km2=21.0)
    assert region.radius_m == pytest.approx(math.sqrt(21e6 / math.pi), rel=1e-12)
    assert region.radius_m == pytest.approx(2585.0, abs=1.0)
    rng = np.random.default_rng(3)
    for _ in range(10000):
        drop = drop_incumbent(region, 60.0, rng)
        assert math.hypot(drop.x_m, drop.y_m) <= region.radius_m


def test_square_drop_mean_near_origin():
    region = DropRegion.square(10000.0)
    rng = np.random.default_rng(11)
    n = 100000
    xs = np.empty(n)
    ys = np.empty(n)
    for i in range(n):
        d = drop_incumbent(region, 60.0, rng)
        xs[i], ys[i] = d.x_m, d.y_m
    se = 10000.0 / math.sqrt(12.0) / math.sqrt(n)
    assert abs(xs.mean()) <= 3 * se
    assert abs(ys.mean()) <= 3 * se
    assert np.all((0.0 <= np.array([drop_incumbent(region, 60.0, rng).boresight_azimuth_deg
                                    for _ in range(1000)])))


def test_square_drops_chi_square_uniform():
    region = DropRegion.square(10000.0)
    rng = np.random.default_rng(5)
    n = 20000
    counts = np.zeros((4, 4), dtype=int)
    for _ in range(n):
        d = drop_incumbent(region, 60.0, rng)
        ix = min(int((d.x_m + 5000.0) / 2500.0), 3)
        iy = min(int((d.y_m + 5000.0) / 2500.0), 3)
        counts[iy, ix] += 1
    stat, p = chisquare(counts.ravel(), f_exp=np.full(16, n / 16))
    assert p >= 0.001


def test_drop_determinism():
    region = DropRegion.square(10000.0)
    seqs = []
    for _ in range(2):
        rng = np.random.default_rng(77)
        seqs.append([drop_incumbent(region, 60.0, rng) for _ in range(20)])
    assert seqs[0] == seqs[1]


def test_nonpositive_region_rejected():
    with pytest.raises(GeometryError):
        DropRegion.square(0.0)
    with pytest.raises(GeometryError):
        DropRegion.disk(area_km2=-3.0)


def _site(x, y, h=25.0):
    return BsSite(0, x, y, h, (60.0, 180.0, 300.0))


def test_pair_geometry_east_sensor():
    inc = IncumbentDrop(0.0, 0.0, 60.0, 0.0)
    pg = pair_geometry(inc, _site(1000.0, 0.0))
    assert pg.azimuth_at_incumbent_deg == 0.0
    assert pg.elevation_deg == pytest.approx(math.degrees(math.atan2(-35.0, 1000.0)), abs=1e-12)
    assert pg.elevation_deg == pytest.approx(-2.005, abs=0.001)
    assert pg.horizontal_distance_m == 1000.0
    assert pg.slant_distance_m == pytest.approx(math.hypot(1000.0, 35.0), rel=1e-12)


def test_pair_geometry_north_sensor():
    inc = IncumbentDrop(0.0, 0.0, 60.0, 0.0)
    pg = pair_geometry(inc, _site(0.0, 1000.0))
    assert pg.azimuth_at_incumbent_deg == 90.0


def test_pair_geometry_swap_symmetry():
    rng = np.random.default_rng(9)
    for _ in range(50):
        x, y = rng.uniform(-5000, 5000, 2)
        inc = IncumbentDrop(float(x), float(y), 60.0, 0.0)
        site = _site(float(rng.uniform(-5000, 5000)), float(rng.uniform(-5000, 5000)))
        fwd = pair_geometry(inc, site)
        rev = pair_geometry(
            IncumbentDrop(site.x_m, site.y_m, site.height_m, 0.0),
            BsSite(0, inc.x_m, inc.y_m, inc.height_m, (60.0, 180.0, 300.0)),
        )
        assert rev.azimuth_at_incumbent_deg == pytest.approx(
            (fwd.azimuth_at_incumbent_deg + 180.0) % 360.0, abs=1e-9
        )
        assert rev.elevation_deg == pytest.approx(-fwd.elevation_deg, abs=1e-9)
        assert rev.slant_distance_m == pytest.approx(fwd.slant_distance_m, rel=1e-12)


def test_pair_geometry_slant_identity():
    rng = np.random.default_rng(13)
    for _ in range(100):
        inc = IncumbentDrop(*rng.uniform(-5000, 5000, 2), 60.0, 0.0)
        site = _site(*rng.uniform(-5000, 5000, 2))
        pg = pair_geometry(inc, site)
        assert pg.slant_distance_m >= pg.horizontal_distance_m
        assert pg.slant_distance_m ** 2 == pytest.approx(
            pg.horizontal_distance_m ** 2 + 35.0 ** 2, rel=1e-12
        )


def test_pair_geometry_colocated_raises():
    inc = IncumbentDrop(100.0, 100.0, 25.0, 0.0)
    with pytest.raises(GeometryError):
        pair_geometry(inc, _site(100.0, 100.0, 25.0))
    # same (x, y) at a different height is fine: straight-down geometry
    pg = pair_geometry(IncumbentDrop(100.0, 100.0, 60.0, 0.0), _site(100.0, 100.0, 25.0))
    assert pg.elevation_deg == -90.0


def test_geodetic_identity_at_anchor():
    assert local_to_geodetic(0.0, 0.0, 40.0, -105.0) == (40.0, -105.0)


def test_geodetic_meridian_step():
    # spherical meridian arc: one degree of latitude is ~111.195 km
    meters_per_deg = math.pi * 6371000.0 / 180.0
    lat, lon = local_to_geodetic(0.0, 1111.95, 40.0, -105.0)
    assert lat - 40.0 == pytest.approx(1111.95 / meters_per_deg, rel=1e-12)
    assert lat - 40.0 == pytest.approx(0.01, abs=1e-5)
    assert lon == -105.0


def test_geodetic_round_trip_under_one_meter():
    rng = np.random.default_rng(21)
    for _ in range(200):
        x, y = rng.uniform(-5000.0, 5000.0, 2)
        lat, lon = local_to_geodetic(x, y, 39.9, -105.2)
        x2, y2 = geodetic_to_local(lat, lon, 39.9, -105.2)
        assert math.hypot(x2 - x, y2 - y) < 1.0


def test_geodetic_polar_anchor_rejected():
    with pytest.raises(GeometryError):
        local_to_geodetic(0.0, 0.0, 90.0, 0.0)


def test_wrap_180_range():
    vals = np.array([-720.0, -180.0, -90.0, 0.0, 90.0, 180.0, 359.0, 720.0])
    wrapped = wrap_180(vals)
    assert np.all(wrapped > -180.0) and np.all(wrapped <= 180.0)
    assert wrap_180(180.0) == 180.0
    assert wrap_180(-180.0) == 180.0
    assert wrap_180(190.0) == -170.0
