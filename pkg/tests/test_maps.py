import csv
import json
import time

import numpy as np
import pytest

from larsnet.config import paper_defaults
from larsnet.geometry import Area, IncumbentDrop, generate_hex_deployment
from larsnet.link import LinkBudgetParams
from larsnet.maps import (
    OutputError,
    compute_power_grid,
    export_grid_csv,
    field_psd_at_points,
    render_heatmap,
    render_threshold_map,
)
from larsnet.propagation import FreeSpaceModel
from larsnet.sensing import static_sensor_psd

MODEL = FreeSpaceModel()
PARAMS = LinkBudgetParams(noise_sigma_db=0.0)
INCUMBENT = IncumbentDrop(0.0, 0.0, 60.0, 0.0)


def small_deployment(isd=1000.0):
    return generate_hex_deployment(Area(10000.0), isd, 25.0)


def test_grid_maximum_on_boresight_ray():
    dep = small_deployment()
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=201)
    iy, ix = np.unravel_index(np.argmax(grid.values_dbm_per_mhz),
                              grid.values_dbm_per_mhz.shape)
    x, y = grid.x_m[ix], grid.y_m[iy]
    # the argmax sits on the +x boresight ray (within half a grid cell)
    cell = grid.x_m[1] - grid.x_m[0]
    assert x > 0
    assert abs(y) <= cell / 2 + 1e-9
    # and no finely-sampled ray point beats it by more than the sampling slack
    ray_x = np.linspace(cell / 4, 5000.0, 4000)
    ray_psd = field_psd_at_points(ray_x, np.zeros_like(ray_x), INCUMBENT, PARAMS,
                                  MODEL, dep.bs_height_m)
    assert grid.values_dbm_per_mhz.max() <= ray_psd.max() + 1e-9


def test_grid_values_stable_under_resolution_doubling():
    dep = small_deployment()
    coarse = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=51)
    fine = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=101)
    # every coarse axis point exists in the fine axis
    np.testing.assert_allclose(fine.x_m[::2], coarse.x_m, rtol=0, atol=1e-9)
    np.testing.assert_allclose(
        fine.values_dbm_per_mhz[::2, ::2], coarse.values_dbm_per_mhz, rtol=0, atol=1e-9
    )


def test_psd_decreases_along_boresight():
    xs = np.linspace(100.0, 5000.0, 500)
    # probe at the emitter height: gains are fixed along the ray, FSPL drives decay
    psd = field_psd_at_points(xs, np.zeros_like(xs), INCUMBENT, PARAMS, MODEL, 60.0)
    assert np.all(np.diff(psd) < 0)
    # at sensor height the far field (elevation offset ~0) still decays
    far = np.linspace(3000.0, 5000.0, 200)
    psd_far = field_psd_at_points(far, np.zeros_like(far), INCUMBENT, PARAMS, MODEL, 25.0)
    assert np.all(np.diff(psd_far) < 0)


def test_field_rotation_equivariance():
    rng = np.random.default_rng(3)
    x = rng.uniform(-5000, 5000, 300)
    y = rng.uniform(-5000, 5000, 300)
    inc_0 = IncumbentDrop(0.0, 0.0, 60.0, 30.0)
    inc_90 = IncumbentDrop(0.0, 0.0, 60.0, 120.0)
    base = field_psd_at_points(x, y, inc_0, PARAMS, MODEL, 25.0)
    rotated = field_psd_at_points(-y, x, inc_90, PARAMS, MODEL, 25.0)
    np.testing.assert_allclose(rotated, base, rtol=0, atol=1e-9)


def test_site_interpolated_exact_at_site():
    dep = small_deployment(isd=2500.0)
    # odd resolution puts a grid point exactly on the origin site
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=101,
                              mode="site_interpolated")
    site_psd, _ = static_sensor_psd(dep, INCUMBENT, PARAMS, MODEL)
    mid = 50
    assert grid.values_dbm_per_mhz[mid, mid] == pytest.approx(
        site_psd[dep.center_index], abs=1e-9
    )


def test_grid_rejects_bad_inputs():
    dep = small_deployment()
    with pytest.raises(OutputError):
        compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=1)
    with pytest.raises(OutputError):
        compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=10, mode="kriging")


def test_incumbent_outside_area_warns():
    dep = small_deployment()
    outside = IncumbentDrop(9000.0, 0.0, 60.0, 0.0)
    with pytest.warns(UserWarning):
        compute_power_grid(dep, outside, PARAMS, MODEL, resolution=11)


def test_grid_csv_round_trip(tmp_path):
    dep = small_deployment()
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=21)
    path = tmp_path / "grid.csv"
    export_grid_csv(grid, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x_m", "y_m", "psd_dbm_per_mhz"]
    values = np.array([float(r[2]) for r in rows[1:]]).reshape(21, 21)
    assert np.max(np.abs(values - grid.values_dbm_per_mhz)) == 0.0


def test_heatmap_render_deterministic(tmp_path):
    dep = small_deployment()
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=41)
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    render_heatmap(grid, dep, INCUMBENT, p1, color_scale=(-140.0, -20.0))
    time.sleep(1.1)  # byte-compare must not depend on timestamps
    render_heatmap(grid, dep, INCUMBENT, p2, color_scale=(-140.0, -20.0))
    assert p1.read_bytes() == p2.read_bytes()
    legend = json.loads((tmp_path / "a.png.legend.json").read_text())
    assert legend["color_scale_dbm_per_mhz"] == [-140.0, -20.0]


def test_heatmap_constant_grid_renders(tmp_path):
    dep = small_deployment()
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=11)
    grid.values_dbm_per_mhz[:] = -60.0
    out = render_heatmap(grid, dep, INCUMBENT, tmp_path / "flat.png")
    assert (tmp_path / "flat.png").exists()


def test_heatmap_performance_smoke(tmp_path):
    cfg = paper_defaults()
    dep = generate_hex_deployment(cfg.area(), 500.0, 25.0)
    start = time.time()
    grid = compute_power_grid(dep, INCUMBENT, cfg.link_params(), MODEL, resolution=500)
    render_heatmap(grid, dep, INCUMBENT, tmp_path / "big.png")
    assert time.time() - start < 5.0


def test_threshold_map_cone_matches_direct_evaluation(tmp_path):
    dep = small_deployment()
    site_psd, _ = static_sensor_psd(dep, INCUMBENT, PARAMS, MODEL)
    indicators = site_psd >= PARAMS.threshold_dbm_per_mhz
    render_threshold_map(dep, indicators, INCUMBENT, tmp_path / "thr.png")
    sidecar = json.loads((tmp_path / "thr.png.legend.json").read_text())
    assert sidecar["n_above_threshold"] == int(indicators.sum())
    assert sidecar["n_sites"] == dep.n_sites

    # oracle: scalar per-site evaluation through the public scalar APIs
    from larsnet.antennas import DishPattern, SectorPattern, dish_gain, sector_gain
    from larsnet.geometry import BsSite, pair_geometry, wrap_180
    from larsnet.link import evaluate_link
    from larsnet.propagation import fspl

    dish, sector = DishPattern(), SectorPattern()
    for i, (x, y) in enumerate(dep.xy_m):
        pg = pair_geometry(INCUMBENT, BsSite(i, float(x), float(y), 25.0,
                                             dep.sector_azimuths_deg))
        g_i = dish_gain(dish, wrap_180(pg.azimuth_at_incumbent_deg - 0.0),
                        pg.elevation_deg)
        best = max(
            sector_gain(sector, wrap_180(pg.azimuth_at_sensor_deg - az),
                        -pg.elevation_deg)
            for az in dep.sector_azimuths_deg
        )
        res = evaluate_link(PARAMS, g_i, fspl(pg.slant_distance_m, PARAMS.frequency_hz),
                            best)
        assert res.above_threshold == bool(indicators[i])

    # detections concentrate around the +x boresight ray
    detected = dep.xy_m[indicators]
    near = np.hypot(dep.xy_m[:, 0], dep.xy_m[:, 1]) < 1300.0
    faraway_detected = indicators & ~near
    if faraway_detected.any():
        angles = np.degrees(np.arctan2(dep.xy_m[faraway_detected, 1],
                                       dep.xy_m[faraway_detected, 0]))
        assert np.all(np.abs(angles) < 20.0)
    assert detected.shape[0] > 0


def test_threshold_map_all_below(tmp_path):
    dep = small_deployment()
    render_threshold_map(dep, np.zeros(dep.n_sites, dtype=bool), INCUMBENT,
                         tmp_path / "none.png")
    sidecar = json.loads((tmp_path / "none.png.legend.json").read_text())
    assert sidecar["n_above_threshold"] == 0


def test_threshold_map_requires_one_indicator_per_site(tmp_path):
    dep = small_deployment()
    with pytest.raises(OutputError):
        render_threshold_map(dep, np.zeros(3, dtype=bool), INCUMBENT, tmp_path / "x.png")


def test_render_unwritable_path_raises():
    dep = small_deployment()
    grid = compute_power_grid(dep, INCUMBENT, PARAMS, MODEL, resolution=11)
    with pytest.raises(OutputError):
        render_heatmap(grid, dep, INCUMBENT, "/nonexistent_dir_xyz/o.png")
