"""
Received-power grids and their renderings: the interpolated heatmap over the
whole area and the binary per-site threshold map, plus CSV grid export.

Images are deterministic PNGs; each carries a JSON sidecar with the color
scale, marker counts, and scenario provenance.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .antennas import DishPattern, SectorPattern, dish_gain, sector_gain
from .geometry import pair_geometry_to_points, wrap_180
from .link import received_power, to_psd
from .sensing import static_sensor_psd

PNG_METADATA = {"Software": "larsnet"}


class OutputError(RuntimeError):
    pass


@dataclass
class PowerGrid:
    """Received PSD sampled on a regular grid over the simulation area."""

    x_m: np.ndarray
    y_m: np.ndarray
    values_dbm_per_mhz: np.ndarray
    mode: str

    @property
    def resolution(self):
        return self.x_m.shape[0]


def field_psd_at_points(x_m, y_m, incumbent, link_params, model, height_m,
                        dish_pattern=None, incumbent_boresight_el_deg=0.0,
                        probe_pattern=None, probe_azimuths_deg=None):
    """Noise-free PSD of the incumbent's field at arbitrary probe points.

    The probe antenna is an isotropic 0 dBi element unless a sector pattern
    (with boresight azimuths) is supplied.
    """
    dish = dish_pattern or DishPattern()
    pair = pair_geometry_to_points(incumbent, x_m, y_m, height_m)
    gain_inc = dish_gain(
        dish,
        wrap_180(pair.azimuth_at_incumbent_deg - incumbent.boresight_azimuth_deg),
        pair.elevation_deg - incumbent_boresight_el_deg,
    )
    loss = model.path_loss(pair, link_params.frequency_hz)
    if probe_pattern is None:
        gain_probe = 0.0
    else:
        boresights = np.asarray(probe_azimuths_deg, dtype=float)
        offsets = wrap_180(pair.azimuth_at_sensor_deg[:, None] - boresights[None, :])
        gain_probe = sector_gain(probe_pattern, offsets, -pair.elevation_deg[:, None]).max(axis=1)
    p_rx = received_power(link_params, gain_inc, loss, gain_probe)
    return to_psd(p_rx, link_params.bandwidth_hz, link_params.psd_sign_paper_literal)


def compute_power_grid(deployment, incumbent, link_params, model, resolution,
                       mode="dense_field", dish_pattern=None,
                       incumbent_boresight_el_deg=0.0, probe="isotropic",
                       sector_pattern=None, omni_pattern=None, idw_power=2.0):
    """Sample the received PSD over the deployment's area.

    dense_field evaluates the link budget at every grid point (virtual probe
    at sensor height); site_interpolated evaluates at the BS sites only and
    fills the grid by inverse-distance weighting.
    """
    if resolution < 2:
        raise OutputError("resolution must be >= 2")
    if mode not in ("dense_field", "site_interpolated"):
        raise OutputError(f"unknown grid mode {mode!r}")
    area = deployment.area
    if not area.contains(incumbent.x_m, incumbent.y_m):
        warnings.warn("incumbent lies outside the simulation area", stacklevel=2)
    axis = np.linspace(-area.half, area.half, resolution)
    gx, gy = np.meshgrid(axis, axis)

    if mode == "dense_field":
        probe_pattern = None
        probe_az = None
        if probe == "sensor" and deployment.antenna_mode == "tri_sector":
            probe_pattern = sector_pattern or SectorPattern()
            probe_az = deployment.sector_azimuths_deg
        values = field_psd_at_points(
            gx.ravel(), gy.ravel(), incumbent, link_params, model,
            deployment.bs_height_m, dish_pattern=dish_pattern,
            incumbent_boresight_el_deg=incumbent_boresight_el_deg,
            probe_pattern=probe_pattern, probe_azimuths_deg=probe_az,
        ).reshape(resolution, resolution)
    else:
        site_psd, _ = static_sensor_psd(
            deployment, incumbent, link_params, model,
            sector_pattern=sector_pattern, omni_pattern=omni_pattern,
            dish_pattern=dish_pattern,
            incumbent_boresight_el_deg=incumbent_boresight_el_deg,
        )
        dx = gx.ravel()[:, None] - deployment.xy_m[None, :, 0]
        dy = gy.ravel()[:, None] - deployment.xy_m[None, :, 1]
        dist = np.hypot(dx, dy)
        with np.errstate(divide="ignore"):
            w = dist ** (-idw_power)
        exact = dist == 0.0
        w[np.isinf(w)] = 0.0
        vals = (w @ site_psd) / np.maximum(w.sum(axis=1), 1e-300)
        hit_rows, hit_cols = np.nonzero(exact)
        vals[hit_rows] = site_psd[hit_cols]
        values = vals.reshape(resolution, resolution)

    return PowerGrid(x_m=axis, y_m=axis, values_dbm_per_mhz=values, mode=mode)


def export_grid_csv(grid, path):
    """Write the grid as rows of x_m,y_m,psd_dbm_per_mhz (row-major over y)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x_m", "y_m", "psd_dbm_per_mhz"])
        for iy, y in enumerate(grid.y_m):
            for ix, x in enumerate(grid.x_m):
                writer.writerow([repr(float(x)), repr(float(y)),
                                 repr(float(grid.values_dbm_per_mhz[iy, ix]))])


def _draw_incumbent_marker(ax, incumbent, arrow_length_m):
    ax.plot(incumbent.x_m, incumbent.y_m, marker="*", color="red", markersize=14,
            markeredgecolor="darkred", linestyle="none", zorder=5)
    az = math.radians(incumbent.boresight_azimuth_deg)
    ax.annotate(
        "",
        xy=(incumbent.x_m + arrow_length_m * math.cos(az),
            incumbent.y_m + arrow_length_m * math.sin(az)),
        xytext=(incumbent.x_m, incumbent.y_m),
        arrowprops=dict(arrowstyle="->", color="red", lw=1.5),
        zorder=5,
    )


def _write_sidecar(path, payload):
    sidecar = str(path) + ".legend.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def render_heatmap(grid, deployment, incumbent, image_path, color_scale=None,
                   provenance_hash=""):
    """Render the PSD grid with site markers and the incumbent star/arrow."""
    vmin, vmax = color_scale if color_scale else (
        float(grid.values_dbm_per_mhz.min()), float(grid.values_dbm_per_mhz.max())
    )
    fig, ax = plt.subplots(figsize=(7.0, 6.0), dpi=110)
    half = deployment.area.half
    im = ax.imshow(
        grid.values_dbm_per_mhz, origin="lower",
        extent=(-half, half, -half, half),
        vmin=vmin, vmax=vmax, cmap="viridis", interpolation="bilinear",
    )
    ax.scatter(deployment.xy_m[:, 0], deployment.xy_m[:, 1], s=6, c="black",
               marker="o", zorder=4)
    _draw_incumbent_marker(ax, incumbent, arrow_length_m=0.08 * deployment.area.side_length_m)
    fig.colorbar(im, ax=ax, label="received PSD (dBm/MHz)")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_xlim(-half, half)
    ax.set_ylim(-half, half)
    try:
        fig.savefig(image_path, format="png", metadata=PNG_METADATA)
    except OSError as exc:
        raise OutputError(f"cannot write image {image_path}: {exc}") from exc
    finally:
        plt.close(fig)
    _write_sidecar(image_path, {
        "color_scale_dbm_per_mhz": [vmin, vmax],
        "grid_mode": grid.mode,
        "resolution": grid.resolution,
        "n_sites": int(deployment.n_sites),
        "provenance_hash": provenance_hash,
    })
    return image_path


def render_threshold_map(deployment, site_indicators, incumbent, image_path,
                         provenance_hash=""):
    """Scatter sites colored by their detection indicator, plus the incumbent."""
    indicators = np.asarray(site_indicators, dtype=bool)
    if indicators.shape[0] != deployment.n_sites:
        raise OutputError("need exactly one indicator per site")
    fig, ax = plt.subplots(figsize=(6.4, 6.0), dpi=110)
    half = deployment.area.half
    below = ~indicators
    ax.scatter(deployment.xy_m[below, 0], deployment.xy_m[below, 1], s=10,
               c="black", marker="o", label="below threshold")
    ax.scatter(deployment.xy_m[indicators, 0], deployment.xy_m[indicators, 1], s=14,
               c="green", marker="o", label="above threshold")
    _draw_incumbent_marker(ax, incumbent, arrow_length_m=0.08 * deployment.area.side_length_m)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_xlim(-half, half)
    ax.set_ylim(-half, half)
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    try:
        fig.savefig(image_path, format="png", metadata=PNG_METADATA)
    except OSError as exc:
        raise OutputError(f"cannot write image {image_path}: {exc}") from exc
    finally:
        plt.close(fig)
    _write_sidecar(image_path, {
        "n_sites": int(deployment.n_sites),
        "n_above_threshold": int(indicators.sum()),
        "provenance_hash": provenance_hash,
    })
    return image_path
