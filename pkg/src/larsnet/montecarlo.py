"""
Experiment orchestration: incumbent-drop loops, ISD sweeps, the paired
network-vs-center comparison, and density search.

Every (sweep point, drop) pair owns an independent random stream derived
from the master seed, so results are independent of execution order and
worker count; aggregation always runs in drop-index order.
"""

import math
import sys
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .geometry import Area, DropRegion, clip_deployment_to_disk, drop_incumbent, generate_hex_deployment
from .metrics import aggregate_over_drops, report_from_trace
from .propagation import build_model
from .sensing import simulate_slots


class MonteCarloError(RuntimeError):
    pass


@dataclass(frozen=True)
class SeedPolicy:
    """Derives one independent generator per (sweep point, drop)."""

    master_seed: int

    def stream(self, point_index, drop_index):
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(point_index, drop_index))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class Sweep:
    isd_values_m: tuple
    drops_per_point: int
    comparison_mode: str = "network"

    def __post_init__(self):
        if not self.isd_values_m:
            raise MonteCarloError("ISD list must be non-empty")
        if any(isd <= 0 for isd in self.isd_values_m):
            raise MonteCarloError("ISD values must be positive")
        if self.drops_per_point < 1:
            raise MonteCarloError("drops_per_point must be >= 1")


@dataclass
class SweepPoint:
    isd_m: float
    report: object
    n_sites: int


@dataclass
class ComparisonRow:
    city_area_km2: float
    isd_m: float
    network: object
    single: object
    n_sites: int


def _simulate_one_drop(config, deployment, drop_region, policy, point_index, drop_index,
                       sensor_groups=None):
    """One full drop: stream, incumbent, propagation model, slot simulation."""
    rng = policy.stream(point_index, drop_index)
    model = build_model(config.propagation.model, config.propagation.params, rng)
    incumbent = drop_incumbent(drop_region, config.incumbent.height_m, rng)
    while _coincides_with_site(incumbent, deployment):
        incumbent = drop_incumbent(drop_region, config.incumbent.height_m, rng)
    traces = simulate_slots(
        deployment,
        incumbent,
        config.link_params(),
        model,
        config.slot_model(),
        rng,
        sector_pattern=config.sector_pattern(),
        omni_pattern=config.omni_pattern(),
        dish_pattern=config.dish_pattern(),
        incumbent_boresight_el_deg=config.incumbent.boresight_elevation_deg,
        per_sector_fusion=config.flags.per_sector_fusion,
        sensor_groups=sensor_groups,
    )
    ci_method = config.flags.ci_method
    if sensor_groups is None:
        return report_from_trace(traces, ci_method=ci_method)
    return {
        name: report_from_trace(trace, ci_method=ci_method)
        for name, trace in traces.items()
    }


def _coincides_with_site(incumbent, deployment):
    if incumbent.height_m != deployment.bs_height_m:
        return False
    same_xy = (deployment.xy_m[:, 0] == incumbent.x_m) & (
        deployment.xy_m[:, 1] == incumbent.y_m
    )
    return bool(same_xy.any())


def _drop_batch(args):
    config, deployment, drop_region, policy, point_index, drop_indices, groups = args
    out = []
    for j in drop_indices:
        try:
            out.append(_simulate_one_drop(config, deployment, drop_region, policy,
                                          point_index, j, groups))
        except Exception as exc:
            raise MonteCarloError(
                f"drop {j} at point {point_index} failed: {exc}"
            ) from exc
    return out


def _run_drops(config, deployment, drop_region, policy, point_index, n_drops,
               workers=1, groups=None):
    """All drops of one sweep point, optionally across a process pool."""
    indices = list(range(n_drops))
    if workers <= 1 or n_drops < 4:
        return _drop_batch((config, deployment, drop_region, policy, point_index,
                            indices, groups))
    batch_size = max(1, math.ceil(n_drops / (workers * 4)))
    batches = [
        (config, deployment, drop_region, policy, point_index,
         indices[i : i + batch_size], groups)
        for i in range(0, n_drops, batch_size)
    ]
    ctx = get_context("fork") if sys.platform.startswith("linux") else get_context("spawn")
    with ctx.Pool(processes=workers) as pool:
        results = pool.map(_drop_batch, batches)
    merged = []
    for batch in results:
        merged.extend(batch)
    return merged


def run_sweep(config, isd_values=None, drops=None, workers=1, progress=False):
    """Aggregate metrics per ISD over independent incumbent drops.

    Returns one SweepPoint per ISD, deterministic for a fixed (config, seed)
    at any worker count.
    """
    isds = tuple(isd_values if isd_values is not None else config.isd_list())
    sweep = Sweep(isd_values_m=isds, drops_per_point=drops or config.montecarlo.drops)
    policy = SeedPolicy(config.montecarlo.seed)
    area = config.area()
    drop_region = DropRegion.square(area.side_length_m)
    weights = "by_n_on" if config.flags.pooled_metrics else "equal"

    points = []
    for point_index, isd in enumerate(sweep.isd_values_m):
        deployment = generate_hex_deployment(
            area, isd, config.deployment.bs_height_m, config.deployment.antenna_mode
        )
        reports = _run_drops(
            config, deployment, drop_region, policy, point_index,
            sweep.drops_per_point, workers=workers,
        )
        points.append(SweepPoint(
            isd_m=isd,
            report=aggregate_over_drops(reports, weights=weights),
            n_sites=deployment.n_sites,
        ))
        if progress:
            print(
                f"[sweep] isd={isd:g} m sites={deployment.n_sites} "
                f"edp={points[-1].report.edp:.4f}",
                file=sys.stderr,
            )
    return points


def run_single_vs_network(config, city_areas_km2, isd_values, drops=None,
                          workers=1, progress=False):
    """Paired network-vs-center-site comparison over disk footprints.

    Both arms of every drop share the incumbent position, noise, and duty
    draws, so the network arm dominates the single arm drop by drop.
    """
    if not city_areas_km2:
        raise MonteCarloError("city area list must be non-empty")
    isds = tuple(isd_values)
    if not isds:
        raise MonteCarloError("ISD list must be non-empty")
    n_drops = drops or config.montecarlo.drops
    policy = SeedPolicy(config.montecarlo.seed)
    weights = "by_n_on" if config.flags.pooled_metrics else "equal"

    rows = []
    for c, area_km2 in enumerate(city_areas_km2):
        if area_km2 <= 0:
            raise MonteCarloError("city areas must be positive")
        radius = math.sqrt(area_km2 * 1e6 / math.pi)
        region = DropRegion.disk(radius_m=radius)
        square = Area(side_length_m=2.0 * radius)
        for i, isd in enumerate(isds):
            point_index = c * len(isds) + i
            deployment = clip_deployment_to_disk(
                generate_hex_deployment(
                    square, min(isd, square.side_length_m),
                    config.deployment.bs_height_m, config.deployment.antenna_mode,
                ),
                radius,
            )
            groups = {
                "network": np.arange(deployment.n_sites),
                "single": np.asarray([deployment.center_index]),
            }
            pairs = _run_drops(
                config, deployment, region, policy, point_index, n_drops,
                workers=workers, groups=groups,
            )
            rows.append(ComparisonRow(
                city_area_km2=area_km2,
                isd_m=isd,
                network=aggregate_over_drops([p["network"] for p in pairs], weights),
                single=aggregate_over_drops([p["single"] for p in pairs], weights),
                n_sites=deployment.n_sites,
            ))
            if progress:
                print(
                    f"[compare] city={area_km2:g} km2 isd={isd:g} m "
                    f"net={rows[-1].network.edp:.4f} single={rows[-1].single.edp:.4f}",
                    file=sys.stderr,
                )
    return rows


@dataclass
class MinDensityResult:
    isd_m: float | None
    edp: float | None
    sensing_site_fraction: float | None
    points: list


def find_min_density(config, edp_target, isd_grid, drops=None, workers=1,
                     reference_isd_m=500.0):
    """Largest grid ISD whose aggregate EDP meets the target.

    The sensing-site fraction is the density ratio against the reference
    communication grid: (reference / ISD)^2.
    """
    if not isd_grid:
        raise MonteCarloError("ISD grid must be non-empty")
    if list(isd_grid) != sorted(isd_grid):
        raise MonteCarloError("ISD grid must be sorted ascending")
    if not (0.0 <= edp_target < 1.0):
        raise MonteCarloError("EDP target must lie in [0, 1)")
    points = run_sweep(config, isd_values=isd_grid, drops=drops, workers=workers)
    best = None
    for pt in points:
        if pt.report.edp >= edp_target:
            best = pt
    if best is None:
        return MinDensityResult(None, None, None, points)
    return MinDensityResult(
        isd_m=best.isd_m,
        edp=best.report.edp,
        sensing_site_fraction=(reference_isd_m / best.isd_m) ** 2,
        points=points,
    )
