"""
Command-line surface: `larsnet sweep`, `larsnet heatmap`, `larsnet compare`.

Every run writes CSV (+JSON echo) outputs stamped with a provenance hash of
the effective configuration, seed, and package version. Exit codes: 0 on
success, 1 on usage/config errors, 2 on runtime errors.
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config, paper_defaults
from .geometry import DropRegion, IncumbentDrop, drop_incumbent, generate_hex_deployment
from .maps import compute_power_grid, export_grid_csv, render_heatmap, render_threshold_map
from .montecarlo import SeedPolicy, run_single_vs_network, run_sweep
from .propagation import build_model
from .sensing import static_sensor_psd

DEFAULT_CITY_AREAS_KM2 = (401.0, 71.0, 21.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_float_list(text, flag):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"{flag}: expected a comma-separated number list") from exc
    if not values:
        raise UsageError(f"{flag}: list must be non-empty")
    return values


def _build_parser():
    parser = _Parser(prog="larsnet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"larsnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="scenario YAML (default: shipped paper_defaults)")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--output", type=str, default=None,
                       help="output directory (fallback: config, then $LARSNET_OUTPUT_DIR)")
        p.add_argument("--workers", type=int, default=1, help="process pool size")
        p.add_argument("--progress", action="store_true", help="progress lines on stderr")

    p_sweep = sub.add_parser("sweep", help="metrics vs ISD")
    common(p_sweep)
    p_sweep.add_argument("--isd", type=str, default=None, help="comma-separated ISD list (m)")
    p_sweep.add_argument("--drops", type=int, default=None, help="drops per ISD")

    p_heat = sub.add_parser("heatmap", help="power heatmap + threshold map")
    common(p_heat)
    p_heat.add_argument("--resolution", type=int, default=None, help="grid cells per axis")
    p_heat.add_argument("--isd", type=str, default=None, help="single ISD override (m)")
    p_heat.add_argument("--incumbent-x", type=float, default=None)
    p_heat.add_argument("--incumbent-y", type=float, default=None)
    p_heat.add_argument("--incumbent-azimuth", type=float, default=None)
    p_heat.add_argument("--mode", choices=("dense_field", "site_interpolated"),
                        default="dense_field")

    p_cmp = sub.add_parser("compare", help="network vs center-site over city footprints")
    common(p_cmp)
    p_cmp.add_argument("--areas-km2", type=str,
                       default=",".join(str(a) for a in DEFAULT_CITY_AREAS_KM2),
                       help="comma-separated footprint areas")
    p_cmp.add_argument("--isd", type=str, default=None, help="comma-separated ISD list (m)")
    p_cmp.add_argument("--drops", type=int, default=None, help="drops per (city, ISD)")
    return parser


def _load_scenario(args):
    overrides = {}
    cfg = load_config(args.config) if args.config else paper_defaults()
    if args.seed is not None:
        cfg.montecarlo.seed = args.seed
        overrides["seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        if args.drops < 1:
            raise UsageError("--drops must be >= 1")
        cfg.montecarlo.drops = args.drops
        overrides["drops"] = args.drops
    isd_text = getattr(args, "isd", None)
    isd_values = None
    if isd_text is not None:
        isd_values = _parse_float_list(isd_text, "--isd")
        overrides["isd"] = isd_values
    resolution = getattr(args, "resolution", None)
    if resolution is not None:
        if resolution < 2:
            raise UsageError("--resolution must be >= 2")
        cfg.output.heatmap_resolution = resolution
        overrides["resolution"] = resolution
    return cfg, isd_values, overrides


def _output_dir(args, cfg):
    candidate = args.output or cfg.output.directory or os.environ.get("LARSNET_OUTPUT_DIR") or "."
    path = Path(candidate)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_sweep(args):
    cfg, isd_values, overrides = _load_scenario(args)
    out = _output_dir(args, cfg)
    points = run_sweep(cfg, isd_values=isd_values, workers=args.workers,
                       progress=args.progress)
    prov = cfg.provenance_hash()
    seed = cfg.montecarlo.seed
    header = ["isd_m", "edp", "edp_ci", "tdp", "tdp_ci", "tmp_on", "tmp_abs",
              "drops", "n_on_total", "seed", "provenance_hash"]
    rows = []
    for pt in points:
        r = pt.report
        rows.append([_fmt(float(pt.isd_m)), _fmt(r.edp), _fmt(r.edp_ci), _fmt(r.tdp),
                     _fmt(r.tdp_ci), _fmt(r.tmp_on), _fmt(r.tmp_abs), r.drops,
                     r.n_on, seed, prov])
    _write_csv(out / "sweep.csv", header, rows)
    _write_json(out / "sweep.json", {
        "command": "sweep",
        "provenance_hash": prov,
        "seed": seed,
        "overrides": overrides,
        "config": cfg.to_dict(),
        "results": [dict(zip(header, row)) for row in rows],
    })
    return 0


def _cmd_heatmap(args):
    cfg, isd_values, overrides = _load_scenario(args)
    out = _output_dir(args, cfg)
    isd = isd_values[0] if isd_values else cfg.isd_list()[0]
    deployment = generate_hex_deployment(
        cfg.area(), isd, cfg.deployment.bs_height_m, cfg.deployment.antenna_mode
    )
    rng = SeedPolicy(cfg.montecarlo.seed).stream(0, 0)
    model = build_model(cfg.propagation.model, cfg.propagation.params, rng)
    if args.incumbent_x is not None or args.incumbent_y is not None or \
            args.incumbent_azimuth is not None:
        incumbent = IncumbentDrop(
            x_m=args.incumbent_x if args.incumbent_x is not None else 0.0,
            y_m=args.incumbent_y if args.incumbent_y is not None else 0.0,
            height_m=cfg.incumbent.height_m,
            boresight_azimuth_deg=(
                args.incumbent_azimuth if args.incumbent_azimuth is not None else 0.0
            ) % 360.0,
        )
        overrides["incumbent"] = [incumbent.x_m, incumbent.y_m,
                                  incumbent.boresight_azimuth_deg]
    else:
        incumbent = drop_incumbent(
            DropRegion.square(cfg.area_cfg.side_length_m), cfg.incumbent.height_m, rng
        )
    prov = cfg.provenance_hash()
    grid = compute_power_grid(
        deployment, incumbent, cfg.link_params(), model,
        cfg.output.heatmap_resolution, mode=args.mode,
        dish_pattern=cfg.dish_pattern(),
        incumbent_boresight_el_deg=cfg.incumbent.boresight_elevation_deg,
        sector_pattern=cfg.sector_pattern(),
    )
    render_heatmap(grid, deployment, incumbent, out / "heatmap.png",
                   color_scale=(cfg.output.color_min_dbm_per_mhz,
                                cfg.output.color_max_dbm_per_mhz),
                   provenance_hash=prov)
    export_grid_csv(grid, out / "grid.csv")
    site_psd, _ = static_sensor_psd(
        deployment, incumbent, cfg.link_params(), model,
        sector_pattern=cfg.sector_pattern(), omni_pattern=cfg.omni_pattern(),
        dish_pattern=cfg.dish_pattern(),
        incumbent_boresight_el_deg=cfg.incumbent.boresight_elevation_deg,
    )
    indicators = site_psd >= cfg.link.threshold_dbm_per_mhz
    render_threshold_map(deployment, indicators, incumbent,
                         out / "threshold_map.png", provenance_hash=prov)
    _write_json(out / "heatmap.json", {
        "command": "heatmap",
        "provenance_hash": prov,
        "seed": cfg.montecarlo.seed,
        "overrides": overrides,
        "config": cfg.to_dict(),
        "incumbent": [incumbent.x_m, incumbent.y_m, incumbent.height_m,
                      incumbent.boresight_azimuth_deg],
        "n_sites": deployment.n_sites,
        "n_above_threshold": int(indicators.sum()),
    })
    return 0


def _cmd_compare(args):
    cfg, isd_values, overrides = _load_scenario(args)
    out = _output_dir(args, cfg)
    areas = _parse_float_list(args.areas_km2, "--areas-km2")
    isds = isd_values if isd_values else cfg.isd_list()
    rows_out = run_single_vs_network(cfg, areas, isds, workers=args.workers,
                                     progress=args.progress)
    prov = cfg.provenance_hash()
    seed = cfg.montecarlo.seed
    header = ["city_area_km2", "isd_m", "edp_network", "edp_single", "drops", "seed"]
    rows = [
        [_fmt(float(r.city_area_km2)), _fmt(float(r.isd_m)), _fmt(r.network.edp),
         _fmt(r.single.edp), r.network.drops, seed]
        for r in rows_out
    ]
    _write_csv(out / "compare.csv", header, rows)
    _write_json(out / "compare.json", {
        "command": "compare",
        "provenance_hash": prov,
        "seed": seed,
        "overrides": overrides,
        "config": cfg.to_dict(),
        "results": [dict(zip(header, row)) for row in rows],
    })
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "heatmap":
            return _cmd_heatmap(args)
        if args.command == "compare":
            return _cmd_compare(args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
