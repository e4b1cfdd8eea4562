"""Monte Carlo simulator for large-scale distributed spectrum sensing networks."""

__version__ = "0.1.0"

from .antennas import DishPattern, OmniPattern, SectorPattern, dish_gain, omni_gain, sector_gain
from .geometry import (
    Area,
    BsSite,
    Deployment,
    DropRegion,
    IncumbentDrop,
    PairGeometry,
    drop_incumbent,
    generate_hex_deployment,
    pair_geometry,
)
from .link import LinkBudgetParams, LinkResult, apply_noise, received_power, threshold_test, to_psd
from .metrics import MetricsReport, aggregate_over_drops, estimate_edp, estimate_tdp, estimate_tmp
from .propagation import FreeSpaceModel, LogDistanceModel, PropagationModel, fspl, register_model
from .sensing import SlotModel, SlotTrace, per_site_indicator, simulate_slots

__all__ = [
    "__version__",
    "Area",
    "BsSite",
    "Deployment",
    "DropRegion",
    "IncumbentDrop",
    "PairGeometry",
    "drop_incumbent",
    "generate_hex_deployment",
    "pair_geometry",
    "DishPattern",
    "OmniPattern",
    "SectorPattern",
    "dish_gain",
    "omni_gain",
    "sector_gain",
    "PropagationModel",
    "FreeSpaceModel",
    "LogDistanceModel",
    "fspl",
    "register_model",
    "LinkBudgetParams",
    "LinkResult",
    "received_power",
    "to_psd",
    "apply_noise",
    "threshold_test",
    "SlotModel",
    "SlotTrace",
    "simulate_slots",
    "per_site_indicator",
    "MetricsReport",
    "estimate_edp",
    "estimate_tdp",
    "estimate_tmp",
    "aggregate_over_drops",
]
