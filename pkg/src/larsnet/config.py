"""
Scenario configuration: schema, validation, shipped defaults, provenance.

Configs are nested YAML mappings; unknown keys are rejected and every
validation error names the offending key. The shipped ``paper_defaults``
scenario carries the lower-7 GHz fixed-service defaults used throughout the
test suite.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources

import yaml

from . import __version__
from .antennas import DishPattern, OmniPattern, SectorPattern
from .geometry import Area
from .link import LinkBudgetParams
from .sensing import SlotModel


class ConfigError(ValueError):
    pass


@dataclass
class AreaConfig:
    side_length_m: float = 10000.0


@dataclass
class DeploymentConfig:
    isd_m: object = 500.0  # scalar or list of scalars
    bs_height_m: float = 25.0
    antenna_mode: str = "tri_sector"


@dataclass
class SectorPatternConfig:
    max_gain_dbi: float = 15.4
    h_hpbw_deg: float = 90.0
    v_hpbw_deg: float = 9.0
    front_to_back_db: float = 30.0
    sidelobe_floor_db: float = 30.0
    electrical_downtilt_deg: float = 0.0


@dataclass
class OmniPatternConfig:
    max_gain_dbi: float = 7.0
    v_hpbw_deg: float = 18.0
    sidelobe_floor_db: float = 15.0


@dataclass
class IncumbentConfig:
    eirp_dbm: float = 63.0
    max_gain_dbi: float = 33.1
    hpbw_deg: float = 3.7
    front_to_back_db: float = 40.0
    height_m: float = 60.0
    boresight_elevation_deg: float = 0.0


@dataclass
class LinkConfig:
    frequency_hz: float = 7.25e9
    bandwidth_hz: float = 30e6
    threshold_dbm_per_mhz: float = -89.0
    noise_sigma_db: float = 3.0
    min_bandwidth_hz: float = 1e6


@dataclass
class PropagationConfig:
    model: str = "fspl"
    params: dict = field(default_factory=dict)


@dataclass
class SlotsConfig:
    num_slots: int = 10000
    p_on: float = 0.3
    duty_cycle: float = 0.2
    fusion_k: int = 1


@dataclass
class MonteCarloConfig:
    drops: int = 2000
    seed: int = 20260808


@dataclass
class FlagsConfig:
    psd_sign_paper_literal: bool = False
    per_sector_fusion: bool = False
    pooled_metrics: bool = False
    ci_method: str = "normal"


@dataclass
class OutputConfig:
    directory: str | None = None
    heatmap_resolution: int = 500
    color_min_dbm_per_mhz: float = -140.0
    color_max_dbm_per_mhz: float = -20.0


_SECTIONS = {
    "area": AreaConfig,
    "deployment": DeploymentConfig,
    "sector_pattern": SectorPatternConfig,
    "omni_pattern": OmniPatternConfig,
    "incumbent": IncumbentConfig,
    "link": LinkConfig,
    "propagation": PropagationConfig,
    "slots": SlotsConfig,
    "montecarlo": MonteCarloConfig,
    "flags": FlagsConfig,
    "output": OutputConfig,
}


@dataclass
class ScenarioConfig:
    area_cfg: AreaConfig = field(default_factory=AreaConfig)
    deployment: DeploymentConfig = field(default_factory=DeploymentConfig)
    sector: SectorPatternConfig = field(default_factory=SectorPatternConfig)
    omni: OmniPatternConfig = field(default_factory=OmniPatternConfig)
    incumbent: IncumbentConfig = field(default_factory=IncumbentConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    slots: SlotsConfig = field(default_factory=SlotsConfig)
    montecarlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    flags: FlagsConfig = field(default_factory=FlagsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    # ---- builders for the simulation objects ---------------------------------

    def area(self):
        return Area(side_length_m=self.area_cfg.side_length_m)

    def isd_list(self):
        isd = self.deployment.isd_m
        if isinstance(isd, (list, tuple)):
            return [float(v) for v in isd]
        return [float(isd)]

    def link_params(self):
        return LinkBudgetParams(
            eirp_max_dbm=self.incumbent.eirp_dbm,
            incumbent_max_gain_dbi=self.incumbent.max_gain_dbi,
            bandwidth_hz=self.link.bandwidth_hz,
            frequency_hz=self.link.frequency_hz,
            noise_sigma_db=self.link.noise_sigma_db,
            threshold_dbm_per_mhz=self.link.threshold_dbm_per_mhz,
            min_bandwidth_hz=self.link.min_bandwidth_hz,
            psd_sign_paper_literal=self.flags.psd_sign_paper_literal,
        )

    def sector_pattern(self):
        return SectorPattern(**asdict(self.sector))

    def omni_pattern(self):
        return OmniPattern(**asdict(self.omni))

    def dish_pattern(self):
        return DishPattern(
            max_gain_dbi=self.incumbent.max_gain_dbi,
            hpbw_deg=self.incumbent.hpbw_deg,
            front_to_back_db=self.incumbent.front_to_back_db,
        )

    def slot_model(self):
        return SlotModel(
            num_slots=self.slots.num_slots,
            p_on=self.slots.p_on,
            duty_cycle=self.slots.duty_cycle,
            fusion_k=self.slots.fusion_k,
        )

    # ---- serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "area": asdict(self.area_cfg),
            "deployment": asdict(self.deployment),
            "sector_pattern": asdict(self.sector),
            "omni_pattern": asdict(self.omni),
            "incumbent": asdict(self.incumbent),
            "link": asdict(self.link),
            "propagation": asdict(self.propagation),
            "slots": asdict(self.slots),
            "montecarlo": asdict(self.montecarlo),
            "flags": asdict(self.flags),
            "output": asdict(self.output),
        }

    def provenance_hash(self):
        """Hash of (scenario, seed, version); the output directory is excluded."""
        scenario = self.to_dict()
        scenario["output"]["directory"] = None
        payload = json.dumps(
            {"config": scenario, "seed": self.montecarlo.seed, "version": __version__},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


_ATTR_OF_SECTION = {
    "area": "area_cfg",
    "deployment": "deployment",
    "sector_pattern": "sector",
    "omni_pattern": "omni",
    "incumbent": "incumbent",
    "link": "link",
    "propagation": "propagation",
    "slots": "slots",
    "montecarlo": "montecarlo",
    "flags": "flags",
    "output": "output",
}


def _coerce_section(section_name, cls, data):
    if not isinstance(data, dict):
        raise ConfigError(f"{section_name}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{section_name}: unknown key(s) {sorted(unknown)}")
    return cls(**data)


def config_from_dict(raw):
    """Build and validate a ScenarioConfig from a plain nested dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    kwargs = {}
    for section_name, cls in _SECTIONS.items():
        data = raw.get(section_name, {})
        kwargs[_ATTR_OF_SECTION[section_name]] = _coerce_section(section_name, cls, data)
    cfg = ScenarioConfig(**kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    """Range and consistency checks; errors name the offending key."""
    def check(cond, key, constraint):
        if not cond:
            raise ConfigError(f"{key}: {constraint}")

    check(cfg.area_cfg.side_length_m > 0, "area.side_length_m", "must be positive")
    for isd in cfg.isd_list():
        check(isd > 0, "deployment.isd_m", "must be positive")
        check(isd <= cfg.area_cfg.side_length_m, "deployment.isd_m",
              "must not exceed area.side_length_m")
    check(cfg.deployment.bs_height_m > 0, "deployment.bs_height_m", "must be positive")
    check(cfg.deployment.antenna_mode in ("tri_sector", "omni"),
          "deployment.antenna_mode", "must be 'tri_sector' or 'omni'")
    check(0 < cfg.sector.h_hpbw_deg <= 180, "sector_pattern.h_hpbw_deg", "must lie in (0, 180]")
    check(0 < cfg.sector.v_hpbw_deg <= 180, "sector_pattern.v_hpbw_deg", "must lie in (0, 180]")
    check(cfg.sector.front_to_back_db > 0, "sector_pattern.front_to_back_db", "must be positive")
    check(cfg.sector.sidelobe_floor_db > 0, "sector_pattern.sidelobe_floor_db", "must be positive")
    check(0 < cfg.omni.v_hpbw_deg <= 180, "omni_pattern.v_hpbw_deg", "must lie in (0, 180]")
    check(cfg.omni.sidelobe_floor_db > 0, "omni_pattern.sidelobe_floor_db", "must be positive")
    check(0 < cfg.incumbent.hpbw_deg <= 180, "incumbent.hpbw_deg", "must lie in (0, 180]")
    check(cfg.incumbent.front_to_back_db > 0, "incumbent.front_to_back_db", "must be positive")
    check(cfg.incumbent.height_m > 0, "incumbent.height_m", "must be positive")
    check(cfg.link.frequency_hz > 0, "link.frequency_hz", "must be positive")
    check(cfg.link.bandwidth_hz >= cfg.link.min_bandwidth_hz, "link.bandwidth_hz",
          f"must be >= min_bandwidth_hz ({cfg.link.min_bandwidth_hz:g})")
    check(cfg.link.noise_sigma_db >= 0, "link.noise_sigma_db", "must be >= 0")
    check(isinstance(cfg.propagation.model, str) and cfg.propagation.model,
          "propagation.model", "must be a model identifier")
    check(cfg.slots.num_slots >= 1, "slots.num_slots", "must be >= 1")
    check(0 <= cfg.slots.p_on <= 1, "slots.p_on", "must lie in [0, 1]")
    check(0 <= cfg.slots.duty_cycle <= 1, "slots.duty_cycle", "must lie in [0, 1]")
    check(cfg.slots.fusion_k >= 1, "slots.fusion_k", "must be >= 1")
    check(cfg.montecarlo.drops >= 1, "montecarlo.drops", "must be >= 1")
    check(cfg.flags.ci_method in ("normal", "clopper_pearson"),
          "flags.ci_method", "must be 'normal' or 'clopper_pearson'")
    check(cfg.output.heatmap_resolution >= 2, "output.heatmap_resolution", "must be >= 2")
    check(cfg.output.color_min_dbm_per_mhz < cfg.output.color_max_dbm_per_mhz,
          "output.color_min_dbm_per_mhz", "must be below color_max_dbm_per_mhz")


def load_config(path):
    """Load, default-fill, and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return config_from_dict(raw or {})


def paper_defaults():
    """The shipped default scenario (lower-7 GHz FS incumbent, tri-sector sensors)."""
    text = resources.files("larsnet.data").joinpath("paper_defaults.yaml").read_text()
    return config_from_dict(yaml.safe_load(text))


def dump_config(cfg, path):
    """Serialize a config back to YAML (round-trips through load_config)."""
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)
