"""
Slot-level detection simulation.

Per drop, geometry and path loss are static; only incumbent activity,
measurement noise, and the per-sensor duty-cycle draws vary across slots.
Noise and duty indicators are drawn only for incumbent-active slots, in a
fixed chunked order, so big networks stream in bounded memory.
"""

from dataclasses import dataclass, field

import numpy as np

from .antennas import DishPattern, OmniPattern, SectorPattern, dish_gain, omni_gain, sector_gain
from .geometry import pair_geometry_to_points, wrap_180
from .link import received_power, to_psd

SLOT_CHUNK = 2048


class SensingError(ValueError):
    pass


@dataclass(frozen=True)
class SlotModel:
    """Slot process parameters: length, activity, duty cycle, fusion threshold."""

    num_slots: int = 10000
    p_on: float = 0.3
    duty_cycle: float = 0.2
    fusion_k: int = 1

    def __post_init__(self):
        if self.num_slots < 1:
            raise SensingError("num_slots must be >= 1")
        if not (0.0 <= self.p_on <= 1.0):
            raise SensingError("p_on must lie in [0, 1]")
        if not (0.0 <= self.duty_cycle <= 1.0):
            raise SensingError("duty_cycle must lie in [0, 1]")
        if self.fusion_k < 1:
            raise SensingError("fusion_k must be >= 1")


@dataclass
class SlotTrace:
    """Reduced per-slot record of one drop's simulation.

    ``num_ideal``/``num_effective`` are per-slot sensor counts above threshold
    (ideal listening vs duty-gated); decisions are the K-out-of-N outcomes.
    Full indicator matrices (rows = ON slots in order) are kept only when the
    simulation is asked to store them.
    """

    activity: np.ndarray
    num_ideal: np.ndarray
    num_effective: np.ndarray
    decision_ideal: np.ndarray
    decision: np.ndarray
    n_sensors: int
    fusion_k: int
    duty_cycle: float
    p_on: float
    ideal_matrix: np.ndarray | None = field(default=None, repr=False)
    sensing_matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def total_slots(self):
        return int(self.activity.shape[0])

    @property
    def n_on(self):
        return int(self.activity.sum())

    @staticmethod
    def from_indicators(activity, ideal, sensing, fusion_k):
        """Build a trace from explicit per-slot, per-sensor indicator matrices.

        ``activity`` is (T,), ``ideal`` and ``sensing`` are (T, n) 0/1 arrays;
        ideal indicators are forced to zero on inactive slots.
        """
        activity = np.asarray(activity, dtype=bool)
        ideal = np.asarray(ideal, dtype=bool)
        sensing = np.asarray(sensing, dtype=bool)
        if ideal.shape != sensing.shape or ideal.shape[0] != activity.shape[0]:
            raise SensingError("indicator matrices must align with the activity vector")
        ideal = ideal & activity[:, None]
        n_sensors = ideal.shape[1]
        if fusion_k > n_sensors:
            raise SensingError("fusion_k exceeds the sensor count")
        effective = ideal & sensing
        num_ideal = ideal.sum(axis=1).astype(np.int64)
        num_effective = effective.sum(axis=1).astype(np.int64)
        return SlotTrace(
            activity=activity,
            num_ideal=num_ideal,
            num_effective=num_effective,
            decision_ideal=num_ideal >= fusion_k,
            decision=num_effective >= fusion_k,
            n_sensors=n_sensors,
            fusion_k=fusion_k,
            duty_cycle=float(sensing[activity].mean()) if activity.any() else float("nan"),
            p_on=float(activity.mean()),
            ideal_matrix=ideal[activity],
            sensing_matrix=sensing[activity],
        )

    def export_columns(self):
        """Columnar debug export: slot, a, sum dI, sum d, D_ideal, D."""
        t = np.arange(self.total_slots)
        return np.column_stack(
            [
                t,
                self.activity.astype(np.int64),
                self.num_ideal,
                self.num_effective,
                self.decision_ideal.astype(np.int64),
                self.decision.astype(np.int64),
            ]
        )

    def export_csv(self, path):
        """Write the columnar debug export to ``path``."""
        header = "slot,activity,num_ideal,num_effective,decision_ideal,decision"
        np.savetxt(path, self.export_columns(), fmt="%d", delimiter=",",
                   header=header, comments="")


def per_site_indicator(sector_psds, gamma_dbm_per_mhz):
    """Site-level detection via the best-sector rule: max over sectors >= gamma."""
    psds = np.asarray(sector_psds, dtype=float)
    if psds.size == 0:
        raise SensingError("need at least one sector value")
    return bool(psds.max() >= gamma_dbm_per_mhz)


def static_sensor_psd(
    deployment,
    incumbent,
    link_params,
    propagation_model,
    sector_pattern=None,
    omni_pattern=None,
    dish_pattern=None,
    incumbent_boresight_el_deg=0.0,
    per_sector_fusion=False,
):
    """Noise-free detection PSD per sensor for a static drop.

    Returns an (n_sensors,) array: one value per site (best sector) by
    default, or one per sector when ``per_sector_fusion`` is set (omni mode
    has a single sector either way). Also returns the site index owning each
    sensor, so site subsets can be mapped to sensor subsets.
    """
    dish = dish_pattern or DishPattern()
    pair = pair_geometry_to_points(
        incumbent, deployment.xy_m[:, 0], deployment.xy_m[:, 1], deployment.bs_height_m
    )
    gain_incumbent = dish_gain(
        dish,
        wrap_180(pair.azimuth_at_incumbent_deg - incumbent.boresight_azimuth_deg),
        pair.elevation_deg - incumbent_boresight_el_deg,
    )
    loss = propagation_model.path_loss(pair, link_params.frequency_hz)
    el_at_sensor = -pair.elevation_deg

    if deployment.antenna_mode == "tri_sector":
        pat = sector_pattern or SectorPattern()
        boresights = np.asarray(deployment.sector_azimuths_deg, dtype=float)
        az_offsets = wrap_180(
            pair.azimuth_at_sensor_deg[:, None] - boresights[None, :]
        )
        gain_sensor = sector_gain(pat, az_offsets, el_at_sensor[:, None])
    else:
        pat = omni_pattern or OmniPattern()
        gain_sensor = omni_gain(pat, el_at_sensor)[:, None]

    p_rx = received_power(link_params, gain_incumbent[:, None], loss[:, None], gain_sensor)
    psd = to_psd(p_rx, link_params.bandwidth_hz, link_params.psd_sign_paper_literal)

    n_sites = deployment.n_sites
    if per_sector_fusion and deployment.antenna_mode == "tri_sector":
        site_of_sensor = np.repeat(np.arange(n_sites), psd.shape[1])
        return psd.reshape(-1), site_of_sensor
    return psd.max(axis=1), np.arange(n_sites)


def simulate_slots(
    deployment,
    incumbent,
    link_params,
    propagation_model,
    slot_model,
    rng,
    sector_pattern=None,
    omni_pattern=None,
    dish_pattern=None,
    incumbent_boresight_el_deg=0.0,
    per_sector_fusion=False,
    sensor_groups=None,
    store_indicators=False,
):
    """Simulate one drop's slot process and reduce it to SlotTrace(s).

    ``sensor_groups`` maps names to site-index arrays; every group is reduced
    from the same activity, noise, and duty draws (paired by construction),
    and a dict of traces is returned. Without groups a single trace over the
    full deployment is returned.

    Draw order is fixed: T activity uniforms, then per slot chunk the noise
    normals for active slots followed by the duty uniforms for active slots.
    """
    psd, site_of_sensor = static_sensor_psd(
        deployment,
        incumbent,
        link_params,
        propagation_model,
        sector_pattern=sector_pattern,
        omni_pattern=omni_pattern,
        dish_pattern=dish_pattern,
        incumbent_boresight_el_deg=incumbent_boresight_el_deg,
        per_sector_fusion=per_sector_fusion,
    )
    n_sensors = psd.shape[0]
    k = slot_model.fusion_k

    if sensor_groups is None:
        groups = {"all": np.arange(n_sensors)}
    else:
        groups = {}
        for name, site_idx in sensor_groups.items():
            site_idx = np.asarray(site_idx, dtype=int)
            groups[name] = np.flatnonzero(np.isin(site_of_sensor, site_idx))
    for name, idx in groups.items():
        if idx.size == 0:
            raise SensingError(f"sensor group {name!r} is empty")
        if k > idx.size:
            raise SensingError(
                f"fusion_k={k} exceeds the {idx.size} sensors of group {name!r}"
            )

    t_total = slot_model.num_slots
    sigma = link_params.noise_sigma_db
    gamma = link_params.threshold_dbm_per_mhz
    duty = slot_model.duty_cycle

    activity = rng.random(t_total) < slot_model.p_on
    static_ideal = psd >= gamma

    if store_indicators and int(activity.sum()) * n_sensors > 50_000_000:
        raise SensingError("indicator storage would exceed the memory guard")

    num_ideal = {g: np.zeros(t_total, dtype=np.int64) for g in groups}
    num_eff = {g: np.zeros(t_total, dtype=np.int64) for g in groups}
    kept_ideal = [] if store_indicators else None
    kept_sensing = [] if store_indicators else None

    for start in range(0, t_total, SLOT_CHUNK):
        stop = min(start + SLOT_CHUNK, t_total)
        on_rows = np.flatnonzero(activity[start:stop])
        n_on = on_rows.size
        if n_on == 0:
            continue
        if sigma > 0:
            noisy = psd[None, :] + sigma * rng.standard_normal((n_on, n_sensors))
            ideal = noisy >= gamma
        else:
            ideal = np.broadcast_to(static_ideal, (n_on, n_sensors))
        if duty < 1.0:
            sensing = rng.random((n_on, n_sensors)) < duty
            effective = ideal & sensing
        else:
            sensing = None
            effective = ideal
        slots = start + on_rows
        for g, idx in groups.items():
            num_ideal[g][slots] = ideal[:, idx].sum(axis=1)
            num_eff[g][slots] = effective[:, idx].sum(axis=1)
        if store_indicators:
            kept_ideal.append(np.array(ideal, dtype=bool))
            kept_sensing.append(
                sensing if sensing is not None
                else np.ones((n_on, n_sensors), dtype=bool)
            )

    def build(g):
        return SlotTrace(
            activity=activity,
            num_ideal=num_ideal[g],
            num_effective=num_eff[g],
            decision_ideal=num_ideal[g] >= k,
            decision=num_eff[g] >= k,
            n_sensors=int(groups[g].size),
            fusion_k=k,
            duty_cycle=duty,
            p_on=slot_model.p_on,
            ideal_matrix=(
                np.concatenate(kept_ideal)[:, groups[g]] if kept_ideal else None
            ),
            sensing_matrix=(
                np.concatenate(kept_sensing)[:, groups[g]] if kept_sensing else None
            ),
        )

    if sensor_groups is None:
        return build("all")
    return {g: build(g) for g in groups}
