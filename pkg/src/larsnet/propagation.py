"""
Path-loss models behind a pluggable interface.

Free-space is the mandatory model. A log-distance stand-in with optional
log-normal shadowing exercises the plug-in surface; terrain-aware models can
be registered by identifier without touching the callers.
"""

import numpy as np

SPEED_OF_LIGHT_M_S = 299792458.0


class PropagationError(ValueError):
    pass


def fspl(distance_m, frequency_hz):
    """Free-space path loss in dB: 20*log10(4*pi*d*f/c). Accepts arrays."""
    d = np.asarray(distance_m, dtype=float)
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(d <= 0):
        raise PropagationError("distance_m must be positive")
    if np.any(f <= 0):
        raise PropagationError("frequency_hz must be positive")
    loss = 20.0 * np.log10(4.0 * np.pi * d * f / SPEED_OF_LIGHT_M_S)
    if np.ndim(distance_m) == 0 and np.ndim(frequency_hz) == 0:
        return float(loss)
    return loss


def log_distance_stand_in(distance_m, frequency_hz, exponent, shadowing_sigma_db, rng=None):
    """Log-distance loss anchored to FSPL at 1 m, plus optional shadowing.

    With exponent 2 and zero sigma this reduces exactly to :func:`fspl`.
    """
    if exponent < 2.0:
        raise PropagationError("path-loss exponent must be >= 2")
    if shadowing_sigma_db < 0.0:
        raise PropagationError("shadowing sigma must be >= 0")
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise PropagationError("distance_m must be positive")
    loss = fspl(1.0, frequency_hz) + 10.0 * exponent * np.log10(d)
    if shadowing_sigma_db > 0.0:
        if rng is None:
            raise PropagationError("shadowing requires an explicit random stream")
        loss = loss + rng.normal(0.0, shadowing_sigma_db, size=np.shape(d))
    if np.ndim(distance_m) == 0:
        return float(loss)
    return loss


class PropagationModel:
    """Interface: ``path_loss(pair, frequency_hz) -> loss_db`` plus an id string."""

    model_id = "abstract"

    def path_loss(self, pair, frequency_hz):
        raise NotImplementedError


class FreeSpaceModel(PropagationModel):
    """FSPL over the slant (3D) distance of the pair."""

    model_id = "fspl"

    def path_loss(self, pair, frequency_hz):
        return fspl(pair.slant_distance_m, frequency_hz)


class LogDistanceModel(PropagationModel):
    """Log-distance stand-in; holds its own shadowing stream for reentrancy."""

    model_id = "log_distance"

    def __init__(self, exponent=2.0, shadowing_sigma_db=0.0, rng=None):
        if exponent < 2.0:
            raise PropagationError("path-loss exponent must be >= 2")
        if shadowing_sigma_db < 0.0:
            raise PropagationError("shadowing sigma must be >= 0")
        self.exponent = exponent
        self.shadowing_sigma_db = shadowing_sigma_db
        self.rng = rng

    def path_loss(self, pair, frequency_hz):
        return log_distance_stand_in(
            pair.slant_distance_m,
            frequency_hz,
            self.exponent,
            self.shadowing_sigma_db,
            self.rng,
        )


_REGISTRY = {}


def register_model(model_id, factory):
    """Register a model factory: ``factory(params: dict, rng) -> PropagationModel``."""
    _REGISTRY[model_id] = factory


def build_model(model_id, params=None, rng=None):
    """Instantiate a registered propagation model by identifier."""
    params = dict(params or {})
    if model_id not in _REGISTRY:
        known = ", ".join(sorted(_REGISTRY))
        raise PropagationError(f"unknown propagation model {model_id!r} (known: {known})")
    return _REGISTRY[model_id](params, rng)


register_model("fspl", lambda params, rng: FreeSpaceModel())
register_model(
    "log_distance",
    lambda params, rng: LogDistanceModel(
        exponent=params.get("exponent", 2.0),
        shadowing_sigma_db=params.get("shadowing_sigma_db", 0.0),
        rng=rng,
    ),
)
