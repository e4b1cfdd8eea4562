import math

import numpy as np
import pytest

from larsnet.link import (
    LinkBudgetParams,
    LinkError,
    apply_noise,
    evaluate_link,
    received_power,
    threshold_test,
    to_psd,
)
from larsnet.propagation import SPEED_OF_LIGHT_M_S, fspl

PARAMS = LinkBudgetParams()


def test_received_power_boresight_one_km():
    loss = fspl(1000.0, 7.25e9)
    p_rx = received_power(PARAMS, 33.1, loss, 15.4)
    # 63 - 33.1 + 33.1 - 109.65 + 15.4
    assert p_rx == pytest.approx(63.0 - loss + 15.4, abs=1e-12)
    assert p_rx == pytest.approx(-31.25, abs=0.02)


def test_received_power_back_lobe():
    loss = fspl(1000.0, 7.25e9)
    p_rx = received_power(PARAMS, 33.1 - 40.0, loss, 15.4)
    assert p_rx == pytest.approx(-31.25 - 40.0, abs=0.02)


def test_received_power_identity_reduction():
    assert received_power(PARAMS, 0.0, 0.0, 0.0) == PARAMS.eirp_max_dbm - 33.1


def test_psd_unit_bandwidth_identity():
    assert to_psd(-50.0, 1e6) == -50.0


def test_psd_thirty_mhz():
    psd = to_psd(-31.25, 30e6)
    assert psd == pytest.approx(-31.25 - 10.0 * math.log10(30.0), abs=1e-12)
    assert psd == pytest.approx(-46.02, abs=0.02)


def test_psd_round_trip():
    p_rx = -41.7
    psd = to_psd(p_rx, 30e6)
    assert psd + 10.0 * math.log10(30.0) == pytest.approx(p_rx, abs=1e-12)


def test_psd_paper_literal_sign_flag():
    assert to_psd(-31.25, 30e6, paper_literal_sign=True) == pytest.approx(
        -31.25 + 10.0 * math.log10(30.0), abs=1e-12
    )


def test_psd_rejects_nonpositive_bandwidth():
    with pytest.raises(LinkError):
        to_psd(-31.25, 0.0)
    with pytest.raises(LinkError):
        LinkBudgetParams(bandwidth_hz=-5.0)
    with pytest.raises(LinkError):
        LinkBudgetParams(bandwidth_hz=0.5e6)  # below the 1 MHz default minimum


def test_apply_noise_identity_at_zero_sigma():
    rng = np.random.default_rng(0)
    assert apply_noise(-46.0, 0.0, rng) == -46.0


def test_apply_noise_moments():
    rng = np.random.default_rng(4)
    noisy = apply_noise(np.full(1_000_000, -46.0), 3.0, rng)
    assert noisy.mean() == pytest.approx(-46.0, abs=0.01)
    assert 2.99 <= noisy.std() <= 3.01


def test_apply_noise_determinism():
    a = apply_noise(np.zeros(100), 3.0, np.random.default_rng(42))
    b = apply_noise(np.zeros(100), 3.0, np.random.default_rng(42))
    np.testing.assert_array_equal(a, b)


def test_threshold_examples():
    assert threshold_test(-46.02, -89.0) is True
    assert threshold_test(-89.0, -89.0) is True  # inclusive boundary
    assert threshold_test(-200.0, -89.0) is False


def test_threshold_monotone_in_path_loss():
    losses = np.linspace(80.0, 200.0, 200)
    above = [
        evaluate_link(PARAMS, 33.1, float(loss), 15.4).above_threshold for loss in losses
    ]
    # once detection is lost it never comes back as loss keeps growing
    flips = sum(1 for i in range(1, len(above)) if above[i] != above[i - 1])
    assert flips <= 1
    assert above[0] and not above[-1]


def test_db_domain_linearity():
    rng = np.random.default_rng(17)
    for _ in range(50):
        x = float(rng.uniform(0.1, 20.0))
        base = received_power(PARAMS, 10.0, 100.0, 5.0)
        boosted = received_power(
            LinkBudgetParams(eirp_max_dbm=PARAMS.eirp_max_dbm + x), 10.0, 100.0 - x, 5.0
        )
        assert boosted - base == pytest.approx(2 * x, abs=1e-9)


def test_detection_boundary_is_141_km():
    # solve FSPL(d*) = EIRP - 10log10(B/MHz) + sensor gain - threshold at boresight
    budget = 63.0 - 10.0 * math.log10(30.0) + 15.4 + 89.0
    d_star = 10.0 ** (budget / 20.0) * SPEED_OF_LIGHT_M_S / (4.0 * math.pi * 7.25e9)
    assert d_star == pytest.approx(141e3, rel=0.01)
    # every in-area sensor inside the dish mainlobe is above threshold, noise off
    max_in_area_slant = math.hypot(10000.0 * math.sqrt(2.0), 35.0)
    assert max_in_area_slant < d_star
    res = evaluate_link(PARAMS, 33.1, fspl(max_in_area_slant, 7.25e9), 15.4)
    assert res.above_threshold


def test_evaluate_link_consistency():
    res = evaluate_link(PARAMS, 33.1, fspl(1000.0, 7.25e9), 15.4)
    assert res.above_threshold == (res.psd_dbm_per_mhz >= PARAMS.threshold_dbm_per_mhz)
    assert res.psd_dbm_per_mhz == pytest.approx(res.rx_power_dbm - 10 * math.log10(30.0))
