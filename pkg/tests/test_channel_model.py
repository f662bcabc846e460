import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2d_auction.channel_model import (
    CellConfig,
    Topology,
    compute_gains,
    dbm_to_watt,
    generate_topology,
    realize,
    sample_disc,
    watt_to_dbm,
)


def test_default_cell():
    cfg = CellConfig()
    assert (cfg.cell_radius, cfg.num_cellular, cfg.bandwidth, cfg.noise_psd) == (350.0, 30, 180e3, -174.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(cell_radius=0),
        dict(num_cellular=0),
        dict(num_d2d=-1),
        dict(max_d2d_distance=0),
        dict(max_d2d_distance=701),
        dict(bandwidth=0),
    ],
)
def test_config_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        CellConfig(**kwargs)


def test_noise_power():
    # 10**(-20.4) * 1.8e5 evaluated to 30 digits with mpmath
    cfg = CellConfig()
    assert cfg.noise_power == pytest.approx(7.16592906996295e-16, rel=1e-12)
    assert watt_to_dbm(cfg.noise_power) == pytest.approx(-121.447, abs=1e-3)


def test_dbm_round_trip():
    assert dbm_to_watt(23) == pytest.approx(0.19953, rel=1e-4)
    assert watt_to_dbm(dbm_to_watt(17.0)) == pytest.approx(17.0)


def test_no_d2d_pairs():
    topo = generate_topology(CellConfig(num_d2d=0))
    assert topo.d2d_tx_positions.shape == (0, 2)
    assert topo.d2d_rx_positions.shape == (0, 2)
    gains = compute_gains(topo, CellConfig(num_d2d=0))
    assert gains.g_kd.shape == (30, 0)


def test_seed_determinism():
    cfg = CellConfig(rng_seed=42)
    t1, g1 = realize(cfg)
    t2, g2 = realize(cfg)
    np.testing.assert_array_equal(t1.d2d_rx_positions, t2.d2d_rx_positions)
    for name in ("g_ke", "g_de", "g_kd", "g_dd", "g_cross"):
        np.testing.assert_array_equal(getattr(g1, name), getattr(g2, name))


def test_positions_inside_cell_and_pairs_within_range():
    cfg = CellConfig(num_d2d=2000, max_d2d_distance=300.0)
    topo = generate_topology(cfg, np.random.default_rng(3))
    for pts in (topo.cellular_positions, topo.d2d_tx_positions, topo.d2d_rx_positions):
        assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= cfg.cell_radius + 1e-9)
    assert np.all(topo.d2d_distances() <= cfg.max_d2d_distance)


def test_pair_distance_distribution():
    # area-uniform disc of radius R: E[r] = 2R/3
    rng = np.random.default_rng(0)
    offsets = sample_disc(rng, 100_000, 50.0)
    r = np.hypot(offsets[:, 0], offsets[:, 1])
    assert r.max() <= 50.0
    assert r.mean() == pytest.approx(2 / 3 * 50.0, rel=0.02)


def test_pair_distance_distribution_through_topology():
    cfg = CellConfig(num_d2d=100_000, max_d2d_distance=50.0, num_cellular=1)
    d = generate_topology(cfg, np.random.default_rng(1)).d2d_distances()
    assert d.max() <= 50.0
    assert d.mean() == pytest.approx(2 / 3 * 50.0, rel=0.02)


def test_gain_formula():
    topo = Topology(
        cellular_positions=np.array([[100.0, 0.0]]),
        d2d_tx_positions=np.zeros((0, 2)),
        d2d_rx_positions=np.zeros((0, 2)),
    )

    class UnitFading:
        def exponential(self, size):
            return np.ones(size)

    gains = compute_gains(topo, CellConfig(num_cellular=1, num_d2d=0), UnitFading())
    assert gains.g_ke[0] == pytest.approx(1e-4)


def test_colocated_link_is_an_error():
    topo = Topology(
        cellular_positions=np.array([[10.0, 0.0]]),
        d2d_tx_positions=np.array([[5.0, 5.0]]),
        d2d_rx_positions=np.array([[5.0, 5.0]]),
    )
    with pytest.raises(ValueError, match="co-located"):
        compute_gains(topo, CellConfig(num_cellular=1, num_d2d=1))


def test_fading_has_unit_mean():
    cfg = CellConfig(num_cellular=1, num_d2d=0)
    topo = Topology(np.array([[1.0, 0.0]]), np.zeros((0, 2)), np.zeros((0, 2)))
    rng = np.random.default_rng(5)
    draws = np.array([compute_gains(topo, cfg, rng).g_ke[0] for _ in range(100_000)])
    assert 0.99 <= draws.mean() <= 1.01


def test_gains_positive_and_shapes():
    _, g = realize(CellConfig(num_cellular=7, num_d2d=4), np.random.default_rng(9))
    assert g.g_ke.shape == (7,) and g.g_kd.shape == (7, 4) and g.g_cross.shape == (4, 4)
    for arr in (g.g_ke, g.g_de, g.g_kd, g.g_dd, g.g_cross):
        assert np.all(arr > 0)
    np.testing.assert_array_equal(np.diag(g.g_cross), g.g_dd)
    assert g.sigma2 > 0


@settings(max_examples=50, deadline=None)
@given(
    d1=st.floats(1.0, 500.0),
    d2=st.floats(1.0, 500.0),
    h=st.floats(1e-3, 10.0),
)
def test_gain_decreasing_in_distance(d1, d2, h):
    if d1 == d2:
        return
    cfg = CellConfig(num_cellular=2, num_d2d=0)
    topo = Topology(np.array([[d1, 0.0], [0.0, d2]]), np.zeros((0, 2)), np.zeros((0, 2)))

    class Fixed:
        def exponential(self, size):
            return np.full(size, h)

    g = compute_gains(topo, cfg, Fixed()).g_ke
    assert (g[0] > g[1]) == (d1 < d2)
