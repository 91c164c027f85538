import numpy as np

from fdsched import SystemConfig, draw_channels


def test_shapes_and_dtypes(chan):
    cfg = SystemConfig(m=7, k_u=4, k_d=2)
    ch = draw_channels(cfg, np.random.default_rng(0))
    assert ch.h_u_full.shape == (7, 4)
    assert ch.h_d_full.shape == (2, 7)
    assert ch.g.shape == (2, 4)
    assert ch.h_si_full.shape == (7, 7)
    for a in (ch.h_u_full, ch.h_d_full, ch.g, ch.h_si_full):
        assert np.iscomplexobj(a)
        assert np.all(np.isfinite(a))


def test_seed_determinism(chan):
    a = chan(123)
    b = chan(123)
    c = chan(124)
    assert np.array_equal(a.h_u_full, b.h_u_full)
    assert np.array_equal(a.h_si_full, b.h_si_full)
    assert not np.array_equal(a.h_u_full, c.h_u_full)


def test_fingerprint(chan):
    a = chan(5)
    assert len(a.fingerprint()) == 12
    int(a.fingerprint(), 16)  # hex
    assert a.fingerprint() == chan(5).fingerprint()
    assert a.fingerprint() != chan(6).fingerprint()


def test_user_distances_within_annulus(chan):
    cfg = SystemConfig(min_dist_m=10.0, cell_radius_m=40.0)
    for seed in range(20):
        ch = draw_channels(cfg, np.random.default_rng(seed))
        for budget in (ch.budget_u, ch.budget_d):
            assert np.all(budget.distance_m >= 10.0 - 1e-9)
            assert np.all(budget.distance_m <= 40.0 + 1e-9)


def test_budget_gain_formula(chan):
    ch = chan(7)
    b = ch.budget_u
    expect = 10.0 ** (-(b.pathloss_db + b.shadow_db) / 10.0)
    assert np.allclose(b.linear_gain(), expect, rtol=1e-12)


def test_si_rician_moments():
    # kappa = 1: mean sqrt(sigma2/2) per entry, fluctuation variance sigma2/2
    cfg = SystemConfig(m=40, kappa=1.0, sigma2_si_w=1e-10)
    draws = [draw_channels(cfg, np.random.default_rng(s)).h_si_full
             for s in range(30)]
    entries = np.concatenate([d.ravel() for d in draws])  # 48000 samples
    mean = entries.mean()
    expect_mean = np.sqrt(1e-10 / 2.0)
    assert abs(mean.real - expect_mean) < 0.02 * expect_mean
    assert abs(mean.imag) < 0.02 * expect_mean
    var = np.mean(np.abs(entries - entries.mean()) ** 2)
    assert abs(var - 1e-10 / 2.0) < 0.03 * 1e-10


def test_si_kappa_extremes():
    # large kappa: nearly deterministic mean matrix
    cfg = SystemConfig(m=10, kappa=1e6, sigma2_si_w=1e-10)
    ch = draw_channels(cfg, np.random.default_rng(0))
    expect = np.sqrt(1e-10 * 1e6 / (1 + 1e6))
    assert np.allclose(ch.h_si_full, expect, rtol=1e-2)
    # kappa = 0: zero-mean Rayleigh
    cfg0 = SystemConfig(m=40, kappa=0.0, sigma2_si_w=1e-10)
    ch0 = draw_channels(cfg0, np.random.default_rng(0))
    assert abs(ch0.h_si_full.mean()) < 3 * np.sqrt(1e-10 / 1600)


def test_u2u_links_always_nlos(chan):
    ch = chan(9)
    assert not ch.budget_u2u.los.any()
    assert ch.budget_u2u.distance_m.shape == (3, 3)
    assert np.all(ch.budget_u2u.distance_m >= 1.0)  # co-location guard


def test_channel_power_scales_with_pathloss():
    # shrink the cell: links shorten, average gain must grow
    near = SystemConfig(cell_radius_m=15.0, min_dist_m=10.0)
    far = SystemConfig(cell_radius_m=400.0, min_dist_m=300.0)
    pn = np.mean([np.mean(np.abs(draw_channels(near, np.random.default_rng(s)).h_u_full) ** 2)
                  for s in range(20)])
    pf = np.mean([np.mean(np.abs(draw_channels(far, np.random.default_rng(s)).h_u_full) ** 2)
                  for s in range(20)])
    assert pn > 10 * pf
