import numpy as np
import pytest

from fdsched import (ChannelRealization, EvalCounter, Infeasible, ProblemSpec,
                     SelectionMask, SingularChannel, SystemConfig,
                     active_backend, draw_channels, evaluate_selection,
                     spectral_efficiency, zf_detector, zf_precoder)
from reference_impls import se_by_pinv


def _random_feasible(problem, rng, count):
    out = []
    while len(out) < count:
        bits = (rng.random(problem.n_bits) < 0.5).astype(np.uint8)
        if problem.feasible(bits):
            out.append(bits)
    return out


def test_matches_pinv_oracle_joint(chan):
    cfg = SystemConfig(k_min_u=0, k_min_d=0)
    pj = ProblemSpec.joint(cfg)
    rng = np.random.default_rng(42)
    for seed in range(5):
        ch = chan(seed, cfg)
        for bits in _random_feasible(pj, rng, 40):
            got = evaluate_selection(SelectionMask(pj, bits), ch, cfg)
            want = se_by_pinv(bits, pj, ch, cfg)
            assert got == pytest.approx(want, rel=1e-10), bits


def test_matches_pinv_oracle_user_only(chan):
    cfg = SystemConfig()
    pu = ProblemSpec.user_only(cfg, m_r=2)
    rng = np.random.default_rng(43)
    ch = chan(11, cfg)
    for bits in _random_feasible(pu, rng, 60):
        got = evaluate_selection(SelectionMask(pu, bits), ch, cfg)
        assert got == pytest.approx(se_by_pinv(bits, pu, ch, cfg), rel=1e-10)


def test_scalar_instance_closed_form():
    """M=2, one user each way: every quantity reduces to scalars.

    With recv antenna 0 and tx antenna 1: W = conj(h)/|h| (unit norm),
    DL SINR = p_d |h|^2 / (p_u |g|^2 + sigma_d^2),
    UL SINR = p_u |hu|^2 / (p_d |s|^2 + sigma^2) with s the SI scalar.
    """
    cfg = SystemConfig(m=2, k_u=1, k_d=1)
    hu = 0.3 - 0.4j       # uplink channel at the receive antenna
    h = 1.2 + 0.5j        # downlink channel from the transmit antenna
    gg = 0.05 + 0.02j     # user-to-user interference
    s = 2e-5 - 1e-5j      # SI path recv antenna 0 <- tx antenna 1
    ch = ChannelRealization(
        h_u_full=np.array([[hu], [0.9 + 0.1j]]),
        h_d_full=np.array([[0.7 - 0.2j, h]]),
        g=np.array([[gg]]),
        h_si_full=np.array([[3e-5 + 0j, s], [1e-5 + 0j, 2e-5 + 0j]]))
    pj = ProblemSpec.joint(cfg)
    bits = np.array([1, 1, 1, 0], dtype=np.uint8)  # antenna 0 recv, 1 tx

    gamma_d = cfg.p_d_w * abs(h) ** 2 / (cfg.p_u_w * abs(gg) ** 2 + cfg.sigma2_dl_w)
    gamma_u = cfg.p_u_w * abs(hu) ** 2 / (cfg.p_d_w * abs(s) ** 2 + cfg.sigma2_bs_w)
    want = np.log2(1 + gamma_u) + np.log2(1 + gamma_d)

    for backend in ("reference", "py", None):
        got = evaluate_selection(SelectionMask(pj, bits), ch, cfg,
                                 backend=backend)
        assert got == pytest.approx(float(want), rel=1e-12)


def test_backends_agree(chan):
    cfg = SystemConfig(m=10, k_u=4, k_d=4)
    ch = chan(3, cfg)
    pj = ProblemSpec.joint(cfg)
    rng = np.random.default_rng(7)
    backends = ["py", "reference"]
    if active_backend() == "ext":
        backends.append("ext")
    for bits in _random_feasible(pj, rng, 50):
        mask = SelectionMask(pj, bits)
        values = [evaluate_selection(mask, ch, cfg, backend=b)
                  for b in backends]
        assert max(values) - min(values) <= 1e-9 * max(abs(values[0]), 1.0)


def test_zf_precoder_properties():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n_d = rng.integers(1, 5)
        m_t = rng.integers(n_d, n_d + 4)
        h = (rng.standard_normal((n_d, m_t))
             + 1j * rng.standard_normal((n_d, m_t)))
        w = zf_precoder(h)
        assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)
        hw = h @ w
        off = hw - np.diag(np.diag(hw))
        assert np.max(np.abs(off)) < 1e-9 * np.max(np.abs(np.diag(hw)))


def test_zf_detector_properties():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n_u = rng.integers(1, 5)
        m_r = rng.integers(n_u, n_u + 4)
        h = (rng.standard_normal((m_r, n_u))
             + 1j * rng.standard_normal((m_r, n_u)))
        p = zf_detector(h)
        assert np.allclose(p @ h, np.eye(n_u), atol=1e-9)


def test_uplink_numerator_is_exactly_p_u(chan):
    # ZF removes inter-user terms: gamma_u * (si + noise) == p_u identically
    cfg = SystemConfig()
    ch = chan(5, cfg)
    pj = ProblemSpec.joint(cfg)
    bits = np.array([1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0], dtype=np.uint8)
    d = pj.decode(bits)
    hu = ch.h_u_full[np.ix_(d.recv_antennas, d.uplink_users)]
    p = zf_detector(hu)
    hd = ch.h_d_full[np.ix_(d.downlink_users, d.tx_antennas)]
    w = zf_precoder(hd)
    hsi = ch.h_si_full[np.ix_(d.recv_antennas, d.tx_antennas)]
    from fdsched import uplink_sinr
    for k in range(2):
        g = uplink_sinr(k, p, hsi, w, cfg)
        si = cfg.p_d_w * float(np.sum(np.abs(p[k] @ hsi @ w) ** 2))
        noise = cfg.sigma2_bs_w * float(np.sum(np.abs(p[k]) ** 2))
        assert g * (si + noise) == pytest.approx(cfg.p_u_w, rel=1e-12)


def test_spectral_efficiency_values():
    assert spectral_efficiency([1.0], [3.0]) == pytest.approx(3.0)  # log2 2 + log2 4
    assert spectral_efficiency([], [1.0]) == pytest.approx(1.0)
    assert spectral_efficiency([], []) == 0.0


def test_empty_sides(chan):
    cfg = SystemConfig(k_min_u=0, k_min_d=0)
    ch = chan(8, cfg)
    pj = ProblemSpec.joint(cfg)
    # uplink only: no SI because nothing transmits downlink
    ul_bits = np.array([1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0], dtype=np.uint8)
    se_ul = evaluate_selection(SelectionMask(pj, ul_bits), ch, cfg)
    assert se_ul == pytest.approx(se_by_pinv(ul_bits, pj, ch, cfg), rel=1e-10)
    # downlink only
    dl_bits = np.array([0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0], dtype=np.uint8)
    se_dl = evaluate_selection(SelectionMask(pj, dl_bits), ch, cfg)
    assert se_dl == pytest.approx(se_by_pinv(dl_bits, pj, ch, cfg), rel=1e-10)
    assert evaluate_selection(
        SelectionMask(pj, np.zeros(12, dtype=np.uint8)), ch, cfg) == 0.0


def test_infeasible_mask_raises_and_counts(chan):
    cfg = SystemConfig()
    ch = chan(1, cfg)
    pj = ProblemSpec.joint(cfg)
    counter = EvalCounter()
    bits = np.zeros(12, dtype=np.uint8)  # violates k_min floors
    with pytest.raises(Infeasible):
        evaluate_selection(SelectionMask(pj, bits), ch, cfg, counter)
    assert counter.infeasible == 1 and counter.feasible == 0
    assert counter.total == 1


def test_singular_channel_raises_and_counts(chan):
    cfg = SystemConfig()
    ch = chan(2, cfg)
    # duplicate downlink user rows make the DL Gram exactly rank deficient
    h_d = ch.h_d_full.copy()
    h_d[1] = h_d[0]
    bad = ChannelRealization(ch.h_u_full, h_d, ch.g, ch.h_si_full)
    pj = ProblemSpec.joint(cfg)
    bits = np.array([1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0], dtype=np.uint8)
    for backend in ("py", None, "reference"):
        counter = EvalCounter()
        with pytest.raises(SingularChannel):
            evaluate_selection(SelectionMask(pj, bits), bad, cfg, counter,
                               backend=backend)
        assert counter.singular == 1 and counter.total == 1


def test_counter_one_increment_per_call(chan):
    cfg = SystemConfig()
    ch = chan(4, cfg)
    pj = ProblemSpec.joint(cfg)
    counter = EvalCounter()
    rng = np.random.default_rng(9)
    calls = 0
    for bits in (rng.random((100, 12)) < 0.5).astype(np.uint8):
        calls += 1
        try:
            evaluate_selection(SelectionMask(pj, bits), ch, cfg, counter)
        except (Infeasible, SingularChannel):
            pass
        assert counter.total == calls


def test_counter_merge():
    a = EvalCounter(feasible=3, infeasible=2, singular=1)
    b = EvalCounter(feasible=10)
    a.merge(b)
    assert a.feasible == 13 and a.total == 16


def test_cond_cap_gates(chan):
    # near-parallel downlink rows pass a loose cap and trip a tight one
    cfg_loose = SystemConfig(cond_cap=1e12)
    ch = chan(6, cfg_loose)
    h_d = ch.h_d_full.copy()
    h_d[1] = h_d[0] * (1 + 1e-9) + 1e-9
    bad = ChannelRealization(ch.h_u_full, h_d, ch.g, ch.h_si_full)
    pj = ProblemSpec.joint(cfg_loose)
    bits = np.array([1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0], dtype=np.uint8)
    evaluate_selection(SelectionMask(pj, bits), bad, cfg_loose)  # passes
    cfg_tight = SystemConfig(cond_cap=1e4)
    with pytest.raises(SingularChannel):
        evaluate_selection(SelectionMask(ProblemSpec.joint(cfg_tight), bits),
                           bad, cfg_tight)
