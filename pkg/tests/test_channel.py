import numpy as np
import pytest
from scipy import stats

from cellfree.channel import (
    ChannelEstimate,
    conditional_error_stats,
    draw_effective_channel,
    estimate_energy_law,
    ls_estimate,
    ls_estimate_from_obs,
    make_pilot_block,
)


def test_effective_channel_covariance_identity():
    rng = np.random.default_rng(0)
    h = draw_effective_channel(np.array([1.0, 1.0]), rng, size=100_000)
    emp = (h.conj().T @ h) / len(h)
    se = 1.0 / np.sqrt(len(h))
    assert abs(emp[0, 0].real - 1.0) < 3 * se
    assert abs(emp[1, 1].real - 1.0) < 3 * se
    assert abs(emp[0, 1]) < 3 * se


def test_effective_channel_zero_mean():
    rng = np.random.default_rng(1)
    h = draw_effective_channel(np.array([2.0]), rng, size=100_000)
    assert abs(h.mean()) < 4 * np.sqrt(2.0 / len(h))


def test_effective_channel_scalar_draw():
    rng = np.random.default_rng(2)
    ec = draw_effective_channel(np.array([0.5, 1.5]), rng)
    assert ec.h.shape == (2,)
    assert np.array_equal(ec.cov_diag, [0.5, 1.5])


def test_nonpositive_beta_rejected():
    with pytest.raises(ValueError):
        draw_effective_channel(np.array([0.0]), np.random.default_rng(0))


def test_per_antenna_sum_matches_group_draw():
    # summing per-AP CN(0, beta_m) inside a group equals drawing CN(0, beta_bar)
    rng = np.random.default_rng(3)
    beta = np.array([0.5, 1.2, 0.3])
    n = 100_000
    g = (rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))) / np.sqrt(2)
    summed = (g * np.sqrt(beta)).sum(axis=1)
    direct = draw_effective_channel(np.array([beta.sum()]), rng, size=n)[:, 0]
    res = stats.ks_2samp(np.abs(summed) ** 2, np.abs(direct) ** 2)
    assert res.pvalue > 0.01


def test_pilot_block_scalar():
    pb = make_pilot_block(1, 1)
    assert np.array_equal(pb.x_p, [[1.0 + 0.0j]])


def test_pilot_block_two_by_two_exact():
    pb = make_pilot_block(2, 2)
    assert np.abs(pb.x_p.conj().T @ pb.x_p - 2.0 * np.eye(2)).max() < 1e-12


def test_pilot_block_tall():
    pb = make_pilot_block(4, 2)
    assert np.abs(pb.x_p.conj().T @ pb.x_p - 4.0 * np.eye(2)).max() < 1e-12


def test_pilot_block_unit_modulus_entries():
    pb = make_pilot_block(7, 3)
    assert np.abs(np.abs(pb.x_p) - 1.0).max() < 1e-12


def test_pilot_block_infeasible():
    with pytest.raises(ValueError):
        make_pilot_block(1, 2)


def test_ls_near_noiseless():
    rng = np.random.default_rng(4)
    beta_bar = np.array([1.0, 2.0])
    h = draw_effective_channel(beta_bar, rng).h
    pilot = make_pilot_block(2, 2, pilot_power=1e12 / 2)
    est = ls_estimate(h, pilot, beta_bar, rng)
    assert np.linalg.norm(est.h_hat - h) < 1e-3


def test_single_group_conditional_stats():
    # U = 1/(1 + rho tau beta), C = beta/(1 + rho tau beta)
    rho_p, tau_p, beta = 2.0, 3.0, 0.7
    _, u, c = conditional_error_stats(np.array([beta]), rho_p, tau_p)
    denom = 1.0 + rho_p * tau_p * beta
    assert u[0] == pytest.approx(1.0 / denom, rel=1e-12)
    assert c[0] == pytest.approx(beta / denom, rel=1e-12)


def test_conditional_stats_two_way_algebra():
    rng = np.random.default_rng(5)
    beta_bar = rng.uniform(0.1, 3.0, 4)
    rho_p, tau_p = 1.7, 4
    c_e, u, c = conditional_error_stats(beta_bar, rho_p, tau_p)
    ce_mat = c_e * np.eye(4)
    ch_mat = np.diag(beta_bar)
    u_mat = ce_mat @ np.linalg.inv(ce_mat + ch_mat)
    c_mat = np.linalg.inv(np.linalg.inv(ce_mat) + np.linalg.inv(ch_mat))
    assert np.abs(np.diag(u_mat) - u).max() < 1e-12
    assert np.abs(np.diag(c_mat) - c).max() < 1e-12
    assert np.all((u > 0) & (u < 1))


def test_error_regression_recovers_cond_gain():
    # E[e | hhat] = U hhat: complex regression slope of e on hhat is U
    rng = np.random.default_rng(6)
    beta, rho_p, tau_p = 1.0, 1.0, 1
    pilot = make_pilot_block(tau_p, 1, pilot_power=rho_p)
    n = 100_000
    slopes_num = slopes_den = 0.0
    h = draw_effective_channel(np.array([beta]), rng, size=n)[:, 0]
    w = (rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1))) / np.sqrt(2)
    h_hat = h + (w @ pilot.x_p.conj())[:, 0] / (np.sqrt(rho_p) * tau_p)
    e = h_hat - h
    slope = np.vdot(h_hat, e) / np.vdot(h_hat, h_hat)
    _, u, _ = conditional_error_stats(np.array([beta]), rho_p, tau_p)
    assert abs(slope - u[0]) < 0.02 * u[0]


def test_estimate_marginal_covariance():
    rng = np.random.default_rng(7)
    beta_bar = np.array([0.8, 1.6])
    rho_p, tau_p = 0.9, 2
    pilot = make_pilot_block(tau_p, 2, pilot_power=rho_p)
    n = 50_000
    hh = np.empty((n, 2), dtype=complex)
    for i in range(n // 1000):
        for j in range(1000):
            k = i * 1000 + j
            h = draw_effective_channel(beta_bar, rng).h
            hh[k] = ls_estimate(h, pilot, beta_bar, rng).h_hat
    var = np.mean(np.abs(hh) ** 2, axis=0)
    target = beta_bar + 1.0 / (rho_p * tau_p)
    assert np.abs(var - target).max() < 4 * target.max() / np.sqrt(n)


def test_pilot_path_identity_exact():
    rng = np.random.default_rng(8)
    beta_bar = np.array([1.0, 0.5, 2.0])
    rho_p, tau_p = 1.3, 5
    pilot = make_pilot_block(tau_p, 3, pilot_power=rho_p)
    h = draw_effective_channel(beta_bar, rng).h
    w = (rng.standard_normal(tau_p) + 1j * rng.standard_normal(tau_p)) / np.sqrt(2)
    y = np.sqrt(rho_p) * pilot.x_p @ h + w
    est = ls_estimate_from_obs(y, pilot, beta_bar)
    expected = h + pilot.x_p.conj().T @ w / (np.sqrt(rho_p) * tau_p)
    assert np.abs(est.h_hat - expected).max() < 1e-12


def test_energy_law_unit_parameters():
    pilot = make_pilot_block(1, 1, pilot_power=1.0)
    assert estimate_energy_law(np.array([1.0]), pilot) == pytest.approx(0.5)


def test_energy_law_high_energy_limit():
    pilot = make_pilot_block(1, 1, pilot_power=1e9)
    rate = estimate_energy_law(np.array([2.0]), pilot)
    assert rate == pytest.approx(0.5, rel=1e-6)


def test_energy_law_distribution():
    rng = np.random.default_rng(9)
    beta, rho_p, tau_p = 1.5, 2.0, 3
    pilot = make_pilot_block(tau_p, 1, pilot_power=rho_p)
    n = 100_000
    h = draw_effective_channel(np.array([beta]), rng, size=n)[:, 0]
    w = (rng.standard_normal((n, tau_p)) + 1j * rng.standard_normal((n, tau_p))) / np.sqrt(2)
    h_hat = h + (w @ pilot.x_p.conj())[:, 0] / (np.sqrt(rho_p) * tau_p)
    rate = estimate_energy_law(np.array([beta]), pilot)
    res = stats.kstest(np.abs(h_hat) ** 2, "expon", args=(0, 1.0 / rate))
    assert res.pvalue > 0.01


def test_energy_law_multi_group_unsupported():
    pilot = make_pilot_block(2, 2)
    with pytest.raises(ValueError):
        estimate_energy_law(np.array([1.0, 2.0]), pilot)


def test_estimate_invariants():
    _, u, c = conditional_error_stats(np.array([1.0, 4.0]), 2.0, 2)
    est = ChannelEstimate(h_hat=np.zeros(2, dtype=complex), error_var=0.25,
                          cond_gain=u, cond_cov=c)
    assert est.n_groups == 2
    assert np.all(est.cond_cov > 0)
