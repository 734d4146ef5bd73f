import numpy as np
import pytest

from cellfree.deployment import Region, place_ppp
from cellfree.harness import DEFAULT_RHO
from cellfree.power import (
    BudgetExhaustedError,
    PowerPlan,
    data_power,
    optimal_pilot_power,
    optimize_pilot_power,
    path_loss_only_beta,
    uniform_plan,
)
from cellfree.propagation import PathLossParams
from cellfree.snr import lambda_ls


def lambda_of(rho_p, beta, energy, tau_p, tau_c, es=1.0):
    rho_d = (energy - rho_p * tau_p) / (tau_c - tau_p)
    return lambda_ls(beta, rho_p, tau_p, rho_d, es)


def golden_section_min(f, lo, hi, tol=1e-12):
    # independent 1-D oracle for the pilot-power optimum
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol * (abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def test_uniform_split_is_identity():
    rho, tau_p, tau_c = 3.0, 5, 300
    assert data_power(rho * tau_c, rho, tau_p, tau_c) == pytest.approx(rho)


def test_data_power_boundary():
    energy, tau_p, tau_c = 100.0, 2, 300
    rho_p = (energy - 1e-9) / tau_p
    assert 0 < data_power(energy, rho_p, tau_p, tau_c) < 1e-10


def test_data_power_arithmetic_example():
    # E = 300 rho, tau_c = 300, tau_p = 1, rho_p = 100 rho -> rho_d = 200 rho / 299
    rho = 2.0
    assert data_power(300 * rho, 100 * rho, 1, 300) == pytest.approx(200 * rho / 299)


def test_budget_exhausted():
    with pytest.raises(BudgetExhaustedError):
        data_power(10.0, 5.0, 2, 300)
    with pytest.raises(ValueError):
        data_power(10.0, 1.0, 300, 300)


def test_plan_budget_identity_exact():
    for rho_p in (0.5, 1.0, 7.0):
        energy, tau_p, tau_c = 300.0, 3, 300
        rho_d = data_power(energy, rho_p, tau_p, tau_c)
        plan = PowerPlan(rho=1.0, energy=energy, tau_p=tau_p, rho_p=rho_p, rho_d=rho_d)
        assert plan.rho_p * tau_p + plan.rho_d * (tau_c - tau_p) == pytest.approx(
            energy, rel=1e-12
        )


def test_plan_validation_rejects_budget_violation():
    with pytest.raises(ValueError):
        PowerPlan(rho=1.0, energy=300.0, tau_p=1, rho_p=100.0, rho_d=1.0)


@pytest.mark.parametrize("beta,tau_p", [(1e-9, 1), (3e-10, 2), (5e-11, 4), (2e-8, 1)])
def test_optimal_pilot_power_matches_golden_section(beta, tau_p):
    rho, tau_c = DEFAULT_RHO, 300
    energy = rho * tau_c
    star = optimal_pilot_power(beta, energy, tau_p, tau_c)
    hi = energy / tau_p
    oracle = golden_section_min(
        lambda x: lambda_of(x, beta, energy, tau_p, tau_c), hi * 1e-9, hi * (1 - 1e-9)
    )
    assert star == pytest.approx(oracle, rel=1e-3)
    assert lambda_of(star, beta, energy, tau_p, tau_c) <= lambda_of(
        rho, beta, energy, tau_p, tau_c
    )


def test_lambda_unimodal_on_feasible_interval():
    beta, rho, tau_p, tau_c = 4e-10, DEFAULT_RHO, 1, 300
    energy = rho * tau_c
    grid = np.linspace(energy * 1e-6, energy * (1 - 1e-6), 4001)
    vals = np.array([lambda_of(x, beta, energy, tau_p, tau_c) for x in grid])
    m = int(np.argmin(vals))
    assert np.all(np.diff(vals[: m + 1]) <= 0)
    assert np.all(np.diff(vals[m:]) >= 0)
    star = optimal_pilot_power(beta, energy, tau_p, tau_c)
    assert abs(star - grid[m]) <= (grid[1] - grid[0]) * 2


def test_optimized_plan_on_default_scenario():
    rng = np.random.default_rng(0)
    layout = place_ppp(20.0, Region(2.5), rng)
    plan = optimize_pilot_power(layout, PathLossParams(), DEFAULT_RHO, 1, 300,
                                grid_resolution=0.05)
    # pilot power ends up considerably higher than data power
    assert plan.rho_p > plan.rho_d
    assert plan.rho_p * plan.tau_p + plan.rho_d * (300 - plan.tau_p) == pytest.approx(
        plan.energy, rel=1e-12
    )


def test_optimized_never_worse_than_uniform():
    # optimality against the uniform split, at the coefficient the heuristic used
    from cellfree.deployment import worst_position

    rng = np.random.default_rng(1)
    layout = place_ppp(20.0, Region(2.0), rng)
    pl = PathLossParams()
    rho, tau_c = DEFAULT_RHO, 300
    for tau_p in (1, 2, 4):
        plan = optimize_pilot_power(layout, pl, rho, tau_p, tau_c, grid_resolution=0.1)
        t_w = worst_position(layout, grid_resolution=0.1)
        beta_w = path_loss_only_beta(layout, t_w, pl)
        assert lambda_of(plan.rho_p, beta_w, rho * tau_c, tau_p, tau_c) <= lambda_of(
            rho, beta_w, rho * tau_c, tau_p, tau_c
        ) * (1 + 1e-9)


def test_path_loss_only_beta_counts_antennas():
    rng = np.random.default_rng(2)
    layout1 = place_ppp(10.0, Region(1.0), rng)
    from cellfree.deployment import NetworkLayout

    layout2 = NetworkLayout(layout1.positions, 3, "ppp", Region(1.0))
    pl = PathLossParams()
    assert path_loss_only_beta(layout2, (0, 0), pl) == pytest.approx(
        3 * path_loss_only_beta(layout1, (0, 0), pl)
    )


def test_uniform_plan_helper():
    plan = uniform_plan(2.0, 4, 300)
    assert plan.rho_p == plan.rho_d == 2.0
    assert plan.energy == 600.0
