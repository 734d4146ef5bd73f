"""Energy budget accounting and the heuristic pilot/data power split."""

import math

import numpy as np
from dataclasses import dataclass
from scipy import optimize

from .deployment import worst_position
from .propagation import path_loss_db
from .snr import lambda_ls


class BudgetExhaustedError(ValueError):
    """Pilot energy leaves nothing for the data phase."""


@dataclass(frozen=True)
class PowerPlan:
    """Per-coherence-interval power split: rho_p tau_p + rho_d (tau_c - tau_p) = E."""

    rho: float     # nominal normalized power
    energy: float  # E = rho * tau_c
    tau_p: int
    rho_p: float
    rho_d: float

    def __post_init__(self):
        if min(self.rho, self.energy, self.rho_p, self.rho_d) <= 0 or self.tau_p <= 0:
            raise ValueError("all powers and tau_p must be positive")
        tau_c = self.energy / self.rho
        spent = self.rho_p * self.tau_p + self.rho_d * (tau_c - self.tau_p)
        if not math.isclose(spent, self.energy, rel_tol=1e-9):
            raise ValueError(f"budget identity violated: {spent} != {self.energy}")


def uniform_plan(rho, tau_p, tau_c):
    """Equal pilot and data power: rho_p = rho_d = rho."""
    return PowerPlan(rho=rho, energy=rho * tau_c, tau_p=tau_p, rho_p=rho, rho_d=rho)


def data_power(energy, rho_p, tau_p, tau_c):
    """Data power implied by the budget: rho_d = (E - rho_p tau_p) / (tau_c - tau_p)."""
    if not 0 < tau_p < tau_c:
        raise ValueError("require 0 < tau_p < tau_c")
    if rho_p * tau_p >= energy:
        raise BudgetExhaustedError(
            f"pilot energy {rho_p * tau_p} exhausts the budget {energy}"
        )
    return (energy - rho_p * tau_p) / (tau_c - tau_p)


def path_loss_only_beta(layout, position, pl_params):
    """Total large-scale coefficient at a position, path loss only, all antennas."""
    d = np.linalg.norm(layout.positions - np.asarray(position, dtype=float), axis=1)
    return float(layout.antennas_per_ap * np.sum(10.0 ** (-path_loss_db(d, pl_params) / 10.0)))


def _lambda_of_pilot_power(rho_p, beta_w, energy, tau_p, tau_c, es):
    rho_d = (energy - rho_p * tau_p) / (tau_c - tau_p)
    return lambda_ls(beta_w, rho_p, tau_p, rho_d, es)


def optimal_pilot_power(beta_w, energy, tau_p, tau_c, es=1.0):
    """Pilot power minimizing lambda_ls under the budget identity.

    Setting the derivative to zero gives the quadratic
    c1 * tau_p * x^2 + 2 c0 * tau_p * x - c0 E = 0 with
    c0 = 1 + beta Es E / (tau_c - tau_p) and c1 = beta tau_p (1 - Es/(tau_c - tau_p)),
    whose positive root is the minimizer; a bracketed search is the fallback
    when the root leaves the feasible interval.
    """
    d = tau_c - tau_p
    c0 = 1.0 + beta_w * es * energy / d
    c1 = beta_w * tau_p * (1.0 - es / d)
    hi = energy / tau_p
    if abs(c1) > 1e-300:
        disc = (c0 * tau_p) ** 2 + c1 * tau_p * c0 * energy
        if disc >= 0:
            x = (-c0 * tau_p + math.sqrt(disc)) / (c1 * tau_p)
            if 0 < x < hi:
                return x
    else:
        x = energy / (2.0 * tau_p)
        if 0 < x < hi:
            return x
    res = optimize.minimize_scalar(
        _lambda_of_pilot_power,
        bounds=(hi * 1e-9, hi * (1 - 1e-9)),
        args=(beta_w, energy, tau_p, tau_c, es),
        method="bounded",
        options={"xatol": hi * 1e-12},
    )
    return float(res.x)


def optimize_pilot_power(layout, pl_params, rho, tau_p, tau_c, es=1.0, grid_resolution=None):
    """Heuristic pilot/data split performed without CSI at the APs.

    Finds the grid position furthest from the closest AP, computes its
    path-loss-only coefficient beta_w with all antennas as one group, and
    picks the pilot power minimizing lambda_ls for that coefficient. Neither
    assumption (single group, no shadowing) needs to hold for the plan to be
    useful; only AP locations enter.
    """
    t_w = worst_position(layout, grid_resolution=grid_resolution)
    beta_w = path_loss_only_beta(layout, t_w, pl_params)
    energy = rho * tau_c
    rho_p = optimal_pilot_power(beta_w, energy, tau_p, tau_c, es)
    rho_d = data_power(energy, rho_p, tau_p, tau_c)
    return PowerPlan(rho=rho, energy=energy, tau_p=tau_p, rho_p=rho_p, rho_d=rho_d)
