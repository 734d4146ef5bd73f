"""Effective channels, downlink pilots, and LS estimation.

The effective channel h is CN(0, C_h) with C_h = diag(beta_bar). The LS
estimate from the pilot block is hhat = h + e with e ~ CN(0, I/(rho_p tau_p));
conditioning on hhat gives e | hhat ~ CN(U_cond hhat, C_cond). All covariance
algebra stays on the diagonals since C_h and C_e are diagonal by construction.
"""

import numpy as np
from dataclasses import dataclass


@dataclass(frozen=True)
class EffectiveChannel:
    """One realization of the per-group effective channel."""

    h: np.ndarray         # (n_groups,) complex
    cov_diag: np.ndarray  # beta_bar, the diagonal of C_h


@dataclass(frozen=True)
class PilotBlock:
    """tau_p x n_groups pilot matrix with X_p^H X_p = tau_p I, plus pilot power."""

    x_p: np.ndarray
    pilot_power: float

    def __post_init__(self):
        if self.pilot_power <= 0:
            raise ValueError("pilot_power must be > 0")
        gram = self.x_p.conj().T @ self.x_p
        if np.abs(gram - self.tau_p * np.eye(self.n_groups)).max() > 1e-10:
            raise ValueError("pilot columns are not orthogonal with norm^2 = tau_p")

    @property
    def tau_p(self):
        return self.x_p.shape[0]

    @property
    def n_groups(self):
        return self.x_p.shape[1]


@dataclass(frozen=True)
class ChannelEstimate:
    """LS estimate with its conditional error statistics (all diagonal).

    error_var : scalar diagonal of C_e = I/(rho_p tau_p)
    cond_gain : diagonal of U_cond = C_e (C_e + C_h)^-1, entries in (0, 1)
    cond_cov  : diagonal of C_cond = (C_e^-1 + C_h^-1)^-1
    """

    h_hat: np.ndarray
    error_var: float
    cond_gain: np.ndarray
    cond_cov: np.ndarray

    @property
    def n_groups(self):
        return self.h_hat.shape[-1]


def draw_effective_channel(beta_bar, rng, size=None):
    """Draw h with independent CN(0, beta_bar_k) components.

    size, when given, prepends batch axes: returned h has shape (*size, n_groups).
    """
    beta_bar = np.asarray(beta_bar, dtype=float)
    if np.any(beta_bar <= 0):
        raise ValueError("beta_bar entries must be positive")
    shape = beta_bar.shape if size is None else (*np.atleast_1d(size), *beta_bar.shape)
    h = np.sqrt(beta_bar / 2.0) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    if size is None:
        return EffectiveChannel(h=h, cov_diag=beta_bar)
    return h


def make_pilot_block(tau_p, n_groups, pilot_power=1.0):
    """Pilot block from the first n_groups columns of the tau_p-point DFT.

    All entries have unit modulus (constant per-AP pilot power) and the
    columns are exactly orthogonal with squared norm tau_p.
    """
    if tau_p < n_groups:
        raise ValueError(f"tau_p = {tau_p} cannot carry {n_groups} orthogonal pilot sequences")
    t = np.arange(tau_p)[:, None]
    k = np.arange(n_groups)[None, :]
    x_p = np.exp(-2j * np.pi * t * k / tau_p)
    return PilotBlock(x_p=x_p, pilot_power=pilot_power)


def conditional_error_stats(beta_bar, rho_p, tau_p):
    """(error_var, cond_gain, cond_cov) diagonals for given pilot energy."""
    if rho_p <= 0 or tau_p <= 0:
        raise ValueError("pilot power and length must be positive")
    beta_bar = np.asarray(beta_bar, dtype=float)
    c_e = 1.0 / (rho_p * tau_p)
    cond_gain = c_e / (c_e + beta_bar)
    cond_cov = 1.0 / (1.0 / c_e + 1.0 / beta_bar)
    return c_e, cond_gain, cond_cov


def ls_estimate_from_obs(y_p, pilot, beta_bar):
    """LS estimate from a pilot observation y_p = sqrt(rho_p) X_p h + w.

    hhat = (sqrt(rho_p) X_p^H X_p)^-1 X_p^H y_p = h + X_p^H w / (sqrt(rho_p) tau_p).
    """
    rho_p, tau_p = pilot.pilot_power, pilot.tau_p
    h_hat = (pilot.x_p.conj().T @ y_p) / (np.sqrt(rho_p) * tau_p)
    c_e, u, c = conditional_error_stats(beta_bar, rho_p, tau_p)
    return ChannelEstimate(h_hat=h_hat, error_var=c_e, cond_gain=u, cond_cov=c)


def ls_estimate(h, pilot, beta_bar, rng):
    """Simulate the pilot phase for channel h and return the LS estimate."""
    w = (rng.standard_normal(pilot.tau_p) + 1j * rng.standard_normal(pilot.tau_p)) / np.sqrt(2.0)
    y_p = np.sqrt(pilot.pilot_power) * pilot.x_p @ h + w
    return ls_estimate_from_obs(y_p, pilot, beta_bar)


def estimate_energy_law(beta_bar, pilot):
    """Exponential rate of |hhat|^2 in the single-group case.

    |hhat|^2 ~ Exp(rho_p tau_p / (rho_p tau_p beta_bar + 1)) when N_g = 1.
    """
    beta_bar = np.asarray(beta_bar, dtype=float)
    if beta_bar.size != 1 or pilot.n_groups != 1:
        raise ValueError("estimate_energy_law only applies to the single-group case")
    energy = pilot.pilot_power * pilot.tau_p
    return float(energy / (energy * beta_bar.reshape(()) + 1.0))
