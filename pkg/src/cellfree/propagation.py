"""Large-scale fading: three-slope COST-Hata path loss and shadow fading."""

import numpy as np
from dataclasses import dataclass


@dataclass(frozen=True)
class PathLossParams:
    """Three-slope COST-Hata parameters (suburban defaults).

    f_c_mhz : carrier frequency in MHz
    h_ap_m, h_t_m : AP and terminal heights in m
    d_r_km : reference distance for the fixed loss term
    d_i_km, d_o_km : inner/outer break distances of the three slopes
    """

    f_c_mhz: float = 1900.0
    h_ap_m: float = 15.0
    h_t_m: float = 1.5
    d_r_km: float = 1.0
    d_i_km: float = 0.01
    d_o_km: float = 0.05

    def __post_init__(self):
        if not (0 < self.d_i_km < self.d_o_km):
            raise ValueError("require 0 < d_i < d_o")
        if min(self.f_c_mhz, self.h_ap_m, self.h_t_m, self.d_r_km) <= 0:
            raise ValueError("frequency, heights and reference distance must be positive")

    @property
    def reference_loss_db(self):
        """Fixed loss L (dB) at the reference distance."""
        lf = np.log10(self.f_c_mhz)
        return (
            46.3
            + 33.9 * lf
            - 13.82 * np.log10(self.h_ap_m)
            - (1.1 * lf - 0.7) * self.h_t_m
            + 1.56 * lf
            - 0.8
        )


@dataclass(frozen=True)
class ShadowParams:
    """Shadow-fading model: none, uncorrelated, or spatially correlated.

    The correlated model is v = sqrt(delta)*a + sqrt(1-delta)*b with a per
    terminal and b per AP, both N(0, sigma_db^2) with normalized correlation
    2^(-d/d_u) over spatial separation d.
    """

    mode: str = "correlated"
    sigma_db: float = 8.0
    delta: float = 0.5
    decorrelation_km: float = 0.2

    def __post_init__(self):
        if self.mode not in ("none", "uncorrelated", "correlated"):
            raise ValueError(f"unknown shadow mode {self.mode!r}")
        if self.sigma_db < 0:
            raise ValueError("sigma_db must be >= 0")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.mode == "correlated" and not self.decorrelation_km > 0:
            raise ValueError("decorrelation_km must be > 0 for correlated shadowing")


@dataclass(frozen=True)
class LargeScale:
    """Per-antenna linear coefficients beta and their per-group sums."""

    beta: np.ndarray      # (n_antennas,)
    beta_bar: np.ndarray  # (n_groups,)

    def __post_init__(self):
        if np.any(self.beta <= 0):
            raise ValueError("all beta coefficients must be positive")


class CovarianceFactorizationError(RuntimeError):
    """Cholesky of the shadow covariance failed even after jitter."""


def path_loss_db(d, params=PathLossParams()):
    """Three-slope path loss in dB at distance d km (scalar or array).

    Constant for d <= d_i, slope 20 dB/decade up to d_o, then 35 dB/decade
    (effective exponent 3.5). d = 0 maps to the inner branch.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    L = params.reference_loss_db
    t1 = 15.0 * np.log10(params.d_o_km / params.d_r_km)
    inner = L + t1 + 20.0 * np.log10(params.d_i_km / params.d_r_km)
    with np.errstate(divide="ignore"):
        mid = L + t1 + 20.0 * np.log10(np.maximum(d, params.d_i_km) / params.d_r_km)
        outer = L + 35.0 * np.log10(np.maximum(d, params.d_i_km) / params.d_r_km)
    out = np.where(d <= params.d_i_km, inner, np.where(d <= params.d_o_km, mid, outer))
    return out if out.ndim else float(out)


def _correlation_chol(positions, sigma_db, d_u, jitter_rel=1e-10):
    """Lower Cholesky factor of sigma^2 * 2^(-d_ij/d_u) with jitter fallback."""
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    cov = sigma_db**2 * np.exp2(-dist / d_u)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    jitter = jitter_rel * sigma_db**2
    for _ in range(3):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(len(cov)))
        except np.linalg.LinAlgError:
            jitter *= 100.0
    raise CovarianceFactorizationError(
        f"shadow covariance not factorizable for {len(cov)} APs even with jitter"
    )


def shadow_fields(layout, terminals, params, rng):
    """Shadow losses in dB for every (terminal, AP) pair, shape (K, n_aps).

    mode none -> zeros. mode uncorrelated -> i.i.d. N(0, sigma^2). mode
    correlated -> v_km = sqrt(delta) a_k + sqrt(1-delta) b_m where the a and b
    fields are jointly Gaussian over terminal and AP positions respectively,
    each with covariance sigma^2 * 2^(-d/d_u).
    """
    terminals = np.atleast_2d(np.asarray(terminals, dtype=float))
    k, n = len(terminals), layout.n_aps
    if params.mode == "none" or params.sigma_db == 0:
        return np.zeros((k, n))
    if params.mode == "uncorrelated":
        return rng.normal(0.0, params.sigma_db, size=(k, n))
    chol_a = _correlation_chol(terminals, params.sigma_db, params.decorrelation_km)
    chol_b = _correlation_chol(layout.positions, params.sigma_db, params.decorrelation_km)
    a = chol_a @ rng.standard_normal(k)
    b = chol_b @ rng.standard_normal(n)
    return np.sqrt(params.delta) * a[:, None] + np.sqrt(1.0 - params.delta) * b[None, :]


def shadow_field(layout, terminal, params, rng):
    """Per-AP shadow losses v_m in dB for a single terminal."""
    return shadow_fields(layout, [terminal], params, rng)[0]


def large_scale(layout, terminal, pl_params, sh_params, grouping, rng):
    """Per-antenna beta and per-group beta_bar for one terminal.

    beta_m = 10^(-(PL(d_m) + v_m)/10) in linear scale; all antennas of an AP
    share the AP's beta. beta_bar_k sums beta over the antennas of group k.
    """
    v = shadow_field(layout, terminal, sh_params, rng)
    return large_scale_from_shadow(layout, terminal, pl_params, v, grouping)


def large_scale_from_shadow(layout, terminal, pl_params, shadow_db, grouping):
    """As :func:`large_scale` but with the shadow realization supplied."""
    if grouping.n_antennas != layout.n_antennas:
        raise ValueError("grouping does not cover the layout's antennas")
    d = np.linalg.norm(layout.positions - np.asarray(terminal, dtype=float), axis=1)
    loss_db = path_loss_db(d, pl_params) + shadow_db
    beta_ap = 10.0 ** (-np.asarray(loss_db) / 10.0)
    beta = np.repeat(beta_ap, layout.antennas_per_ap)
    beta_bar = np.bincount(grouping.assignment, weights=beta, minlength=grouping.n_groups)
    return LargeScale(beta=beta, beta_bar=beta_bar)
