"""Symbol-level simulation oracle.

Simulates actual pilot and OSTBC data transmission with per-antenna fading
and validates every closed form in :mod:`cellfree.snr`: the processed symbol
decomposes as shat_n = sqrt(rho_d) ||hhat||^2 s_n + eta_n + z_n and the
conditional moments of eta_n are measured by Monte Carlo. This module ships
with the library (not test-only code): the frozen expected values in the
test suite were produced by it.
"""

import numpy as np
from dataclasses import dataclass

from . import channel as chan
from . import ostbc as ost
from .snr import snr_ls_values


@dataclass(frozen=True)
class TrialRecord:
    """One full forward simulation with its noise decomposition."""

    h: np.ndarray
    h_hat: np.ndarray
    symbols: np.ndarray
    processed: np.ndarray  # shat_n
    eta: np.ndarray        # estimation-error noise, eta_bar + i eta_tilde
    z: np.ndarray          # additive noise, z_bar + i z_tilde
    estimate: chan.ChannelEstimate


def detect_symbols(code, h_hat, y):
    """Per-symbol detection shat_n = Re(hhat^H A_n^H y) + i Im(hhat^H B_n^H y)."""
    va = np.einsum("ntg,g->nt", code.a.conj(), h_hat.conj())  # (hhat^H A_n^H) rows
    vb = np.einsum("ntg,g->nt", code.b.conj(), h_hat.conj())
    return (va @ y).real + 1j * (vb @ y).imag


def run_trial(code, grouping, large_scale, rho_p, rho_d, tau_p, rng, es=1.0):
    """Full forward simulation of one coherence interval.

    Draws per-antenna small-scale fading g_m ~ CN(0,1) and aggregates the
    effective channel h_k = sum_{m in G_k} g_m sqrt(beta_m), runs the pilot
    phase and LS estimation, transmits a random symbol block through the
    code, and detects with the estimate. The record decomposes the processed
    symbols into signal, eta (estimation error), and z (noise) parts.
    """
    beta = np.asarray(large_scale.beta, dtype=float)
    g = (rng.standard_normal(beta.size) + 1j * rng.standard_normal(beta.size)) / np.sqrt(2.0)
    per_antenna = g * np.sqrt(beta)
    h = np.bincount(grouping.assignment, weights=per_antenna.real, minlength=grouping.n_groups)
    h = h + 1j * np.bincount(
        grouping.assignment, weights=per_antenna.imag, minlength=grouping.n_groups
    )

    pilot = chan.make_pilot_block(tau_p, code.n_groups, pilot_power=rho_p)
    estimate = chan.ls_estimate(h, pilot, large_scale.beta_bar, rng)
    h_hat = estimate.h_hat
    e = h_hat - h

    s = ost.draw_symbols(rng, code.n_symbols, es)
    x_d = ost.code_matrix(code, s)
    w = (rng.standard_normal(code.block_len) + 1j * rng.standard_normal(code.block_len)) / np.sqrt(2.0)
    y = np.sqrt(rho_d) * x_d @ h + w

    processed = detect_symbols(code, h_hat, y)
    va = np.einsum("ntg,g->nt", code.a.conj(), h_hat.conj())
    vb = np.einsum("ntg,g->nt", code.b.conj(), h_hat.conj())
    xe = x_d @ e
    eta = -np.sqrt(rho_d) * ((va @ xe).real + 1j * (vb @ xe).imag)
    z = (va @ w).real + 1j * (vb @ w).imag
    return TrialRecord(
        h=h, h_hat=h_hat, symbols=s, processed=processed, eta=eta, z=z, estimate=estimate
    )


@dataclass(frozen=True)
class ConditionalMoments:
    """MC estimates of E[s_n* eta_n | hhat]/Es and E[|eta_n|^2 | hhat]."""

    c_n: complex
    c_n_se: float
    eta_power: float
    eta_power_se: float
    n_draws: int


def conditional_eta_draws(code, n, estimate, rho_d, n_draws, rng, es=1.0):
    """Draw eta_n and the matching symbols under e | hhat ~ CN(U hhat, C_cond)."""
    h_hat = np.asarray(estimate.h_hat, dtype=complex)
    ng, ns = code.n_groups, code.n_symbols
    e = estimate.cond_gain * h_hat + np.sqrt(estimate.cond_cov / 2.0) * (
        rng.standard_normal((n_draws, ng)) + 1j * rng.standard_normal((n_draws, ng))
    )
    s = ost.draw_symbols(rng, (n_draws, ns), es)
    x_d = ost.code_matrix(code, s)
    xe = np.einsum("dtg,dg->dt", x_d, e)
    va = code.a[n] @ h_hat
    vb = code.b[n] @ h_hat
    eta = -np.sqrt(rho_d) * (
        np.einsum("t,dt->d", va.conj(), xe).real + 1j * np.einsum("t,dt->d", vb.conj(), xe).imag
    )
    return s[:, n], eta


def conditional_moments(code, n, estimate, rho_d, n_draws, rng, es=1.0):
    """Monte-Carlo conditional moments of eta_n given the estimate.

    Realizes the conditional law of the estimation error directly (orders
    faster than rejection on joint draws and exactly the same distribution).
    """
    if n_draws < 1000:
        raise ValueError("need at least 1e3 conditional draws")
    s_n, eta = conditional_eta_draws(code, n, estimate, rho_d, n_draws, rng, es)
    corr = np.conj(s_n) * eta / es
    c_n = complex(corr.mean())
    c_n_se = float(
        np.sqrt((corr.real.var(ddof=1) + corr.imag.var(ddof=1)) / n_draws)
    )
    p = np.abs(eta) ** 2
    return ConditionalMoments(
        c_n=c_n,
        c_n_se=c_n_se,
        eta_power=float(p.mean()),
        eta_power_se=float(p.std(ddof=1) / np.sqrt(n_draws)),
        n_draws=n_draws,
    )


class EmpiricalCdf:
    """Sorted samples with quantile and CDF accessors."""

    def __init__(self, samples):
        self.samples = np.sort(np.asarray(samples, dtype=float))

    def __len__(self):
        return self.samples.size

    def quantile(self, eps):
        return float(np.quantile(self.samples, eps, method="lower"))

    def coverage(self, gamma):
        """Empirical P(sample >= gamma)."""
        idx = np.searchsorted(self.samples, gamma, side="left")
        return 1.0 - idx / self.samples.size


def simulate_h_hat(beta_bar, rho_p, tau_p, n_trials, rng):
    """Draw LS estimates through the simulated pilot phase, batched.

    Runs the actual observation y_p = sqrt(rho_p) X_p h + w per trial and
    applies the LS formula, exercising the full pilot path rather than the
    equivalent hhat = h + CN(0, I/(rho_p tau_p)) shortcut.
    """
    beta_bar = np.asarray(beta_bar, dtype=float)
    ng = beta_bar.size
    pilot = chan.make_pilot_block(tau_p, ng, pilot_power=rho_p)
    h = chan.draw_effective_channel(beta_bar, rng, size=n_trials)
    w = (
        rng.standard_normal((n_trials, tau_p)) + 1j * rng.standard_normal((n_trials, tau_p))
    ) / np.sqrt(2.0)
    y = np.sqrt(rho_p) * np.einsum("tg,dg->dt", pilot.x_p, h) + w
    h_hat = np.einsum("tg,dt->dg", pilot.x_p.conj(), y) / (np.sqrt(rho_p) * tau_p)
    return h, h_hat


def empirical_snr_cdf(code, beta_bar, rho_p, rho_d, tau_p, n_trials, rng,
                      es=1.0, csi="ls", symbol_index=0):
    """Empirical per-symbol SNR distribution over small-scale randomness.

    csi="perfect" draws h and evaluates rho_d Es ||h||^2. csi="ls" simulates
    the pilot phase per trial and evaluates the conditional LS SNR at the
    resulting estimate.
    """
    if n_trials < 1000:
        raise ValueError("need at least 1e3 trials")
    beta_bar = np.asarray(beta_bar, dtype=float)
    if csi == "perfect":
        h = chan.draw_effective_channel(beta_bar, rng, size=n_trials)
        return EmpiricalCdf(rho_d * es * np.sum(np.abs(h) ** 2, axis=-1))
    _, h_hat = simulate_h_hat(beta_bar, rho_p, tau_p, n_trials, rng)
    _, u, cc = chan.conditional_error_stats(beta_bar, rho_p, tau_p)
    return EmpiricalCdf(snr_ls_values(code, symbol_index, h_hat, u, cc, rho_d, es))


def check_corollary1(seed, n_trials=100_000, beta_bar=2e-10, rho=None, tau_p=1):
    """KS test of simulated single-group LS SNR against Exp(lambda_ls).

    The estimates come from the simulated pilot path; the closed-form rate
    is the single-group value at the same parameters.
    """
    from scipy import stats

    from .snr import lambda_ls

    if rho is None:
        from .harness import DEFAULT_RHO

        rho = DEFAULT_RHO
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    code = ost.single_group()
    cdf = empirical_snr_cdf(code, [beta_bar], rho, rho, tau_p, n_trials, rng)
    lam = lambda_ls(beta_bar, rho, tau_p, rho, 1.0)
    res = stats.kstest(cdf.samples, "expon", args=(0.0, 1.0 / lam))
    return {
        "statistic": float(res.statistic),
        "pvalue": float(res.pvalue),
        "lambda_ls": lam,
        "n_trials": n_trials,
        "ok": bool(res.pvalue > 0.01),
    }


def check_hyperexp(seed, n_trials=100_000, beta_bar=(1e-10, 2.3e-10, 0.7e-10), rho=None,
                   n_gammas=20):
    """Perfect-CSI SNR draws vs the hyperexponential coverage formula.

    Compares empirical coverage with the partial-fraction expression at a
    gamma grid spanning the distribution; every point must fall within three
    binomial standard errors.
    """
    from .metrics import coverage_perfect
    from .snr import lambda_perfect

    if rho is None:
        from .harness import DEFAULT_RHO

        rho = DEFAULT_RHO
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    beta_bar = np.asarray(beta_bar, dtype=float)
    cdf = empirical_snr_cdf(None, beta_bar, rho, rho, 0, n_trials, rng, csi="perfect")
    lam = lambda_perfect(beta_bar, rho)
    gammas = np.quantile(cdf.samples, np.linspace(0.02, 0.98, n_gammas))
    worst = 0.0
    for g in gammas:
        p = coverage_perfect(g, lam)
        se = np.sqrt(max(p * (1.0 - p), 1e-12) / n_trials)
        worst = max(worst, abs(cdf.coverage(g) - p) / se)
    return {"max_dev_se": float(worst), "n_gammas": n_gammas, "n_trials": n_trials,
            "ok": bool(worst < 3.0)}


def check_theorem1(seed, n_configs=20, n_draws=100_000, codes=("alamouti", "rate34")):
    """Conditional-MC moments vs the general-OSTBC closed forms.

    Per code, draws n_configs random (beta_bar, hhat, power) configurations
    and requires that both c_n and the eta power match within three standard
    errors in at least 19 of 20 configurations.
    """
    from . import snr as snrmod

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    out = {"ok": True, "codes": {}}
    for name in codes:
        code = ost.by_name(name)
        ng = code.n_groups
        n_pass = 0
        for _ in range(n_configs):
            beta_bar = rng.uniform(0.2, 3.0, ng)
            rho_p = rng.uniform(0.3, 4.0)
            rho_d = rng.uniform(0.3, 4.0)
            tau_p = ng
            _, u, cc = chan.conditional_error_stats(beta_bar, rho_p, tau_p)
            c_e = 1.0 / (rho_p * tau_p)
            h_hat = np.sqrt((beta_bar + c_e) / 2.0) * (
                rng.standard_normal(ng) + 1j * rng.standard_normal(ng)
            )
            est = chan.ChannelEstimate(h_hat=h_hat, error_var=c_e, cond_gain=u, cond_cov=cc)
            n = int(rng.integers(code.n_symbols))
            terms = snrmod.conditional_snr_terms(code, n, est, rho_d)
            mc = conditional_moments(code, n, est, rho_d, n_draws, rng)
            ok_c = abs(mc.c_n - terms.c_n) <= 3.0 * mc.c_n_se
            ok_p = abs(mc.eta_power - terms.eta_power) <= 3.0 * mc.eta_power_se
            n_pass += ok_c and ok_p
        out["codes"][name] = {"n_pass": n_pass, "n_configs": n_configs}
        out["ok"] = out["ok"] and n_pass >= n_configs - 1
    return out


def mrc_empirical_sinr(code, n, estimates, rho_d, n_draws, rng, es=1.0):
    """Empirical post-combining SINR for multiple receive branches.

    Conditioned on the per-branch estimates, draws shared symbols with
    independent per-branch estimation error and noise, forms each branch's
    processed symbol, combines with conjugate-gain/noise-variance weights,
    and measures |E[shat s*]|^2 Es / (Es E[|shat|^2] - |E[shat s*]|^2).
    """
    s = ost.draw_symbols(rng, (n_draws, code.n_symbols), es)
    x_d = ost.code_matrix(code, s)
    combined = np.zeros(n_draws, dtype=complex)
    for est in estimates:
        h_hat = est.h_hat
        e = est.cond_gain * h_hat + np.sqrt(est.cond_cov / 2.0) * (
            rng.standard_normal((n_draws, code.n_groups))
            + 1j * rng.standard_normal((n_draws, code.n_groups))
        )
        w = (
            rng.standard_normal((n_draws, code.block_len))
            + 1j * rng.standard_normal((n_draws, code.block_len))
        ) / np.sqrt(2.0)
        xe = np.einsum("dtg,dg->dt", x_d, e)
        va = code.a[n] @ h_hat
        vb = code.b[n] @ h_hat
        eta = -np.sqrt(rho_d) * (
            np.einsum("t,dt->d", va.conj(), xe).real
            + 1j * np.einsum("t,dt->d", vb.conj(), xe).imag
        )
        z = np.einsum("t,dt->d", va.conj(), w).real + 1j * np.einsum(
            "t,dt->d", vb.conj(), w
        ).imag
        hh2 = float(np.sum(np.abs(h_hat) ** 2))
        shat = np.sqrt(rho_d) * hh2 * s[:, n] + eta + z
        # branch gain and uncorrelated-noise power from the closed form
        corr = np.conj(s[:, n]) * eta / es
        c_n = corr.mean()
        gain = np.sqrt(rho_d) * hh2 + c_n
        noise_var = np.mean(np.abs(shat - gain * s[:, n]) ** 2)
        combined += np.conj(gain) / noise_var * shat
    corr = np.mean(np.conj(s[:, n]) * combined) / es
    power = np.mean(np.abs(combined) ** 2)
    return float(abs(corr) ** 2 * es / (power - es * abs(corr) ** 2))
