"""Metropolis-Hastings sampling of a network's predictive posterior.

A chain walks in the prior's parameter space with symmetric blockwise
Gaussian proposals. Each proposal is mapped to the network-output space,
scored by the input-backpropagation likelihood plus the prior, and
accepted with probability ``min(1, exp(delta_log_lik + delta_log_prior))``;
the symmetric transition term cancels exactly. All arithmetic stays in log
space, so unnormalized likelihoods of any magnitude are safe.

Per step the RNG stream is consumed in a fixed order: proposal noise,
then the uniform acceptance draw, then (only when the likelihood is
stochastic and actually evaluated) the inner optimizer's start noise.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import OptimizationDivergedError, ValidationError
from .inverse import InputBackpropLikelihood
from .network import as_network
from .priors import TargetPrior
from .validation import as_vector, check_int_at_least


@dataclass(frozen=True)
class ChainConfig:
    """Run-length, proposal scales, seed, and initialization of one chain.

    ``proposal_sigma`` is a scalar or one positive value per prior block
    (e.g. ``(sigma_scores, sigma_shift)`` for the shape prior). ``init`` is
    either ``"random_prior_draw"`` or an explicit parameter vector.
    """

    n_steps: int
    burn_in: int
    proposal_sigma: object = 1.0
    seed: int = 0
    init: object = "random_prior_draw"

    def __post_init__(self):
        check_int_at_least(self.n_steps, 1, "n_steps")
        check_int_at_least(self.burn_in, 0, "burn_in")
        if self.burn_in >= self.n_steps:
            raise ValidationError(
                f"burn_in ({self.burn_in}) must be below n_steps ({self.n_steps})"
            )
        sigmas = np.atleast_1d(np.asarray(self.proposal_sigma, dtype=float))
        if np.any(~np.isfinite(sigmas)) or np.any(sigmas <= 0):
            raise ValidationError(
                f"proposal_sigma entries must be positive, got {self.proposal_sigma!r}"
            )


@dataclass
class ChainState:
    """Current position with cached log-likelihood/log-prior/energy."""

    current: np.ndarray
    log_lik: float
    log_prior: float
    energy: float
    step: int = 0
    n_accepted: int = 0
    inner_opt_failures: int = 0


@dataclass
class ChainRecord:
    """Full trace of one chain (pre-burn-in rows included).

    Row 0 is the evaluated initial state; rows ``t >= 1`` are MH
    transitions, so ``accept_flags[0]`` is always False and
    ``samples[t] == samples[t-1]`` exactly wherever ``accept_flags[t]`` is
    False. ``acceptance_rate`` averages the transition flags after burn-in
    (0.0 when that window is empty).
    """

    samples: np.ndarray
    accept_flags: np.ndarray
    energies: np.ndarray
    burn_in: int
    seed: int
    inner_opt_failures: int = 0

    @property
    def n_steps(self) -> int:
        return self.samples.shape[0]

    @property
    def post_burn_in(self) -> np.ndarray:
        return self.samples[self.burn_in :]

    @property
    def acceptance_rate(self) -> float:
        flags = self.accept_flags[max(1, self.burn_in) :]
        return float(flags.mean()) if flags.size else 0.0


def expand_proposal_sigma(sigma, block_sizes) -> np.ndarray:
    """Spread per-block scales into one positive value per dimension."""
    sigmas = np.atleast_1d(np.asarray(sigma, dtype=float))
    if sigmas.shape[0] == 1:
        sigmas = np.repeat(sigmas, len(block_sizes))
    if sigmas.shape[0] != len(block_sizes):
        raise ValidationError(
            f"got {sigmas.shape[0]} proposal scales for {len(block_sizes)} "
            f"parameter blocks {tuple(block_sizes)}"
        )
    if np.any(sigmas <= 0):
        raise ValidationError("proposal scales must be positive")
    return np.repeat(sigmas, np.asarray(block_sizes, dtype=int))


def gaussian_proposal(current, sigma_vec, rng) -> np.ndarray:
    """Symmetric random-walk proposal: current plus scaled Gaussian noise."""
    current = np.asarray(current, dtype=float)
    return current + np.asarray(sigma_vec, dtype=float) * rng.standard_normal(
        current.shape[0]
    )


def log_accept_ratio(
    log_lik: float, log_prior: float, prop_log_lik: float, prop_log_prior: float
) -> float:
    """``min(0, delta_log_lik + delta_log_prior)``; ``-inf`` means certain rejection."""
    if prop_log_prior == -np.inf:
        return -np.inf
    return min(0.0, (prop_log_lik - log_lik) + (prop_log_prior - log_prior))


def chain_step(
    state: ChainState,
    likelihood,
    prior: TargetPrior,
    x: np.ndarray,
    sigma_vec: np.ndarray,
    rng,
) -> bool:
    """One MH transition; mutates ``state`` and returns the accept flag."""
    proposal = gaussian_proposal(state.current, sigma_vec, rng)
    u = rng.random()
    prop_log_prior = prior.log_density(proposal)
    accepted = False
    if prop_log_prior > -np.inf:
        try:
            prop_log_lik, result = likelihood.log_likelihood(
                x, prior.to_target(proposal), rng=rng
            )
        except OptimizationDivergedError:
            state.inner_opt_failures += 1
        else:
            ratio = log_accept_ratio(
                state.log_lik, state.log_prior, prop_log_lik, prop_log_prior
            )
            if np.log(u) <= ratio:
                accepted = True
                state.current = proposal
                state.log_lik = prop_log_lik
                state.log_prior = prop_log_prior
                state.energy = result.energy
                state.n_accepted += 1
    state.step += 1
    return accepted


def run_chain(likelihood, prior: TargetPrior, x, cfg: ChainConfig) -> ChainRecord:
    """Run one seeded chain; every state (pre-burn-in included) is recorded."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    sigma_vec = expand_proposal_sigma(cfg.proposal_sigma, prior.block_sizes)
    if sigma_vec.shape[0] != prior.dim:
        raise ValidationError(
            f"proposal covers {sigma_vec.shape[0]} dims, prior has {prior.dim}"
        )

    if isinstance(cfg.init, str):
        if cfg.init != "random_prior_draw":
            raise ValidationError(f"unknown init {cfg.init!r}")
        init = prior.sample(rng)
    else:
        init = as_vector(cfg.init, prior.dim, "init")
    log_prior0 = prior.log_density(init)
    if log_prior0 == -np.inf:
        raise ValidationError("initial state lies outside the prior support")
    log_lik0, result0 = likelihood.log_likelihood(x, prior.to_target(init), rng=rng)
    state = ChainState(
        current=init, log_lik=log_lik0, log_prior=log_prior0, energy=result0.energy
    )

    samples = np.empty((cfg.n_steps, prior.dim))
    flags = np.zeros(cfg.n_steps, dtype=bool)
    energies = np.empty(cfg.n_steps)
    samples[0] = state.current
    energies[0] = state.energy
    for t in range(1, cfg.n_steps):
        flags[t] = chain_step(state, likelihood, prior, x, sigma_vec, rng)
        samples[t] = state.current
        energies[t] = state.energy
    return ChainRecord(
        samples=samples,
        accept_flags=flags,
        energies=energies,
        burn_in=cfg.burn_in,
        seed=cfg.seed,
        inner_opt_failures=state.inner_opt_failures,
    )


def _chain_worker(payload):
    likelihood, prior, x, cfg = payload
    return run_chain(likelihood, prior, x, cfg)


def resolve_n_jobs(n_jobs: int | None, n_tasks: int) -> int:
    """Worker count: explicit argument, else DEEPMH_THREADS, else CPU count."""
    if n_jobs is None:
        env = os.environ.get("DEEPMH_THREADS", "").strip()
        n_jobs = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(int(n_jobs), n_tasks))


def run_chains(
    likelihood,
    prior: TargetPrior,
    x,
    cfgs,
    n_jobs: int | None = None,
):
    """Run independent chains and pool their post-burn-in samples.

    Chains share only the immutable likelihood/prior; each owns its RNG.
    Results are reduced in chain order, so serial and process-parallel
    execution produce bit-identical output.
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise ValidationError("need at least one chain config")
    seeds = [cfg.seed for cfg in cfgs]
    if len(set(seeds)) != len(seeds):
        warnings.warn(
            "duplicate chain seeds: chains will be identical copies",
            stacklevel=2,
        )
    n_jobs = resolve_n_jobs(n_jobs, len(cfgs))
    payloads = [(likelihood, prior, x, cfg) for cfg in cfgs]
    if n_jobs == 1 or len(cfgs) == 1:
        records = [_chain_worker(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_chain_worker, payloads))
    pooled = np.vstack([rec.post_burn_in for rec in records])
    return records, pooled


@dataclass
class ChainDiagnostics:
    """Mixing summary for one chain."""

    acceptance_rate: float
    running_means: np.ndarray
    lag1_autocorr: np.ndarray
    ess: np.ndarray
    degenerate: bool


def _autocorrelations(x: np.ndarray) -> np.ndarray:
    """Normalized autocorrelation function of a 1-D series (FFT based)."""
    n = x.shape[0]
    centered = x - x.mean()
    f = np.fft.rfft(centered, n=2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n]
    if acf[0] <= 0:
        return np.zeros(n)
    return acf / acf[0]


def chain_diagnostics(record: ChainRecord) -> ChainDiagnostics:
    """Acceptance, running means, lag-1 autocorrelation, and per-dim ESS.

    ESS uses the initial-positive-sequence rule: the integrated
    autocorrelation time sums lags until the first non-positive
    autocorrelation. A constant post-burn-in chain reports ESS 1 and
    raises a degenerate-chain warning.
    """
    samples = record.samples
    if samples.size == 0:
        raise ValidationError("empty chain record")
    n, d = samples.shape
    running = np.cumsum(samples, axis=0) / np.arange(1, n + 1)[:, None]

    post = record.post_burn_in
    m = post.shape[0]
    lag1 = np.zeros(d)
    ess = np.ones(d)
    degenerate = False
    for j in range(d):
        col = post[:, j]
        if m < 2 or np.all(col == col[0]):
            degenerate = True
            continue
        acf = _autocorrelations(col)
        lag1[j] = acf[1] if m > 1 else 0.0
        tau = 1.0
        for k in range(1, m):
            if acf[k] <= 0:
                break
            tau += 2.0 * acf[k]
        ess[j] = min(float(m), max(1.0, m / tau))
    if degenerate:
        warnings.warn("degenerate chain: constant after burn-in", stacklevel=2)
    return ChainDiagnostics(
        acceptance_rate=record.acceptance_rate,
        running_means=running,
        lag1_autocorr=lag1,
        ess=ess,
        degenerate=degenerate,
    )


def tune_proposal_sigma(
    likelihood,
    prior: TargetPrior,
    x,
    base_sigma=1.0,
    target_band=(0.15, 0.25),
    n_steps: int = 600,
    burn_in: int = 150,
    seed: int = 0,
    max_rounds: int = 18,
    init="random_prior_draw",
):
    """Scale the proposal to land the acceptance rate inside a band.

    Multiplies ``base_sigma`` by a common factor, exploiting that the
    acceptance rate decreases as proposals grow: geometric search brackets
    the band, then bisection on the log scale narrows in. Returns
    ``(proposal_sigma, acceptance_rate, history)`` with the full probe
    history as ``(scale, rate)`` pairs.
    """
    lo_t, hi_t = float(target_band[0]), float(target_band[1])
    if not 0.0 <= lo_t < hi_t <= 1.0:
        raise ValidationError(f"bad target band {target_band!r}")
    base = np.atleast_1d(np.asarray(base_sigma, dtype=float))

    def probe(scale: float) -> float:
        cfg = ChainConfig(
            n_steps=n_steps,
            burn_in=burn_in,
            proposal_sigma=tuple(scale * base),
            seed=seed,
            init=init,
        )
        return run_chain(likelihood, prior, x, cfg).acceptance_rate

    history = []
    scale = 1.0
    rate = probe(scale)
    history.append((scale, rate))

    # bracket: rate(lo_s) above the band, rate(hi_s) below it
    lo_s = hi_s = None
    if rate > hi_t:
        lo_s = scale
    elif rate < lo_t:
        hi_s = scale
    rounds = 0
    while (lo_s is None or hi_s is None) and not lo_t <= rate <= hi_t:
        rounds += 1
        if rounds > max_rounds:
            break
        scale = scale * 4.0 if hi_s is None else scale / 4.0
        rate = probe(scale)
        history.append((scale, rate))
        if rate > hi_t:
            lo_s = scale
        elif rate < lo_t:
            hi_s = scale

    while not lo_t <= rate <= hi_t and rounds < max_rounds:
        rounds += 1
        if lo_s is None or hi_s is None:
            break
        scale = float(np.sqrt(lo_s * hi_s))
        rate = probe(scale)
        history.append((scale, rate))
        if rate > hi_t:
            lo_s = scale
        elif rate < lo_t:
            hi_s = scale

    if not lo_t <= rate <= hi_t:
        mid = 0.5 * (lo_t + hi_t)
        scale, rate = min(history, key=lambda sr: abs(sr[1] - mid))
    return tuple(scale * base), rate, history


@dataclass
class SamplingResult:
    """Chains plus their pooled post-burn-in samples for one test input."""

    records: list
    pooled_params: np.ndarray
    pooled_targets: np.ndarray

    @property
    def acceptance_rates(self) -> list:
        return [rec.acceptance_rate for rec in self.records]

    @property
    def inner_opt_failures(self) -> int:
        return sum(rec.inner_opt_failures for rec in self.records)


class DeepMHSampler(BaseEstimator):
    """Deep MH: posterior sampling for a trained network's outputs.

    Composes the input-backpropagation likelihood with a target prior and
    runs independent Metropolis-Hastings chains per test input.

    Parameters
    ----------
    network : Network or fitted FeedForwardRegressor
    prior : TargetPrior
        Also fixes the sampling parameterization (e.g. scores + shift for
        the shape prior).
    beta, lam, init_noise, step_size, max_iters, grad_tol
        Passed to :class:`InputBackpropLikelihood`.
    proposal_sigma : float or tuple
        Per-block proposal scales.
    n_steps, burn_in, n_chains, init, seed
        Chain schedule; chain ``i`` runs on a seed derived from ``seed``.
    n_jobs : int or None
        Process parallelism across chains (None: DEEPMH_THREADS or CPU
        count). Results do not depend on it.
    """

    def __init__(
        self,
        network,
        prior,
        beta=10000.0,
        lam=1.0,
        init_noise=0.1,
        step_size=0.1,
        max_iters=500,
        grad_tol=None,
        proposal_sigma=1.0,
        n_steps=2000,
        burn_in=500,
        n_chains=4,
        init="random_prior_draw",
        seed=0,
        n_jobs=None,
    ):
        self.network = network
        self.prior = prior
        self.beta = beta
        self.lam = lam
        self.init_noise = init_noise
        self.step_size = step_size
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.proposal_sigma = proposal_sigma
        self.n_steps = n_steps
        self.burn_in = burn_in
        self.n_chains = n_chains
        self.init = init
        self.seed = seed
        self.n_jobs = n_jobs

    def likelihood(self) -> InputBackpropLikelihood:
        return InputBackpropLikelihood(
            as_network(self.network),
            beta=self.beta,
            lam=self.lam,
            init_noise=self.init_noise,
            step_size=self.step_size,
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            seed=self.seed,
        )

    def chain_seeds(self) -> list:
        root = np.random.SeedSequence(self.seed)
        return [int(s.generate_state(1)[0]) for s in root.spawn(self.n_chains)]

    def sample(self, x, chain_seeds=None) -> SamplingResult:
        """Sample the posterior at one test input; returns pooled chains."""
        net = as_network(self.network)
        x = as_vector(x, net.input_dim, "x")
        if chain_seeds is None:
            chain_seeds = self.chain_seeds()
        cfgs = [
            ChainConfig(
                n_steps=self.n_steps,
                burn_in=self.burn_in,
                proposal_sigma=self.proposal_sigma,
                seed=s,
                init=self.init,
            )
            for s in chain_seeds
        ]
        records, pooled = run_chains(
            self.likelihood(), self.prior, x, cfgs, n_jobs=self.n_jobs
        )
        return SamplingResult(
            records=records,
            pooled_params=pooled,
            pooled_targets=self.prior.to_target_batch(pooled),
        )
