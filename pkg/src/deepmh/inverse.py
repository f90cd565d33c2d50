"""Likelihood of a proposed target via input-space optimization.

For a proposal ``y'`` the solver finds an input ``x*`` close to the test
input ``x`` whose prediction matches ``y'``, by gradient descent on

    lam * ||x' - x||^2  +  ||f(x') - y'||^2

started at ``x`` plus Gaussian noise of scale ``init_noise``. The energy of
the proposal is the squared input-space displacement ``||x* - x||^2`` and
its unnormalized log-likelihood is ``-beta * energy``. A proposal the
network cannot reach from anywhere near ``x`` keeps a large target
residual, while one reachable through a small input perturbation scores a
near-zero energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import OptimizationDivergedError
from .network import Network, as_network
from .validation import as_vector, check_int_at_least, check_positive

_STEP_FLOOR = 1e-20


@dataclass(frozen=True)
class EnergyResult:
    """Outcome of one inner optimization.

    ``energy`` is exactly ``||x_star - x||^2``; ``target_residual`` is the
    squared output mismatch ``||f(x_star) - y'||^2`` at the returned point.
    """

    x_star: np.ndarray
    energy: float
    target_residual: float
    iters_used: int
    converged: bool
    objective_curve: tuple = ()


class InputBackpropLikelihood:
    """Energy-based target likelihood for a fixed trained network.

    Parameters
    ----------
    network : Network or fitted FeedForwardRegressor
        The immutable trained model; never modified.
    beta : float
        Energy scale (inverse temperature) of the likelihood
        ``exp(-beta * energy)``. Only log-likelihood differences are ever
        used, so no normalization constant is computed.
    lam : float
        Weight of the input-closeness term in the inner objective.
    init_noise : float
        Standard deviation of the Gaussian perturbation applied to the
        optimizer's starting point. Zero makes the energy deterministic.
    step_size : float
        Initial gradient-descent step; backtracking halves it on any
        objective increase and regrows it by at most a factor of two on
        success.
    max_iters : int
        Iteration cap for the inner optimization.
    grad_tol : float or None
        Stop once the objective gradient norm falls below this. Defaults
        to ``1e-6 * (1 + input_dim)``.
    seed : int
        Seeds the noise stream when no generator is passed to a call.
    """

    def __init__(
        self,
        network,
        beta: float = 10000.0,
        lam: float = 1.0,
        init_noise: float = 0.1,
        step_size: float = 0.1,
        max_iters: int = 500,
        grad_tol: float | None = None,
        seed: int = 0,
    ):
        self.network: Network = as_network(network)
        self.beta = check_positive(beta, "beta")
        self.lam = check_positive(lam, "lam")
        self.init_noise = check_positive(init_noise, "init_noise", strict=False)
        self.step_size = check_positive(step_size, "step_size")
        self.max_iters = check_int_at_least(max_iters, 1, "max_iters")
        if grad_tol is None:
            grad_tol = 1e-6 * (1 + self.network.input_dim)
        self.grad_tol = check_positive(grad_tol, "grad_tol")
        self.seed = int(seed)

    def _value_and_grad(self, xp, x, y_prime):
        """Objective value, gradient, and squared target residual at xp."""
        net = self.network
        zs, acts = net._forward_cached(xp)
        r = acts[-1] - y_prime
        diff = xp - x
        residual = float(r @ r)
        value = self.lam * float(diff @ diff) + residual
        grad = 2.0 * self.lam * diff + net._backward_input(zs, acts, 2.0 * r)
        return value, grad, residual

    def solve(self, x, y_prime, rng=None, record_objective: bool = False) -> EnergyResult:
        """Run the inner optimization for one proposal.

        With ``init_noise == 0`` no random numbers are consumed, so the
        result is a pure function of ``(x, y_prime)``.
        """
        x = as_vector(x, self.network.input_dim, "x")
        y_prime = as_vector(y_prime, self.network.output_dim, "y_prime")

        cur = x.copy()
        if self.init_noise > 0.0:
            if rng is None:
                rng = np.random.default_rng(self.seed)
            cur = cur + self.init_noise * rng.standard_normal(x.shape[0])

        value, grad, residual = self._value_and_grad(cur, x, y_prime)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            raise OptimizationDivergedError(
                "non-finite objective at the optimization start"
            )
        curve = [value] if record_objective else None
        step = self.step_size
        iters = 0
        converged = bool(np.linalg.norm(grad) <= self.grad_tol)

        while not converged and iters < self.max_iters:
            iters += 1
            # backtracking with a sufficient-decrease margin: a bare
            # non-increase test lets the step stick at the boundary where
            # the stiffest mode stops contracting, stalling convergence
            gg = float(grad @ grad)
            moved = False
            first_try = True
            while step >= _STEP_FLOOR:
                cand = cur - step * grad
                c_value, c_grad, c_residual = self._value_and_grad(cand, x, y_prime)
                if np.isfinite(c_value) and c_value <= value - 1e-4 * step * gg:
                    moved = True
                    break
                first_try = False
                step *= 0.5
            if not moved:
                # descent stalled at float resolution; keep the best point
                break
            if not np.all(np.isfinite(c_grad)):
                raise OptimizationDivergedError(
                    f"non-finite gradient after {iters} iterations"
                )
            cur, value, grad, residual = cand, c_value, c_grad, c_residual
            if curve is not None:
                curve.append(value)
            if first_try:
                step *= 2.0
            converged = bool(np.linalg.norm(grad) <= self.grad_tol)

        diff = cur - x
        return EnergyResult(
            x_star=cur,
            energy=float(diff @ diff),
            target_residual=residual,
            iters_used=iters,
            converged=converged,
            objective_curve=tuple(curve) if curve is not None else (),
        )

    def log_likelihood(self, x, y_prime, rng=None):
        """Unnormalized log-likelihood ``-beta * energy`` plus the solve detail."""
        result = self.solve(x, y_prime, rng=rng)
        return -self.beta * result.energy, result
