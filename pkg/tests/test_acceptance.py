"""Acceptance suite: one test per release criterion, with a printed verdict.

Run as ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion. Every expected value is produced by an independent oracle
inside this module (finite differences, normal equations, closed-form
Gaussian posteriors, quadrature, brute-force statistics) and frozen here.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import partial

import numpy as np
import pytest

from deepmh import (
    ChainConfig,
    DenseLayer,
    FeedForwardRegressor,
    InputBackpropLikelihood,
    Kde1dPrior,
    Network,
    PcaShapeModel,
    PcaShapeTargetPrior,
    StandardGaussianPrior,
    UniformBoxPrior,
    init_network,
    kde_grid,
    log_accept_ratio,
    rmse,
    run_chains,
    spearman,
    summarize_samples,
    tune_proposal_sigma,
)
from deepmh.cli import main
from deepmh.metrics import find_modes
from deepmh.sampler import run_chain
from deepmh.synthetic import bimodal_1d, ellipse_shapes, heteroscedastic_1d


@contextmanager
def criterion(label):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] {label}: FAIL ({time.perf_counter() - start:.1f}s)")
        raise
    print(f"[acceptance] {label}: PASS ({time.perf_counter() - start:.1f}s)")


def linear_net(w):
    w = np.asarray(w, dtype=float)
    return Network([DenseLayer(w, np.zeros(w.shape[0]))])


def normal_equations(w, lam, x, y_prime):
    w = np.asarray(w, dtype=float)
    return np.linalg.solve(
        lam * np.eye(w.shape[1]) + w.T @ w,
        lam * np.asarray(x) + w.T @ np.asarray(y_prime),
    )


def test_01_gradient_matches_finite_differences():
    with criterion("1 gradient oracle (100 nets vs central differences)"):
        start = time.perf_counter()
        rng = np.random.default_rng(1001)
        for _ in range(100):
            d_in = int(rng.integers(1, 6))
            d_out = int(rng.integers(1, 4))
            hidden = [int(rng.integers(2, 9))]
            net = init_network(d_in, hidden, d_out, activation="tanh",
                               seed=int(rng.integers(10000)))
            x = rng.standard_normal(d_in)
            target = rng.standard_normal(d_out)
            loss = lambda y: float((y - target) @ (y - target))
            grad = net.input_gradient(x, lambda y: 2.0 * (y - target))
            h = 1e-5
            for i in range(d_in):
                e = np.zeros(d_in)
                e[i] = h
                fd = (loss(net.forward(x + e)) - loss(net.forward(x - e))) / (2 * h)
                assert abs(grad[i] - fd) <= 1e-4 * max(abs(fd), 1e-8)
        assert time.perf_counter() - start < 10.0


def test_02_inner_optimization_matches_normal_equations():
    with criterion("2 inner-optimization oracle (normal equations)"):
        start = time.perf_counter()
        # worked case: the closed form itself fixes the expected values
        w = np.diag([1.0, 2.0])
        expected = normal_equations(w, 1.0, [1.0, 1.0], [0.0, 0.0])
        np.testing.assert_allclose(expected, [0.5, 0.2], atol=1e-15)
        lik = InputBackpropLikelihood(
            linear_net(w), beta=1.0, lam=1.0, init_noise=0.0,
            step_size=0.2, max_iters=3000, grad_tol=1e-10,
        )
        res = lik.solve([1.0, 1.0], [0.0, 0.0])
        assert np.all(np.abs(res.x_star - expected) <= 1e-5 * np.abs(expected))
        assert abs(res.energy - 0.89) <= 1e-5 * 0.89

        rng = np.random.default_rng(1002)
        for _ in range(20):
            d_in = int(rng.integers(1, 6))
            d_out = int(rng.integers(1, 6))
            w = rng.standard_normal((d_out, d_in))
            lam = rng.uniform(0.1, 10.0)
            x = rng.standard_normal(d_in)
            y_prime = rng.standard_normal(d_out)
            lik = InputBackpropLikelihood(
                linear_net(w), beta=1.0, lam=lam, init_noise=0.0,
                step_size=0.2, max_iters=3000, grad_tol=1e-10,
            )
            got = lik.solve(x, y_prime).x_star
            want = normal_equations(w, lam, x, y_prime)
            scale = np.maximum(np.abs(want), 1e-8)
            assert np.all(np.abs(got - want) / scale < 1e-5)
        assert time.perf_counter() - start < 5.0


def test_03_zero_energy_at_own_prediction():
    with criterion("3 zero-energy identity E(x, f(x)) = 0"):
        rng = np.random.default_rng(1003)
        for _ in range(50):
            d_in = int(rng.integers(1, 5))
            d_out = int(rng.integers(1, 4))
            net = init_network(d_in, [int(rng.integers(2, 8))], d_out,
                               activation="tanh", seed=int(rng.integers(10000)))
            x = rng.standard_normal(d_in)
            lik = InputBackpropLikelihood(net, beta=1.0, lam=1.0, init_noise=0.0,
                                          step_size=0.2)
            assert lik.solve(x, net.forward(x)).energy <= 1e-10


def test_04_chain_matches_analytic_gaussian_posterior():
    with criterion("4 exact-posterior chain oracle (linear net, Gaussian prior)"):
        start = time.perf_counter()
        w = np.array([[1.0, 0.0], [0.0, 2.0]])
        beta, lam = 3.0, 1.0
        x = np.array([1.0, 1.0])
        # closed form: energy is quadratic in y, so the target is Gaussian
        m = np.linalg.solve(lam * np.eye(2) + w.T @ w, w.T)
        a = 2.0 * beta * (m.T @ m)
        cov = np.linalg.inv(np.eye(2) + a)
        mean = cov @ (a @ (w @ x))

        lik = InputBackpropLikelihood(
            linear_net(w), beta=beta, lam=lam, init_noise=0.0,
            step_size=0.2, max_iters=300, grad_tol=1e-5,
        )
        prior = StandardGaussianPrior(2)
        cfgs = [
            ChainConfig(n_steps=8000, burn_in=500, proposal_sigma=0.9, seed=100 + i)
            for i in range(8)
        ]
        _, pooled = run_chains(lik, prior, x, cfgs)
        assert pooled.shape[0] >= 50000
        post_std = np.sqrt(np.diag(cov))
        assert np.all(np.abs(pooled.mean(axis=0) - mean) <= 0.05 * post_std)
        sample_cov = np.cov(pooled.T)
        assert abs(np.trace(sample_cov) - np.trace(cov)) <= 0.10 * np.trace(cov)
        assert time.perf_counter() - start < 120.0


def test_05_detailed_balance_identity():
    with criterion("5 detailed-balance identity on 100 random pairs"):
        net = init_network(2, [6], 2, activation="tanh", seed=77)
        lik = InputBackpropLikelihood(net, beta=4.0, lam=1.0, init_noise=0.0,
                                      step_size=0.2, max_iters=300, grad_tol=1e-6)
        prior = StandardGaussianPrior(2)
        x = np.array([0.3, -0.6])
        rng = np.random.default_rng(1005)
        for _ in range(100):
            a, b = prior.sample(rng), prior.sample(rng)
            ll_a, _ = lik.log_likelihood(x, a)
            ll_b, _ = lik.log_likelihood(x, b)
            lp_a, lp_b = prior.log_density(a), prior.log_density(b)
            lhs = log_accept_ratio(ll_a, lp_a, ll_b, lp_b) - log_accept_ratio(
                ll_b, lp_b, ll_a, lp_a
            )
            rhs = (ll_b + lp_b) - (ll_a + lp_a)
            assert abs(lhs - rhs) <= 1e-10


def _bimodal_posterior(net, prior, x_value, seed0):
    lik = InputBackpropLikelihood(net, beta=40.0, lam=1.0, init_noise=0.0,
                                  step_size=0.25, max_iters=150, grad_tol=1e-4)
    cfgs = [
        ChainConfig(n_steps=2500, burn_in=400, proposal_sigma=1.0, seed=seed0 + i)
        for i in range(6)
    ]
    _, pooled = run_chains(lik, prior, np.array([x_value]), cfgs)
    return pooled[:, 0]


def test_06_multimodal_at_ambiguous_input_only():
    with criterion("6 multimodality at ambiguous input, single mode elsewhere"):
        start = time.perf_counter()
        X, Y = bimodal_1d(400, noise_std=0.05, seed=11)
        reg = FeedForwardRegressor(
            hidden_layer_sizes=(24, 24), activation="tanh", learning_rate=0.05,
            epochs=400, batch_size=16, seed=3,
        ).fit(X, Y)
        prior = Kde1dPrior(Y[:, 0], bandwidth=0.25)

        # demo resolution: modes are claimed at branch scale, so the demo
        # KDE uses a fixed 0.15 bandwidth (separation rule = 4 bandwidths)
        samples = _bimodal_posterior(reg.network_, prior, 0.2, seed0=700)
        grid = kde_grid(samples, bandwidth=0.15)
        modes = find_modes(grid)
        assert len(modes) >= 2
        gaps = np.diff(modes)
        assert np.all(gaps > 4.0 * grid.bandwidth[0])

        samples = _bimodal_posterior(reg.network_, prior, 0.85, seed0=800)
        grid = kde_grid(samples, bandwidth=0.15)
        assert len(find_modes(grid)) == 1
        assert time.perf_counter() - start < 300.0


def test_07_tuning_hits_target_acceptance_bands():
    with criterion("7 acceptance-rate tuning (10-dim shape task and 1-D task)"):
        # shape task: 8 score dims + 2 shift dims = 10 sampling dims
        X, Y = ellipse_shapes(300, n_vertices=8, n_factors=8, noise_std=0.05, seed=31)
        reg = FeedForwardRegressor(
            hidden_layer_sizes=(32,), activation="tanh", learning_rate=0.02,
            epochs=300, batch_size=16, seed=2,
        ).fit(X, Y)
        model = PcaShapeModel(n_components=8).fit(Y)
        extent = [float(c.max() - c.min()) for c in (Y[:, 0::2], Y[:, 1::2])]
        box = np.array(
            [[-0.3 * extent[0], 0.3 * extent[0]], [-0.3 * extent[1], 0.3 * extent[1]]]
        )
        prior = PcaShapeTargetPrior(model, box)
        assert prior.dim >= 10
        Xt, _ = ellipse_shapes(4, n_vertices=8, n_factors=8, noise_std=0.05, seed=32)
        lik = InputBackpropLikelihood(reg.network_, beta=100.0, lam=1.0,
                                      init_noise=0.0, step_size=0.25,
                                      max_iters=100, grad_tol=1e-4)
        sigma, rate, _ = tune_proposal_sigma(
            lik, prior, Xt[0], base_sigma=(0.1, 0.5), target_band=(0.15, 0.25),
            n_steps=2000, burn_in=600, seed=77,
        )
        assert 0.15 <= rate <= 0.25
        confirm = [
            run_chain(
                lik, prior, Xt[0],
                ChainConfig(n_steps=2000, burn_in=600, proposal_sigma=sigma, seed=500 + i),
            ).acceptance_rate
            for i in range(2)
        ]
        assert 0.15 <= float(np.mean(confirm)) <= 0.25

        # 1-D task: curve regression with a box prior
        Xh, Yh = heteroscedastic_1d(400, noise_std=0.3, seed=42)
        regh = FeedForwardRegressor(
            hidden_layer_sizes=(24, 24), activation="tanh", learning_rate=0.05,
            epochs=300, batch_size=16, seed=9,
        ).fit(Xh, Yh)
        prior1 = UniformBoxPrior([-3.0], [3.0])
        lik1 = InputBackpropLikelihood(regh.network_, beta=50.0, lam=1.0,
                                       init_noise=0.0, step_size=0.25,
                                       max_iters=100, grad_tol=1e-4)
        sigma1, rate1, _ = tune_proposal_sigma(
            lik1, prior1, np.array([0.4]), base_sigma=1.0, target_band=(0.35, 0.45),
            n_steps=2000, burn_in=600, seed=78,
        )
        assert 0.35 <= rate1 <= 0.45
        confirm1 = [
            run_chain(
                lik1, prior1, np.array([0.4]),
                ChainConfig(n_steps=2000, burn_in=600, proposal_sigma=sigma1, seed=900 + i),
            ).acceptance_rate
            for i in range(2)
        ]
        assert 0.35 <= float(np.mean(confirm1)) <= 0.45


def test_08_pca_round_trip():
    with criterion("8 PCA round trip and mean reproduction"):
        rng = np.random.default_rng(1008)
        for k in (2, 3, 5):
            basis = np.linalg.qr(rng.standard_normal((12, k)))[0]
            shapes = rng.standard_normal(12) + rng.standard_normal((40, k)) @ basis.T
            model = PcaShapeModel(n_components=k).fit(shapes)
            recon = model.inverse_transform(model.transform(shapes))
            rms = np.sqrt(np.mean((recon - shapes) ** 2, axis=1))
            assert np.all(rms < 1e-8)
            assert np.array_equal(
                model.shape_from_params(np.zeros(k), (0.0, 0.0)), model.mean_
            )


def test_09_correlations_match_brute_force():
    with criterion("9 correlation oracle (brute-force rank statistics)"):
        # worked value: ranks (1,2,3) vs (3,1,2) -> 1 - 6*6/24 = -0.5
        r, _ = spearman([1.0, 2.0, 3.0], [3.0, 1.0, 2.0])
        assert r == -0.5

        def naive_ranks(x):
            return np.array(
                [sum(u < v for u in x) + (sum(u == v for u in x) + 1) / 2.0 for v in x]
            )

        def naive_pearson(u, v):
            n = len(u)
            mu, mv = sum(u) / n, sum(v) / n
            cov = sum((a - mu) * (b - mv) for a, b in zip(u, v))
            su = sum((a - mu) ** 2 for a in u)
            sv = sum((b - mv) ** 2 for b in v)
            return cov / np.sqrt(su * sv)

        from deepmh import pearson

        rng = np.random.default_rng(1009)
        for _ in range(50):
            n = int(rng.integers(4, 40))
            u = rng.integers(0, 8, size=n).astype(float)
            v = rng.standard_normal(n)
            if len(set(u)) < 2:
                continue
            assert abs(spearman(u, v)[0] - naive_pearson(naive_ranks(u), naive_ranks(v))) < 1e-12
            assert abs(pearson(u, v)[0] - naive_pearson(u, v)) < 1e-12


def _hetero_case(i, lik, prior, Xt, Yt, forward):
    cfgs = [
        ChainConfig(n_steps=700, burn_in=200, proposal_sigma=1.0, seed=9000 + 10 * i + c)
        for c in range(3)
    ]
    _, pooled = run_chains(lik, prior, Xt[i], cfgs, n_jobs=1)
    return summarize_samples(pooled).trace, rmse([forward[i]], [Yt[i, 0]])


def test_10_uncertainty_tracks_error_on_heteroscedastic_task():
    with criterion("10 directional check: uncertainty vs error correlation"):
        start = time.perf_counter()
        X, Y = heteroscedastic_1d(400, noise_std=0.3, seed=42)
        reg = FeedForwardRegressor(
            hidden_layer_sizes=(24, 24), activation="tanh", learning_rate=0.05,
            epochs=300, batch_size=16, seed=9,
        ).fit(X, Y)
        Xt, Yt = heteroscedastic_1d(60, noise_std=0.3, seed=43)
        prior = UniformBoxPrior([-3.0], [3.0])
        lik = InputBackpropLikelihood(reg.network_, beta=50.0, lam=1.0,
                                      init_noise=0.0, step_size=0.25,
                                      max_iters=100, grad_tol=1e-4)
        forward = reg.predict(Xt)
        worker = partial(_hetero_case, lik=lik, prior=prior, Xt=Xt, Yt=Yt,
                         forward=forward)
        with ProcessPoolExecutor(max_workers=2) as pool:
            results = list(pool.map(worker, range(60)))
        uncertainties = [u for u, _ in results]
        errors = [e for _, e in results]
        r, p = spearman(uncertainties, errors)
        assert len(results) >= 60
        assert r > 0.3
        assert p < 0.05
        assert time.perf_counter() - start < 600.0


def test_11_seeded_runs_are_byte_identical(tmp_path):
    with criterion("11 determinism: repeated runs are byte-identical"):
        cfg_text = "\n".join(
            [
                "task = synthetic_bimodal",
                "seed = 5",
                f"out_dir = {tmp_path / 'a'}",
                "synthetic.n_train = 120",
                "synthetic.n_test = 4",
                "synthetic.noise_std = 0.05",
                "net.hidden = 12",
                "train.learning_rate = 0.05",
                "train.epochs = 100",
                "train.batch_size = 16",
                "prior.bandwidth = 0.25",
                "likelihood.beta = 40",
                "likelihood.init_noise = 0.0",
                "likelihood.step_size = 0.25",
                "likelihood.max_iters = 100",
                "likelihood.grad_tol = 1e-4",
                "sampler.n_steps = 300",
                "sampler.burn_in = 60",
                "sampler.n_chains = 2",
                "sampler.proposal_sigma = 1.0",
            ]
        )
        cfg_path = tmp_path / "det.cfg"
        cfg_path.write_text(cfg_text + "\n")

        outputs = ("samples.csv", "predictions.csv", "diagnostics.json",
                   "summary.json", "correlations.json")
        blobs = {}
        for out_name in ("a", "b"):
            out = tmp_path / out_name
            for command in ("train", "sample", "evaluate"):
                assert main([command, "--config", str(cfg_path), "--out", str(out)]) == 0
            blobs[out_name] = {name: (out / name).read_bytes() for name in outputs}
        for name in outputs:
            assert blobs["a"][name] == blobs["b"][name], f"{name} differs"
        json.loads(blobs["a"]["correlations.json"])  # valid JSON by construction
