"""Command-line experiment harness.

Subcommands::

    deepmh train     --config FILE [--seed N] [--out DIR]
    deepmh pca-fit   --config FILE [--seed N] [--out DIR]
    deepmh sample    --config FILE [--seed N] [--out DIR]
    deepmh dropout   --config FILE [--seed N] [--out DIR]
    deepmh evaluate  --config FILE [--seed N] [--out DIR]
    deepmh tune      --config FILE [--seed N] [--out DIR]

Exit codes: 0 success, 1 runtime failure, 2 usage/config error. All
randomness derives from the run seed, so repeating a command reproduces
its outputs byte for byte. Chain parallelism is capped by the
``DEEPMH_THREADS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import cfg_get, load_config
from .data import (
    group_by_case,
    read_cases_csv,
    read_dataset_csv,
    write_cases_csv,
    write_chain_csv,
    write_dataset_csv,
)
from .exceptions import ConfigError, DeepMHError, ValidationError
from .inverse import InputBackpropLikelihood
from .metrics import correlation_report, kde_grid, rmse, summarize_samples
from .network import (
    TrainConfig,
    dropout_sample,
    init_network,
    load_model,
    save_model,
    train_sgd,
)
from .pca import PcaShapeModel, load_pca, save_pca
from .priors import (
    Kde1dPrior,
    PcaShapeTargetPrior,
    StandardGaussianPrior,
    TargetPrior,
    UniformBoxPrior,
)
from .sampler import ChainConfig, chain_diagnostics, run_chains, tune_proposal_sigma
from .synthetic import bimodal_1d, ellipse_shapes, heteroscedastic_1d

SYNTHETIC_TASKS = ("synthetic_bimodal", "synthetic_hetero", "synthetic_shapes")
TASKS = SYNTHETIC_TASKS + ("tabular_1d", "shape_pca")

# fixed purpose tags keep derived seed streams disjoint
_SEED_TRAIN_DATA, _SEED_TEST_DATA, _SEED_TRAINING = 101, 102, 103
_SEED_CHAINS, _SEED_DROPOUT, _SEED_TUNE = 104, 105, 106


def derive_seed(*parts) -> int:
    """Deterministic child seed from integer components."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_file(path, what: str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return path


def _task(cfg: dict) -> str:
    task = cfg_get(cfg, "task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")
    return task


def _generate_synthetic(task: str, cfg: dict, n: int, seed: int):
    noise = cfg_get(cfg, "synthetic.noise_std", "float", 0.05)
    if task == "synthetic_bimodal":
        return bimodal_1d(n, noise_std=noise, seed=seed)
    if task == "synthetic_hetero":
        return heteroscedastic_1d(n, noise_std=noise, seed=seed)
    return ellipse_shapes(
        n,
        n_vertices=cfg_get(cfg, "synthetic.n_vertices", "int", 8),
        n_factors=cfg_get(cfg, "synthetic.n_factors", "int", 3),
        noise_std=noise,
        seed=seed,
    )


def _case_ids(n: int):
    return [f"case{i}" for i in range(n)]


def _test_csv_path(cfg: dict, out_dir: Path) -> Path:
    explicit = cfg_get(cfg, "data.test", "str", None)
    return Path(explicit) if explicit else out_dir / "test.csv"


def cmd_train(cfg: dict, out_dir: Path, seed: int) -> int:
    task = _task(cfg)
    if task in SYNTHETIC_TASKS:
        n_train = cfg_get(cfg, "synthetic.n_train", "int", 400)
        n_test = cfg_get(cfg, "synthetic.n_test", "int", 40)
        if n_train < 10:
            raise ConfigError(f"synthetic.n_train must be >= 10, got {n_train}")
        X, Y = _generate_synthetic(task, cfg, n_train, derive_seed(seed, _SEED_TRAIN_DATA))
        Xt, Yt = _generate_synthetic(task, cfg, n_test, derive_seed(seed, _SEED_TEST_DATA))
        out_dir.mkdir(parents=True, exist_ok=True)
        write_dataset_csv(out_dir / "train.csv", X, Y)
        write_dataset_csv(out_dir / "test.csv", Xt, Yt)
    else:
        train_path = _require_file(cfg_get(cfg, "data.train"), "training data")
        test_path = _require_file(cfg_get(cfg, "data.test"), "test data")
        X, Y = read_dataset_csv(train_path)
        Xt, Yt = read_dataset_csv(test_path)
        out_dir.mkdir(parents=True, exist_ok=True)
    write_cases_csv(out_dir / "truth.csv", _case_ids(Xt.shape[0]), Yt)

    hidden = cfg_get(cfg, "net.hidden", "ints", [32])
    if hidden == [0]:
        hidden = []  # a bare affine map, used for oracle checks
    net = init_network(
        X.shape[1],
        hidden,
        Y.shape[1],
        activation=cfg_get(cfg, "net.activation", "str", "tanh"),
        seed=derive_seed(seed, _SEED_TRAINING),
    )
    train_cfg = TrainConfig(
        learning_rate=cfg_get(cfg, "train.learning_rate", "float", 0.05),
        epochs=cfg_get(cfg, "train.epochs", "int", 200),
        batch_size=min(cfg_get(cfg, "train.batch_size", "int", 32), X.shape[0]),
        seed=derive_seed(seed, _SEED_TRAINING, 1),
    )
    trained, curve = train_sgd(net, X, Y, train_cfg)
    model_path = Path(cfg_get(cfg, "model.path", "str", str(out_dir / "model.txt")))
    save_model(trained, model_path)
    with open(out_dir / "loss_curve.csv", "w", encoding="ascii") as fh:
        fh.write("epoch,loss\n")
        for epoch, loss in enumerate(curve):
            fh.write(f"{epoch},{loss!r}\n")
    print(f"trained {len(trained.layers)} layers on {X.shape[0]} samples")
    print(f"final training loss: {curve[-1]:.6g} (model: {model_path})")
    return 0


def _default_shift_box(shapes: np.ndarray, fraction: float) -> np.ndarray:
    """Zero-centered shift box spanning ``fraction`` of each axis extent."""
    xs = shapes[:, 0::2]
    ys = shapes[:, 1::2]
    box = []
    for coords in (xs, ys):
        half = 0.5 * fraction * float(coords.max() - coords.min())
        box.append((-half, half))
    return np.asarray(box)


def cmd_pca_fit(cfg: dict, out_dir: Path, seed: int) -> int:
    shapes_path = cfg_get(cfg, "pca.shapes", "str", None)
    if shapes_path is None:
        shapes_path = _require_file(
            out_dir / "train.csv", "training data (run train first or set pca.shapes)"
        )
        _, shapes = read_dataset_csv(shapes_path)
    else:
        _, shapes = read_dataset_csv(_require_file(shapes_path, "shape data"))
    k = cfg_get(cfg, "pca.components", "int")
    model = PcaShapeModel(n_components=k).fit(shapes)

    box_values = cfg_get(cfg, "pca.shift_box", "floats", None)
    if box_values is not None:
        if len(box_values) != 4:
            raise ConfigError("pca.shift_box needs 4 numbers: lo0 hi0 lo1 hi1")
        shift_box = np.asarray(box_values).reshape(2, 2)
    else:
        fraction = cfg_get(cfg, "pca.shift_fraction", "float", 0.6)
        shift_box = _default_shift_box(shapes, fraction)

    out_dir.mkdir(parents=True, exist_ok=True)
    pca_path = Path(cfg_get(cfg, "pca.path", "str", str(out_dir / "pca.txt")))
    save_pca(model, pca_path, shift_box=shift_box)
    for i, ratio in enumerate(model.explained_variance_ratio_):
        print(f"component {i}: retained variance fraction {ratio:.6f}")
    print(
        f"total retained: {model.explained_variance_ratio_.sum():.6f} "
        f"({k} components, {shapes.shape[0]} shapes) -> {pca_path}"
    )
    return 0


def _build_prior(cfg: dict, output_dim: int, out_dir: Path) -> TargetPrior:
    kind = cfg_get(cfg, "prior.kind", "str", None)
    task = _task(cfg)
    if kind is None:
        kind = {
            "synthetic_bimodal": "kde_train_targets",
            "synthetic_hetero": "uniform_box",
            "synthetic_shapes": "pca",
            "tabular_1d": "uniform_box",
            "shape_pca": "pca",
        }[task]
    if kind == "standard_gaussian":
        return StandardGaussianPrior(output_dim)
    if kind == "uniform_box":
        lo = cfg_get(cfg, "prior.lo", "floats")
        hi = cfg_get(cfg, "prior.hi", "floats")
        lo = lo * output_dim if len(lo) == 1 else lo
        hi = hi * output_dim if len(hi) == 1 else hi
        return UniformBoxPrior(lo, hi)
    if kind == "kde_train_targets":
        train_path = _require_file(out_dir / "train.csv", "training data")
        _, Y = read_dataset_csv(train_path)
        if Y.shape[1] != 1:
            raise ConfigError("kde_train_targets prior needs a 1-D target")
        bandwidth = cfg_get(cfg, "prior.bandwidth", "float", None)
        return Kde1dPrior(Y[:, 0], bandwidth=bandwidth)
    if kind == "pca":
        pca_path = _require_file(
            cfg_get(cfg, "pca.path", "str", str(out_dir / "pca.txt")),
            "shape-model file (run pca-fit first)",
        )
        model, shift_box = load_pca(pca_path)
        if shift_box is None:
            box_values = cfg_get(cfg, "pca.shift_box", "floats", None)
            if box_values is None:
                raise ConfigError(
                    "shape-model file has no shift box; set pca.shift_box"
                )
            shift_box = np.asarray(box_values).reshape(2, 2)
        return PcaShapeTargetPrior(model, shift_box)
    raise ConfigError(f"unknown prior.kind {kind!r}")


def _check_prior_compatible(prior: TargetPrior, output_dim: int) -> None:
    if isinstance(prior, PcaShapeTargetPrior):
        width = prior.model.mean_.shape[0]
        if width != output_dim:
            raise ConfigError(
                f"shape model is {width}-dimensional but the network "
                f"outputs {output_dim} values"
            )
    elif prior.dim != output_dim:
        raise ConfigError(
            f"prior dimension {prior.dim} does not match network output "
            f"dimension {output_dim}"
        )


def _likelihood(cfg: dict, net, seed: int) -> InputBackpropLikelihood:
    return InputBackpropLikelihood(
        net,
        beta=cfg_get(cfg, "likelihood.beta", "float", 10000.0),
        lam=cfg_get(cfg, "likelihood.lam", "float", 1.0),
        init_noise=cfg_get(cfg, "likelihood.init_noise", "float", 0.1),
        step_size=cfg_get(cfg, "likelihood.step_size", "float", 0.1),
        max_iters=cfg_get(cfg, "likelihood.max_iters", "int", 500),
        grad_tol=cfg_get(cfg, "likelihood.grad_tol", "float", None),
        seed=seed,
    )


def _initial_params(prior: TargetPrior, y_pred: np.ndarray):
    """Map a forward prediction into the prior's parameter space."""
    if isinstance(prior, PcaShapeTargetPrior):
        z, s = prior.model.project_with_shift(y_pred)
        s = np.clip(s, prior.shift_box[:, 0], prior.shift_box[:, 1])
        return np.concatenate([z, s])
    if isinstance(prior, UniformBoxPrior):
        return np.clip(y_pred, prior.lo, prior.hi)
    return y_pred


def cmd_sample(cfg: dict, out_dir: Path, seed: int) -> int:
    net = load_model(_require_file(
        cfg_get(cfg, "model.path", "str", str(out_dir / "model.txt")),
        "model file (run train first)",
    ))
    test_path = _require_file(_test_csv_path(cfg, out_dir), "test data")
    Xt, _ = read_dataset_csv(test_path)
    if Xt.shape[1] != net.input_dim:
        raise ConfigError(
            f"test data has {Xt.shape[1]} features, model expects {net.input_dim}"
        )
    prior = _build_prior(cfg, net.output_dim, out_dir)
    _check_prior_compatible(prior, net.output_dim)
    likelihood = _likelihood(cfg, net, seed)

    n_steps = cfg_get(cfg, "sampler.n_steps", "int", 2000)
    burn_in = cfg_get(cfg, "sampler.burn_in", "int", 500)
    n_chains = cfg_get(cfg, "sampler.n_chains", "int", 4)
    sigma = cfg_get(cfg, "sampler.proposal_sigma", "floats", [1.0])
    init_mode = cfg_get(cfg, "sampler.init", "str", "random_prior_draw")
    band = cfg_get(cfg, "sampler.target_band", "floats", None)
    max_cases = cfg_get(cfg, "sampler.max_cases", "int", None)

    n_cases = Xt.shape[0] if max_cases is None else min(max_cases, Xt.shape[0])
    ids = _case_ids(Xt.shape[0])[:n_cases]
    out_dir.mkdir(parents=True, exist_ok=True)
    chains_dir = out_dir / "chains"
    chains_dir.mkdir(exist_ok=True)

    sample_ids: list = []
    sample_rows: list = []
    predictions = np.empty((n_cases, net.output_dim))
    diagnostics: dict = {}
    for idx in range(n_cases):
        x = Xt[idx]
        predictions[idx] = net.forward(x)
        if init_mode == "forward_prediction":
            init = _initial_params(prior, predictions[idx])
        elif init_mode == "random_prior_draw":
            init = "random_prior_draw"
        else:
            raise ConfigError(f"unknown sampler.init {init_mode!r}")
        cfgs = [
            ChainConfig(
                n_steps=n_steps,
                burn_in=burn_in,
                proposal_sigma=tuple(sigma),
                seed=derive_seed(seed, _SEED_CHAINS, idx, c),
                init=init,
            )
            for c in range(n_chains)
        ]
        records, pooled = run_chains(likelihood, prior, x, cfgs)
        for c, record in enumerate(records):
            write_chain_csv(chains_dir / f"{ids[idx]}_chain{c}.csv", record)
        targets = prior.to_target_batch(pooled)
        sample_ids.extend([ids[idx]] * targets.shape[0])
        sample_rows.append(targets)
        rates = [rec.acceptance_rate for rec in records]
        mean_rate = float(np.mean(rates))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # degenerate chains already surface below
            diags = [chain_diagnostics(rec) for rec in records]
        ess_total = np.sum([d.ess for d in diags], axis=0)
        diagnostics[ids[idx]] = {
            "acceptance_rates": rates,
            "mean_acceptance_rate": mean_rate,
            "ess_per_dim": [float(v) for v in ess_total],
            "lag1_autocorr": [[float(v) for v in d.lag1_autocorr] for d in diags],
            "degenerate_chains": int(sum(d.degenerate for d in diags)),
            "inner_opt_failures": int(sum(r.inner_opt_failures for r in records)),
            "n_pooled_samples": int(targets.shape[0]),
        }
        line = f"{ids[idx]}: acceptance {mean_rate:.3f} over {n_chains} chains"
        if band is not None and not band[0] <= mean_rate <= band[1]:
            line += f"  WARNING: outside target band [{band[0]}, {band[1]}]"
        print(line)

    write_cases_csv(out_dir / "samples.csv", sample_ids, np.vstack(sample_rows))
    write_cases_csv(out_dir / "predictions.csv", ids, predictions)
    _write_json(out_dir / "diagnostics.json", diagnostics)
    print(f"wrote {len(sample_ids)} pooled samples for {n_cases} cases -> {out_dir}")
    return 0


def cmd_dropout(cfg: dict, out_dir: Path, seed: int) -> int:
    net = load_model(_require_file(
        cfg_get(cfg, "model.path", "str", str(out_dir / "model.txt")),
        "model file (run train first)",
    ))
    test_path = _require_file(_test_csv_path(cfg, out_dir), "test data")
    Xt, _ = read_dataset_csv(test_path)
    rate = cfg_get(cfg, "dropout.rate", "float", 0.5)
    n_samples = cfg_get(cfg, "dropout.n_samples", "int", 200)
    max_cases = cfg_get(cfg, "sampler.max_cases", "int", None)
    n_cases = Xt.shape[0] if max_cases is None else min(max_cases, Xt.shape[0])
    ids = _case_ids(Xt.shape[0])[:n_cases]

    out_dir.mkdir(parents=True, exist_ok=True)
    sample_ids: list = []
    blocks: list = []
    predictions = np.empty((n_cases, net.output_dim))
    for idx in range(n_cases):
        predictions[idx] = net.forward(Xt[idx])
        draws = dropout_sample(
            net, Xt[idx], n_samples, rate, seed=derive_seed(seed, _SEED_DROPOUT, idx)
        )
        sample_ids.extend([ids[idx]] * n_samples)
        blocks.append(draws)
    write_cases_csv(out_dir / "samples.csv", sample_ids, np.vstack(blocks))
    write_cases_csv(out_dir / "predictions.csv", ids, predictions)
    print(f"wrote {n_samples} dropout samples (rate {rate}) per case -> {out_dir}")
    return 0


def cmd_evaluate(cfg: dict, out_dir: Path, seed: int) -> int:
    samples_path = _require_file(
        cfg_get(cfg, "eval.samples", "str", str(out_dir / "samples.csv")),
        "pooled samples",
    )
    pred_path = _require_file(
        cfg_get(cfg, "eval.predictions", "str", str(out_dir / "predictions.csv")),
        "predictions",
    )
    truth_path = _require_file(
        cfg_get(cfg, "eval.truth", "str", str(out_dir / "truth.csv")),
        "ground truth",
    )
    sample_ids, sample_values = read_cases_csv(samples_path)
    pred_ids, pred_values = read_cases_csv(pred_path)
    truth_ids, truth_values = read_cases_csv(truth_path)
    groups = group_by_case(sample_ids, sample_values)
    preds = dict(zip(pred_ids, pred_values))
    truths = dict(zip(truth_ids, truth_values))

    missing_truth = [cid for cid in groups if cid not in truths]
    missing_pred = [cid for cid in groups if cid not in preds]
    if missing_truth or missing_pred:
        raise ValidationError(
            "case mismatch - missing from truth: "
            f"{missing_truth or 'none'}; missing from predictions: "
            f"{missing_pred or 'none'}"
        )

    kind = cfg_get(cfg, "eval.uncertainty", "str", None)
    cases = []
    uncertainties = []
    errors = []
    for cid, block in groups.items():
        summary = summarize_samples(block)
        d = block.shape[1]
        use = kind or ("std" if d == 1 else "trace")
        uncertainty = (
            float(summary.per_dim_std[0]) if use == "std" else summary.trace
        )
        error = rmse(preds[cid], truths[cid])
        uncertainties.append(uncertainty)
        errors.append(error)
        cases.append(
            {
                "case": cid,
                "n_samples": summary.n_samples,
                "trace": summary.trace,
                "per_dim_std": summary.per_dim_std.tolist(),
                "uncertainty": uncertainty,
                "rmse": error,
            }
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "summary.json", {"cases": cases})

    report = correlation_report(uncertainties, errors)
    _write_json(out_dir / "correlations.json", report)
    with open(out_dir / "correlations.csv", "w", encoding="ascii") as fh:
        fh.write("metric,r,p\n")
        fh.write(f"spearman,{report['spearman_r']!r},{report['spearman_p']!r}\n")
        fh.write(f"pearson,{report['pearson_r']!r},{report['pearson_p']!r}\n")
    print(
        f"{report['n_cases']} cases: spearman r={report['spearman_r']:.4f} "
        f"(p={report['spearman_p']:.3g}), pearson r={report['pearson_r']:.4f} "
        f"(p={report['pearson_p']:.3g})"
    )

    kde_case = cfg_get(cfg, "eval.kde_case", "str", None)
    first = next(iter(groups))
    target_case = kde_case if kde_case is not None else first
    if target_case not in groups:
        raise ValidationError(f"eval.kde_case {target_case!r} has no samples")
    block = groups[target_case]
    if block.shape[1] == 1:
        grid = kde_grid(block[:, 0])
        _write_kde_csv(out_dir / f"kde_case_{target_case}.csv", grid)
    else:
        for v in cfg_get(cfg, "eval.kde_vertices", "ints", []):
            if not 0 <= 2 * v + 1 < block.shape[1]:
                raise ConfigError(f"eval.kde_vertices: vertex {v} out of range")
            grid = kde_grid(block[:, 2 * v : 2 * v + 2], num=96)
            _write_kde_csv(out_dir / f"kde_vertex_{v}.csv", grid)
    return 0


def _write_kde_csv(path, grid) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        if len(grid.axes) == 1:
            fh.write("value,density\n")
            for v, d in zip(grid.axes[0], grid.density):
                fh.write(f"{v!r},{d!r}\n")
        else:
            fh.write("x,y,density\n")
            gx, gy = grid.axes
            for i, xv in enumerate(gx):
                for j, yv in enumerate(gy):
                    fh.write(f"{xv!r},{yv!r},{grid.density[i, j]!r}\n")


def cmd_tune(cfg: dict, out_dir: Path, seed: int) -> int:
    net = load_model(_require_file(
        cfg_get(cfg, "model.path", "str", str(out_dir / "model.txt")),
        "model file (run train first)",
    ))
    test_path = _require_file(_test_csv_path(cfg, out_dir), "test data")
    Xt, _ = read_dataset_csv(test_path)
    prior = _build_prior(cfg, net.output_dim, out_dir)
    _check_prior_compatible(prior, net.output_dim)
    likelihood = _likelihood(cfg, net, seed)

    case = cfg_get(cfg, "tune.case", "int", 0)
    if not 0 <= case < Xt.shape[0]:
        raise ConfigError(f"tune.case {case} out of range (have {Xt.shape[0]} cases)")
    default_band = [0.35, 0.45] if prior.dim == 1 else [0.15, 0.25]
    band = cfg_get(cfg, "tune.target_band", "floats", default_band)
    base = cfg_get(
        cfg,
        "tune.base_sigma",
        "floats",
        cfg_get(cfg, "sampler.proposal_sigma", "floats", [1.0]),
    )
    sigma, rate, history = tune_proposal_sigma(
        likelihood,
        prior,
        Xt[case],
        base_sigma=base,
        target_band=tuple(band),
        n_steps=cfg_get(cfg, "tune.n_steps", "int", 600),
        burn_in=cfg_get(cfg, "tune.burn_in", "int", 150),
        seed=derive_seed(seed, _SEED_TUNE),
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_dir / "tune.json",
        {
            "proposal_sigma": list(sigma),
            "acceptance_rate": rate,
            "target_band": list(band),
            "history": [{"scale": s, "rate": r} for s, r in history],
        },
    )
    in_band = band[0] <= rate <= band[1]
    print(
        f"tuned proposal_sigma = {list(sigma)} (acceptance {rate:.3f}, "
        f"target [{band[0]}, {band[1]}]{'' if in_band else ' NOT reached'})"
    )
    return 0


_COMMANDS = {
    "train": cmd_train,
    "pca-fit": cmd_pca_fit,
    "sample": cmd_sample,
    "dropout": cmd_dropout,
    "evaluate": cmd_evaluate,
    "tune": cmd_tune,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deepmh",
        description="Posterior sampling for trained regression networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override config out_dir")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg_get(cfg, "seed", "int", 0)
        out_dir = Path(args.out) if args.out else Path(cfg_get(cfg, "out_dir", "str"))
        return _COMMANDS[args.command](cfg, out_dir, seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DeepMHError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
