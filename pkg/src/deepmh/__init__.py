"""Posterior sampling for trained feed-forward regression networks.

Train (or load) a small dense network, wrap it in an energy-based
likelihood driven by input-space optimization, pick a prior over targets,
and run Metropolis-Hastings chains to sample the aleatoric predictive
posterior at any test input.
"""

from .exceptions import (
    ConfigError,
    DeepMHError,
    ModelFileError,
    OptimizationDivergedError,
    RankDeficiencyError,
    TrainingDivergedError,
    ValidationError,
)
from .inverse import EnergyResult, InputBackpropLikelihood
from .metrics import (
    PosteriorSummary,
    correlation_report,
    count_modes,
    kde_grid,
    pearson,
    rmse,
    spearman,
    summarize_samples,
)
from .network import (
    DenseLayer,
    FeedForwardRegressor,
    Network,
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
    central_box,
)
from .sampler import (
    ChainConfig,
    ChainRecord,
    ChainState,
    DeepMHSampler,
    SamplingResult,
    chain_diagnostics,
    chain_step,
    gaussian_proposal,
    log_accept_ratio,
    run_chain,
    run_chains,
    tune_proposal_sigma,
)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ChainRecord",
    "ChainState",
    "ConfigError",
    "DeepMHError",
    "DeepMHSampler",
    "DenseLayer",
    "EnergyResult",
    "FeedForwardRegressor",
    "InputBackpropLikelihood",
    "Kde1dPrior",
    "ModelFileError",
    "Network",
    "OptimizationDivergedError",
    "PcaShapeModel",
    "PcaShapeTargetPrior",
    "PosteriorSummary",
    "RankDeficiencyError",
    "SamplingResult",
    "StandardGaussianPrior",
    "TargetPrior",
    "TrainConfig",
    "TrainingDivergedError",
    "UniformBoxPrior",
    "ValidationError",
    "central_box",
    "chain_diagnostics",
    "chain_step",
    "correlation_report",
    "count_modes",
    "dropout_sample",
    "gaussian_proposal",
    "init_network",
    "kde_grid",
    "load_model",
    "load_pca",
    "log_accept_ratio",
    "pearson",
    "rmse",
    "run_chain",
    "run_chains",
    "save_model",
    "save_pca",
    "spearman",
    "summarize_samples",
    "train_sgd",
    "tune_proposal_sigma",
]
