"""Kernel mean p-power error (KMPE) losses, robust ELM training and robust PCA."""
from .core import (
    KernelParams,
    c_loss,
    convexity_min_p,
    empirical_correntropy,
    empirical_kmpe,
    gaussian_kernel,
    kmpe_hessian_diag,
    kmpe_weight,
    run_property_suite,
)
from .data import Dataset, NoiseModel, gen_lowrank_corrupted, gen_sinc
from .elm import HiddenLayer, TrainConfig, init_hidden, predict, train_kmpe, train_ls
from .errors import (
    DegenerateWeightsError,
    DivergenceError,
    DomainError,
    ParseError,
    SingularSystemError,
)
from .metrics import clustering_accuracy, hungarian_map, kmeans, nmi, rmse
from .pca import PcaConfig, Subspace, avg_reconstruction_error, fit_kmpe, fit_l2

__version__ = "0.1.0"
