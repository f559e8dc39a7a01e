"""Self-supervised redundancy-reduction objectives with algebraic cross-checks.

Core pieces:

* features   — standardization + cross-correlation matrix
* hsic       — kernel Gram matrices and the dependence estimator
* losses     — barlow_twins / hsic_ssl objectives and analytic gradients
* synthgen   — seeded synthetic two-view datasets + CSV ingestion
* trainer    — desk-scale MLP training and linear-probe evaluation
* cli        — train / sweep / verify / eval subcommands
"""

from ._kernels import available_backends, backend_name
from .features import (CorrMatrix, FeatureBatch, RawBatch, cross_correlation,
                       standardize)
from .hsic import (GramMatrix, KernelSpec, centering_matrix, gram,
                   hsic_empirical, hsic_linear_fast)
from .losses import (Lambda, LossKind, LossReport, LossTerms,
                     barlow_twins_loss, default_lambda, hsic_ssl_loss,
                     loss_gradients, loss_value, squared_view_distance)
from .synthgen import (AugmentSpec, GenConfig, TwoViewDataset, generate,
                       load_paired_csv)
from .trainer import (EncoderConfig, ProbeResult, TrainConfig, TrainedModel,
                      extract_features, linear_probe, load_checkpoint,
                      save_checkpoint, train)

__version__ = "0.1.0"

__all__ = [
    "CorrMatrix", "FeatureBatch", "RawBatch", "cross_correlation",
    "standardize", "GramMatrix", "KernelSpec", "centering_matrix", "gram",
    "hsic_empirical", "hsic_linear_fast", "Lambda", "LossKind", "LossReport",
    "LossTerms", "barlow_twins_loss", "default_lambda", "hsic_ssl_loss",
    "loss_gradients", "loss_value", "squared_view_distance",
    "AugmentSpec", "GenConfig", "TwoViewDataset", "generate", "load_paired_csv",
    "EncoderConfig", "ProbeResult", "TrainConfig", "TrainedModel",
    "extract_features", "linear_probe", "load_checkpoint", "save_checkpoint",
    "train", "available_backends", "backend_name", "__version__",
]
