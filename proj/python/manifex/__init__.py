"""Function extension on sampled manifolds.

Normalized Gaussian-kernel estimator over SVD-projected coordinates with
adaptive per-query bandwidths, exact online updates, and a parallel-beam
sparse-view CT pipeline (phantom, Radon transform, FBP, spline baseline).
"""

from ._core import (
    ErrorReport,
    EvaluationCache,
    ExperimentConfig,
    ExtenderModel,
    ProjectionBasis,
    Sinogram,
    __version__,
    add_noise,
    embed_angles,
    evaluate_cached,
    extend,
    extend_batch,
    fbp,
    fit,
    frobenius_error,
    load_model,
    radon_forward,
    run_ct,
    run_spiral,
    save_model,
    shepp_logan,
    spline_interpolate_sinogram,
    update,
)

__all__ = [
    "ErrorReport",
    "EvaluationCache",
    "ExperimentConfig",
    "ExtenderModel",
    "ProjectionBasis",
    "Sinogram",
    "__version__",
    "add_noise",
    "embed_angles",
    "evaluate_cached",
    "extend",
    "extend_batch",
    "fbp",
    "fit",
    "frobenius_error",
    "load_model",
    "radon_forward",
    "run_ct",
    "run_spiral",
    "save_model",
    "shepp_logan",
    "spline_interpolate_sinogram",
    "update",
]
