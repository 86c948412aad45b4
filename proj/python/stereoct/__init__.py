"""Stereo census robustness toolkit.

Images are float64 (H, W) arrays in [0, 1]; disparity maps are float64
(H, W) with NaN marking invalid pixels; masks are bool (H, W).
"""

from ._stereoct import (
    CostVolume,
    __version__,
    apply_perturbation,
    build_cost_volume,
    eval_mask,
    forward_loss,
    grad_loss,
    make_scene,
    metrics,
    occlusion_mask,
    pgd_attack,
    read_pfm,
    read_pgm,
    sgm_aggregate,
    soft_argmin,
    write_pfm,
    write_pgm,
    wta,
)

__all__ = [
    "CostVolume",
    "__version__",
    "apply_perturbation",
    "build_cost_volume",
    "eval_mask",
    "forward_loss",
    "grad_loss",
    "make_scene",
    "metrics",
    "occlusion_mask",
    "pgd_attack",
    "read_pfm",
    "read_pgm",
    "sgm_aggregate",
    "soft_argmin",
    "write_pfm",
    "write_pgm",
    "wta",
]
