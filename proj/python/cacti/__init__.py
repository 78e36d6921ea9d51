"""Coded aperture compressive temporal imaging: forward model and GAP reconstruction.

Cubes are numpy arrays shaped (frames, rows, cols); snapshots and masks are
(rows, cols).
"""

from ._cacti import (
    CactiError,
    ForwardOperator,
    baseline_replicate,
    build_operator,
    build_rerandomized_operator,
    decode_ccv1,
    encode_ccv1,
    generate_mask,
    generate_scene,
    normalized_residual,
    project_linear_manifold,
    psnr,
    read_ccv1,
    solve,
    sum_frames,
    temporal_spectrum_check,
    transform,
    triangle_positions,
    write_ccv1,
)

__all__ = [
    "CactiError",
    "ForwardOperator",
    "baseline_replicate",
    "build_operator",
    "build_rerandomized_operator",
    "decode_ccv1",
    "encode_ccv1",
    "generate_mask",
    "generate_scene",
    "normalized_residual",
    "project_linear_manifold",
    "psnr",
    "read_ccv1",
    "solve",
    "sum_frames",
    "temporal_spectrum_check",
    "transform",
    "triangle_positions",
    "write_ccv1",
]
