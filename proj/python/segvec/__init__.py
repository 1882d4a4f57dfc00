"""Raster to SVG vectorization by filtered segmentation masks and differentiable refinement."""

from ._core import (
    BezierPath,
    PipelineConfig,
    VectorDocument,
    auto_segment,
    detect_missing,
    filter_by_impact,
    load_image,
    make_circular_kernel,
    mse_loss,
    parse_svg,
    prompt_segment,
    read_svg,
    render,
    save_image,
    stats,
    to_svg,
    trace_mask,
    vectorize,
    write_svg,
    xing_loss,
)

__all__ = [
    "BezierPath",
    "PipelineConfig",
    "VectorDocument",
    "auto_segment",
    "detect_missing",
    "filter_by_impact",
    "load_image",
    "make_circular_kernel",
    "mse_loss",
    "parse_svg",
    "prompt_segment",
    "read_svg",
    "render",
    "save_image",
    "stats",
    "to_svg",
    "trace_mask",
    "vectorize",
    "write_svg",
    "xing_loss",
]
