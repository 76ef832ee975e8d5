"""Sliding-window convolution kernels and their im2col/GEMM baseline."""

from ._slideconv import (
    FilterWidthError,
    ShapeError,
    VariantError,
    benchmark,
    bloat_ratio,
    conv2d,
    im2col,
    mac_count,
    oracle_conv2d,
    select_kernel,
    slide,
    sliding_window_max,
    sliding_window_sum,
    variants,
    verify,
)

__all__ = [
    "FilterWidthError",
    "ShapeError",
    "VariantError",
    "benchmark",
    "bloat_ratio",
    "conv2d",
    "im2col",
    "mac_count",
    "oracle_conv2d",
    "select_kernel",
    "slide",
    "sliding_window_max",
    "sliding_window_sum",
    "variants",
    "verify",
]
