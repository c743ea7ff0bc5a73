"""Dithered scalar quantization over the encoder's [-1, 1] output range.

The L levels are -1 + k * step with step 2/(L-1), so the grid spans the Tanh
range exactly for every L (for even L the grid sits between the step
multiples; the level set, not the formula's origin, is what matters after the
shift). Shared uniform dither of width one quantization bin is added before
rounding and subtracted again at the decoder. Training uses a softmax-weighted
differentiable surrogate whose sharpness grows over training; evaluation uses
hard rounding.
"""

from __future__ import annotations

import torch


def quant_step(levels: int) -> float:
    if levels < 2:
        raise ValueError("need at least 2 quantization levels")
    return 2.0 / (levels - 1)


def noise_bound(levels: int) -> float:
    """Half a quantization bin: dither is uniform on [-bound, bound]."""
    return 1.0 / (levels - 1)


def level_centers(levels: int) -> torch.Tensor:
    step = quant_step(levels)
    return -1.0 + step * torch.arange(levels, dtype=torch.get_default_dtype())


def sample_dither(shape, levels: int, generator: torch.Generator | None = None) -> torch.Tensor:
    bound = noise_bound(levels)
    return (torch.rand(shape, generator=generator) * 2.0 - 1.0) * bound


def hard_quantize(values: torch.Tensor, levels: int) -> torch.Tensor:
    """Round to the nearest level, saturating at the range ends."""
    step = quant_step(levels)
    idx = torch.round((values + 1.0) / step).clamp_(0, levels - 1)
    return -1.0 + idx * step


def soft_quantize(values: torch.Tensor, levels: int, temperature: float) -> torch.Tensor:
    """Softmax-weighted average of the levels; sharper temperature, harder rounding."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    centers = level_centers(levels).to(values.dtype)
    sq_dist = (values.unsqueeze(-1) - centers) ** 2
    weights = torch.softmax(-temperature * sq_dist, dim=-1)
    return (weights * centers).sum(dim=-1)
