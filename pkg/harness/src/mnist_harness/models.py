"""Autoencoder and digit-classifier architectures.

Encoder: five linear blocks with one-dimensional batch norm, LeakyReLU
between them and Tanh at the end, mapping 784 pixels to a 3-dimensional
latent in [-1, 1]. Decoder: two linear blocks, a reshape to 32x4x4, then
three transposed convolutions (4 -> 11 -> 25 -> 28 spatially) ending in a
Sigmoid so reconstructions live in [0, 1] like the inputs.

The classifier is the two-conv / two-linear net with max pooling, a 0.5
dropout before the final layer, and log-softmax outputs (21,840 trainable
parameters in total).
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F
from torch import nn

N = 128
D_INPUT = 784
D_LATENT = 3


def rate_bits(levels: int) -> float:
    """Fixed-rate accounting: latent dimension times log2(levels)."""
    if levels < 2:
        raise ValueError("need at least 2 quantization levels")
    return D_LATENT * math.log2(levels)


def _linear_block(d_in: int, d_out: int) -> list[nn.Module]:
    return [nn.Linear(d_in, d_out), nn.BatchNorm1d(d_out), nn.LeakyReLU()]


class Encoder(nn.Module):
    def __init__(self):
        super().__init__()
        self.net = nn.Sequential(
            *_linear_block(D_INPUT, 4 * N),
            *_linear_block(4 * N, 2 * N),
            *_linear_block(2 * N, N),
            *_linear_block(N, N),
            nn.Linear(N, D_LATENT),
            nn.BatchNorm1d(D_LATENT),
            nn.Tanh(),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class Decoder(nn.Module):
    def __init__(self):
        super().__init__()
        self.linear = nn.Sequential(
            *_linear_block(D_LATENT, 128),
            *_linear_block(128, 512),
        )
        # 512 features reshape to (32, 4, 4); kernel/stride choices walk the
        # spatial size 4 -> 11 -> 25 -> 28
        self.deconv = nn.Sequential(
            nn.ConvTranspose2d(32, 64, kernel_size=5, stride=2),
            nn.BatchNorm2d(64),
            nn.LeakyReLU(),
            nn.ConvTranspose2d(64, 128, kernel_size=5, stride=2),
            nn.BatchNorm2d(128),
            nn.LeakyReLU(),
            nn.ConvTranspose2d(128, 1, kernel_size=4, stride=1),
            nn.Sigmoid(),
        )

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        h = self.linear(z).view(-1, 32, 4, 4)
        return self.deconv(h)


class Compressor(nn.Module):
    """Encoder/decoder pair with a fixed number of quantization levels."""

    def __init__(self, levels: int):
        super().__init__()
        if levels < 2:
            raise ValueError("need at least 2 quantization levels")
        self.levels = levels
        self.encoder = Encoder()
        self.decoder = Decoder()

    @property
    def rate_bits(self) -> float:
        return rate_bits(self.levels)


class DigitClassifier(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv1 = nn.Conv2d(1, 10, kernel_size=5)
        self.conv2 = nn.Conv2d(10, 20, kernel_size=5)
        self.fc1 = nn.Linear(320, 50)
        self.fc2 = nn.Linear(50, 10)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = F.relu(F.max_pool2d(self.conv1(x), 2))
        x = F.relu(F.max_pool2d(self.conv2(x), 2))
        x = x.flatten(1)
        x = F.relu(self.fc1(x))
        x = F.dropout(x, p=0.5, training=self.training)
        return F.log_softmax(self.fc2(x), dim=1)

    def layer_parameter_counts(self) -> dict[str, int]:
        count = lambda m: sum(p.numel() for p in m.parameters())
        return {
            "conv1": count(self.conv1),
            "conv2": count(self.conv2),
            "fc1": count(self.fc1),
            "fc2": count(self.fc2),
        }
