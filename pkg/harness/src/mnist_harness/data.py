"""MNIST loading from the standard IDX distribution files.

Expects the four original files (train/t10k images and labels) in a data
directory, default ``/root/data/mnist`` or ``$MNIST_DATA_DIR``. Any MNIST
mirror provides them; offline, the npm package ``mnist-data`` ships the exact
files (``npm pack mnist-data`` and extract ``package/data/``).
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

DEFAULT_DATA_DIR = os.environ.get("MNIST_DATA_DIR", "/root/data/mnist")

FILES = {
    ("train", "images"): "train-images-idx3-ubyte",
    ("train", "labels"): "train-labels-idx1-ubyte",
    ("test", "images"): "t10k-images-idx3-ubyte",
    ("test", "labels"): "t10k-labels-idx1-ubyte",
}


class DatasetUnavailable(Exception):
    """The MNIST IDX files are not present in the data directory."""


def read_idx(path) -> np.ndarray:
    """Parse one IDX file (unsigned-byte payloads only, which MNIST uses)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4 or blob[0] != 0 or blob[1] != 0:
        raise ValueError(f"{path}: not an IDX file")
    dtype_code, ndim = blob[2], blob[3]
    if dtype_code != 0x08:
        raise ValueError(f"{path}: unsupported IDX dtype 0x{dtype_code:02x}")
    dims = struct.unpack(f">{ndim}I", blob[4:4 + 4 * ndim])
    data = np.frombuffer(blob, dtype=np.uint8, offset=4 + 4 * ndim)
    expected = int(np.prod(dims))
    if data.size != expected:
        raise ValueError(f"{path}: payload has {data.size} bytes, header says {expected}")
    return data.reshape(dims)


def dataset_available(data_dir=None) -> bool:
    root = Path(data_dir or DEFAULT_DATA_DIR)
    return all((root / name).exists() for name in FILES.values())


def load_split(split: str, data_dir=None):
    """Return (images, labels): float32 images in [0, 1] shaped (n, 784), int64 labels."""
    if split not in ("train", "test"):
        raise ValueError("split must be 'train' or 'test'")
    root = Path(data_dir or DEFAULT_DATA_DIR)
    if not dataset_available(root):
        raise DatasetUnavailable(
            f"MNIST IDX files not found under {root}; place the four standard "
            "files there or set MNIST_DATA_DIR")
    images = read_idx(root / FILES[(split, "images")])
    labels = read_idx(root / FILES[(split, "labels")])
    if images.ndim != 3 or images.shape[1:] != (28, 28):
        raise ValueError(f"unexpected image shape {images.shape}")
    if labels.shape != (images.shape[0],):
        raise ValueError("image/label counts differ")
    flat = images.reshape(images.shape[0], 784).astype(np.float32) / 255.0
    return flat, labels.astype(np.int64)
