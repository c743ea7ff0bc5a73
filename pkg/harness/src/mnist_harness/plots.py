"""Figures rendered from the CSV outputs only (no model objects needed).

fig2_<L>_<lambda>.png: per-epoch training losses for one run.
fig3a.png: distortion loss vs classification loss, one series per rate.
fig3b.png: rate / distortion / classification scatter in 3-D.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .compress import read_epoch_logs  # noqa: E402
from .records import load_records  # noqa: E402


def plot_training_losses(epoch_log_csv, out_path) -> Path:
    logs = read_epoch_logs(epoch_log_csv)
    epochs = [entry.epoch for entry in logs]
    fig, (ax_d, ax_c) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_d.plot(epochs, [entry.mse for entry in logs])
    ax_d.set_xlabel("epoch")
    ax_d.set_ylabel("distortion loss (MSE)")
    ax_c.plot(epochs, [entry.nll for entry in logs])
    ax_c.set_xlabel("epoch")
    ax_c.set_ylabel("classification loss (NLL)")
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_tradeoff_2d(records_csv, out_path) -> Path:
    records = load_records(records_csv)
    by_levels = defaultdict(list)
    for rec in records:
        by_levels[rec.levels].append(rec)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for levels in sorted(by_levels):
        group = sorted(by_levels[levels], key=lambda r: r.lam)
        ax.plot([r.mse_train for r in group], [r.nll_train for r in group],
                "o-", label=f"L={levels} ({group[0].rate_bits:.2f} bits)")
    ax.set_xlabel("distortion loss (train MSE)")
    ax.set_ylabel("classification loss (train NLL)")
    ax.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_tradeoff_3d(records_csv, out_path) -> Path:
    records = load_records(records_csv)
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    ax.scatter([r.rate_bits for r in records],
               [r.mse_train for r in records],
               [r.nll_train for r in records],
               c=[r.rate_bits for r in records], cmap="viridis")
    ax.set_xlabel("rate (bits)")
    ax.set_ylabel("distortion loss")
    ax.set_zlabel("classification loss")
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
