"""Compressor training: dithered soft quantization, joint loss, evaluation.

The loss is ``lam * d(X, Xhat) + e(Xhat)`` where d is the mean squared
reconstruction error per image (squared pixel norm averaged over the batch)
and e is the negative log likelihood the frozen classifier assigns to the
true digit on the reconstruction. Training quantizes with the differentiable
surrogate whose sharpness anneals linearly across epochs; evaluation uses
hard rounding. The decoder always receives the quantized latent minus the
shared dither.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn.functional as F

from .data import load_split
from .models import D_LATENT, Compressor, rate_bits
from .quantize import hard_quantize, sample_dither, soft_quantize
from .records import ExperimentRecord

EPOCHS = 30
LEARNING_RATE = 0.01
BATCH_SIZE = 64
TEMPERATURE_START = 1.0
TEMPERATURE_END = 10.0

EPOCH_LOG_COLUMNS = ("epoch", "mse", "nll")


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    mse: float
    nll: float


def _image_mse(x: torch.Tensor, xhat: torch.Tensor) -> torch.Tensor:
    """Mean over the batch of the squared pixel-error norm per image."""
    return ((xhat - x.view_as(xhat)) ** 2).sum(dim=(1, 2, 3)).mean()


def _temperature(epoch: int, epochs: int) -> float:
    if epochs == 1:
        return TEMPERATURE_END
    frac = (epoch - 1) / (epochs - 1)
    return TEMPERATURE_START + frac * (TEMPERATURE_END - TEMPERATURE_START)


def _codec_forward(model: Compressor, x: torch.Tensor, dither: torch.Tensor,
                   temperature: float | None) -> torch.Tensor:
    """Encode, quantize (soft during training, hard when temperature is None),
    subtract the dither, decode."""
    latent = model.encoder(x) + dither
    if temperature is None:
        z = hard_quantize(latent, model.levels)
    else:
        z = soft_quantize(latent, model.levels, temperature)
    return model.decoder(z - dither)


def evaluate_codec(model: Compressor, classifier: torch.nn.Module,
                   images: torch.Tensor, labels: torch.Tensor,
                   seed: int, batch_size: int = 512) -> tuple[float, float, float]:
    """Hard-quantized (mse, nll, accuracy) on a split, with fresh seeded dither."""
    gen = torch.Generator().manual_seed(seed)
    model.eval()
    classifier.eval()
    total_mse = total_nll = 0.0
    correct = 0
    n = images.shape[0]
    with torch.no_grad():
        for start in range(0, n, batch_size):
            x = images[start:start + batch_size]
            y = labels[start:start + batch_size]
            dither = sample_dither((x.shape[0], D_LATENT), model.levels, gen)
            xhat = _codec_forward(model, x, dither, temperature=None)
            logp = classifier(xhat)
            total_mse += float(_image_mse(x, xhat)) * x.shape[0]
            total_nll += float(F.nll_loss(logp, y, reduction="sum"))
            correct += int((logp.argmax(dim=1) == y).sum())
    return total_mse / n, total_nll / n, correct / n


def train_compressor(lam: float, levels: int, classifier: torch.nn.Module,
                     data_dir=None, epochs: int = EPOCHS, lr: float = LEARNING_RATE,
                     batch_size: int = BATCH_SIZE, seed: int = 0,
                     data=None, log=None):
    """Train one (lam, levels) configuration.

    Returns (ExperimentRecord, list[EpochLog], model). ``data`` may inject
    ((train_x, train_y), (test_x, test_y)) numpy arrays, mainly for tests;
    otherwise the standard splits are loaded. Raises RuntimeError if the loss
    goes non-finite.
    """
    if lam < 0:
        raise ValueError("loss weight must be nonnegative")
    if data is None:
        data = (load_split("train", data_dir), load_split("test", data_dir))
    (train_x, train_y), (test_x, test_y) = data
    train_x = torch.as_tensor(train_x)
    train_y = torch.as_tensor(train_y)
    test_x = torch.as_tensor(test_x)
    test_y = torch.as_tensor(test_y)

    torch.manual_seed(seed)
    model = Compressor(levels)
    opt = torch.optim.SGD(model.parameters(), lr=lr)
    shuffler = torch.Generator().manual_seed(seed + 1)
    dither_gen = torch.Generator().manual_seed(seed + 2)
    classifier.eval()

    n = train_x.shape[0]
    epoch_logs: list[EpochLog] = []
    for epoch in range(1, epochs + 1):
        temperature = _temperature(epoch, epochs)
        model.train()
        order = torch.randperm(n, generator=shuffler)
        sum_mse = sum_nll = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            x = train_x[idx]
            dither = sample_dither((idx.shape[0], D_LATENT), levels, dither_gen)
            opt.zero_grad()
            xhat = _codec_forward(model, x, dither, temperature)
            mse = _image_mse(x, xhat)
            nll = F.nll_loss(classifier(xhat), train_y[idx])
            loss = lam * mse + nll
            if not torch.isfinite(loss.detach()):
                raise RuntimeError(
                    f"training diverged: non-finite loss at epoch {epoch} "
                    f"(lam={lam}, levels={levels}, seed={seed}, "
                    f"mse={float(mse)!r}, nll={float(nll)!r})")
            loss.backward()
            opt.step()
            sum_mse += float(mse.detach()) * idx.shape[0]
            sum_nll += float(nll.detach()) * idx.shape[0]
        epoch_logs.append(EpochLog(epoch=epoch, mse=sum_mse / n, nll=sum_nll / n))
        if log is not None:
            log(f"lam={lam} L={levels} seed={seed} epoch {epoch}/{epochs}: "
                f"mse {sum_mse / n:.4f} nll {sum_nll / n:.4f} (T={temperature:.1f})")

    mse_train, nll_train, _ = evaluate_codec(model, classifier, train_x, train_y, seed + 3)
    mse_test, nll_test, acc_test = evaluate_codec(model, classifier, test_x, test_y, seed + 4)
    record = ExperimentRecord(
        lam=lam, levels=levels, rate_bits=rate_bits(levels),
        mse_train=mse_train, nll_train=nll_train,
        mse_test=mse_test, nll_test=nll_test, acc_test=acc_test,
        epochs=epochs, seed=seed)
    return record, epoch_logs, model


def epoch_log_path(out_dir, levels: int, lam: float, seed: int) -> Path:
    return Path(out_dir) / f"epochs_L{levels}_lam{lam:g}_seed{seed}.csv"


def write_epoch_logs(path, logs: list[EpochLog]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EPOCH_LOG_COLUMNS)
        for entry in logs:
            writer.writerow([entry.epoch, repr(entry.mse), repr(entry.nll)])


def read_epoch_logs(path) -> list[EpochLog]:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != EPOCH_LOG_COLUMNS:
        raise ValueError(f"{path}: unexpected epoch-log header")
    return [EpochLog(epoch=int(r[0]), mse=float(r[1]), nll=float(r[2])) for r in rows[1:]]
