"""Pretraining and evaluation of the frozen digit classifier."""

from __future__ import annotations

from pathlib import Path

import torch
import torch.nn.functional as F

from .data import load_split
from .models import DigitClassifier

EPOCHS = 20
LEARNING_RATE = 0.01
BATCH_SIZE = 64
ACCURACY_FLOOR = 0.98


def evaluate_accuracy(model: torch.nn.Module, images: torch.Tensor,
                      labels: torch.Tensor, batch_size: int = 1024) -> float:
    model.eval()
    correct = 0
    with torch.no_grad():
        for start in range(0, images.shape[0], batch_size):
            x = images[start:start + batch_size].view(-1, 1, 28, 28)
            pred = model(x).argmax(dim=1)
            correct += int((pred == labels[start:start + batch_size]).sum())
    return correct / images.shape[0]


def pretrain_classifier(data_dir=None, epochs: int = EPOCHS, lr: float = LEARNING_RATE,
                        batch_size: int = BATCH_SIZE, seed: int = 0,
                        log=None) -> tuple[DigitClassifier, float]:
    """Train the classifier on raw images; returns (model, test accuracy)."""
    train_x, train_y = load_split("train", data_dir)
    test_x, test_y = load_split("test", data_dir)
    train_x = torch.from_numpy(train_x)
    train_y = torch.from_numpy(train_y)
    test_x = torch.from_numpy(test_x)
    test_y = torch.from_numpy(test_y)

    torch.manual_seed(seed)
    model = DigitClassifier()
    opt = torch.optim.SGD(model.parameters(), lr=lr)
    shuffler = torch.Generator().manual_seed(seed + 1)
    n = train_x.shape[0]
    for epoch in range(1, epochs + 1):
        model.train()
        order = torch.randperm(n, generator=shuffler)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            x = train_x[idx].view(-1, 1, 28, 28)
            opt.zero_grad()
            loss = F.nll_loss(model(x), train_y[idx])
            loss.backward()
            opt.step()
            total += float(loss) * idx.shape[0]
        if log is not None:
            log(f"classifier epoch {epoch}/{epochs}: train nll {total / n:.4f}")
    accuracy = evaluate_accuracy(model, test_x, test_y)
    if log is not None:
        log(f"classifier test accuracy: {accuracy:.4f}")
    return model, accuracy


def ensure_classifier(weights_path, data_dir=None, min_accuracy: float = ACCURACY_FLOOR,
                      retries: int = 1, log=None) -> tuple[DigitClassifier, float]:
    """Load cached weights if present, else train (retrying once on a new seed).

    The returned model is frozen (parameters no longer require gradients) and
    in eval mode.
    """
    weights_path = Path(weights_path)
    if weights_path.exists():
        model = DigitClassifier()
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model.load_state_dict(state["model"])
        accuracy = float(state["test_accuracy"])
    else:
        accuracy = -1.0
        model = None
        for attempt in range(retries + 1):
            model, accuracy = pretrain_classifier(data_dir=data_dir, seed=attempt, log=log)
            if accuracy >= min_accuracy:
                break
        weights_path.parent.mkdir(parents=True, exist_ok=True)
        torch.save({"model": model.state_dict(), "test_accuracy": accuracy}, weights_path)
    if accuracy < min_accuracy:
        raise RuntimeError(
            f"classifier accuracy {accuracy:.4f} below the {min_accuracy:.2%} floor")
    model.eval()
    for param in model.parameters():
        param.requires_grad_(False)
    return model, accuracy
