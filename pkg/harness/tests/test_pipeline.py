"""Fast end-to-end checks on tiny injected datasets (no real training)."""

import math

import numpy as np
import pytest
import torch

from mnist_harness.compress import epoch_log_path, train_compressor
from mnist_harness.models import DigitClassifier
from mnist_harness.plots import plot_tradeoff_2d, plot_tradeoff_3d, plot_training_losses
from mnist_harness.records import ExperimentRecord, append_record
from mnist_harness.compress import EpochLog, write_epoch_logs


@pytest.fixture(scope="module")
def tiny_data():
    rng = np.random.default_rng(0)
    def split(n):
        images = rng.random((n, 784), dtype=np.float32)
        labels = rng.integers(0, 10, size=n).astype(np.int64)
        return images, labels
    return split(512), split(128)


@pytest.fixture(scope="module")
def frozen_classifier():
    torch.manual_seed(0)
    model = DigitClassifier().eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model


class TestTrainCompressor:
    def test_record_and_logs(self, tiny_data, frozen_classifier):
        record, logs, model = train_compressor(
            0.015, 3, frozen_classifier, data=tiny_data, epochs=2, seed=0)
        assert len(logs) == 2
        assert record.rate_bits == pytest.approx(3 * math.log2(3))
        for value in (record.mse_train, record.nll_train, record.mse_test,
                      record.nll_test):
            assert np.isfinite(value) and value >= 0
        assert 0.0 <= record.acc_test <= 1.0
        assert record.seed == 0 and record.epochs == 2

    def test_seed_reproducible(self, tiny_data, frozen_classifier):
        rec_a, logs_a, _ = train_compressor(0.01, 2, frozen_classifier,
                                            data=tiny_data, epochs=1, seed=5)
        rec_b, logs_b, _ = train_compressor(0.01, 2, frozen_classifier,
                                            data=tiny_data, epochs=1, seed=5)
        assert logs_a == logs_b
        assert rec_a.mse_test == rec_b.mse_test

    def test_zero_weight_trains_classification_only(self, tiny_data, frozen_classifier):
        record, logs, _ = train_compressor(0.0, 2, frozen_classifier,
                                           data=tiny_data, epochs=1, seed=0)
        assert np.isfinite(record.nll_train)

    def test_negative_weight_rejected(self, tiny_data, frozen_classifier):
        with pytest.raises(ValueError):
            train_compressor(-0.1, 3, frozen_classifier, data=tiny_data, epochs=1)


class TestPlots:
    def test_figures_from_csv_only(self, tmp_path):
        records = tmp_path / "records.csv"
        for levels in (2, 5):
            for lam in (0.005, 0.015):
                append_record(records, ExperimentRecord(
                    lam=lam, levels=levels, rate_bits=3 * math.log2(levels),
                    mse_train=60.0 / levels + lam * 100, nll_train=1.0 / levels,
                    mse_test=65.0 / levels, nll_test=1.1 / levels,
                    acc_test=0.8, epochs=30, seed=0))
        logs = tmp_path / "epochs_L3_lam0.015_seed0.csv"
        write_epoch_logs(logs, [EpochLog(i, 100.0 / i, 2.0 / i) for i in range(1, 31)])
        out1 = plot_tradeoff_2d(records, tmp_path / "fig3a.png")
        out2 = plot_tradeoff_3d(records, tmp_path / "fig3b.png")
        out3 = plot_training_losses(logs, tmp_path / "fig2_3_0.015.png")
        for path in (out1, out2, out3):
            assert path.exists() and path.stat().st_size > 0

    def test_epoch_log_path_naming(self, tmp_path):
        path = epoch_log_path(tmp_path, 3, 0.015, 1)
        assert path.name == "epochs_L3_lam0.015_seed1.csv"

    def test_cli_plot_command(self, tmp_path):
        from mnist_harness.cli import main

        records = tmp_path / "records.csv"
        append_record(records, ExperimentRecord(
            lam=0.01, levels=2, rate_bits=3.0, mse_train=50.0, nll_train=1.0,
            mse_test=52.0, nll_test=1.1, acc_test=0.7, epochs=30, seed=0))
        write_epoch_logs(tmp_path / "epochs_L2_lam0.01_seed0.csv",
                         [EpochLog(i, 90.0 / i, 2.0 / i) for i in range(1, 31)])
        out_dir = tmp_path / "figures"
        code = main(["plot", "--records", str(records), "--run-dir", str(tmp_path),
                     "--out-dir", str(out_dir)])
        assert code == 0
        assert (out_dir / "fig3a.png").exists()
        assert (out_dir / "fig3b.png").exists()
        assert (out_dir / "fig2_2_0.01.png").exists()
