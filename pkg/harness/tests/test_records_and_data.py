import math
import struct

import numpy as np
import pytest

from mnist_harness.compress import EpochLog, read_epoch_logs, write_epoch_logs
from mnist_harness.data import DatasetUnavailable, dataset_available, load_split, read_idx
from mnist_harness.records import (
    CSV_COLUMNS,
    ExperimentRecord,
    append_record,
    existing_keys,
    load_records,
)


def record(lam=0.01, levels=3, seed=0, **kw):
    fields = dict(lam=lam, levels=levels, rate_bits=3 * math.log2(levels),
                  mse_train=50.0, nll_train=0.5, mse_test=55.0, nll_test=0.6,
                  acc_test=0.9, epochs=30, seed=seed)
    fields.update(kw)
    return ExperimentRecord(**fields)


class TestRecords:
    def test_schema_header(self, tmp_path):
        path = tmp_path / "records.csv"
        append_record(path, record())
        header = path.read_text().splitlines()[0]
        assert header == "lambda,L,rate_bits,mse_train,nll_train,mse_test,nll_test,acc_test,seed"
        assert CSV_COLUMNS == tuple(header.split(","))

    def test_round_trip(self, tmp_path):
        path = tmp_path / "records.csv"
        append_record(path, record(lam=0.005, levels=5, seed=2))
        got = load_records(path)[0]
        assert got.key == (0.005, 5, 2)
        assert got.mse_train == pytest.approx(50.0)
        assert got.rate_bits == pytest.approx(3 * math.log2(5))

    def test_append_resume(self, tmp_path):
        path = tmp_path / "records.csv"
        append_record(path, record(seed=0))
        append_record(path, record(seed=1))
        keys = existing_keys(path)
        assert (0.01, 3, 0) in keys and (0.01, 3, 1) in keys
        assert (0.01, 3, 2) not in keys
        assert len(load_records(path)) == 2

    def test_rate_invariant_enforced(self):
        with pytest.raises(ValueError):
            record(levels=4, rate_bits=5.0)

    def test_negative_loss_rejected(self):
        with pytest.raises(ValueError):
            record(mse_train=-1.0)

    def test_missing_file_empty(self, tmp_path):
        assert load_records(tmp_path / "none.csv") == []


class TestEpochLogs:
    def test_round_trip(self, tmp_path):
        logs = [EpochLog(1, 120.0, 2.3), EpochLog(2, 80.5, 1.1)]
        path = tmp_path / "epochs.csv"
        write_epoch_logs(path, logs)
        assert read_epoch_logs(path) == logs


class TestIdx:
    def synthetic_idx(self, tmp_path, dims, payload):
        blob = bytes([0, 0, 0x08, len(dims)]) + struct.pack(f">{len(dims)}I", *dims) + bytes(payload)
        path = tmp_path / "file-idx"
        path.write_bytes(blob)
        return path

    def test_parse_synthetic(self, tmp_path):
        path = self.synthetic_idx(tmp_path, (2, 3), range(6))
        arr = read_idx(path)
        np.testing.assert_array_equal(arr, [[0, 1, 2], [3, 4, 5]])

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad"
        path.write_bytes(b"\x01\x02\x03\x04rest")
        with pytest.raises(ValueError):
            read_idx(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = self.synthetic_idx(tmp_path, (4,), range(2))
        with pytest.raises(ValueError):
            read_idx(path)

    def test_missing_dataset_error(self, tmp_path):
        with pytest.raises(DatasetUnavailable):
            load_split("train", data_dir=tmp_path)


@pytest.mark.skipif(not dataset_available(), reason="MNIST IDX files not present")
class TestRealDataset:
    def test_shapes_and_ranges(self):
        train_x, train_y = load_split("train")
        test_x, test_y = load_split("test")
        assert train_x.shape == (60000, 784) and train_y.shape == (60000,)
        assert test_x.shape == (10000, 784) and test_y.shape == (10000,)
        assert train_x.dtype == np.float32
        assert 0.0 <= train_x.min() and train_x.max() <= 1.0
        assert set(np.unique(train_y)) == set(range(10))
