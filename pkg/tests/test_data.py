"""Dataset generation, splitting, reshaping, and binary round-trip tests."""

import numpy as np
import pytest

from statsel.data import (
    file_sha256,
    generate_labeled,
    generate_regression,
    generate_test,
    load_split,
    read_split,
    reshape_sample,
    save_dataset,
    write_split,
)
from statsel.data.generate import _val_count
from statsel.errors import ConfigError, DataFormatError, ShapeError
from statsel.models import REGRESSION_MODELS, top_models


class TestReshape:
    def test_row_major_two_by_two(self):
        np.testing.assert_array_equal(reshape_sample([1, 2, 3, 4]), [[1, 2], [3, 4]])

    def test_hundred_makes_ten_by_ten(self):
        m = reshape_sample(np.arange(100.0))
        assert m.shape == (10, 10)
        np.testing.assert_array_equal(m.ravel(), np.arange(100.0))

    def test_nine_hundred_makes_thirty_by_thirty(self):
        assert reshape_sample(np.zeros(900)).shape == (30, 30)

    def test_non_square_length_rejected(self):
        with pytest.raises(ShapeError):
            reshape_sample(np.zeros(99))


class TestSplitRule:
    def test_paper_scale_counts(self):
        # K=50, n_k=11, D=1000: 550,000 records, 440,000 of them training
        assert _val_count(1000) == 200
        assert 50 * 11 * (1000 - _val_count(1000)) == 440_000
        assert 50 * 11 * 1000 == 550_000

    def test_small_replicate_counts(self):
        assert _val_count(2) == 1
        assert _val_count(5) == 1
        assert _val_count(10) == 2
        assert _val_count(200) == 40


class TestGenerateLabeled:
    def test_desk_scale_counts_and_balance(self):
        splits, manifest = generate_labeled(top_models(5), 100, n_k=10, d=200, seed=42)
        train, val = splits["train"], splits["val"]
        assert len(train) == 8000
        assert len(val) == 2000
        # every model contributes exactly n_k * D records across both splits
        ids = np.concatenate([train.model_ids, val.model_ids])
        counts = np.bincount(ids, minlength=6)[1:6]
        np.testing.assert_array_equal(counts, [2000] * 5)

    def test_single_replicate_alternates_cells(self):
        splits, _ = generate_labeled(top_models(1), 100, n_k=2, d=1, seed=0)
        assert len(splits["train"]) == 1
        assert len(splits["val"]) == 1

    def test_split_disjointness_by_record_id(self):
        splits, _ = generate_labeled(top_models(3), 100, n_k=4, d=5, seed=7)
        a = set(splits["train"].record_ids.tolist())
        b = set(splits["val"].record_ids.tolist())
        assert not a & b
        assert len(a) + len(b) == 3 * 4 * 5

    def test_thetas_lie_on_the_grid(self):
        splits, _ = generate_labeled(top_models(5), 100, n_k=10, d=3, seed=1)
        for split in splits.values():
            for m in top_models(5):
                mask = split.model_ids == m.model_id
                grid = m.space.grid(10)
                for t in np.unique(split.thetas[mask]):
                    assert np.min(np.abs(grid - t)) < 1e-12

    def test_all_fifty_models_generate(self):
        splits, _ = generate_labeled(top_models(50), 100, n_k=2, d=1, seed=3)
        assert len(splits["train"]) + len(splits["val"]) == 100

    def test_sorted_option_orders_each_record(self):
        splits, manifest = generate_labeled(top_models(2), 100, n_k=2, d=4, seed=5,
                                            sort_values=True)
        v = splits["train"].values
        assert np.all(np.diff(v, axis=1) >= 0)
        assert manifest["sorted_values"] is True

    def test_non_square_n_rejected(self):
        with pytest.raises(ShapeError):
            generate_labeled(top_models(2), 99, n_k=2, d=2, seed=0)

    def test_bad_grid_or_replicates_rejected(self):
        with pytest.raises(ConfigError):
            generate_labeled(top_models(2), 100, n_k=1, d=2, seed=0)
        with pytest.raises(ConfigError):
            generate_labeled(top_models(2), 100, n_k=2, d=0, seed=0)


class TestGenerateTest:
    def test_desk_scale_counts(self):
        splits, _ = generate_test(top_models(5), 100, n_test_params=100, reps=10, seed=9)
        assert len(splits["test"]) == 5000

    def test_minimal_case(self):
        splits, _ = generate_test(top_models(1), 100, n_test_params=1, reps=1, seed=9)
        assert len(splits["test"]) == 1

    def test_parameters_disjoint_from_training_grid(self):
        splits, _ = generate_test(top_models(20), 100, n_test_params=25, reps=1,
                                  seed=13, grid_n=11)
        test = splits["test"]
        for m in top_models(20):
            if m.space.integer:
                continue
            grid = m.space.grid(11)
            guard = 1e-9 * (m.space.hi - m.space.lo)
            thetas = test.thetas[test.model_ids == m.model_id]
            for t in thetas:
                assert np.min(np.abs(grid - t)) > guard, m.name

    def test_parameters_stay_in_space(self):
        splits, _ = generate_test(top_models(10), 100, n_test_params=20, reps=1, seed=3)
        test = splits["test"]
        for m in top_models(10):
            thetas = test.thetas[test.model_ids == m.model_id]
            assert thetas.size == 20
            for t in thetas:
                assert m.space.contains(t), m.name


class TestGenerateRegression:
    def test_paper_scale_counts(self):
        splits, manifest = generate_regression(REGRESSION_MODELS, 100, coef_grid=5,
                                               d=1000, seed=21)
        assert len(splits["train"]) == 122_500
        assert len(splits["val"]) == 35_000
        assert len(splits["test"]) == 17_500
        assert manifest["channels"] == 2

    def test_ten_replicates_split_seven_two_one(self):
        splits, _ = generate_regression(REGRESSION_MODELS, 100, coef_grid=2, d=10, seed=2)
        assert len(splits["train"]) == 7 * 4 * 7
        assert len(splits["val"]) == 7 * 4 * 2
        assert len(splits["test"]) == 7 * 4 * 1

    def test_records_hold_x_then_y_channels(self):
        splits, _ = generate_regression(REGRESSION_MODELS[:1], 100, coef_grid=2, d=3, seed=4)
        rec = splits["train"].values[0]
        assert rec.shape == (200,)
        x = rec[:100]
        assert np.all((x >= 0) & (x <= 1))

    def test_too_few_replicates_rejected(self):
        with pytest.raises(ConfigError):
            generate_regression(REGRESSION_MODELS, 100, coef_grid=2, d=2, seed=0)


class TestBinaryRoundTrip:
    def test_write_read_bit_exact(self, tmp_path):
        splits, _ = generate_labeled(top_models(5), 100, n_k=4, d=10, seed=6)
        path = tmp_path / "train.bin"
        write_split(path, splits["train"])
        back = read_split(path)
        np.testing.assert_array_equal(back.model_ids, splits["train"].model_ids)
        np.testing.assert_array_equal(back.thetas, splits["train"].thetas)
        np.testing.assert_array_equal(back.values, splits["train"].values)

    def test_two_channel_round_trip(self, tmp_path):
        splits, _ = generate_regression(REGRESSION_MODELS[:2], 100, coef_grid=2, d=3, seed=8)
        path = tmp_path / "reg.bin"
        write_split(path, splits["test"])
        back = read_split(path)
        assert back.n == 200
        np.testing.assert_array_equal(back.values, splits["test"].values)

    def test_corrupted_magic_names_offset_zero(self, tmp_path):
        splits, _ = generate_labeled(top_models(1), 100, n_k=2, d=2, seed=0)
        path = tmp_path / "bad.bin"
        write_split(path, splits["train"])
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(DataFormatError, match="offset 0"):
            read_split(path)

    def test_unsupported_version_names_offset_four(self, tmp_path):
        splits, _ = generate_labeled(top_models(1), 100, n_k=2, d=2, seed=0)
        path = tmp_path / "bad.bin"
        write_split(path, splits["train"])
        data = bytearray(path.read_bytes())
        data[4] = 99
        path.write_bytes(bytes(data))
        with pytest.raises(DataFormatError, match="offset 4"):
            read_split(path)

    def test_truncated_file_reports_counts(self, tmp_path):
        splits, _ = generate_labeled(top_models(1), 100, n_k=2, d=10, seed=0)
        path = tmp_path / "bad.bin"
        write_split(path, splits["train"])
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 150])
        with pytest.raises(DataFormatError, match="expected"):
            read_split(path)

    def test_manifest_hash_catches_tampering(self, tmp_path):
        splits, manifest = generate_labeled(top_models(2), 100, n_k=2, d=4, seed=1)
        save_dataset(tmp_path, manifest, **splits)
        loaded = load_split(tmp_path, "train")
        assert len(loaded) == len(splits["train"])
        path = tmp_path / "train.bin"
        data = bytearray(path.read_bytes())
        data[-1] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(DataFormatError, match="sha256"):
            load_split(tmp_path, "train")


class TestDeterminism:
    def test_same_config_same_hashes(self, tmp_path):
        for sub in ("a", "b"):
            splits, manifest = generate_labeled(top_models(3), 100, n_k=3, d=5, seed=99)
            save_dataset(tmp_path / sub, manifest, **splits)
        for name in ("train.bin", "val.bin"):
            assert file_sha256(tmp_path / "a" / name) == file_sha256(tmp_path / "b" / name)

    def test_different_seed_changes_data(self, tmp_path):
        a, _ = generate_labeled(top_models(2), 100, n_k=2, d=3, seed=1)
        b, _ = generate_labeled(top_models(2), 100, n_k=2, d=3, seed=2)
        assert a["train"].values.tobytes() != b["train"].values.tobytes()
