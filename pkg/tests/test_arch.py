"""Architecture assembly, sharing schemes, training loop, checkpoints."""

import json

import numpy as np
import pytest

from statsel.arch import (BuildSpec, TrainConfig, backbone_depth, build,
                          class_labels, evaluate, load_checkpoint,
                          multitask_check, parameter_count, per_layer,
                          predict_batch, save_checkpoint, train)
from statsel.arch.train import _BatchStream
from statsel.data import file_sha256, generate_labeled
from statsel.errors import (CheckpointError, ConfigError, ShapeError,
                            TrainingDivergedError)
from statsel.models import get_model
from statsel.nn import weights_to_bytes
from statsel.rng import stream


def tiny_dataset(model_ids=(5, 6), n=100, n_k=4, d=10, seed=0):
    models = [get_model(m) for m in model_ids]
    splits, _ = generate_labeled(models, n=n, n_k=n_k, d=d, seed=seed)
    return splits["train"], splits["val"]


class TestBuilder:
    def test_small_selector_tower_parameter_oracle(self):
        conv1 = 25 * 1 * 64 + 64
        conv2 = 25 * 64 * 128 + 128
        conv3 = 25 * 128 * 128 + 128
        dense1 = (128 * 1 * 1) * 512 + 512
        dense2 = 512 * 256 + 256
        head = 256 * 5 + 5
        tower = conv1 + conv2 + conv3 + dense1 + dense2 + head
        net = build(BuildSpec("small", "nsa", k=5, input_side=10), seed=0)
        actual = sum(p.size for p in net.selector.params())
        assert actual == tower == 814981

    def test_parameter_count_matches_instantiation(self):
        specs = [
            BuildSpec("small", "nsa", k=5, input_side=10),
            BuildSpec("small", "fsa", k=20, input_side=10),
            BuildSpec("small", "psa", k=5, input_side=10, shared=3),
            BuildSpec("medium", "psa", k=7, input_side=20, shared=5, channels=2),
            BuildSpec("large", "fsa", k=50, input_side=30),
        ]
        for spec in specs:
            net = build(spec, seed=1)
            assert parameter_count(spec) == sum(p.size for p in net.params())

    def test_psa_max_matches_fsa_layout(self):
        total = backbone_depth("small")
        psa = build(BuildSpec("small", "psa", k=5, input_side=10,
                              shared=total), seed=2)
        fsa = build(BuildSpec("small", "fsa", k=5, input_side=10), seed=2)
        psa_shapes = [p.shape for p in psa.params()]
        fsa_shapes = [p.shape for p in fsa.params()]
        assert psa_shapes == fsa_shapes

    def test_psa1_strictly_fewer_params_than_nsa(self):
        nsa = parameter_count(BuildSpec("small", "nsa", k=5, input_side=10))
        psa1 = parameter_count(BuildSpec("small", "psa", k=5, input_side=10,
                                         shared=1))
        assert psa1 < nsa
        assert nsa - psa1 == 25 * 1 * 64 + 64

    def test_dense_input_widths_follow_pooling(self):
        def first_dense_in(spec):
            net = build(spec, seed=0)
            for entry in net.layer_table:
                if entry["kind"] == "dense":
                    return entry["in"]

        assert first_dense_in(BuildSpec("small", "fsa", k=3, input_side=10)) == 128
        assert first_dense_in(BuildSpec("small", "fsa", k=3, input_side=30)) == 128 * 9
        assert first_dense_in(BuildSpec("medium", "fsa", k=3, input_side=10)) == 64 * 4
        assert first_dense_in(BuildSpec("medium", "fsa", k=3, input_side=20)) == 64 * 25
        assert first_dense_in(BuildSpec("large", "fsa", k=3, input_side=10)) == 128
        assert first_dense_in(BuildSpec("large", "fsa", k=3, input_side=30)) == 128 * 9

    def test_invalid_configs_rejected(self):
        with pytest.raises(ConfigError, match="psa"):
            BuildSpec("small", "psa", k=5, input_side=10, shared=0)
        with pytest.raises(ConfigError, match="psa"):
            BuildSpec("small", "psa", k=5, input_side=10, shared=6)
        with pytest.raises(ConfigError, match="shared"):
            BuildSpec("small", "nsa", k=5, input_side=10, shared=2)
        with pytest.raises(ConfigError, match="input side"):
            BuildSpec("small", "fsa", k=5, input_side=16)
        with pytest.raises(ConfigError, match="size"):
            BuildSpec("tiny", "fsa", k=5, input_side=10)
        with pytest.raises(ConfigError, match="K"):
            BuildSpec("small", "fsa", k=0, input_side=10)


class TestForwardSemantics:
    def test_psa_max_and_fsa_forward_identically(self):
        total = backbone_depth("small")
        psa = build(BuildSpec("small", "psa", k=5, input_side=10,
                              shared=total), seed=3)
        fsa = build(BuildSpec("small", "fsa", k=5, input_side=10), seed=3)
        x = stream(3, "eq-x").standard_normal((4, 1, 10, 10)).astype(np.float32)
        pl, pt = psa.forward(x)
        fl, ft = fsa.forward(x)
        np.testing.assert_array_equal(pl, fl)
        np.testing.assert_array_equal(pt, ft)

    def test_probabilities_sum_to_one(self):
        net = build(BuildSpec("small", "psa", k=5, input_side=10, shared=3),
                    seed=4)
        rng = stream(4, "prob-x")
        for _ in range(3):
            res = net.predict(rng.standard_normal((10, 10)).astype(np.float32))
            assert abs(res.probs.sum() - 1.0) <= 1e-6

    def test_equal_logits_pick_lowest_class(self):
        net = build(BuildSpec("small", "fsa", k=5, input_side=10), seed=5)
        head = net.selector.layers[-1]
        head.w[:] = 0.0
        head.b[:] = 0.0
        res = net.predict(np.ones((10, 10), dtype=np.float32))
        np.testing.assert_allclose(res.probs, np.full(5, 0.2), rtol=1e-12)
        assert res.top_class == 0

    def test_predict_is_pure(self):
        net = build(BuildSpec("small", "nsa", k=5, input_side=10), seed=6)
        x = stream(6, "pure-x").standard_normal((10, 10)).astype(np.float32)
        first = net.predict(x)
        second = net.predict(x)
        np.testing.assert_array_equal(first.probs, second.probs)
        assert first.theta == second.theta

    def test_shape_mismatch_rejected(self):
        net = build(BuildSpec("small", "fsa", k=5, input_side=10), seed=7)
        with pytest.raises(ShapeError, match="matrix"):
            net.predict(np.zeros((20, 20), dtype=np.float32))
        with pytest.raises(ShapeError, match="values"):
            predict_batch(net, np.zeros((4, 99), dtype=np.float32))


class TestGradientFlow:
    def test_nsa_estimator_update_never_touches_selector(self):
        net = build(BuildSpec("small", "nsa", k=3, input_side=10), seed=8)
        from statsel.nn import SGD
        opt = SGD(net.params(), net.grads(), lr=0.05, momentum=0.9)
        x = stream(8, "iso-x").standard_normal((6, 1, 10, 10)).astype(np.float32)
        before = weights_to_bytes(net.selector.params())
        est_before = weights_to_bytes(net.estimator.params())
        logits, theta = net.forward(x)
        net.backward(np.zeros_like(logits),
                     np.full(theta.shape, 0.5, dtype=np.float32))
        opt.step()
        assert weights_to_bytes(net.selector.params()) == before
        assert weights_to_bytes(net.estimator.params()) != est_before

    def test_lambda_zero_gives_zero_estimator_gradients(self):
        net = build(BuildSpec("small", "fsa", k=3, input_side=10), seed=9)
        x = stream(9, "lam-x").standard_normal((6, 1, 10, 10)).astype(np.float32)
        logits, theta = net.forward(x)
        from statsel.nn import huber, softmax_xent
        _, dlogits = softmax_xent(logits, np.zeros(6, dtype=np.int64))
        _, dtheta = huber(theta, np.ones(6), 1.0)
        lam = 0.0
        net.backward(dlogits.astype(np.float32),
                     (lam * dtheta).astype(np.float32))
        for g in net.estimator.grads():
            np.testing.assert_array_equal(g, np.zeros_like(g))
        shared_with_est = [g.copy() for g in net.trunk.grads()]
        sel_only = build(BuildSpec("small", "fsa", k=3, input_side=10), seed=9)
        logits2, _ = sel_only.forward(x)
        _, dlogits2 = softmax_xent(logits2, np.zeros(6, dtype=np.int64))
        sel_only.backward(dlogits2.astype(np.float32),
                          np.zeros(6, dtype=np.float32))
        for got, want in zip(shared_with_est, sel_only.trunk.grads()):
            np.testing.assert_array_equal(got, want)

    def test_shared_gradients_add_across_tasks(self):
        net = build(BuildSpec("small", "psa", k=4, input_side=10, shared=2),
                    seed=10, dtype=np.float64)
        rng = stream(10, "add-x")
        x = rng.standard_normal((5, 1, 10, 10))
        dlogits = rng.standard_normal((5, 4))
        dtheta = rng.standard_normal(5)
        zeros_l = np.zeros_like(dlogits)
        zeros_t = np.zeros_like(dtheta)

        net.forward(x)
        net.backward(dlogits, zeros_t)
        sel_part = [g.copy() for g in net.trunk.grads()]
        net.forward(x)
        net.backward(zeros_l, dtheta)
        est_part = [g.copy() for g in net.trunk.grads()]
        net.forward(x)
        net.backward(dlogits, dtheta)
        for combined, a, b in zip(net.trunk.grads(), sel_part, est_part):
            np.testing.assert_allclose(combined, a + b, rtol=1e-6, atol=1e-12)


class TestTrainLoop:
    def test_batch_stream_covers_each_epoch(self):
        bs = _BatchStream(count=10, batch=3, seed=0)
        seen = np.concatenate([bs.next() for _ in range(4)])
        np.testing.assert_array_equal(np.sort(seen), np.arange(10))
        second = np.concatenate([bs.next() for _ in range(4)])
        np.testing.assert_array_equal(np.sort(second), np.arange(10))
        assert not np.array_equal(seen, second)

    def test_class_label_mapping(self):
        ids = np.array([5, 6, 5, 9], dtype=np.uint16)
        np.testing.assert_array_equal(
            class_labels(ids, np.array([5, 6, 9])), [0, 1, 0, 2]
        )
        with pytest.raises(ConfigError, match="model ids"):
            class_labels(np.array([7]), np.array([5, 6, 9]))

    def test_lr_schedule(self):
        cfg = TrainConfig(iterations=1000, lr=0.01)
        np.testing.assert_allclose(cfg.lr_at(499), 0.01)
        np.testing.assert_allclose(cfg.lr_at(500), 0.001)
        np.testing.assert_allclose(cfg.lr_at(750), 0.0001)
        assert cfg.interval() == 50
        assert TrainConfig().interval() == 1000

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            TrainConfig(iterations=0)
        with pytest.raises(ConfigError):
            TrainConfig(lam=-0.5)
        with pytest.raises(ConfigError):
            TrainConfig(momentum=1.0)

    def test_single_model_hits_full_accuracy(self, tmp_path):
        train_split, val_split = tiny_dataset(model_ids=(5,), n_k=4, d=10)
        net = build(BuildSpec("small", "psa", k=1, input_side=10, shared=3),
                    seed=11)
        cfg = TrainConfig(iterations=100, batch=16, eval_interval=25, seed=11)
        curves = train(net, train_split, val_split, cfg,
                       curves_path=tmp_path / "curves.jsonl")
        assert [c["iter"] for c in curves] == [25, 50, 75, 100]
        assert curves[-1]["val_acc"] == 1.0
        lines = [json.loads(line) for line in
                 (tmp_path / "curves.jsonl").read_text().splitlines()]
        assert lines == curves
        assert all(set(c) == {"iter", "val_acc", "val_huber"} for c in lines)

    def test_huber_metric_improves_on_constant_target(self):
        train_split, val_split = tiny_dataset(model_ids=(5, 6), n_k=4, d=10,
                                              seed=1)
        net = build(BuildSpec("small", "fsa", k=2, input_side=10), seed=12)
        class_ids = np.unique(train_split.model_ids)
        labels = class_labels(val_split.model_ids, class_ids)
        thetas = val_split.thetas.astype(np.float64)
        _, before = evaluate(net, val_split.values, labels, thetas, 1.0)
        cfg = TrainConfig(iterations=120, batch=32, eval_interval=60, seed=12)
        curves = train(net, train_split, val_split, cfg)
        assert curves[-1]["val_huber"] < before

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_raises_with_iteration(self):
        train_split, val_split = tiny_dataset(model_ids=(5,), n_k=2, d=5)
        net = build(BuildSpec("small", "fsa", k=1, input_side=10), seed=13)
        cfg = TrainConfig(iterations=60, batch=8, lr=1e9, eval_interval=60,
                          seed=13)
        with pytest.raises(TrainingDivergedError) as info:
            train(net, train_split, val_split, cfg)
        assert 1 <= info.value.iteration <= 60

    def test_wrong_k_rejected(self):
        train_split, val_split = tiny_dataset(model_ids=(5, 6))
        net = build(BuildSpec("small", "fsa", k=3, input_side=10), seed=14)
        with pytest.raises(ConfigError, match="K=3"):
            train(net, train_split, val_split, TrainConfig(iterations=10))

    def test_training_is_bitwise_deterministic(self):
        def run(seed):
            train_split, val_split = tiny_dataset(model_ids=(5, 6), n_k=3,
                                                  d=5, seed=2)
            net = build(BuildSpec("small", "psa", k=2, input_side=10,
                                  shared=3), seed=seed)
            cfg = TrainConfig(iterations=25, batch=16, eval_interval=25,
                              seed=seed)
            train(net, train_split, val_split, cfg)
            return weights_to_bytes(net.params())

        assert run(21) == run(21)
        assert run(21) != run(22)


class TestCheckpointRoundTrip:
    def make_trained(self, tmp_path):
        train_split, val_split = tiny_dataset(model_ids=(5, 6), n_k=3, d=5)
        net = build(BuildSpec("small", "psa", k=2, input_side=10, shared=3),
                    seed=15)
        cfg = TrainConfig(iterations=10, batch=16, eval_interval=10, seed=15)
        train(net, train_split, val_split, cfg)
        save_checkpoint(net, tmp_path, seed=15, cfg=cfg, class_ids=[5, 6])
        return net

    def test_round_trip_preserves_outputs_and_bytes(self, tmp_path):
        net = self.make_trained(tmp_path)
        loaded, meta = load_checkpoint(tmp_path)
        x = stream(15, "ckpt-x").standard_normal((3, 1, 10, 10)).astype(np.float32)
        np.testing.assert_array_equal(net.forward(x)[0], loaded.forward(x)[0])
        np.testing.assert_array_equal(net.forward(x)[1], loaded.forward(x)[1])
        want = file_sha256(tmp_path / "weights.bin")
        import hashlib
        got = hashlib.sha256(weights_to_bytes(loaded.params())).hexdigest()
        assert want == got
        assert meta["class_ids"] == [5, 6]
        assert meta["k"] == 2 and meta["n"] == 100
        assert meta["hyperparameters"]["iterations"] == 10
        kinds = [e["kind"] for e in meta["layers"]]
        assert kinds.count("conv5x5") == 3 and kinds.count("dense") == 6

    def test_corrupt_checkpoints_rejected(self, tmp_path):
        self.make_trained(tmp_path)
        weights = tmp_path / "weights.bin"
        weights.write_bytes(weights.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="bytes"):
            load_checkpoint(tmp_path)
        (tmp_path / "model.json").unlink()
        with pytest.raises(CheckpointError, match="missing"):
            load_checkpoint(tmp_path)

    def test_version_mismatch_rejected(self, tmp_path):
        self.make_trained(tmp_path)
        meta = json.loads((tmp_path / "model.json").read_text())
        meta["version"] = 99
        (tmp_path / "model.json").write_text(json.dumps(meta))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(tmp_path)


class TestAssembledGradients:
    def test_multitask_check_small_psa(self):
        errs = multitask_check(
            BuildSpec("small", "psa", k=5, input_side=10, shared=3),
            seed=0, frac=0.001, batch=2,
        )
        assert max(errs.values()) < 1e-4
        layers = per_layer(errs)
        assert any(name.startswith("shared.") for name in layers)
        assert any(name.startswith("selector.") for name in layers)
        assert any(name.startswith("estimator.") for name in layers)
