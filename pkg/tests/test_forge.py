"""Gates, modulo head, accumulators, detector, assembled nets, bundles."""

import numpy as np
import pytest

from faithlab.errors import ConfigError, DatasetIOError
from faithlab.forge import (
    MultiColorConfig,
    SingleColorConfig,
    build_accumulator,
    build_eq_gate,
    build_gt_gate,
    build_modulo_head,
    build_multi_color_net,
    build_single_color_net,
    kernel_schedule,
    load_bundle,
    save_bundle,
    verify_net,
)
from faithlab.forge.detector import build_color_detector
from faithlab.graph import NetGraph, forward


def run_scalar(net, x):
    y, _ = forward(net, np.array([float(x)]))
    return float(y[0])


class TestGates:
    def test_gt_gate_examples(self):
        gate = build_gt_gate(5)
        assert run_scalar(gate, 6) == 1.0
        assert run_scalar(gate, 5) == 0.0

    def test_gt_gate_zero_boundary(self):
        assert run_scalar(build_gt_gate(0), 0) == 0.0

    def test_eq_gate_examples(self):
        gate = build_eq_gate(5)
        assert run_scalar(gate, 5) == 1.0
        assert run_scalar(gate, 4) == 0.0
        assert run_scalar(gate, 6) == 0.0

    def test_eq_gate_at_zero(self):
        assert run_scalar(build_eq_gate(0), 0) == 1.0

    def test_gate_exactness_exhaustive(self):
        # binary outputs matching the definitions on all of [0, 300]
        gt7 = build_gt_gate(7)
        eq7 = build_eq_gate(7)
        xs = np.arange(301, dtype=np.float64)[:, None]
        y_gt, _ = forward(gt7, xs)
        y_eq, _ = forward(eq7, xs)
        np.testing.assert_array_equal(y_gt[:, 0], (xs[:, 0] > 7).astype(float))
        np.testing.assert_array_equal(y_eq[:, 0], (xs[:, 0] == 7).astype(float))


class TestModuloHead:
    def test_worked_example(self):
        assert run_scalar(build_modulo_head(5, 100), 8) == 3.0

    def test_zero_for_any_modulus(self):
        for n in (2, 3, 7, 30):
            assert run_scalar(build_modulo_head(n, 200), 0) == 0.0

    def test_exhaustive_against_integer_oracle(self):
        head = build_modulo_head(30, 4096)
        xs = np.arange(4097, dtype=np.float64)[:, None]
        ys, _ = forward(head, xs)
        want = np.mod(np.arange(4097), 30)
        assert np.max(np.abs(ys[:, 0] - want)) <= 1e-6

    def test_smaller_modulus_exhaustive(self):
        head = build_modulo_head(7, 500)
        xs = np.arange(501, dtype=np.float64)[:, None]
        ys, _ = forward(head, xs)
        np.testing.assert_allclose(ys[:, 0], np.mod(np.arange(501), 7), atol=1e-9)

    def test_has_seven_linear_stages(self):
        head = build_modulo_head(30, 4096)
        assert sum(1 for l in head.layers if l.kind == "linear") == 7

    def test_invalid_range_rejected(self):
        with pytest.raises(ConfigError):
            build_modulo_head(10, 5)


class TestAccumulator:
    def test_kernel_schedule(self):
        assert kernel_schedule(64) == [4, 4, 4]
        assert kernel_schedule(224) == [7, 4, 4, 2]
        assert kernel_schedule(8) == [4, 2]
        assert kernel_schedule(1) == []

    def test_prime_extent_rejected(self):
        with pytest.raises(ConfigError):
            kernel_schedule(11 * 4)

    def test_zero_input_sums_to_zero(self):
        rng = np.random.default_rng(0)
        layers = build_accumulator("uniform", 8, 8, 1, rng)
        net = NetGraph(layers, input_shape=(1, 8, 8))
        y, _ = forward(net, np.zeros((1, 8, 8)))
        assert y.reshape(-1)[0] == 0.0

    def test_uniform_all_ones_6x6(self):
        rng = np.random.default_rng(0)
        layers = build_accumulator("uniform", 6, 6, 1, rng)
        net = NetGraph(layers, input_shape=(1, 6, 6))
        y, _ = forward(net, np.ones((1, 6, 6)))
        assert y.reshape(-1)[0] == 36.0

    def test_nonuniform_matches_direct_summation(self):
        rng = np.random.default_rng(7)
        layers = build_accumulator("nonuniform", 16, 16, 1, rng)
        net = NetGraph(layers, input_shape=(1, 16, 16))
        gen = np.random.default_rng(3)
        maps = (gen.random((200, 1, 16, 16)) < 0.4).astype(np.float64)
        ys, _ = forward(net, maps)
        np.testing.assert_allclose(
            ys.reshape(200), maps.sum(axis=(1, 2, 3)), atol=1e-6
        )

    def test_nonuniform_equals_uniform_everywhere(self):
        r1, r2 = np.random.default_rng(1), np.random.default_rng(1)
        h = w = 12
        uni = NetGraph(build_accumulator("uniform", h, w, 1, r1), (1, h, w))
        non = NetGraph(build_accumulator("nonuniform", h, w, 1, r2), (1, h, w))
        xs = np.random.default_rng(5).random((50, 1, h, w)) * 3
        yu, _ = forward(uni, xs)
        yn, _ = forward(non, xs)
        np.testing.assert_allclose(yu, yn, atol=1e-6)


class TestColorDetector:
    CFG = MultiColorConfig(height=4, width=4, colors=((255, 127, 0), (1, 200, 9)))

    def _detector_net(self, n_pixels):
        layers = build_color_detector(self.CFG)
        return NetGraph(layers, input_shape=(3, n_pixels, 1))

    def _run(self, pixels):
        net = self._detector_net(len(pixels))
        img = np.array(pixels, dtype=np.float64).T[:, :, None]
        y, _ = forward(net, img)
        return y[:, :, 0].T  # (P, channels)

    def test_target_pixel_fires_its_channel_only(self):
        out = self._run([(255, 127, 0)])
        np.testing.assert_array_equal(out[0], [1, 0, 0, 0, 0, 0])

    def test_background_fires_nothing(self):
        out = self._run([(20, 20, 20)])
        np.testing.assert_array_equal(out[0], np.zeros(6))

    def test_unknown_color_fires_all_redundant(self):
        out = self._run([(1, 2, 3)])
        np.testing.assert_array_equal(out[0], [0, 0, 1, 1, 1, 1])

    def test_near_miss_is_rejected(self):
        # one component off by one: not the target, so redundant channels fire
        out = self._run([(255, 126, 0), (254, 127, 0), (255, 127, 1)])
        for row in out:
            np.testing.assert_array_equal(row, [0, 0, 1, 1, 1, 1])


class TestSingleColorNet:
    def test_all_black_maps_to_zero(self):
        cfg = SingleColorConfig(height=8, width=8, modulus=5, seed=1)
        net = build_single_color_net(cfg)
        y, _ = forward(net, np.zeros((1, 8, 8)))
        assert abs(y[0]) <= 1e-9

    def test_exactly_n_whites_wraps_to_zero(self):
        cfg = SingleColorConfig(height=8, width=8, modulus=5, seed=1)
        net = build_single_color_net(cfg)
        img = np.zeros((1, 8, 8))
        img[0, 0, :5] = 255.0
        y, _ = forward(net, img)
        assert abs(y[0]) <= 1e-9

    def test_oracle_agreement_on_generated_samples(self):
        from faithlab.data.generate import gen_single_color

        cfg = SingleColorConfig(height=24, width=24, modulus=7, seed=2)
        net = build_single_color_net(cfg)
        samples = gen_single_color(cfg, 40, seed=5)
        imgs = np.stack([s.image for s in samples])
        ys, _ = forward(net, imgs)
        labels = [s.gt_signed.sum() % cfg.modulus for s in samples]
        np.testing.assert_allclose(ys[:, 0], labels, atol=1e-6)

    def test_verify_net_passes(self):
        cfg = SingleColorConfig(height=24, width=24, modulus=7, seed=2, capacity=576)
        net = build_single_color_net(cfg)
        report = verify_net(net, cfg, sample_budget=10)
        assert report.ok, report.summary()
        assert report.n_params > 0 and report.n_layers > 0


class TestMultiColorNet:
    def test_logits_count_pixels(self):
        from faithlab.data.generate import gen_multi_color

        cfg = MultiColorConfig(height=24, width=24, seed=3, redundant_scale=1.0)
        net = build_multi_color_net(cfg)
        samples = gen_multi_color(cfg, 20, seed=8)
        for s in samples:
            _, trace = forward(net, s.image)
            logits = trace.outputs[net.tap_index("logits")][0]
            np.testing.assert_allclose(logits, s.meta["color_counts"], atol=1e-6)

    def test_all_background_gives_uniform_softmax(self):
        cfg = MultiColorConfig(height=8, width=8, seed=3)
        net = build_multi_color_net(cfg)
        img = np.zeros((3, 8, 8))
        img[:] = np.array(cfg.background)[:, None, None]
        y, _ = forward(net, img)
        np.testing.assert_allclose(y, 0.25 * np.ones(4), atol=1e-12)

    def test_recolored_pixel_changes_logits_only_with_redundancy(self):
        base = dict(height=8, width=8, seed=3, n_redundant=4)
        on = build_multi_color_net(MultiColorConfig(redundant_scale=1.0, **base))
        off = build_multi_color_net(MultiColorConfig(redundant_scale=0.0, **base))
        cfg = MultiColorConfig(redundant_scale=0.0, **base)
        img = np.zeros((3, 8, 8))
        img[:] = np.array(cfg.background)[:, None, None]
        hot = img.copy()
        hot[:, 4, 4] = 0.0  # unseen color (0,0,0)
        for net, expect_change in ((on, True), (off, False)):
            la = forward(net, img)[1]
            lb = forward(net, hot)[1]
            a = la.outputs[net.tap_index("logits")][0]
            b = lb.outputs[net.tap_index("logits")][0]
            changed = np.max(np.abs(a - b)) > 1e-9
            assert changed == expect_change

    def test_verify_net_passes(self):
        cfg = MultiColorConfig(height=24, width=24, seed=4)
        net = build_multi_color_net(cfg)
        report = verify_net(net, cfg, sample_budget=10)
        assert report.ok, report.summary()


class TestWeightBundle:
    def test_round_trip_bit_identical(self, tmp_path, rng):
        cfg = SingleColorConfig(height=8, width=8, modulus=5, seed=6, capacity=64)
        net = build_single_color_net(cfg)
        save_bundle(net, str(tmp_path), config={"kind": "single-color"})
        loaded, manifest = load_bundle(str(tmp_path))
        assert manifest["config"] == {"kind": "single-color"}
        assert loaded.input_shape == net.input_shape
        assert loaded.taps == net.taps
        for a, b in zip(net.layers, loaded.layers):
            assert a.kind == b.kind and a.stride == b.stride and a.name == b.name
            if a.weight is None:
                assert b.weight is None
            else:
                assert a.weight.tobytes() == b.weight.tobytes()
            if a.bias is None:
                assert b.bias is None
            else:
                assert a.bias.tobytes() == b.bias.tobytes()
        x = rng.random((1, 8, 8)) * 255
        np.testing.assert_array_equal(forward(net, x)[0], forward(loaded, x)[0])

    def test_truncated_blob_rejected(self, tmp_path):
        cfg = SingleColorConfig(height=8, width=8, modulus=5, seed=6, capacity=64)
        net = build_single_color_net(cfg)
        save_bundle(net, str(tmp_path))
        blob = (tmp_path / "weights.bin").read_bytes()
        (tmp_path / "weights.bin").write_bytes(blob[:-16])
        with pytest.raises(DatasetIOError):
            load_bundle(str(tmp_path))
