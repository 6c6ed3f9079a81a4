"""Scores, curves, and rank statistics against independent oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faithlab.attr.maps import AttributionMap, color_baseline, scalar_baseline
from faithlab.data import gen_multi_color, gen_single_color
from faithlab.data.generate import LabSample
from faithlab.errors import ConfigError
from faithlab.forge import (
    MultiColorConfig,
    SingleColorConfig,
    build_multi_color_net,
    build_single_color_net,
)
from faithlab.metrics import (
    adapted_insertion_deletion,
    build_rank_table,
    faithfulness_test,
    insertion_deletion,
    normalize_attribution,
    oracle_adapted_auc,
    pearson,
    score,
    sensitivity_n,
    spearman,
)

SC8 = SingleColorConfig(height=8, width=8, modulus=5, seed=41, capacity=64)
MC24 = MultiColorConfig(height=24, width=24, seed=42, redundant_scale=0.0)
MC24_UDE = MultiColorConfig(height=24, width=24, seed=42, redundant_scale=1.0)
BLACK = color_baseline((0, 0, 0), "default-zero")


def tiny_sc_sample(rng=None, n_white=17):
    """Hand-made 8x8 modulo sample (the generator needs larger canvases)."""
    rng = rng or np.random.default_rng(7)
    white = np.zeros(64, dtype=bool)
    white[rng.choice(64, size=n_white, replace=False)] = True
    white = white.reshape(8, 8)
    return LabSample(
        image=np.where(white, 255.0, 0.0)[None],
        label=int(white.sum()) % SC8.modulus,
        gt_signed=white.astype(np.float64),
    )


def as_map(values, method="oracle", signed=True, target=0):
    return AttributionMap(
        values=np.asarray(values, dtype=np.float64),
        method=method,
        fingerprint="t",
        target=target,
        signed=signed,
    )


@pytest.fixture(scope="module")
def sc8_net():
    return build_single_color_net(SC8)


@pytest.fixture(scope="module")
def mc24_net():
    return build_multi_color_net(MC24)


@pytest.fixture(scope="module")
def mc24_sample():
    return gen_multi_color(MC24, 1, seed=50)[0]


class TestNormalize:
    def test_worked_example(self):
        np.testing.assert_array_equal(
            normalize_attribution(np.array([[2.0, -4.0, 0.0]])), [[1.0, -1.0, 0.0]]
        )

    def test_all_positive_max_becomes_one(self):
        out = normalize_attribution(np.array([[0.5, 2.0, 1.0]]))
        assert out.max() == 1.0

    def test_all_zero_passes_through(self):
        np.testing.assert_array_equal(
            normalize_attribution(np.zeros((3, 3))), np.zeros((3, 3))
        )

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_idempotent(self, seed):
        v = np.random.default_rng(seed).normal(size=(5, 5))
        once = normalize_attribution(v)
        np.testing.assert_array_equal(normalize_attribution(once), once)


class TestScore:
    def _sample(self, gt):
        gt = np.asarray(gt, dtype=np.float64)
        return LabSample(image=np.zeros((1,) + gt.shape), label=0, gt_signed=gt)

    def test_perfect_attribution(self):
        gt = np.array([[1.0, -1.0], [0.0, 1.0]])
        s = self._sample(gt)
        t = score(as_map(gt), s, "overall")
        assert t.precision == t.recall == t.f1 == 1.0

    def test_worked_example(self):
        s = self._sample([[1.0, 1.0, 0.0]])
        t = score(as_map([[1.0, 0.5, 0.0]]), s, "overall")
        assert t.precision == 1.0
        assert t.recall == 0.75
        assert abs(t.f1 - 2 * 0.75 / 1.75) <= 1e-12

    def test_constant_map(self):
        gt = np.zeros((4, 4))
        gt[:2, :2] = 1.0
        s = self._sample(gt)
        t = score(as_map(np.ones((4, 4))), s, "overall")
        assert t.recall == 1.0
        assert t.precision == 4.0 / 16.0

    def test_binary_map_equals_set_precision_recall(self, rng):
        gt = (rng.random((6, 6)) < 0.3).astype(np.float64)
        pred = (rng.random((6, 6)) < 0.4).astype(np.float64)
        s = self._sample(gt)
        t = score(as_map(pred), s, "overall")
        tp = float((gt * pred).sum())
        want_p = tp / pred.sum() if pred.sum() else 0.0
        want_r = tp / gt.sum()
        assert abs(t.precision - want_p) <= 1e-12
        assert abs(t.recall - want_r) <= 1e-12

    def test_unsigned_method_incapable_on_negative(self):
        s = self._sample([[-1.0, 0.0]])
        t = score(as_map([[0.5, 0.2]], signed=False), s, "negative")
        assert (t.precision, t.recall, t.f1) == (0.0, 0.0, 0.0)
        assert "incapable" in t.flags

    def test_positive_variant_excludes_negative_attributions(self):
        s = self._sample([[1.0, 1.0]])
        t = score(as_map([[1.0, -1.0]]), s, "positive")
        assert t.precision == 1.0  # the negative entry leaves the denominator
        assert t.recall == 0.5

    def test_all_zero_map_scores_zero(self):
        s = self._sample([[1.0, 0.0]])
        t = score(as_map([[0.0, 0.0]]), s, "overall")
        assert t.precision == 0.0 and t.recall == 0.0 and t.f1 == 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=0.01, max_value=100.0))
    def test_scale_invariance_nonnegative_maps(self, c):
        rng = np.random.default_rng(3)
        gt = (rng.random((5, 5)) < 0.4).astype(np.float64)
        vals = rng.random((5, 5))
        s = self._sample(gt)
        a = score(as_map(vals), s, "overall")
        b = score(as_map(vals * c), s, "overall")
        assert abs(a.precision - b.precision) <= 1e-12
        assert abs(a.recall - b.recall) <= 1e-12
        assert abs(a.f1 - b.f1) <= 1e-12


class TestFaithfulnessVerdict:
    @pytest.mark.parametrize(
        "f1,passed", [(0.51, True), (0.5, True), (0.49, False)]
    )
    def test_boundary(self, f1, passed):
        from faithlab.metrics.scores import ScoreTriple

        verdict = faithfulness_test(
            ScoreTriple(0, 0, f1, "overall"), gamma=0.5
        )
        assert verdict.passed is passed


class TestStats:
    def test_identical_rankings(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0

    def test_reversed_length_three(self):
        assert spearman([1, 2, 3], [3, 2, 1]) == -1.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            spearman([1, 2], [1, 2, 3])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_pearson_matches_naive(self, seed):
        rng = np.random.default_rng(seed)
        x, y = rng.normal(size=20), rng.normal(size=20)
        naive = np.corrcoef(x, y)[0, 1]
        assert abs(pearson(x, y) - naive) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_spearman_matches_naive_on_tie_free_data(self, seed):
        rng = np.random.default_rng(seed)
        x, y = rng.normal(size=15), rng.normal(size=15)
        rx = np.argsort(np.argsort(x)).astype(float)
        ry = np.argsort(np.argsort(y)).astype(float)
        naive = np.corrcoef(rx, ry)[0, 1]
        assert abs(spearman(x, y) - naive) <= 1e-12


class TestInsertionDeletion:
    def test_oracle_map_maximal_insertion_auc(self, mc24_net, mc24_sample):
        s = mc24_sample
        oracle = as_map(s.gt_signed, target=s.label)
        rng = np.random.default_rng(0)
        rivals = [
            as_map(rng.random(s.gt_signed.shape), target=s.label),
            as_map(np.ones_like(s.gt_signed), target=s.label),
            as_map(-s.gt_signed, target=s.label),
        ]
        auc0 = insertion_deletion(mc24_net, s, oracle, "insertion", BLACK).auc
        for rival in rivals:
            assert auc0 >= insertion_deletion(mc24_net, s, rival, "insertion", BLACK).auc

    def test_oracle_deletion_monotone_until_positives_gone(self, mc24_net, mc24_sample):
        s = mc24_sample
        oracle = as_map(s.gt_signed, target=s.label)
        curve = insertion_deletion(mc24_net, s, oracle, "deletion", BLACK)
        n_pos = int((s.gt_signed > 0).sum())
        p = s.gt_signed.size
        within = curve.x <= n_pos / p + 1e-12
        segment = curve.y[within]
        assert (np.diff(segment) <= 1e-12).all()

    def test_constant_map_matches_permutation_average(self, mc24_net):
        # scattered toy image: row-major tie order behaves like a random draw
        rng = np.random.default_rng(8)
        img = np.empty((3, 24, 24))
        img[:] = np.array(MC24.background)[:, None, None]
        gt = np.zeros((24, 24))
        counts = [0, 0, 0, 0]
        for r in range(24):
            for c in range(24):
                if rng.random() < 0.25:
                    k = int(rng.integers(4))
                    img[:, r, c] = np.array(MC24.colors[k])
                    counts[k] += 1
        label = int(np.argmax(counts))
        s = LabSample(image=img, label=label, gt_signed=gt)
        const = insertion_deletion(
            mc24_net, s, as_map(np.ones((24, 24)), target=label), "insertion", BLACK
        ).auc
        perm_aucs = []
        for trial in range(30):
            vals = np.random.default_rng(trial).random((24, 24))
            perm_aucs.append(
                insertion_deletion(
                    mc24_net, s, as_map(vals, target=label), "insertion", BLACK
                ).auc
            )
        mean, sd = np.mean(perm_aucs), np.std(perm_aucs)
        assert abs(const - mean) <= 4 * sd


class TestAdaptedInsertionDeletion:
    def test_perfect_ordering_hits_oracle_auc(self, sc8_net):
        s = tiny_sc_sample()
        amap = as_map(s.gt_signed)
        got = adapted_insertion_deletion(sc8_net, s, amap, "insertion")
        assert abs(got.auc - oracle_adapted_auc(s, "insertion")) <= 1e-12

    def test_worst_ordering_is_one_minus_best(self, sc8_net):
        # brute force on a small image: inverted map perturbs whites last
        s = tiny_sc_sample()
        best = adapted_insertion_deletion(sc8_net, s, as_map(s.gt_signed), "insertion")
        worst = adapted_insertion_deletion(sc8_net, s, as_map(-s.gt_signed), "insertion")
        assert abs(worst.auc - (1.0 - best.auc)) <= 1.0 / s.gt_signed.size

    def test_insertion_plus_deletion_is_one(self, sc8_net):
        s = tiny_sc_sample()
        vals = np.random.default_rng(3).random((8, 8))
        amap = as_map(vals)
        ins = adapted_insertion_deletion(sc8_net, s, amap, "insertion")
        dele = adapted_insertion_deletion(sc8_net, s, amap, "deletion")
        assert abs(ins.auc + dele.auc - 1.0) <= 1.0 / 64

    def test_random_maps_average_half(self, sc8_net):
        s = tiny_sc_sample()
        aucs = [
            adapted_insertion_deletion(
                sc8_net, s, as_map(np.random.default_rng(k).random((8, 8))),
                "insertion",
            ).auc
            for k in range(15)
        ]
        assert 0.4 <= float(np.mean(aucs)) <= 0.6


class TestSensitivityN:
    def test_oracle_map_correlates_perfectly_adapted(self, sc8_net):
        s = tiny_sc_sample()
        curve = sensitivity_n(
            sc8_net, s, as_map(s.gt_signed), mode="adapted",
            repeats=40, n_grid=[8, 16, 32], seed=9,
        )
        assert curve.meta["zero_variance_at"] == []
        np.testing.assert_allclose(curve.y, 1.0, atol=1e-12)

    def test_negated_oracle_correlates_minus_one(self, sc8_net):
        s = tiny_sc_sample()
        curve = sensitivity_n(
            sc8_net, s, as_map(-s.gt_signed), mode="adapted",
            repeats=40, n_grid=[8, 16, 32], seed=9,
        )
        np.testing.assert_allclose(curve.y, -1.0, atol=1e-12)

    def test_sign_confused_map_negative_mean_with_ude(self):
        net = build_multi_color_net(MC24_UDE)
        s = gen_multi_color(MC24_UDE, 1, seed=51)[0]
        curve = sensitivity_n(
            net, s, as_map(-s.gt_signed, target=s.label), mode="standard",
            repeats=40, n_grid=[4, 16, 64, 128], replacement=BLACK, seed=10,
        )
        assert curve.auc < 0

    def test_too_few_repeats_rejected(self, sc8_net):
        with pytest.raises(ConfigError):
            sensitivity_n(sc8_net, tiny_sc_sample(), as_map(np.ones((8, 8))),
                          mode="adapted", repeats=1)


class TestRankTable:
    def test_identical_orderings_correlate_fully(self):
        per_method = {
            "a": {"gt_f1": 0.9, "insertion": 0.8},
            "b": {"gt_f1": 0.5, "insertion": 0.5},
            "c": {"gt_f1": 0.1, "insertion": 0.2},
        }
        table = build_rank_table(per_method)
        assert table.correlations["insertion"] == 1.0

    def test_rankings_are_permutations(self):
        per_method = {
            "a": {"gt_f1": 0.9, "deletion": 0.1},
            "b": {"gt_f1": 0.5, "deletion": 0.7},
            "c": {"gt_f1": 0.7, "deletion": 0.3},
            "d": {"gt_f1": 0.2, "deletion": 0.9},
        }
        table = build_rank_table(per_method)
        for ranking in table.rankings.values():
            assert sorted(ranking) == [0, 1, 2, 3]

    def test_deletion_ranks_ascending(self):
        per_method = {
            "a": {"gt_f1": 0.9, "deletion": 0.1},
            "b": {"gt_f1": 0.5, "deletion": 0.7},
            "c": {"gt_f1": 0.7, "deletion": 0.3},
        }
        table = build_rank_table(per_method)
        assert table.rankings["deletion"][0] == 0  # lowest deletion is best
        assert table.correlations["deletion"] == 1.0

    def test_needs_three_methods(self):
        with pytest.raises(ConfigError):
            build_rank_table({"a": {"gt_f1": 1.0}, "b": {"gt_f1": 0.5}})
