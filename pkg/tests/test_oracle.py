import pytest

from geneval import (
    CompatibilityThresholds,
    ConstraintMismatchError,
    ConstraintSet,
    EvaluationFunction,
    OracleConfig,
    PreferenceLabel,
    ScenarioConfig,
    build_comparison_set,
    global_error,
    label_set,
    mirror,
    oracle_label,
)
from conftest import synthetic_comparison_set

ONE = ConstraintSet(("size",))
F_ONE = EvaluationFunction(ONE, (1.0,), 1)


def comparison_with_diff(va: float, vb: float):
    cs = synthetic_comparison_set(("size",), [((va,), (vb,))])
    return cs.comparisons[0]


class TestOracleLabel:
    def test_identical_vectors_equivalent(self):
        c = comparison_with_diff(0.5, 0.5)
        cfg = OracleConfig(hidden_function=F_ONE)
        assert oracle_label(c, cfg) is PreferenceLabel.EQUIVALENT

    @pytest.mark.parametrize("va,vb,expected", [
        (0.9, 0.5, PreferenceLabel.FAR_BETTER_A),       # d = +0.4 beyond t3
        (0.5, 0.9, PreferenceLabel.FAR_BETTER_B),
        (0.75, 0.5, PreferenceLabel.BETTER_A),           # 0.15 < 0.25 <= 0.30
        (0.5, 0.75, PreferenceLabel.BETTER_B),
        (0.625, 0.5, PreferenceLabel.SLIGHTLY_BETTER_A),  # 0.05 < 0.125 <= 0.15
        (0.5, 0.625, PreferenceLabel.SLIGHTLY_BETTER_B),
        (0.53125, 0.5, PreferenceLabel.EQUIVALENT),       # 0.03125 <= 0.05
    ])
    def test_partition_lookup(self, va, vb, expected):
        cfg = OracleConfig(hidden_function=F_ONE, label_cuts=(0.05, 0.15, 0.30))
        assert oracle_label(comparison_with_diff(va, vb), cfg) is expected

    def test_deterministic_with_noise(self):
        c = comparison_with_diff(0.9, 0.2)
        cfg = OracleConfig(hidden_function=F_ONE, noise_rate=0.7, seed=11)
        assert oracle_label(c, cfg) is oracle_label(c, cfg)

    def test_missing_constraint_named_in_error(self):
        wide = ConstraintSet(("size", "orientation"))
        f = EvaluationFunction(wide, (1.0, 1.0), 1)
        cs = synthetic_comparison_set(("size",), [((0.5,), (0.6,))])
        with pytest.raises(ConstraintMismatchError, match="orientation"):
            oracle_label(cs.comparisons[0], OracleConfig(hidden_function=f))


class TestLabelSet:
    def test_one_record_per_comparison_in_order(self):
        cfg = ScenarioConfig()
        cs = build_comparison_set(cfg, 25, 4, seed=17)
        hidden = EvaluationFunction(cfg.constraint_set, (1.0,) * 6, 1)
        records = label_set(cs, OracleConfig(hidden_function=hidden))
        assert len(records) == 100
        assert [r.comparison_id for r in records] == \
            [c.comparison_id for c in cs.comparisons]
        assert all(r.source == "oracle" for r in records)

    def test_rerun_identical(self):
        cfg = ScenarioConfig()
        cs = build_comparison_set(cfg, 5, 2, seed=2)
        hidden = EvaluationFunction(cfg.constraint_set, (0.5,) * 6, 2)
        oc = OracleConfig(hidden_function=hidden, noise_rate=0.3, seed=5)
        assert label_set(cs, oc) == label_set(cs, oc)

    def test_noise_flip_fraction(self):
        # 10,000 synthetic comparisons, noise 0.5: flipped fraction in 0.5 +/- 0.02
        pairs = [((0.9,), (0.2,))] * 10_000
        cs = synthetic_comparison_set(("size",), pairs)
        base = label_set(cs, OracleConfig(hidden_function=F_ONE, noise_rate=0.0))
        noisy = label_set(cs, OracleConfig(hidden_function=F_ONE, noise_rate=0.5, seed=1))
        flipped = sum(1 for b, n in zip(base, noisy) if b.label is not n.label)
        assert abs(flipped / 10_000 - 0.5) <= 0.02

    def test_mirror_consistency_noiseless(self):
        cfg = ScenarioConfig()
        cs = build_comparison_set(cfg, 6, 2, seed=23)
        hidden = EvaluationFunction(
            ConstraintSet(("size", "position")), (1.0, 0.5), 2)
        oc = OracleConfig(hidden_function=hidden)
        for c in cs.comparisons:
            assert oracle_label(c.swapped(), oc) is mirror(oracle_label(c, oc))


class TestNoiselessConsistency:
    def test_hidden_function_has_zero_error_on_own_labels(self):
        # cuts aligned with the default compatibility thresholds
        cfg = ScenarioConfig()
        cs = build_comparison_set(cfg, 20, 3, seed=31)
        visible = ConstraintSet(("size", "granularity", "squareness", "convexity", "position"))
        hidden = EvaluationFunction(visible, (0.8, 0.3, 0.55, 0.15, 0.9), 2)
        prefs = label_set(cs, OracleConfig(hidden_function=hidden))
        assert global_error(cs, prefs, hidden, CompatibilityThresholds()) == 0.0


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(hidden_function=F_ONE, label_cuts=(0.2, 0.1, 0.3))
    with pytest.raises(ValueError):
        OracleConfig(hidden_function=F_ONE, label_cuts=(0.1, 0.1, 0.3))
    with pytest.raises(ValueError):
        OracleConfig(hidden_function=F_ONE, noise_rate=1.5)


def test_oracle_config_json_round_trip():
    cfg = OracleConfig(hidden_function=F_ONE, label_cuts=(0.04, 0.2, 0.5),
                       noise_rate=0.1, seed=9)
    assert OracleConfig.from_json_obj(cfg.to_json_obj()) == cfg
