import numpy as np
import pytest

from subalign import (
    ExperimentConfig,
    JointCovariance,
    ReplicateRecord,
    ScientistParams,
    identity_pair,
    replicate_seed,
    reversed_pair,
    run_experiment,
    run_replicate,
    spiked_diag_pair,
    summarize,
)
from subalign.sim import build_models


def reference_splitmix_mix(x):
    # Independent transcription of the splitmix64 finalizer.
    mask = (1 << 64) - 1
    x &= mask
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & mask
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & mask
    x ^= x >> 31
    return x


class TestReplicateSeed:
    def test_matches_documented_mix(self):
        base, p, r = 42, 3, 17
        assert replicate_seed(base, p, r) == reference_splitmix_mix(base ^ ((p << 32) | r))

    def test_distinct_across_cells(self):
        seeds = {replicate_seed(42, p, r) for p in range(20) for r in range(50)}
        assert len(seeds) == 20 * 50

    def test_fits_in_64_bits(self):
        assert 0 <= replicate_seed(2**64 - 1, 2**32 - 1, 2**32 - 1) < 2**64

    def test_index_range_checks(self):
        with pytest.raises(ValueError):
            replicate_seed(0, 2**32, 0)
        with pytest.raises(ValueError):
            replicate_seed(0, 0, -1)


class TestRunReplicate:
    def test_trivial_method_zero_distance(self):
        rec = run_replicate(identity_pair(6, 0.5), 2, 500, "trivial", 1)
        assert rec.d_sq == 0.0
        assert rec.status == "ok"

    def test_identity_model_weighted_equals_unweighted(self):
        rec = run_replicate(identity_pair(6, 0.5), 2, 500, "pca", 2)
        assert abs(rec.eth_sq - rec.d_sq) < 1e-12

    def test_reversed_model_correction_is_exact(self):
        jc, w = reversed_pair(20, 0.7, 0.6)
        rec = run_replicate(jc, 2, 500, "pca", 3, isometry=w)
        assert abs(rec.eth_sq - rec.d_sq_corrected) < 1e-9

    def test_record_ranges_and_residual_identity(self):
        for seed in range(5):
            rec = run_replicate(spiked_diag_pair(20, 0.7, 0.6), 2, 300, "pca", seed)
            for value in (rec.d_sq, rec.eth_sq, rec.eps_sq):
                assert 0.0 <= value <= 4.0
            assert rec.residual == rec.eps_sq - rec.predicted

    def test_scientist_model(self):
        params = ScientistParams(m=6, gamma=1.0)
        rec = run_replicate(params, 2, 400, "trivial", 9)
        assert rec.eps_sq == pytest.approx(0.0, abs=1e-9)
        assert rec.predicted == pytest.approx(0.0, abs=1e-9)

    def test_rank_deficiency_marks_failure(self):
        rec = run_replicate(identity_pair(6, 0.5), 5, 4, "pca", 1)
        assert rec.status == "deficient_rank"
        assert rec.d_sq is None and rec.eps_sq is None

    def test_degenerate_projection_marks_failure(self):
        diag = np.diag([0.0, 0.0, 1.0, 1.0, 1.0, 1.0])
        jc = JointCovariance(diag, diag, np.zeros((6, 6)))
        rec = run_replicate(jc, 2, 50, "trivial", 99)
        assert rec.status == "degenerate_projection"


class TestExperimentConfig:
    def test_rejects_bad_method(self):
        with pytest.raises(ValueError, match="method"):
            ExperimentConfig("illus1", 6, (2,), (100,), (0.5,), 3, method="svd")

    def test_rejects_k_above_m(self):
        with pytest.raises(ValueError, match="k values"):
            ExperimentConfig("illus1", 6, (7,), (100,), (0.5,), 3)

    def test_rejects_zero_replicates(self):
        with pytest.raises(ValueError, match="replicates"):
            ExperimentConfig("illus1", 6, (2,), (100,), (0.5,), 0)

    def test_rejects_infeasible_sweep_before_work(self):
        cfg = ExperimentConfig("illus1", 6, (2,), (100,), (1.5,), 3)
        with pytest.raises(ValueError, match="beta"):
            build_models(cfg)

    def test_custom_requires_models(self):
        with pytest.raises(ValueError, match="models"):
            ExperimentConfig("custom", 6, (2,), (100,), (), 3)


class TestRunExperiment:
    def small_cfg(self, **overrides):
        base = dict(
            experiment="illus1", m=6, k_values=(2,), n_values=(200,),
            sweep=(0.2, 0.5), replicates=3, base_seed=7, method="pca",
        )
        base.update(overrides)
        return ExperimentConfig(**base)

    def test_record_count_and_order(self):
        records = run_experiment(self.small_cfg())
        assert len(records) == 6
        assert [r.sweep_param for r in records] == [0.2, 0.2, 0.2, 0.5, 0.5, 0.5]
        assert [r.replicate for r in records] == [0, 1, 2, 0, 1, 2]

    def test_rerun_is_bit_identical(self):
        cfg = self.small_cfg()
        assert run_experiment(cfg) == run_experiment(cfg)

    def test_worker_count_does_not_change_results(self):
        cfg = self.small_cfg(replicates=4)
        assert run_experiment(cfg, workers=1) == run_experiment(cfg, workers=2)

    def test_custom_models(self):
        jc, w = reversed_pair(8, 0.7, 0.5)
        cfg = ExperimentConfig(
            experiment="custom", m=8, k_values=(1, 2), n_values=(300,), sweep=(),
            replicates=2, base_seed=11, models=((0.5, jc, w),),
        )
        records = run_experiment(cfg)
        assert len(records) == 4
        assert all(r.d_sq_corrected is not None for r in records)
        assert all(abs(r.eth_sq - r.d_sq_corrected) < 1e-9 for r in records)

    def test_failed_replicates_recorded_not_raised(self):
        cfg = self.small_cfg(k_values=(5,), n_values=(4,), sweep=(0.5,))
        records = run_experiment(cfg)
        assert len(records) == 3
        assert all(r.status == "deficient_rank" for r in records)


class TestSummarize:
    @staticmethod
    def record(eps, rep, status="ok", k=2):
        ok = status == "ok"
        return ReplicateRecord(
            experiment="custom", method="pca", m=6, k=k, n=100, sweep_param=0.5,
            replicate=rep,
            d_sq=0.0 if ok else None, eth_sq=0.0 if ok else None,
            eps_sq=eps if ok else None, predicted=2.0 if ok else None,
            residual=(eps - 2.0) if ok else None, status=status,
        )

    def test_mean_and_sample_stdev(self):
        stats = summarize([self.record(1.0, 0), self.record(3.0, 1)])
        assert len(stats) == 1
        s = stats[0]
        assert s.count == 2
        assert s.mean_eps_sq == pytest.approx(2.0)
        assert s.stdev_eps_sq == pytest.approx(np.sqrt(2.0))
        assert s.mean_eps_sq_over_2k == pytest.approx(0.5)
        assert s.mean_residual == pytest.approx(0.0)

    def test_all_equal_values(self):
        stats = summarize([self.record(1.5, i) for i in range(4)])
        assert stats[0].stdev_eps_sq == pytest.approx(0.0)

    def test_single_sample_flag(self):
        s = summarize([self.record(1.5, 0)])[0]
        assert s.single_sample
        assert s.stdev_eps_sq == 0.0

    def test_failed_records_excluded_and_counted(self):
        stats = summarize([
            self.record(1.0, 0), self.record(3.0, 1),
            self.record(0.0, 2, status="deficient_rank"),
        ])
        s = stats[0]
        assert s.count == 2
        assert s.failed == 1
        assert s.mean_eps_sq == pytest.approx(2.0)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError, match="no records"):
            summarize([])

    def test_grouping_splits_on_k(self):
        stats = summarize([self.record(1.0, 0, k=1), self.record(3.0, 0, k=2)])
        assert len(stats) == 2


def test_reversed_weighted_matches_unpermuted_distance_distribution():
    # The weighted distance under the reversed model plays the role the
    # plain distance plays in the unpermuted model: replicate-by-replicate
    # the two experiments produce statistically matching values, while the
    # reversed model's raw distance is inflated.
    common = dict(m=12, k_values=(1,), n_values=(2000,), replicates=8, base_seed=21)
    plain = run_experiment(ExperimentConfig(
        experiment="illus2", sweep=(0.7,), beta=0.6, **common))
    reversed_ = run_experiment(ExperimentConfig(
        experiment="illus3", sweep=(0.6,), lambda2=0.7, **common))
    mean_d_plain = np.mean([r.d_sq for r in plain])
    mean_eth_rev = np.mean([r.eth_sq for r in reversed_])
    mean_d_rev = np.mean([r.d_sq for r in reversed_])
    assert abs(mean_eth_rev - mean_d_plain) < 0.05
    assert mean_d_rev > mean_eth_rev + 0.5


def test_trivial_identity_prediction_is_flat_line():
    # With the trivial subspaces the distance is identically zero, so the
    # predicted value is the intercept (1 - rho) * 2k for every replicate.
    cfg = ExperimentConfig(
        experiment="illus1", m=6, k_values=(2,), n_values=(300,), sweep=(0.5,),
        replicates=4, base_seed=3, method="trivial",
    )
    for rec in run_experiment(cfg):
        assert rec.predicted == pytest.approx((1.0 - 0.5) * 4.0, abs=1e-12)
        assert rec.eth_sq == pytest.approx(0.0, abs=1e-12)
