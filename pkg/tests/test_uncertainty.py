import math

import numpy as np
import pytest

from cgwitness import (
    ErrorModel,
    GaussianTwoPhotonState,
    JointCounts,
    WitnessPipeline,
    propagate,
    sample_joint_counts,
)
from cgwitness.errors import (
    ConfigurationError,
    InvalidParameterError,
    PropagationError,
)


@pytest.fixture(scope="module")
def scans():
    import cgwitness as cg

    geo = cg.OpticalGeometry()
    st = GaussianTwoPhotonState(10.0, 2.5)
    pos = sample_joint_counts(st, geo, "position", 2e5, seed=31)
    mom = sample_joint_counts(st, geo, "momentum", 2e5, seed=32)
    return pos, mom


class TestErrorModel:
    def test_defaults(self):
        em = ErrorModel()
        assert em.poisson and em.center_jitter and not em.rigid_offsets
        assert em.replicates == 1000

    def test_replicate_floor(self):
        with pytest.raises(InvalidParameterError):
            ErrorModel(replicates=50)
        assert ErrorModel(replicates=50, fast_mode=True).replicates == 50
        with pytest.raises(InvalidParameterError):
            ErrorModel(replicates=1, fast_mode=True)

    def test_jitter_sigma_anchors(self, geometry):
        em = ErrorModel()
        assert em.center_sigma_position(1, geometry) == pytest.approx(
            0.01 * math.sqrt(2) * 50.0 / 200.0, rel=1e-12
        )
        assert em.center_sigma_momentum(1, geometry) == pytest.approx(
            0.5468163616194912, rel=1e-12
        )
        # grows linearly with the rebin factor
        assert em.center_sigma_position(7, geometry) == pytest.approx(
            7 * em.center_sigma_position(1, geometry), rel=1e-12
        )


class TestWitnessPipeline:
    def test_rejects_non_data_witness(self):
        with pytest.raises(ConfigurationError):
            WitnessPipeline(witness_id="mgvt_continuous")

    def test_rejects_even_or_nonpositive_factors(self):
        with pytest.raises(ConfigurationError):
            WitnessPipeline(witness_id="coarse_variance", n=2)
        with pytest.raises(ConfigurationError):
            WitnessPipeline(witness_id="coarse_variance", m=0)

    def test_rejects_swapped_scan_files(self, scans):
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance")
        with pytest.raises(ConfigurationError):
            pipe.evaluate(mom, pos)

    def test_evaluate_matches_manual_rebin(self, scans):
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance", pairing="pm", n=3, m=1)
        r, s = pipe.marginals(pos, mom)
        from cgwitness import coarse_variance_witness

        manual = coarse_variance_witness(r.normalize(), s.normalize()).value
        assert pipe.evaluate(pos, mom).value == pytest.approx(manual, rel=1e-12)

    def test_mp_pairing_uses_other_diagonals(self, scans):
        pos, mom = scans
        a = WitnessPipeline(witness_id="coarse_variance", pairing="pm").evaluate(*scans)
        b = WitnessPipeline(witness_id="coarse_variance", pairing="mp").evaluate(*scans)
        assert a.pairing == "pm" and b.pairing == "mp"
        assert a.value != pytest.approx(b.value, rel=1e-6)


class TestPropagate:
    def test_point_estimate_is_unperturbed(self, scans):
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance", n=3, m=3)
        em = ErrorModel(replicates=150, fast_mode=True, seed=5)
        rep = propagate(pos, mom, pipe, em)
        assert rep.value == pytest.approx(pipe.evaluate(pos, mom).value, rel=1e-12)
        assert rep.uncertainty is not None and rep.uncertainty > 0.0

    def test_deterministic_given_seed(self, scans):
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_entropic", n=3, m=3)
        em = ErrorModel(replicates=150, fast_mode=True, seed=8)
        a = propagate(pos, mom, pipe, em)
        b = propagate(pos, mom, pipe, em)
        assert a.uncertainty == b.uncertainty

    def test_poisson_stderr_matches_independent_resampling(self, scans):
        # same statistic, independently coded Monte Carlo
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance", n=3, m=3)
        em = ErrorModel(center_jitter=False, replicates=1000, seed=13)
        got = propagate(pos, mom, pipe, em).uncertainty

        r, s = pipe.marginals(pos, mom)
        rng = np.random.default_rng(99)
        values = []
        for _ in range(4000):
            vs = []
            for h in (r, s):
                c = rng.poisson(h.counts).astype(float)
                tot = c.sum()
                mu = (h.grid.centers * c).sum() / tot
                var = ((h.grid.centers - mu) ** 2 * c).sum() / tot
                vs.append(var + h.grid.width**2 / 12.0)
            values.append(vs[0] * vs[1] - 1.0)
        want = float(np.std(values, ddof=1))
        assert got == pytest.approx(want, rel=0.15)

    def test_entropic_uncertainty_ignores_jitter(self, scans):
        # center jitter shifts bin positions; entropies use masses only
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_entropic", n=5, m=5)
        a = propagate(pos, mom, pipe, ErrorModel(replicates=300, seed=3))
        b = propagate(
            pos, mom, pipe, ErrorModel(center_jitter=False, replicates=300, seed=3)
        )
        assert a.uncertainty == pytest.approx(b.uncertainty, rel=1e-12)

    def test_rigid_offsets_leave_variances_alone(self, scans):
        # a common shift of every bin center cancels in the variance
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance", n=5, m=5)
        rigid = propagate(
            pos, mom, pipe, ErrorModel(rigid_offsets=True, replicates=300, seed=4)
        )
        poisson_only = propagate(
            pos, mom, pipe, ErrorModel(center_jitter=False, replicates=300, seed=4)
        )
        assert rigid.uncertainty == pytest.approx(poisson_only.uncertainty, rel=1e-9)

    def test_per_bin_jitter_inflates_variance_uncertainty(self, scans):
        pos, mom = scans
        pipe = WitnessPipeline(witness_id="coarse_variance", n=5, m=5)
        with_jitter = propagate(pos, mom, pipe, ErrorModel(replicates=500, seed=6))
        without = propagate(
            pos, mom, pipe, ErrorModel(center_jitter=False, replicates=500, seed=6)
        )
        assert with_jitter.uncertainty > without.uncertainty

    def test_starved_counts_raise_propagation_error(self, geometry):
        ones = np.zeros((3, 3), dtype=np.int64)
        ones[1, 1] = 1
        pos = JointCounts(
            variable_pair="position", step=0.05, counts=ones, geometry=geometry
        )
        mom = JointCounts(
            variable_pair="momentum", step=0.02, counts=ones, geometry=geometry
        )
        pipe = WitnessPipeline(witness_id="coarse_variance")
        em = ErrorModel(replicates=200, seed=0)
        with pytest.raises(PropagationError):
            propagate(pos, mom, pipe, em)

    def test_geometry_mismatch_rejected(self, scans, geometry):
        pos, _ = scans
        import cgwitness as cg

        other = cg.OpticalGeometry(f2_mm=150.0)
        st = GaussianTwoPhotonState(10.0, 2.5)
        mom = sample_joint_counts(st, other, "momentum", 1e4, seed=9)
        pipe = WitnessPipeline(witness_id="coarse_variance")
        with pytest.raises(ConfigurationError):
            propagate(pos, mom, pipe, ErrorModel(replicates=150, fast_mode=True))
