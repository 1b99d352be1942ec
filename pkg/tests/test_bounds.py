import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovconc import (
    BernsteinSpec,
    bernstein_spec,
    bernstein_tail,
    dtv_concentration_tail,
    empirical_tv_mean_bound,
    mcdiarmid_markov_tail,
    new_kernel,
    nonstationary_adjust,
    nq_decay,
    truncated_tail_bound,
    variance_report,
)
from markovconc.bounds import bernstein_exponent, clip, default_C, residue_ratio, residue_variances
from markovconc.errors import MissingField, NonPositiveGap, ValidationError

from conftest import ensemble

FULL_SPECS = {
    "RevSigma": dict(n=100, V_f=0.25, sigma_as2=0.375, gamma=0.8),
    "Rev": dict(n=100, V_f=0.25, gamma=0.8),
    "RevGeneral": dict(V_S=25.0, gamma_star=0.8),
    "NonRev": dict(n=100, V_f=0.25, gamma_ps=0.96),
    "NonRevGeneral": dict(V_S=25.0, gamma_ps=0.5, k_ps=2, M=2.0),
}


class TestVarianceReport:
    def test_rank_one(self):
        P = np.full((2, 2), 0.5)
        r = variance_report(P, None, [1, -1], 10)
        assert r.exact == pytest.approx(10.0)
        assert r.bound_rev == pytest.approx(20.0)

    def test_two_state(self, P1):
        r = variance_report(P1, None, [1, 0], 2)
        assert r.exact == pytest.approx(0.6)
        assert r.bound_rev == pytest.approx(1.25)
        assert r.deviation == pytest.approx(0.15)
        assert r.deviation_bound_rev == pytest.approx(1.5625)

    def test_constant(self, P1):
        r = variance_report(P1, None, [2, 2], 5)
        assert r.exact == pytest.approx(0.0, abs=1e-15)
        assert all(v == pytest.approx(0.0, abs=1e-15) for v in r.applicable_bounds().values())

    def test_non_reversible_has_no_rev_fields(self, Q0):
        r = variance_report(Q0, None, [0, 1, 1, 0], 10)
        assert r.bound_rev is None and set(r.applicable_bounds()) == {"nonrev", "nonrev_sigma"}
        json.dumps(r.to_dict())

    @pytest.mark.parametrize("M, rev", ensemble(seed=41, count=8))
    def test_per_coordinate(self, M, rev):
        rng = np.random.default_rng(M.shape[0])
        fs = [rng.normal(size=M.shape[0]) for _ in range(6)]
        r = variance_report(M, None, fs[0], 6, fs=fs)
        assert r.exact_general <= r.per_coordinate_bound + 1e-9


class TestBernstein:
    def test_rev_example(self):
        spec = BernsteinSpec("Rev", C=0.5, n=100, V_f=0.25, gamma=0.8)
        r = bernstein_tail(spec, 20)
        assert r.exponent == pytest.approx(1.6)
        assert r.value == pytest.approx(2 * math.exp(-1.6))
        assert round(r.value, 4) == 0.4038

    @pytest.mark.parametrize("variant", sorted(FULL_SPECS))
    def test_t_zero_clamped(self, variant):
        r = bernstein_tail(BernsteinSpec(variant, C=1.0, **FULL_SPECS[variant]), 0.0)
        assert r.value == 1.0 and r.clamped and r.raw == 2.0

    @pytest.mark.parametrize("variant", sorted(FULL_SPECS))
    def test_monotone_and_bounded(self, variant):
        spec = BernsteinSpec(variant, C=1.0, **FULL_SPECS[variant])
        vals = [bernstein_tail(spec, t).value for t in np.linspace(0, 200, 81)]
        assert all(0 <= v <= 1 for v in vals)
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("variant", sorted(FULL_SPECS))
    def test_exposes_exponent(self, variant):
        r = bernstein_tail(BernsteinSpec(variant, C=1.0, **FULL_SPECS[variant]), 30.0)
        assert r.raw == pytest.approx(2 * math.exp(-r.exponent))
        assert bernstein_tail(BernsteinSpec(variant, C=1.0, **FULL_SPECS[variant]), 30.0, one_sided=True).raw == pytest.approx(
            math.exp(-r.exponent)
        )

    def test_uniform_residues_give_M_equal_kps(self):
        V = residue_variances([1.0] * 12, 3)
        assert V == [4.0, 4.0, 4.0]
        assert residue_ratio(V) == pytest.approx(3.0)
        a = BernsteinSpec("NonRevGeneral", C=1.0, V_S=12.0, gamma_ps=0.3, k_ps=3, V_i_list=V)
        t = 5.0
        assert bernstein_exponent(a, t) == pytest.approx(t * t * 0.3 / (8 * 12.0 + 20 * t))

    def test_rank_one_revsigma_vs_rev(self):
        # gamma = 1 and sigma^2 = V_f: RevSigma denominator 3.6 n V_f + 10 t C beats 4 n V_f + 10 t C
        a = BernsteinSpec("RevSigma", C=1.0, n=50, V_f=1.0, sigma_as2=1.0, gamma=1.0)
        b = BernsteinSpec("Rev", C=1.0, n=50, V_f=1.0, gamma=1.0)
        for t in np.linspace(1, 50, 20):
            assert bernstein_tail(a, t).raw <= bernstein_tail(b, t).raw

    def test_missing_field(self):
        with pytest.raises(MissingField):
            bernstein_tail(BernsteinSpec("Rev", C=1.0, n=10), 1.0)

    def test_nonpositive_gap(self):
        with pytest.raises(NonPositiveGap):
            bernstein_tail(BernsteinSpec("NonRev", C=1.0, n=10, V_f=1.0, gamma_ps=0.0), 1.0)

    def test_unknown_variant(self):
        with pytest.raises(ValidationError):
            bernstein_spec(np.full((2, 2), 0.5), [0, 1], 10, "Chernoff")

    @pytest.mark.parametrize("variant", ["rev", "rev_sigma", "nonrev"])
    def test_spec_from_kernel(self, P1, variant):
        spec = bernstein_spec(P1, [1, 0], 100, variant)
        assert spec.C == 1.0 and spec.V_f == pytest.approx(0.25)
        if variant != "nonrev":
            assert spec.gamma == pytest.approx(0.8)
        if variant == "rev_sigma":
            assert spec.sigma_as2 == pytest.approx(0.375)

    def test_spec_per_coordinate(self, Q1):
        fs = [np.array([0, 1, 1, 0.0])] * 5
        spec = bernstein_spec(Q1, None, None, "NonRevGeneral", fs=fs)
        assert spec.k_ps == 2 and spec.n == 5 and len(spec.V_i_list) == 2
        assert 0 <= bernstein_tail(spec, 2.0).value <= 1

    def test_default_C(self):
        assert default_C([3.0, -1.0, 2.0]) == 4.0


class TestNonStationary:
    def test_sqrt_identity(self):
        assert nonstationary_adjust(0.04, "sqrt", N_q=1.0).value == pytest.approx(0.2)

    def test_sqrt(self):
        assert nonstationary_adjust(0.01, "sqrt", N_q=4.0).value == pytest.approx(0.2)

    def test_additive(self):
        assert nonstationary_adjust(0.01, "additive", d_tv=0.05).value == pytest.approx(0.06)

    def test_burn_in(self):
        r = nonstationary_adjust(0.01, "burn_in", N_q=2.0, t0=5, gap=0.8)
        assert r.value == pytest.approx(math.sqrt(1 + 0.2**10) * 0.1)

    def test_nq_decay_reversible(self):
        assert nq_decay(2.0, 5, 0.8).value == pytest.approx(1 + 0.2**10)

    @pytest.mark.parametrize("t0", [0, 3, 100])
    def test_nq_decay_trivial(self, t0):
        assert nq_decay(1.0, t0, 0.5).value == 1.0

    def test_nq_decay_nonrev_clamped(self):
        r = nq_decay(5.0, 1, 0.25, "nonreversible")
        assert r.value == 5.0 and r.clamped


class TestTruncation:
    def test_clip(self):
        assert clip(3, -1, 1) == 1 and clip(-2, -1, 1) == -1

    def test_identity_when_inside(self, P1):
        r = truncated_tail_bound(P1, None, [0.0, 1.0], -1.0, 2.0, 70.0, 100)
        assert r.inputs["correction"] == 0.0
        spec = bernstein_spec(P1, [0.0, 1.0], 100, "Rev")
        assert r.value == pytest.approx(bernstein_tail(spec, 20.0, one_sided=True).value)

    def test_correction_clamped(self):
        P = np.tile([0.9, 0.1], (2, 1))
        r = truncated_tail_bound(P, None, [0.0, 10.0], -1.0, 5.0, 1.0, 10)
        assert r.inputs["correction"] == pytest.approx(1.0)
        assert r.value == 1.0 and r.clamped

    def test_custom_inner(self, P1):
        seen = []
        r = truncated_tail_bound(P1, None, [0.0, 3.0], 0.0, 1.0, 5.0, 4, inner_bound_fn=lambda g: seen.append(g) or 0.125)
        np.testing.assert_array_equal(seen[0], [0.0, 1.0])
        assert r.raw == pytest.approx(0.125 + 4 * 0.5)
        assert r.value == 1.0


class TestMcDiarmid:
    def test_tau_min_example(self):
        r = mcdiarmid_markov_tail([0.01] * 100, 1.5625, 0.5)
        assert r.value == pytest.approx(2 * math.exp(-8))

    def test_tmix_form(self):
        r = dtv_concentration_tail(100, 1, 0.5)
        assert r.value == pytest.approx(2 * math.exp(-3.125))
        # with tau_min <= 4 t_mix the corollary gives at least as much
        assert mcdiarmid_markov_tail([0.01] * 100, 4.0, 0.5).value <= r.value + 1e-15

    def test_t_zero(self):
        assert mcdiarmid_markov_tail([1.0], 2.0, 0.0).value == 1.0

    def test_negative_c(self):
        with pytest.raises(ValidationError):
            mcdiarmid_markov_tail([-1.0], 1.0, 1.0)


class TestEmpiricalTV:
    def test_uniform(self):
        b = empirical_tv_mean_bound([0.5, 0.5], 200, 0.8)
        assert b == pytest.approx(math.sqrt(4 / 160))

    def test_nonreversible_halves_gap(self):
        assert empirical_tv_mean_bound([0.5, 0.5], 200, 1.6, "nonreversible") == pytest.approx(
            empirical_tv_mean_bound([0.5, 0.5], 200, 0.8)
        )

    def test_point_mass(self):
        assert empirical_tv_mean_bound([1.0], 2, 0.5) == 1.0
        assert empirical_tv_mean_bound([1.0], 400, 0.5) == pytest.approx(math.sqrt(2 / 200))

    def test_decreasing_in_n(self):
        vals = [empirical_tv_mean_bound([0.2, 0.3, 0.5], n, 0.7) for n in (1, 10, 100, 1000, 10**5)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.02


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(sorted(FULL_SPECS)),
    st.floats(0.01, 10),
    st.floats(0, 500),
    st.floats(0, 500),
)
def test_property_tail_monotone(variant, C, t1, t2):
    spec = BernsteinSpec(variant, C=C, **FULL_SPECS[variant])
    lo, hi = sorted((t1, t2))
    a, b = bernstein_tail(spec, lo), bernstein_tail(spec, hi)
    assert 0 <= b.value <= a.value <= 1
