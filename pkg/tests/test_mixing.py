import math
import warnings

import numpy as np
import pytest

from markovconc import (
    absolute_spectral_gap,
    gap_lower_bounds_from_mixing,
    mixing_profile,
    mixing_upper_bounds_from_gap,
    new_kernel,
    pseudo_spectral_gap,
    stationary_distribution,
    tv_decay_bound,
)
from markovconc.errors import NoFiniteTau, TMaxTooSmallWarning, ZeroGap
from markovconc.kernel import chi_square_nq
from markovconc.marton import one_step_contraction
from markovconc.mixing import tv_distance

from conftest import ensemble

KERNELS = ensemble(seed=31, count=12)


def _full(M, t_max=60):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TMaxTooSmallWarning)
        return mixing_profile(M, t_max=t_max, stop_early=False)


@pytest.mark.parametrize("p, q, d", [([0.3, 0.7], [0.3, 0.7], 0.0), ([1, 0], [0, 1], 1.0), ([0.6, 0.4], [0.5, 0.5], 0.1)])
def test_tv_distance(p, q, d):
    assert tv_distance(p, q) == pytest.approx(d, abs=1e-15)


class TestProfile:
    def test_rank_one(self, rank_one):
        rep = mixing_profile(rank_one)
        assert rep.d_table[0] == (1, pytest.approx(0.0, abs=1e-15))
        assert rep.t_mix() == 1

    def test_two_state_closed_form(self, P1):
        rep = mixing_profile(P1, t_max=8, stop_early=False)
        t = np.arange(1, 9)
        np.testing.assert_allclose(rep.d, 0.5 * 0.2**t, atol=1e-15)
        np.testing.assert_allclose(rep.dbar, 0.2**t, atol=1e-15)
        assert rep.t_mix(0.25) == 1
        assert rep.tau_min == pytest.approx(1 / 0.8**2)

    def test_periodic(self, flip):
        with pytest.warns(TMaxTooSmallWarning):
            rep = mixing_profile(flip, t_max=10)
        np.testing.assert_allclose(rep.d, 0.5)
        assert rep.t_mix(0.25) is None
        assert 0.25 in rep.not_reached and 0.25 not in rep.t_mix_eps
        assert rep.incomplete

    def test_stop_early_agrees_with_full_scan(self, P1):
        short = mixing_profile(P1)
        full = mixing_profile(P1, t_max=40, stop_early=False)
        assert short.t_mix_eps == full.t_mix_eps
        assert short.tau_eps == full.tau_eps
        assert short.tau_min == pytest.approx(full.tau_min)

    def test_one_step_contraction_is_dbar1(self):
        for M, _ in KERNELS:
            assert one_step_contraction(M) == pytest.approx(_full(M, 1).dbar[0], abs=1e-15)


@pytest.mark.parametrize("M, rev", KERNELS)
class TestProfileInvariants:
    def test_monotone(self, M, rev):
        rep = _full(M)
        assert np.all(np.diff(rep.d) <= 1e-12)
        assert np.all(np.diff(rep.dbar) <= 1e-12)

    def test_dbar_subadditive(self, M, rev):
        db = _full(M, 30).dbar
        for t in range(1, 15):
            for s in range(1, 15):
                assert db[t + s - 1] <= db[t - 1] + db[s - 1] + 1e-10

    def test_tau_sandwich(self, M, rev):
        rep = _full(M)
        for eps in (1 / 4, 1 / 8, 1 / 16):
            assert rep.tau(2 * eps) <= rep.t_mix(eps) <= rep.tau(eps)

    def test_tau_power(self, M, rev):
        rep = _full(M)
        for eps in (0.5, 0.25):
            for k in (2, 3):
                if rep.tau(eps**k) is not None:
                    assert rep.tau(eps**k) <= k * rep.tau(eps)

    def test_tau_min_against_eps_grid(self, M, rev):
        rep = _full(M, 200)
        grid = np.linspace(0, 1, 1000, endpoint=False)
        vals = [rep.tau(e) / (1 - e) ** 2 for e in grid if rep.tau(e) is not None]
        assert rep.tau_min <= min(vals) + 1e-12
        assert min(vals) <= rep.tau_min * 1.01

    def test_lower_bounds_hold(self, M, rev):
        rep = mixing_profile(M)
        lb = gap_lower_bounds_from_mixing(rep, rev)
        assert pseudo_spectral_gap(M).gamma_ps >= lb.gamma_ps_lb - 1e-12
        assert pseudo_spectral_gap(M).gamma_ps >= lb.gamma_ps_lb_tmix - 1e-12
        if rev:
            assert absolute_spectral_gap(M) >= lb.gamma_star_lb - 1e-12
            assert absolute_spectral_gap(M) >= lb.gamma_star_lb_tmix - 1e-12

    def test_decay_bound_valid(self, M, rev):
        P = new_kernel(None, M)
        pi = stationary_distribution(P).weights
        rng = np.random.default_rng(M.shape[0])
        rep = mixing_profile(P)
        gps = pseudo_spectral_gap(P, pi).gamma_ps
        for _ in range(5):
            q = rng.dirichlet(np.ones(len(pi)))
            Nq = chi_square_nq(q, pi)
            qt = q.copy()
            for n in range(1, 16):
                qt = qt @ M
                measured = tv_distance(qt, pi)
                assert measured <= tv_decay_bound(n, Nq, gps, "nonreversible").value + 1e-12
                assert measured <= tv_decay_bound(n, report=rep, variant="uniform").value + 1e-12
                if rev:
                    assert measured <= tv_decay_bound(n, Nq, absolute_spectral_gap(P, pi)).value + 1e-12


class TestGapBridges:
    def test_rank_one_tmix_forms(self, rank_one):
        lb = gap_lower_bounds_from_mixing(mixing_profile(rank_one), reversible=True)
        assert lb.gamma_star_lb_tmix == pytest.approx(1 / (1 + 1 / math.log(2)))
        assert lb.gamma_ps_lb_tmix == pytest.approx(0.5)
        assert lb.gamma_ps_lb >= 0.5

    def test_periodic_no_tau(self, flip):
        with pytest.warns(TMaxTooSmallWarning):
            rep = mixing_profile(flip, t_max=10)
        with pytest.raises(NoFiniteTau):
            gap_lower_bounds_from_mixing(rep, reversible=True)

    def test_upper_reversible(self):
        assert mixing_upper_bounds_from_gap(0.8, 0.5, 0.25) == pytest.approx(3 * math.log(2) / 1.6)

    def test_upper_general(self):
        ub = mixing_upper_bounds_from_gap(0.5, 0.25, 0.25, reversible=False)
        assert ub == pytest.approx((1 + 2 * math.log(2) + math.log(4)) / 0.5)

    def test_upper_monotone(self):
        vals = [mixing_upper_bounds_from_gap(g, 0.5) for g in (0.9, 0.5, 0.1, 1e-3, 1e-6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_zero_gap(self):
        with pytest.raises(ZeroGap):
            mixing_upper_bounds_from_gap(0.0, 0.5)


class TestDecayBound:
    def test_reversible(self):
        assert tv_decay_bound(10, 2.0, 0.8).value == pytest.approx(0.5 * 0.2**10)

    def test_uniform(self):
        assert tv_decay_bound(10, variant="uniform", t_mix=1).value == pytest.approx(2**-10)

    @pytest.mark.parametrize("variant", ["reversible", "nonreversible"])
    def test_stationary_start(self, variant):
        assert tv_decay_bound(5, 1.0, 0.5, variant).value == 0.0

    def test_clamped(self):
        r = tv_decay_bound(1, 1e6, 0.1)
        assert r.value == 1.0 and r.clamped
