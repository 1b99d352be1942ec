import json

import numpy as np
import pytest

from markovconc import (
    absolute_spectral_gap,
    asymptotic_variance,
    exact_sum_variance,
    new_kernel,
    pseudo_spectral_gap,
    spectral_gap,
    spectral_report,
    stationary_distribution,
)
from markovconc.errors import NotReversible, NotSelfAdjoint, SearchExhaustedWarning
from markovconc.kernel import reversiblization_matrix
from markovconc.spectral import eigenvalues_self_adjoint, exact_sum_variance_general, stationary_variance

from conftest import ensemble

REVERSIBLE = [M for M, rev in ensemble(seed=21, count=16) if rev]
ALL = [M for M, _ in ensemble(seed=22, count=12)]


class TestEigenvalues:
    def test_permutation(self):
        np.testing.assert_allclose(eigenvalues_self_adjoint([[0, 1], [1, 0]], [0.5, 0.5]), [1, -1], atol=1e-14)

    def test_two_state(self, P1):
        np.testing.assert_allclose(eigenvalues_self_adjoint(P1, [0.5, 0.5]), [1, 0.2], atol=1e-14)

    def test_rank_one(self, rank_one):
        np.testing.assert_allclose(eigenvalues_self_adjoint(rank_one, [0.2, 0.3, 0.5]), [1, 0, 0], atol=1e-14)

    def test_not_self_adjoint(self, Q0):
        with pytest.raises(NotSelfAdjoint):
            eigenvalues_self_adjoint(Q0, np.full(4, 0.25))

    @pytest.mark.parametrize("M", REVERSIBLE)
    def test_matches_numpy_spectrum(self, M):
        pi = stationary_distribution(new_kernel(None, M)).weights
        ours = eigenvalues_self_adjoint(M, pi)
        theirs = np.sort(np.linalg.eigvals(M).real)[::-1]
        np.testing.assert_allclose(ours, theirs, atol=1e-10)


class TestGaps:
    @pytest.mark.parametrize("name, gap, gap_star", [("flip", 2.0, 0.0), ("P1", 0.8, 0.8), ("rank_one", 1.0, 1.0)])
    def test_examples(self, request, name, gap, gap_star):
        P = request.getfixturevalue(name)
        assert spectral_gap(P) == pytest.approx(gap, abs=1e-12)
        assert absolute_spectral_gap(P) == pytest.approx(gap_star, abs=1e-12)

    def test_repeated_eigenvalue_one(self):
        # block diagonal chain: pass any positive pi, the gap must vanish
        assert spectral_gap(np.eye(2), [0.5, 0.5]) == 0.0
        assert absolute_spectral_gap(np.eye(2), [0.5, 0.5]) == 0.0

    def test_not_reversible(self, Q0):
        with pytest.raises(NotReversible):
            spectral_gap(Q0)

    @pytest.mark.parametrize("M", REVERSIBLE)
    def test_gap_dominates_absolute_gap(self, M):
        assert spectral_gap(M) >= absolute_spectral_gap(M) - 1e-12

    @pytest.mark.parametrize("M", REVERSIBLE)
    def test_square_second_eigenvalue(self, M):
        pi = stationary_distribution(new_kernel(None, M)).weights
        lam = eigenvalues_self_adjoint(M, pi)
        lam2 = eigenvalues_self_adjoint(M @ M, pi)
        assert lam2[1] == pytest.approx(np.max(np.abs(lam[1:])) ** 2, abs=1e-10)


class TestPseudoGap:
    def test_q0(self, Q0):
        g = pseudo_spectral_gap(Q0)
        assert (g.gamma_ps, g.k_ps) == (pytest.approx(0.5, abs=1e-9), 2)

    def test_q1(self, Q1):
        g, k, eigs = pseudo_spectral_gap(Q1)
        assert g == pytest.approx(0.48, abs=1e-9)
        assert k == 2
        assert 1 - eigs[2][1] == pytest.approx(0.96, abs=1e-9)

    def test_rank_one(self, rank_one):
        g = pseudo_spectral_gap(rank_one)
        assert (g.gamma_ps, g.k_ps) == (pytest.approx(1.0), 1)

    def test_exhausted(self):
        # 3-cycle: (P*)^k P^k = I for every k
        P = np.roll(np.eye(3), 1, axis=1)
        with pytest.warns(SearchExhaustedWarning):
            g = pseudo_spectral_gap(P, k_max=5)
        assert g.exhausted and g.gamma_ps == 0.0

    @pytest.mark.parametrize("M", ALL)
    def test_stopping_rule_matches_full_scan(self, M):
        pi = stationary_distribution(new_kernel(None, M)).weights
        full = []
        for k in range(1, 25):
            eigs = eigenvalues_self_adjoint(reversiblization_matrix(M, pi, k), pi, tol=1e-8)
            full.append((0.0 if eigs[1] >= 1 - 1e-9 else 1 - eigs[1]) / k)
        g = pseudo_spectral_gap(M, pi)
        assert g.gamma_ps == pytest.approx(max(full), abs=1e-12)
        assert g.k_ps * g.gamma_ps == pytest.approx(1 - g.eigenvalues_by_k[g.k_ps][1], abs=1e-12)

    @pytest.mark.parametrize("M", ALL[:4])
    def test_monotone_in_kmax(self, M):
        values = [pseudo_spectral_gap(M, k_max=k).gamma_ps for k in range(1, 6)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("M", ALL)
    def test_eigenvalues_in_unit_interval(self, M):
        for eigs in pseudo_spectral_gap(M).eigenvalues_by_k.values():
            assert eigs.min() >= -1e-10 and eigs.max() <= 1 + 1e-10


class TestVariance:
    def test_rank_one_asymptotic(self, rank_one):
        f = [1.0, -2.0, 0.5]
        pi = [0.2, 0.3, 0.5]
        assert asymptotic_variance(rank_one, pi, f) == pytest.approx(stationary_variance(f, pi), abs=1e-12)

    def test_two_state_asymptotic(self, P1):
        assert asymptotic_variance(P1, [0.5, 0.5], [1, 0]) == pytest.approx(0.375, abs=1e-12)

    def test_constant(self, P1):
        assert asymptotic_variance(P1, None, [3, 3]) == pytest.approx(0.0, abs=1e-12)

    def test_exact_n1(self, P1):
        assert exact_sum_variance(P1, None, [1, 0], 1) == pytest.approx(0.25)

    def test_exact_two_state(self, P1):
        assert exact_sum_variance(P1, None, [1, 0], 2) == pytest.approx(0.6, abs=1e-12)

    def test_exact_rank_one_iid(self):
        P = np.full((2, 2), 0.5)
        assert exact_sum_variance(P, None, [1, -1], 10) == pytest.approx(10.0, abs=1e-12)

    @pytest.mark.parametrize("M", REVERSIBLE)
    def test_reversible_deviation(self, M):
        P = new_kernel(None, M)
        pi = stationary_distribution(P).weights
        f = np.arange(M.shape[0], dtype=float) ** 2
        V = stationary_variance(f, pi)
        g = spectral_gap(P, pi)
        s2 = asymptotic_variance(P, pi, f)
        for n in (1, 5, 50, 500):
            assert abs(exact_sum_variance(P, pi, f, n) - n * s2) <= 4 * V / g**2 + 1e-9

    @pytest.mark.parametrize("M", ALL[:4])
    def test_general_reduces_to_constant_f(self, M):
        f = np.linspace(-1, 1, M.shape[0])
        a = exact_sum_variance_general(M, None, [f] * 7)
        assert a == pytest.approx(exact_sum_variance(M, None, f, 7), abs=1e-12)

    def test_shape_mismatch(self, P1):
        with pytest.raises(ValueError):
            asymptotic_variance(P1, None, [1, 2, 3])


def test_report_json(Q1):
    d = spectral_report(Q1).to_dict()
    back = json.loads(json.dumps(d))
    assert back["k_ps"] == 2
    assert back["gamma_ps"] == pytest.approx(0.48, abs=1e-9)
    assert back["reversible"] is False
    assert back["gamma"] is None
