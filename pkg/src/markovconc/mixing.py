"""Total variation profiles, mixing times and their links to spectral gaps."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingField, NoFiniteTau, TMaxTooSmallWarning, ValidationError, ZeroGap
from .kernel import as_matrix, as_weights, stationary_distribution
from .results import BoundResult, clamp_probability

DEFAULT_EPS = (1 / 4, 1 / 8, 1 / 16)
# added to scanned TV values before they are used as epsilon in the bridges,
# so rounding in d-bar can never make a lower bound too optimistic
_TV_GUARD = 1e-12


def tv_distance(p, q) -> float:
    p = as_weights(p)
    q = as_weights(q)
    return float(0.5 * np.sum(np.abs(p - q)))


def _max_pair_tv(A) -> float:
    n = A.shape[0]
    best = 0.0
    for x in range(n - 1):
        d = 0.5 * np.abs(A[x + 1 :] - A[x]).sum(axis=1).max()
        best = max(best, float(d))
    return best


@dataclass
class MixingReport:
    """d(t), d-bar(t) tables and the mixing times read off them.

    Epsilon keys absent from ``t_mix_eps`` / ``tau_eps`` were not reached
    within the scan; they are listed in ``not_reached``.
    """

    d_table: list
    dbar_table: list
    t_mix_eps: dict
    tau_eps: dict
    tau_min: float | None
    t_max_scanned: int
    eps: tuple = DEFAULT_EPS
    not_reached: list = field(default_factory=list)

    @property
    def incomplete(self) -> bool:
        return bool(self.not_reached)

    @property
    def d(self) -> np.ndarray:
        return np.array([v for _, v in self.d_table])

    @property
    def dbar(self) -> np.ndarray:
        return np.array([v for _, v in self.dbar_table])

    def t_mix(self, eps: float = 0.25) -> int | None:
        for t, v in self.d_table:
            if v <= eps:
                return t
        return None

    def tau(self, eps: float) -> int | None:
        for t, v in self.dbar_table:
            if v <= eps:
                return t
        return None

    def to_dict(self, digits: int | None = None) -> dict:
        r = (lambda x: x) if digits is None else (lambda x: float(f"{x:.{digits}g}"))
        return {
            "d_table": [[t, r(v)] for t, v in self.d_table],
            "dbar_table": [[t, r(v)] for t, v in self.dbar_table],
            "t_mix_eps": {repr(float(e)): t for e, t in self.t_mix_eps.items()},
            "tau_eps": {repr(float(e)): t for e, t in self.tau_eps.items()},
            "tau_min": None if self.tau_min is None else r(self.tau_min),
            "t_max_scanned": self.t_max_scanned,
            "not_reached": [repr(float(e)) for e in self.not_reached],
        }


def mixing_profile(P, pi=None, t_max: int | None = None, eps=DEFAULT_EPS, stop_early: bool = True) -> MixingReport:
    """Exact ``d(t)`` and ``d-bar(t)`` for ``t = 1..t_max`` from matrix powers.

    ``t_max`` defaults to ``64 * |Omega|``. With ``stop_early`` the scan ends
    once every requested epsilon has been reached by both profiles and
    ``t`` exceeds the running ``tau_min`` (nothing reported can change after
    that). If some epsilon is never reached a :class:`TMaxTooSmallWarning`
    is issued and the partial report is returned.
    """
    M = as_matrix(P)
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    n = M.shape[0]
    if t_max is None:
        t_max = 64 * n
    if t_max < 1:
        raise ValidationError("t_max must be >= 1")
    eps = tuple(sorted(set(float(e) for e in eps), reverse=True))
    d_table, dbar_table = [], []
    t_mix_eps, tau_eps = {}, {}
    tau_min = None
    A = np.eye(n)
    t = 0
    for t in range(1, t_max + 1):
        A = A @ M
        d = float(0.5 * np.abs(A - w[None, :]).sum(axis=1).max())
        db = _max_pair_tv(A)
        d_table.append((t, d))
        dbar_table.append((t, db))
        for e in eps:
            if e not in t_mix_eps and d <= e:
                t_mix_eps[e] = t
            if e not in tau_eps and db <= e:
                tau_eps[e] = t
        if db < 1.0:
            cand = t / (1.0 - db) ** 2
            if tau_min is None or cand < tau_min:
                tau_min = cand
        if (
            stop_early
            and len(t_mix_eps) == len(eps)
            and len(tau_eps) == len(eps)
            and tau_min is not None
            and t >= tau_min
        ):
            break
    not_reached = [e for e in eps if e not in t_mix_eps or e not in tau_eps]
    if not_reached:
        warnings.warn(
            f"d(t) or d-bar(t) above epsilon={min(not_reached)} at t_max={t_max}",
            TMaxTooSmallWarning,
            stacklevel=2,
        )
    return MixingReport(d_table, dbar_table, t_mix_eps, tau_eps, tau_min, t, eps, not_reached)


@dataclass(frozen=True)
class GapLowerBounds:
    gamma_star_lb: float | None
    gamma_ps_lb: float
    gamma_star_lb_tmix: float | None
    gamma_ps_lb_tmix: float | None

    def __iter__(self):
        return iter((self.gamma_star_lb, self.gamma_ps_lb))


def _eps_tau_pairs(report: MixingReport):
    pairs = [(e, t) for e, t in report.tau_eps.items() if e < 1.0]
    # every scanned d-bar(t) is an epsilon with tau(epsilon) <= t
    pairs += [(min(db + _TV_GUARD, 1.0), t) for t, db in report.dbar_table if db + _TV_GUARD < 1.0]
    return pairs


def gap_lower_bounds_from_mixing(report: MixingReport, reversible: bool) -> GapLowerBounds:
    """Best lower bounds on the absolute and pseudo spectral gaps.

    ``gamma* >= 1 / (1 + tau(eps) / log(1/eps))`` (reversible chains only) and
    ``gamma_ps >= (1 - eps) / tau(eps)``, maximised over every epsilon the
    report supports, together with the ``t_mix`` forms
    ``1 / (1 + t_mix / log 2)`` and ``1 / (2 t_mix)``.
    """
    pairs = _eps_tau_pairs(report)
    if not pairs:
        raise NoFiniteTau("tau(eps) is infinite for every scanned epsilon")
    ps_lb = max((1.0 - e) / t for e, t in pairs)
    star_lb = None
    if reversible:
        star_lb = max(1.0 if e == 0 else 1.0 / (1.0 + t / math.log(1.0 / e)) for e, t in pairs)
    tm = report.t_mix(0.25)
    ps_tm = None if tm is None else 1.0 / (2.0 * tm)
    star_tm = None if (tm is None or not reversible) else 1.0 / (1.0 + tm / math.log(2.0))
    return GapLowerBounds(star_lb, ps_lb, star_tm, ps_tm)


def mixing_upper_bounds_from_gap(gap: float, pi_min: float, eps: float = 0.25, reversible: bool = True) -> float:
    """Upper bound on ``t_mix(eps)`` from ``gamma*`` (reversible) or ``gamma_ps``.

    Reversible: ``(2 log(1/(2 eps)) + log(1/pi_min)) / (2 gamma*)``.
    General: ``(1 + 2 log(1/(2 eps)) + log(1/pi_min)) / gamma_ps``.
    """
    if gap <= 0:
        raise ZeroGap("gap must be positive")
    if not 0 < pi_min <= 1:
        raise ValidationError("pi_min must lie in (0, 1]")
    core = 2.0 * math.log(1.0 / (2.0 * eps)) + math.log(1.0 / pi_min)
    if reversible:
        return core / (2.0 * gap)
    return (1.0 + core) / gap


def tv_decay_bound(
    n: int,
    N_q: float | None = None,
    gap: float | None = None,
    variant: str = "reversible",
    report: MixingReport | None = None,
    t_mix: int | None = None,
) -> BoundResult:
    """Upper bound on ``d_TV(q P^n, pi)``.

    variant ``"reversible"``
        ``0.5 (1 - gamma*)^n sqrt(N_q - 1)``
    variant ``"nonreversible"``
        ``0.5 (1 - gamma_ps)^((n - 1/gamma_ps) / 2) sqrt(N_q - 1)``
    variant ``"uniform"``
        ``inf_eps eps^floor(n / tau(eps))`` from a mixing report, or
        ``2^-floor(n / t_mix)`` when only ``t_mix`` is given.
    """
    if variant in ("reversible", "nonreversible"):
        if N_q is None or gap is None:
            raise MissingField(f"variant {variant!r} needs N_q and gap")
        if N_q == math.inf:
            raw = math.inf
        elif variant == "reversible":
            raw = 0.5 * (1.0 - gap) ** n * math.sqrt(max(N_q - 1.0, 0.0))
        else:
            if gap <= 0:
                raise ZeroGap("gamma_ps must be positive")
            raw = 0.5 * (1.0 - gap) ** ((n - 1.0 / gap) / 2.0) * math.sqrt(max(N_q - 1.0, 0.0))
        return clamp_probability(raw, f"tv_decay_{variant}", inputs={"n": n, "N_q": N_q, "gap": gap})
    if variant == "uniform":
        cands = []
        if t_mix is not None:
            cands.append(2.0 ** (-(n // t_mix)))
        if report is not None:
            cands += [e ** (n // t) for e, t in _eps_tau_pairs(report)]
            tm = report.t_mix(0.25)
            if tm is not None:
                cands.append(2.0 ** (-(n // tm)))
        if not cands:
            raise NoFiniteTau("no finite mixing time available for the uniform variant")
        return clamp_probability(min(cands), "tv_decay_uniform", inputs={"n": n, "t_mix": t_mix})
    raise ValidationError(f"unknown variant {variant!r}")
