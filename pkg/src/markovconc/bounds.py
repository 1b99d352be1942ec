"""Evaluators for variance bounds and concentration tails of Markov chain sums.

Every probability bound is returned as a :class:`~markovconc.results.BoundResult`
holding the clamped value, the raw formula value and (for exponential tails)
the exponent, so that ``raw == 2 * exp(-exponent)`` (``1 * exp`` one-sided).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import MissingField, NonPositiveGap, ValidationError
from .kernel import as_matrix, as_weights, is_reversible, stationary_distribution
from .results import BoundResult, clamp_probability, exp_tail
from .spectral import (
    absolute_spectral_gap,
    asymptotic_variance,
    exact_sum_variance,
    exact_sum_variance_general,
    pseudo_spectral_gap,
    spectral_gap,
    stationary_variance,
)


def _ratio(num, den):
    if num == 0:
        return 0.0
    if den == 0:
        return math.inf
    return num / den


# ---------------------------------------------------------------- variance


@dataclass
class VarianceReport:
    n: int
    V_f: float
    sigma_as2: float
    exact: float
    gamma_ps: float
    bound_nonrev: float
    bound_nonrev_sigma: float
    deviation_bound_nonrev: float
    reversible: bool
    gamma: float | None = None
    gamma_star: float | None = None
    bound_rev: float | None = None
    bound_rev_sigma: float | None = None
    deviation_bound_rev: float | None = None
    exact_general: float | None = None
    per_coordinate_bound: float | None = None

    @property
    def deviation(self) -> float:
        """``|Var - n sigma_as^2|``."""
        return abs(self.exact - self.n * self.sigma_as2)

    def applicable_bounds(self) -> dict:
        out = {"nonrev": self.bound_nonrev, "nonrev_sigma": self.bound_nonrev_sigma}
        if self.reversible:
            out.update(rev=self.bound_rev, rev_sigma=self.bound_rev_sigma)
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["deviation"] = self.deviation
        return d


def variance_report(P, pi=None, f=None, n: int = 1, fs: Sequence | None = None) -> VarianceReport:
    """Exact variance of ``f(X_1)+...+f(X_n)`` next to every applicable bound.

    Reversible-chain fields (``gamma``, ``bound_rev`` ...) are filled only when
    the kernel satisfies detailed balance; pseudo-gap bounds always apply.
    Passing per-time functions ``fs`` adds the exact variance of
    ``f_1(X_1)+...+f_m(X_m)`` and the matching per-coordinate bound.
    """
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    V = stationary_variance(f, w)
    sigma2 = asymptotic_variance(P, w, f)
    exact = exact_sum_variance(P, w, f, n)
    gps = pseudo_spectral_gap(P, w).gamma_ps
    rep = VarianceReport(
        n=n,
        V_f=V,
        sigma_as2=sigma2,
        exact=exact,
        gamma_ps=gps,
        bound_nonrev=_ratio(4 * n * V, gps),
        bound_nonrev_sigma=n * sigma2 + _ratio(16 * V, gps**2),
        deviation_bound_nonrev=_ratio(16 * V, gps**2),
        reversible=is_reversible(P, w),
    )
    if rep.reversible:
        g = spectral_gap(P, w)
        rep.gamma = g
        rep.gamma_star = absolute_spectral_gap(P, w)
        rep.bound_rev = _ratio(2 * n * V, g)
        rep.bound_rev_sigma = n * sigma2 + _ratio(4 * V, g**2)
        rep.deviation_bound_rev = _ratio(4 * V, g**2)
    if fs is not None:
        rep.exact_general = exact_sum_variance_general(P, w, fs)
        vsum = sum(stationary_variance(fi, w) for fi in fs)
        if rep.reversible:
            rep.per_coordinate_bound = _ratio(2 * vsum, rep.gamma_star)
        else:
            rep.per_coordinate_bound = _ratio(4 * vsum, gps)
    return rep


# ---------------------------------------------------------------- Bernstein

_VARIANTS = {
    "revsigma": "RevSigma",
    "rev": "Rev",
    "revgeneral": "RevGeneral",
    "nonrev": "NonRev",
    "nonrevgeneral": "NonRevGeneral",
}


def normalize_variant(name: str) -> str:
    key = name.replace("_", "").replace("-", "").lower()
    try:
        return _VARIANTS[key]
    except KeyError:
        raise ValidationError(f"unknown Bernstein variant {name!r}; expected one of {sorted(_VARIANTS.values())}")


@dataclass
class BernsteinSpec:
    """Inputs of one Bernstein-type tail.

    ``V_f`` is the stationary variance for empirical sums (variants
    ``RevSigma``, ``Rev``, ``NonRev``); ``V_S`` is ``sum_i Var_pi(f_i)`` for
    the per-coordinate variants. ``C`` bounds ``|f - E_pi f|``.
    ``NonRevGeneral`` needs ``k_ps`` and either ``M`` or ``V_i_list``.
    """

    variant: str
    C: float
    n: int | None = None
    V_f: float | None = None
    V_S: float | None = None
    sigma_as2: float | None = None
    gamma: float | None = None
    gamma_star: float | None = None
    gamma_ps: float | None = None
    k_ps: int | None = None
    M: float | None = None
    V_i_list: list | None = None

    def __post_init__(self):
        self.variant = normalize_variant(self.variant)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


_REQUIRED = {
    "RevSigma": ("n", "V_f", "sigma_as2", "gamma"),
    "Rev": ("n", "V_f", "gamma"),
    "RevGeneral": ("V_S", "gamma_star"),
    "NonRev": ("n", "V_f", "gamma_ps"),
    "NonRevGeneral": ("V_S", "gamma_ps", "k_ps"),
}
_GAP_FIELD = {"RevSigma": "gamma", "Rev": "gamma", "RevGeneral": "gamma_star", "NonRev": "gamma_ps", "NonRevGeneral": "gamma_ps"}


def residue_variances(variances: Sequence[float], k_ps: int) -> list:
    """``V_i = sum_j Var(f_{i + j k_ps})`` for ``i = 1..k_ps`` (0-based input list)."""
    v = np.asarray(variances, dtype=float)
    return [float(v[i::k_ps].sum()) for i in range(k_ps)]


def residue_ratio(V_i: Sequence[float]) -> float:
    """``M = sum_i sqrt(V_i) / min_i sqrt(V_i)``."""
    r = np.sqrt(np.asarray(V_i, dtype=float))
    return _ratio(float(r.sum()), float(r.min()))


def bernstein_exponent(spec: BernsteinSpec, t: float) -> float:
    missing = [k for k in _REQUIRED[spec.variant] if getattr(spec, k) is None]
    if spec.variant == "NonRevGeneral" and spec.M is None and spec.V_i_list is None:
        missing.append("M or V_i_list")
    if missing:
        raise MissingField(f"{spec.variant} needs {', '.join(missing)}")
    gap = getattr(spec, _GAP_FIELD[spec.variant])
    if gap <= 0:
        raise NonPositiveGap(f"{_GAP_FIELD[spec.variant]} must be positive, got {gap}")
    if spec.C <= 0:
        raise ValidationError("C must be positive")
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0:
        return 0.0
    C = spec.C
    v = spec.variant
    if v == "RevSigma":
        return t * t / (2 * spec.n * (spec.sigma_as2 + 0.8 * spec.V_f) + 10 * t * C / spec.gamma)
    if v == "Rev":
        return t * t * spec.gamma / (4 * spec.n * spec.V_f + 10 * t * C)
    if v == "RevGeneral":
        g = spec.gamma_star
        return t * t * (2 * g - g * g) / (8 * spec.V_S + 20 * t * C)
    if v == "NonRev":
        g = spec.gamma_ps
        return t * t * g / (8 * (spec.n + 1 / g) * spec.V_f + 20 * t * C)
    M = spec.M if spec.M is not None else residue_ratio(spec.V_i_list)
    return _ratio(t * t * spec.gamma_ps, 8 * spec.V_S + 20 * t * C * M / spec.k_ps)


def bernstein_tail(spec: BernsteinSpec, t: float, one_sided: bool = False) -> BoundResult:
    """Bound on ``P_pi(|S - E S| >= t)`` for the chosen variant.

    ``min(1, 2 exp(-E))``; ``one_sided`` drops the factor 2 and bounds a
    single tail.
    """
    E = bernstein_exponent(spec, t)
    inputs = spec.to_dict()
    inputs["t"] = float(t)
    return exp_tail(E, spec.variant, one_sided=one_sided, inputs=inputs)


def default_C(f, pi=None) -> float:
    """``max f - min f``, which always dominates ``|f - E_pi f|``."""
    f = np.asarray(f, dtype=float)
    return float(f.max() - f.min())


def bernstein_spec(P, f=None, n: int | None = None, variant: str = "Rev", pi=None, C: float | None = None, fs=None) -> BernsteinSpec:
    """Fill a :class:`BernsteinSpec` from a kernel and function(s).

    For the per-coordinate variants pass the per-time functions as ``fs``.
    """
    variant = normalize_variant(variant)
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    spec = BernsteinSpec(variant=variant, C=1.0, n=n)
    if variant in ("RevGeneral", "NonRevGeneral"):
        if fs is None:
            raise MissingField(f"{variant} needs per-time functions fs")
        vars_ = [stationary_variance(fi, w) for fi in fs]
        spec.V_S = float(sum(vars_))
        spec.n = len(fs)
        spec.C = C if C is not None else max(default_C(fi) for fi in fs)
    else:
        spec.V_f = stationary_variance(f, w)
        spec.C = C if C is not None else default_C(f)
    if variant == "RevSigma":
        spec.sigma_as2 = asymptotic_variance(P, w, f)
    if variant in ("RevSigma", "Rev"):
        spec.gamma = spectral_gap(P, w)
    elif variant == "RevGeneral":
        spec.gamma_star = absolute_spectral_gap(P, w)
    else:
        ps = pseudo_spectral_gap(P, w)
        spec.gamma_ps = ps.gamma_ps
        if variant == "NonRevGeneral":
            spec.k_ps = ps.k_ps
            spec.V_i_list = residue_variances(vars_, ps.k_ps)
    return spec


# ---------------------------------------------------------------- non-stationary starts


def nq_decay(N_q: float, t0: int, gap: float, variant: str = "reversible") -> BoundResult:
    """Bound on ``N_{q P^t0}`` after a burn-in of ``t0`` steps.

    Reversible: ``1 + (N_q - 1)(1 - gamma*)^(2 t0)``; otherwise
    ``1 + (N_q - 1)(1 - gamma_ps)^(2 (t0 - 1/gamma_ps))``. When the latter
    exponent is negative the trivial bound ``N_q`` is returned with
    ``clamped`` set.
    """
    if N_q < 1:
        raise ValidationError("N_q >= 1 for any distribution")
    if not 0 < gap <= 1:
        raise NonPositiveGap("gap must lie in (0, 1]")
    inputs = {"N_q": N_q, "t0": t0, "gap": gap}
    if variant == "reversible":
        raw = 1.0 + (N_q - 1.0) * (1.0 - gap) ** (2 * t0)
    elif variant == "nonreversible":
        p = 2.0 * (t0 - 1.0 / gap)
        if p < 0:
            return BoundResult(value=N_q, raw=math.nan, variant="nq_decay_nonreversible", clamped=True, inputs=inputs)
        raw = 1.0 + (N_q - 1.0) * (1.0 - gap) ** p
    else:
        raise ValidationError(f"unknown variant {variant!r}")
    value = min(raw, N_q)
    return BoundResult(value=value, raw=raw, variant=f"nq_decay_{variant}", clamped=value != raw, inputs=inputs)


def nonstationary_adjust(raw: float, method: str = "sqrt", **params) -> BoundResult:
    """Transfer a stationary tail bound to a chain started from ``q``.

    method ``"sqrt"``
        ``sqrt(N_q * raw)``; params ``N_q``. (For ``q = pi`` use ``raw``.)
    method ``"burn_in"``
        ``sqrt(N_{qP^t0} * raw)`` with ``N_{qP^t0}`` bounded by
        :func:`nq_decay`; params ``N_q, t0, gap`` and optional ``variant``.
    method ``"additive"``
        ``raw + d_TV(q P^t0, pi)``; params ``d_tv``.
    """
    if not 0 <= raw <= 1:
        raise ValidationError("raw must be a probability")
    if method == "sqrt":
        val = math.sqrt(params["N_q"]) * math.sqrt(raw)
    elif method == "burn_in":
        nq = nq_decay(params["N_q"], params["t0"], params["gap"], params.get("variant", "reversible")).value
        val = math.sqrt(nq) * math.sqrt(raw)
    elif method == "additive":
        val = raw + params["d_tv"]
    else:
        raise ValidationError(f"unknown method {method!r}")
    return clamp_probability(val, f"nonstationary_{method}", inputs={"raw": raw, **params})


# ---------------------------------------------------------------- truncation


def clip(x, a, b):
    """``T_[a,b](x) = min(max(x, a), b)``."""
    return np.minimum(np.maximum(x, a), b)


def truncated_tail_bound(
    P,
    pi,
    f,
    a: float,
    b: float,
    t: float,
    n: int,
    inner_bound_fn: Callable[[np.ndarray], float] | None = None,
) -> BoundResult:
    """Bound on ``P_pi(f(X_1)+...+f(X_n) >= t)`` for an unbounded ``f``.

    ``inner_bound_fn(g)`` must bound ``P_pi(sum g(X_i) >= t)`` for the
    clipped function ``g = T_[a,b](f)``. The default applies a one-sided
    Bernstein bound (``Rev`` if reversible, else ``NonRev``) at deviation
    ``t - n E_pi g``. The truncation cost ``n pi(f <= a) + n pi(f >= b)`` is
    exact on a finite state space.
    """
    if not a < b:
        raise ValidationError("need a < b")
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    f = np.asarray(f, dtype=float)
    g = clip(f, a, b)
    if inner_bound_fn is None:
        inner_bound_fn = _default_inner(P, w, n, t)
    inner = float(inner_bound_fn(g))
    # union bound on P(min f < a) and P(max f > b); the clip only acts there
    below = float(w[f < a].sum())
    above = float(w[f > b].sum())
    correction = n * (below + above)
    return clamp_probability(
        inner + correction,
        "truncated",
        inputs={"a": a, "b": b, "t": t, "n": n, "inner": inner, "correction": correction},
    )


def _default_inner(P, w, n, t):
    rev = is_reversible(P, w)

    def inner(g):
        dev = t - n * float(w @ g)
        if dev <= 0:
            return 1.0
        if np.ptp(g) == 0:
            return 0.0
        spec = bernstein_spec(P, g, n, "Rev" if rev else "NonRev", pi=w)
        return bernstein_tail(spec, dev, one_sided=True).value

    return inner


# ---------------------------------------------------------------- McDiarmid / empirical TV


def mcdiarmid_markov_tail(c, tau_min: float, t: float, one_sided: bool = False) -> BoundResult:
    """``2 exp(-t^2 / (2 ||c||^2 tau_min))`` for a bounded-differences function."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValidationError("c must be entrywise non-negative")
    if tau_min <= 0:
        raise ValidationError("tau_min must be positive")
    c2 = float(c @ c)
    E = 0.0 if t == 0 else (math.inf if c2 == 0 else t * t / (2 * c2 * tau_min))
    return exp_tail(E, "mcdiarmid_markov", one_sided=one_sided, inputs={"norm_c2": c2, "tau_min": tau_min, "t": t})


def dtv_concentration_tail(n: int, t_mix: float, t: float) -> BoundResult:
    """``2 exp(-t^2 n / (8 t_mix))`` for ``|d_TV(pi_em, pi) - E d_TV(pi_em, pi)|``.

    This is the McDiarmid bound with ``c_i = 1/n`` and ``tau_min <= 4 t_mix``.
    """
    E = t * t * n / (8.0 * t_mix)
    return exp_tail(E, "dtv_concentration", inputs={"n": n, "t_mix": t_mix, "t": t})


def empirical_tv_mean_bound(pi, n: int, gap: float, variant: str = "reversible") -> float:
    """``sum_x min(sqrt(2 pi(x) / (n g)), pi(x))`` bounding ``E d_TV(pi_em, pi)``.

    ``g`` is the spectral gap for reversible chains and ``gamma_ps / 2``
    otherwise.
    """
    if gap <= 0:
        raise NonPositiveGap("gap must be positive")
    g = gap if variant == "reversible" else gap / 2.0
    w = as_weights(pi)
    return float(np.sum(np.minimum(np.sqrt(2.0 * w / (n * g)), w)))
