"""Command line front end: ``markovconc <subcommand> ...``.

Every subcommand prints one JSON document on stdout. Exit status is 0 on
success, 1 for invalid input (a JSON error object goes to stderr) and 2 when
a numerical routine fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, hypothesis, marton, mixing, simulate, spectral
from .errors import NumericalError, ValidationError
from .kernel import load_kernel, stationary_distribution


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(s):
    try:
        return [float(x) for x in s.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a comma separated list of numbers, got {s!r}")


def _round(obj, digits):
    if digits is None:
        return obj
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist(), digits)
    if isinstance(obj, np.generic):
        return _round(obj.item(), digits)
    return obj


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _kernel(args):
    path = getattr(args, "kernel_pos", None) or args.kernel
    if path is None:
        raise UsageError("a kernel JSON file is required (--kernel)")
    try:
        return load_kernel(path)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise UsageError(f"cannot read kernel {path!r}: {e}")


# ---------------------------------------------------------------- subcommands


def cmd_spectral(args):
    P = _kernel(args)
    return spectral.spectral_report(P, k_max=args.kmax).to_dict()


def cmd_mixing(args):
    P = _kernel(args)
    eps = tuple(_floats(args.eps)) if args.eps else mixing.DEFAULT_EPS
    rep = mixing.mixing_profile(P, t_max=args.tmax, eps=eps)
    out = rep.to_dict()
    out["incomplete"] = rep.incomplete
    if args.table:
        lines = [f"{'t':>6} {'d(t)':>14} {'dbar(t)':>14}"]
        for (t, d), (_, db) in zip(rep.d_table, rep.dbar_table):
            lines.append(f"{t:>6} {d:>14.6g} {db:>14.6g}")
        out["table"] = "\n".join(lines)
    return out


def cmd_bounds(args):
    kind = args.kind
    if kind == "bernstein":
        if args.c is None:
            raise UsageError("--c is required")
        spec = bounds.BernsteinSpec(
            variant=args.variant or "Rev",
            C=args.c,
            n=args.n,
            V_f=args.vf,
            V_S=args.vs,
            sigma_as2=args.sigma2,
            gamma=args.gamma,
            gamma_star=args.gamma_star,
            gamma_ps=args.gamma_ps,
            k_ps=args.kps,
            M=args.m,
        )
        if args.t is None:
            raise UsageError("--t is required")
        return bounds.bernstein_tail(spec, args.t, one_sided=args.one_sided).to_dict()
    if kind == "variance":
        P = _kernel(args)
        if args.f is None:
            raise UsageError("--f is required")
        return bounds.variance_report(P, f=_floats(args.f), n=args.n or 1).to_dict()
    if kind == "mcdiarmid":
        if args.t is None:
            raise UsageError("--t is required")
        if args.tau_min is not None:
            c = _floats(args.cvec) if args.cvec else [1.0 / args.n] * args.n
            return bounds.mcdiarmid_markov_tail(c, args.tau_min, args.t).to_dict()
        if args.tmix is None or args.n is None:
            raise UsageError("give --tau-min (with --cvec or --n) or --tmix with --n")
        return bounds.dtv_concentration_tail(args.n, args.tmix, args.t).to_dict()
    if kind == "tv-mean":
        pi = _floats(args.pi) if args.pi else stationary_distribution(_kernel(args)).weights
        if args.n is None or args.gap is None:
            raise UsageError("--n and --gap are required")
        variant = args.variant or "reversible"
        return {"bound": bounds.empirical_tv_mean_bound(pi, args.n, args.gap, variant), "variant": variant}
    raise UsageError(f"unknown bound kind {kind!r}")


def cmd_marton(args):
    if args.blocks is None:
        raise UsageError("--blocks is required")
    if args.mdep:
        G = marton.mdep_mixing_matrix(args.blocks)
    else:
        G = marton.markov_mixing_matrix(args.blocks, args.eps_gamma)
    out = {"gamma": G.tolist(), "operator_norm": marton.operator_norm(G)}
    if args.t is not None:
        Cc = _floats(args.cvec) if args.cvec else [1.0] * args.blocks
        out["tail"] = marton.mcdiarmid_general_tail(G, Cc, args.t).to_dict()
    return out


def _test_report(test, obs, xi):
    rep = hypothesis.decide(test, obs, xi)
    return {"test": test.to_dict(), "report": rep.to_dict()}


def cmd_hypothesis(args):
    if not (args.p0 and args.p1 and args.data):
        raise UsageError("--p0, --p1 and --data are required")
    test = hypothesis.build_test(load_kernel(args.p0), load_kernel(args.p1), args.xi)
    return _test_report(test, hypothesis.load_observations(args.data), args.xi)


def cmd_simulate(args):
    P = _kernel(args)
    cfg = simulate.SimConfig(seed=args.seed, trials=args.trials, n=args.n or 100)
    if args.tv:
        grid = _floats(args.t_grid) if args.t_grid else None
        return simulate.tv_experiment(P, cfg, t_grid=grid, workers=args.workers).to_dict()
    if args.f is None:
        raise UsageError("--f is required (or pass --tv)")
    f = _floats(args.f)
    grid = _floats(args.t_grid) if args.t_grid else list(np.linspace(0, cfg.n * (max(f) - min(f)) / 4, 11)[1:])
    rep = simulate.tail_experiment(P, f, cfg, grid, workers=args.workers)
    if args.out:
        Path(args.out).write_text(rep.to_csv())
    return rep.to_dict()


def cmd_coin_demo(args):
    test = hypothesis.coin_test(args.xi)
    path = args.data or hypothesis.coin_data_path()
    obs = hypothesis.load_observations(path)
    out = _test_report(test, obs, args.xi)
    Q0, Q1 = test.Q0, test.Q1
    out["pair_chains"] = {
        "states": list(Q0.states),
        "Q0": Q0.matrix.tolist(),
        "Q1": Q1.matrix.tolist(),
        "pi_Q0": stationary_distribution(Q0).weights.tolist(),
        "pi_Q1": stationary_distribution(Q1).weights.tolist(),
    }
    out["reference_exponents"] = {"type1": 4.120, "type2": 4.133}
    return out


# ---------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="markovconc", description="Concentration bounds for finite Markov chains.")
    p.add_argument("--precise", action="store_true", help="full precision instead of 6 significant digits")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def kernel_args(sp, positional=True):
        if positional:
            sp.add_argument("kernel_pos", nargs="?", metavar="KERNEL")
        sp.add_argument("--kernel")

    s = sub.add_parser("spectral", help="gaps and pseudo spectral gap")
    kernel_args(s)
    s.add_argument("--kmax", type=int)
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("mixing", help="d(t), d-bar(t), mixing times")
    kernel_args(s)
    s.add_argument("--tmax", type=int)
    s.add_argument("--eps")
    s.add_argument("--table", action="store_true")
    s.set_defaults(func=cmd_mixing)

    s = sub.add_parser("bounds", help="evaluate a bound")
    s.add_argument("kind", choices=["bernstein", "variance", "mcdiarmid", "tv-mean"])
    kernel_args(s, positional=False)
    s.add_argument("--variant")
    s.add_argument("--n", type=int)
    s.add_argument("--t", type=float)
    s.add_argument("--c", type=float)
    s.add_argument("--vf", type=float)
    s.add_argument("--vs", type=float)
    s.add_argument("--sigma2", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--gamma-star", type=float)
    s.add_argument("--gamma-ps", type=float)
    s.add_argument("--kps", type=int)
    s.add_argument("--m", type=float)
    s.add_argument("--one-sided", action="store_true")
    s.add_argument("--f")
    s.add_argument("--cvec")
    s.add_argument("--tau-min", type=float)
    s.add_argument("--tmix", type=float)
    s.add_argument("--pi")
    s.add_argument("--gap", type=float)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("marton", help="mixing matrix and dependent McDiarmid tail")
    s.add_argument("--blocks", type=int)
    s.add_argument("--eps", dest="eps_gamma", type=float, default=0.0)
    s.add_argument("--mdep", action="store_true")
    s.add_argument("--cvec")
    s.add_argument("--t", type=float)
    s.set_defaults(func=cmd_marton)

    s = sub.add_parser("hypothesis", help="likelihood ratio test between two kernels")
    s.add_argument("--p0")
    s.add_argument("--p1")
    s.add_argument("--data")
    s.add_argument("--xi", type=float, default=0.0)
    s.set_defaults(func=cmd_hypothesis)

    s = sub.add_parser("simulate", help="Monte Carlo check of the bounds")
    kernel_args(s)
    s.add_argument("--f")
    s.add_argument("--n", type=int)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--t-grid")
    s.add_argument("--tv", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("coin-demo", help="coin tossing test on the bundled data")
    s.add_argument("--data")
    s.add_argument("--xi", type=float, default=0.0)
    s.set_defaults(func=cmd_coin_demo)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        out = args.func(args)
    except (ValidationError, OSError, json.JSONDecodeError, KeyError) as e:
        json.dump({"error": type(e).__name__, "message": str(e)}, stderr)
        stderr.write("\n")
        return 1
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as e:
        json.dump({"error": type(e).__name__, "message": str(e)}, stderr)
        stderr.write("\n")
        return 2
    json.dump(_round(out, None if args.precise else 6), stdout, default=_json_default, indent=2)
    stdout.write("\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
