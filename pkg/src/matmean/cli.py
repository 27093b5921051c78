"""Command-line interface: ``matmean <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import channels as ch
from . import divergences as dv
from . import equality as eq
from .majorization import MajorizationVerdict, compare
from .means import MeanKind, MeanSpec, compute_mean
from .relations import (TABLE_ROWS, builtin_catalog, cells_agree_within_one, claim_by_id,
                        region_scan, verify_claim)
from .spectral import matrix_from_json, matrix_to_json, sample_psd
from .suite import SuiteConfig, _clean, build_table, open_cell_scan, render_table34, run_suite, write_report


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MATMEAN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"MATMEAN_SEED must be an integer, got {env!r}")
    return 0


def load_matrix(path: str) -> np.ndarray:
    """``.npy`` arrays, ``{"dim", "re", "im"}`` JSON, or a nested JSON list."""
    if path.endswith(".npy"):
        return np.load(path)
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        return np.asarray(matrix_from_json(obj))
    return np.asarray(obj, dtype=complex if any(isinstance(v, str) for v in np.ravel(obj)) else float)


def _pair(args, rng) -> tuple[np.ndarray, np.ndarray]:
    a = load_matrix(args.A) if args.A else sample_psd(args.dim, rng)
    b = load_matrix(args.B) if args.B else sample_psd(args.dim, rng)
    return a, b


def _emit(obj: Any, args, text: str | None = None, default: str = "json") -> None:
    fmt = args.format or default
    if fmt == "json" or text is None:
        out = json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"
    else:
        out = text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _verdict_dict(v) -> dict:
    if isinstance(v, MajorizationVerdict):
        return {"relation": v.relation.value, "outcome": v.outcome.value,
                "margin": v.margin, "partial_gaps": list(v.partial_gaps)}
    return {"holds": bool(v)}


# -- handlers ---------------------------------------------------------------

def cmd_mean(args, rng):
    a, b = _pair(args, rng)
    r = compute_mean(MeanSpec(args.kind, args.alpha, args.p), a, b)
    _emit({"spec": r.spec.label(), "value": matrix_to_json(r.value),
           "domain_ok": r.domain_ok, "regularization_used": r.regularization_used}, args)
    return 0


def cmd_majorize(args, rng):
    x, y = load_matrix(args.X), load_matrix(args.Y)
    _emit(_verdict_dict(compare(args.relation, x, y)), args)
    return 0


def cmd_check(args, rng):
    ids = args.claim or [c.id for c in builtin_catalog()]
    out = {}
    for cid in ids:
        c = claim_by_id(cid)
        out[cid] = verify_claim(c, args.trials, rng, args.nmax).to_dict()
    if args.format == "csv":
        lines = ["claim,status,trials,violations,worst_margin"]
        lines += [f"{k},{v['status']},{v['trials']},{v['violations']},{v['worst_margin']}"
                  for k, v in out.items()]
        _emit(out, args, "\n".join(lines) + "\n")
    else:
        _emit(out, args)
    return 0


def cmd_scan(args, rng):
    ag, rg = _floats(args.alphas), _floats(args.ratios)
    cells = region_scan(args.lhs, args.rhs, ag, rg, args.lhs_exp, rng, budget=args.trials)
    rows = [c.__dict__ for c in cells]
    ok = cells_agree_within_one(cells, ag, rg)
    text = "alpha,ratio,empirical,theory,margin\n" + "".join(
        f"{c.alpha:g},{c.ratio:g},{c.empirical},{c.theory},{c.margin:.6e}\n" for c in cells)
    _emit({"cells": rows, "agree_within_one_cell": ok}, args, text)
    return 0


def cmd_table34(args, rng):
    ids = sorted({i for _, cells in TABLE_ROWS for v in cells.values() for i in v})
    cfg = SuiteConfig(seed=_seed(args), trials=args.trials, n_max=args.nmax)
    claims = {i: verify_claim(claim_by_id(i), cfg.trials, cfg.rng(f"claim:{i}"), cfg.n_max).to_dict()
              for i in ids}
    table = build_table(claims, open_cell_scan(cfg))
    fmt = args.format or "text"
    text = render_table34({"table34": table}, "csv" if fmt == "csv" else "text")
    _emit({"table34": table}, args, text, default="text")
    return 0


def _herm(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def cmd_taylor(args, rng):
    h = load_matrix(args.H) if args.H else _herm(args.dim, rng)
    k = load_matrix(args.K) if args.K else _herm(args.dim, rng)
    tc = eq.taylor_coefficients(h, k, args.alpha)
    fd, z = eq.taylor_order_check(h, k, args.alpha)
    _emit({"alpha": args.alpha, "z": list(z), "finite_difference": list(fd),
           "z4_closed_form": tc.z4_closed, "z4_gap": eq.z4_gap(h, k, args.alpha),
           "z4_gap_commutator_form": eq.z4_gap_commutator_form(h, k, args.alpha),
           "commutator_norm": eq.commutation_defect(h, k)}, args)
    return 0


def cmd_eqprobe(args, rng):
    a, b = _pair(args, rng)
    r = eq.norm_equality_probe(args.pair, args.alpha, args.p, args.q, a, b, args.s)
    _emit(r.__dict__, args)
    return 0


def cmd_divergence(args, rng):
    a, b = _pair(args, rng)
    fam = args.family
    if fam == "petz":
        d = dv.petz(a, b, args.alpha)
    elif fam == "sandwiched":
        d = dv.sandwiched(a, b, args.alpha)
    elif fam == "maximal":
        d = dv.maximal_divergence(a, b, args.alpha)
    elif fam == "alpha-z":
        d = dv.alpha_z(a, b, args.alpha, args.z)
    elif fam.startswith("mean:"):
        d = dv.divergence_from_mean(MeanSpec(fam[5:], args.alpha, args.p), a, b)
    else:
        raise ValueError(f"unknown divergence family {fam!r}")
    _emit({"family": fam, "alpha": args.alpha, "value": d.value,
           "reason": d.reason.value, "exactness": d.exactness.value}, args)
    return 0


def cmd_measured(args, rng):
    a, b = _pair(args, rng)
    lb = dv.measured_divergence_lb(a, b, args.alpha, args.strategy, rng)
    seq = [dv.regularized_measured_estimate(a, b, args.alpha, m) for m in range(1, args.m + 1)]
    ref = dv.sandwiched(a, b, args.alpha).value
    _emit({"alpha": args.alpha, "strategy": args.strategy, "lower_bound": lb.value,
           "regularized": seq, "sandwiched": ref}, args)
    return 0


def cmd_convexity(args, rng):
    spec = MeanSpec(args.kind, args.alpha, args.p)
    v = ch.midpoint_convexity_test(spec, args.mode, args.trials, rng)
    d = v.to_dict()
    d["theory"] = ch.theory_status(spec, v.mode)
    _emit(d, args)
    return 0


def cmd_monotone(args, rng):
    spec = MeanSpec(args.kind, args.alpha, args.p)
    r = ch.monotonicity_check(spec, args.channels, args.trials, rng, args.dim)
    _emit({"spec": spec.label(), "family": r.family, "trials": r.trials, "sign": r.sign,
           "worst_defect": r.worst_defect, "passes": r.passes(),
           "domain_violations": r.domain_violations, "regularized": r.regularized}, args)
    return 0


def cmd_regionprobe(args, rng):
    cells = ch.region_probe(args.kind, args.mode, _floats(args.alphas), _floats(args.ps),
                            args.trials, rng)
    _emit({"cells": [c.__dict__ for c in cells]}, args, ch.region_csv(cells), default="csv")
    return 0


def cmd_suite(args, rng):
    cfg = SuiteConfig(seed=_seed(args), trials=args.trials, n_max=args.nmax,
                      claims=args.claim or None, fmt=args.format or "json")
    say = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    rep = run_suite(cfg, say, args.section)
    text = write_report(rep, args.out, cfg.fmt)
    if not args.out:
        sys.stdout.write(text)
    for k, v in rep.timing.items():
        if args.verbose:
            print(f"time {k}: {v:.1f}s", file=sys.stderr)
    return rep.exit_code


# -- parser -----------------------------------------------------------------

def _globals() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="RNG seed (falls back to $MATMEAN_SEED, then 0)")
    g.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    g.add_argument("--nmax", type=int, default=argparse.SUPPRESS)
    g.add_argument("--out", default=argparse.SUPPRESS)
    g.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    return g


def _pair_args(p):
    p.add_argument("--A", help="matrix file (.json or .npy); random if omitted")
    p.add_argument("--B", help="matrix file (.json or .npy); random if omitted")
    p.add_argument("--dim", type=int, default=2, help="size of random inputs")


def build_parser() -> argparse.ArgumentParser:
    g = _globals()
    parser = argparse.ArgumentParser(prog="matmean", parents=[g],
                                     description="Weighted matrix means and their orderings.")
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in MeanKind]

    p = sub.add_parser("mean", parents=[g], help="evaluate one mean")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    _pair_args(p)
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("majorize", parents=[g], help="compare two PSD matrices")
    p.add_argument("--X", required=True)
    p.add_argument("--Y", required=True)
    p.add_argument("--relation", default="log", choices=("loewner", "eigen", "wlog", "log"))
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("check", parents=[g], help="verify catalog claims")
    p.add_argument("--claim", action="append", help="claim id (repeatable); all if omitted")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", parents=[g], help="alpha x p/q region scan")
    p.add_argument("--lhs", required=True, choices=kinds)
    p.add_argument("--rhs", required=True, choices=kinds)
    p.add_argument("--lhs-exp", default="p", choices=("p", "q"))
    p.add_argument("--alphas", default="0.1,0.233,0.367,0.5,0.633,0.767,0.9")
    p.add_argument("--ratios", default="0.1,0.159,0.251,0.4,0.632,1,1.59,2.52,4")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("table34", parents=[g], help="comparison table with the LE mean")
    p.set_defaults(func=cmd_table34)

    p = sub.add_parser("taylor", parents=[g], help="fourth-order trace expansion")
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--H")
    p.add_argument("--K")
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(func=cmd_taylor)

    p = sub.add_parser("eqprobe", parents=[g], help="norm equality probe")
    p.add_argument("--pair", required=True, help="4.1 ... 4.9")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0, help="Schatten index")
    _pair_args(p)
    p.set_defaults(func=cmd_eqprobe)

    p = sub.add_parser("divergence", parents=[g], help="Renyi-type divergence D(B||A)")
    p.add_argument("--family", required=True,
                   help="alpha-z | petz | sandwiched | maximal | mean:<kind>")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    _pair_args(p)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("measured", parents=[g], help="measured lower bound and pinched sequence")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=int, default=4, choices=(1, 2, 3, 4))
    p.add_argument("--strategy", default="pinching", choices=("pinching", "grid", "povm"))
    _pair_args(p)
    p.set_defaults(func=cmd_measured)

    p = sub.add_parser("convexity", parents=[g], help="midpoint concavity/convexity search")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--mode", choices=("Concavity", "Convexity"))
    p.set_defaults(func=cmd_convexity)

    p = sub.add_parser("monotone", parents=[g], help="monotonicity under channels")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--channels", default="cptp",
                   choices=("cptp", "qc", "cq", "pinch", "transpose"))
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("regionprobe", parents=[g], help="concavity/convexity map as CSV")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--mode", choices=("Concavity", "Convexity"))
    p.add_argument("--alphas", default="0.25,0.5,0.75")
    p.add_argument("--ps", default="0.5,1,2,4")
    p.set_defaults(func=cmd_regionprobe)

    p = sub.add_parser("suite", parents=[g], help="full verification suite")
    p.add_argument("--claim", action="append", help="restrict to claim id (repeatable)")
    p.add_argument("--section", action="append",
                   help="restrict to one invariant section (repeatable); all if omitted")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


_DEFAULT_TRIALS = {"check": 500, "scan": 200, "table34": 500, "convexity": 10_000,
                   "monotone": 200, "regionprobe": 2_000, "suite": 500}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("seed", None), ("out", None), ("format", None), ("nmax", 5)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if not hasattr(args, "trials"):
        args.trials = _DEFAULT_TRIALS.get(args.command, 200)
    rng = np.random.default_rng(_seed(args))
    try:
        return int(args.func(args, rng) or 0)
    except (ValueError, KeyError) as exc:
        print(f"matmean {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
