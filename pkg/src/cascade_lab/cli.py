"""Command-line front door: experiment configuration and CSV/JSON emission.

Every subcommand is deterministic under a fixed --seed; numeric cells are
printed at six significant digits.  --ci refuses to run without an explicit
seed; otherwise a missing seed draws one from OS entropy (and prints it to
stderr so the run can be reproduced).
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction

from .backend import set_workers
from .core import CapacityError, InputError, MAJORITY_PROFILE, REVEAL_PROFILE


def fmt(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def parse_p(text: str):
    """Accept a decimal or a fraction string like 2/3; fractions stay exact."""
    text = text.strip()
    try:
        if "/" in text:
            value = Fraction(text)
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"unparsable probability {text!r}") from None
    if not (Fraction(1, 2) < Fraction(value) < 1):
        raise InputError(f"need 0.5 < p < 1, got {text}")
    return value


def _resolve_seed(args, parser) -> int:
    if args.seed is not None:
        return args.seed
    if getattr(args, "ci", False):
        parser.error("--ci requires an explicit --seed")
    seed = secrets.randbits(48)
    print(f"seed not given; using {seed}", file=sys.stderr)
    return seed


def _open_out(args):
    if args.out and args.out != "-":
        return open(args.out, "w", encoding="utf-8", newline="\n")
    return sys.stdout


def _emit(args, text: str) -> None:
    out = _open_out(args)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()


def _source_and_label(token: str, n: int | None):
    from .layers import read_layer_spec
    from .simulate import TopologySource

    if token == "empty":
        return TopologySource.empty(_need_n(n)), "empty"
    if token == "complete":
        return TopologySource.complete(_need_n(n)), "complete"
    if token.startswith("gnq:"):
        q = float(token[4:])
        return TopologySource.gnq(_need_n(n), q), f"gnq:{fmt(q)}"
    if token.startswith("layers:"):
        design = read_layer_spec(token[7:])
        return TopologySource.layers(design), token
    if token.startswith("edges:"):
        from .core import read_edge_list

        topo = read_edge_list(token[6:])
        return TopologySource.fixed(topo), token
    raise InputError(f"unknown topology {token!r}; expected empty|complete|gnq:<q>|layers:<file>|edges:<file>")


def _need_n(n: int | None) -> int:
    if n is None:
        raise InputError("this topology requires --n")
    return n


def _profile_for(strategy: str, n: int, p):
    from .complete_opt import compute_delta_fast, threshold_strategy

    if strategy == "maj":
        return MAJORITY_PROFILE
    if strategy == "reveal":
        return REVEAL_PROFILE
    if strategy == "opt":
        return threshold_strategy(compute_delta_fast(n, float(p)))
    raise InputError(f"unknown strategy {strategy!r}; expected maj|reveal|opt")


def cmd_sim(args, parser) -> None:
    from .simulate import estimate_expected_wrong

    seed = _resolve_seed(args, parser)
    p = parse_p(args.p)
    source, label = _source_and_label(args.topology, args.n)
    profile = _profile_for(args.strategy, source.n, p)
    est = estimate_expected_wrong(source, profile, float(p), args.reps, seed)
    lines = ["topology,strategy,n,p,mean_wrong,ci95,reps,seed"]
    lines.append(
        f"{label},{args.strategy},{source.n},{fmt(p)},{fmt(est.mean)},{fmt(est.ci95_halfwidth)},{est.reps},{seed}"
    )
    _emit(args, "\n".join(lines) + "\n")


def cmd_sweep_q(args, parser) -> None:
    from .random_graph import sweep_q

    seed = _resolve_seed(args, parser)
    p = parse_p(args.p)
    grid = [float(tok) for tok in args.q_grid.split(",")] if args.q_grid else None
    rows = sweep_q(args.n, float(p), grid, args.reps, seed, fixed_graph=args.fixed_graph)
    lines = ["n,q,mean_wrong,ci95,reps,seed"]
    for row in rows:
        lines.append(f"{row.n},{fmt(row.q)},{fmt(row.estimate.mean)},{fmt(row.estimate.ci95_halfwidth)},{row.estimate.reps},{seed}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_delta(args, parser) -> None:
    from .complete_opt import compute_delta_fast

    p = parse_p(args.p)
    table = compute_delta_fast(args.n, float(p))
    lines = ["i,delta"]
    for i in range(1, args.n + 1):
        lines.append(f"{i},{table[i]}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_opt_complete(args, parser) -> None:
    from .complete_opt import lower_bound_curve, optimal_expected_wrong

    p = parse_p(args.p)
    loss = optimal_expected_wrong(args.n, float(p))
    payload = {
        "n": args.n,
        "p": float(p),
        "expected_wrong": float(f"{loss:.10g}"),
        "lower_bound": float(f"{lower_bound_curve(args.n, float(p)):.10g}"),
    }
    _emit(args, json.dumps(payload, sort_keys=True) + "\n")


def cmd_layers_opt(args, parser) -> None:
    from .layers import asymptotic_layers, layer_expected_wrong, optimal_layers_exact

    p = parse_p(args.p)
    if args.mode == "exact":
        design, loss = optimal_layers_exact(args.n, p)
    else:
        design = asymptotic_layers(args.n, float(p))
        loss = layer_expected_wrong(design, p)
    sizes = ";".join(str(a) for a in design.sizes)
    lines = ["n,p,mode,k,loss,sizes"]
    lines.append(f"{args.n},{fmt(p)},{args.mode},{design.k},{fmt(loss)},{sizes}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_compare(args, parser) -> None:
    from .simulate import compare_topologies

    seed = _resolve_seed(args, parser)
    p = parse_p(args.p)
    rows = compare_topologies(args.n, float(p), args.reps, seed, sweep_reps=args.sweep_reps)
    lines = ["topology,strategy,n,p,mean_wrong,ci95,reps,seed"]
    for label, strategy, est in rows:
        lines.append(f"{label},{strategy},{args.n},{fmt(p)},{fmt(est.mean)},{fmt(est.ci95_halfwidth)},{est.reps},{seed}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_oracle(args, parser) -> None:
    from .oracle import exhaustive_optimal_complete

    p = parse_p(args.p)
    loss, actions = exhaustive_optimal_complete(args.n, p)
    payload = {
        "n": args.n,
        "p": float(p),
        "expected_wrong": float(loss.expected_wrong),
        "actions": {f"{i},{d}": act for (i, d), act in sorted(actions.items())},
    }
    if isinstance(loss.expected_wrong, Fraction):
        payload["expected_wrong_exact"] = str(loss.expected_wrong)
    _emit(args, json.dumps(payload, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, seeded=True, reps=True):
        sp.add_argument("--p", default="2/3", help="signal accuracy, decimal or fraction (default 2/3)")
        sp.add_argument("--out", default="-", help="output path, - for stdout")
        sp.add_argument("--workers", type=int, default=None, help="cap kernel threads (CASCADE_LAB_WORKERS fallback)")
        if seeded:
            sp.add_argument("--seed", type=int, default=None, help="master seed; all randomness derives from it")
            sp.add_argument("--ci", action="store_true", help="refuse entropy seeding (require --seed)")
        if reps:
            sp.add_argument("--reps", type=int, default=1000, help="Monte Carlo replicates")

    sp = sub.add_parser("sim", help="estimate E for one topology/strategy pair")
    sp.add_argument("--topology", required=True, help="empty|complete|gnq:<q>|layers:<file>|edges:<file>")
    sp.add_argument("--strategy", default="maj", help="maj|reveal|opt")
    sp.add_argument("--n", type=int, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_sim)

    sp = sub.add_parser("sweep-q", help="estimate E across a q grid on G(n, q)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q-grid", default=None, help="comma-separated q values (default: geometric grid)")
    sp.add_argument("--fixed-graph", action="store_true", help="freeze one graph per q (quenched)")
    common(sp)
    sp.set_defaults(fn=cmd_sweep_q)

    sp = sub.add_parser("delta", help="optimal reveal thresholds for the complete graph")
    sp.add_argument("--n", type=int, required=True)
    common(sp, seeded=False, reps=False)
    sp.set_defaults(fn=cmd_delta)

    sp = sub.add_parser("opt-complete", help="optimal complete-graph loss and the lower-bound curve")
    sp.add_argument("--n", type=int, required=True)
    common(sp, seeded=False, reps=False)
    sp.set_defaults(fn=cmd_opt_complete)

    sp = sub.add_parser("layers-opt", help="optimal or asymptotic layer design")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=["exact", "asym"], default="exact")
    common(sp, seeded=False, reps=False)
    sp.set_defaults(fn=cmd_layers_opt)

    sp = sub.add_parser("compare", help="benchmark topologies/strategies at one n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sweep-reps", type=int, default=None, help="replicates for the internal q sweep")
    common(sp)
    sp.set_defaults(fn=cmd_compare)

    sp = sub.add_parser("oracle", help="exact optimal strategy by backward induction (small n)")
    sp.add_argument("--n", type=int, required=True)
    common(sp, seeded=False, reps=False)
    sp.set_defaults(fn=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_workers(getattr(args, "workers", None))
    try:
        args.fn(args, parser)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
