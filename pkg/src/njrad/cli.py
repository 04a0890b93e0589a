"""Command-line front door.

Subcommands: build (PHYLIP in, Newick out), diagnose (map + reference
tree -> condition reports), simulate (sequence-simulation sweep -> CSV),
counterexample (export the fixture instances).

Exit codes: 0 success / all checks hold, 1 a requested check failed,
2 usage or input errors. All logs go to stderr; stdout carries data only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import counterexamples, simlab
from .diagnostics import (
    atteson_radius_check,
    guaranteed_edges,
    quartet_additive,
    quartet_consistent,
)
from .dissim import parse_phylip, write_phylip
from .errors import MatrixError, NewickParseError, PhylipParseError, TreeError
from .njcore import Reduction, fnj, nj
from .treemodel import parse_newick

CHECK_NAMES = ("consistency", "additivity", "atteson", "edges")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**32))
        print(f"seed: {seed}", file=sys.stderr)
    return seed


def _finite_or_none(record: dict) -> dict:
    out = dict(record)
    for key, value in out.items():
        if isinstance(value, float) and not math.isfinite(value):
            out[key] = None
    return out


def cmd_build(args) -> int:
    d = parse_phylip(_read_text(args.dist))
    if args.method == "fnj":
        tree, trace = fnj(d)
    else:
        reduction = Reduction.ROOTED if args.reduction == "rooted" else Reduction.AVERAGE
        tree, trace = nj(d, reduction)
    for step in trace.steps:
        print(
            f"join {step.pair[0]} {step.pair[1]} q={step.q_value:.10g} size={step.map_size}",
            file=sys.stderr,
        )
    _write_text(args.out, tree.to_newick() + "\n")
    return 0


def _run_checks(d, tree, checks):
    reports = {}
    if "consistency" in checks:
        reports["consistency"] = quartet_consistent(d, tree)
    if "additivity" in checks:
        reports["additivity"] = quartet_additive(d, tree)
    if "atteson" in checks:
        reports["atteson"] = atteson_radius_check(d, tree)
    return reports


def cmd_diagnose(args) -> int:
    d = parse_phylip(_read_text(args.dist))
    tree = parse_newick(_read_text(args.tree))
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = set(checks) - set(CHECK_NAMES)
    if unknown:
        raise MatrixError(f"unknown checks: {sorted(unknown)} (known: {CHECK_NAMES})")
    reports = _run_checks(d, tree, checks)
    edge_listing = None
    if "edges" in checks:
        edge_listing = guaranteed_edges(d, tree)
    all_hold = all(r.holds for r in reports.values())
    if edge_listing is not None:
        all_hold = all_hold and len(edge_listing) == len(tree.internal_edges())

    if args.json:
        # strict JSON has no Infinity; vacuous checks carry margin=inf
        payload = {name: _finite_or_none(r.to_record()) for name, r in reports.items()}
        if edge_listing is not None:
            payload["edges"] = {
                "guaranteed": [
                    {
                        "side_a": sorted(e.split.side_a),
                        "side_b": sorted(e.split.side_b),
                        "kind": e.kind.value,
                        "margin": e.margin,
                    }
                    for e in edge_listing
                ],
                "internal_edges": len(tree.internal_edges()),
            }
        print(json.dumps(payload, indent=2))
    else:
        for name, r in reports.items():
            verdict = "holds" if r.holds else "FAILS"
            print(
                f"{name}: {verdict} margin={r.margin:.10g} coverage={r.coverage:.4f}"
                f" checked={r.checked}{' (sampled)' if r.sampled else ''}"
            )
            for w in r.witnesses[:5]:
                vals = " ".join(f"{k}={v:.10g}" for k, v in w.values.items())
                print(f"  witness {','.join(w.taxa)}: {vals}")
        if edge_listing is not None:
            print(f"edges: {len(edge_listing)}/{len(tree.internal_edges())} splits guaranteed")
            for e in edge_listing:
                print(f"  {e.split} via {e.kind.value} margin={e.margin:.10g}")
    return 0 if all_hold else 1


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    lengths = tuple(int(x) for x in args.lengths.split(","))
    cfg = simlab.SweepConfig(
        tree_count=args.trees,
        taxa_count=args.taxa,
        edge_length=args.edge_length,
        replicates_per_length=args.replicates,
        lengths=lengths,
        seed=seed,
    )
    records = simlab.run_sweep(cfg, progress=lambda msg: print(msg, file=sys.stderr))
    _write_text(args.out, simlab.records_to_csv(records))
    if args.summary:
        _write_text(args.summary, simlab.summaries_to_csv(simlab.summarize(records)))
    return 0


def cmd_counterexample(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.which in ("five", "eight"):
        builder = (
            counterexamples.example_five_leaf
            if args.which == "five"
            else counterexamples.example_eight_leaf
        )
        tree, exact, perturbed = builder()
        summary = None
    else:
        seed = _resolve_seed(args.seed)
        inst = counterexamples.reduction_defect_instance(
            n=args.n, alpha=args.alpha, beta=args.beta, epsilon=args.epsilon,
            rng=np.random.default_rng(seed),
        )
        tree, exact, perturbed = inst.tree, inst.exact, inst.perturbed
        check = counterexamples.verify_reduction_defect(inst)
        summary = {
            "first_join": list(check.first_join),
            "reduced_defect_lb": check.reduced_defect_lb,
            "linf_to_exact": 1.0,
            "beta_over_4": inst.beta / 4.0,
        }
    stem = args.which
    (outdir / f"{stem}_tree.nwk").write_text(tree.to_newick() + "\n")
    (outdir / f"{stem}_exact.phy").write_text(write_phylip(exact))
    (outdir / f"{stem}_perturbed.phy").write_text(write_phylip(perturbed))
    print(f"wrote {stem}_tree.nwk, {stem}_exact.phy, {stem}_perturbed.phy in {outdir}",
          file=sys.stderr)
    if summary is not None:
        if args.json:
            print(json.dumps(summary, indent=2))
        else:
            print(
                f"first_join={summary['first_join'][0]},{summary['first_join'][1]} "
                f"reduced_defect_lb={summary['reduced_defect_lb']:.10g}"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="njrad",
        description="Distance-based tree building with robustness diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build a tree from a PHYLIP distance matrix")
    p_build.add_argument("dist", help="PHYLIP square distance matrix ('-' for stdin)")
    p_build.add_argument("--method", choices=("nj", "fnj"), default="nj")
    p_build.add_argument("--reduction", choices=("average", "rooted"), default="average")
    p_build.add_argument("--out", default="-", help="Newick output path ('-' for stdout)")
    p_build.set_defaults(func=cmd_build)

    p_diag = sub.add_parser("diagnose", help="check success conditions against a reference tree")
    p_diag.add_argument("dist", help="PHYLIP square distance matrix")
    p_diag.add_argument("tree", help="reference tree in Newick")
    p_diag.add_argument("--checks", default=",".join(CHECK_NAMES),
                        help=f"comma list from {CHECK_NAMES}")
    p_diag.add_argument("--json", action="store_true")
    p_diag.set_defaults(func=cmd_diagnose)

    p_sim = sub.add_parser("simulate", help="run the sequence-simulation sweep")
    p_sim.add_argument("--trees", type=int, default=35)
    p_sim.add_argument("--taxa", type=int, default=20)
    p_sim.add_argument("--edge-length", type=float, default=0.1)
    p_sim.add_argument("--replicates", type=int, default=100)
    p_sim.add_argument("--lengths", default=",".join(str(x) for x in simlab.log_spaced_lengths()),
                       help="comma list of sequence lengths")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", default="-", help="records CSV path ('-' for stdout)")
    p_sim.add_argument("--summary", default=None, help="optional per-length summary CSV path")
    p_sim.set_defaults(func=cmd_simulate)

    p_cx = sub.add_parser("counterexample", help="export a fixture instance")
    p_cx.add_argument("which", choices=("five", "eight", "thm34"))
    p_cx.add_argument("--outdir", default=".")
    p_cx.add_argument("--n", type=int, default=40, help="inner taxon count (thm34)")
    p_cx.add_argument("--alpha", type=float, default=1.0)
    p_cx.add_argument("--beta", type=float, default=4.2)
    p_cx.add_argument("--epsilon", type=float, default=1e-4)
    p_cx.add_argument("--seed", type=int, default=None)
    p_cx.add_argument("--json", action="store_true")
    p_cx.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MatrixError, TreeError, NewickParseError, PhylipParseError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point():
    raise SystemExit(main())
