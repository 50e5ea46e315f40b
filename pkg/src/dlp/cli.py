"""Command line interface.

Subcommands: ``sample`` (draws to JSON lines), ``verify`` (run suites, write
a JSON report, exit 0 iff green), ``qsf`` (sample a forest, render SVG) and
``strata`` (print the exact stratum mass table).  DLP_THREADS caps worker
threads and never changes any output value.
"""

from __future__ import annotations

import argparse
import json
import sys


from . import encoding, harness, process, qsf
from .harness import VerifyConfig


def _cmd_sample(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        model = encoding.model_from_json(json.load(fh))
    rng = harness.RngSpec(args.seed).generator("sample")
    with open(args.out, "w", encoding="utf-8") as fh:
        for s in process.sample_many(model, args.n, rng):
            fh.write(json.dumps(encoding.sample_to_json(s), sort_keys=True) + "\n")
    print(f"wrote {args.n} samples to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    if args.suite not in (None, "all") and args.suite not in harness.suite_names():
        print(f"error: unknown suite {args.suite!r}; known: "
              f"{', '.join(harness.suite_names())}", file=sys.stderr)
        return 2
    names = harness.suite_names() if args.suite in (None, "all") else [args.suite]
    cfg = VerifyConfig(seed=args.seed, n=args.n, threads=harness.default_threads())
    reports = []
    for name in names:
        rep = harness.run_suite(name, cfg)
        reports.append(rep)
        for c in rep.cases:
            flag = "pass" if c.passed else "FAIL"
            print(f"[{flag}] {name}/{c.case_id}: statistic {c.statistic:.6g} "
                  f"{c.comparison} {c.threshold:g} ({c.runtime_s:.2f}s) {c.note}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(harness.report_to_json(reports))
        print(f"report written to {args.report}")
    if args.figure:
        from . import figures

        figures.report_figure(reports, args.figure)
        print(f"figure written to {args.figure}")
    ok = all(r.passed for r in reports)
    print("all suites pass" if ok else "FAILURES present")
    return 0 if ok else 1


def _cmd_qsf(args) -> int:
    graph, layout = encoding.parse_graph_spec(args.graph)
    if layout is None:
        print("error: the graph spec carries no 2D layout; use grid:WxH or add one",
              file=sys.stderr)
        return 2
    rng = harness.RngSpec(args.seed).generator("qsf")
    conn = qsf.sample_haar_connection(graph, args.group, args.rank, rng)
    sample = qsf.sample_qsf(graph, conn, rng)
    svg = qsf.render_svg(graph, sample, layout)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(svg)
    occ = qsf.edge_occupancy(sample)
    print(f"sampled forest with total occupied dimension {sum(occ)}; svg at {args.svg}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(encoding.sample_to_json(sample), sort_keys=True) + "\n")
        print(f"sample written to {args.out}")
    return 0


def _cmd_strata(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        model = encoding.model_from_json(json.load(fh))
    masses = process.strata_masses(model)
    lines = ["stratum\tmass"]
    lines += [",".join(map(str, nb)) + f"\t{mass!r}" for nb, mass in masses.items()]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.figure:
        from . import figures

        figures.strata_figure(masses, args.figure)
        print(f"figure written to {args.figure}")
    total = sum(masses.values())
    if abs(total - 1.0) > 1e-6:
        print(f"warning: masses sum to {total}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlp",
        description="determinantal subspace processes: samplers, verification, forests")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw subspaces from a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default=None,
                   help="suite name (default: all); one of " + ", ".join(harness.suite_names()))
    p.add_argument("--n", type=int, default=None, help="cap Monte-Carlo sample counts")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", default=None, help="write a JSON report here")
    p.add_argument("--figure", default=None, help="render a summary figure here")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("qsf", help="sample a quantum spanning forest and render it")
    p.add_argument("--graph", required=True, help="grid:WxH or a graph JSON file")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--group", default="orthogonal", choices=sorted(qsf.GROUP_FIELDS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", required=True)
    p.add_argument("--out", default=None, help="also write the sample as JSON")
    p.set_defaults(fn=_cmd_qsf)

    p = sub.add_parser("strata", help="print the exact stratum mass table of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="also write the table here (TSV)")
    p.add_argument("--figure", default=None, help="render a bar chart here")
    p.set_defaults(fn=_cmd_strata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
