"""Command line interface.

Subcommands: validate, chsh, membership, macro, trace, mc, ic, figure,
classify.  Box sources are either a JSON file ({"P": [[...4x4...]]}) or a
named builtin: ``pr``, ``pr_0``..``pr_7``, ``uniform``, the 16 deterministic
vertices ``d1_0``..``d4_1`` / ``e1_0``..``e4_1``, and class presets like
``class:I:p=0.8`` or ``class:V:p1=0.3,p2=0.2,p3=0.2,p4=0.2,p5=0.1``
(unspecified class weights split the remainder evenly).

Exit codes: 0 success, 2 validation/data failure, 3 usage error.  All
outputs are byte-stable given identical inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import boxes, figures, ic, montecarlo, polytope, reports
from .boxes import Box, box_from_json, box_to_json, chsh
from .errors import FileError, MacrobellError, UsageError
from .macro import MAJORITY, VotingRule, macro_box, macro_chsh_trace

_BUILTIN_NAMES = {"pr": "PR", "uniform": None}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def parse_m_values(spec: str) -> list[int]:
    """"100" -> [100]; "2:200:2" -> [2, 4, ..., 200] (end inclusive)."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 3:
            start, end, step = (int(p) for p in parts)
            if step < 1 or start > end or start < 1:
                raise UsageError(f"bad M range {spec!r}: need start<=end, step>=1")
            return list(range(start, end + 1, step))
    except ValueError:
        pass
    raise UsageError(f"--M must be an integer or start:end:step, got {spec!r}")


def parse_rule(spec: str) -> VotingRule:
    if spec == "majority":
        return MAJORITY
    if spec == "unanimous":
        return VotingRule.unanimous()
    if spec.startswith("threshold:"):
        try:
            return VotingRule.with_threshold(int(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad threshold in --rule {spec!r}") from None
    raise UsageError(
        f"--rule must be majority, threshold:t or unanimous, got {spec!r}"
    )


def _parse_class_source(spec: str) -> Box:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"class source must look like class:I:p=0.8, got {spec!r}")
    cid = parts[1].upper()
    kv = {}
    for item in parts[2].split(","):
        if "=" not in item:
            raise UsageError(f"bad class parameter {item!r} in {spec!r}")
        k, v = item.split("=", 1)
        try:
            kv[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"bad class parameter value {item!r}") from None

    if cid in ("I", "II"):
        if set(kv) != {"p"}:
            raise UsageError(f"class {cid} takes exactly p=..., got {sorted(kv)}")
        params = [kv["p"]]
    else:
        n = {"III": 3, "IV": 3, "V": 5}.get(cid)
        if n is None:
            raise UsageError(f"unknown class {parts[1]!r}")
        names = [f"p{i}" for i in range(1, n + 1)]
        extra = set(kv) - set(names)
        if extra or "p1" not in kv:
            raise UsageError(f"class {cid} takes p1..p{n}, got {sorted(kv)}")
        missing = [nm for nm in names if nm not in kv]
        rest = 1.0 - sum(kv.values())
        fill = rest / len(missing) if missing else 0.0
        params = [kv.get(nm, fill) for nm in names]
    return boxes.class_generator(cid, params).box


def load_box(source: str) -> Box:
    """Resolve a --box argument to a validated box."""
    name = source.strip()
    low = name.lower()
    if low == "pr":
        return boxes.pr_box()
    if low == "uniform":
        return boxes.uniform_box()
    if low.startswith("class:"):
        return _parse_class_source(name)
    try:
        return boxes.vertex_by_id(name.upper() if low.startswith(("d", "e")) else name)
    except MacrobellError:
        pass
    path = Path(name)
    if not path.exists():
        raise FileError(f"box source {source!r} is neither a builtin name nor a file")
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FileError(f"cannot read box file {source!r}: {exc}") from exc
    return box_from_json(obj)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    try:
        load_box(args.box)
    except MacrobellError as exc:
        sys.stderr.write(f"invalid: {exc}\n")
        return 2
    print("valid box")
    return 0


def _cmd_chsh(args) -> int:
    rep = chsh(load_box(args.box))
    if args.format == "json":
        _emit(
            json.dumps(
                {
                    "canonical_value": rep.canonical_value,
                    "max_violation": rep.max_violation,
                    "symmetrized_values": list(rep.symmetrized_values),
                    "a_coefficients": list(rep.a_coefficients),
                    "correlators": list(rep.correlators),
                },
                indent=2,
            )
            + "\n",
            args.out,
        )
    else:
        header = ["canonical_value", "max_violation", "A00", "A01", "A10", "A11"]
        row = [rep.canonical_value, rep.max_violation, *rep.a_coefficients]
        _emit(_csv(header, [row]), args.out)
    return 0


def _cmd_membership(args) -> int:
    box = load_box(args.box)
    ns = polytope.is_no_signaling(box.table)
    loc = polytope.is_local(box)
    payload = {
        "no_signaling": {
            "in_set": ns.in_set,
            "worst_violation": ns.worst_violation,
            "detail": ns.detail,
        },
        "local": {
            "in_set": loc.in_set,
            "certificate": loc.certificate.to_json() if loc.certificate else None,
        },
        "ns_decomposition": polytope.decompose_ns(box).to_json() if ns.in_set else None,
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        header = ["no_signaling", "local", "max_facet_violation"]
        row = [float(ns.in_set), float(loc.in_set), loc.worst_violation]
        _emit(_csv(header, [row]), args.out)
    return 0


def _cmd_macro(args) -> int:
    ms = parse_m_values(args.M)
    if len(ms) != 1:
        raise UsageError("macro takes a single --M; use trace for ranges")
    mb = macro_box(load_box(args.box), ms[0], parse_rule(args.rule))
    if args.format == "json":
        _emit(json.dumps(box_to_json(mb.box), indent=2) + "\n", args.out)
    else:
        header = ["X", "Y", "P00", "P01", "P10", "P11"]
        rows = [
            [float(x), float(y), *mb.box.row(x, y)]
            for (x, y) in boxes.SETTINGS
        ]
        _emit(_csv(header, rows), args.out)
    return 0


_TRACE_HEADER = ["M", "I_chsh", "A00", "A01", "A10", "A11"]


def _cmd_trace(args) -> int:
    box = load_box(args.box)
    trace = macro_chsh_trace(box, parse_m_values(args.M), parse_rule(args.rule))
    rows = [[float(p.M), p.i_chsh, *p.a_values] for p in trace]
    if args.format == "json":
        payload = [
            {"M": p.M, "I_chsh": p.i_chsh, "A": list(p.a_values)} for p in trace
        ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(_csv(_TRACE_HEADER, rows), args.out)
    if args.plot:
        if not args.out:
            raise UsageError("--plot needs --out to name the image file")
        _render_trace_png(trace, Path(args.out).with_suffix(".png"))
    return 0


def _render_trace_png(trace, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot([p.M for p in trace], [p.i_chsh for p in trace], marker=".")
    ax.axhline(2.0, color="gray", lw=0.8, ls="--")
    ax.axhline(4.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("M")
    ax.set_ylabel("macro CHSH")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def _cmd_mc(args) -> int:
    box = load_box(args.box)
    rule = parse_rule(args.rule)
    header = _TRACE_HEADER + [
        "stderr_I", "stderr_A00", "stderr_A01", "stderr_A10", "stderr_A11",
    ]
    rows = []
    for m in parse_m_values(args.M):
        est = montecarlo.sample_macro(box, m, rule, args.trials, args.seed)
        a_hat = est.distribution[:, 1] + est.distribution[:, 2]
        value, se = montecarlo.mc_chsh(box, m, rule, args.trials, args.seed)
        a_se = [
            float((est.stderr[s, 1] ** 2 + est.stderr[s, 2] ** 2) ** 0.5)
            for s in range(4)
        ]
        rows.append([float(m), value, *a_hat, se, *a_se])
    if args.format == "json":
        payload = [
            dict(zip(header, row)) for row in rows
        ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(_csv(header, rows), args.out)
    return 0


def _cmd_ic(args) -> int:
    rep = ic.ic_necessary(load_box(args.box))
    if args.format == "json":
        _emit(
            json.dumps(
                {
                    "Q1": rep.q1,
                    "Q2": rep.q2,
                    "E1": rep.e1,
                    "E2": rep.e2,
                    "lhs": rep.lhs,
                    "satisfied": rep.satisfied,
                    "lhs_relabel_max": rep.lhs_relabel_max,
                },
                indent=2,
            )
            + "\n",
            args.out,
        )
    else:
        header = ["Q1", "Q2", "E1", "E2", "lhs", "satisfied", "lhs_relabel_max"]
        row = [rep.q1, rep.q2, rep.e1, rep.e2, rep.lhs, float(rep.satisfied), rep.lhs_relabel_max]
        _emit(_csv(header, [row]), args.out)
    return 0


def _cmd_figure(args) -> int:
    fid = args.id
    m_values = parse_m_values(args.M) if args.M else None
    header, rows = figures.figure_data(fid, m_values)
    outdir = Path(args.out) if args.out else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"fig{fid}.csv"
    csv_path.write_text(_csv(header, rows))
    written = [str(csv_path)]
    if not args.no_plot:
        png_path = outdir / f"fig{fid}.png"
        figures.render_figure(fid, header, rows, png_path)
        written.append(str(png_path))
    print("\n".join(written))
    return 0


def _cmd_classify(args) -> int:
    box = load_box(args.box)
    ms = parse_m_values(args.M) if args.M else None
    report = reports.classify_box(
        box, M_values=ms, rule=parse_rule(args.rule), window=args.window, tol=args.tol
    )
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
        return 0
    mark = {True: "yes", False: "NO"}
    lines = [
        f"chsh: canonical {_fmt(report.chsh.canonical_value)}, "
        f"max over facets {_fmt(report.chsh.max_violation)}",
        f"no-signaling: {mark[report.no_signaling.in_set]} ({report.no_signaling.detail})",
        f"local: {mark[report.local.in_set]}"
        + (
            f" (facet {report.local.certificate.facet_id} violated by "
            f"{_fmt(report.local.certificate.violation_amount)})"
            if not report.local.in_set
            else ""
        ),
        f"tsirelson (necessary): {mark[report.tsirelson_ok]}",
        f"ic necessary: {mark[report.ic.satisfied]} (lhs {_fmt(report.ic.lhs)})",
        f"macroscopic limit: {report.limit.label} "
        f"(final I = {_fmt(report.limit.final_value)} at M = {report.trace[-1].M})",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="macrobell", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, *, box=True, m=None, rule=False, mc=False,
            fmt=True, out=True) -> argparse.ArgumentParser:
        p = sub.add_parser(name)
        p.set_defaults(func=func)
        if box:
            p.add_argument("--box", required=True, help="file path or builtin name")
        if m == "required":
            p.add_argument("--M", required=True, help="copy count or start:end:step")
        elif m == "optional":
            p.add_argument("--M", default=None, help="copy count or start:end:step")
        if rule:
            p.add_argument("--rule", default="majority",
                           help="majority | threshold:t | unanimous")
        if mc:
            p.add_argument("--trials", type=int, default=100_000)
            p.add_argument("--seed", type=int, default=0)
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if out:
            p.add_argument("--out", default=None, help="output file (default stdout)")
        return p

    add("validate", _cmd_validate, fmt=False, out=False)
    add("chsh", _cmd_chsh)
    add("membership", _cmd_membership)
    add("macro", _cmd_macro, m="required", rule=True)
    p = add("trace", _cmd_trace, m="required", rule=True)
    p.add_argument("--plot", action="store_true",
                   help="also render <out>.png from the trace")
    add("mc", _cmd_mc, m="required", rule=True, mc=True)
    add("ic", _cmd_ic)
    p = add("figure", _cmd_figure, box=False, m="optional", fmt=False)
    p.add_argument("--id", type=int, required=True, choices=range(1, 7))
    p.add_argument("--no-plot", action="store_true",
                   help="emit the CSV only, skip the PNG")
    p = add("classify", _cmd_classify, m="optional", rule=True)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--tol", type=float, default=0.15)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 3
    except MacrobellError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
