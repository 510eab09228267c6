"""Command line interface: ``dkcheck {check,bisim,simulate,diff,demo}``.

Exit codes: 0 success (with ``check --quiet``: verdict true), 1 verdict false
under ``check --quiet`` or a failed demo claim, 2 usage/parse/validation
error, 3 size-bound refusal.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gallery
from .bisim import bisimilar, partition
from .formula import FormulaSyntaxError, parse, to_string
from .kripke import FRAMES, KripkeModel, ModelError, PointedModel, load
from .oracle import DiffParams, SizeBoundError, differential_run
from .semantics import (
    ALL_VARIANTS, FULLCOMM, AnnouncementScript, EvaluationError, Variant, VariantError, evaluate,
    simulate_script,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load_model(spec: str) -> tuple[KripkeModel, object]:
    """A gallery name or a path to a model file; returns (model, default point)."""
    key = spec.replace("-", "_")
    if key in gallery.NAMES and not Path(spec).exists():
        pm = gallery.build(key)
        return pm.model, pm.point
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--model: no such file or gallery model: {spec!r}")
    m = load(path)
    return m, m.worlds[0]


def _point(m: KripkeModel, default, world) -> PointedModel:
    w = default if world is None else world
    if w not in m.index:
        raise UsageError(f"--world: {w!r} is not a world of the model")
    return PointedModel(m, w)


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except VariantError as exc:
        raise UsageError(f"--variant: {exc}") from None


def _formula(text: str):
    try:
        return parse(text)
    except (FormulaSyntaxError, ValueError) as exc:
        raise UsageError(f"--formula: {exc}") from None


def cmd_check(args) -> int:
    m, default = _load_model(args.model)
    pm = _point(m, default, args.world)
    phi = _formula(args.formula)
    if args.all_variants:
        rows = [(str(v), evaluate(pm, phi, v)) for v in ALL_VARIANTS]
        if args.json:
            print(json.dumps({"world": pm.point, "formula": args.formula,
                              "verdicts": dict(rows)}, indent=2))
        elif not args.quiet:
            width = max(len(name) for name, _ in rows)
            for name, val in rows:
                print(f"{name:<{width}}  {str(val).lower()}")
        return EXIT_OK
    variant = _variant(args.variant)
    verdict = evaluate(pm, phi, variant)
    if args.quiet:
        return EXIT_OK if verdict else EXIT_FALSE
    if args.json:
        print(json.dumps({"world": pm.point, "formula": args.formula, "variant": str(variant),
                          "verdict": verdict}))
    else:
        print(str(verdict).lower())
    return EXIT_OK


def cmd_bisim(args) -> int:
    m, _ = _load_model(args.model)
    atoms = None
    if args.atoms is not None:
        atoms = [a for a in (x.strip() for x in args.atoms.split(",")) if a]
        unknown = set(atoms) - set(m.atoms)
        if unknown:
            raise UsageError(f"--atoms: undeclared atoms {sorted(unknown)}")
    part = partition(m, atoms)
    classes = [[w for w in m.worlds if w in c] for c in part.classes]
    pairs = None
    if args.pairs:
        pairs = [
            [x, y, bisimilar(PointedModel(m, x), PointedModel(m, y), part.atoms)]
            for i, x in enumerate(m.worlds) for y in m.worlds[i + 1:]
        ]
    if args.json:
        print(json.dumps({"atoms": sorted(part.atoms), "classes": classes, "pairs": pairs}, indent=2))
        return EXIT_OK
    for c in classes:
        print(" ".join(c))
    for x, y, same in pairs or ():
        print(f"{x} {y} {'bisimilar' if same else 'distinct'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    m, default = _load_model(args.model)
    pm = _point(m, default, args.world)
    path = Path(args.script)
    if not path.exists():
        raise UsageError(f"--script: no such file {args.script!r}")
    script = AnnouncementScript.parse(path.read_text(encoding="utf-8"), str(path))
    for st in script.steps:
        if st.speaker not in m.agents:
            raise UsageError(f"{path}:{st.line}: speaker {st.speaker!r} is not an agent of the model")
    result = simulate_script(m, pm.point, script)
    hoods = {a: [w for w in m.worlds if w in result.state.neighborhood(a, pm.point)] for a in m.agents}
    if args.json:
        print(json.dumps({
            "world": pm.point,
            "steps": [{"speaker": st.speaker, "correct": ok} for st, ok in zip(script.steps, result.correct)],
            "neighborhoods": hoods,
        }, indent=2))
    else:
        for i, (st, ok) in enumerate(zip(script.steps, result.correct)):
            print(f"step {i} {st.speaker}: {to_string(st.statement)}  {'correct' if ok else 'INCORRECT'}")
        for a, ws in hoods.items():
            print(f"{a} at {pm.point}: {{{', '.join(ws)}}}")
    return EXIT_OK


def cmd_diff(args) -> int:
    for flag in ("count", "max_worlds", "max_agents", "max_atoms"):
        if getattr(args, flag) < 1:
            raise UsageError(f"--{flag.replace('_', '-')} must be >= 1")
    if args.depth < 0:
        raise UsageError("--depth must be >= 0")
    params = DiffParams(
        seed=args.seed, count=args.count, max_worlds=args.max_worlds, max_agents=args.max_agents,
        max_atoms=args.max_atoms, depth=args.depth, frame=args.frame, bound=args.bound,
        brute_force=not args.no_brute_force, workers=args.workers, nested_d=args.nested_d,
    )
    report = differential_run(params)
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        print(report.summary())
    if args.plot_dir:
        from .plots import render_report
        for path in render_report(report, args.plot_dir):
            if not args.json:
                print(f"wrote {path}")
    return EXIT_OK if not report.discrepancies else EXIT_FALSE


def cmd_demo(args) -> int:
    key = args.name.replace("-", "_")
    model_name = "appendix_a" if key == "circularity" else key
    pm = gallery.build(model_name)
    claims = gallery.demo_claims(key)
    if args.json:
        print(json.dumps({"demo": args.name, "claims": [{"claim": c, "passed": ok} for c, ok in claims]},
                         indent=2))
    else:
        print(f"== {args.name} (point {pm.point}) ==")
        print(gallery.describe(pm.model))
        for c, ok in claims:
            print(f"[{'PASS' if ok else 'FAIL'}] {c}")
    return EXIT_OK if all(ok for _, ok in claims) else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dkcheck", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate a formula at a world")
    c.add_argument("--model", required=True, help="model file or gallery name (appendix_a, moore, intro)")
    c.add_argument("--world", help="evaluation world (default: the gallery point or the first world)")
    c.add_argument("--formula", required=True)
    c.add_argument("--variant", default=str(FULLCOMM), help="e.g. (L0,set,omega,all), intersection, fullcomm")
    c.add_argument("--all-variants", action="store_true", help="print a row per variant")
    c.add_argument("--quiet", action="store_true", help="no output; exit 0 if true, 1 if false")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bisim", help="print bisimulation classes")
    b.add_argument("--model", required=True)
    b.add_argument("--atoms", help="comma-separated atom subset Q")
    b.add_argument("--pairs", action="store_true", help="also print pairwise bisimilarity")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bisim)

    s = sub.add_parser("simulate", help="replay an announcement script")
    s.add_argument("--model", required=True)
    s.add_argument("--world")
    s.add_argument("--script", required=True, help="file with one 'agent: formula' per line")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("diff", help="differential run of all variants against brute force")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--count", type=int, default=1000)
    d.add_argument("--max-worlds", type=int, default=5)
    d.add_argument("--max-agents", type=int, default=3)
    d.add_argument("--max-atoms", type=int, default=2)
    d.add_argument("--depth", type=int, default=3)
    d.add_argument("--frame", choices=[*FRAMES, "both"], default="both")
    d.add_argument("--bound", type=int, default=16, help="maximum free classes in brute-force search")
    d.add_argument("--nested-d", type=float, default=0.0, help="probability of nested D in targets")
    d.add_argument("--no-brute-force", action="store_true")
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--out", help="also write the JSON report to this file")
    d.add_argument("--plot-dir", help="write agreement.png, verdicts.png and agreement.csv here")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_diff)

    m = sub.add_parser("demo", help="reproduce a worked example")
    m.add_argument("name", choices=["appendix-a", "moore", "intro", "circularity"])
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_demo)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except SizeBoundError as exc:
        print(f"dkcheck: size bound: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (UsageError, ModelError, EvaluationError, VariantError, FormulaSyntaxError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"dkcheck: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
