"""Command-line front end.

Run from the project root:

  python -m app.cli analyze map.json
  python -m app.cli decide map.json --group hplus
  python -m app.cli factor map.json --involutions 3 --out witness.json
  python -m app.cli random --rho 1/2 --count 10 --seed 1 --out-dir corpus
  python -m app.cli verify witness.json map.json

Exit codes: 0 yes/pass, 1 no/fail/refusal, 2 unknown, 3 input error.
"""
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from app import services
from app.config import EngineSettings
from app.engine.circle import parse_rational
from app.engine.errors import EngineError, IterationCapExceeded, MapFormatError, RotationNumberUnknown
from app.engine.generators import CHIRAL_WORD, involution_product, mirrored_reversing, random_pl_homeo
from app.engine.plmap import PLMap
from app.engine.serialization import map_from_json, map_to_dict, witness_from_json, witness_to_json

logger = logging.getLogger("app.cli")

EXIT_INPUT = 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MapFormatError(f"cannot read {path}: {exc.strerror}") from exc


def load_map(path: str) -> PLMap:
    return map_from_json(_read(path))


def settings_from(args: argparse.Namespace) -> EngineSettings:
    overrides = {"max_period": args.max_period, "max_iterations": args.max_iter,
                 "samples": args.samples, "seed": args.seed}
    base = EngineSettings.from_env()
    return base.model_copy(update={k: v for k, v in overrides.items() if v is not None})


def _emit(report: Dict[str, Any], as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
        return
    print(f"{report['command']}: {report['status']}")
    if "input" in report:
        print(f"  input: degree {report['input']['degree']}, digest {report['input']['digest'][:16]}")
    for line in _human(report["results"]):
        print(f"  {line}")


def _human(results: Dict[str, Any]) -> List[str]:
    lines = []
    rho = results.get("rotation")
    if rho:
        if rho["kind"] == "rational":
            lines.append(f"rotation number: {rho['value']} (minimal period {rho['period']})")
        else:
            lines.append(f"rotation number: in [{rho['lo']}, {rho['hi']}] after {rho['iterations']} iterations")
    if "fixed_set" in results:
        fix = results["fixed_set"]
        comps = ["full circle"] if fix["full"] else [
            f"Point({c['start']})" if c["kind"] == "point" else f"Arc[{c['start']},{c['end']}]"
            for c in fix["components"]]
        lines.append("fixed set: " + (", ".join(comps) or "empty"))
    for key in ("signature", "square_signature"):
        if results.get(key):
            lines.append(f"{key.replace('_', ' ')}: {results[key]['rendered']}")
    if "verdict" in results:
        v = results["verdict"]
        lines.append(f"verdict in {v['group']}: {v['verdict']} ({v['reason']})")
        if v.get("plan"):
            lines.append(f"route: {v['plan']['route']}")
    if "reversible" in results and results["reversible"]:
        lines.append("reversible by preserving / reversing maps: "
                     f"{results['reversible']['by_preserving']} / {results['reversible']['by_reversing']}")
    if "refusal" in results:
        lines.append(f"refused: {results['refusal']}")
    witness = results.get("witness")
    verification = results.get("verification") or (witness or {}).get("verification")
    if witness:
        lines.append(f"witness: {witness['involutions']} involution(s) via {witness['route']}")
    if verification:
        lines.append(f"verification: {'pass' if verification['all_pass'] else 'FAIL'} "
                     f"at {verification['samples']} samples")
        if verification["failure"]:
            failure = verification["failure"]
            lines.append(f"first failure: {failure['law']} at x={failure['sample']}")
    return lines


def cmd_analyze(args: argparse.Namespace) -> services.Outcome:
    return services.analyze(load_map(args.map), settings_from(args))


def cmd_decide(args: argparse.Namespace) -> services.Outcome:
    return services.decide(load_map(args.map), args.group, settings_from(args))


def cmd_factor(args: argparse.Namespace) -> services.Outcome:
    outcome = services.factor(load_map(args.map), args.involutions, args.group, settings_from(args), args.timing)
    if outcome.witness is not None:
        out = Path(args.out or Path(args.map).with_suffix(".witness.json"))
        out.write_text(witness_to_json(outcome.witness) + "\n", encoding="utf-8")
        outcome.report["results"]["archive"] = str(out)
        logger.info("witness archive written to %s", out)
    return outcome


def cmd_verify(args: argparse.Namespace) -> services.Outcome:
    witness = witness_from_json(_read(args.archive))
    f = load_map(args.map) if args.map else None
    return services.verify(witness, f, settings_from(args), args.timing)


def _generate(args: argparse.Namespace, seed: int):
    if args.family == "involution-product":
        return involution_product(seed)
    if args.family == "mirrored":
        return mirrored_reversing((1, 1, -1), seed, args.conjugate)
    word = CHIRAL_WORD if args.family == "chiral" else args.word
    rho = parse_rational(args.rho) if args.rho is not None else None
    return random_pl_homeo(args.degree, args.breakpoints, seed, args.fixed_points, word, rho, args.conjugate)


def cmd_random(args: argparse.Namespace) -> services.Outcome:
    base = args.seed or 0
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i in range(args.count):
        generated = _generate(args, base + i)
        doc = {**map_to_dict(generated.map), "certificate": generated.certificate, "seed": base + i}
        path = out_dir / f"map_{i:03d}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        files.append(str(path))
    report = {"format": services.REPORT_FORMAT, "command": "random", "status": "pass",
              "results": {"count": len(files), "seed": base, "files": files}}
    return services.Outcome("random", "pass", report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-period", type=int, default=None, help="Largest certified period (default 64)")
    common.add_argument("--max-iter", type=int, default=None, help="Lift iterations for brackets (default 100000)")
    common.add_argument("--samples", type=int, default=None, help="Verification samples per identity (default 512)")
    common.add_argument("--seed", type=int, default=None, help="Seed of random samples and generators (default 0)")
    common.add_argument("--json", action="store_true", help="Print the JSON report")
    common.add_argument("--timing", action="store_true", help="Add wall-clock timings to the report")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="python -m app.cli",
                                     description="Exact reversibility analysis of PL circle homeomorphisms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="Fixed set, rotation number and signature word")
    p.add_argument("map")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("decide", parents=[common], help="Decide strong reversibility")
    p.add_argument("map")
    p.add_argument("--group", choices=("hplus", "h"), default="h")
    p.set_defaults(handler=cmd_decide)

    p = sub.add_parser("factor", parents=[common], help="Build and verify an involution witness")
    p.add_argument("map")
    p.add_argument("--involutions", type=int, choices=(2, 3), default=2)
    p.add_argument("--group", choices=("hplus", "h"), default="h")
    p.add_argument("--out", default=None, help="Archive path (default <map>.witness.json)")
    p.set_defaults(handler=cmd_factor)

    p = sub.add_parser("random", parents=[common], help="Generate a deterministic corpus of maps")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--degree", type=int, choices=(1, -1), default=1)
    p.add_argument("--breakpoints", type=int, default=None)
    p.add_argument("--fixed-points", type=int, default=None)
    p.add_argument("--word", default=None, help='Signature word such as "P+P-"')
    p.add_argument("--rho", default=None, help="Rotation number p/q")
    p.add_argument("--conjugate", action="store_true", help="Conjugate by a random PL map")
    p.add_argument("--family", choices=("constrained", "chiral", "involution-product", "mirrored"),
                   default="constrained")
    p.add_argument("--out-dir", default="corpus")
    p.set_defaults(handler=cmd_random)

    p = sub.add_parser("verify", parents=[common], help="Re-verify a witness archive")
    p.add_argument("archive")
    p.add_argument("map", nargs="?", default=None, help="Map to verify against (default: the archived map)")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        outcome = args.handler(args)
    except RotationNumberUnknown as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IterationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        outcome.report["timing"] = {"elapsed": round(time.perf_counter() - started, 6)}
    _emit(outcome.report, args.json)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
