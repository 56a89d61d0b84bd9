"""Scale run of the exact engine: generated maps per route, checked with zero tolerance.

Features:
- Builds `--per-route` seeded maps for every witness route (rot0, two_i_reversing,
  two_ii, two_minus), decides them and verifies every YES witness at `--samples` points.
- Factors `--three` random non-involutive maps into three involutions.
- Confirms rotation number 1/2 maps are NO in H+ and chiral maps are NO in H+ and H.
- Checks the signature identities for random (f, h) pairs, reversing h included.
- Confirms reports are byte-identical across two runs.

Run from the project root:

  python tests/system_tests/acceptance_suite.py --per-route 200 --three 100 --workers 8

Flags: `--samples`, `--seed`, `--pairs`, `--chiral`, `--no-determinism`
"""
import argparse
import concurrent.futures
import os
import random
import sys
import time
from collections import Counter
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from app import services  # noqa: E402
from app.config import EngineSettings  # noqa: E402
from app.engine.dynamics import signature_identities_check  # noqa: E402
from app.engine.errors import EngineError  # noqa: E402
from app.engine.factorization import factor_three_involutions, realize  # noqa: E402
from app.engine.generators import (CHIRAL_WORD, involution_product, mirrored_reversing,  # noqa: E402
                                   random_homeomorphism, random_pl_homeo)
from app.engine.plmap import PLMap  # noqa: E402
from app.engine.reversibility import (VerdictKind, decide_strongly_reversible_h,  # noqa: E402
                                      decide_strongly_reversible_hplus)
from app.engine.sampling import SamplePlan  # noqa: E402
from app.engine.serialization import canonical_json  # noqa: E402
from app.engine.witness import certify  # noqa: E402

Result = Tuple[str, int, bool, str]

HALF_TURN_WORDS = ["P+P-", "P+A+P-A-", "P+P-P-P-P+P+"]
REFLECTION_WORDS = ["P-", "P+P+P-", "A+A-", "P+P-"]
PERIODS = [Fraction(1, 3), Fraction(1, 4), Fraction(2, 5), Fraction(3, 7)]


def build_map(route: str, seed: int) -> PLMap:
    rng = random.Random(seed)
    if route == "rot0":
        return random_pl_homeo(word=rng.choice(HALF_TURN_WORDS), seed=seed, conjugate=rng.random() < 0.5).map
    if route == "two_i_reversing":
        return random_pl_homeo(word=rng.choice(REFLECTION_WORDS), seed=seed, conjugate=rng.random() < 0.5).map
    if route == "two_ii":
        rho = rng.choice(PERIODS)
        word = rng.choice([None, "P+P-", "P-"])
        return random_pl_homeo(rho=rho, word=word, seed=seed, conjugate=rng.random() < 0.5).map
    if route == "two_minus":
        return involution_product(seed).map
    raise ValueError(f"unknown route {route}")


def check_route(route: str, seed: int, samples: int) -> Result:
    f = build_map(route, seed)
    decide = decide_strongly_reversible_hplus if route == "rot0" else decide_strongly_reversible_h
    try:
        verdict = decide(f)
        if not verdict.is_yes:
            return route, seed, True, f"{verdict.verdict.value}: {verdict.reason}"
        w = certify(realize(f, verdict), SamplePlan.of_size(samples, seed))
    except EngineError as exc:
        return route, seed, False, f"{type(exc).__name__}: {exc}"
    return route, seed, True, w.route.value


def check_three(seed: int, samples: int) -> Result:
    rng = random.Random(seed)
    f = random_homeomorphism(rng, 1, rng.randint(2, 6))
    if f.is_involution():
        return "three_involutions", seed, True, "involution"
    try:
        certify(factor_three_involutions(f), SamplePlan.of_size(samples, seed))
    except EngineError as exc:
        return "three_involutions", seed, False, f"{type(exc).__name__}: {exc}"
    return "three_involutions", seed, True, "verified"


def check_half_rotation(seed: int, samples: int) -> Result:
    f = random_pl_homeo(rho=Fraction(1, 2), seed=seed, conjugate=bool(seed % 2)).map
    if f.is_involution():
        return "rotation_half", seed, True, "involution"
    verdict = decide_strongly_reversible_hplus(f)
    return "rotation_half", seed, verdict.verdict == VerdictKind.NO, verdict.reason


def check_chiral(seed: int, samples: int) -> Result:
    f = random_pl_homeo(word=CHIRAL_WORD, seed=seed, conjugate=bool(seed % 2)).map
    verdicts = (decide_strongly_reversible_hplus(f).verdict, decide_strongly_reversible_h(f).verdict)
    return "chiral", seed, verdicts == (VerdictKind.NO, VerdictKind.NO), str([v.value for v in verdicts])


def check_mirrored(seed: int, samples: int) -> Result:
    f = mirrored_reversing((1, 1, -1), seed, conjugate=bool(seed % 2)).map
    verdict = decide_strongly_reversible_h(f)
    return "constrained_chiral_square", seed, verdict.verdict == VerdictKind.NO, verdict.reason


def check_identities(seed: int, samples: int) -> Result:
    rng = random.Random(seed)
    f = random_pl_homeo(fixed_point_count=rng.randint(1, 4), seed=seed).map
    h = random_homeomorphism(rng, rng.choice((1, -1)), rng.randint(2, 5))
    report = signature_identities_check(f, h, SamplePlan.of_size(samples, seed).points())
    return "signature_identities", seed, report.passed, "" if report.passed else str(report)


def run_pool(jobs: List[Tuple[Callable[..., Result], tuple]], workers: int) -> List[Result]:
    with concurrent.futures.ProcessPoolExecutor(max_workers=max(1, workers)) as ex:
        futures = [ex.submit(fn, *args) for fn, args in jobs]
        return [fut.result() for fut in futures]


def report_once(seed: int) -> str:
    settings = EngineSettings(samples=128, seed=seed)
    pieces = []
    for route in ("rot0", "two_i_reversing", "two_ii", "two_minus"):
        f = build_map(route, seed)
        group = "hplus" if route == "rot0" else "h"
        pieces.append(canonical_json(services.decide(f, group, settings).report))
        pieces.append(canonical_json(services.factor(f, 2, group, settings).report))
    return "\n".join(pieces)


def main(args):
    base = args.seed
    jobs: List[Tuple[Callable[..., Result], tuple]] = []
    for route in ("rot0", "two_i_reversing", "two_ii", "two_minus"):
        jobs += [(check_route, (route, base + i, args.samples)) for i in range(args.per_route)]
    jobs += [(check_three, (base + i, args.samples)) for i in range(args.three)]
    jobs += [(check_half_rotation, (base + i, args.samples)) for i in range(args.three)]
    jobs += [(check_chiral, (base + i, args.samples)) for i in range(args.chiral)]
    jobs += [(check_mirrored, (base + i, args.samples)) for i in range(args.chiral)]
    jobs += [(check_identities, (base + i, args.samples)) for i in range(args.pairs)]

    print(f"Running {len(jobs)} checks on {args.workers} workers (samples={args.samples}, seed={base})")
    t0 = time.time()
    results = run_pool(jobs, args.workers)
    duration = time.time() - t0

    totals: Dict[str, Counter] = {}
    failures = [r for r in results if not r[2]]
    for name, _, ok, detail in results:
        counter = totals.setdefault(name, Counter())
        counter["ok" if ok else "failed"] += 1
        if ok and name in ("rot0", "two_i_reversing", "two_ii", "two_minus"):
            counter["verified" if detail == name else "skipped"] += 1

    for name, counter in totals.items():
        print(f"  {name:28s} " + "  ".join(f"{k}={v}" for k, v in sorted(counter.items())))
    print(f"Checks finished in {duration:.2f}s")

    for name, seed, _, detail in failures[:20]:
        print(f"FAILED {name} seed={seed}: {detail}")

    if not args.no_determinism:
        if report_once(base) == report_once(base):
            print("Determinism PASSED: identical reports across two runs")
        else:
            print("Determinism FAILED: reports differ between runs")
            failures.append(("determinism", base, False, ""))

    if failures:
        raise SystemExit(f"{len(failures)} acceptance checks failed")
    print("All acceptance checks PASSED")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the exact acceptance checks at scale")
    parser.add_argument("--per-route", type=int, default=200, help="Generated maps per witness route")
    parser.add_argument("--three", type=int, default=100, help="Maps for the three-involution and rotation 1/2 checks")
    parser.add_argument("--chiral", type=int, default=20, help="Chiral and constrained-chiral maps")
    parser.add_argument("--pairs", type=int, default=100, help="Random (f, h) pairs for the signature identities")
    parser.add_argument("--samples", type=int, default=512, help="Sample points per verified identity")
    parser.add_argument("--seed", type=int, default=0, help="First seed of every family")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="Worker processes")
    parser.add_argument("--no-determinism", action="store_true", help="Skip the two-run report comparison")
    args = parser.parse_args()

    main(args)
