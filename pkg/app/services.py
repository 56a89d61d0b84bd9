"""Report assembly shared by the CLI and the HTTP routers."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from app.config import EngineSettings
from app.engine.dynamics import RotationBracket, fixed_points, rotation_number, signature
from app.engine.errors import PreconditionError, VerificationFailure
from app.engine.factorization import factor_three_involutions, realize
from app.engine.plmap import PLMap
from app.engine.reversibility import (Verdict, VerdictKind, decide_strongly_reversible_h,
                                      decide_strongly_reversible_hplus, reversibility_summary)
from app.engine.sampling import SamplePlan
from app.engine.serialization import (REPORT_FORMAT, fixset_to_dict, map_digest, report_to_dict, rotation_to_dict,
                                      verdict_to_dict, witness_to_dict, word_to_dict)
from app.engine.witness import Witness, certify, verify_witness

logger = logging.getLogger(__name__)

EXIT_CODES = {"yes": 0, "pass": 0, "no": 1, "fail": 1, "refused": 1, "unknown": 2}


@dataclass
class Outcome:
    command: str
    status: str
    report: Dict[str, Any]
    witness: Optional[Witness] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _report(command: str, status: str, f: PLMap, settings: EngineSettings, results: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "format": REPORT_FORMAT,
        "command": command,
        "status": status,
        "input": {"digest": map_digest(f), "degree": f.degree, "vertices": len(f.vertices)},
        "settings": settings.public(),
        "results": results,
    }


def _plan(settings: EngineSettings) -> SamplePlan:
    return SamplePlan.of_size(settings.samples, settings.seed)


def analyze(f: PLMap, settings: EngineSettings) -> Outcome:
    results: Dict[str, Any] = {"degree": f.degree, "breakpoints": len(f.breakpoints()),
                               "involution": f.is_involution(), "fixed_set": fixset_to_dict(fixed_points(f))}
    if f.degree == -1:
        results["rotation"] = None
        results["minimal_period"] = None
        results["square_signature"] = word_to_dict(signature(f @ f))
    else:
        rho = rotation_number(f, settings.max_period, settings.max_iterations)
        results["rotation"] = rotation_to_dict(rho)
        if isinstance(rho, RotationBracket):
            results["minimal_period"] = None
            results["signature"] = None
        else:
            results["minimal_period"] = rho.period
            results["signature"] = word_to_dict(signature(f)) if rho.value == 0 else None
    return Outcome("analyze", "pass", _report("analyze", "pass", f, settings, results))


def decide(f: PLMap, group: str, settings: EngineSettings) -> Outcome:
    verdict = _decide(f, group, settings)
    results: Dict[str, Any] = {"verdict": verdict_to_dict(verdict)}
    if group == "h" and f.degree == 1 and verdict.verdict != VerdictKind.UNKNOWN:
        results["reversible"] = reversibility_summary(f, settings.max_period, settings.max_iterations)
    status = verdict.verdict.value
    logger.info("decide %s: %s (%s)", group, status, verdict.reason)
    return Outcome("decide", status, _report("decide", status, f, settings, results))


def _decide(f: PLMap, group: str, settings: EngineSettings) -> Verdict:
    if group == "hplus":
        if f.degree == -1:
            raise PreconditionError("an orientation reversing map is not a composite of preserving involutions")
        return decide_strongly_reversible_hplus(f, settings.max_period, settings.max_iterations)
    return decide_strongly_reversible_h(f, settings.max_period, settings.max_iterations)


def _witness_summary(w: Witness) -> Dict[str, Any]:
    return {"route": w.route.value, "involutions": len(w.involutions),
            "degrees": [s.degree for s in w.involutions], "notes": w.notes,
            "verification": report_to_dict(w.verification) if w.verification else None}


def factor(f: PLMap, involutions: int, group: str, settings: EngineSettings, timing: bool = False) -> Outcome:
    """Build and verify a witness; a failing or refused witness never leaves this function."""
    results: Dict[str, Any] = {"involutions": involutions}
    if involutions == 3:
        if f.degree != 1:
            raise PreconditionError("three-involution factorization needs an orientation preserving map")
        w = factor_three_involutions(f, settings.iteration_cap)
    else:
        verdict = _decide(f, group, settings)
        results["verdict"] = verdict_to_dict(verdict)
        if not verdict.is_yes:
            status = "unknown" if verdict.verdict == VerdictKind.UNKNOWN else "refused"
            results["refusal"] = verdict.reason
            return Outcome("factor", status, _report("factor", status, f, settings, results))
        w = realize(f, verdict, settings.iteration_cap)
    try:
        certify(w, _plan(settings), timing)
    except VerificationFailure as exc:
        logger.error("witness rejected: %s", exc)
        results["witness"] = _witness_summary(w)
        return Outcome("factor", "fail", _report("factor", "fail", f, settings, results))
    results["witness"] = _witness_summary(w)
    return Outcome("factor", "pass", _report("factor", "pass", f, settings, results), w)


def verify(w: Witness, f: Optional[PLMap], settings: EngineSettings, timing: bool = False) -> Outcome:
    """Re-run exact verification of an archived witness, against f when given."""
    archived = map_digest(w.target)
    if f is not None and f != w.target:
        w = Witness(w.involutions, f, w.route, notes=w.notes)
    target = w.target
    report = verify_witness(w, _plan(settings), timing)
    status = "pass" if report.all_pass else "fail"
    results = {"route": w.route.value, "archive_digest": archived, "matches_archive_map": map_digest(target) == archived,
               "verification": report_to_dict(report)}
    return Outcome("verify", status, _report("verify", status, target, settings, results))


def archive(outcome: Outcome) -> Dict[str, Any]:
    if outcome.witness is None:
        raise PreconditionError(f"no witness to archive ({outcome.status})")
    return witness_to_dict(outcome.witness)
