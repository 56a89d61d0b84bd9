"""Involution witnesses and their exact pointwise verification."""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from app.engine.dynamics import fixed_points
from app.engine.errors import EngineError, VerificationFailure
from app.engine.evalmap import Compose, EvalMap, as_evalmap
from app.engine.plmap import PLMap
from app.engine.reversibility import Route
from app.engine.sampling import SamplePlan

logger = logging.getLogger(__name__)


@dataclass
class SampleFailure:
    law: str
    sample: Fraction
    expected: Optional[Fraction] = None
    actual: Optional[Fraction] = None
    detail: str = ""


@dataclass
class VerificationReport:
    samples: int
    all_pass: bool
    laws: Tuple[str, ...] = ()
    failure: Optional[SampleFailure] = None
    worst_denominator: int = 1
    elapsed: Optional[float] = None


@dataclass
class Witness:
    involutions: Tuple[EvalMap, ...]
    target: PLMap
    route: Route
    verification: Optional[VerificationReport] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.involutions = tuple(as_evalmap(m) for m in self.involutions)
        if not 1 <= len(self.involutions) <= 3:
            raise ValueError("a witness carries one to three involutions")


def sample_points(target: PLMap, plan: SamplePlan) -> Tuple[Fraction, ...]:
    """Sample plan for a map, skipping its breakpoints and fixed-set endpoints."""
    exclude = set(target.breakpoints())
    for g in (target, target @ target):
        fix = fixed_points(g)
        if not fix.full:
            exclude.update(fix.endpoints())
    return plan.points(exclude)


Law = Tuple[str, Callable[[Fraction], Fraction], Callable[[Fraction], Fraction]]


def _laws(w: Witness) -> List[Law]:
    f = w.target
    f_inv = f.inverse()
    if w.route == Route.THREE_INVOLUTIONS:
        laws: List[Law] = [(f"involution[{i}]", lambda x, s=s: s(s(x)), lambda x: x)
                           for i, s in enumerate(w.involutions)]
        s1, s2, s3 = w.involutions
        laws.append(("composition", lambda x: s1(s2(s3(x))), f))
        return laws
    tau = w.involutions[0]
    return [("involution", lambda x: tau(tau(x)), lambda x: x),
            ("reversal", lambda x: tau(f(tau(x))), f_inv)]


def check_laws(laws: List[Law], points: Tuple[Fraction, ...], timing: bool = False) -> VerificationReport:
    started = time.perf_counter()
    worst = 1
    failure = None
    for x in points:
        for name, lhs, rhs in laws:
            try:
                actual, expected = lhs(x), rhs(x)
            except EngineError as exc:
                failure = SampleFailure(name, x, detail=str(exc))
                break
            worst = max(worst, actual.denominator)
            if actual != expected:
                failure = SampleFailure(name, x, expected, actual)
                break
        if failure is not None:
            break
    elapsed = time.perf_counter() - started if timing else None
    return VerificationReport(len(points), failure is None, tuple(name for name, _, _ in laws), failure,
                              worst, elapsed)


def verify_witness(w: Witness, plan: SamplePlan = SamplePlan(), timing: bool = False) -> VerificationReport:
    report = check_laws(_laws(w), sample_points(w.target, plan), timing)
    if report.all_pass:
        logger.info("%s witness verified at %d samples", w.route.value, report.samples)
    else:
        logger.warning("%s witness fails %s at %s", w.route.value, report.failure.law, report.failure.sample)
    return report


def certify(w: Witness, plan: SamplePlan = SamplePlan(), timing: bool = False) -> Witness:
    """Attach a verification report; a failing witness is never emitted."""
    w.verification = verify_witness(w, plan, timing)
    failure = w.verification.failure
    if failure is not None:
        raise VerificationFailure(w.route.value, failure.law, failure.sample, failure.expected, failure.actual)
    return w


def verify_conjugator(c: EvalMap, f: PLMap, g: PLMap, plan: SamplePlan = SamplePlan()) -> VerificationReport:
    """Check c o f = g o c at the samples."""
    c = as_evalmap(c)
    laws: List[Law] = [("conjugacy", lambda x: c(f(x)), lambda x: g(c(x)))]
    return check_laws(laws, sample_points(f, plan))


def transport_witness(w: Witness, c: EvalMap, g: PLMap) -> Witness:
    """Carry a witness for f to one for g along a conjugator with c o f = g o c."""
    c = as_evalmap(c)
    c_inv = c.inverse()
    moved = tuple(Compose((c, tau, c_inv)) for tau in w.involutions)
    return Witness(moved, g, w.route, notes={**w.notes, "transported": True})
