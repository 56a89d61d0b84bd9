"""JSON documents: maps, expression trees, witness archives and report parts.

Every rational is written as a "p/q" string. Expression trees are stored as a
node table in post-order; shared subtrees are written once and children are
referenced by index, so archives reload to the same evaluation structure.
"""
import hashlib
import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from app.engine.circle import Arc, Closure, format_rational, parse_rational
from app.engine.dynamics import FixSet, RotationBracket, RotationNumberResult, SignatureWord
from app.engine.errors import ArchiveFormatError, EngineError, MapFormatError
from app.engine.evalmap import (PL, Affine, Compose, EquivariantExtension, EvalMap, InverseOf, Piecewise,
                                as_evalmap)
from app.engine.plmap import PLMap
from app.engine.reversibility import Route, Verdict
from app.engine.witness import SampleFailure, VerificationReport, Witness

logger = logging.getLogger(__name__)

MAP_FORMAT = "circle-map/1"
ARCHIVE_FORMAT = "circle-witness/1"
REPORT_FORMAT = "circle-report/1"

MINUS = "−"


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sign_symbol(sign: int) -> str:
    return "+" if sign > 0 else MINUS


# maps


def map_to_dict(f: PLMap) -> Dict[str, Any]:
    return {
        "format": MAP_FORMAT,
        "degree": f.degree,
        "vertices": [[format_rational(x), format_rational(y)] for x, y in f.vertices],
    }


def _rational(value: Any, what: str, index: Optional[int] = None) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise MapFormatError(f"{what} must be a rational string, got {value!r}", index)
    try:
        return parse_rational(value) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise MapFormatError(f"{what}: {exc}", index) from exc


def map_from_dict(doc: Any) -> PLMap:
    """Parse map JSON; errors name the offending vertex."""
    if not isinstance(doc, dict):
        raise MapFormatError("map document must be an object")
    fmt = doc.get("format", MAP_FORMAT)
    if fmt != MAP_FORMAT:
        raise MapFormatError(f"unsupported map format {fmt!r}")
    degree = doc.get("degree")
    if degree not in (1, -1) or isinstance(degree, bool):
        raise MapFormatError(f"degree must be 1 or -1, got {degree!r}")
    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or not vertices:
        raise MapFormatError("vertices must be a non-empty list of [x, y] pairs")
    pts = []
    for i, v in enumerate(vertices):
        if not isinstance(v, (list, tuple)) or len(v) != 2:
            raise MapFormatError(f"expected an [x, y] pair, got {v!r}", i)
        pts.append((_rational(v[0], "x", i), _rational(v[1], "y", i)))
    return PLMap(degree, pts)


def map_to_json(f: PLMap) -> str:
    return canonical_json(map_to_dict(f))


def map_from_json(text: str) -> PLMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"not JSON: {exc}") from exc
    return map_from_dict(doc)


def map_digest(f: PLMap) -> str:
    """SHA-256 of the canonical map JSON."""
    return hashlib.sha256(map_to_json(f).encode("utf-8")).hexdigest()


# arcs and expression trees


def arc_to_dict(arc: Arc) -> Dict[str, Any]:
    return {"start": format_rational(arc.start), "end": format_rational(arc.end),
            "closure": arc.closure.value, "wraps": arc.wraps}


def arc_from_dict(doc: Dict[str, Any]) -> Arc:
    return Arc(parse_rational(doc["start"]), parse_rational(doc["end"]), Closure(doc["closure"]),
               bool(doc.get("wraps", False)))


class _TreeWriter:
    def __init__(self):
        self.nodes: List[Dict[str, Any]] = []
        self._index: Dict[int, int] = {}

    def add(self, m: EvalMap) -> int:
        key = id(m)
        if key in self._index:
            return self._index[key]
        node = self._encode(m)
        self.nodes.append(node)
        self._index[key] = len(self.nodes) - 1
        return self._index[key]

    def _encode(self, m: EvalMap) -> Dict[str, Any]:
        if isinstance(m, PL):
            return {"node": "pl", "map": map_to_dict(m.map)}
        if isinstance(m, Affine):
            return {"node": "affine", "source": arc_to_dict(m.source), "target": arc_to_dict(m.target),
                    "reversing": m.reversing}
        if isinstance(m, Compose):
            return {"node": "compose", "maps": [self.add(n) for n in m.maps]}
        if isinstance(m, InverseOf):
            return {"node": "inverse", "inner": self.add(m.inner)}
        if isinstance(m, Piecewise):
            pieces = [{"arc": arc_to_dict(arc), "map": self.add(n)} for arc, n in m.pieces]
            return {"node": "piecewise", "pieces": pieces, "partial": m.partial}
        if isinstance(m, EquivariantExtension):
            return {"node": "extension", "source": arc_to_dict(m.source), "f": self.add(m.f),
                    "target": arc_to_dict(m.target), "g": self.add(m.g), "x0": format_rational(m.x0),
                    "y0": format_rational(m.y0), "reversing": m.reversing, "cap": m.cap}
        raise ArchiveFormatError(f"cannot serialize {type(m).__name__}")


def _decode(node: Dict[str, Any], built: List[EvalMap]) -> EvalMap:
    def ref(i: Any) -> EvalMap:
        if not isinstance(i, int) or not 0 <= i < len(built):
            raise ArchiveFormatError(f"node reference {i!r} does not point backwards")
        return built[i]

    kind = node.get("node")
    if kind == "pl":
        return PL(map_from_dict(node["map"]))
    if kind == "affine":
        return Affine(arc_from_dict(node["source"]), arc_from_dict(node["target"]), bool(node["reversing"]))
    if kind == "compose":
        return Compose(tuple(ref(i) for i in node["maps"]))
    if kind == "inverse":
        return InverseOf(ref(node["inner"]))
    if kind == "piecewise":
        pieces = tuple((arc_from_dict(p["arc"]), ref(p["map"])) for p in node["pieces"])
        return Piecewise(pieces, bool(node.get("partial", False)))
    if kind == "extension":
        return EquivariantExtension(arc_from_dict(node["source"]), ref(node["f"]), arc_from_dict(node["target"]),
                                    ref(node["g"]), parse_rational(node["x0"]), parse_rational(node["y0"]),
                                    bool(node["reversing"]), int(node["cap"]))
    raise ArchiveFormatError(f"unknown node tag {kind!r}")


def trees_to_dict(maps: Sequence[EvalMap]) -> Dict[str, Any]:
    writer = _TreeWriter()
    roots = [writer.add(as_evalmap(m)) for m in maps]
    return {"nodes": writer.nodes, "roots": roots}


def trees_from_dict(doc: Dict[str, Any]) -> List[EvalMap]:
    built: List[EvalMap] = []
    try:
        for i, node in enumerate(doc["nodes"]):
            try:
                built.append(_decode(node, built))
            except ArchiveFormatError:
                raise
            except (EngineError, KeyError, TypeError, ValueError) as exc:
                raise ArchiveFormatError(f"node {i}: {exc}") from exc
        return [built[i] for i in doc["roots"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise ArchiveFormatError(f"malformed expression tree: {exc}") from exc


def evalmap_to_dict(m: EvalMap) -> Dict[str, Any]:
    return trees_to_dict([m])


def evalmap_from_dict(doc: Dict[str, Any]) -> EvalMap:
    return trees_from_dict(doc)[0]


# report parts


def fixset_to_dict(fix: FixSet) -> Dict[str, Any]:
    return {
        "full": fix.full,
        "components": [{"kind": c.kind.value, "start": format_rational(c.start), "end": format_rational(c.end)}
                       for c in fix.components],
    }


def word_to_dict(word: SignatureWord) -> Dict[str, Any]:
    return {
        "status": word.status.value,
        "rendered": word.render(),
        "blocks": [{"kind": b.kind.value, "start": format_rational(b.start), "end": format_rational(b.end),
                    "sign": sign_symbol(b.sign)} for b in word.blocks],
    }


def rotation_to_dict(rho: RotationNumberResult) -> Dict[str, Any]:
    if isinstance(rho, RotationBracket):
        return {"kind": "bracket", "lo": format_rational(rho.lo), "hi": format_rational(rho.hi),
                "iterations": rho.iterations}
    return {"kind": "rational", "value": format_rational(rho.value), "period": rho.period,
            "witness": format_rational(rho.witness), "orbit": [format_rational(x) for x in rho.orbit]}


def verdict_to_dict(v: Verdict) -> Dict[str, Any]:
    out: Dict[str, Any] = {"verdict": v.verdict.value, "group": v.group.value, "reason": v.reason,
                           "plan": v.plan.describe() if v.plan is not None else None}
    if v.rotation is not None:
        out["rotation"] = rotation_to_dict(v.rotation)
    if v.extras:
        out["extras"] = v.extras
    return out


def report_to_dict(r: VerificationReport) -> Dict[str, Any]:
    out: Dict[str, Any] = {"samples": r.samples, "all_pass": r.all_pass, "laws": list(r.laws),
                           "worst_denominator": r.worst_denominator, "failure": None}
    if r.failure is not None:
        f = r.failure
        out["failure"] = {"law": f.law, "sample": format_rational(f.sample),
                          "expected": None if f.expected is None else format_rational(f.expected),
                          "actual": None if f.actual is None else format_rational(f.actual),
                          "detail": f.detail}
    if r.elapsed is not None:
        out["elapsed"] = round(r.elapsed, 6)
    return out


def report_from_dict(doc: Dict[str, Any]) -> VerificationReport:
    failure = None
    if doc.get("failure"):
        f = doc["failure"]
        failure = SampleFailure(f["law"], parse_rational(f["sample"]),
                                None if f.get("expected") is None else parse_rational(f["expected"]),
                                None if f.get("actual") is None else parse_rational(f["actual"]),
                                f.get("detail", ""))
    return VerificationReport(doc["samples"], doc["all_pass"], tuple(doc.get("laws", ())), failure,
                              doc.get("worst_denominator", 1), doc.get("elapsed"))


# witness archives


def witness_to_dict(w: Witness) -> Dict[str, Any]:
    trees = trees_to_dict(w.involutions)
    return {
        "format": ARCHIVE_FORMAT,
        "route": w.route.value,
        "target": map_to_dict(w.target),
        "digest": map_digest(w.target),
        "nodes": trees["nodes"],
        "involutions": trees["roots"],
        "notes": w.notes,
        "verification": report_to_dict(w.verification) if w.verification is not None else None,
    }


def witness_from_dict(doc: Any) -> Witness:
    if not isinstance(doc, dict) or doc.get("format") != ARCHIVE_FORMAT:
        found = doc.get("format") if isinstance(doc, dict) else type(doc).__name__
        raise ArchiveFormatError(f"expected a {ARCHIVE_FORMAT} archive, found {found!r}")
    try:
        route = Route(doc["route"])
        target = map_from_dict(doc["target"])
        involutions = trees_from_dict({"nodes": doc["nodes"], "roots": doc["involutions"]})
        report = report_from_dict(doc["verification"]) if doc.get("verification") else None
    except (KeyError, ValueError) as exc:
        raise ArchiveFormatError(f"malformed archive: {exc}") from exc
    except MapFormatError as exc:
        raise ArchiveFormatError(f"archive target: {exc}") from exc
    if doc.get("digest", map_digest(target)) != map_digest(target):
        raise ArchiveFormatError("archive digest does not match its target map")
    try:
        w = Witness(tuple(involutions), target, route, report, dict(doc.get("notes") or {}))
    except ValueError as exc:
        raise ArchiveFormatError(str(exc)) from exc
    logger.debug("loaded %s archive with %d involutions", route.value, len(involutions))
    return w


def witness_to_json(w: Witness) -> str:
    return json.dumps(witness_to_dict(w), sort_keys=True, indent=2, ensure_ascii=False)


def witness_from_json(text: str) -> Witness:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchiveFormatError(f"not JSON: {exc}") from exc
    return witness_from_dict(doc)
