"""
JSON documents for points, measures, trees, hierarchies and sample lists.

Every ``dump_*`` returns plain JSON-ready values; :func:`dumps` renders them with
sorted keys and two-space indentation. Every ``load_*`` validates its input and
raises :class:`CodecError` with the path of the offending entry.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from .ipt_errors import CodecError, IpTreeError
from .ipt_hierarchy import Block, Hierarchy
from .ipt_l1geom import Arc, L1Point
from .ipt_measure import DensityArc, FadMeasure1D, TreeAtom, TreeMeasure
from .ipt_tree import CrushStep, IpTree

PathLike = Union[str, Path]


def _expect(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise CodecError(f"{where}: {message}")


def _number(value: Any, where: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), where, "expected a number")
    return float(value)


def _integer(value: Any, where: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), where, "expected an integer")
    return value


def _array(value: Any, where: str, length: int = -1) -> List[Any]:
    _expect(isinstance(value, list), where, "expected an array")
    if length >= 0:
        _expect(len(value) == length, where, f"expected {length} entries, got {len(value)}")
    return value


def _object(value: Any, where: str, keys: Sequence[str]) -> Dict[str, Any]:
    _expect(isinstance(value, dict), where, "expected an object")
    missing = [key for key in keys if key not in value]
    _expect(not missing, where, f"missing key(s): {', '.join(missing)}")
    return value


def _guard(where: str, build):
    """Run a constructor and report domain errors as codec errors."""

    try:
        return build()
    except CodecError:
        raise
    except IpTreeError as exc:
        raise CodecError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# Points and measures
# ---------------------------------------------------------------------------


def dump_point(point: L1Point) -> List[List[Any]]:
    return [[index, value] for index, value in point.coords]


def load_point(doc: Any, where: str = "point") -> L1Point:
    coords: List[Tuple[int, float]] = []
    for k, pair in enumerate(_array(doc, where)):
        at = f"{where}[{k}]"
        index, value = _array(pair, at, 2)
        coords.append((_integer(index, at), _number(value, at)))
    return _guard(where, lambda: L1Point(tuple(coords)))


def dump_fad(measure: FadMeasure1D) -> Dict[str, Any]:
    return {
        "atoms": [[loc, mass] for loc, mass in measure.atoms],
        "segments": [[a, b] for a, b in measure.segments],
    }


def load_fad(doc: Any, where: str = "measure") -> FadMeasure1D:
    doc = _object(doc, where, ("atoms", "segments"))
    atoms = []
    for k, entry in enumerate(_array(doc["atoms"], f"{where}.atoms")):
        at = f"{where}.atoms[{k}]"
        loc, mass = _array(entry, at, 2)
        atoms.append((_number(loc, at), _number(mass, at)))
    segments = []
    for k, entry in enumerate(_array(doc["segments"], f"{where}.segments")):
        at = f"{where}.segments[{k}]"
        a, b = _array(entry, at, 2)
        segments.append((_number(a, at), _number(b, at)))
    return _guard(where, lambda: FadMeasure1D(tuple(atoms), tuple(segments)))


def dump_tree_measure(measure: TreeMeasure) -> Dict[str, Any]:
    return {
        "atoms": [[dump_point(a.point), a.mass, a.tag] for a in measure.atoms],
        "density": [
            [dump_point(d.arc.lower), dump_point(d.arc.upper), d.arc.axis, d.rate]
            for d in measure.density
        ],
    }


def _load_arc(lower: Any, upper: Any, axis: Any, where: str) -> Arc:
    low = load_point(lower, f"{where}.lower")
    high = load_point(upper, f"{where}.upper")
    return _guard(where, lambda: Arc(low, high, _integer(axis, f"{where}.axis")))


def load_tree_measure(doc: Any, where: str = "weight") -> TreeMeasure:
    doc = _object(doc, where, ("atoms", "density"))
    atoms = []
    for k, entry in enumerate(_array(doc["atoms"], f"{where}.atoms")):
        at = f"{where}.atoms[{k}]"
        point, mass, tag = _array(entry, at, 3)
        _expect(isinstance(tag, str), at, "atom tag must be a string")
        point = load_point(point, f"{at}.point")
        mass = _number(mass, at)
        atoms.append(_guard(at, lambda: TreeAtom(point, mass, tag)))
    density = []
    for k, entry in enumerate(_array(doc["density"], f"{where}.density")):
        at = f"{where}.density[{k}]"
        lower, upper, axis, rate = _array(entry, at, 4)
        arc = _load_arc(lower, upper, axis, at)
        rate = _number(rate, at)
        density.append(_guard(at, lambda: DensityArc(arc, rate)))
    return _guard(where, lambda: TreeMeasure(tuple(atoms), tuple(density)))


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------


def _dump_step(step: CrushStep) -> Dict[str, Any]:
    return {
        "site": dump_point(step.site),
        "site_mass": step.site_mass,
        "crushed_mass": step.crushed_mass,
        "string": dump_fad(step.string),
        "new_axis": step.new_axis,
        "paused": step.paused,
        "tag": step.tag,
    }


def _load_step(doc: Any, where: str) -> CrushStep:
    doc = _object(doc, where, ("site", "site_mass", "crushed_mass", "string", "new_axis", "paused", "tag"))
    _expect(isinstance(doc["paused"], bool), f"{where}.paused", "expected a boolean")
    _expect(isinstance(doc["tag"], str), f"{where}.tag", "expected a string")
    return CrushStep(
        site=load_point(doc["site"], f"{where}.site"),
        site_mass=_number(doc["site_mass"], f"{where}.site_mass"),
        crushed_mass=_number(doc["crushed_mass"], f"{where}.crushed_mass"),
        string=load_fad(doc["string"], f"{where}.string"),
        new_axis=_integer(doc["new_axis"], f"{where}.new_axis"),
        paused=doc["paused"],
        tag=doc["tag"],
    )


def dump_tree(tree: IpTree) -> Dict[str, Any]:
    return {
        "arcs": [[dump_point(a.lower), dump_point(a.upper), a.axis] for a in tree.arcs],
        "weight": dump_tree_measure(tree.weight),
        "build_log": [_dump_step(step) for step in tree.build_log],
    }


def load_tree(doc: Any, where: str = "tree") -> IpTree:
    doc = _object(doc, where, ("arcs", "weight"))
    arcs = []
    for k, entry in enumerate(_array(doc["arcs"], f"{where}.arcs")):
        at = f"{where}.arcs[{k}]"
        lower, upper, axis = _array(entry, at, 3)
        arcs.append(_load_arc(lower, upper, axis, at))
    weight = load_tree_measure(doc["weight"], f"{where}.weight")
    log = [
        _load_step(entry, f"{where}.build_log[{k}]")
        for k, entry in enumerate(_array(doc.get("build_log", []), f"{where}.build_log"))
    ]
    return IpTree(tuple(arcs), weight, tuple(log))


# ---------------------------------------------------------------------------
# Hierarchies and samples
# ---------------------------------------------------------------------------


def dump_hierarchy(h: Hierarchy) -> Dict[str, Any]:
    def node(block: Block) -> List[Any]:
        return [sorted(block), [node(child) for child in h.children(block)]]

    return {"labels": list(h.labels), "blocks": node(h.root)}


def load_hierarchy(doc: Any, where: str = "hierarchy") -> Hierarchy:
    doc = _object(doc, where, ("labels", "blocks"))
    labels = [_integer(label, f"{where}.labels") for label in _array(doc["labels"], f"{where}.labels")]
    blocks = []
    stack = [(doc["blocks"], f"{where}.blocks")]
    while stack:
        entry, at = stack.pop()
        members, children = _array(entry, at, 2)
        blocks.append([_integer(label, at) for label in _array(members, at)])
        for k, child in enumerate(_array(children, f"{at}[1]")):
            stack.append((child, f"{at}[1][{k}]"))
    return _guard(where, lambda: Hierarchy.build(labels, blocks))


def dump_samples(samples: Sequence[L1Point]) -> List[Any]:
    return [dump_point(point) for point in samples]


def load_samples(doc: Any, where: str = "samples") -> List[L1Point]:
    return [load_point(entry, f"{where}[{k}]") for k, entry in enumerate(_array(doc, where))]


# ---------------------------------------------------------------------------
# Text and files
# ---------------------------------------------------------------------------


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str, where: str = "document") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"{where}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def write_json(path: PathLike, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CodecError(f"{path}: not UTF-8 text (byte {exc.start})") from exc
    return loads(text, str(path))
