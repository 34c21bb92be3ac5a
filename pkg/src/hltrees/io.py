"""JSON instance files and run reports.

Instances are validated against the versioned schema shipped in
``hltrees/schema/instance-v1.json``; unknown fields are rejected. Output is
canonical (sorted keys, sorted points) so that files round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .density_search import DenseSet, LevelSelection, WitnessPair
from .errors import DomainError, HLTreesError
from .strong_subtrees import StrongSubtree, VectorStrongSubtree
from .tree_core import HomogeneousTree, VectorTree

FORMAT = "hltrees-instance"
VERSION = 1


class MalformedInstance(HLTreesError):
    exit_code = 1


@lru_cache(maxsize=None)
def schema() -> dict:
    text = resources.files("hltrees").joinpath("schema/instance-v1.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def validator() -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(schema())


def frac_text(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"malformed rational {text!r}") from exc


def _node(t) -> list:
    return [int(c) for c in t]


def _point(p) -> list:
    return [_node(t) for t in p]


@dataclass(frozen=True)
class Certificate:
    s: VectorStrongSubtree
    r: StrongSubtree | None = None


@dataclass(frozen=True)
class Instance:
    ambient: VectorTree
    payload: object
    eps: Fraction | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        if isinstance(self.payload, DenseSet):
            return "dense-set"
        if isinstance(self.payload, LevelSelection):
            return "level-selection"
        return "subtree-certificate"


# --- encoding ------------------------------------------------------------------


def certificate_payload(s: VectorStrongSubtree, r: StrongSubtree | None = None) -> dict:
    out = {
        "kind": "subtree-certificate",
        "level_set": list(s.level_set),
        "components": [[[_node(t) for t in lvl] for lvl in c.nodes_by_level] for c in s.components],
    }
    if r is not None:
        out["target"] = {
            "branching": r.ambient_branching,
            "height": r.ambient_height,
            "level_set": list(r.level_set),
            "levels": [[_node(t) for t in lvl] for lvl in r.nodes_by_level],
        }
    return out


def witness_payload(w: WitnessPair) -> dict:
    return certificate_payload(w.s, w.r)


def dense_set_payload(D: DenseSet, eps=None) -> dict:
    out = {
        "kind": "dense-set",
        "points": [_point(p) for p in D.points()],
        "support_levels": list(D.support_levels),
    }
    if eps is not None:
        out["eps"] = frac_text(eps)
    return out


def selection_payload(sel: LevelSelection, eps=None) -> dict:
    values = []
    for p in sel.ambient.points():
        nodes = sorted(sel(p))
        if nodes:
            values.append({"point": _point(p), "nodes": [_node(w) for w in nodes]})
    out = {
        "kind": "level-selection",
        "target": {"branching": sel.target.branching, "height": sel.target.height},
        "level_set": list(sel.level_set),
        "values": values,
    }
    if eps is not None:
        out["eps"] = frac_text(eps)
    return out


def instance_dict(obj, eps=None, metadata: dict | None = None) -> dict:
    if isinstance(obj, DenseSet):
        ambient, payload = obj.ambient, dense_set_payload(obj, eps)
    elif isinstance(obj, LevelSelection):
        ambient, payload = obj.ambient, selection_payload(obj, eps)
    elif isinstance(obj, Certificate):
        s = obj.s
        ambient = VectorTree(s.branchings, s.components[0].ambient_height)
        payload = certificate_payload(s, obj.r)
    elif isinstance(obj, Instance):
        return instance_dict(obj.payload, obj.eps, obj.metadata)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    out = {
        "format": FORMAT,
        "version": VERSION,
        "ambient": {"branching": list(ambient.branchings), "height": ambient.height},
        "payload": payload,
    }
    if metadata:
        out["metadata"] = dict(metadata)
    return out


def dumps(obj, eps=None, metadata: dict | None = None) -> str:
    d = instance_dict(obj, eps, metadata)
    validator().validate(d)
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def dump(obj, path, eps=None, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(obj, eps, metadata))


# --- decoding ------------------------------------------------------------------


def loads(text: str) -> Instance:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInstance(f"not JSON: {exc}") from exc
    try:
        validator().validate(d)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise MalformedInstance(f"schema violation at {where}: {exc.message}") from exc
    try:
        return _decode(d)
    except HLTreesError as exc:
        raise MalformedInstance(f"invalid instance: {exc}") from exc


def load(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInstance(f"cannot read {path}: {exc}") from exc
    return loads(text)


def _decode(d: dict) -> Instance:
    amb = d["ambient"]
    vt = VectorTree(tuple(amb["branching"]), amb["height"])
    p = d["payload"]
    eps = parse_rational(p["eps"]) if "eps" in p else None
    meta = d.get("metadata", {})
    kind = p["kind"]
    if kind == "dense-set":
        pts = [tuple(tuple(t) for t in x) for x in p["points"]]
        for x in pts:
            if len(x) != vt.dim:
                raise MalformedInstance(f"point {x} has {len(x)} coordinates, expected {vt.dim}")
        return Instance(vt, DenseSet.from_points(vt, pts, p["support_levels"]), eps, meta)
    if kind == "level-selection":
        t = p["target"]
        W = HomogeneousTree(t["branching"], t["height"])
        values = {}
        for item in p["values"]:
            pt = tuple(tuple(x) for x in item["point"])
            if pt in values:
                raise MalformedInstance(f"point {pt} listed twice")
            values[pt] = [tuple(w) for w in item["nodes"]]
        return Instance(vt, LevelSelection(vt, W, tuple(p["level_set"]), values), eps, meta)
    ls = tuple(p["level_set"])
    comps = []
    if len(p["components"]) != vt.dim:
        raise MalformedInstance("component count does not match the ambient dimension")
    for b, levels in zip(vt.branchings, p["components"]):
        comps.append(StrongSubtree(b, vt.height, ls, tuple(tuple(tuple(t) for t in lvl) for lvl in levels)))
    r = None
    if "target" in p:
        t = p["target"]
        r = StrongSubtree(
            t["branching"], t["height"], tuple(t["level_set"]), tuple(tuple(tuple(w) for w in lvl) for lvl in t["levels"])
        )
    return Instance(vt, Certificate(VectorStrongSubtree(tuple(comps)), r), eps, meta)


# --- reports -------------------------------------------------------------------


def report_text(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
