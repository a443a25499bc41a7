"""Scene files: one JSON document with a ``version`` field, validated by a JSON schema and
then for cross references (every index a section points at must exist)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

SCENE_VERSION = 1


class WorkbenchError(Exception):
    """A named invariant of the input or of a computation does not hold."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant
        self.message = message


_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POINTS = {"type": "array", "items": _POINT, "minItems": 2}
_INDEX = {"type": "integer", "minimum": 0}
_REF = {
    "type": "object",
    "properties": {"disk": _INDEX, "polygon": _INDEX, "continuum": _INDEX, "loop": _INDEX},
    "minProperties": 1, "maxProperties": 1, "additionalProperties": False,
}
_NUMBER_LIST = {"type": "array", "items": {"type": "number"}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "schottky_qc scene",
    "type": "object",
    "required": ["version"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SCENE_VERSION},
        "name": {"type": "string"},
        "metric": {"enum": ["euclidean", "spherical"]},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {"type": "integer", "minimum": 4},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "view": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "disks": {"type": "array", "items": {
            "type": "object", "required": ["center", "radius"], "additionalProperties": False,
            "properties": {"center": _POINT, "radius": {"type": "number", "exclusiveMinimum": 0},
                           "exterior": {"type": "boolean"}}}},
        "loops": {"type": "array", "items": {
            "type": "object", "required": ["center"], "additionalProperties": False,
            "properties": {"center": _POINT,
                           "radius": {"type": "number", "exclusiveMinimum": 0},
                           "cos": _NUMBER_LIST, "sin": _NUMBER_LIST,
                           "ellipse": {"type": "array", "items": {"type": "number",
                                                                  "exclusiveMinimum": 0},
                                       "minItems": 2, "maxItems": 2}}}},
        "continua": {"type": "array", "items": {
            "type": "object", "required": ["points"], "additionalProperties": False,
            "properties": {"points": _POINTS, "closed": {"type": "boolean"}}}},
        "polygons": {"type": "array", "items": {
            "type": "object", "required": ["points"], "additionalProperties": False,
            "properties": {"points": {**_POINTS, "minItems": 3}}}},
        "annuli": {"type": "array", "items": {
            "type": "object", "required": ["center", "r", "R"], "additionalProperties": False,
            "properties": {"center": _POINT, "r": {"type": "number", "exclusiveMinimum": 0},
                           "R": {"type": "number", "exclusiveMinimum": 0}}}},
        "schottky": {"type": "object", "additionalProperties": False,
                     "properties": {"generators": {"type": "array", "items": _INDEX,
                                                   "minItems": 2, "uniqueItems": True}}},
        "family": {"type": "object", "additionalProperties": False,
                   "properties": {"E": _REF, "F": _REF, "domain": _REF, "annulus": _INDEX,
                                  "obstacles": {"type": "array", "items": _REF},
                                  "count_mode": {"enum": ["visit", "once"]}}},
        "preset": {"type": "object", "required": ["name"], "additionalProperties": False,
                   "properties": {"name": {"enum": ["narrow_passage"]},
                                  "gaps": {"type": "array", "minItems": 1,
                                           "items": {"type": "number", "exclusiveMinimum": 0,
                                                     "exclusiveMaximum": 1}},
                                  "half_height": {"type": "number", "exclusiveMinimum": 0}}},
        "uniformize": {"type": "object", "additionalProperties": False,
                       "properties": {"components": {"type": "array", "items": _REF,
                                                     "minItems": 1},
                                      "stage": {"type": "integer", "minimum": 1}}},
        "exhaust": {"type": "object", "additionalProperties": False,
                    "properties": {"disks": {"type": "array", "items": _INDEX, "minItems": 2},
                                   "stages": {"type": "array", "items": {"type": "integer",
                                                                        "minimum": 1},
                                              "minItems": 1}}},
    },
}

_SECTION_OF_REF = {"disk": "disks", "polygon": "polygons", "continuum": "continua",
                   "loop": "loops"}


def _z(p) -> complex:
    return complex(float(p[0]), float(p[1]))


def _check_refs(doc: dict) -> None:
    """Every index used by schottky, family, uniformize and exhaust must be defined."""
    def count(section):
        return len(doc.get(section, []))

    def ref(where, r):
        (kind, i), = r.items()
        sec = _SECTION_OF_REF[kind]
        if i >= count(sec):
            raise WorkbenchError("scene references", f"{where} refers to {kind} {i} but only "
                                 f"{count(sec)} {sec} are defined")

    for i in doc.get("schottky", {}).get("generators", []):
        if i >= count("disks"):
            raise WorkbenchError("scene references", f"schottky generator {i} is not a defined disk")
    fam = doc.get("family", {})
    for key in ("E", "F", "domain"):
        if key in fam:
            ref(f"family.{key}", fam[key])
    for j, r in enumerate(fam.get("obstacles", [])):
        ref(f"family.obstacles[{j}]", r)
    if "annulus" in fam and fam["annulus"] >= count("annuli"):
        raise WorkbenchError("scene references", f"family.annulus {fam['annulus']} is not defined")
    if fam and "annulus" not in fam and not ("E" in fam and "F" in fam):
        raise WorkbenchError("scene family", "a family needs E and F, or an annulus")
    for j, r in enumerate(doc.get("uniformize", {}).get("components", [])):
        (kind, _), = r.items()
        if kind not in ("disk", "loop"):
            raise WorkbenchError("scene references", "uniformize components must be disks or loops")
        ref(f"uniformize.components[{j}]", r)
    for i in doc.get("exhaust", {}).get("disks", []):
        if i >= count("disks"):
            raise WorkbenchError("scene references", f"exhaust disk {i} is not defined")
    for i, a in enumerate(doc.get("annuli", [])):
        if not a["r"] < a["R"]:
            raise WorkbenchError("annulus radii", f"annulus {i} needs r < R")
    for i, lp in enumerate(doc.get("loops", [])):
        given = [k for k in ("radius", "cos", "ellipse") if k in lp]
        if len(given) != 1:
            raise WorkbenchError("loop definition", f"loop {i} needs exactly one of radius, "
                                 "cos (with optional sin) or ellipse")
        if "sin" in lp and len(lp["sin"]) != len(lp.get("cos", [])):
            raise WorkbenchError("loop definition", f"loop {i}: cos and sin lengths differ")


@dataclass(frozen=True)
class Scene:
    doc: dict
    source: str  # canonical JSON text the scene was built from

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.source.encode()).hexdigest()

    def get(self, key, default=None):
        return self.doc.get(key, default)

    # builders ---------------------------------------------------------------------

    def disks(self):
        from ..geometry import DiskRegion

        return [DiskRegion.exterior(_z(d["center"]), d["radius"]) if d.get("exterior")
                else DiskRegion.disk(_z(d["center"]), d["radius"]) for d in self.get("disks", [])]

    def disk_pairs(self, indices=None):
        """(center, radius) tuples of bounded disks."""
        ds = self.get("disks", [])
        idx = range(len(ds)) if indices is None else indices
        out = []
        for i in idx:
            if ds[i].get("exterior"):
                raise WorkbenchError("bounded disks", f"disk {i} is a disk exterior")
            out.append((_z(ds[i]["center"]), float(ds[i]["radius"])))
        return out

    def loops(self):
        from ..koebe import AnalyticLoop

        out = []
        for lp in self.get("loops", []):
            c = _z(lp["center"])
            if "radius" in lp:
                out.append(AnalyticLoop.circle(c, lp["radius"]))
            elif "ellipse" in lp:
                out.append(AnalyticLoop.ellipse(c, *lp["ellipse"]))
            else:
                a = np.asarray(lp["cos"], float)
                b = np.asarray(lp.get("sin", np.zeros(a.size)), float)
                out.append(AnalyticLoop(c, a, b))
        return out

    def continua(self):
        from ..geometry import ContinuumSample

        return [ContinuumSample(np.array([_z(p) for p in c["points"]]), c.get("closed", False))
                for c in self.get("continua", [])]

    def polygons(self):
        from ..modulus import PolygonShape

        return [PolygonShape(np.array([_z(p) for p in g["points"]]))
                for g in self.get("polygons", [])]

    def annuli(self, metric: str = "euclidean"):
        from ..annulus import Annulus

        return [Annulus(_z(a["center"]), a["r"], a["R"], metric) for a in self.get("annuli", [])]

    def resolve(self, ref: dict):
        (kind, i), = ref.items()
        if kind == "disk":
            return self.disks()[i]
        if kind == "polygon":
            return self.polygons()[i]
        if kind == "continuum":
            return self.continua()[i]
        return self.loops()[i]

    def families(self, metric: str = "euclidean"):
        """[(label, FamilySpec, gap or None)]: the preset sweep or the declared family."""
        from ..modulus import FamilySpec, narrow_passage

        preset = self.get("preset")
        if preset:
            gaps = preset.get("gaps", [0.1, 0.01, 0.001])
            h = preset.get("half_height", 0.3)
            return [(f"gap={g!r}", narrow_passage(g, h), g) for g in gaps]
        fam = self.get("family")
        if not fam:
            raise WorkbenchError("scene family", "the scene declares neither a family nor a preset")
        obstacles = [self.resolve(r) for r in fam.get("obstacles", [])]
        mode = fam.get("count_mode", "visit")
        if "annulus" in fam:
            A = self.annuli(metric)[fam["annulus"]]
            return [("annulus", FamilySpec.annulus(A, obstacles, mode), None)]
        dom = self.resolve(fam["domain"]) if "domain" in fam else None
        return [("family", FamilySpec.connecting(self.resolve(fam["E"]), self.resolve(fam["F"]),
                                                 dom, obstacles, mode), None)]

    def components(self):
        """Uniformization input: declared components, else all loops, else all disks."""
        comps = self.get("uniformize", {}).get("components")
        if comps:
            kinds = {next(iter(r)) for r in comps}
            if kinds == {"disk"}:
                return self.disk_pairs([r["disk"] for r in comps])
            if kinds == {"loop"}:
                loops = self.loops()
                return [loops[r["loop"]] for r in comps]
            from ..koebe import AnalyticLoop

            loops, disks = self.loops(), self.disk_pairs()
            return [loops[r["loop"]] if "loop" in r else AnalyticLoop.circle(*disks[r["disk"]])
                    for r in comps]
        if self.get("loops"):
            return self.loops()
        return self.disk_pairs()


def parse_scene(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkbenchError("scene JSON", str(e)) from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(map(str, e.absolute_path)) or "(root)"
        raise WorkbenchError("scene schema", f"{where}: {e.message}")
    _check_refs(doc)
    return Scene(doc, json.dumps(doc, sort_keys=True, separators=(",", ":")))


def load_scene(path: str | Path) -> Scene:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise WorkbenchError("scene file", str(e)) from None
    return parse_scene(text)


def empty_scene() -> Scene:
    return parse_scene(json.dumps({"version": SCENE_VERSION}))


__all__ = ["SCENE_VERSION", "SCHEMA", "Scene", "WorkbenchError", "empty_scene", "load_scene",
           "parse_scene"]
