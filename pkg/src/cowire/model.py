"""Shared wireframe document: vertices, edges, faces, and its JSON file format.

File schema (UTF-8 JSON, units meters, ids dense from 0):

    {"vertices": [{"id": 0, "pos": [x, y, z]}, ...],
     "edges": [[a, b], ...],
     "faces": [[a, b, c, ...], ...]}
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Vec3


class ModelError(ValueError):
    """Invalid wireframe structure or file contents."""


@dataclass
class WireframeModel:
    vertices: dict[int, Vec3]
    edges: list[tuple[int, int]] = field(default_factory=list)
    faces: list[tuple[int, ...]] = field(default_factory=list)

    def validate(self) -> None:
        ids = set(self.vertices)
        if ids != set(range(len(ids))):
            raise ModelError("vertex ids must be dense from 0")
        for i, p in self.vertices.items():
            if not p.is_finite():
                raise ModelError(f"vertex {i} has non-finite position")
        for a, b in self.edges:
            if a not in ids or b not in ids:
                raise ModelError(f"edge ({a}, {b}) references a missing vertex")
            if self.vertices[a].distance(self.vertices[b]) == 0.0:
                raise ModelError(f"edge ({a}, {b}) has zero length")
        for face in self.faces:
            for v in face:
                if v not in ids:
                    raise ModelError(f"face {face} references missing vertex {v}")

    def copy(self) -> "WireframeModel":
        return WireframeModel(dict(self.vertices), list(self.edges), list(self.faces))

    def state_hash(self) -> str:
        """SHA-256 over the exact bit patterns of all positions, sorted by id."""
        h = hashlib.sha256()
        for i in sorted(self.vertices):
            p = self.vertices[i]
            h.update(struct.pack("<qddd", i, p.x, p.y, p.z))
        return h.hexdigest()

    def to_obj(self) -> dict:
        return {
            "vertices": [
                {"id": i, "pos": [p.x, p.y, p.z]} for i, p in sorted(self.vertices.items())
            ],
            "edges": [list(e) for e in self.edges],
            "faces": [list(f) for f in self.faces],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "WireframeModel":
        try:
            vertices: dict[int, Vec3] = {}
            for entry in obj["vertices"]:
                i = entry["id"]
                x, y, z = entry["pos"]
                if not isinstance(i, int) or i in vertices:
                    raise ModelError(f"bad or duplicate vertex id {i!r}")
                if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in (x, y, z)):
                    raise ModelError(f"vertex {i} position must be three finite numbers")
                vertices[i] = Vec3(float(x), float(y), float(z))
            edges = [(int(a), int(b)) for a, b in obj.get("edges", [])]
            faces = [tuple(int(v) for v in f) for f in obj.get("faces", [])]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"malformed model object: {exc}") from exc
        model = cls(vertices, edges, faces)
        model.validate()
        return model

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_obj(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "WireframeModel":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_obj(obj)
