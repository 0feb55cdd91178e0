"""Line-delimited JSON archive of instance records.

One record per line. Known fields are written in a fixed order; unknown keys
are carried through untouched. Appends write each line with a single
``write`` on an ``O_APPEND`` descriptor under an exclusive lock, so concurrent
writers never interleave partial lines.
"""
from __future__ import annotations

import fcntl
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Iterable

from .errors import FormatError
from .features import FEATURE_NAMES, FeatureVector
from .graph import Graph

FITNESS_TOL = 1e-9


def instance_id(g: Graph) -> str:
    """Stable 64-bit content hash of the bitvector, as 16 hex digits."""
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{g.n}:".encode())
    h.update(g.key)
    return h.hexdigest()


@dataclass
class InstanceRecord:
    id: str
    n: int
    edge_hex: str
    provenance: dict
    fitness: float | None = None
    t_exact: float | None = None
    t_heuristic: float | None = None
    hcn_exact: int | None = None
    hcn_heuristic: int | None = None
    features: list[float] | None = None
    px: float | None = None
    py: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_graph(cls, g: Graph, provenance: dict, **kw) -> "InstanceRecord":
        return cls(id=instance_id(g), n=g.n, edge_hex=g.to_hex(), provenance=dict(provenance), **kw)

    def graph(self) -> Graph:
        return Graph.from_hex(self.n, self.edge_hex)

    def feature_vector(self) -> FeatureVector | None:
        return None if self.features is None else FeatureVector.from_sequence(self.features)

    @property
    def runtime_diff(self) -> float | None:
        if self.t_exact is not None and self.t_heuristic is not None:
            return self.t_heuristic - self.t_exact
        return self.fitness

    def with_runtimes(self, t_exact: float, t_heuristic: float, hcn_exact: int, hcn_heuristic: int) -> "InstanceRecord":
        return replace(
            self,
            t_exact=float(t_exact),
            t_heuristic=float(t_heuristic),
            hcn_exact=int(hcn_exact),
            hcn_heuristic=int(hcn_heuristic),
            fitness=float(t_heuristic) - float(t_exact),
        )

    def validate(self) -> None:
        try:
            g = self.graph()
        except ValueError as exc:
            raise FormatError(f"bad edge_hex: {exc}") from None
        if instance_id(g) != self.id:
            raise FormatError(f"id {self.id} does not match edge_hex (expected {instance_id(g)})")
        if not isinstance(self.provenance, dict) or "kind" not in self.provenance:
            raise FormatError("provenance must be an object with a 'kind'")
        for name in ("fitness", "t_exact", "t_heuristic", "px", "py"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, (int, float)) or not math.isfinite(v)):
                raise FormatError(f"{name} must be a finite number")
        for name in ("t_exact", "t_heuristic"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise FormatError(f"{name} must be non-negative")
        if None not in (self.fitness, self.t_exact, self.t_heuristic):
            if abs(self.fitness - (self.t_heuristic - self.t_exact)) > FITNESS_TOL:
                raise FormatError(
                    f"fitness {self.fitness} != t_heuristic - t_exact = {self.t_heuristic - self.t_exact}"
                )
        for name in ("hcn_exact", "hcn_heuristic"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= self.n):
                raise FormatError(f"{name} must be an integer in [0, n]")
        if self.hcn_exact is not None and self.hcn_heuristic is not None and self.hcn_heuristic < self.hcn_exact:
            raise FormatError("heuristic completion number below the exact optimum")
        if self.features is not None:
            if len(self.features) != len(FEATURE_NAMES) or not all(
                isinstance(v, (int, float)) and math.isfinite(v) for v in self.features
            ):
                raise FormatError(f"features must be {len(FEATURE_NAMES)} finite numbers")
        if (self.px is None) != (self.py is None):
            raise FormatError("px and py must be both present or both absent")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "extra":
                continue
            v = getattr(self, f.name)
            if v is not None:
                out[f.name] = v
        for k in sorted(self.extra):
            out.setdefault(k, self.extra[k])
        return out

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "InstanceRecord":
        if not isinstance(doc, dict):
            raise FormatError("record must be a JSON object")
        known = {f.name for f in fields(cls)} - {"extra"}
        missing = [k for k in ("id", "n", "edge_hex", "provenance") if k not in doc]
        if missing:
            raise FormatError(f"missing field(s): {', '.join(missing)}")
        kw = {k: doc[k] for k in known if k in doc}
        if not isinstance(kw["n"], int) or isinstance(kw["n"], bool):
            raise FormatError("n must be an integer")
        if kw.get("features") is not None and not isinstance(kw["features"], list):
            raise FormatError("features must be a list")
        rec = cls(**kw, extra={k: v for k, v in doc.items() if k not in known})
        rec.validate()
        return rec


def parse_line(line: str, lineno: int) -> InstanceRecord:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {lineno}: malformed JSON ({exc.msg})") from None
    try:
        return InstanceRecord.from_dict(doc)
    except FormatError as exc:
        raise FormatError(f"line {lineno}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"line {lineno}: invalid record ({exc})") from None


def iter_records(stream: IO[str]) -> Iterable[InstanceRecord]:
    for lineno, line in enumerate(stream, start=1):
        if line.strip():
            yield parse_line(line, lineno)


def read_archive(path: str | os.PathLike | None) -> list[InstanceRecord]:
    """Read every record; ``None`` or ``'-'`` reads stdin."""
    if path is None or str(path) == "-":
        return list(iter_records(sys.stdin))
    with open(path, encoding="utf-8") as fh:
        return list(iter_records(fh))


def append_records(path: str | os.PathLike, records: Iterable[InstanceRecord]) -> int:
    fd = os.open(os.fspath(path), os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
    count = 0
    try:
        fcntl.flock(fd, fcntl.LOCK_EX)
        try:
            for r in records:
                data = r.to_line().encode()
                if os.write(fd, data) != len(data):
                    raise OSError("short write while appending record")
                count += 1
        finally:
            fcntl.flock(fd, fcntl.LOCK_UN)
    finally:
        os.close(fd)
    return count


def write_archive(path: str | os.PathLike | None, records: Iterable[InstanceRecord]) -> int:
    """Replace the archive at `path` atomically (``None`` or ``'-'`` writes stdout)."""
    lines = [r.to_line() for r in records]
    if path is None or str(path) == "-":
        sys.stdout.write("".join(lines))
        sys.stdout.flush()
        return len(lines)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("".join(lines), encoding="utf-8")
    os.replace(tmp, path)
    return len(lines)
