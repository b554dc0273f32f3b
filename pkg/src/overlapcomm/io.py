"""Text formats for graphs, communities and configuration."""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .detector import DetectorParams
from .errors import FormatError, InvalidInputError
from .generator import GroundTruth, ModelParams
from .graph import Graph

_MODEL_FIELDS = {f.name for f in dataclasses.fields(ModelParams)}
_DETECTOR_FIELDS = {f.name for f in dataclasses.fields(DetectorParams)}
CONFIG_KEYS = frozenset(_MODEL_FIELDS | _DETECTOR_FIELDS)


# graphs -----------------------------------------------------------------

def format_graph(g: Graph) -> str:
    e = g.edges()
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in e.tolist())
    return "\n".join(lines) + "\n"


def parse_graph(text: str, source: str = "<graph>") -> Graph:
    """Read ``n m`` followed by ``m`` lines ``u v``.

    Duplicate edges, self-loops, out-of-range ids and a wrong edge count are
    errors. Edges may appear in any order and orientation.
    """
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{source}: empty graph file")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise FormatError(f"{source}:1: expected 'n m'") from None
    if n < 0 or m < 0:
        raise FormatError(f"{source}:1: negative count")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise FormatError(f"{source}: header declares {m} edges, found {len(body)}")
    edges = np.zeros((m, 2), dtype=np.int64)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"{source}:{i + 2}: expected 'u v'")
        try:
            edges[i] = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise FormatError(f"{source}:{i + 2}: non-integer node id") from None
    try:
        return Graph.from_edges(n, edges, strict=True)
    except InvalidInputError as exc:
        raise FormatError(f"{source}: {exc}") from None


def read_graph(path) -> Graph:
    return parse_graph(_read(path), str(path))


def write_graph(g: Graph, path) -> None:
    _write(path, format_graph(g))


# communities ------------------------------------------------------------

def format_communities(communities, affinities=None) -> str:
    out = []
    for i, c in enumerate(communities):
        line = " ".join(str(int(x)) for x in sorted(c))
        if affinities is not None:
            line += " | a=" + ",".join(repr(float(a)) for a in affinities[i])
        out.append(line)
    return "".join(line + "\n" for line in out)


def parse_communities(text: str, source: str = "<communities>"):
    """Return ``(communities, affinities or None)``; blank lines are skipped."""
    comms, affs = [], []
    any_aff = False
    for ln_no, ln in enumerate(text.splitlines(), 1):
        if not ln.strip():
            continue
        ids_part, _, extra = ln.partition("|")
        try:
            ids = [int(x) for x in ids_part.split()]
        except ValueError:
            raise FormatError(f"{source}:{ln_no}: non-integer node id") from None
        if not ids or len(set(ids)) != len(ids) or min(ids) < 0:
            raise FormatError(f"{source}:{ln_no}: community must list distinct ids >= 0")
        comms.append(tuple(sorted(ids)))
        a = None
        extra = extra.strip()
        if extra:
            if not extra.startswith("a="):
                raise FormatError(f"{source}:{ln_no}: expected '| a=<list>'")
            try:
                a = np.array([float(x) for x in extra[2:].split(",")])
            except ValueError:
                raise FormatError(f"{source}:{ln_no}: bad affinity list") from None
            if a.size != len(ids):
                raise FormatError(f"{source}:{ln_no}: {a.size} affinities for {len(ids)} nodes")
            # affinities follow the written order; realign to sorted ids
            a = a[np.argsort(ids, kind="stable")]
            any_aff = True
        affs.append(a)
    if any_aff and any(a is None for a in affs):
        raise FormatError(f"{source}: affinities given for some communities only")
    return comms, (affs if any_aff else None)


def read_communities(path):
    return parse_communities(_read(path), str(path))


def truth_from_file(path, model: str = "clique") -> GroundTruth:
    comms, affs = read_communities(path)
    if affs is None:
        affs = [np.ones(len(c)) for c in comms]
    return GroundTruth(comms, affs, model)


def write_truth(truth: GroundTruth, path) -> None:
    _write(path, format_communities(truth.communities, truth.affinities))


def read_found(path):
    """Candidate sets from a detection result JSON or a communities file."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
            return [tuple(c) for c in data["candidates"]]
        except (ValueError, KeyError, TypeError):
            raise FormatError(f"{path}: not a detection result") from None
    return parse_communities(text, str(path))[0]


# configuration --------------------------------------------------------------

def _value(raw: str, key: str, source: str, ln_no: int):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null", ""):
        return None
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"{source}:{ln_no}: bad value for {key}: {raw!r}") from None


def parse_config(text: str, source: str = "<config>") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for ln_no, ln in enumerate(text.splitlines(), 1):
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, raw = s.partition("=")
        key = key.strip()
        if not sep:
            raise FormatError(f"{source}:{ln_no}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise FormatError(f"{source}:{ln_no}: unknown key {key!r}")
        out[key] = _value(raw.strip(), key, source, ln_no)
    return out


def read_config(path: Optional[str]) -> dict:
    return {} if path is None else parse_config(_read(path), str(path))


def model_params(cfg: dict) -> ModelParams:
    return ModelParams(**{k: v for k, v in cfg.items() if k in _MODEL_FIELDS and v is not None})


def detector_params(cfg: dict) -> DetectorParams:
    return DetectorParams(**{k: v for k, v in cfg.items() if k in _DETECTOR_FIELDS})


# helpers --------------------------------------------------------------------

def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
