"""Reading and writing fields, codes, graphs, trellises and construction specs.

Construction specs are JSON objects whose ``conv``, ``inner`` and ``graph``
entries are either inline objects or paths relative to the spec file::

    {"conv": "g.json",
     "inner": {"type": "parity"},
     "graph": {"type": "random", "n": 8, "delta": 5, "seed": 3}}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import ff
from .block import LinearBlockCode, full_space, repetition, single_parity_check
from .construction import ConstructionSpec
from .conv import ConvolutionalCode
from .errors import InputParseError, TrellexError
from .expander import BipartiteGraph, parse_graph, xg_complete, xg_random_regular
from .trellis import LabeledDigraph, parse_trellis


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def read_json(path) -> dict:
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise InputParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _wrap(fn, what: str):
    def inner(obj, *args):
        try:
            return fn(obj, *args)
        except TrellexError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputParseError(f"bad {what}: {exc}") from exc
    return inner


def _field(obj: dict) -> ff.FieldSpec:
    return ff.make_field(int(obj["p"]), int(obj.get("e", 1)), obj.get("modulus"))


def _block(obj: dict) -> LinearBlockCode:
    f = _field(obj["field"])
    return LinearBlockCode(f, np.array(obj["generator"], dtype=np.int64), distance=obj.get("distance"))


def _conv(obj: dict) -> ConvolutionalCode:
    f = _field(obj["field"])
    code = ConvolutionalCode.from_polys(f, obj["G"])
    for key in ("n", "k"):
        if key in obj and int(obj[key]) != getattr(code, key):
            raise InputParseError(f"declared {key}={obj[key]} but G gives {getattr(code, key)}")
    return code


field_from_json = _wrap(_field, "field spec")
block_from_json = _wrap(_block, "block code spec")
conv_from_json = _wrap(_conv, "generator spec")


def load_field(path) -> ff.FieldSpec:
    return field_from_json(read_json(path))


def load_block(path) -> LinearBlockCode:
    return block_from_json(read_json(path))


def load_conv(path) -> ConvolutionalCode:
    return conv_from_json(read_json(path))


def load_trellis(path) -> LabeledDigraph:
    return parse_trellis(read_text(path))


def load_graph(path) -> BipartiteGraph:
    return parse_graph(read_text(path))


def _resolve(entry, base: Path, loader):
    if isinstance(entry, str):
        return loader(base / entry)
    return None


def graph_from_entry(entry, base: Path, seed: int) -> BipartiteGraph:
    if isinstance(entry, str):
        return load_graph(base / entry)
    kind = entry.get("type")
    if kind == "complete":
        return xg_complete(int(entry["n"]))
    if kind == "random":
        return xg_random_regular(int(entry["n"]), int(entry["delta"]), int(entry.get("seed", seed)))
    if kind == "edges":
        return BipartiteGraph(int(entry["n"]), int(entry["delta"]),
                              [(s - 1, t - 1) for s, t in entry["edges"]])
    raise InputParseError(f"unknown graph type {kind!r}")


def inner_from_entry(entry, base: Path, field: ff.FieldSpec, delta: int) -> LinearBlockCode:
    if isinstance(entry, str):
        return load_block(base / entry)
    kind = entry.get("type", "generator")
    if kind == "parity":
        return single_parity_check(field, delta)
    if kind == "full":
        return full_space(field, delta)
    if kind == "repetition":
        return repetition(field, delta)
    return block_from_json(entry)


def construction_from_json(obj: dict, base: Path, seed: int = 7) -> tuple[ConstructionSpec, np.ndarray | None]:
    """Spec plus the optional injected G~_0 used by negative controls."""
    try:
        conv = _resolve(obj["conv"], base, load_conv) or conv_from_json(obj["conv"])
        graph = graph_from_entry(obj["graph"], base, seed)
        inner = inner_from_entry(obj.get("inner", {"type": "parity"}), base, conv.field, graph.delta)
        spec = ConstructionSpec(conv, inner, graph)
        override = obj.get("override_G0")
        return spec, None if override is None else np.array(override, dtype=np.int64)
    except TrellexError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise InputParseError(f"bad construction spec: {exc}") from exc


def load_construction(path, seed: int = 7):
    return construction_from_json(read_json(path), Path(path).parent, seed)
