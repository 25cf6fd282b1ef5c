"""Text format for instances and solutions.

Documents are YAML mappings.  An instance carries ``problem``, ``vertices``,
``edges``, ``commodities``, ``target`` and, for RSPP_PL, ``path_length``.  A
solution carries only ``edges``.  Unknown keys are rejected so that typos do
not silently change the meaning of a file.
"""

from __future__ import annotations

from typing import Any, Iterable, Mapping

import yaml

from .errors import ParseError, ValidationError
from .graph_core import Digraph, Edge
from .instance_model import Commodity, Instance, Variant

INSTANCE_KEYS = {"problem", "vertices", "edges", "commodities", "target", "path_length"}
REQUIRED_KEYS = {"problem", "vertices", "edges", "commodities", "target"}
COMMODITY_KEYS = {"source", "destination", "path"}
SOLUTION_KEYS = {"edges"}


def _load(text: str) -> tuple[Any, yaml.Node | None]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark is not None else None
        raise ParseError(f"not valid YAML: {exc.problem}", line=line) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"not valid YAML: {exc}") from None
    return data, node


def _key_line(node: yaml.Node | None, key: str) -> int | None:
    if isinstance(node, yaml.MappingNode):
        for k, _ in node.value:
            if getattr(k, "value", None) == key:
                return k.start_mark.line + 1
    return None


class _Reader:
    """Field access with line-aware errors."""

    def __init__(self, data: Any, node: yaml.Node | None, allowed: set[str], required: set[str], what: str):
        if not isinstance(data, Mapping):
            raise ParseError(f"{what} document must be a mapping", line=1)
        self.data = data
        self.node = node
        for key in data:
            if not isinstance(key, str) or key not in allowed:
                raise ParseError(f"unknown field {key!r}", line=_key_line(node, str(key)), field=str(key))
        for key in sorted(required - set(data)):
            raise ParseError("missing required field", field=key)

    def fail(self, key: str, message: str, kind=ParseError):
        if kind is ParseError:
            raise ParseError(message, line=_key_line(self.node, key), field=key)
        line = _key_line(self.node, key)
        where = f" (line {line}, field {key!r})" if line else f" (field {key!r})"
        raise kind(message + where)


def _label(value: Any) -> str | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (str, int)):
        return str(value)
    return None


def _edge_list(reader: _Reader, key: str, index: Mapping[str, int]) -> list[Edge]:
    raw = reader.data.get(key)
    if not isinstance(raw, list):
        reader.fail(key, "expected a list of [from, to] pairs")
    edges: list[Edge] = []
    for item in raw:
        if not isinstance(item, list) or len(item) != 2:
            reader.fail(key, f"edge entry {item!r} is not a [from, to] pair")
        a, b = _label(item[0]), _label(item[1])
        if a is None or b is None:
            reader.fail(key, f"edge entry {item!r} has a non-scalar endpoint")
        if a not in index or b not in index:
            reader.fail(key, f"edge {item!r} names an unknown vertex", ValidationError)
        edges.append((index[a], index[b]))
    if len(set(edges)) != len(edges):
        reader.fail(key, "duplicate edge", ValidationError)
    return edges


def parse_instance(text: str) -> Instance:
    data, node = _load(text)
    r = _Reader(data, node, INSTANCE_KEYS, REQUIRED_KEYS, "instance")

    try:
        variant = Variant(data["problem"])
    except (ValueError, TypeError):
        r.fail("problem", f"problem must be one of {[v.value for v in Variant]}")

    raw_vertices = data["vertices"]
    if not isinstance(raw_vertices, list):
        r.fail("vertices", "expected a list of labels")
    labels = [_label(v) for v in raw_vertices]
    if any(lab is None for lab in labels):
        r.fail("vertices", "labels must be strings or integers")
    if len(set(labels)) != len(labels):
        r.fail("vertices", "duplicate vertex label", ValidationError)
    index = {lab: i for i, lab in enumerate(labels)}

    edges = _edge_list(r, "edges", index)
    try:
        graph = Digraph.from_edges(len(labels), edges, labels)
    except ValidationError as exc:
        r.fail("edges", str(exc), ValidationError)

    target = data["target"]
    if isinstance(target, bool) or not isinstance(target, int):
        r.fail("target", "target must be an integer")
    if target < 0:
        r.fail("target", "target must be non-negative", ValidationError)

    path_length = data.get("path_length")
    if path_length is not None and (isinstance(path_length, bool) or not isinstance(path_length, int)):
        r.fail("path_length", "path_length must be an integer")

    raw_comms = data["commodities"]
    if not isinstance(raw_comms, list):
        r.fail("commodities", "expected a list of commodities")
    commodities = []
    for i, item in enumerate(raw_comms):
        if not isinstance(item, Mapping):
            r.fail("commodities", f"commodity {i} is not a mapping")
        extra = set(map(str, item)) - COMMODITY_KEYS
        if extra:
            r.fail("commodities", f"commodity {i} has unknown field(s) {sorted(extra)}")
        if "source" not in item or "destination" not in item:
            r.fail("commodities", f"commodity {i} needs source and destination")
        s, t = _label(item["source"]), _label(item["destination"])
        if s is None or t is None:
            r.fail("commodities", f"commodity {i} has a non-scalar endpoint")
        if s not in index or t not in index:
            r.fail("commodities", f"commodity {i} names an unknown vertex", ValidationError)
        route = None
        if item.get("path") is not None:
            raw_path = item["path"]
            if not isinstance(raw_path, list) or any(_label(v) is None for v in raw_path):
                r.fail("commodities", f"commodity {i} path must be a list of labels")
            names = [_label(v) for v in raw_path]
            if any(v not in index for v in names):
                r.fail("commodities", f"commodity {i} path names an unknown vertex", ValidationError)
            route = tuple(index[v] for v in names)
        try:
            commodities.append(Commodity(index[s], index[t], route))
        except ValidationError as exc:
            r.fail("commodities", f"commodity {i}: {exc}", ValidationError)

    try:
        return Instance(variant, graph, tuple(commodities), target, path_length)
    except ValidationError as exc:
        raise ValidationError(str(exc)) from None


def _header_lines(header: Mapping[str, Any] | Iterable[str] | None) -> list[str]:
    if not header:
        return []
    if isinstance(header, Mapping):
        items = [f"{k}: {v}" for k, v in header.items()]
    else:
        items = list(header)
    return [f"# {line}" for line in items]


def dump_instance(instance: Instance, header=None) -> str:
    g = instance.graph
    lab = g.labels
    doc: dict[str, Any] = {
        "problem": instance.variant.value,
        "vertices": list(lab),
        "edges": [[lab[u], lab[v]] for u, v in sorted(g.edges)],
        "commodities": [],
        "target": instance.target,
    }
    for c in instance.commodities:
        entry: dict[str, Any] = {"source": lab[c.source], "destination": lab[c.destination]}
        if c.route is not None:
            entry["path"] = [lab[v] for v in c.route]
        doc["commodities"].append(entry)
    if instance.path_length is not None:
        doc["path_length"] = instance.path_length
    body = yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, allow_unicode=True, width=100)
    return "\n".join(_header_lines(header) + [body])


def parse_solution(text: str, instance: Instance) -> Digraph:
    data, node = _load(text)
    r = _Reader(data, node, SOLUTION_KEYS, SOLUTION_KEYS, "solution")
    index = {lab: i for i, lab in enumerate(instance.graph.labels)}
    edges = _edge_list(r, "edges", index)
    try:
        return instance.graph.with_edges(edges)
    except ValidationError as exc:
        r.fail("edges", str(exc), ValidationError)


def dump_solution(instance: Instance, h: Digraph | Iterable[Edge], header=None) -> str:
    lab = instance.graph.labels
    edges = sorted(h.edges if isinstance(h, Digraph) else h)
    body = yaml.safe_dump({"edges": [[lab[u], lab[v]] for u, v in edges]}, default_flow_style=None, width=100)
    return "\n".join(_header_lines(header) + [body])


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_instance(path, instance: Instance, header=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_instance(instance, header))


def parse_decomposition(text: str, instance: Instance):
    """A tree decomposition given as ``bags`` (label lists) and ``edges`` (bag index pairs).

    The result is converted to nice form and checked against the instance's
    underlying graph.
    """
    from .treedec import check_nice, nice_from_bags

    data, node = _load(text)
    r = _Reader(data, node, {"bags", "edges"}, {"bags"}, "decomposition")
    index = {lab: i for i, lab in enumerate(instance.graph.labels)}
    bags = []
    if not isinstance(data["bags"], list):
        r.fail("bags", "bags must be a list of vertex lists")
    for bag in data["bags"]:
        if not isinstance(bag, list) or any(_label(v) not in index for v in bag):
            r.fail("bags", f"bad bag {bag!r}")
        bags.append(frozenset(index[_label(v)] for v in bag))
    tree = data.get("edges") or []
    if not isinstance(tree, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and 0 <= x < len(bags) for x in e) for e in tree
    ):
        r.fail("edges", "edges must be pairs of bag indices")
    td = nice_from_bags(bags, [tuple(e) for e in tree])
    problems = check_nice(td, instance.graph)
    if problems:
        raise ValidationError("decomposition invalid: " + "; ".join(problems[:3]))
    return td
