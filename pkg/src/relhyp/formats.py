"""Plain-text file formats, DOT export and JSON reports.

Graph files::

    # comment
    vertices 4
    edge 0 1
    edge 1 2
    mark 3 infinite
    mark 2 incomplete
    label 0 a2b

Cylinder / presentation bundles::

    family: Z
    alphabet: a b $
    special: $
    F: 0 1
    map: a a
    map: a $

Configurations are ``at <element> <letter>`` lines, cocycle dumps are
``h <vertex> <value>`` lines.  Letters that are tuples are written
``(x,y)`` and read back as tuples.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, Mapping

from .graphs import Graph
from .groups import Group, parse_family
from .sft import Alphabet, Configuration, Cylinder, Presentation, fmt_letter


class FormatError(ValueError):
    """A parse failure with its 1-based line number."""

    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield n, s


# ----------------------------------------------------------------------------
# graphs

def read_graph(text: str, name: str = "") -> Graph:
    n = None
    edges, infinite, incomplete, labels = [], set(), set(), {}

    def vert(tok, ln):
        try:
            v = int(tok)
        except ValueError:
            raise FormatError(ln, f"vertex {tok!r} is not an integer") from None
        if n is None:
            raise FormatError(ln, "'vertices n' header must come first")
        if not 0 <= v < n:
            raise FormatError(ln, f"vertex {v} out of range 0..{n - 1}")
        return v

    for ln, s in _lines(text):
        parts = s.split()
        kw = parts[0]
        if kw == "vertices":
            if n is not None:
                raise FormatError(ln, "duplicate 'vertices' header")
            if len(parts) != 2 or not parts[1].isdigit():
                raise FormatError(ln, "expected 'vertices <n>'")
            n = int(parts[1])
        elif kw == "edge":
            if len(parts) != 3:
                raise FormatError(ln, "expected 'edge <u> <v>'")
            u, v = vert(parts[1], ln), vert(parts[2], ln)
            if u == v:
                raise FormatError(ln, f"self-loop at {u}")
            edges.append((u, v))
        elif kw == "mark":
            if len(parts) != 3 or parts[2] not in ("infinite", "incomplete"):
                raise FormatError(ln, "expected 'mark <v> infinite|incomplete'")
            (infinite if parts[2] == "infinite" else incomplete).add(vert(parts[1], ln))
        elif kw == "label":
            if len(parts) != 3:
                raise FormatError(ln, "expected 'label <v> <text>'")
            labels[vert(parts[1], ln)] = parts[2]
        else:
            raise FormatError(ln, f"unknown keyword {kw!r}")
    if n is None:
        raise FormatError(1, "missing 'vertices n' header")
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
    return Graph(adj, labels, infinite, incomplete, name=name)


def write_graph(g: Graph, with_labels: bool = True) -> str:
    """Vertices are renumbered ``0..n-1`` in sorted order; labels keep the original names."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    space = getattr(g, "space", None)
    out = [f"vertices {len(g.vertices)}"]
    out += [f"edge {idx[u]} {idx[v]}" for u, v in g.edges()]
    out += [f"mark {idx[v]} infinite" for v in sorted(g.infinite)]
    out += [f"mark {idx[v]} incomplete" for v in sorted(g.incomplete - g.infinite)]
    if with_labels:
        for v in g.vertices:
            if v in g.labels:
                lab = g.labels[v]
                txt = space.format_label(lab) if space is not None and isinstance(lab, tuple) else str(lab)
                out.append(f"label {idx[v]} {txt}")
            elif idx[v] != v:
                out.append(f"label {idx[v]} {v}")
    return "\n".join(out) + "\n"


def _vname(g: Graph, v) -> str:
    space = getattr(g, "space", None)
    lab = g.labels.get(v)
    if lab is not None and space is not None and isinstance(lab, tuple):
        return space.format_label(lab)
    return str(lab if lab is not None else v)


def to_dot(g: Graph, highlight: Iterable = (), paths: Iterable = (), name: str = "G") -> str:
    """DOT source; ``highlight`` vertices are filled, ``paths`` (vertex lists) drawn bold."""
    hl = set(highlight)
    bold = set()
    for p in paths:
        for a, b in zip(p, p[1:]):
            bold.add((a, b) if a <= b else (b, a))
    out = [f"graph {json.dumps(name)} {{"]
    for v in g.vertices:
        attrs = [f"label={json.dumps(_vname(g, v))}"]
        if v in g.infinite:
            attrs.append("shape=doublecircle")
        elif v in g.incomplete:
            attrs.append("style=dashed")
        if v in hl:
            attrs.append("style=filled")
            attrs.append("fillcolor=lightblue")
        out.append(f"  {json.dumps(str(v))} [{', '.join(attrs)}];")
    for u, v in g.edges():
        attr = " [penwidth=3]" if (u, v) in bold else ""
        out.append(f"  {json.dumps(str(u))} -- {json.dumps(str(v))}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# letters

def parse_letter(tok: str):
    """Inverse of :func:`relhyp.sft.fmt_letter` for strings and nested tuples of strings."""
    tok = tok.strip()
    if not tok.startswith("("):
        return tok
    if not tok.endswith(")"):
        raise ValueError(f"unbalanced letter {tok!r}")
    items, depth, cur = [], 0, ""
    for ch in tok[1:-1]:
        if ch == "," and depth == 0:
            items.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    items.append(cur)
    return tuple(parse_letter(x) for x in items)


def _elem_tokens(group: Group, elems) -> str:
    return " ".join(group.format(x) for x in elems)


# ----------------------------------------------------------------------------
# cylinders, presentations, configurations

def write_presentation(p: Presentation, family_text: str | None = None) -> str:
    if p.cylinder.M is None:
        raise ValueError("cylinder given by a predicate cannot be written as a pattern list")
    fam = p.family
    out = [f"family: {family_text or fam.name}",
           "alphabet: " + " ".join(fmt_letter(a) for a in p.alphabet.letters)]
    if p.specials:
        out.append("special: " + " ".join(fmt_letter(a) for a in sorted(p.specials, key=p.alphabet.index)))
    out.append("F: " + _elem_tokens(fam, p.cylinder.F))
    for m in sorted(p.cylinder.M, key=lambda m: [p.alphabet.index(a) for a in m]):
        out.append("map: " + " ".join(fmt_letter(a) for a in m))
    return "\n".join(out) + "\n"


def write_cylinder(cyl: Cylinder, group: Group) -> str:
    if cyl.M is None:
        raise ValueError("cylinder given by a predicate cannot be written as a pattern list")
    out = ["F: " + _elem_tokens(group, cyl.F)]
    for m in sorted(cyl.M, key=lambda m: [fmt_letter(a) for a in m]):
        out.append("map: " + " ".join(fmt_letter(a) for a in m))
    return "\n".join(out) + "\n"


def read_presentation(text: str, family: Group | None = None, name: str = "") -> Presentation:
    """Read a presentation bundle; ``family:`` may be omitted when ``family`` is given.

    Without an ``alphabet:`` line the alphabet is the set of letters used in
    the maps, in order of first appearance.
    """
    fam, letters, specials, F, maps = family, None, None, None, []
    for ln, s in _lines(text):
        key, _, rest = s.partition(":")
        key, rest = key.strip(), rest.split()
        try:
            if key == "family":
                fam = parse_family(" ".join(rest))
            elif key == "alphabet":
                letters = tuple(parse_letter(t) for t in rest)
            elif key == "special":
                specials = frozenset(parse_letter(t) for t in rest)
            elif key == "F":
                if fam is None:
                    raise ValueError("'family:' must precede 'F:'")
                F = tuple(fam.parse(t) for t in rest)
            elif key == "map":
                if F is None:
                    raise ValueError("'F:' must precede 'map:'")
                m = tuple(parse_letter(t) for t in rest)
                if len(m) != len(F):
                    raise ValueError(f"map has {len(m)} letters, F has {len(F)} elements")
                maps.append(m)
            else:
                raise ValueError(f"unknown key {key!r}")
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(ln, str(exc)) from None
    if fam is None or F is None:
        raise FormatError(1, "bundle needs 'family:' and 'F:'")
    if letters is None:
        seen = {}
        for m in maps:
            for a in m:
                seen.setdefault(a, None)
        letters = tuple(seen)
    specials = specials if specials is not None else frozenset(a for a in letters if a == "$")
    return Presentation(fam, Alphabet(letters, specials), Cylinder(F, frozenset(maps)), name=name)


def write_configuration(cfg: Configuration, group: Group) -> str:
    keys = sorted(cfg.window, key=group.sort_key)
    return "".join(f"at {group.format(g)} {fmt_letter(cfg[g])}\n" for g in keys)


def read_configuration(text: str, group: Group) -> Configuration:
    out = {}
    for ln, s in _lines(text):
        parts = s.split()
        if len(parts) != 3 or parts[0] != "at":
            raise FormatError(ln, "expected 'at <element> <letter>'")
        try:
            g = group.parse(parts[1])
        except ValueError as exc:
            raise FormatError(ln, str(exc)) from None
        if g in out:
            raise FormatError(ln, f"element {parts[1]} assigned twice")
        out[g] = parse_letter(parts[2])
    return Configuration(out)


def write_cocycle(h: Mapping, name=str) -> str:
    items = sorted(h.items(), key=lambda kv: name(kv[0]))
    return "".join(f"h {name(v)} {x}\n" for v, x in items)


def read_cocycle(text: str, parse=int) -> dict:
    out = {}
    for ln, s in _lines(text):
        parts = s.split()
        if len(parts) != 3 or parts[0] != "h":
            raise FormatError(ln, "expected 'h <vertex> <value>'")
        try:
            out[parse(parts[1])] = int(parts[2])
        except ValueError as exc:
            raise FormatError(ln, str(exc)) from None
    return out


# ----------------------------------------------------------------------------
# reports

def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    if isinstance(x, float):
        return x
    return fmt_letter(x)


def to_json(report: Mapping) -> str:
    """Deterministic JSON: sorted keys, sets sorted, ``inf`` as a string."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def to_text(report: Mapping, indent: int = 0) -> str:
    pad = "  " * indent
    out = []
    for k in sorted(report):
        v = report[k]
        if isinstance(v, Mapping):
            out.append(f"{pad}{k}:")
            out.append(to_text(v, indent + 1).rstrip("\n"))
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], Mapping):
            out.append(f"{pad}{k}:")
            for item in v:
                out.append(to_text(item, indent + 1).rstrip("\n"))
                out.append(f"{pad}  -")
        else:
            out.append(f"{pad}{k}: {_text_value(v)}")
    return "\n".join(x for x in out if x) + "\n"


def _text_value(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text_value(x) for x in v) + "]"
    if isinstance(v, (set, frozenset)):
        return "{" + ", ".join(sorted(_text_value(x) for x in v)) + "}"
    if isinstance(v, (str, int, float, bool)) or v is None:
        return str(v)
    return fmt_letter(v)
