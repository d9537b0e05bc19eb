"""Command-line front end: ``relhyp <module> <op> [flags]``.

Every leaf command builds a report dictionary and prints it as text, JSON or
(for graph-shaped results) DOT.  A TOML manifest supplies defaults for any
flag; flags given on the command line win.  Exit status: 0 success, 1 a
check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

from . import boundary as bd
from . import formats as fmt
from .cocycles import busemann_cocycle, gradient_lines, radial_cocycle, restrict, verify_cocycle_axioms
from .geometry import (angle, circuit_angle_bound_check, circuits_through, check_large_angle_triangle, cone,
                       fineness_certificate, large_angle_sweep, path_max_angle, visibility_ray)
from .graphs import (INF, Graph, ResourceError, build_cayley_ball, build_coned_cayley_ball, build_test_graph,
                     delta_estimate, distance, geodesics, gromov_product)
from .groups import Cyclic, Integers, Lattice, TableGroup, parse_family
from .presentations import (artificial_even_presentation, check_generation, dihedral_extension,
                            finite_group_presentation, finite_index_presentation, lattice_extension,
                            multiples_cosets, poly_hyperbolic_compose, product_presentation)
from .sft import (BudgetExceeded, Configuration, PresentationViolation, act, enumerate_admissible, fmt_letter,
                  interval, is_locally_admissible, pi_window, special_symbol_count, translate_union,
                  uniqueness_sweep, z_example_subshift)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# presets

def _z2():
    z = z_example_subshift()
    return product_presentation(z, z, lattice_extension(2))


def _z3():
    z = z_example_subshift()
    return poly_hyperbolic_compose([z, (z, lattice_extension(2)), (z, lattice_extension(3))])


def _dihedral():
    return product_presentation(z_example_subshift(), finite_group_presentation(Cyclic(2)), dihedral_extension())


PRESETS: dict[str, Callable] = {
    "z-example": z_example_subshift,
    "artificial": artificial_even_presentation,
    "z2": _z2,
    "z3": _z3,
    "dihedral": _dihedral,
    "2z": lambda: finite_index_presentation(z_example_subshift(), multiples_cosets(2)),
    "2z-literal": lambda: finite_index_presentation(z_example_subshift(), multiples_cosets(2), literal=True),
    "c2": lambda: finite_group_presentation(Cyclic(2)),
    "c3": lambda: finite_group_presentation(Cyclic(3)),
    "hyperbolic-z": lambda: bd.hyperbolic_presentation("Z"),
}


def load_presentation(a):
    if a.bundle:
        return fmt.read_presentation(_read(a.bundle), name=Path(a.bundle).stem)
    name = a.preset or "z-example"
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return PRESETS[name]()


# ----------------------------------------------------------------------------
# argument parsing helpers

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(a) -> Graph:
    spec = a.graph or "cycle5"
    if os.path.exists(spec):
        return fmt.read_graph(_read(spec), name=Path(spec).stem)
    radius = 2 if a.radius is None else a.radius
    if "*" in spec:
        return build_coned_cayley_ball(spec, radius)
    try:
        return build_test_graph(spec)
    except ValueError:
        pass
    try:
        fam = parse_family(spec)
    except ValueError:
        raise UsageError(f"graph {spec!r} is neither a file, a test family nor a group family") from None
    return build_cayley_ball(fam, radius)


def vertex(g: Graph, tok: str):
    tok = str(tok).strip()
    space = getattr(g, "space", None)
    if space is not None:
        try:
            return g.vertex_of(space.parse_label(tok))
        except (ValueError, KeyError):
            raise UsageError(f"{tok!r} is not a vertex of {g.name}") from None
    for cand in (_int(tok), tok):
        if cand is not None and g.has_vertex(cand):
            return cand
        if cand is not None and g.labels and g.has_label(cand):
            return g.vertex_of(cand)
    raise UsageError(f"{tok!r} is not a vertex of {g.name or 'the graph'}")


def _int(tok: str):
    try:
        return int(tok)
    except ValueError:
        return None


def edge(g: Graph, tok: str) -> tuple:
    """``u-v`` (or ``u/v``); every split point is tried so labels may contain ``-``."""
    tok = str(tok).strip()
    if "/" in tok:
        u, v = tok.split("/", 1)
        return vertex(g, u), vertex(g, v)
    for i, ch in enumerate(tok):
        if ch != "-" or i == 0:
            continue
        try:
            u, v = vertex(g, tok[:i]), vertex(g, tok[i + 1:])
        except UsageError:
            continue
        if g.has_edge(u, v):
            return u, v
    raise UsageError(f"{tok!r} is not an edge")


def vertex_list(g: Graph, text: str) -> list:
    return [vertex(g, t) for t in _split(text)]


def _split(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(t) for t in text]
    text = str(text)
    sep = ";" if ";" in text else ("," if "," in text and not text.count("(") else None)
    parts = text.split(sep) if sep else text.split()
    return [p.strip() for p in parts if p.strip()]


def name_of(g: Graph) -> Callable:
    space = getattr(g, "space", None)
    if space is None:
        return str
    return lambda v: space.format_label(g.labels[v])


def theta_value(x):
    if x is None:
        return None
    if isinstance(x, str) and x.lower() in ("inf", "oo"):
        return INF
    return int(x)


def window_of(family, spec) -> list:
    """``n`` (an interval on Z, an n x n box on Z^2, a ball elsewhere), ``AxB`` or explicit elements."""
    if spec is None:
        spec = "5"
    spec = str(spec).strip()
    if spec.isdigit():
        n = int(spec)
        if isinstance(family, Integers):
            return interval(n)
        if isinstance(family, Lattice) and family.n == 2:
            return [(i, j) for i in range(n) for j in range(n)]
        return list(family.ball(n))
    if "x" in spec and isinstance(family, Lattice):
        dims = [int(t) for t in spec.split("x")]
        if len(dims) != family.n:
            raise UsageError(f"window {spec!r} needs {family.n} dimensions")
        out = [()]
        for d in dims:
            out = [x + (i,) for x in out for i in range(d)]
        return out
    try:
        return [family.parse(t) for t in _split(spec.replace(" ", ";") if ";" not in spec else spec)]
    except ValueError as exc:
        raise UsageError(f"bad window {spec!r}: {exc}") from None


def configuration(a, pres) -> Configuration:
    fam = pres.family
    if a.config:
        return fmt.read_configuration(_read(a.config), fam)
    if a.word is not None:
        if not isinstance(fam, Integers):
            raise UsageError("--word only applies to presentations over Z")
        start = a.start or 0
        return Configuration({start + i: ch for i, ch in enumerate(a.word)})
    raise UsageError("give --config FILE or --word")


def _fmt_cfg(cfg: Configuration, fam) -> dict:
    return {fam.format(g): fmt_letter(cfg[g]) for g in sorted(cfg.window, key=fam.sort_key)}


# ----------------------------------------------------------------------------
# graph commands

def cmd_graph_build(a):
    g = load_graph(a)
    rep = {"name": g.name, "vertices": len(g), "edges": len(g.edges()), "infinite": len(g.infinite),
           "incomplete": len(g.incomplete), "file": fmt.write_graph(g)}
    return rep, True, {"graph": g, "text": rep["file"]}


def cmd_graph_distance(a):
    g = load_graph(a)
    u, v = vertex(g, a.u), vertex(g, a.v)
    return {"u": a.u, "v": a.v, "distance": distance(g, u, v)}, True, None


def cmd_graph_geodesics(a):
    g = load_graph(a)
    u, v = vertex(g, a.u), vertex(g, a.v)
    nm = name_of(g)
    paths = geodesics(g, u, v, cap=a.cap or 1000)
    return ({"u": a.u, "v": a.v, "count": len(paths), "geodesics": [[nm(x) for x in p] for p in paths]}, True,
            {"graph": g, "paths": paths, "highlight": [u, v]})


def cmd_graph_gromov(a):
    g = load_graph(a)
    x, y, w = vertex(g, a.x), vertex(g, a.y), vertex(g, a.w)
    return {"x": a.x, "y": a.y, "w": a.w, "gromov_product": gromov_product(g, x, y, w)}, True, None


def cmd_graph_delta(a):
    g = load_graph(a)
    est = delta_estimate(g, seed=a.seed or 0)
    nm = name_of(g)
    wit = [nm(v) for v in est.witness] if est.witness else None
    return {"graph": g.name, "delta": est.value, "exact": est.exact, "witness": wit}, True, None


# ----------------------------------------------------------------------------
# geometry commands

def cmd_geometry_angle(a):
    g = load_graph(a)
    v = vertex(g, a.vertex)
    return {"vertex": a.vertex, "e1": a.e1, "e2": a.e2, "angle": angle(g, v, edge(g, a.e1), edge(g, a.e2))}, True, None


def cmd_geometry_maxang(a):
    g = load_graph(a)
    path = vertex_list(g, a.path)
    return {"path": _split(a.path), "max_angle": path_max_angle(g, path)}, True, None


def cmd_geometry_circuits(a):
    g = load_graph(a)
    nm = name_of(g)
    cs = circuits_through(g, edge(g, a.edge), a.length)
    return ({"edge": a.edge, "L": a.length, "count": len(cs), "circuits": [[nm(x) for x in c] for c in cs]}, True,
            None)


def cmd_geometry_fineness(a):
    g = load_graph(a)
    nm = name_of(g)
    cert = fineness_certificate(g, a.length)
    counts = {f"{nm(u)}-{nm(v)}": n for (u, v), n in cert.counts.items()}
    return {"L": a.length, "max": cert.max, "counts": counts}, True, None


def cmd_geometry_circuit_check(a):
    g = load_graph(a)
    rep = circuit_angle_bound_check(g, a.length)
    return ({"L": a.length, "checked": rep.checked, "tight": rep.tight, "violations": len(rep.violations),
             "ok": rep.ok}, rep.ok, None)


def cmd_geometry_cone(a):
    g = load_graph(a)
    v = vertex(g, a.vertex)
    th = theta_value(a.theta)
    c = cone(g, edge(g, a.edge), v, a.d, INF if th is None else th)
    nm = name_of(g)
    members = sorted(nm(x) for x in c.members)
    return ({"edge": a.edge, "vertex": a.vertex, "d": a.d, "theta": c.angle_bound, "size": len(c),
             "members": members}, True, {"graph": g, "highlight": sorted(c.members, key=repr)})


def _delta(a, g) -> float:
    return float(a.delta) if a.delta is not None else float(delta_estimate(g, seed=a.seed or 0).value)


def cmd_geometry_triangle(a):
    g = load_graph(a)
    x, y, z = vertex(g, a.x), vertex(g, a.y), vertex(g, a.z)
    rep = check_large_angle_triangle(g, x, y, z, _delta(a, g), a.factor)
    out = {"angle": rep.angle, "threshold": rep.threshold, "applicable": rep.applicable,
           "concatenation_geodesic": rep.concatenation_geodesic, "x_on_every_geodesic": rep.x_on_every_geodesic,
           "angle_bound_holds": rep.angle_bound_holds, "ok": rep.ok}
    return out, rep.ok, None


def cmd_geometry_sweep(a):
    g = load_graph(a)
    rep = large_angle_sweep(g, _delta(a, g), a.factor)
    return ({"delta": rep.delta, "threshold": rep.threshold, "qualifying": rep.qualifying,
             "violations": len(rep.violations), "ok": rep.ok}, rep.ok, None)


def cmd_geometry_visibility(a):
    g = load_graph(a)
    nm = name_of(g)
    if a.targets is None:
        raise UsageError("give --targets")
    if a.base is not None:
        base = vertex(g, a.base)
    elif getattr(g, "space", None) is not None:
        base = g.vertex_of(("e", g.space.family.identity))
    else:
        base = g.vertices[0]
    res = visibility_ray(g, vertex_list(g, a.targets), base)
    pre = None if res.prefix is None else [nm(v) for v in res.prefix]
    return {"determined": res.determined, "prefix": pre, "witnesses": res.witnesses}, True, None


# ----------------------------------------------------------------------------
# cocycle commands

def _cocycle(a, g):
    if a.center is not None:
        return radial_cocycle(g, vertex(g, a.center))
    if a.ray is not None:
        return busemann_cocycle(g, vertex_list(g, a.ray), a.horizon)
    raise UsageError("give --center or --ray")


def _cocycle_report(c, g) -> dict:
    nm = name_of(g)
    return {"flavor": c.flavor, "stabilized": c.stabilized, "horizon": c.horizon,
            "potential": {nm(v): x for v, x in sorted(c.h.items(), key=lambda kv: repr(kv[0]))}}


def cmd_cocycle_radial(a):
    g = load_graph(a)
    if a.center is None:
        raise UsageError("radial needs --center")
    c = radial_cocycle(g, vertex(g, a.center))
    return _cocycle_report(c, g), True, None


def cmd_cocycle_busemann(a):
    g = load_graph(a)
    if a.ray is None:
        raise UsageError("busemann needs --ray")
    c = busemann_cocycle(g, vertex_list(g, a.ray), a.horizon)
    return _cocycle_report(c, g), c.stabilized, None


def cmd_cocycle_gradient(a):
    g = load_graph(a)
    c = _cocycle(a, g)
    nm = name_of(g)
    lines = gradient_lines(g, c, vertex(g, a.start), cap=a.cap or 64)
    rep = {"start": a.start, "count": len(lines),
           "lines": [{"vertices": [nm(v) for v in ln.vertices], "terminal": ln.terminal} for ln in lines]}
    return rep, True, {"graph": g, "paths": [ln.vertices for ln in lines]}


def cmd_cocycle_axioms(a):
    g = load_graph(a)
    c = _cocycle(a, g)
    th = theta_value(a.theta)
    rep = verify_cocycle_axioms(g, c, 3 if th is None else th, samples=a.samples, seed=a.seed or 0)
    out = {"integral": rep.integral, "cocycle": rep.cocycle, "extension": rep.extension, "exits": rep.exits,
           "counts": rep.counts, "ok": rep.ok}
    return out, rep.ok, None


def cmd_cocycle_restrict(a):
    g = load_graph(a)
    c = _cocycle(a, g)
    nm = name_of(g)
    region = vertex_list(g, a.region)
    letter = restrict(c, region, key=repr)
    return {"domain": [nm(v) for v in letter.domain], "letter": letter.serialize()}, True, None


# ----------------------------------------------------------------------------
# sft commands

def cmd_sft_enum(a):
    p = load_presentation(a)
    win = window_of(p.family, a.window)
    cfgs = enumerate_admissible(p.cylinder, p.family, win, p.alphabet)
    fam = p.family
    keys = sorted(win, key=fam.sort_key)
    if isinstance(fam, Integers):
        listing = ["".join(fmt_letter(c[g]) for g in keys) for c in cfgs]
    else:
        listing = [_fmt_cfg(c, fam) for c in cfgs]
    return {"presentation": p.name, "window": len(keys), "count": len(cfgs), "configurations": listing}, True, None


def cmd_sft_check(a):
    p = load_presentation(a)
    cfg = configuration(a, p)
    alpha = all(x in p.alphabet for x in cfg.assignment.values())
    ok = alpha and is_locally_admissible(p.cylinder, p.family, cfg)
    return {"presentation": p.name, "letters_in_alphabet": alpha, "admissible": ok}, ok, None


def cmd_sft_act(a):
    p = load_presentation(a)
    cfg = configuration(a, p)
    gamma = p.family.parse(str(a.gamma))
    out = act(p.family, gamma, cfg)
    return {"gamma": p.family.format(gamma), "configuration": _fmt_cfg(out, p.family)}, True, None


def cmd_sft_count_special(a):
    p = load_presentation(a)
    cfg = configuration(a, p)
    specials = frozenset(fmt.parse_letter(t) for t in _split(a.special)) if a.special else p.specials
    return {"count": special_symbol_count(cfg, specials)}, True, None


def cmd_sft_pi(a):
    p = load_presentation(a)
    cfg = configuration(a, p)
    try:
        x = pi_window(p, cfg)
    except PresentationViolation as exc:
        return {"pi": None, "violation": str(exc)}, False, None
    return {"pi": x if isinstance(x, str) else p.family.format(x)}, True, None


def cmd_sft_show(a):
    p = load_presentation(a)
    out = {"name": p.name, "family": p.family.name, "alphabet": len(p.alphabet),
           "specials": sorted(fmt_letter(s) for s in p.specials), "F": [p.family.format(f) for f in p.cylinder.F],
           "patterns": None if p.cylinder.M is None else len(p.cylinder.M)}
    if p.cylinder.M is not None:
        out["bundle"] = fmt.write_presentation(p)
    return out, True, None


def cmd_sft_sweep(a):
    p = load_presentation(a)
    fam = p.family
    top = int(a.radius or 3)
    wins = [translate_union(p.cylinder, fam, fam.ball(r)) for r in range(top + 1)]
    rep = uniqueness_sweep(p, wins)
    return {"windows": len(wins), "configurations": rep.configurations, "double_special": len(rep.violations),
            "ok": rep.ok}, rep.ok, None


# ----------------------------------------------------------------------------
# presentation commands

def _pres_summary(p) -> dict:
    return {"name": p.name, "family": p.family.name, "alphabet": len(p.alphabet),
            "F": [p.family.format(f) for f in p.cylinder.F],
            "patterns": None if p.cylinder.M is None else len(p.cylinder.M)}


def cmd_pres_finite(a):
    k = int(a.order)
    if k < 1:
        raise UsageError("--order must be >= 1")
    table = [[(i + j) % k for j in range(k)] for i in range(k)]
    p = finite_group_presentation(TableGroup(table, name=f"C{k}"))
    cfgs = p.enumerate(list(range(k)))
    out = _pres_summary(p)
    out["configurations"] = len(cfgs)
    return out, len(cfgs) == k, None


def cmd_pres_product(a):
    kind = a.kind
    if kind == "z2":
        p = _z2()
    elif kind == "dihedral":
        p = _dihedral()
    else:
        raise UsageError("--kind is z2 or dihedral")
    out = _pres_summary(p)
    n = int(a.window or 3)
    # windows covered by translates of F; elsewhere letters are unconstrained
    win = window_of(p.family, str(n)) if kind == "z2" else translate_union(p.cylinder, p.family, p.family.ball(n))
    cfgs = p.enumerate(win)
    doubles = sum(1 for c in cfgs if special_symbol_count(c, p.specials) > 1)
    out.update(window=len(win), configurations=len(cfgs), double_special=doubles)
    return out, doubles == 0, None


def cmd_pres_finite_index(a):
    k = int(a.index)
    z = z_example_subshift()
    p = finite_index_presentation(z, multiples_cosets(k), literal=a.literal)
    out = _pres_summary(p)
    m_top = int(a.window or 4)
    counts = [len(p.enumerate([k * i for i in range(m)])) for m in range(1, m_top + 1)]
    target = [len(z.enumerate(interval(k * m))) for m in range(1, m_top + 1)]
    out.update(counts=counts, ambient_counts=target, bijective=counts == target)
    return out, counts == target, None


def cmd_pres_compose(a):
    depth = int(a.depth)
    if depth < 1:
        raise UsageError("--depth must be >= 1")
    z = z_example_subshift()
    chain = [z] + [(z, lattice_extension(n)) for n in range(2, depth + 1)]
    p = poly_hyperbolic_compose(chain)
    return _pres_summary(p), True, None


def cmd_pres_generation(a):
    p = load_presentation(a)
    rep = check_generation(p, radius=int(a.radius or 6))
    out = {"presentation": p.name, "connected": rep.connected, "components": len(rep.components),
           "witness_admissible": rep.witness_admissible, "witness_specials": rep.witness_specials}
    if rep.witness is not None:
        out["witness"] = _fmt_cfg(rep.witness, p.family)
    return out, rep.connected, None


def cmd_pres_hyperbolic(a):
    p = bd.hyperbolic_presentation(a.graph or "Z", int(a.radius or 4), theta_value(a.theta))
    return _pres_summary(p), True, None


# ----------------------------------------------------------------------------
# boundary commands

_INSTANCES: dict = {}


def instance(a):
    spec = a.graph or "Z*Z"
    key = (spec, a.radius, str(a.theta))
    inst = _INSTANCES.get(key)
    if inst is None:
        r = 4 if a.radius is None else int(a.radius)
        th = theta_value(a.theta)
        if "*" in spec:
            inst = bd.free_product_instance(spec, window_radius=r, theta=th)
        else:
            inst = bd.hyperbolic_instance(spec, window_radius=r, theta=th)
        _INSTANCES[key] = inst
    return inst


def _label(inst, tok):
    try:
        return inst.space.parse_label(str(tok))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _xi(inst, a):
    if a.point is not None:
        return _label(inst, a.point)
    if a.ray is not None:
        ray = str(a.ray)
        if ray.startswith("alt:"):
            return bd.alternating_ray(inst.family, int(ray[4:]))
        return [_label(inst, t) for t in _split(ray)]
    raise UsageError("give --point or --ray")


def _letter_text(letter) -> str:
    return "(" + ",".join(x.serialize() if hasattr(x, "serialize") else fmt_letter(x) for x in letter) + ")"


def cmd_boundary_fprime(a):
    inst = instance(a)
    fam = inst.family
    out = {"theta": inst.params.theta, "delta": inst.params.delta, "regime": inst.params.scale_note}
    for d in inst.parabolics:
        fp = inst.f_prime[d.index]
        out[f"F'_{d.index}"] = {"members": [fam.format(d.embed(x)) for x in fp.members], "partial": fp.partial,
                                "F": [fam.format(d.embed(x)) for x in d.F]}
    return out, True, None


def cmd_boundary_alphabet(a):
    inst = instance(a)
    ap = inst.alphabet_prime
    return ({"size": len(ap), "radial_sources": ap.radial_sources, "busemann_sources": ap.busemann_sources,
             "excluded": len(ap.excluded), "letters": [x.serialize() for x in ap.letters]}, True, None)


def cmd_boundary_cylinder(a):
    inst = instance(a)
    fam = inst.family
    return ({"F": [fam.format(x) for x in inst.F], "F_overlap": [fam.format(x) for x in inst.F_overlap],
             "base_cone": [inst.space.format_label(c) for c in inst.cone_labels],
             "window": len(inst.window), "regime": inst.params.scale_note}, True, None)


def cmd_boundary_encode(a):
    inst = instance(a)
    psi = bd.encode(inst, _xi(inst, a))
    fam = inst.family
    ok = bd.is_admissible(inst, psi)
    letters = {fam.format(g): _letter_text(psi.letters[g]) for g in psi.window}
    return {"source": psi.source[0], "window": len(psi.window), "admissible": ok, "letters": letters}, ok, None


def cmd_boundary_globalise(a):
    inst = instance(a)
    psi = bd.encode(inst, _xi(inst, a))
    glob = bd.globalise(inst, psi)
    fmt_l = inst.space.format_label
    pot = {fmt_l(k): v for k, v in sorted(glob.h.items(), key=lambda kv: inst.space.label_key(kv[0]))}
    return ({"consistent": glob.consistent, "checked_pairs": glob.checked_pairs,
             "uncovered_edges": glob.uncovered_edges, "potential": pot}, glob.consistent, None)


def cmd_boundary_trace(a):
    inst = instance(a)
    psi = bd.encode(inst, _xi(inst, a))
    start = _label(inst, a.start or "1")
    lines = bd.trace_gradient(inst, psi, start, cap=a.cap or 64)
    fl = inst.space.format_label
    rep = {"start": fl(start), "count": len(lines),
           "lines": [{"vertices": [fl(x) for x in ln.vertices], "terminal": ln.terminal} for ln in lines]}
    dom = inst.domain(psi.window)
    paths = [[dom.id[x] for x in ln.vertices] for ln in lines]
    dom.graph.space = inst.space
    return rep, True, {"graph": dom.graph, "paths": paths}


def _pi_report(inst, res) -> dict:
    fl = inst.space.format_label
    if res.kind == "vertex":
        value = fl(res.value)
    elif res.kind == "ray":
        value = [fl(x) for x in res.value]
    elif res.kind == "violation":
        value = [fl(x) for x in res.value]
    else:
        value = None
    return {"kind": res.kind, "value": value, "starts": len(res.starts), "lines": len(res.lines),
            "geodesic": res.geodesic,
            "terminals": [fl(x) for x in res.candidates.get("terminals", [])],
            "exits": [fl(x) for x in res.candidates.get("exits", [])]}


def cmd_boundary_pi(a):
    inst = instance(a)
    xi = _xi(inst, a)
    psi = bd.encode(inst, xi)
    res = bd.pi_map(inst, psi, cap=a.cap or 64, n_starts=a.starts, seed=a.seed or 0)
    rep = _pi_report(inst, res)
    ok = res.kind not in ("violation", "inconsistent")
    if res.kind == "vertex" and not isinstance(xi, list):
        rep["agrees"] = res.value == xi
        ok = ok and rep["agrees"]
    return rep, ok, None


def _sweep_one(args):
    spec, radius, theta, label, starts, seed = args
    inst = _worker_instance(spec, radius, theta)
    psi = bd.encode(inst, label)
    ok = bd.is_admissible(inst, psi)
    res = bd.pi_map(inst, psi, n_starts=starts, seed=seed)
    return inst.space.format_label(label), bool(ok and res.kind == "vertex" and res.value == label)


def _worker_instance(spec, radius, theta):
    key = (spec, radius, str(theta))
    inst = _INSTANCES.get(key)
    if inst is None:
        inst = _INSTANCES[key] = bd.free_product_instance(spec, window_radius=radius, theta=theta)
    return inst


def cmd_boundary_sweep(a):
    spec = a.graph or "Z*Z"
    if "*" not in spec:
        raise UsageError("sweep runs on a free product, e.g. --graph Z*Z")
    r = 4 if a.radius is None else int(a.radius)
    th = theta_value(a.theta)
    inst = _worker_instance(spec, r, th)
    labels = sorted(inst.space.ball_labels(r), key=inst.space.label_key)
    jobs = [(spec, r, th, lab, a.starts, a.seed or 0) for lab in labels]
    results = _map(_sweep_one, jobs, a.jobs)
    bad = [name for name, ok in results if not ok]
    return {"vertices": len(labels), "failures": len(bad), "failed": bad}, not bad, None


def cmd_boundary_expansivity(a):
    inst = instance(a)
    p1, p2 = _label(inst, a.p1), _label(inst, a.p2)
    res = bd.expansivity_witness(inst, p1, p2, search_cap=a.search_cap)
    gamma = None if res.gamma is None else inst.family.format(res.gamma)
    return {"found": res.found, "gamma": gamma, "case": res.kind, "detail": res.detail}, res.found, None


# ----------------------------------------------------------------------------
# acceptance and manifests

def _criterion(k: int):
    from .acceptance import CRITERIA
    return CRITERIA[k - 1]()


def cmd_accept(a):
    from .acceptance import CRITERIA
    only = [int(t) for t in _split(a.only)] if a.only else list(range(1, len(CRITERIA) + 1))
    for k in only:
        if not 1 <= k <= len(CRITERIA):
            raise UsageError(f"no criterion {k}")
    results = _map(_criterion, only, a.jobs)
    lines = [c.line() for c in results]
    ok = all(c.passed for c in results)
    rep = {"criteria": lines, "passed": sum(c.passed for c in results), "total": len(results)}
    text = "\n".join(lines) + f"\n{rep['passed']}/{rep['total']} criteria pass\n"
    return rep, ok, {"text": text}


def _map(fn, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def load_manifest(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read manifest {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None
    base = Path(path).resolve().parent
    for f in data.get("inputs", []):
        if not (base / f).exists():
            raise UsageError(f"{path}: input file {f} does not exist")
    params = dict(data.get("params", {}))
    for key in ("graph", "config", "bundle"):
        val = params.get(key)
        if isinstance(val, str) and (base / val).exists():
            params[key] = str(base / val)
    if "seed" in data:
        params.setdefault("seed", data["seed"])
    if "output" in data:
        params.setdefault("out", str(base / data["output"]))
    return {"command": data.get("command"), "params": params}


# ----------------------------------------------------------------------------
# command table

# (group, op) -> (handler, library operations it exercises, extra arguments)
COMMANDS: dict[tuple[str, str], tuple[Callable, tuple, list]] = {}


def _arg(*names, **kw):
    return (names, kw)


GRAPH = [_arg("--graph"), _arg("--radius", type=int)]
U_V = [_arg("--u"), _arg("--v")]
COC = [_arg("--center"), _arg("--ray"), _arg("--horizon", type=int)]
PRES = [_arg("--preset"), _arg("--bundle")]
CFG = [_arg("--config"), _arg("--word"), _arg("--start", type=int)]
BND = [_arg("--graph"), _arg("--radius", type=int), _arg("--theta")]
XI = [_arg("--point"), _arg("--ray")]


def _register(group, op, fn, covers, args):
    COMMANDS[(group, op)] = (fn, covers, args)


_register("graph", "build", cmd_graph_build, ("build_test_graph", "build_coned_cayley_ball"), GRAPH)
_register("graph", "distance", cmd_graph_distance, ("distance",), GRAPH + U_V)
_register("graph", "geodesics", cmd_graph_geodesics, ("geodesics",), GRAPH + U_V + [_arg("--cap", type=int)])
_register("graph", "gromov", cmd_graph_gromov, ("gromov_product",), GRAPH + [_arg("--x"), _arg("--y"), _arg("--w")])
_register("graph", "delta", cmd_graph_delta, ("delta_estimate",), GRAPH + [_arg("--seed", type=int)])

_register("geometry", "angle", cmd_geometry_angle, ("angle",),
          GRAPH + [_arg("--vertex"), _arg("--e1"), _arg("--e2")])
_register("geometry", "maxang", cmd_geometry_maxang, ("path_max_angle",), GRAPH + [_arg("--path")])
_register("geometry", "circuits", cmd_geometry_circuits, ("circuits_through",),
          GRAPH + [_arg("--edge"), _arg("--length", type=int, default=6)])
_register("geometry", "fineness", cmd_geometry_fineness, ("fineness_certificate",),
          GRAPH + [_arg("--length", type=int, default=6)])
_register("geometry", "circuit-check", cmd_geometry_circuit_check, ("circuit_angle_bound_check",),
          GRAPH + [_arg("--length", type=int, default=8)])
_register("geometry", "cone", cmd_geometry_cone, ("cone",),
          GRAPH + [_arg("--edge"), _arg("--vertex"), _arg("--d", type=int, default=2), _arg("--theta")])
_register("geometry", "triangle", cmd_geometry_triangle, ("check_large_angle_triangle",),
          GRAPH + [_arg("--x"), _arg("--y"), _arg("--z"), _arg("--delta"), _arg("--factor", type=float, default=50),
                   _arg("--seed", type=int)])
_register("geometry", "sweep", cmd_geometry_sweep, ("large_angle_sweep",),
          GRAPH + [_arg("--delta"), _arg("--factor", type=float, default=50), _arg("--seed", type=int)])
_register("geometry", "visibility", cmd_geometry_visibility, ("visibility_ray",),
          GRAPH + [_arg("--targets"), _arg("--base")])

_register("cocycle", "radial", cmd_cocycle_radial, ("radial_cocycle",), GRAPH + [_arg("--center")])
_register("cocycle", "busemann", cmd_cocycle_busemann, ("busemann_cocycle",),
          GRAPH + [_arg("--ray"), _arg("--horizon", type=int)])
_register("cocycle", "gradient", cmd_cocycle_gradient, ("gradient_lines",),
          GRAPH + COC + [_arg("--start"), _arg("--cap", type=int)])
_register("cocycle", "axioms", cmd_cocycle_axioms, ("verify_cocycle_axioms",),
          GRAPH + COC + [_arg("--theta"), _arg("--samples", type=int, default=2000), _arg("--seed", type=int)])
_register("cocycle", "restrict", cmd_cocycle_restrict, ("restrict",), GRAPH + COC + [_arg("--region")])

_register("sft", "enum", cmd_sft_enum, ("enumerate_admissible", "z_example_subshift"), PRES + [_arg("--window")])
_register("sft", "check", cmd_sft_check, ("is_locally_admissible",), PRES + CFG)
_register("sft", "act", cmd_sft_act, ("act",), PRES + CFG + [_arg("--gamma", default="1")])
_register("sft", "count-special", cmd_sft_count_special, ("special_symbol_count",), PRES + CFG + [_arg("--special")])
_register("sft", "pi", cmd_sft_pi, ("pi_window",), PRES + CFG)
_register("sft", "show", cmd_sft_show, (), PRES)
_register("sft", "sweep", cmd_sft_sweep, ("uniqueness_sweep",), PRES + [_arg("--radius", type=int)])

_register("pres", "finite", cmd_pres_finite, ("finite_group_presentation",), [_arg("--order", type=int, default=3)])
_register("pres", "product", cmd_pres_product, ("product_presentation",),
          [_arg("--kind", default="z2"), _arg("--window", type=int)])
_register("pres", "finite-index", cmd_pres_finite_index, ("finite_index_presentation",),
          [_arg("--index", type=int, default=2), _arg("--literal", action="store_true", default=None),
           _arg("--window", type=int)])
_register("pres", "compose", cmd_pres_compose, ("poly_hyperbolic_compose",), [_arg("--depth", type=int, default=3)])
_register("pres", "generation", cmd_pres_generation, ("check_generation",), PRES + [_arg("--radius", type=int)])
_register("pres", "hyperbolic", cmd_pres_hyperbolic, ("hyperbolic_presentation",), BND)

_register("boundary", "fprime", cmd_boundary_fprime, ("compute_f_prime",), BND)
_register("boundary", "alphabet", cmd_boundary_alphabet, ("build_alphabet_prime",), BND)
_register("boundary", "cylinder", cmd_boundary_cylinder, ("build_cylinder",), BND)
_register("boundary", "encode", cmd_boundary_encode, ("encode",), BND + XI)
_register("boundary", "globalise", cmd_boundary_globalise, ("globalise",), BND + XI)
_register("boundary", "trace", cmd_boundary_trace, ("trace_gradient",), BND + XI + [_arg("--start"),
                                                                                   _arg("--cap", type=int)])
_register("boundary", "pi", cmd_boundary_pi, ("pi_map",),
          BND + XI + [_arg("--cap", type=int), _arg("--starts", type=int, default=10), _arg("--seed", type=int)])
_register("boundary", "sweep", cmd_boundary_sweep, ("encode", "pi_map"),
          BND + [_arg("--starts", type=int, default=10), _arg("--seed", type=int), _arg("--jobs", type=int)])
_register("boundary", "expansivity", cmd_boundary_expansivity, ("expansivity_witness",),
          BND + [_arg("--p1"), _arg("--p2"), _arg("--search-cap", type=int, default=4)])

_register("accept", "", cmd_accept, (), [_arg("--only"), _arg("--jobs", type=int)])


def covered_operations() -> set[str]:
    out = set()
    for _, covers, _ in COMMANDS.values():
        out.update(covers)
    return out


# ----------------------------------------------------------------------------
# parser and dispatch

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(sp, taken: set):
    common = [_arg("--format", choices=("text", "json", "dot"), default=None),
              _arg("--manifest"), _arg("--out"), _arg("--seed", type=int), _arg("--jobs", type=int),
              _arg("--window"), _arg("--theta"), _arg("--radius", type=int), _arg("--cap", type=int),
              _arg("--graph")]
    for names, kw in common:
        if names[0] not in taken:
            sp.add_argument(*names, **{**kw, "default": None})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relhyp", description="Special-symbol presentations and boundary coding.")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    groups: dict = {}
    for (group, op), (fn, _, args) in COMMANDS.items():
        if op == "":
            sp = sub.add_parser(group)
        else:
            if group not in groups:
                gp = sub.add_parser(group)
                groups[group] = gp.add_subparsers(dest="op", required=True, parser_class=_Parser)
            sp = groups[group].add_parser(op)
        taken = set()
        for names, kw in args:
            if names[0] in taken:
                continue
            taken.add(names[0])
            kw = dict(kw)
            # defaults are applied after the manifest so that the manifest can override them
            kw["dest"] = names[0].lstrip("-").replace("-", "_")
            sp.set_defaults(**{kw["dest"]: None})
            default = kw.pop("default", None)
            sp.add_argument(*names, **{**kw, "default": None})
            sp.set_defaults(**{"_default_" + kw["dest"]: default})
        _add_common(sp, taken)
        sp.set_defaults(_fn=fn)
    run = sub.add_parser("run")
    run.add_argument("manifest_path")
    run.add_argument("--format", choices=("text", "json", "dot"), default=None)
    run.add_argument("--out", default=None)
    return parser


def _apply_defaults(a, manifest_params: dict):
    for key, val in manifest_params.items():
        dest = key.replace("-", "_")
        if getattr(a, dest, None) is None:
            setattr(a, dest, val)
    for key in list(vars(a)):
        if key.startswith("_default_"):
            dest = key[len("_default_"):]
            if getattr(a, dest, None) is None:
                setattr(a, dest, getattr(a, key))


def render(rep: dict, extra, form: str) -> str:
    if form == "json":
        return fmt.to_json(rep)
    if form == "dot":
        if not extra or "graph" not in extra:
            raise UsageError("this command has no graph output; use --format text or json")
        return fmt.to_dot(extra["graph"], extra.get("highlight", ()), extra.get("paths", ()))
    if extra and "text" in extra:
        return extra["text"]
    return fmt.to_text(rep)


def execute(argv: list[str]) -> tuple[int, str]:
    """Parse and run; returns ``(exit status, report text)``."""
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.group == "run":
        man = load_manifest(a.manifest_path)
        if not man["command"]:
            raise UsageError(f"{a.manifest_path}: manifest has no 'command'")
        extra = ["--manifest", a.manifest_path]
        if a.format:
            extra += ["--format", a.format]
        if a.out:
            extra += ["--out", a.out]
        return execute(str(man["command"]).split() + extra)
    params = load_manifest(a.manifest)["params"] if a.manifest else {}
    _apply_defaults(a, params)
    rep, ok, extra = a._fn(a)
    text = render(rep, extra, a.format or "text")
    if a.out:
        Path(a.out).write_text(text)
        text = ""
    return (0 if ok else 1), text


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        status, text = execute(argv)
    except UsageError as exc:
        print(f"relhyp: error: {exc}", file=sys.stderr)
        return 2
    except fmt.FormatError as exc:
        print(f"relhyp: parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ResourceError, BudgetExceeded) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"relhyp: error: {msg}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
