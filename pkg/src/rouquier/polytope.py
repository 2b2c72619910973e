"""Polytopal sets of multisimplices and their collapses.

The cell labelled ``(i, mu)`` is a product of simplices, one per group of
``mu``: a group of multiplicity ``n`` sits on ``n`` positions of ``w`` and
contributes an ``(n-1)``-simplex.  A face selects a nonempty subset of the
positions of every group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .bimodule import BSMorphism
from .coxeter import Multiword, Subexpression, Word, bits_to_str, multiword_set

__all__ = [
    "Cell",
    "PolytopalSet",
    "CollapseSchedule",
    "CollapseError",
    "EdgePath",
    "LeftDescribed",
    "build_polytopal_set",
    "cell_groups",
    "collapse_schedule",
    "execute_schedule",
    "edge_isomorphism",
    "edge_sign",
    "path_isomorphism",
    "path_sign",
    "vertex_paths",
    "boundary_loop",
    "polytopal_set_to_json",
    "polytopal_set_to_dot",
]

Cell = tuple[Subexpression, Multiword]


class CollapseError(RuntimeError):
    """No free face is available before reaching a single vertex."""

    def __init__(self, message: str, remaining: Sequence[Cell] = ()):
        super().__init__(message)
        self.remaining = list(remaining)


def cell_groups(cell: Cell) -> list[tuple[int, ...]]:
    """Positions of ``w`` used by each group of the multiword."""
    bits, mu = cell
    ones = [p for p, b in enumerate(bits) if b]
    groups, k = [], 0
    for _, n in mu:
        groups.append(tuple(ones[k:k + n]))
        k += n
    return groups


def _cell_from_groups(n: int, letters: Sequence[int], groups: Sequence[Sequence[int]]) -> Cell:
    bits = [0] * n
    for g in groups:
        for p in g:
            bits[p] = 1
    return tuple(bits), tuple((s, len(g)) for s, g in zip(letters, groups))


def _nonempty_subsets(g: Sequence[int]) -> list[tuple[int, ...]]:
    out = []
    for r in range(1, len(g) + 1):
        out.extend(itertools.combinations(g, r))
    return out


@dataclass
class PolytopalSet:
    word: Word
    sub: Word
    cells: list[Cell]
    dim: dict[Cell, int]
    faces: dict[Cell, frozenset[Cell]]  # proper faces of every dimension
    facets: dict[Cell, frozenset[Cell]]  # faces of codimension one

    @property
    def dimension(self) -> int:
        return max(self.dim.values(), default=-1)

    def vertices(self) -> list[Cell]:
        return [c for c in self.cells if self.dim[c] == 0]

    def of_dim(self, d: int) -> list[Cell]:
        return [c for c in self.cells if self.dim[c] == d]

    def edge_ends(self, e: Cell) -> tuple[Cell, Cell]:
        if self.dim[e] != 1:
            raise ValueError("not an edge")
        a, b = sorted(self.facets[e], key=lambda c: c[0], reverse=True)
        return a, b

    def cofaces(self, c: Cell) -> list[Cell]:
        return [s for s in self.cells if c in self.faces[s]]

    def euler(self) -> int:
        return sum((-1) ** self.dim[c] for c in self.cells)


def build_polytopal_set(w: Sequence[int], x: Sequence[int]) -> PolytopalSet:
    w, x = tuple(w), tuple(x)
    cells = multiword_set(w, x)
    cellset = set(cells)
    dim = {c: sum(n - 1 for _, n in c[1]) for c in cells}
    faces: dict[Cell, frozenset[Cell]] = {}
    facets: dict[Cell, frozenset[Cell]] = {}
    for c in cells:
        groups = cell_groups(c)
        letters = [s for s, _ in c[1]]
        fs = set()
        for choice in itertools.product(*(_nonempty_subsets(g) for g in groups)):
            f = _cell_from_groups(len(w), letters, choice)
            if f != c:
                if f not in cellset:
                    raise AssertionError(f"face {f} of {c} is missing")
                fs.add(f)
        faces[c] = frozenset(fs)
        facets[c] = frozenset(f for f in fs if dim[f] == dim[c] - 1)
    return PolytopalSet(w, x, cells, dim, faces, facets)


# ---------------------------------------------------------------------------
# collapses

@dataclass
class CollapseSchedule:
    steps: list[tuple[Cell, Cell]] = field(default_factory=list)
    survivor: Cell | None = None


def _alive_cofaces(P: PolytopalSet, alive: set[Cell], tau: Cell) -> list[Cell]:
    return [s for s in P.cofaces(tau) if s in alive]


def collapse_schedule(P: PolytopalSet, survivor: Cell | None = None) -> CollapseSchedule:
    """Elementary collapses down to one vertex.

    The default survivor is the vertex with the greatest bit string.
    Each step removes a maximal cell and a free facet of it.
    """
    if not P.cells:
        raise CollapseError("empty polytopal set")
    verts = P.vertices()
    if survivor is None:
        survivor = max(verts, key=lambda c: c[0])
    if survivor not in P.dim or P.dim[survivor] != 0:
        raise CollapseError(f"survivor {survivor} is not a vertex")
    cof: dict[Cell, set[Cell]] = {c: set() for c in P.cells}
    for s in P.cells:
        for f in P.faces[s]:
            cof[f].add(s)
    alive = set(P.cells)
    order = sorted(P.cells, key=lambda c: (-P.dim[c], tuple(-b for b in c[0]), c[1]))
    sched = CollapseSchedule(survivor=survivor)
    while len(alive) > 1:
        step = None
        for tau in reversed(order):
            if tau not in alive or tau == survivor:
                continue
            if len(cof[tau]) == 1:
                (sigma,) = cof[tau]
                step = (sigma, tau)
                break
        if step is None:
            raise CollapseError(
                f"stuck with {len(alive)} cells", sorted(alive, key=lambda c: (P.dim[c], c))
            )
        sigma, tau = step
        for c in (sigma, tau):
            alive.discard(c)
            for f in P.faces[c]:
                cof[f].discard(c)
        sched.steps.append(step)
    if alive != {survivor}:
        raise CollapseError("collapse ended away from the survivor", sorted(alive))
    return sched


def execute_schedule(P: PolytopalSet, sched: CollapseSchedule) -> set[Cell]:
    """Replay a schedule, asserting that every removed face is free."""
    alive = set(P.cells)
    for sigma, tau in sched.steps:
        if sigma not in alive or tau not in alive:
            raise CollapseError(f"step {sigma}/{tau} uses a removed cell", sorted(alive))
        if tau not in P.facets[sigma]:
            raise CollapseError(f"{tau} is not a facet of {sigma}", sorted(alive))
        others = [c for c in _alive_cofaces(P, alive, tau) if c != sigma]
        if others:
            raise CollapseError(f"{tau} is not free: also a face of {others[0]}", sorted(alive))
        if _alive_cofaces(P, alive, sigma):
            raise CollapseError(f"{sigma} is not maximal", sorted(alive))
        alive.discard(sigma)
        alive.discard(tau)
    return alive


# ---------------------------------------------------------------------------
# left descriptions and path isomorphisms

@dataclass
class LeftDescribed:
    """A subquotient whose summands sit on the cells of ``P``.

    ``signs[(sigma, tau)]`` is the unit by which the block sigma -> tau
    (``tau`` a facet of ``sigma``) acts; the underlying objects are equal.
    """

    P: PolytopalSet
    label_of: dict[Cell, Hashable]
    signs: dict[tuple[Cell, Cell], int]
    objects: dict[Cell, object] = field(default_factory=dict)


def edge_sign(L: LeftDescribed, p: Cell, e: Cell) -> int:
    """Sign of Phi for the edge ``e`` oriented from its end ``p``."""
    ends = L.P.edge_ends(e)
    if p not in ends:
        raise ValueError(f"{p} is not an end of {e}")
    q = ends[1] if ends[0] == p else ends[0]
    # Phi(e) = -phi_q phi_p^{-1}; units are their own inverses
    return -L.signs[(e, q)] * L.signs[(e, p)]


def edge_isomorphism(L: LeftDescribed, p: Cell, e: Cell) -> BSMorphism:
    from .bimodule import identity

    obj = L.objects[p]
    m = identity(obj)
    return m if edge_sign(L, p, e) > 0 else -m


@dataclass
class EdgePath:
    start: Cell
    edges: list[Cell] = field(default_factory=list)


def _walk(L: LeftDescribed, path: EdgePath) -> tuple[int, Cell]:
    sign, here = 1, path.start
    for e in path.edges:
        ends = L.P.edge_ends(e)
        if here not in ends:
            raise ValueError(f"edge {e} does not start at {here}")
        sign *= edge_sign(L, here, e)
        here = ends[1] if ends[0] == here else ends[0]
    return sign, here


def path_sign(L: LeftDescribed, path: EdgePath) -> int:
    return _walk(L, path)[0]


def path_isomorphism(L: LeftDescribed, path: EdgePath) -> BSMorphism:
    from .bimodule import identity

    sign, _ = _walk(L, path)
    m = identity(L.objects[path.start])
    return m if sign > 0 else -m


def vertex_paths(P: PolytopalSet, a: Cell, b: Cell, limit: int = 2) -> list[EdgePath]:
    """Up to ``limit`` distinct simple edge paths from ``a`` to ``b``."""
    adj: dict[Cell, list[tuple[Cell, Cell]]] = {v: [] for v in P.vertices()}
    for e in P.of_dim(1):
        u, v = P.edge_ends(e)
        adj[u].append((e, v))
        adj[v].append((e, u))
    found: list[EdgePath] = []

    def dfs(v: Cell, seen: set[Cell], edges: list[Cell]) -> None:
        if len(found) >= limit:
            return
        if v == b:
            found.append(EdgePath(a, list(edges)))
            return
        for e, u in adj[v]:
            if u not in seen:
                seen.add(u)
                edges.append(e)
                dfs(u, seen, edges)
                edges.pop()
                seen.discard(u)

    dfs(a, {a}, [])
    return found


def boundary_loop(P: PolytopalSet, cell: Cell) -> EdgePath:
    """Closed edge path around a 2-cell (a triangle or a square)."""
    if P.dim[cell] != 2:
        raise ValueError("not a 2-cell")
    edges = [f for f in P.faces[cell] if P.dim[f] == 1]
    start = max((v for v in P.faces[cell] if P.dim[v] == 0), key=lambda c: c[0])
    path, here, used = [], start, set()
    while len(path) < len(edges):
        e = next(e for e in sorted(edges) if e not in used and here in P.edge_ends(e))
        used.add(e)
        path.append(e)
        u, v = P.edge_ends(e)
        here = v if u == here else u
    if here != start:
        raise AssertionError("boundary walk did not close")
    return EdgePath(start, path)


# ---------------------------------------------------------------------------
# export

def _cell_text(c: Cell, gens: Sequence[str] | None = None) -> str:
    letters = gens or [chr(ord("s") + k) for k in range(26)]
    mu = "".join(letters[s] + (f"^{n}" if n > 1 else "") for s, n in c[1]) or "∅"
    return f"({bits_to_str(c[0])},{mu})"


def polytopal_set_to_json(P: PolytopalSet, sched: CollapseSchedule | None = None,
                          gens: Sequence[str] | None = None) -> dict:
    out = {
        "cells": [
            {"label": _cell_text(c, gens), "dim": P.dim[c],
             "facets": sorted(_cell_text(f, gens) for f in P.facets[c])}
            for c in P.cells
        ]
    }
    if sched is not None:
        out["schedule"] = [[_cell_text(s, gens), _cell_text(t, gens)] for s, t in sched.steps]
        out["survivor"] = _cell_text(sched.survivor, gens) if sched.survivor else None
    return out


def polytopal_set_to_dot(P: PolytopalSet, gens: Sequence[str] | None = None) -> str:
    ids = {c: f"v{k}" for k, c in enumerate(P.vertices())}
    lines = ["graph polytopal_set {"]
    for v, name in ids.items():
        lines.append(f'  {name} [label="{_cell_text(v, gens)}"];')
    for e in P.of_dim(1):
        a, b = P.edge_ends(e)
        lines.append(f'  {ids[a]} -- {ids[b]} [label="dim 1"];')
    for d in range(2, P.dimension + 1):
        lines.append(f"  // {len(P.of_dim(d))} cells of dimension {d}")
    lines.append("}")
    return "\n".join(lines) + "\n"
