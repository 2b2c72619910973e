"""Complexes of shifted Bott-Samelson objects and Gaussian elimination.

A complex stores, per cohomological degree, an ordered list of labelled
summands, and a sparse differential keyed by ``(source, target)`` label
pairs.  Chain maps and homotopies use the same sparse layout: a dict from
source label to a dict from target label to a morphism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .bimodule import BSMorphism, BSObject, compose, identity, tensor
from .poly import RingCtx

__all__ = [
    "Summand",
    "Complex",
    "ChainMap",
    "Homotopy",
    "ComplexError",
    "EliminationError",
    "check_differential",
    "tensor_complexes",
    "unit_complex",
    "identity_map",
    "compose_maps",
    "check_chain_map",
    "check_homotopy",
    "Reducer",
    "gaussian_eliminate",
    "verify_reduction",
    "compose_reductions",
    "greedy_reduce",
    "complex_to_json",
    "summand_text",
    "complex_to_dot",
]

Label = Hashable
Blocks = dict[Label, dict[Label, BSMorphism]]


class ComplexError(ValueError):
    """Malformed complex, map or homotopy."""


class EliminationError(RuntimeError):
    """A pivot is not invertible or a certificate failed."""


@dataclass(frozen=True)
class Summand:
    """A shifted object sitting in a complex.

    ``obj.shift`` already includes the Tate twist; ``twist`` is kept to
    display ``B_word(shift)<twist>``.
    """

    label: Label
    obj: BSObject
    twist: int = 0


def _add_into(blocks: dict[Label, BSMorphism], key: Label, m: BSMorphism) -> None:
    if m.is_zero():
        return
    old = blocks.get(key)
    if old is None:
        blocks[key] = m
    else:
        new = old + m
        if new.is_zero():
            del blocks[key]
        else:
            blocks[key] = new


class Complex:
    """Bounded complex with a sparse block differential."""

    def __init__(
        self,
        degrees: Mapping[int, Sequence[Summand]],
        diff: Mapping[tuple[Label, Label], BSMorphism],
        check: bool = True,
    ):
        self.degrees: dict[int, tuple[Summand, ...]] = {
            q: tuple(v) for q, v in sorted(degrees.items()) if v
        }
        self.summands: dict[Label, Summand] = {}
        self.degree_of: dict[Label, int] = {}
        for q, lst in self.degrees.items():
            for sm in lst:
                if sm.label in self.summands:
                    raise ComplexError(f"duplicate label {sm.label!r}")
                self.summands[sm.label] = sm
                self.degree_of[sm.label] = q
        self.out: Blocks = {lab: {} for lab in self.summands}
        self.inn: Blocks = {lab: {} for lab in self.summands}
        for (a, b), m in diff.items():
            if m.is_zero():
                continue
            if a not in self.summands or b not in self.summands:
                raise ComplexError(f"block {a!r}->{b!r} between unknown summands")
            if self.degree_of[b] != self.degree_of[a] + 1:
                raise ComplexError(f"block {a!r}->{b!r} does not raise degree by one")
            if m.source != self.summands[a].obj or m.target != self.summands[b].obj:
                raise ComplexError(f"block {a!r}->{b!r} has the wrong objects")
            self.out[a][b] = m
            self.inn[b][a] = m
        if check:
            rep = check_differential(self)
            if not rep["ok"]:
                raise ComplexError(f"d^2 != 0 or inhomogeneous blocks: {rep}")

    @property
    def diff(self) -> dict[tuple[Label, Label], BSMorphism]:
        return {(a, b): m for a, outs in self.out.items() for b, m in outs.items()}

    def block(self, a: Label, b: Label) -> BSMorphism | None:
        return self.out[a].get(b)

    def labels(self) -> list[Label]:
        return [sm.label for lst in self.degrees.values() for sm in lst]

    def census(self) -> dict[int, int]:
        return {q: len(v) for q, v in self.degrees.items()}

    def __len__(self) -> int:
        return len(self.summands)

    def nblocks(self) -> int:
        return sum(len(v) for v in self.out.values())

    def relabel(self, fn: Callable[[Label], Label]) -> Complex:
        degs = {
            q: [Summand(fn(sm.label), sm.obj, sm.twist) for sm in lst]
            for q, lst in self.degrees.items()
        }
        diff = {(fn(a), fn(b)): m for (a, b), m in self.diff.items()}
        return Complex(degs, diff, check=False)


def unit_complex() -> Complex:
    return Complex({0: [Summand((), BSObject(()), 0)]}, {}, check=False)


def check_differential(C: Complex) -> dict:
    """Block-wise d^2 = 0 and homogeneity of every block."""
    bad_sq: list[tuple[Label, Label]] = []
    bad_deg: list[tuple[Label, Label]] = []
    for a, outs in C.out.items():
        for b, m in outs.items():
            if m.degree != 0 or m.check_homogeneous():
                bad_deg.append((a, b))
        acc: dict[Label, BSMorphism] = {}
        for b, m in outs.items():
            for c, m2 in C.out[b].items():
                _add_into(acc, c, compose(m2, m))
        bad_sq.extend((a, c) for c in acc)
    return {"ok": not bad_sq and not bad_deg, "nonzero_square": bad_sq, "inhomogeneous": bad_deg}


def tensor_complexes(ctx: RingCtx, A: Complex, B: Complex, check: bool = True) -> Complex:
    """A (x) B with differential d (x) id + (-1)^p id (x) d."""
    degs: dict[int, list[Summand]] = {}
    for p, la in A.degrees.items():
        for q, lb in B.degrees.items():
            for x in la:
                for y in lb:
                    degs.setdefault(p + q, []).append(
                        Summand((x.label, y.label), x.obj * y.obj, x.twist + y.twist)
                    )
    diff: dict[tuple[Label, Label], BSMorphism] = {}
    for (a, a2), f in A.diff.items():
        for y in B.summands.values():
            diff[((a, y.label), (a2, y.label))] = tensor(ctx, f, identity(y.obj))
    for (b, b2), g in B.diff.items():
        for x in A.summands.values():
            m = tensor(ctx, identity(x.obj), g)
            if A.degree_of[x.label] % 2:
                m = -m
            key = ((x.label, b), (x.label, b2))
            if key in diff:
                diff[key] = diff[key] + m
            else:
                diff[key] = m
    return Complex(degs, diff, check=check)


# ---------------------------------------------------------------------------
# maps

@dataclass
class ChainMap:
    """Degree-0 map; ``blocks[src][tgt]`` is a morphism of summand objects."""

    source: Complex
    target: Complex
    blocks: Blocks = field(default_factory=dict)

    def block(self, src: Label, tgt: Label) -> BSMorphism | None:
        return self.blocks.get(src, {}).get(tgt)

    def nblocks(self) -> int:
        return sum(len(v) for v in self.blocks.values())


@dataclass
class Homotopy:
    """Blocks from degree q of the source to degree q-1 of the target."""

    source: Complex
    target: Complex
    blocks: Blocks = field(default_factory=dict)

    def nblocks(self) -> int:
        return sum(len(v) for v in self.blocks.values())


def identity_map(C: Complex) -> ChainMap:
    return ChainMap(C, C, {lab: {lab: identity(sm.obj)} for lab, sm in C.summands.items()})


def _compose_blocks(g: Blocks, f: Blocks) -> Blocks:
    out: Blocks = {}
    for x, fx in f.items():
        acc: dict[Label, BSMorphism] = {}
        for y, m in fx.items():
            for z, m2 in g.get(y, {}).items():
                _add_into(acc, z, compose(m2, m))
        if acc:
            out[x] = acc
    return out


def _add_blocks(a: Blocks, b: Blocks, sign: int = 1) -> Blocks:
    out: Blocks = {x: dict(v) for x, v in a.items()}
    for x, bx in b.items():
        ox = out.setdefault(x, {})
        for y, m in bx.items():
            _add_into(ox, y, m if sign > 0 else -m)
        if not ox:
            del out[x]
    return out


def compose_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    if g.source is not f.target:
        raise ComplexError("chain maps do not compose")
    return ChainMap(f.source, g.target, _compose_blocks(g.blocks, f.blocks))


def _check_shapes(kind: str, blocks: Blocks, src: Complex, tgt: Complex, shift: int) -> None:
    for x, bx in blocks.items():
        if x not in src.summands:
            raise ComplexError(f"{kind}: unknown source summand {x!r}")
        for y, m in bx.items():
            if y not in tgt.summands:
                raise ComplexError(f"{kind}: unknown target summand {y!r}")
            if tgt.degree_of[y] != src.degree_of[x] + shift:
                raise ComplexError(f"{kind}: block {x!r}->{y!r} in the wrong degree")
            if m.source != src.summands[x].obj or m.target != tgt.summands[y].obj:
                raise ComplexError(f"{kind}: block {x!r}->{y!r} has the wrong objects")


def _diff_blocks(C: Complex) -> Blocks:
    return C.out


def check_chain_map(f: ChainMap) -> bool:
    """d o f == f o d, exactly."""
    _check_shapes("chain map", f.blocks, f.source, f.target, 0)
    left = _compose_blocks(_diff_blocks(f.target), f.blocks)
    right = _compose_blocks(f.blocks, _diff_blocks(f.source))
    return _blocks_equal(left, right)


def _blocks_equal(a: Blocks, b: Blocks) -> bool:
    keys = set(a) | set(b)
    for x in keys:
        ax, bx = a.get(x, {}), b.get(x, {})
        for y in set(ax) | set(bx):
            m1, m2 = ax.get(y), bx.get(y)
            if m1 is None:
                if not m2.is_zero():
                    return False
            elif m2 is None:
                if not m1.is_zero():
                    return False
            elif m1 != m2:
                return False
    return True


def check_homotopy(f: ChainMap, g: ChainMap, h: Homotopy) -> bool:
    """f - g == d h + h d, exactly."""
    _check_shapes("homotopy", h.blocks, h.source, h.target, -1)
    lhs = _add_blocks(f.blocks, g.blocks, -1)
    dh = _compose_blocks(_diff_blocks(h.target), h.blocks)
    hd = _compose_blocks(h.blocks, _diff_blocks(h.source))
    return _blocks_equal(lhs, _add_blocks(dh, hd))


# ---------------------------------------------------------------------------
# elimination

class Reducer:
    """Mutable workspace for a sequence of Gaussian eliminations.

    Tracks the current differential together with the accumulated
    projection, inclusion and homotopy relative to the starting complex.
    ``ιπ - id = dh + hd`` holds after every step.
    """

    def __init__(self, C: Complex, track: bool = True):
        self.original = C
        self.summands: dict[Label, Summand] = dict(C.summands)
        self.degree_of: dict[Label, int] = dict(C.degree_of)
        self.out: Blocks = {a: dict(v) for a, v in C.out.items()}
        self.inn: Blocks = {a: dict(v) for a, v in C.inn.items()}
        self.track = track
        # pi[current][original], iota[current][original], h[original][original]
        self.pi: Blocks = {}
        self.iota: Blocks = {}
        self.h: Blocks = {}
        if track:
            for lab, sm in C.summands.items():
                self.pi[lab] = {lab: identity(sm.obj)}
                self.iota[lab] = {lab: identity(sm.obj)}
        self.steps: list[tuple[Label, Label]] = []

    def pivot_sign(self, e: Label, e2: Label) -> int:
        m = self.out.get(e, {}).get(e2)
        if m is None:
            return 0
        if self.summands[e].obj != self.summands[e2].obj:
            return 0
        return m.unit_sign()

    def eliminate(self, e: Label, e2: Label, inverse: BSMorphism | None = None) -> None:
        if e not in self.summands or e2 not in self.summands:
            raise EliminationError(f"unknown summands {e!r}, {e2!r}")
        if self.degree_of[e2] != self.degree_of[e] + 1:
            raise EliminationError(f"{e!r} -> {e2!r} is not a differential block")
        phi = self.out[e].get(e2)
        if phi is None:
            raise EliminationError(f"block {e!r} -> {e2!r} is zero")
        if inverse is None:
            eps = self.pivot_sign(e, e2)
            if not eps:
                raise EliminationError(f"block {e!r} -> {e2!r} is not a signed identity")

            def through(beta: BSMorphism, gamma: BSMorphism) -> BSMorphism:
                m = compose(beta, gamma)
                return m if eps > 0 else -m
        else:
            if not compose(inverse, phi).is_identity() or not compose(phi, inverse).is_identity():
                raise EliminationError("supplied inverse is not a two-sided inverse")

            def through(beta: BSMorphism, gamma: BSMorphism) -> BSMorphism:
                return compose(beta, compose(inverse, gamma))

        targets = [(c, m) for c, m in self.out[e].items() if c != e2]
        sources = [(b, m) for b, m in self.inn[e2].items() if b != e]
        for b, gamma in sources:
            ob = self.out[b]
            for c, beta in targets:
                corr = through(beta, gamma)
                old = ob.get(c)
                new = -corr if old is None else old - corr
                if new.is_zero():
                    ob.pop(c, None)
                    self.inn[c].pop(b, None)
                else:
                    ob[c] = new
                    self.inn[c][b] = new
        if self.track:
            pi_e2 = self.pi[e2]
            iota_e = self.iota[e]
            # h += iota[:, e] (-phi^{-1}) pi[e2, :]
            for x, p in pi_e2.items():
                hx = self.h.setdefault(x, {})
                for z, i in iota_e.items():
                    _add_into(hx, z, -through(i, p))
                if not hx:
                    del self.h[x]
            for c, beta in targets:
                row = self.pi[c]
                for x, p in pi_e2.items():
                    _add_into(row, x, -through(beta, p))
            for b, gamma in sources:
                col = self.iota[b]
                for x, i in iota_e.items():
                    _add_into(col, x, -through(i, gamma))
            del self.pi[e], self.pi[e2], self.iota[e], self.iota[e2]
        for lab in (e, e2):
            for c in self.out[lab]:
                if c not in (e, e2):
                    self.inn[c].pop(lab, None)
            for b in self.inn[lab]:
                if b not in (e, e2):
                    self.out[b].pop(lab, None)
        for lab in (e, e2):
            del self.out[lab], self.inn[lab], self.summands[lab], self.degree_of[lab]
        self.steps.append((e, e2))

    def current(self, check: bool = False) -> Complex:
        order = self.original.labels()
        degs: dict[int, list[Summand]] = {}
        for lab in order:
            if lab in self.summands:
                degs.setdefault(self.degree_of[lab], []).append(self.summands[lab])
        diff = {(a, b): m for a, outs in self.out.items() for b, m in outs.items()}
        return Complex(degs, diff, check=check)

    def maps(self, reduced: Complex) -> tuple[ChainMap, ChainMap, Homotopy]:
        if not self.track:
            raise EliminationError("reducer was created without tracking")
        pi_blocks: Blocks = {}
        for y, row in self.pi.items():
            for x, m in row.items():
                pi_blocks.setdefault(x, {})[y] = m
        iota_blocks: Blocks = {y: dict(col) for y, col in self.iota.items() if col}
        pi = ChainMap(self.original, reduced, pi_blocks)
        iota = ChainMap(reduced, self.original, iota_blocks)
        h = Homotopy(self.original, self.original, {x: dict(v) for x, v in self.h.items()})
        return pi, iota, h


def verify_reduction(pi: ChainMap, iota: ChainMap, h: Homotopy) -> dict[str, bool]:
    """The four identities certifying a Gaussian summand."""
    orig, red = pi.source, pi.target
    res = {}
    res["pi_chain_map"] = check_chain_map(pi)
    res["iota_chain_map"] = check_chain_map(iota)
    res["pi_iota_id"] = _blocks_equal(_compose_blocks(pi.blocks, iota.blocks), identity_map(red).blocks)
    ip = ChainMap(orig, orig, _compose_blocks(iota.blocks, pi.blocks))
    res["iota_pi_homotopic_id"] = check_homotopy(ip, identity_map(orig), h)
    return res


def gaussian_eliminate(
    C: Complex, e: Label, e2: Label, inverse: BSMorphism | None = None
) -> tuple[Complex, ChainMap, ChainMap, Homotopy]:
    """Cancel the invertible block ``e -> e2`` and certify the result."""
    r = Reducer(C)
    r.eliminate(e, e2, inverse)
    red = r.current(check=True)
    pi, iota, h = r.maps(red)
    res = verify_reduction(pi, iota, h)
    if not all(res.values()):
        raise EliminationError(f"elimination certificate failed: {res}")
    return red, pi, iota, h


def compose_reductions(
    steps: Sequence[tuple[Complex, ChainMap, ChainMap, Homotopy]]
) -> tuple[ChainMap, ChainMap, Homotopy]:
    """Accumulate consecutive reductions: h = h1 + iota1 h2 pi1 + ..."""
    if not steps:
        raise ComplexError("no steps to compose")
    _, pi, iota, h = steps[0]
    for _, pi2, iota2, h2 in steps[1:]:
        if pi2.source is not pi.target:
            raise ComplexError("reduction steps do not chain")
        inner = _compose_blocks(iota.blocks, _compose_blocks(h2.blocks, pi.blocks))
        h = Homotopy(h.source, h.target, _add_blocks(h.blocks, inner))
        pi = ChainMap(pi.source, pi2.target, _compose_blocks(pi2.blocks, pi.blocks))
        iota = ChainMap(iota2.source, iota.target, _compose_blocks(iota.blocks, iota2.blocks))
    res = verify_reduction(pi, iota, h)
    if not all(res.values()):
        raise EliminationError(f"composed certificate failed: {res}")
    return pi, iota, h


def greedy_reduce(C: Complex, verify: bool = True) -> tuple[Complex, dict]:
    """Cancel signed-identity blocks until none is left."""
    r = Reducer(C, track=verify)
    while True:
        found = None
        for lab in C.labels():
            if lab not in r.summands:
                continue
            for tgt in r.out[lab]:
                if r.pivot_sign(lab, tgt):
                    found = (lab, tgt)
                    break
            if found:
                break
        if found is None:
            break
        r.eliminate(*found)
    red = r.current(check=True)
    cert: dict = {"steps": list(r.steps)}
    if verify:
        pi, iota, h = r.maps(red)
        cert.update(verify_reduction(pi, iota, h))
        cert["maps"] = (pi, iota, h)
    return red, cert


# ---------------------------------------------------------------------------
# export

def _label_text(label: Label, fmt: Callable[[Label], str] | None) -> str:
    if fmt is not None:
        return fmt(label)
    return json.dumps(label, default=str) if not isinstance(label, str) else label


def summand_text(ctx: RingCtx, sm: Summand) -> str:
    word = ctx.real.system.format_word(sm.obj.word)
    base = "1" if not sm.obj.word else f"B_{word}"
    return f"{base}({sm.obj.shift})⟨{sm.twist}⟩"


def complex_to_json(
    ctx: RingCtx, C: Complex, label_fmt: Callable[[Label], str] | None = None, morphisms: bool = True
) -> dict:
    from .bimodule import morphism_to_json

    fmt = ctx.real.system.format_word
    degrees = {
        str(q): [
            {
                "word": fmt(sm.obj.word) if sm.obj.word else "",
                "shift": sm.obj.shift,
                "twist": sm.twist,
                "label": _label_text(sm.label, label_fmt),
            }
            for sm in lst
        ]
        for q, lst in C.degrees.items()
    }
    order = {lab: k for k, lab in enumerate(C.labels())}
    diff = []
    for (a, b), m in sorted(C.diff.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])):
        item = {"from": _label_text(a, label_fmt), "to": _label_text(b, label_fmt)}
        if morphisms:
            item["morphism"] = morphism_to_json(ctx, m)
        diff.append(item)
    return {"degrees": degrees, "diff": diff}


def complex_to_dot(
    ctx: RingCtx, C: Complex, label_fmt: Callable[[Label], str] | None = None, name: str = "complex"
) -> str:
    ids = {lab: f"n{k}" for k, lab in enumerate(C.labels())}
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for q, lst in C.degrees.items():
        lines.append(f"  subgraph deg{q if q >= 0 else 'm' + str(-q)} {{ rank=same;")
        for sm in lst:
            text = f"{_label_text(sm.label, label_fmt)}\\n{summand_text(ctx, sm)}"
            lines.append(f'    {ids[sm.label]} [label="{text}"];')
        lines.append("  }")
    for lab in C.labels():
        for b in sorted(C.out[lab], key=lambda x: ids[x]):
            lines.append(f"  {ids[lab]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
