"""Hecke algebra in the standard basis, for Euler characteristic checks.

Group elements are enumerated as exact matrices of the reflection
representation on h*.  This only works when that representation is
faithful and the group is finite; other systems are reported as
unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .chain import Complex
from .coxeter import INFINITY, Realization, Word

__all__ = [
    "LaurentPoly",
    "HeckeElt",
    "GroupTable",
    "CapExceeded",
    "enumerate_group",
    "multiply",
    "times_delta",
    "times_b",
    "add",
    "scale",
    "standard",
    "standard_braid",
    "kl_generator",
    "class_of_complex",
    "summand_class",
    "elimination_hook",
    "verify_euler",
    "format_hecke",
]


class CapExceeded(RuntimeError):
    """Group enumeration went past the cap."""


class LaurentPoly:
    """Finite sum of c * v^k with rational c."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[int, int | Fraction] | None = None):
        self.c: dict[int, int | Fraction] = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def mono(cls, k: int, c: int | Fraction = 1) -> LaurentPoly:
        return cls({k: c})

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LaurentPoly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.c.items()))

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        d = dict(self.c)
        for k, v in other.c.items():
            d[k] = d.get(k, 0) + v
        return LaurentPoly(d)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({k: -v for k, v in self.c.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly | int) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly({k: v * other for k, v in self.c.items()})
        d: dict[int, int | Fraction] = {}
        for a, x in self.c.items():
            for b, y in other.c.items():
                d[a + b] = d.get(a + b, 0) + x * y
        return LaurentPoly(d)

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c, reverse=True):
            v = self.c[k]
            mono = "" if k == 0 else ("v" if k == 1 else f"v^{k}")
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}{mono}")
        return " + ".join(parts).replace("+ -", "- ")


_V = LaurentPoly.mono(1)
_VINV = LaurentPoly.mono(-1)
_ONE = LaurentPoly.mono(0)


Matrix = tuple[tuple[Fraction, ...], ...]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n))
        for i in range(n)
    )


def _det(m: Matrix) -> Fraction:
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if a[r][i]), None)
        if p is None:
            return Fraction(0)
        if p != i:
            a[i], a[p] = a[p], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            for c in range(i, n):
                a[r][c] -= f * a[i][c]
    return det


@dataclass
class GroupTable:
    matrices: list[Matrix]
    lengths: list[int]
    right: list[list[int]]  # right[w][s] = index of ws
    words: list[Word]  # a reduced word per element (BFS witness)
    faithful: bool
    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.matrices)

    def element(self, word: Sequence[int]) -> int:
        w = 0
        for s in word:
            w = self.right[w][s]
        return w


def enumerate_group(real: Realization, cap: int = 10000) -> GroupTable:
    """Breadth-first closure of the simple reflections."""
    n = real.rank
    gens = [real.reflection_matrix(s) for s in range(real.system.rank)]
    ident: Matrix = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    index = {ident: 0}
    mats, lengths, words = [ident], [0], [()]
    right: list[list[int]] = []
    k = 0
    while k < len(mats):
        row = []
        for s, g in enumerate(gens):
            m = _matmul(mats[k], g)
            j = index.get(m)
            if j is None:
                if len(mats) >= cap:
                    raise CapExceeded(f"more than {cap} group elements")
                j = len(mats)
                index[m] = j
                mats.append(m)
                lengths.append(lengths[k] + 1)
                words.append(words[k] + (s,))
            row.append(j)
        right.append(row)
        k += 1
    for w in range(len(mats)):
        for s in range(len(gens)):
            if abs(lengths[right[w][s]] - lengths[w]) != 1:
                raise AssertionError("length does not change by one")
        if _det(mats[w]) != (-1) ** lengths[w]:
            raise AssertionError("determinant disagrees with length parity")
    faithful = True
    m = real.system.coxeter_matrix
    for s in range(len(gens)):
        for t in range(s + 1, len(gens)):
            st = _matmul(gens[s], gens[t])
            p, order = st, 1
            while p != ident and order <= 2 * len(mats):
                p = _matmul(p, st)
                order += 1
            if m[s][t] == INFINITY or order != m[s][t]:
                faithful = False
    return GroupTable(mats, lengths, right, words, faithful, real.system.generators)


# ---------------------------------------------------------------------------
# Hecke elements

HeckeElt = dict[int, LaurentPoly]


def _add_to(h: HeckeElt, w: int, c: LaurentPoly) -> None:
    new = h.get(w, LaurentPoly()) + c
    if new:
        h[w] = new
    else:
        h.pop(w, None)


def standard(table: GroupTable, word: Sequence[int] = ()) -> HeckeElt:
    """delta_{s_1} ... delta_{s_k} (not necessarily reduced)."""
    h: HeckeElt = {0: _ONE}
    for s in word:
        h = times_delta(table, h, s)
    return h


def times_delta(table: GroupTable, h: HeckeElt, s: int) -> HeckeElt:
    out: HeckeElt = {}
    diff = _VINV - _V
    for w, c in h.items():
        ws = table.right[w][s]
        _add_to(out, ws, c)
        if table.lengths[ws] < table.lengths[w]:
            _add_to(out, w, c * diff)
    return out


def times_b(table: GroupTable, h: HeckeElt, s: int) -> HeckeElt:
    out = times_delta(table, h, s)
    for w, c in h.items():
        _add_to(out, w, c * _V)
    return out


def kl_generator(table: GroupTable, s: int) -> HeckeElt:
    return times_b(table, {0: _ONE}, s)


def standard_braid(table: GroupTable, omega: Sequence[tuple[int, int]]) -> HeckeElt:
    """Image of a braid word, using delta_s^-1 = delta_s + v - v^-1."""
    h: HeckeElt = {0: _ONE}
    for s, sign in omega:
        nxt = times_delta(table, h, s)
        if sign < 0:
            nxt = add(nxt, scale(h, _V - _VINV))
        h = nxt
    return h


def multiply(table: GroupTable, h1: HeckeElt, h2: HeckeElt) -> HeckeElt:
    out: HeckeElt = {}
    for w, c in h2.items():
        part = dict(h1)
        for s in table.words[w]:
            part = times_delta(table, part, s)
        for u, d in part.items():
            _add_to(out, u, d * c)
    return out


def add(h1: HeckeElt, h2: HeckeElt) -> HeckeElt:
    out = dict(h1)
    for w, c in h2.items():
        _add_to(out, w, c)
    return out


def scale(h: HeckeElt, c: LaurentPoly) -> HeckeElt:
    out: HeckeElt = {}
    for w, d in h.items():
        _add_to(out, w, d * c)
    return out


def _b_word(table: GroupTable, word: Word, cache: dict[Word, HeckeElt]) -> HeckeElt:
    r = cache.get(word)
    if r is None:
        r = {0: _ONE} if not word else times_b(table, _b_word(table, word[:-1], cache), word[-1])
        cache[word] = r
    return r


def summand_class(table: GroupTable, word: Word, shift: int, degree: int,
                  cache: dict[Word, HeckeElt] | None = None) -> HeckeElt:
    """(-1)^degree v^shift b_{s_1} ... b_{s_k}."""
    cache = {} if cache is None else cache
    c = LaurentPoly.mono(shift, -1 if degree % 2 else 1)
    return scale(_b_word(table, word, cache), c)


def class_of_complex(table: GroupTable, C: Complex) -> HeckeElt:
    cache: dict[Word, HeckeElt] = {}
    out: HeckeElt = {}
    for q, lst in C.degrees.items():
        for sm in lst:
            for w, c in summand_class(table, sm.obj.word, sm.obj.shift, q, cache).items():
                _add_to(out, w, c)
    return out


def elimination_hook(table: GroupTable):
    """Callback for reduce_pipeline: an eliminated pair must have zero class."""
    cache: dict[Word, HeckeElt] = {}

    def check(a, qa: int, b, qb: int) -> bool:
        total = add(summand_class(table, a.obj.word, a.obj.shift, qa, cache),
                    summand_class(table, b.obj.word, b.obj.shift, qb, cache))
        return not total

    return check


def verify_euler(ctx, table: GroupTable, w: Sequence[int]) -> dict:
    """Classes of the cube, the reduced complex and prod delta_s agree."""
    from .complexes import build_cube, build_reduced

    w = tuple(w)
    expected = standard(table, w)
    cube = class_of_complex(table, build_cube(ctx, tuple((s, 1) for s in w), check=False))
    red = class_of_complex(table, build_reduced(ctx, w, check=False))
    return {"cube": cube == expected, "reduced": red == expected, "ok": cube == expected == red}


def format_hecke(table: GroupTable, h: HeckeElt) -> list[str]:
    """Lines ``coeff * d[word]`` in a canonical order."""
    lines = []
    for w in sorted(h, key=lambda k: (table.lengths[k], table.words[k])):
        word = "".join(table.names[s] for s in table.words[w]) or "e"
        lines.append(f"({h[w]!r}) * d[{word}]")
    return lines
