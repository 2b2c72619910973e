"""Exact polynomials over Q and the ring context of a realization.

Monomials are packed into a single int, ``BITS`` bits per variable, so a
product of monomials is an integer addition.  Coefficients are ``int``
whenever possible and ``Fraction`` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coxeter import Realization

__all__ = ["Poly", "RingCtx", "DivisionError", "BITS"]

BITS = 12
_MASK = (1 << BITS) - 1

Coeff = int | Fraction


def _norm(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return int(c.numerator)
    return c


def _div(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


def unpack(m: int, nvars: int) -> tuple[int, ...]:
    return tuple((m >> (BITS * j)) & _MASK for j in range(nvars))


def pack(exps: Sequence[int]) -> int:
    m = 0
    for j, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        m |= e << (BITS * j)
    return m


def mono_degree(m: int) -> int:
    d = 0
    while m:
        d += m & _MASK
        m >>= BITS
    return d


class DivisionError(ArithmeticError):
    """A Demazure quotient left a remainder: the realization is broken."""


class Poly:
    """Immutable polynomial: packed monomial -> nonzero coefficient."""

    __slots__ = ("t",)

    def __init__(self, terms: Mapping[int, Coeff] | None = None):
        self.t: dict[int, Coeff] = (
            {m: _norm(c) for m, c in terms.items() if c} if terms else {}
        )

    @classmethod
    def _raw(cls, d: dict[int, Coeff]) -> Poly:
        p = cls.__new__(cls)
        p.t = d
        return p

    @classmethod
    def const(cls, c: Coeff) -> Poly:
        return cls._raw({0: _norm(c)} if c else {})

    @classmethod
    def linear(cls, vec: Sequence[Coeff]) -> Poly:
        return cls._raw({1 << (BITS * j): _norm(c) for j, c in enumerate(vec) if c})

    @classmethod
    def var(cls, j: int) -> Poly:
        return cls._raw({1 << (BITS * j): 1})

    @classmethod
    def from_exps(cls, items: Iterable[tuple[Sequence[int], Coeff]]) -> Poly:
        d: dict[int, Coeff] = {}
        for exps, c in items:
            m = pack(exps)
            d[m] = d.get(m, 0) + c
        return cls(d)

    # -- predicates --------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.t)

    def is_const(self) -> bool:
        return not self.t or (len(self.t) == 1 and 0 in self.t)

    def const_value(self) -> Coeff:
        return self.t.get(0, 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.t == other.t
        if isinstance(other, (int, Fraction)):
            return self.t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.t.items()))

    def degree(self) -> int | None:
        """Common grading (2 * total degree), or None if inhomogeneous or zero."""
        degs = {mono_degree(m) for m in self.t}
        if len(degs) != 1:
            return None
        return 2 * degs.pop()

    def is_homogeneous(self) -> bool:
        return not self.t or self.degree() is not None

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: Poly | Coeff) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.t:
            return self
        if not self.t:
            return other
        d = dict(self.t)
        for m, c in other.t.items():
            v = d.get(m, 0) + c
            if v:
                d[m] = _norm(v)
            else:
                d.pop(m, None)
        return Poly._raw(d)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw({m: -c for m, c in self.t.items()})

    def __sub__(self, other: Poly | Coeff) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.t:
            return self
        d = dict(self.t)
        for m, c in other.t.items():
            v = d.get(m, 0) - c
            if v:
                d[m] = _norm(v)
            else:
                d.pop(m, None)
        return Poly._raw(d)

    def __rsub__(self, other: Coeff) -> Poly:
        return Poly.const(other) - self

    def scale(self, c: Coeff) -> Poly:
        if not c:
            return Poly._raw({})
        if c == 1:
            return self
        return Poly._raw({m: _norm(v * c) for m, v in self.t.items()})

    def __mul__(self, other: Poly | Coeff) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self.t, other.t
        if not a or not b:
            return Poly._raw({})
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if mb == 0:
                return self.scale(cb) if a is self.t else other.scale(cb)
            return Poly._raw({ma + mb: _norm(ca * cb) for ma, ca in a.items()})
        r: dict[int, Coeff] = {}
        get = r.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                k = ma + mb
                r[k] = get(k, 0) + ca * cb
        return Poly._raw({m: _norm(c) for m, c in r.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    # -- io ----------------------------------------------------------------
    def sorted_terms(self, nvars: int) -> list[tuple[tuple[int, ...], Coeff]]:
        """Terms in decreasing graded-lexicographic order."""
        items = [(unpack(m, nvars), c) for m, c in self.t.items()]
        items.sort(key=lambda it: (sum(it[0]), it[0]), reverse=True)
        return items

    def to_json(self, nvars: int) -> dict:
        return {
            "terms": [
                {"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms(nvars)
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Poly:
        return cls.from_exps(
            (tuple(t["exps"]), Fraction(str(t["coeff"]))) for t in data["terms"]
        )

    def format(self, nvars: int, names: Sequence[str] | None = None) -> str:
        if not self.t:
            return "0"
        names = names or [f"x{j}" for j in range(nvars)]
        parts = []
        for exps, c in self.sorted_terms(nvars):
            mono = "*".join(
                names[j] + (f"^{e}" if e > 1 else "") for j, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        nv = 1
        for m in self.t:
            while m >> (BITS * nv):
                nv += 1
        return f"Poly({self.format(nv)})"


class RingCtx:
    """Polynomial ring of a realization with reflections and Demazure operators.

    Results are cached per monomial; the context is read-only in use.
    """

    def __init__(self, real: Realization):
        self.real = real
        self.nvars = real.rank
        n = real.rank
        self.alpha = [Poly.linear(v) for v in real.roots]
        self.delta = [Poly.linear(v) for v in real.deltas]
        self._caches: dict[str, dict] = {}
        self._refl_cache: list[dict[int, Poly]] = [dict() for _ in range(real.system.rank)]
        self._dem_cache: list[dict[int, Poly]] = [dict() for _ in range(real.system.rank)]
        self.var_images: list[list[Poly]] = []
        for s in range(real.system.rank):
            # s(x_j) = x_j - <x_j, alpha_s^vee> alpha_s
            imgs = []
            for j in range(n):
                c = real.coroots[s][j]
                imgs.append(Poly.var(j) - self.alpha[s].scale(c))
            self.var_images.append(imgs)
        self.sdelta = [self.reflect(s, self.delta[s]) for s in range(real.system.rank)]
        self._pivot: list[tuple[int, Coeff]] = []
        for s in range(real.system.rank):
            vec = real.roots[s]
            j = next((j for j, c in enumerate(vec) if c), None)
            if j is None:
                raise DivisionError(f"root of {real.system.generators[s]} is zero")
            self._pivot.append((j, _norm(vec[j])))
        for s in range(real.system.rank):
            for j in range(n):
                back = self.reflect(s, self.var_images[s][j])
                if back != Poly.var(j):
                    raise DivisionError("reflection is not an involution")

    def cache(self, name: str) -> dict:
        """Named memo table owned by this context."""
        return self._caches.setdefault(name, {})

    @property
    def ngens(self) -> int:
        return self.real.system.rank

    def one(self) -> Poly:
        return Poly.const(1)

    def _reflect_mono(self, s: int, m: int) -> Poly:
        cache = self._refl_cache[s]
        r = cache.get(m)
        if r is not None:
            return r
        out = Poly.const(1)
        imgs = self.var_images[s]
        mm, j = m, 0
        while mm:
            e = mm & _MASK
            if e:
                out = out * imgs[j] ** e
            mm >>= BITS
            j += 1
        cache[m] = out
        return out

    def reflect(self, s: int, f: Poly) -> Poly:
        if not f.t:
            return f
        acc: dict[int, Coeff] = {}
        for m, c in f.t.items():
            for k, v in self._reflect_mono(s, m).t.items():
                acc[k] = acc.get(k, 0) + c * v
        return Poly({k: v for k, v in acc.items() if v})

    def _divide(self, s: int, f: dict[int, Coeff]) -> dict[int, Coeff]:
        """Exact quotient of f by alpha_s, eliminating the pivot variable."""
        j0, c0 = self._pivot[s]
        shift = BITS * j0
        unit = 1 << shift
        alpha = [(m, c) for m, c in self.alpha[s].t.items() if m != unit]
        rem = dict(f)
        q: dict[int, Coeff] = {}
        while True:
            best, bexp = None, 0
            for m in rem:
                e = (m >> shift) & _MASK
                if e > bexp:
                    best, bexp = m, e
            if best is None:
                break
            c = rem.pop(best)
            lead = best - unit
            k = _div(c, c0)
            q[lead] = q.get(lead, 0) + k
            for m, a in alpha:
                key = lead + m
                v = rem.get(key, 0) - k * a
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        if rem:
            raise DivisionError("Demazure quotient has a nonzero remainder")
        return {m: _norm(c) for m, c in q.items() if c}

    def _demazure_mono(self, s: int, m: int) -> Poly:
        cache = self._dem_cache[s]
        r = cache.get(m)
        if r is not None:
            return r
        num = dict(Poly._raw({m: 1}).t)
        for k, v in self._reflect_mono(s, m).t.items():
            val = num.get(k, 0) - v
            if val:
                num[k] = val
            else:
                num.pop(k, None)
        r = Poly._raw(self._divide(s, num))
        cache[m] = r
        return r

    def demazure(self, s: int, f: Poly) -> Poly:
        if not f.t:
            return f
        acc: dict[int, Coeff] = {}
        for m, c in f.t.items():
            if m == 0:
                continue
            for k, v in self._demazure_mono(s, m).t.items():
                acc[k] = acc.get(k, 0) + c * v
        return Poly({k: v for k, v in acc.items() if v})

    def split(self, s: int, f: Poly) -> tuple[Poly, Poly]:
        """f = a + b * delta_s with a, b invariant under s; b = demazure(f)."""
        if not f.t:
            return f, f
        if len(f.t) == 1 and 0 in f.t:
            return f, Poly._raw({})
        b = self.demazure(s, f)
        if not b.t:
            return f, b
        return f - b * self.delta[s], b

    def poly_json(self, f: Poly) -> dict:
        return f.to_json(self.nvars)
