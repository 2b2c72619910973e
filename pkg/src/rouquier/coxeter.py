"""Coxeter systems, realizations and word combinatorics.

Generators are named by strings but every downstream structure uses their
dense integer index.  A word is a tuple of indices, a subexpression is a
tuple of bits of the same length, and a multiword is a tuple of
``(generator, multiplicity)`` pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence

__all__ = [
    "INFINITY",
    "CoxeterSystem",
    "Realization",
    "Word",
    "Subexpression",
    "Multiword",
    "BraidWord",
    "ConfigError",
    "validate_realization",
    "load_realization",
    "builtin_realization",
    "builtin_names",
    "realization_from_dict",
    "realization_to_dict",
    "enumerate_subwords",
    "is_subword",
    "subword_of",
    "subexpressions_for",
    "flip_distance",
    "multiword_maps",
    "multiword_set",
    "multiwords_expanding_to",
    "run_decomposition",
    "compress",
    "alternating_decomposition",
    "writhe",
    "bits_to_str",
    "str_to_bits",
]

# Sentinel for m_st = infinity (matches the 0 used in config files).
INFINITY = 0

Word = tuple[int, ...]
Subexpression = tuple[int, ...]
Multiword = tuple[tuple[int, int], ...]
BraidWord = tuple[tuple[int, int], ...]


class ConfigError(ValueError):
    """Malformed realization data or word text."""


@dataclass(frozen=True)
class CoxeterSystem:
    generators: tuple[str, ...]
    coxeter_matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise ConfigError("duplicate generator names")
        m = self.coxeter_matrix
        if len(m) != n or any(len(row) != n for row in m):
            raise ConfigError("coxeter matrix has the wrong shape")
        for a in range(n):
            if m[a][a] != 1:
                raise ConfigError(f"m({self.generators[a]},{self.generators[a]}) must be 1")
            for b in range(n):
                if m[a][b] != m[b][a]:
                    raise ConfigError("coxeter matrix is not symmetric")
                if a != b and m[a][b] != INFINITY and m[a][b] < 2:
                    raise ConfigError(
                        f"m({self.generators[a]},{self.generators[b]}) = {m[a][b]} is not >= 2"
                    )

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise ConfigError(f"unknown generator {name!r}") from None

    def parse_word(self, text: str) -> Word:
        """Parse ``"s s t"`` or, when all names are one character, ``"sst"``."""
        letters, signs = self._tokens(text)
        if any(sg < 0 for sg in signs):
            raise ConfigError("negative letters are not allowed in a Coxeter word")
        return letters

    def parse_braid(self, text: str, negative: bool = False) -> BraidWord:
        """Parse a braid word such as ``"s s t^-1"``."""
        letters, signs = self._tokens(text)
        if negative:
            signs = tuple(-sg for sg in signs)
        return tuple(zip(letters, signs))

    def _tokens(self, text: str) -> tuple[Word, tuple[int, ...]]:
        parts = text.split()
        if len(parts) == 1 and parts[0] not in self.generators:
            one_char = all(len(g) == 1 for g in self.generators)
            if one_char and "^" not in parts[0]:
                parts = list(parts[0])
        letters: list[int] = []
        signs: list[int] = []
        for tok in parts:
            sign = 1
            if tok.endswith("^-1"):
                tok, sign = tok[:-3], -1
            elif tok.endswith("^1"):
                tok = tok[:-2]
            letters.append(self.index(tok))
            signs.append(sign)
        return tuple(letters), tuple(signs)

    def format_word(self, word: Sequence[int], sep: str = "") -> str:
        if not word:
            return "∅"
        return sep.join(self.generators[s] for s in word)

    def format_multiword(self, mu: Multiword) -> str:
        if not mu:
            return "∅"
        return "".join(
            self.generators[s] + (f"^{n}" if n > 1 else "") for s, n in mu
        )

    def format_braid(self, omega: BraidWord) -> str:
        return " ".join(
            self.generators[s] + ("" if sg > 0 else "^-1") for s, sg in omega
        )


@dataclass(frozen=True)
class Realization:
    """Roots, coroots and chosen deltas in coordinates of a fixed basis of h*.

    ``roots[s]`` and ``deltas[s]`` are vectors in h*, ``coroots[s]`` is the
    covector on h* giving the pairing with the coroot.
    """

    system: CoxeterSystem
    rank: int
    roots: tuple[tuple[Fraction, ...], ...]
    coroots: tuple[tuple[Fraction, ...], ...]
    deltas: tuple[tuple[Fraction, ...], ...]
    name: str = ""

    def pairing(self, vec: Sequence[Fraction], s: int) -> Fraction:
        return sum((a * b for a, b in zip(vec, self.coroots[s])), Fraction(0))

    def cartan(self, s: int, t: int) -> Fraction:
        """a_st = <alpha_s, alpha_t^vee>."""
        return self.pairing(self.roots[s], t)

    def reflection_matrix(self, s: int) -> tuple[tuple[Fraction, ...], ...]:
        """Matrix of s on h* acting on column vectors."""
        n = self.rank
        a, c = self.roots[s], self.coroots[s]
        return tuple(
            tuple(Fraction(int(i == j)) - a[i] * c[j] for j in range(n)) for i in range(n)
        )


def _frac(x: object) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ConfigError(f"not a rational value: {x!r}")


def _vectors(raw: object, count: int, rank: int, field: str) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(raw, list) or len(raw) != count:
        raise ConfigError(f"{field}: expected {count} vectors")
    out = []
    for v in raw:
        if not isinstance(v, list) or len(v) != rank:
            raise ConfigError(f"{field}: expected vectors of length {rank}")
        try:
            out.append(tuple(_frac(x) for x in v))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{field}: {exc}") from None
    return tuple(out)


def _solve_delta(coroot: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """An integral vector delta with <delta, coroot> = 1, if one exists."""
    if any(c.denominator != 1 for c in coroot):
        # fractional covector: any rational solution works over a field
        j = next(i for i, c in enumerate(coroot) if c)
        return tuple(Fraction(1) / c if i == j else Fraction(0) for i, c in enumerate(coroot))
    ints = [int(c) for c in coroot]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g != 1:
        return None
    # extended gcd accumulated over the coordinates
    coeffs = [0] * len(ints)
    acc, first = 0, True
    for i, c in enumerate(ints):
        if c == 0:
            continue
        if first:
            acc, coeffs[i], first = c, 1, False
            continue
        d, x, y = _egcd(acc, c)
        coeffs = [x * k for k in coeffs]
        coeffs[i] = y
        acc = d
    if acc < 0:
        coeffs = [-k for k in coeffs]
    return tuple(Fraction(k) for k in coeffs)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def realization_from_dict(data: dict, name: str = "") -> Realization:
    """Build a realization from the JSON config layout.

    Missing ``deltas`` are solved for over the integers; failure to find
    one is reported later by :func:`validate_realization`.
    """
    try:
        gens = tuple(str(g) for g in data["generators"])
        matrix = tuple(tuple(int(x) for x in row) for row in data["coxeter_matrix"])
        rank = int(data["rank"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad realization header: {exc}") from None
    system = CoxeterSystem(gens, matrix)
    roots = _vectors(data.get("roots"), len(gens), rank, "roots")
    coroots = _vectors(data.get("coroots"), len(gens), rank, "coroots")
    raw_deltas = data.get("deltas")
    if raw_deltas is None:
        deltas = []
        for c in coroots:
            d = _solve_delta(c)
            deltas.append(d if d is not None else tuple(Fraction(0) for _ in range(rank)))
        delta_vecs = tuple(deltas)
    else:
        delta_vecs = _vectors(raw_deltas, len(gens), rank, "deltas")
    return Realization(system, rank, roots, coroots, delta_vecs, name or str(data.get("name", "")))


def realization_to_dict(real: Realization) -> dict:
    def vec(v: Sequence[Fraction]) -> list[str]:
        return [str(x) for x in v]

    return {
        "name": real.name,
        "generators": list(real.system.generators),
        "coxeter_matrix": [list(r) for r in real.system.coxeter_matrix],
        "rank": real.rank,
        "roots": [vec(v) for v in real.roots],
        "coroots": [vec(v) for v in real.coroots],
        "deltas": [vec(v) for v in real.deltas],
    }


def load_realization(path: str | Path) -> Realization:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read realization {p}: {exc}") from None
    return realization_from_dict(data, name=data.get("name", p.stem))


def builtin_names() -> list[str]:
    folder = resources.files("rouquier") / "data" / "realizations"
    return sorted(f.name[:-5] for f in folder.iterdir() if f.name.endswith(".json"))


def builtin_realization(name: str) -> Realization:
    folder = resources.files("rouquier") / "data" / "realizations"
    f = folder / f"{name}.json"
    if not f.is_file():
        raise ConfigError(f"no shipped realization named {name!r}")
    data = json.loads(f.read_text())
    return realization_from_dict(data, name=name)


def validate_realization(real: Realization) -> list[str]:
    """List every violated realization condition.

    The extra technical condition on the realization and balancedness are
    not checked; no implemented formula relies on them.
    """
    sys_ = real.system
    out: list[str] = []
    n = sys_.rank
    if len(real.roots) != n or len(real.coroots) != n or len(real.deltas) != n:
        return ["root data does not match the number of generators"]
    for s in range(n):
        name = sys_.generators[s]
        v = real.pairing(real.roots[s], s)
        if v != 2:
            out.append(f"<alpha_{name}, alpha_{name}^vee> = {v}, expected 2")
        if not any(real.deltas[s]):
            if _solve_delta(real.coroots[s]) is None:
                out.append(
                    f"Demazure surjectivity: no delta_{name} with <delta_{name}, alpha_{name}^vee> = 1"
                )
                continue
        d = real.pairing(real.deltas[s], s)
        if d != 1:
            out.append(f"<delta_{name}, alpha_{name}^vee> = {d}, expected 1")
    for s in range(n):
        m = real.reflection_matrix(s)
        sq = [
            [sum((m[i][k] * m[k][j] for k in range(real.rank)), Fraction(0)) for j in range(real.rank)]
            for i in range(real.rank)
        ]
        if any(sq[i][j] != (i == j) for i in range(real.rank) for j in range(real.rank)):
            out.append(f"reflection {sys_.generators[s]} is not an involution")
    return out


# --------------------------------------------------------------------------
# words

def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def str_to_bits(text: str) -> Subexpression:
    if any(c not in "01" for c in text):
        raise ConfigError(f"not a bit string: {text!r}")
    return tuple(int(c) for c in text)


def enumerate_subwords(w: Sequence[int]) -> list[Word]:
    """All distinct subwords, longest first, then lexicographic in indices.

    Each subword is produced once by its leftmost embedding, so no set of
    2^n subsets is ever materialised.

    >>> len(enumerate_subwords((0, 0, 0)))
    4
    """
    w = tuple(w)
    n = len(w)
    # nxt[p][a] = first position >= p holding letter a
    letters = sorted(set(w))
    nxt: list[dict[int, int]] = [dict() for _ in range(n + 1)]
    for p in range(n - 1, -1, -1):
        nxt[p] = dict(nxt[p + 1])
        nxt[p][w[p]] = p
    found: list[Word] = []

    def walk(p: int, prefix: Word) -> None:
        found.append(prefix)
        for a in letters:
            q = nxt[p].get(a)
            if q is not None:
                walk(q + 1, prefix + (a,))

    walk(0, ())
    found.sort(key=lambda x: (-len(x), x))
    return found


def is_subword(x: Sequence[int], w: Sequence[int]) -> bool:
    it = iter(w)
    return all(any(a == b for b in it) for a in x)


def subword_of(w: Sequence[int], bits: Sequence[int]) -> Word:
    if len(w) != len(bits):
        raise ValueError(f"subexpression of length {len(bits)} for a word of length {len(w)}")
    return tuple(a for a, b in zip(w, bits) if b)


def subexpressions_for(w: Sequence[int], x: Sequence[int]) -> list[Subexpression]:
    """All 01-sequences selecting ``x`` from ``w``, in decreasing bit order."""
    w, x = tuple(w), tuple(x)
    out: list[Subexpression] = []

    def rec(p: int, k: int, acc: list[int]) -> None:
        if k == len(x):
            out.append(tuple(acc) + (0,) * (len(w) - p))
            return
        if len(w) - p < len(x) - k:
            return
        if w[p] == x[k]:
            acc.append(1)
            rec(p + 1, k + 1, acc)
            acc.pop()
        acc.append(0)
        rec(p + 1, k, acc)
        acc.pop()

    rec(0, 0, [])
    return out


def flip_distance(bits: Sequence[int]) -> int:
    """Pairs p < q with a 0 at p and a 1 at q.

    >>> flip_distance((0, 1, 0, 1))
    3
    """
    zeros = 0
    total = 0
    for b in bits:
        if b:
            total += zeros
        else:
            zeros += 1
    return total


def multiword_maps(mu: Multiword) -> tuple[Word, Word]:
    """(expanded, forgotten) words of a multiword."""
    expanded = tuple(s for s, n in mu for _ in range(n))
    forgotten = tuple(s for s, _ in mu)
    return expanded, forgotten


def multiwords_expanding_to(y: Sequence[int]) -> list[Multiword]:
    """Every multiword whose expansion is ``y``."""
    y = tuple(y)
    out: list[Multiword] = []

    def rec(p: int, acc: list[tuple[int, int]]) -> None:
        if p == len(y):
            out.append(tuple(acc))
            return
        q = p
        while q < len(y) and y[q] == y[p]:
            q += 1
            acc.append((y[p], q - p))
            rec(q, acc)
            acc.pop()

    rec(0, [])
    out.sort(key=lambda mu: tuple(-n for _, n in mu))
    return out


def _groupings(y: Word, x: Word) -> Iterator[Multiword]:
    if not y and not x:
        yield ()
        return
    if not y or not x or y[0] != x[0]:
        return
    q = 0
    while q < len(y) and y[q] == x[0]:
        q += 1
        for rest in _groupings(y[q:], x[1:]):
            yield ((x[0], q),) + rest


def multiword_set(w: Sequence[int], x: Sequence[int]) -> list[tuple[Subexpression, Multiword]]:
    """All (i, mu) with e(mu) = subword_of(w, i) and f(mu) = x.

    Ordered by subexpression (decreasing as a bit string), then multiword.
    """
    w, x = tuple(w), tuple(x)
    n = len(w)
    runs_x = len(run_decomposition(x))
    out: list[tuple[Subexpression, Multiword]] = []
    if not is_subword(x, w):
        return out
    for code in range(2 ** n - 1, -1, -1):
        bits = tuple((code >> (n - 1 - p)) & 1 for p in range(n))
        y = subword_of(w, bits)
        if len(y) < len(x) or len(run_decomposition(y)) != runs_x:
            continue
        for mu in _groupings(y, x):
            out.append((bits, mu))
    return out


def run_decomposition(x: Sequence[int]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for s in x:
        if runs and runs[-1][0] == s:
            runs[-1] = (s, runs[-1][1] + 1)
        else:
            runs.append((s, 1))
    return runs


def compress(x: Sequence[int]) -> Word:
    """One letter per monotonous run."""
    return tuple(s for s, _ in run_decomposition(x))


def alternating_decomposition(omega: BraidWord) -> list[tuple[int, Word]]:
    if not omega:
        raise ValueError("alternating decomposition of the empty braid word")
    blocks: list[tuple[int, list[int]]] = []
    for s, sign in omega:
        if blocks and blocks[-1][0] == sign:
            blocks[-1][1].append(s)
        else:
            blocks.append((sign, [s]))
    return [(sign, tuple(ws)) for sign, ws in blocks]


def writhe(omega: BraidWord) -> int:
    return sum(1 if sg > 0 else -1 for _, sg in omega)
