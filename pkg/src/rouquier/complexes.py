"""Rouquier complexes: cube, multiword refinement, reduced form and the
reduction pipeline that certifies the reduced form as a Gaussian summand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .bimodule import (
    BSMorphism,
    BSObject,
    Coords,
    Tensor,
    basis_slots,
    build_enddot,
    build_startdot,
    compose,
    from_slotmap,
    identity,
    normalize,
)
from .chain import (
    ChainMap,
    Complex,
    ComplexError,
    EliminationError,
    Homotopy,
    Reducer,
    Summand,
    check_chain_map,
    tensor_complexes,
    unit_complex,
    verify_reduction,
)
from .coxeter import (
    BraidWord,
    Multiword,
    Subexpression,
    Word,
    alternating_decomposition,
    compress,
    enumerate_subwords,
    is_subword,
    multiword_maps,
    multiwords_expanding_to,
    run_decomposition,
    subword_of,
    writhe,
)
from .poly import RingCtx
from .polytope import (
    Cell,
    CollapseSchedule,
    LeftDescribed,
    PolytopalSet,
    build_polytopal_set,
    collapse_schedule,
    execute_schedule,
)

__all__ = [
    "standard_complex",
    "build_cube",
    "cube_sign",
    "worsum_object",
    "multiword_object",
    "reduced_blocks",
    "build_reduced",
    "build_reduced_negative",
    "multiword_inclusion",
    "multiword_projection",
    "build_refined_cube",
    "refine_by_multiwords",
    "subword_filtration",
    "diagonal_blocks_leftdescribed",
    "projection_sign",
    "build_projection",
    "PipelineResult",
    "reduce_pipeline",
    "compare_up_to_signs",
    "build_mixed",
]


# ---------------------------------------------------------------------------
# standard complexes and the cube

def standard_complex(ctx: RingCtx, s: int, sign: int = 1) -> Complex:
    """F_s = (B_s -> 1(1)) in degrees 0, 1, or F_s^-1 = (1(-1) -> B_s)."""
    bs = BSObject((s,))
    if sign > 0:
        unit = BSObject((), 1)
        d = build_enddot(ctx, (s,), 1).shifted(0, 1)
        return Complex({0: [Summand(1, bs, 0)], 1: [Summand(0, unit, 1)]}, {(1, 0): d})
    unit = BSObject((), -1)
    d = build_startdot(ctx, (), 0, s).shifted(-1, 0)
    return Complex({-1: [Summand(0, unit, -1)], 0: [Summand(1, bs, 0)]}, {(0, 1): d})


def _flatten(label: Hashable) -> tuple[int, ...]:
    if isinstance(label, tuple):
        out: tuple[int, ...] = ()
        for part in label:
            out += _flatten(part)
        return out
    return (label,)


def cube_sign(bits: Sequence[int], p: int) -> int:
    """(-1)^(number of zeros before position p)."""
    return -1 if sum(1 for b in bits[:p] if not b) % 2 else 1


def _cube_twist(omega: BraidWord, bits: Sequence[int]) -> int:
    return writhe(omega) - sum(sg for (_, sg), b in zip(omega, bits) if b)


def build_cube(ctx: RingCtx, omega: BraidWord, check: bool = True) -> Complex:
    """Iterated tensor product of standard complexes, labelled by bits.

    The block signs are then compared with the 'zeros before the changed
    symbol' rule and the shifts with the writhe formula.
    """
    omega = tuple(omega)
    if not omega:
        return unit_complex()
    C = standard_complex(ctx, omega[0][0], omega[0][1])
    for s, sg in omega[1:]:
        C = tensor_complexes(ctx, C, standard_complex(ctx, s, sg), check=False)
    C = C.relabel(_flatten)
    word = tuple(s for s, _ in omega)
    for lab, sm in C.summands.items():
        q = _cube_twist(omega, lab)
        if sm.obj != BSObject(subword_of(word, lab), q) or sm.twist != q or C.degree_of[lab] != q:
            raise ComplexError(f"cube summand {lab} has unexpected shape")
    for (a, b), m in C.diff.items():
        p = next(k for k in range(len(a)) if a[k] != b[k])
        r = sum(a[:p])
        y = subword_of(word, a)
        if a[p]:
            raw = build_enddot(ctx, y, r + 1)
        else:
            raw = build_startdot(ctx, y, r, word[p])
        expect = raw.rehome(m.source, m.target)
        if cube_sign(a, p) < 0:
            expect = -expect
        if m != expect:
            raise ComplexError(f"cube block {a}->{b} disagrees with the sign rule")
    return Complex(C.degrees, C.diff, check=check)


# ---------------------------------------------------------------------------
# reduced complexes

def worsum_object(x: Sequence[int], negative: bool = False) -> BSObject:
    """C(x): one strand per run s^m, shifted by 1-m (m-1 when negative)."""
    runs = run_decomposition(x)
    sh = sum((m - 1) if negative else (1 - m) for _, m in runs)
    return BSObject(compress(x), sh)


def _reduced_pairs(w: Word) -> list[tuple[Word, Word, int]]:
    """(x, x', j): x' is x with one letter removed from its run j."""
    subs = enumerate_subwords(w)
    out = []
    for x in subs:
        runs = run_decomposition(x)
        for j in range(len(runs)):
            start = sum(m for _, m in runs[:j])
            out.append((x, x[:start] + x[start + 1:], j))
    return out


def _positive_slotmap(ctx: RingCtx, runs: list[tuple[int, int]], j: int) -> Callable[[Tensor], list[Tensor]]:
    s, m = runs[j]
    k = m - 1
    sign = -1 if sum(n for _, n in runs[:j]) % 2 else 1
    d, sd = ctx.delta[s], ctx.sdelta[s]
    if k > 0:
        right = d if k % 2 else sd

        def fn(sl: Tensor) -> list[Tensor]:
            a = sl[:j] + [sl[j] * d] + sl[j + 1:]
            b = sl[:j + 1] + [sl[j + 1] * right] + sl[j + 2:]
            if sign > 0:
                b[0] = -b[0]
            else:
                a[0] = -a[0]
            return [a, b]

        return fn
    trivalent = 0 < j < len(runs) - 1 and runs[j - 1][0] == runs[j + 1][0]
    t = runs[j - 1][0] if trivalent else None

    def fn0(sl: Tensor) -> list[Tensor]:
        out = sl[:j] + [sl[j] * sl[j + 1]] + sl[j + 2:]
        if trivalent:
            out = out[: j - 1] + [out[j - 1] * ctx.demazure(t, out[j])] + out[j + 1:]
        if sign < 0:
            out[0] = -out[0]
        return [out]

    return fn0


def _negative_slotmap(ctx: RingCtx, big_runs: list[tuple[int, int]], j: int) -> Callable[[Tensor], list[Tensor]]:
    """Insertion x -> x' where run j of x' gained one letter."""
    s, m = big_runs[j]
    k = m - 1
    sign = -1 if sum(n for _, n in big_runs[:j]) % 2 else 1
    d, sd, one = ctx.delta[s], ctx.sdelta[s], ctx.one()
    if k > 0:
        right = d if k % 2 else sd

        def fn(sl: Tensor) -> list[Tensor]:
            a = sl[:j] + [sl[j] * d] + sl[j + 1:]
            b = sl[:j + 1] + [sl[j + 1] * right] + sl[j + 2:]
            if sign > 0:
                b[0] = -b[0]
            else:
                a[0] = -a[0]
            return [a, b]

        return fn
    trivalent = 0 < j < len(big_runs) - 1 and big_runs[j - 1][0] == big_runs[j + 1][0]

    def fn0(sl: Tensor) -> list[Tensor]:
        if trivalent:
            # split the merged strand j (1-based) into two
            sl = sl[:j] + [one] + sl[j:]
        y = sl[j]
        a = sl[:j] + [y * d, one] + sl[j + 1:]
        b = sl[:j] + [-y, sd] + sl[j + 1:]
        if sign < 0:
            a[0], b[0] = -a[0], -b[0]
        return [a, b]

    return fn0


def reduced_blocks(ctx: RingCtx, w: Word, negative: bool = False) -> dict[tuple[Word, Word], BSMorphism]:
    """Differential blocks of the reduced complex, keyed by subword pairs."""
    n = len(w)
    cache = ctx.cache("reduced_block")
    out: dict[tuple[Word, Word], BSMorphism] = {}
    for x, x2, j in _reduced_pairs(w):
        if negative:
            src_w, tgt_w = x2, x
            key = ("neg", x, j)
        else:
            src_w, tgt_w = x, x2
            key = ("pos", x, j)
        raw = cache.get(key)
        if raw is None:
            runs = run_decomposition(x)
            fn = _negative_slotmap(ctx, runs, j) if negative else _positive_slotmap(ctx, runs, j)
            src = worsum_object(src_w, negative)
            tgt = worsum_object(tgt_w, negative)
            # internal degree 1 before the twists are applied
            raw = from_slotmap(ctx, src, tgt, 1, fn)
            cache[key] = raw
        if negative:
            qs, qt = -(n - len(src_w)), -(n - len(tgt_w))
        else:
            qs, qt = n - len(src_w), n - len(tgt_w)
        out[(src_w, tgt_w)] = raw.shifted(qs, qt)
    return out


def build_reduced(ctx: RingCtx, w: Sequence[int], check: bool = True) -> Complex:
    """The subword-indexed complex F_w."""
    w = tuple(w)
    n = len(w)
    degs: dict[int, list[Summand]] = {}
    for x in enumerate_subwords(w):
        q = n - len(x)
        degs.setdefault(q, []).append(Summand(x, worsum_object(x).shifted(q), q))
    return Complex(degs, reduced_blocks(ctx, w), check=check)


def build_reduced_negative(ctx: RingCtx, w: Sequence[int], check: bool = True) -> Complex:
    """The mirror complex for the negative lift of w."""
    w = tuple(w)
    n = len(w)
    degs: dict[int, list[Summand]] = {}
    for x in enumerate_subwords(w):
        q = n - len(x)
        degs.setdefault(-q, []).append(Summand(x, worsum_object(x, True).shifted(-q), -q))
    return Complex(degs, reduced_blocks(ctx, w, negative=True), check=check)


def build_mixed(ctx: RingCtx, omega: BraidWord, check: bool = True) -> Complex:
    """Tensor product of reduced complexes over the alternating decomposition."""
    if not omega:
        return unit_complex()
    parts = alternating_decomposition(tuple(omega))
    C = None
    for sign, word in parts:
        F = build_reduced(ctx, word, check) if sign > 0 else build_reduced_negative(ctx, word, check)
        C = F if C is None else tensor_complexes(ctx, C, F, check=False)
    if len(parts) > 1:
        C = C.relabel(lambda lab: lab if len(parts) == 1 else _flatten_pairs(lab, len(parts)))
        if check:
            C = Complex(C.degrees, C.diff, check=True)
    return C


def _flatten_pairs(label: Hashable, depth: int) -> tuple:
    out = []
    for _ in range(depth - 1):
        label, last = label
        out.append(last)
    out.append(label)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# multiwords

def _mu_runs(mu: Multiword) -> list[tuple[int, list[int]]]:
    """Multiword grouped by runs of its expansion: (letter, group sizes)."""
    runs: list[tuple[int, list[int]]] = []
    for s, n in mu:
        if runs and runs[-1][0] == s:
            runs[-1][1].append(n)
        else:
            runs.append((s, [n]))
    return runs


def multiword_object(mu: Multiword) -> BSObject:
    """C_mu: one strand per run; a run of N strands in k groups is shifted by N-2k+1."""
    runs = _mu_runs(mu)
    return BSObject(tuple(s for s, _ in runs), sum(sum(g) - 2 * len(g) + 1 for _, g in runs))


def _iota_slots(ctx: RingCtx, runs: list[tuple[int, list[int]]], sl: Tensor) -> Tensor:
    one = ctx.one()
    out = [sl[0]]
    for j, (s, groups) in enumerate(runs):
        d = ctx.delta[s]
        for gi, n in enumerate(groups):
            out.extend([one] * (n - 1))
            if gi < len(groups) - 1:
                out.append(d)
        out.append(sl[j + 1])
    return out


def _pi_slots(ctx: RingCtx, runs: list[tuple[int, list[int]]], sl: Tensor) -> Tensor | None:
    out = [sl[0]]
    pos = 1
    for s, groups in runs:
        acc = out[-1]
        msd = -ctx.sdelta[s]
        for gi, n in enumerate(groups):
            for _ in range(n - 1):
                acc = acc * ctx.demazure(s, sl[pos] * msd)
                pos += 1
            if gi < len(groups) - 1:
                acc = acc * ctx.demazure(s, sl[pos])
                pos += 1
            if not acc.t:
                return None
        out[-1] = acc
        out.append(sl[pos])
        pos += 1
    return out


def multiword_inclusion(ctx: RingCtx, mu: Multiword) -> BSMorphism:
    runs = _mu_runs(mu)
    y, _ = multiword_maps(mu)
    src = multiword_object(mu)
    return from_slotmap(ctx, src, BSObject(y), 0, lambda sl: [_iota_slots(ctx, runs, sl)])


def multiword_projection(ctx: RingCtx, mu: Multiword) -> BSMorphism:
    runs = _mu_runs(mu)
    y, _ = multiword_maps(mu)
    tgt = multiword_object(mu)

    def fn(sl: Tensor) -> list[Tensor]:
        r = _pi_slots(ctx, runs, sl)
        return [r] if r is not None else []

    return from_slotmap(ctx, BSObject(y), tgt, 0, fn)


def _refined_summands(w: Word) -> tuple[dict[int, list[Summand]], dict[Subexpression, list[Multiword]]]:
    n = len(w)
    degs: dict[int, list[Summand]] = {}
    mus: dict[Subexpression, list[Multiword]] = {}
    for code in range(2 ** n - 1, -1, -1):
        bits = tuple((code >> (n - 1 - p)) & 1 for p in range(n))
        y = subword_of(w, bits)
        q = n - len(y)
        mus[bits] = multiwords_expanding_to(y)
        for mu in mus[bits]:
            degs.setdefault(q, []).append(Summand((bits, mu), multiword_object(mu).shifted(q), q))
    return degs, mus


def build_refined_cube(ctx: RingCtx, w: Sequence[int], check: bool = False) -> Complex:
    """The positive cube with each B_y split into the summands C_mu.

    Blocks are ``pi_mu' o d o iota_mu`` evaluated on pure tensors.
    """
    w = tuple(w)
    n = len(w)
    degs, mus = _refined_summands(w)
    runs_of = {mu: _mu_runs(mu) for ms in mus.values() for mu in ms}
    diff: dict[tuple[Hashable, Hashable], BSMorphism] = {}
    for bits, src_mus in mus.items():
        q = n - sum(bits)
        for p in range(n):
            if not bits[p]:
                continue
            tgt_bits = bits[:p] + (0,) + bits[p + 1:]
            r = sum(bits[:p]) + 1
            sign = cube_sign(bits, p)
            tgt_mus = mus[tgt_bits]
            for mu in src_mus:
                src_obj = multiword_object(mu)
                cols: dict[Multiword, list[Coords]] = {m2: [] for m2 in tgt_mus}
                for code in range(src_obj.size):
                    sl = _iota_slots(ctx, runs_of[mu], basis_slots(ctx, src_obj.word, code))
                    sl = sl[: r - 1] + [sl[r - 1] * sl[r]] + sl[r + 1:]
                    if sign < 0:
                        sl[0] = -sl[0]
                    for m2 in tgt_mus:
                        t = _pi_slots(ctx, runs_of[m2], sl)
                        col = normalize(ctx, multiword_object(m2).word, t) if t is not None else {}
                        cols[m2].append(col)
                for m2, cl in cols.items():
                    if not any(cl):
                        continue
                    tgt_obj = multiword_object(m2)
                    m = BSMorphism(src_obj.shifted(q), tgt_obj.shifted(q + 1), 0, cl)
                    diff[((bits, mu), (tgt_bits, m2))] = m
    return Complex(degs, diff, check=check)


def refine_by_multiwords(ctx: RingCtx, C: Complex) -> Complex:
    """Split every summand B_y(k) of C into the C_mu(k), e(mu) = y."""
    incl: dict[Multiword, BSMorphism] = {}
    proj: dict[Multiword, BSMorphism] = {}
    parts: dict[Hashable, list[Multiword]] = {}
    degs: dict[int, list[Summand]] = {}
    for q, lst in C.degrees.items():
        for sm in lst:
            parts[sm.label] = multiwords_expanding_to(sm.obj.word)
            for mu in parts[sm.label]:
                if mu not in incl:
                    incl[mu] = multiword_inclusion(ctx, mu)
                    proj[mu] = multiword_projection(ctx, mu)
                obj = multiword_object(mu).shifted(sm.obj.shift)
                degs.setdefault(q, []).append(Summand((sm.label, mu), obj, sm.twist))
    diff = {}
    for (a, b), m in C.diff.items():
        sa, sb = C.summands[a], C.summands[b]
        for mu in parts[a]:
            i = incl[mu].shifted(sa.obj.shift, sa.obj.shift)
            mi = compose(m, i)
            for mu2 in parts[b]:
                p = proj[mu2].shifted(sb.obj.shift, sb.obj.shift)
                blk = compose(p, mi)
                if not blk.is_zero():
                    diff[((a, mu), (b, mu2))] = blk
    return Complex(degs, diff, check=True)


# ---------------------------------------------------------------------------
# filtration and left descriptions

def subword_filtration(C: Complex) -> dict:
    """Group a refined cube by f(mu) and check triangularity of d."""
    groups: dict[Word, list[Hashable]] = {}
    for lab in C.labels():
        _, mu = lab
        groups.setdefault(multiword_maps(mu)[1], []).append(lab)
    violations = []
    for (a, b) in C.diff:
        xa = multiword_maps(a[1])[1]
        xb = multiword_maps(b[1])[1]
        if xa != xb and not is_subword(xb, xa):
            violations.append((a, b))
    order = sorted(groups, key=lambda x: (-len(x), x))
    return {"order": order, "groups": groups, "violations": violations, "ok": not violations}


def diagonal_blocks_leftdescribed(C: Complex, w: Sequence[int], x: Sequence[int],
                                  P: PolytopalSet | None = None) -> LeftDescribed:
    """Match the diagonal G_x blocks of a refined cube with Pi(w, x)."""
    w, x = tuple(w), tuple(x)
    P = P or build_polytopal_set(w, x)
    cells = set(P.cells)
    signs: dict[tuple[Cell, Cell], int] = {}
    for sigma in P.cells:
        if sigma not in C.summands:
            raise ComplexError(f"cell {sigma} has no summand")
        for tau, m in C.out[sigma].items():
            if tau not in cells:
                continue
            if tau not in P.facets[sigma]:
                raise ComplexError(f"nonzero block {sigma}->{tau} is not a face relation")
            u = m.unit_sign() if m.source == m.target else 0
            if not u:
                raise ComplexError(f"block {sigma}->{tau} is not a signed identity")
            signs[(sigma, tau)] = u
        for tau in P.facets[sigma]:
            if (sigma, tau) not in signs:
                raise ComplexError(f"face {tau} of {sigma} carries a zero block")
    objs = {c: C.summands[c].obj for c in P.cells}
    return LeftDescribed(P, {c: c for c in P.cells}, signs, objs)


# ---------------------------------------------------------------------------
# projection

def projection_sign(bits: Sequence[int]) -> int:
    """Sign of the refined cube -> reduced complex projection on C_(i, x).

    (-1) to the sum of the (0-based) positions of the zeros of ``bits``,
    i.e. pairs with a 1 before a 0 plus C(#zeros, 2).  The cube sign
    counts zeros before the flipped letter while the reduced sign counts
    letters of x before it; this exponent absorbs the difference.
    """
    return -1 if sum(p for p, b in enumerate(bits) if not b) % 2 else 1


def build_projection(ctx: RingCtx, w: Sequence[int], refined: Complex | None = None,
                     reduced: Complex | None = None, sign_rule: Callable[[Sequence[int]], int] = projection_sign,
                     verify: bool = True) -> ChainMap:
    """Signed identities on the simple-multiword summands, zero elsewhere."""
    w = tuple(w)
    refined = refined or build_refined_cube(ctx, w)
    reduced = reduced or build_reduced(ctx, w)
    blocks: dict[Hashable, dict[Hashable, BSMorphism]] = {}
    for lab, sm in refined.summands.items():
        bits, mu = lab
        e, f = multiword_maps(mu)
        if e != f:
            continue
        m = identity(sm.obj)
        blocks[lab] = {f: m if sign_rule(bits) > 0 else -m}
    pi = ChainMap(refined, reduced, blocks)
    if verify and not check_chain_map(pi):
        raise ComplexError("projection is not a chain map")
    return pi


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class PipelineResult:
    word: Word
    refined: Complex
    survivor: Complex
    reduced: Complex
    pi: ChainMap | None
    iota: ChainMap | None
    h: Homotopy | None
    certificate: dict
    schedules: dict[Word, CollapseSchedule] = field(default_factory=dict)
    polytopes: dict[Word, PolytopalSet] = field(default_factory=dict)
    left: dict[Word, LeftDescribed] = field(default_factory=dict)
    signs: dict[Word, int] | None = None


def reduce_pipeline(ctx: RingCtx, w: Sequence[int], verify: bool = True,
                    hecke_check: Callable[[Summand, int, Summand, int], bool] | None = None) -> PipelineResult:
    """Reduce the refined cube of w to the reduced complex.

    Subwords are processed longest first; inside G_x the eliminations
    follow a collapse schedule of Pi(w, x).  With ``verify`` the
    accumulated maps are certified on the refined cube.
    """
    w = tuple(w)
    refined = build_refined_cube(ctx, w, check=verify)
    filt = subword_filtration(refined)
    if not filt["ok"]:
        raise ComplexError(f"filtration is not triangular: {filt['violations'][:3]}")
    red = Reducer(refined, track=verify)
    cert: dict = {"steps": 0, "class_invariant": True}
    schedules, polys, lefts = {}, {}, {}
    for x in filt["order"]:
        P = build_polytopal_set(w, x)
        L = diagonal_blocks_leftdescribed(refined, w, x, P)
        sched = collapse_schedule(P)
        alive = execute_schedule(P, sched)
        if alive != {sched.survivor}:
            raise EliminationError(f"collapse of Pi({w},{x}) did not reach one vertex")
        for sigma, tau in sched.steps:
            if hecke_check is not None:
                a, b = red.summands[sigma], red.summands[tau]
                if not hecke_check(a, red.degree_of[sigma], b, red.degree_of[tau]):
                    cert["class_invariant"] = False
            red.eliminate(sigma, tau)
            cert["steps"] += 1
        schedules[x], polys[x], lefts[x] = sched, P, L
    survivor = red.current(check=verify)
    reduced = build_reduced(ctx, w, check=verify)
    relabelled = survivor.relabel(lambda lab: multiword_maps(lab[1])[1])
    signs = compare_up_to_signs(relabelled, reduced)
    cert["matches_reduced"] = signs is not None and "mismatch" not in signs
    pi = iota = h = None
    if verify:
        pi, iota, h = red.maps(survivor)
        cert.update(verify_reduction(pi, iota, h))
        cert["homotopy_blocks"] = h.nblocks()
    return PipelineResult(w, refined, survivor, reduced, pi, iota, h, cert, schedules, polys, lefts,
                          signs if cert["matches_reduced"] else None)


def compare_up_to_signs(C1: Complex, C2: Complex) -> dict:
    """Signs eps with eps_b d1[a->b] eps_a == d2[a->b] for every block.

    Returns the sign per label, or ``{"mismatch": ...}`` describing the
    first problem found.
    """
    if set(C1.summands) != set(C2.summands):
        return {"mismatch": "different summand labels"}
    for lab, sm in C1.summands.items():
        other = C2.summands[lab]
        if sm.obj != other.obj or C1.degree_of[lab] != C2.degree_of[lab]:
            return {"mismatch": f"summand {lab!r} differs"}
    d1, d2 = C1.diff, C2.diff
    if set(d1) != set(d2):
        extra = sorted(set(d1) ^ set(d2), key=repr)[0]
        return {"mismatch": f"block {extra!r} is zero in only one complex"}
    rel: dict[tuple[Hashable, Hashable], int] = {}
    for key, m in d1.items():
        m2 = d2[key]
        if m == m2:
            rel[key] = 1
        elif m == -m2:
            rel[key] = -1
        else:
            return {"mismatch": f"block {key!r} differs by more than a sign"}
    adj: dict[Hashable, list[tuple[Hashable, int]]] = {lab: [] for lab in C1.summands}
    for (a, b), r in rel.items():
        adj[a].append((b, r))
        adj[b].append((a, r))
    eps: dict[Hashable, int] = {}
    for root in C1.labels():
        if root in eps:
            continue
        eps[root] = 1
        stack = [root]
        while stack:
            a = stack.pop()
            for b, r in adj[a]:
                want = eps[a] * r
                if b not in eps:
                    eps[b] = want
                    stack.append(b)
                elif eps[b] != want:
                    return {"mismatch": f"inconsistent signs around {a!r} and {b!r}"}
    return eps
