"""Acceptance criteria, one test per criterion.

Every check is an exact equality over the rationals.  Each test prints a
single ``CRITERION n: PASS|FAIL`` line to the terminal.
"""

import functools
import itertools
import random
import time

from rouquier.bimodule import (
    BSObject,
    basic_decomposition,
    build_decorate,
    build_enddot,
    build_startdot,
    compose,
    identity,
    relation_suite,
)
from rouquier.chain import Complex, check_differential, greedy_reduce
from rouquier.complexes import (
    build_cube,
    build_projection,
    build_reduced,
    build_reduced_negative,
    compare_up_to_signs,
    multiword_inclusion,
    multiword_projection,
    reduce_pipeline,
    refine_by_multiwords,
)
from rouquier.coxeter import builtin_realization, enumerate_subwords, multiwords_expanding_to
from rouquier.hecke import elimination_hook, enumerate_group, verify_euler
from rouquier.polytope import CollapseError, build_polytopal_set, boundary_loop, execute_schedule, path_isomorphism, vertex_paths

from conftest import ring

RELATION_SET = ("A1", "A1xA1", "A2", "B2", "universal2")
TWO = ("A2", "B2")
THREE = ("A3", "B3")


def word_set():
    """(realization, word) for length <= 6 over {s,t} and <= 5 over {s,t,u}."""
    out = []
    for name in TWO:
        out += [(name, w) for n in range(1, 7) for w in itertools.product(range(2), repeat=n)]
    for name in THREE:
        out += [(name, w) for n in range(1, 6) for w in itertools.product(range(3), repeat=n)]
    return out


def report(capsys, n, ok, extra=""):
    with capsys.disabled():
        print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'}{' ' + extra if extra else ''}")


@functools.lru_cache(maxsize=None)
def tables():
    return {name: enumerate_group(builtin_realization(name)) for name in TWO + THREE}


def two_path_pairs(w):
    """Vertex pairs of some Pi(w, x) joined by two distinct edge paths."""
    out = []
    for x in enumerate_subwords(w):
        P = build_polytopal_set(w, x)
        for a, b in itertools.combinations(P.vertices(), 2):
            if len(vertex_paths(P, a, b, limit=2)) == 2:
                out.append((x, a, b))
    return out


@functools.lru_cache(maxsize=None)
def pipeline_sweep():
    """Run the pipeline once over the word set and keep what later criteria need."""
    rng = random.Random(2024)
    chosen = {}
    for k in rng.sample(range(len(word_set())), len(word_set())):
        cands = two_path_pairs(word_set()[k][1])
        if cands:
            chosen[k] = rng.choice(cands)
        if len(chosen) == 10:
            break
    hooks = {name: elimination_hook(t) for name, t in tables().items()}
    out = {"failures": [], "loops": 0, "bad_loops": [], "polytopes": 0, "bad_collapses": [],
           "class_failures": [], "pairs": [], "steps": 0}
    t0 = time.time()
    for k, (name, w) in enumerate(word_set()):
        ctx = ring(name)
        res = reduce_pipeline(ctx, w, hecke_check=hooks[name])
        cert = res.certificate
        needed = ("pi_chain_map", "iota_chain_map", "pi_iota_id", "iota_pi_homotopic_id", "matches_reduced")
        if not all(cert[key] for key in needed):
            out["failures"].append((name, w, cert))
        if not cert["class_invariant"]:
            out["class_failures"].append((name, w))
        out["steps"] += cert["steps"]
        for x, L in res.left.items():
            out["polytopes"] += 1
            try:
                if execute_schedule(L.P, res.schedules[x]) != {res.schedules[x].survivor}:
                    out["bad_collapses"].append((name, w, x))
            except CollapseError as exc:
                out["bad_collapses"].append((name, w, x, str(exc)))
            for c in L.P.of_dim(2):
                out["loops"] += 1
                if not path_isomorphism(L, boundary_loop(L.P, c)).is_identity():
                    out["bad_loops"].append((name, w, x, c))
        if k in chosen:
            x, a, b = chosen[k]
            L = res.left[x]
            p1, p2 = vertex_paths(L.P, a, b, limit=2)
            out["pairs"].append((name, w, x, path_isomorphism(L, p1) == path_isomorphism(L, p2)))
    out["seconds"] = time.time() - t0
    return out


def test_criterion_1_relations(capsys):
    t0 = time.time()
    bad = []
    for name in RELATION_SET:
        for r in relation_suite(ring(name)):
            if r["generator"] is not None and r["status"] != "pass":
                bad.append((name, r))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 5
    report(capsys, 1, ok, f"({elapsed:.1f}s)")
    assert not bad
    assert elapsed < 5


def test_criterion_2_decompositions(capsys):
    t0 = time.time()
    ok = True
    for name in RELATION_SET:
        ctx = ring(name)
        for s in range(ctx.ngens):
            m = basic_decomposition(ctx, s)
            i1, p1, i2, p2 = m["iota1"], m["pi1"], m["iota2"], m["pi2"]
            ok &= compose(p1, i1) == identity(BSObject((s,), -1))
            ok &= compose(p2, i2) == identity(BSObject((s,), 1))
            ok &= compose(p1, i2).is_zero() and compose(p2, i1).is_zero()
            ok &= compose(i1, p1) + compose(i2, p2) == identity(BSObject((s, s)))
            for n in range(1, 6):
                y = (s,) * n
                mus = multiwords_expanding_to(y)
                total = None
                for mu in mus:
                    i, p = multiword_inclusion(ctx, mu), multiword_projection(ctx, mu)
                    for nu in mus:
                        pi = compose(multiword_projection(ctx, nu), i)
                        ok &= pi == identity(i.source) if nu == mu else pi.is_zero()
                    ip = compose(i, p)
                    total = ip if total is None else total + ip
                ok &= total == identity(BSObject(y))
    elapsed = time.time() - t0
    report(capsys, 2, ok and elapsed < 10, f"({elapsed:.1f}s)")
    assert ok
    assert elapsed < 10


def test_criterion_3_d_squared(capsys):
    t0 = time.time()
    bad = []
    for name, w in word_set():
        ctx = ring(name)
        for kind, C in (("cube", build_cube(ctx, tuple((s, 1) for s in w), check=False)),
                        ("reduced", build_reduced(ctx, w, check=False)),
                        ("negative", build_reduced_negative(ctx, w, check=False))):
            if not check_differential(C)["ok"]:
                bad.append((name, w, kind))
    elapsed = time.time() - t0
    report(capsys, 3, not bad and elapsed < 120, f"({len(word_set())} words, {elapsed:.0f}s)")
    assert not bad
    assert elapsed < 120


def test_criterion_4_projection_chain_map(capsys):
    bad = []
    for name, w in word_set():
        try:
            build_projection(ring(name), w)
        except Exception as exc:  # reported below with the word
            bad.append((name, w, repr(exc)))
    report(capsys, 4, not bad, f"({len(word_set())} words)")
    assert not bad


def test_criterion_5_pipeline(capsys):
    sweep = pipeline_sweep()
    single = {}
    for name in TWO:
        ctx = ring(name)
        for text in ("sstssts", "sstsstst"):
            start = time.time()
            res = reduce_pipeline(ctx, ctx.real.system.parse_word(text))
            single[(name, text)] = (time.time() - start, all(v for v in res.certificate.values() if isinstance(v, bool)))
    slowest = max(t for t, _ in single.values())
    ok = not sweep["failures"] and sweep["seconds"] < 600 and all(v for _, v in single.values()) and slowest < 300
    report(capsys, 5, ok, f"(set {sweep['seconds']:.0f}s, {sweep['steps']} eliminations; longest single {slowest:.0f}s)")
    assert not sweep["failures"]
    assert sweep["seconds"] < 600
    assert all(v for _, v in single.values()) and slowest < 300


def test_criterion_6_censuses(capsys):
    ctx = ring("A2")
    w = (0, 0, 1, 1, 0, 0)
    n_red, n_cube = len(build_reduced(ctx, w)), len(build_cube(ctx, tuple((s, 1) for s in w)))
    C = build_reduced(ctx, (0, 0, 0))
    objs = [sm.obj for q in sorted(C.degrees) for sm in C.degrees[q]]
    dot = build_enddot(ctx, (0,), 1)
    # broken strand and the difference of left and right multiplication by delta
    broken = compose(build_startdot(ctx, (), 0, 0), dot)
    comm = build_decorate(ctx, (0,), 0, ctx.delta[0]) - build_decorate(ctx, (0,), 1, ctx.delta[0])
    hand_diff = {}
    for (a, b), m in C.diff.items():
        want = {((0, 0, 0), (0, 0)): broken, ((0, 0), (0,)): comm, ((0,), ()): dot}[(a, b)]
        hand_diff[(a, b)] = want.rehome(m.source, m.target)
    hand = Complex(C.degrees, hand_diff)
    signs = compare_up_to_signs(hand, C)
    ok = (n_red == 23 and n_cube == 64 and len(C.diff) == 3 and "mismatch" not in signs
          and objs == [BSObject((0,), -2), BSObject((0,), 0), BSObject((0,), 2), BSObject((), 3)])
    report(capsys, 6, ok, f"(reduced {n_red}, cube {n_cube})")
    assert n_red == 23 and n_cube == 64
    assert objs == [BSObject((0,), -2), BSObject((0,), 0), BSObject((0,), 2), BSObject((), 3)]
    assert len(C.diff) == 3 and "mismatch" not in signs


def test_criterion_7_path_independence(capsys):
    sweep = pipeline_sweep()
    pairs_ok = all(p[-1] for p in sweep["pairs"])
    ok = not sweep["bad_loops"] and pairs_ok and len(sweep["pairs"]) == 10
    report(capsys, 7, ok, f"({sweep['loops']} loops, {len(sweep['pairs'])} vertex pairs)")
    assert not sweep["bad_loops"]
    assert len(sweep["pairs"]) == 10 and pairs_ok


def test_criterion_8_collapsibility(capsys):
    sweep = pipeline_sweep()
    ok = not sweep["bad_collapses"]
    report(capsys, 8, ok, f"({sweep['polytopes']} polytopal sets)")
    assert not sweep["bad_collapses"]


def test_criterion_9_decategorification(capsys):
    bad = []
    for name in TWO:
        ctx, tb = ring(name), tables()[name]
        for n in range(0, 7):
            for w in itertools.product(range(2), repeat=n):
                if not verify_euler(ctx, tb, w)["ok"]:
                    bad.append((name, w))
    sweep = pipeline_sweep()
    ok = not bad and not sweep["class_failures"]
    report(capsys, 9, ok)
    assert not bad
    assert not sweep["class_failures"]


def test_criterion_10_inverse_pair(capsys):
    # stretch goal: reported, never fails the run
    results = {}
    for name in ("A1", "A2", "B2", "universal2"):
        ctx = ring(name)
        for om in (((0, 1), (0, -1)), ((0, -1), (0, 1))):
            red, _ = greedy_reduce(refine_by_multiwords(ctx, build_cube(ctx, om)))
            objs = [(q, sm.obj) for q in red.degrees for sm in red.degrees[q]]
            results[(name, om)] = objs == [(0, BSObject(()))]
    ok = all(results.values())
    report(capsys, 10, ok, "(reported only)")
