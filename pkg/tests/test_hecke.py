import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rouquier.complexes import build_cube, build_mixed, build_reduced
from rouquier.coxeter import builtin_realization
from rouquier.hecke import (
    CapExceeded,
    LaurentPoly,
    add,
    class_of_complex,
    elimination_hook,
    enumerate_group,
    format_hecke,
    kl_generator,
    multiply,
    scale,
    standard,
    standard_braid,
    summand_class,
    times_delta,
    verify_euler,
)
from rouquier.chain import Summand
from rouquier.bimodule import BSObject

from conftest import ring

V, VINV, ONE = LaurentPoly.mono(1), LaurentPoly.mono(-1), LaurentPoly.mono(0)
S, T = 0, 1


def table(name):
    return enumerate_group(builtin_realization(name))


@pytest.mark.parametrize("name,order,longest", [
    ("A1", 2, 1), ("A1xA1", 4, 2), ("A2", 6, 3), ("B2", 8, 4), ("A3", 24, 6), ("B3", 48, 9)])
def test_group_orders(name, order, longest):
    tb = table(name)
    assert len(tb) == order and max(tb.lengths) == longest and tb.faithful


def test_infinite_group_hits_cap():
    with pytest.raises(CapExceeded):
        enumerate_group(builtin_realization("universal2"), cap=100)


def test_laurent_arithmetic():
    p = V + VINV
    assert p * p == LaurentPoly({2: 1, 0: 2, -2: 1})
    assert p - p == 0 and not (p - p)
    assert repr(LaurentPoly({1: 1, -1: -2})) == "v - 2v^-1"
    assert repr(LaurentPoly()) == "0"


def test_quadratic_relation():
    tb = table("B2")
    ds = standard(tb, (S,))
    assert standard(tb, (S, S)) == add({0: ONE}, scale(ds, VINV - V))
    bs = kl_generator(tb, S)
    assert multiply(tb, bs, bs) == scale(bs, V + VINV)


def test_braid_relations():
    for name, m in (("A2", 3), ("B2", 4)):
        tb = table(name)
        sts = tuple(itertools.islice(itertools.cycle((S, T)), m))
        tst = tuple(itertools.islice(itertools.cycle((T, S)), m))
        assert standard(tb, sts) == standard(tb, tst)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=6), st.lists(st.integers(0, 1), max_size=6),
       st.lists(st.integers(0, 1), max_size=4))
def test_multiplication_associative(a, b, c):
    tb = table("B2")
    x, y, z = standard(tb, a), standard(tb, b), kl_generator(tb, c[0] if c else 0)
    assert multiply(tb, multiply(tb, x, y), z) == multiply(tb, x, multiply(tb, y, z))
    assert multiply(tb, x, y) == standard(tb, tuple(a) + tuple(b))


def test_inverse_generator():
    tb = table("A2")
    assert multiply(tb, standard_braid(tb, ((S, -1),)), standard(tb, (S,))) == {0: ONE}
    assert times_delta(tb, standard_braid(tb, ((T, -1),)), T) == {0: ONE}


def test_classes_of_small_complexes():
    ctx = ring("A2")
    tb = enumerate_group(ctx.real)
    assert class_of_complex(tb, build_cube(ctx, ((S, 1),))) == standard(tb, (S,))
    assert class_of_complex(tb, build_reduced(ctx, ())) == {0: ONE}
    neg = class_of_complex(tb, build_cube(ctx, ((S, -1),)))
    pos = class_of_complex(tb, build_cube(ctx, ((S, 1),)))
    assert multiply(tb, neg, pos) == {0: ONE}
    om = ((S, 1), (T, -1), (S, 1))
    assert class_of_complex(tb, build_mixed(ctx, om)) == standard_braid(tb, om)


def test_verify_euler():
    for name in ("A2", "B2"):
        ctx = ring(name)
        tb = enumerate_group(ctx.real)
        for w in [(), (S, S), (S, T), (S, T, S, S)]:
            assert verify_euler(ctx, tb, w)["ok"]


def test_format_hecke():
    tb = table("A2")
    lines = format_hecke(tb, standard(tb, (S, S)))
    assert lines == ["(1) * d[e]", "(-v + v^-1) * d[s]"]


def test_elimination_hook():
    tb = table("A2")
    hook = elimination_hook(tb)
    a = Summand("a", BSObject((S,), 1))
    b = Summand("b", BSObject((S,), 1))
    assert hook(a, 0, b, 1)
    assert not hook(a, 0, b, 2)
    assert not hook(a, 0, Summand("c", BSObject((S,), 2)), 1)
    cls = summand_class(tb, (S,), 1, 1)
    assert cls == scale(kl_generator(tb, S), -V)
