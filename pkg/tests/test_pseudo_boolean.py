import itertools
import random

import pytest

from dyncut import (Cap, FlowGraph, Posiform, brute_force_min, cut_cost,
                    evaluate, graph_of, poly_equal_up_to_constant,
                    polynomial_of, polynomial_of_graph, posiform_of)

from conftest import golden_graph, random_graph


def test_golden_posiform_and_polynomial():
    g = golden_graph()
    p = posiform_of(g)
    assert p.a_src == {1: Cap(4)}
    assert p.a_snk == {0: Cap(6), 1: Cap(2)}
    assert p.a_pair == {(0, 1): Cap(1), (1, 0): Cap(2)}
    assert p.constant == Cap(0)

    f = polynomial_of(p)
    assert f.l0 == Cap(8)
    assert f.l1 == {0: Cap(-4), 1: Cap(3)}
    assert f.l2 == {(0, 1): Cap(-3)}


def test_golden_residual_forms():
    # One unit pushed along source->1->0->sink, then three more units:
    # the residual networks keep identical non-constant coefficients.
    p1 = Posiform(2, a_src={1: Cap(3)}, a_snk={0: Cap(5), 1: Cap(2)},
                  a_pair={(0, 1): Cap(2), (1, 0): Cap(1)})
    f1 = polynomial_of(p1)
    assert f1.l0 == Cap(7)
    assert f1.l1 == {0: Cap(-4), 1: Cap(3)}
    assert f1.l2 == {(0, 1): Cap(-3)}

    p2 = Posiform(2, a_snk={0: Cap(4)}, a_pair={(0, 1): Cap(3)})
    f2 = polynomial_of(p2)
    assert f2.l0 == Cap(4)
    assert f2.l1 == {0: Cap(-4), 1: Cap(3)}
    assert f2.l2 == {(0, 1): Cap(-3)}

    f0 = polynomial_of_graph(golden_graph())
    assert poly_equal_up_to_constant(f0, f1) == Cap(1)
    assert poly_equal_up_to_constant(f0, f2) == Cap(4)


def test_empty_graph_zero_posiform():
    p = posiform_of(FlowGraph(3))
    assert not p.a_src and not p.a_snk and not p.a_pair
    assert polynomial_of(p).l0 == Cap(0)


def test_graph_posiform_bijection_random():
    rng = random.Random(2)
    for _ in range(50):
        g = random_graph(rng, rng.randint(1, 10))
        p = posiform_of(g)
        assert graph_of(p) == g
        q = posiform_of(graph_of(p))
        assert (q.a_src, q.a_snk, q.a_pair, q.constant) == \
            (p.a_src, p.a_snk, p.a_pair, p.constant)


def test_graph_of_rejects_negative_coefficient():
    with pytest.raises(ValueError):
        graph_of(Posiform(1, a_src={0: Cap(-1)}))


def test_evaluate_matches_term_by_term_oracle():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 8)
        g = random_graph(rng, n)
        p = posiform_of(g)
        f = polynomial_of(p)
        for bits in itertools.product((0, 1), repeat=n):
            x = list(bits)
            assert evaluate(f, x) == p.value_at(x)


def test_evaluate_edge_cases():
    f = polynomial_of_graph(golden_graph())
    assert evaluate(f, [1, 1]) == Cap(4)
    assert evaluate(f, [0, 0]) == f.l0
    with pytest.raises(ValueError):
        evaluate(f, [0, 1, 0])


def test_polynomial_equals_direct_cut_cost():
    # every assignment's polynomial value equals the edge-sum cut cost
    rng = random.Random(4)
    for _ in range(25):
        n = rng.randint(1, 8)
        g = random_graph(rng, n)
        g.add_accumulated_flow(Cap(rng.randint(0, 5)))
        f = polynomial_of_graph(g)
        for bits in itertools.product((0, 1), repeat=n):
            x = list(bits)
            assert evaluate(f, x) == cut_cost(g, x)


def test_quadratic_coefficients_never_positive():
    rng = random.Random(5)
    for _ in range(50):
        f = polynomial_of_graph(random_graph(rng, rng.randint(1, 10)))
        assert all(c <= Cap(0) for c in f.l2.values())


def test_brute_force_golden():
    best, argmins = brute_force_min(polynomial_of_graph(golden_graph()))
    assert best == Cap(4)
    assert argmins == {(1, 0), (1, 1)}


def test_brute_force_constant_polynomial():
    f = polynomial_of(Posiform(3, constant=Cap(7)))
    best, argmins = brute_force_min(f)
    assert best == Cap(7)
    assert len(argmins) == 8


def test_brute_force_guards_large_n():
    with pytest.raises(ValueError):
        brute_force_min(polynomial_of(Posiform(25)))


def test_poly_equal_up_to_constant():
    f = polynomial_of_graph(golden_graph())
    assert poly_equal_up_to_constant(f, f) == Cap(0)
    g = polynomial_of_graph(golden_graph())
    g.l1[1] = g.l1[1] + Cap(1)
    assert poly_equal_up_to_constant(f, g) is None


def test_dumps_are_stable():
    p = posiform_of(golden_graph())
    assert p.dump() == "4*x1 + 6*~x0 + 2*~x1 + 1*~x0*x1 + 2*~x1*x0"
    f = polynomial_of(p)
    assert f.dump() == "8 + -4*x0 + 3*x1 + -3*x0*x1"
