import itertools
import math
from fractions import Fraction

import pytest

import oracles
from fukaya_workbench import INF, LabelledTree, MetricTree
from fukaya_workbench.trees import (classify_tuple, compositions, enumerate_stable_trees,
                                    fundamental_decomposition, glue_labels, glue_metrics,
                                    glue_trees, gluing_length, metric_from_text,
                                    metric_to_text, reduce_tuple, sexpr_to_shape,
                                    shape_to_sexpr, tree_from_text, tree_to_text)


def all_label_tuples(d, alphabet):
    return itertools.product(alphabet, repeat=d + 1)


# -- reduction ---------------------------------------------------------


def test_reduce_plain():
    rt = reduce_tuple(("L0", "L0", "L1", "L2", "L2", "L1"))
    assert rt.entries == (("L0", 2), ("L1", 1), ("L2", 2), ("L1", 1))
    assert (rt.m0_begin, rt.m0_end) == (2, 0)
    assert rt.fundamental == ("L0", "L1", "L2")
    assert rt.d_R == 3
    assert [rt.mbar(i) for i in range(rt.d_R + 2)] == [2, 1, 2, 1, 0]
    assert not rt.is_constant
    assert rt.to_text() == "((L0,2),L1,(L2,2),L1)"


def test_reduce_wrapping():
    rt = reduce_tuple(("L0", "L0", "L2", "L3", "L2", "L1", "L0"))
    assert rt.entries == (("L0", 3), ("L2", 1), ("L3", 1), ("L2", 1), ("L1", 1))
    assert (rt.m0_begin, rt.m0_end) == (2, 1)
    assert rt.d_R == 4
    assert [rt.mbar(i) for i in range(rt.d_R + 2)] == [2, 1, 1, 1, 1, 1]
    assert rt.fundamental == ("L0", "L2", "L3", "L1")
    assert rt.to_text() == "((L0,2+1),L2,L3,L2,L1)"


def test_reduce_constant():
    rt = reduce_tuple(("L", "L", "L", "L"))
    assert rt.is_constant
    assert rt.entries == (("L", 4),)
    assert (rt.m0_begin, rt.m0_end) == (4, 0)
    assert rt.d_R == 0
    assert rt.fundamental == ("L",)
    assert rt.to_text() == "((L,4))"


def test_reduce_errors():
    with pytest.raises(ValueError):
        reduce_tuple(())
    with pytest.raises(ValueError):
        reduce_tuple(("L",))
    with pytest.raises(ValueError):
        reduce_tuple(("A", "B")).mbar(5)


def test_reduce_block_sizes_sum():
    for labels in all_label_tuples(5, "AB"):
        rt = reduce_tuple(labels)
        total = sum(rt.mbar(i) for i in range(rt.d_R + 2))
        if rt.is_constant:
            assert total == len(labels)
        else:
            assert total == len(labels)
        # middle entries never repeat cyclically adjacently
        seq = [L for L, _ in rt.entries]
        assert all(seq[i] != seq[(i + 1) % len(seq)] for i in range(len(seq))) or len(seq) == 1


def test_classify():
    assert classify_tuple(("L0", "L1", "L2", "L3")) == "cyclically_different"
    assert classify_tuple(("L0", "L1", "L0", "L1")) == "cyclically_different"
    assert classify_tuple(("L0", "L1", "L2", "L0")) == "almost_cyclically_different"
    assert classify_tuple(("L", "L", "L", "L")) == "constant"
    assert classify_tuple(("L0", "L0")) == "constant"
    assert classify_tuple(("L0", "L0", "L1", "L2")) == "general_open"
    assert classify_tuple(("L0", "L1", "L1", "L0")) == "general_closed"
    with pytest.raises(ValueError):
        classify_tuple(("L",))


# -- shapes and counting -----------------------------------------------


def test_stable_counts():
    for d, n in oracles.SCHROEDER.items():
        assert len(enumerate_stable_trees(d)) == n


def test_stable_shapes_match_contraction_oracle():
    for d in range(2, 7):
        assert set(enumerate_stable_trees(d)) == oracles.stable_shapes_oracle(d)


def is_binary(shape):
    if shape is None:
        return True
    return len(shape) == 2 and all(is_binary(c) for c in shape)


def test_binary_counts_are_catalan():
    for d in range(2, 8):
        n = sum(1 for s in enumerate_stable_trees(d) if is_binary(s))
        assert n == oracles.catalan(d - 1)


def test_stable_needs_two_leaves():
    with pytest.raises(ValueError):
        enumerate_stable_trees(1)


def test_compositions():
    assert list(compositions(5, 2)) == [(1, 4), (2, 3), (3, 2), (4, 1)]
    assert list(compositions(3, 3)) == [(1, 1, 1)]


def test_edge_count_and_regions():
    for d in range(2, 6):
        labels = tuple("L%d" % (i % 3) for i in range(d + 1))
        for shape in enumerate_stable_trees(d):
            t = LabelledTree(shape, labels)
            assert len(t.edges) == len(t.vertex_paths) + t.d
            assert t.edge_regions(()) == (0, d)
            for i, p in enumerate(t.leaf_paths, start=1):
                assert t.edge_regions(p) == (i - 1, i)
            for p in t.interior_edges:
                a, b = t.edge_regions(p)
                assert 0 <= a < b <= d
            assert t.is_stable


def test_unstable_flag():
    t = LabelledTree(((None,),), ("A", "B"))
    assert not t.is_stable


def test_label_count_checked():
    with pytest.raises(ValueError):
        LabelledTree((None, None), ("A", "B"))


# -- serialization -----------------------------------------------------


def test_sexpr_round_trip():
    for d in range(2, 5):
        for shape in enumerate_stable_trees(d):
            text = shape_to_sexpr(shape)
            back, colored = sexpr_to_shape(text)
            assert back == shape and colored == frozenset()


def test_sexpr_colored():
    text = "(v (v* (leaf 1) (leaf 2)) (leaf 3))"
    shape, colored = sexpr_to_shape(text)
    assert shape == ((None, None), None)
    assert colored == frozenset({(0,)})
    assert shape_to_sexpr(shape, colored) == text


def test_sexpr_errors():
    with pytest.raises(ValueError):
        sexpr_to_shape("(v (leaf 2) (leaf 1))")
    with pytest.raises(ValueError):
        sexpr_to_shape("(v (leaf 1) (leaf 2)")
    with pytest.raises(ValueError):
        sexpr_to_shape("(w (leaf 1))")
    with pytest.raises(ValueError):
        sexpr_to_shape("(leaf 1)")
    with pytest.raises(ValueError):
        sexpr_to_shape("(v (leaf 1)) extra")


def test_tree_text_round_trip():
    t = LabelledTree(((None, None), None), ("L0", "L1", "L0", "L2"))
    text = tree_to_text(t, frozenset({(0,)}))
    back, colored = tree_from_text(text)
    assert back == t and colored == frozenset({(0,)})
    assert tree_to_text(back, colored) == text


def test_tree_text_comments_skipped():
    text = "# a comment\nlabels: A,B,C\n\n(v (leaf 1) (leaf 2))\n"
    t, _ = tree_from_text(text)
    assert t.labels == ("A", "B", "C")
    with pytest.raises(ValueError):
        tree_from_text("(v (leaf 1) (leaf 2))")


def test_metric_text_round_trip():
    t = LabelledTree(((None, None), (None, None)), ("A", "B", "A", "B", "A"))
    m = MetricTree(t, {(0,): Fraction(1, 3), (1,): INF})
    text = metric_to_text(m)
    assert "len e1 = 1/3" in text and "len e2 = inf" in text
    back, _ = metric_from_text(text)
    assert back == m
    assert metric_to_text(back) == text
    assert back.broken_edges == ((1,),)


def test_metric_validation():
    t = LabelledTree(((None, None), None), ("A", "B", "C", "D"))
    with pytest.raises(ValueError):
        MetricTree(t, {})
    with pytest.raises(ValueError):
        MetricTree(t, {(0,): Fraction(-1)})
    with pytest.raises(ValueError):
        MetricTree(t, {(0,): 0.5})
    with pytest.raises(ValueError):
        MetricTree(t, {(0,): 1, (1,): 1})


def test_metric_contraction_equality():
    labels = ("A", "B", "C", "D")
    nested = MetricTree(LabelledTree(((None, None), None), labels), {(0,): 0})
    corolla = MetricTree(LabelledTree((None, None, None), labels), {})
    assert nested == corolla
    positive = MetricTree(LabelledTree(((None, None), None), labels), {(0,): 1})
    assert nested != positive
    assert positive.contracted() == positive


# -- gluing ------------------------------------------------------------


def test_glue_labels_example():
    glued = glue_labels(("L0", "L2", "L1"), 1, ("L0", "L1", "L3"))
    assert glued == ("L0", "L2", "L1", "L3")


def test_glue_labels_equal_label_tree():
    glued = glue_labels(("L", "X", "L"), 1, ("L", "L", "L3"))
    assert glued == ("L", "X", "L", "L3")
    with pytest.raises(ValueError):
        glue_labels(("L", "X", "L"), 2, ("L", "L", "L3"))


def test_glue_labels_inadmissible():
    with pytest.raises(ValueError):
        glue_labels(("L0", "L2", "L1"), 2, ("L0", "L1", "L3"))
    with pytest.raises(ValueError):
        glue_labels(("L0", "L2", "L1"), 9, ("L0", "L1", "L3"))


def test_glue_trees_example():
    t1 = LabelledTree((None, None), ("L0", "L2", "L1"))
    t2 = LabelledTree((None, None), ("L0", "L1", "L3"))
    g, eg = glue_trees(t1, 1, t2)
    assert eg == (0,)
    assert g.shape == ((None, None), None)
    assert g.labels == ("L0", "L2", "L1", "L3")
    assert eg in g.interior_edges
    assert g.d == t1.d + t2.d - 1


def test_gluing_length():
    assert gluing_length(-1) == 0
    assert gluing_length(0) == INF
    assert abs(float(gluing_length(-math.exp(-3.0))) - 3.0) < 1e-12
    with pytest.raises(ValueError):
        gluing_length(0.5)
    with pytest.raises(ValueError):
        gluing_length(-2)


def test_glue_metrics():
    t1 = LabelledTree((None, None), ("L0", "L2", "L1"))
    t2 = LabelledTree((None, None), ("L0", "L1", "L3"))
    m1, m2 = MetricTree(t1, {}), MetricTree(t2, {})
    gm, eg = glue_metrics(m1, 1, m2, rho=-math.exp(-3.0))
    assert abs(float(gm.lengths[eg]) - 3.0) < 1e-12
    gm0, _ = glue_metrics(m1, 1, m2, rho=0)
    assert gm0.lengths[eg] == INF and gm0.broken_edges == (eg,)
    gm1, _ = glue_metrics(m1, 1, m2, rho=-1)
    assert gm1.lengths[eg] == 0
    gmx, _ = glue_metrics(m1, 1, m2, length=Fraction(7, 2))
    assert gmx.lengths[eg] == Fraction(7, 2)
    with pytest.raises(ValueError):
        glue_metrics(m1, 1, m2)
    with pytest.raises(ValueError):
        glue_metrics(m1, 1, m2, rho=-1, length=0)


def test_glue_metrics_nested_paths():
    # interior edges of the inner tree reappear under the new edge path
    t1 = LabelledTree(((None, None), None), ("L0", "L2", "L2", "L1"))
    t2 = LabelledTree((None, None), ("L0", "L1", "L3"))
    m1 = MetricTree(t1, {(0,): Fraction(5)})
    m2 = MetricTree(t2, {})
    gm, eg = glue_metrics(m1, 1, m2, length=2)
    assert eg == (0,)
    assert gm.lengths[eg + (0,)] == Fraction(5)
    assert gm.lengths[eg] == 2


def glue_cases(d1, d2, alphabet):
    shapes1 = enumerate_stable_trees(d1)
    shapes2 = enumerate_stable_trees(d2)
    for l1 in all_label_tuples(d1, alphabet):
        for l2 in all_label_tuples(d2, alphabet):
            for leaf in range(1, d2 + 1):
                try:
                    glue_labels(l1, leaf, l2)
                except ValueError:
                    continue
                for s1 in shapes1:
                    for s2 in shapes2:
                        yield LabelledTree(s1, l1), leaf, LabelledTree(s2, l2)


def test_glue_properties():
    seen = 0
    for t1, leaf, t2 in glue_cases(2, 3, "AB"):
        g, eg = glue_trees(t1, leaf, t2)
        seen += 1
        assert g.d == t1.d + t2.d - 1
        assert eg in g.interior_edges
        assert g.is_unilabelled(eg) == (t1.labels[0] == t1.labels[-1])
        # edges of t1 reappear below e_g, edges of t2 keep their paths
        for p in t1.edges:
            if p:
                assert eg + p in g.edges
        for p in t2.edges:
            if p != eg or not p:
                assert p in g.edges
        dec = fundamental_decomposition(g)
        all_uni = {e for forest in dec.uni_forests.values() for e in forest}
        assert all_uni | set(dec.red_edges) == set(g.edges)
        assert all_uni.isdisjoint(dec.red_edges)
    assert seen > 50


# -- fundamental decomposition -----------------------------------------


def test_decomposition_worked_example():
    t = LabelledTree((None, (None, None, None), None, None),
                     ("L0", "L0", "L1", "L1", "L1", "L0", "L2"))
    dec = fundamental_decomposition(t)
    assert dec.reduced.to_text() == "((L0,2),(L1,3),L0,L2)"
    assert dec.red_edges == ((), (1,), (1, 0), (2,), (3,))
    assert dec.red_exterior == (0, 2, 5, 6)
    assert dec.uni_forests == {"L0": ((0,),), "L1": ((1, 1), (1, 2)), "L2": ()}
    assert dec.exterior_numbering == {(0, 1): 1, (1, 1): 3, (1, 2): 4}


def test_decomposition_constant():
    t = LabelledTree(((None, None), None), ("L", "L", "L", "L"))
    dec = fundamental_decomposition(t)
    assert dec.red_edges == ()
    assert dec.red_exterior == ()
    assert dec.exterior_numbering == {(0, j): j for j in range(4)}
    assert set(dec.uni_forests["L"]) == set(t.edges)


def test_decomposition_numbering_is_bijective():
    for d in range(2, 5):
        for labels in all_label_tuples(d, "AB"):
            for shape in enumerate_stable_trees(d):
                t = LabelledTree(shape, labels)
                dec = fundamental_decomposition(t)
                uni_ext = {i for i, p in enumerate(t.exterior_edge_paths)
                           if t.is_unilabelled(p)}
                vals = list(dec.exterior_numbering.values())
                assert len(vals) == len(set(vals))
                assert set(vals) == uni_ext
