"""Planar rooted labelled trees, metric trees, and their gluing.

Shapes are nested tuples: a leaf is ``None``, an interior vertex is the
tuple of its children (left to right in the planar order).  A tree with
d leaves has exterior edges e_0 (the root edge) and e_1..e_d in
clockwise order; the regions between consecutive exterior edges carry
the labels L_0..L_d, with region i lying between e_i and e_{i+1} (so
leaf e_i separates regions i-1 and i, and the root edge separates
regions d and 0).

Edges are identified with the node below them: the path () names the
root edge, any other node path names the edge above that node.  A path
to a vertex gives an interior edge, a path to a leaf an exterior one.
Consequently |E(T)| = |V(T)| + d.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

INF = float("inf")


def leaf_count(shape) -> int:
    if shape is None:
        return 1
    return sum(leaf_count(c) for c in shape)


def compositions(n: int, k: int):
    """Ordered k-tuples of positive integers summing to n."""
    assert n >= k >= 1
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def node_at(shape, path):
    node = shape
    for i in path:
        node = node[i]
    return node


def _replace(shape, path, sub):
    if not path:
        return sub
    i = path[0]
    return shape[:i] + (_replace(shape[i], path[1:], sub),) + shape[i + 1:]


class LabelledTree:
    """A planar rooted tree whose d+1 regions carry labels."""

    def __init__(self, shape, labels):
        if not isinstance(shape, tuple) or len(shape) < 1:
            raise ValueError("shape must be a vertex (nonempty tuple of children)")
        self.shape = shape
        self.labels = tuple(labels)
        vertices = []
        leaves = []
        span = {}

        def walk(node, path):
            if node is None:
                leaves.append(path)
                i = len(leaves)
                span[path] = (i, i)
                return (i, i)
            if not isinstance(node, tuple) or len(node) < 1:
                raise ValueError("bad shape node %r" % (node,))
            vertices.append(path)
            first = last = None
            for k, child in enumerate(node):
                a, b = walk(child, path + (k,))
                if first is None:
                    first = a
                last = b
            span[path] = (first, last)
            return (first, last)

        walk(shape, ())
        self.vertex_paths = tuple(vertices)
        self.leaf_paths = tuple(leaves)
        self.span = span
        self.d = len(leaves)
        if len(self.labels) != self.d + 1:
            raise ValueError(
                "tree with %d leaves needs %d labels, got %d"
                % (self.d, self.d + 1, len(self.labels))
            )

    # -- edges ---------------------------------------------------------

    @property
    def interior_edges(self):
        """Interior edge paths in preorder."""
        return tuple(p for p in self.vertex_paths if p)

    @property
    def exterior_edge_paths(self):
        """Paths of e_0..e_d: the root edge, then the leaves in planar order."""
        return ((),) + self.leaf_paths

    @property
    def edges(self):
        """All edge paths, root edge first, then DFS order."""
        return tuple(sorted(set(self.vertex_paths) | set(self.leaf_paths)))

    def arity(self, path) -> int:
        return len(node_at(self.shape, path))

    def edge_regions(self, path):
        """Indices (i, j) of the two regions the edge separates.

        The subtree below the edge contains leaves a..b, so the edge
        separates regions a-1 and b; the root edge gives (0, d)."""
        a, b = self.span[path]
        return (a - 1, b)

    def edge_labels(self, path):
        i, j = self.edge_regions(path)
        return (self.labels[i], self.labels[j])

    def is_unilabelled(self, path) -> bool:
        a, b = self.edge_labels(path)
        return a == b

    @property
    def uni_interior_edges(self):
        return tuple(p for p in self.interior_edges if self.is_unilabelled(p))

    @property
    def floer_interior_edges(self):
        return tuple(p for p in self.interior_edges if not self.is_unilabelled(p))

    @property
    def is_stable(self) -> bool:
        return all(self.arity(p) >= 2 for p in self.vertex_paths)

    def __eq__(self, other):
        return (
            isinstance(other, LabelledTree)
            and self.shape == other.shape
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.shape, self.labels))

    def __repr__(self):
        return "LabelledTree(%s, labels=%s)" % (
            shape_to_sexpr(self.shape),
            ",".join(self.labels),
        )


# -- serialization -----------------------------------------------------


def shape_to_sexpr(shape, colored=frozenset()) -> str:
    """S-expression with numbered leaves; colored vertices print as v*."""
    counter = itertools.count(1)

    def rec(node, path):
        if node is None:
            return "(leaf %d)" % next(counter)
        head = "v*" if path in colored else "v"
        return "(%s %s)" % (head, " ".join(rec(c, path + (k,)) for k, c in enumerate(node)))

    return rec(shape, ())


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def sexpr_to_shape(text):
    """Parse a tree s-expression; returns (shape, colored vertex paths)."""
    tokens = _tokenize(text)
    pos = 0
    colored = set()
    leaf_seen = [0]

    def parse(path):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise ValueError("expected '(' at token %d of %r" % (pos, text))
        pos += 1
        if pos >= len(tokens):
            raise ValueError("truncated expression %r" % text)
        head = tokens[pos]
        pos += 1
        if head == "leaf":
            num = tokens[pos]
            pos += 1
            leaf_seen[0] += 1
            if not num.isdigit() or int(num) != leaf_seen[0]:
                raise ValueError("leaf numbers must run 1,2,... in planar order, got %r" % num)
            if tokens[pos] != ")":
                raise ValueError("expected ')' after leaf %s" % num)
            pos += 1
            return None
        if head not in ("v", "v*"):
            raise ValueError("unknown node head %r" % head)
        if head == "v*":
            colored.add(path)
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse(path + (len(children),)))
        if pos >= len(tokens):
            raise ValueError("missing ')' in %r" % text)
        pos += 1
        if not children:
            raise ValueError("vertex with no children in %r" % text)
        return tuple(children)

    shape = parse(())
    if pos != len(tokens):
        raise ValueError("trailing tokens in %r" % text)
    if shape is None:
        raise ValueError("a tree must have at least one vertex")
    return shape, frozenset(colored)


def tree_to_text(tree: LabelledTree, colored=frozenset()) -> str:
    return "labels: %s\n%s\n" % (",".join(tree.labels), shape_to_sexpr(tree.shape, colored))


def _significant_lines(text):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def tree_from_text(text: str):
    """Parse the labelled-tree format; returns (tree, colored paths).

    Lines: 'labels: L0,L1,...' then the s-expression; '#' comments and
    blank lines are skipped."""
    labels = None
    shape = None
    colored = frozenset()
    for line in _significant_lines(text):
        if line.startswith("labels:"):
            labels = tuple(x.strip() for x in line[len("labels:"):].split(",") if x.strip())
        elif line.startswith("len "):
            continue
        else:
            shape, colored = sexpr_to_shape(line)
    if labels is None or shape is None:
        raise ValueError("tree text needs a 'labels:' line and an s-expression")
    return LabelledTree(shape, labels), colored


# -- metric trees ------------------------------------------------------


def _coerce_length(v):
    if v == INF:
        return INF
    if isinstance(v, float):
        raise ValueError("finite lengths must be exact rationals, got float %r" % v)
    v = Fraction(v)
    if v < 0:
        raise ValueError("edge lengths must be nonnegative, got %s" % v)
    return v


class MetricTree:
    """A labelled tree with exact interior edge lengths in [0, inf].

    Exterior edges are implicitly infinite.  A length of INF marks a
    broken edge; zero-length edges are identified with their
    contraction, and equality compares contracted forms."""

    def __init__(self, tree: LabelledTree, lengths):
        self.tree = tree
        clean = {}
        for p, v in lengths.items():
            clean[p] = _coerce_length(v)
        if set(clean) != set(tree.interior_edges):
            raise ValueError("lengths must cover exactly the interior edges")
        self.lengths = clean

    @property
    def broken_edges(self):
        return tuple(p for p in self.tree.interior_edges if self.lengths[p] == INF)

    def contracted(self) -> "MetricTree":
        """Contract all zero-length interior edges."""

        def rec(node, path):
            # returns (shape, {relative path: length})
            children = []
            lens = {}
            for k, c in enumerate(node):
                cp = path + (k,)
                if c is None:
                    children.append(None)
                    continue
                cshape, clens = rec(c, cp)
                if self.lengths[cp] == 0:
                    base = len(children)
                    children.extend(cshape)
                    for rp, v in clens.items():
                        lens[(base + rp[0],) + rp[1:]] = v
                else:
                    idx = len(children)
                    children.append(cshape)
                    lens[(idx,)] = self.lengths[cp]
                    for rp, v in clens.items():
                        lens[(idx,) + rp] = v
            return tuple(children), lens

        shape, lens = rec(self.tree.shape, ())
        return MetricTree(LabelledTree(shape, self.tree.labels), lens)

    def __eq__(self, other):
        if not isinstance(other, MetricTree):
            return NotImplemented
        a, b = self.contracted(), other.contracted()
        return a.tree == b.tree and a.lengths == b.lengths

    def __repr__(self):
        return "MetricTree(%s)" % metric_to_text(self).replace("\n", "; ")


def _length_text(v) -> str:
    return "inf" if v == INF else str(v)


def metric_to_text(mt: MetricTree, colored=frozenset()) -> str:
    """Tree text plus one 'len e<k> = value' line per interior edge, in
    preorder; e1 is the first interior edge."""
    out = [tree_to_text(mt.tree, colored).rstrip("\n")]
    for k, p in enumerate(mt.tree.interior_edges, start=1):
        out.append("len e%d = %s" % (k, _length_text(mt.lengths[p])))
    return "\n".join(out) + "\n"


def metric_from_text(text: str):
    """Inverse of metric_to_text; returns (metric tree, colored paths)."""
    tree, colored = tree_from_text(text)
    interior = tree.interior_edges
    lengths = {}
    for line in _significant_lines(text):
        if not line.startswith("len "):
            continue
        body = line[len("len "):]
        if "=" not in body:
            raise ValueError("bad length line %r" % line)
        name, _, val = body.partition("=")
        name = name.strip()
        val = val.strip()
        if not (name.startswith("e") and name[1:].isdigit()):
            raise ValueError("bad edge name %r" % name)
        k = int(name[1:])
        if not 1 <= k <= len(interior):
            raise ValueError("edge %s out of range (tree has %d interior edges)" % (name, len(interior)))
        lengths[interior[k - 1]] = INF if val == "inf" else Fraction(val)
    return MetricTree(tree, lengths), colored


# -- label tuples ------------------------------------------------------


@dataclass(frozen=True)
class ReducedTuple:
    """Cyclic run-length reduction of a label tuple.

    entries[i] = (label, multiplicity); the 0-th multiplicity splits as
    m0_begin + m0_end, the run lengths of the leading label at the two
    ends of the unreduced tuple.  fundamental lists the distinct labels
    in order of first appearance."""

    entries: tuple
    m0_begin: int
    m0_end: int
    fundamental: tuple
    is_constant: bool

    @property
    def d_R(self) -> int:
        return len(self.entries) - 1

    def mbar(self, i: int) -> int:
        """Block sizes m̄_0..m̄_{d_R+1} of the unreduced tuple: the begin
        run, the middle multiplicities, and the end run."""
        if i == 0:
            return self.m0_begin
        if i == self.d_R + 1:
            return self.m0_end
        if 1 <= i <= self.d_R:
            return self.entries[i][1]
        raise ValueError("block index %d out of range" % i)

    def to_text(self) -> str:
        parts = []
        for i, (label, m) in enumerate(self.entries):
            if i == 0 and self.m0_end > 0:
                parts.append("(%s,%d+%d)" % (label, self.m0_begin, self.m0_end))
            elif m > 1:
                parts.append("(%s,%d)" % (label, m))
            else:
                parts.append(label)
        return "(%s)" % ",".join(parts)


def reduce_tuple(labels) -> ReducedTuple:
    """Merge cyclically adjacent equal labels into multiplicity blocks."""
    labels = tuple(labels)
    if len(labels) < 2:
        raise ValueError("a label tuple has at least two entries")
    runs = []
    for L in labels:
        if runs and runs[-1][0] == L:
            runs[-1][1] += 1
        else:
            runs.append([L, 1])
    if len(runs) == 1:
        L, m = runs[0]
        return ReducedTuple(((L, m),), m, 0, (L,), True)
    if runs[0][0] == runs[-1][0]:
        b, e = runs[0][1], runs[-1][1]
        entries = ((runs[0][0], b + e),) + tuple((L, m) for L, m in runs[1:-1])
    else:
        b, e = runs[0][1], 0
        entries = tuple((L, m) for L, m in runs)
    fundamental = []
    for L, _ in entries:
        if L not in fundamental:
            fundamental.append(L)
    return ReducedTuple(entries, b, e, tuple(fundamental), False)


def classify_tuple(labels) -> str:
    labels = tuple(labels)
    d = len(labels) - 1
    if d < 1:
        raise ValueError("a label tuple has at least two entries")
    if all(L == labels[0] for L in labels):
        return "constant"
    adjacent_distinct = all(labels[i] != labels[i + 1] for i in range(d))
    if adjacent_distinct and labels[0] != labels[d]:
        return "cyclically_different"
    if adjacent_distinct:
        return "almost_cyclically_different"
    if labels[0] != labels[d]:
        return "general_open"
    return "general_closed"


# -- gluing ------------------------------------------------------------


def glue_labels(labels1, leaf: int, labels2):
    """Label tuple of the tree obtained by gluing the root of tree 1
    onto leaf e_leaf of tree 2 (leaf is 1-based)."""
    labels1 = tuple(labels1)
    labels2 = tuple(labels2)
    d1 = len(labels1) - 1
    d2 = len(labels2) - 1
    if not 1 <= leaf <= d2:
        raise ValueError("leaf index %d out of range 1..%d" % (leaf, d2))
    if labels1[0] != labels1[d1]:
        if labels2[leaf - 1] != labels1[0] or labels2[leaf] != labels1[d1]:
            raise ValueError(
                "gluing not admissible: leaf %d borders (%s,%s) but tree 1 has outer labels (%s,%s)"
                % (leaf, labels2[leaf - 1], labels2[leaf], labels1[0], labels1[d1])
            )
    else:
        if not (labels1[0] == labels2[leaf - 1] == labels2[leaf]):
            raise ValueError(
                "gluing not admissible: equal-label tree 1 (label %s) needs leaf %d to border the same label, found (%s,%s)"
                % (labels1[0], leaf, labels2[leaf - 1], labels2[leaf])
            )
    return labels2[:leaf] + labels1[1:d1] + labels2[leaf:]


def glue_trees(t1: LabelledTree, leaf: int, t2: LabelledTree):
    """Glue the root of t1 onto leaf e_leaf of t2.

    Returns (glued tree, path of the new interior edge e_g).  The glued
    tree has d1 + d2 - 1 leaves; edges of t2 keep their paths and edges
    of t1 are prefixed by the former leaf path."""
    labels = glue_labels(t1.labels, leaf, t2.labels)
    path = t2.leaf_paths[leaf - 1]
    shape = _replace(t2.shape, path, t1.shape)
    return LabelledTree(shape, labels), path


def gluing_length(rho):
    """Interior length -ln(-rho) of the new edge for a gluing parameter
    rho in [-1, 0]; rho = 0 gives a broken edge, rho = -1 length 0."""
    r = float(rho)
    if not -1.0 <= r <= 0.0:
        raise ValueError("gluing parameter must lie in [-1, 0], got %r" % rho)
    if r == 0.0:
        return INF
    return Fraction(max(0.0, -math.log(-r)))


def glue_metrics(m1: MetricTree, leaf: int, m2: MetricTree, rho=None, length=None):
    """Glue metric trees; the new edge takes the explicit length, or
    -ln(-rho) for a gluing parameter rho in [-1, 0]."""
    if (rho is None) == (length is None):
        raise ValueError("give exactly one of rho and length")
    val = gluing_length(rho) if length is None else _coerce_length(length)
    tree, eg = glue_trees(m1.tree, leaf, m2.tree)
    lengths = {eg + p: v for p, v in m1.lengths.items()}
    lengths.update(m2.lengths)
    lengths[eg] = val
    return MetricTree(tree, lengths), eg


# -- enumeration -------------------------------------------------------


@lru_cache(maxsize=None)
def _stable_shapes(d: int):
    if d == 1:
        return (None,)
    out = []
    for k in range(2, d + 1):
        for comp in compositions(d, k):
            for children in itertools.product(*(_stable_shapes(m) for m in comp)):
                out.append(tuple(children))
    return tuple(out)


def enumerate_stable_trees(d: int):
    """All planar rooted shapes with d leaves and every vertex of arity
    at least 2, in a fixed canonical order (root arity ascending)."""
    if d < 2:
        raise ValueError("stable trees need d >= 2")
    return list(_stable_shapes(d))


# -- fundamental decomposition -----------------------------------------


@dataclass
class TreeDecomposition:
    """Split of a labelled tree into its reduced part and unilabelled
    forests.

    red_edges: every edge (interior or exterior) whose two regions carry
    different labels; removing the others from T leaves T_red.
    red_exterior: the exterior indices of T that survive, in cyclic
    order; position t gives e_t of the reduced tree.
    uni_forests: unilabelled edges grouped by their label, keyed in
    fundamental order.
    exterior_numbering: (i, j) -> exterior index of T for the j-th
    exterior edge of the i-th unilabelled block."""

    reduced: ReducedTuple
    red_edges: tuple
    red_exterior: tuple
    uni_forests: dict
    exterior_numbering: dict


def fundamental_decomposition(tree: LabelledTree) -> TreeDecomposition:
    rt = reduce_tuple(tree.labels)
    red_edges = tuple(e for e in tree.edges if not tree.is_unilabelled(e))
    ext_paths = tree.exterior_edge_paths
    uni_ext = {i for i in range(tree.d + 1) if tree.is_unilabelled(ext_paths[i])}
    red_exterior = tuple(i for i in range(tree.d + 1) if i not in uni_ext)

    forests = {L: [] for L in rt.fundamental}
    for e in tree.edges:
        if tree.is_unilabelled(e):
            forests[tree.edge_labels(e)[0]].append(e)
    uni_forests = {L: tuple(v) for L, v in forests.items()}

    numbering = {}
    if rt.is_constant:
        for j in range(tree.d + 1):
            numbering[(0, j)] = j
    else:
        c = 0
        for i in range(rt.d_R + 2):
            m = rt.mbar(i)
            if i == 0:
                js = range(0, m) if rt.m0_end > 0 else range(1, m)
            else:
                js = range(1, m)
            for j in js:
                numbering[(i, j)] = c + j
            c += m
    assert set(numbering.values()) == uni_ext
    return TreeDecomposition(rt, red_edges, red_exterior, uni_forests, numbering)
