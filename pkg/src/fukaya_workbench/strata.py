"""Stratifications of cluster and stacked compactifications.

Cluster strata are pairs (stable labelled tree, number of broken
unilabelled edges); the codimension is the number of interior edges
whose regions carry different labels plus the broken count.  Stacked
strata are colored trees: a set of vertices, one on every leaf-to-root
geodesic, all at equal metric distance from the root.  The module also
carries the intrinsic width recursion for glued surfaces and the
gluing-length chart at a stacking parameter.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .trees import (
    LabelledTree,
    MetricTree,
    compositions,
    enumerate_stable_trees,
)


def _path_text(path) -> str:
    return "r" + "".join(".%d" % i for i in path)


def _colored_text(colored) -> str:
    return "{%s}" % ",".join(_path_text(p) for p in sorted(colored))


@dataclass(frozen=True)
class Stratum:
    tree: LabelledTree
    broken_count: int
    codim: int
    dim: int
    colored: frozenset = frozenset()
    generalized_corner: bool = False

    def report_line(self) -> str:
        from .trees import shape_to_sexpr

        line = "dim=%d codim=%d tree=%s broken=%d colored=%s" % (
            self.dim,
            self.codim,
            shape_to_sexpr(self.tree.shape, self.colored),
            self.broken_count,
            _colored_text(self.colored),
        )
        if self.generalized_corner:
            line += " corner=generalized"
        return line


# -- cluster strata ----------------------------------------------------


def cluster_strata_for_shape(labels, shape):
    """Strata carried by one stable shape: broken counts k from 0 up to
    the number of unilabelled interior edges."""
    labels = tuple(labels)
    d = len(labels) - 1
    t = LabelledTree(shape, labels)
    floer = len(t.floer_interior_edges)
    uni = len(t.uni_interior_edges)
    out = []
    for k in range(uni + 1):
        codim = floer + k
        out.append(Stratum(t, k, codim, (d - 2) - codim))
    return out


def enumerate_cluster_strata(labels):
    """One stratum per (stable labelled tree, broken count k) with
    0 <= k <= number of unilabelled interior edges."""
    labels = tuple(labels)
    d = len(labels) - 1
    if d < 2:
        raise ValueError("cluster strata need d >= 2")
    out = []
    for shape in enumerate_stable_trees(d):
        out.extend(cluster_strata_for_shape(labels, shape))
    return out


def f_vector(strata):
    """Counts by dimension, dimension 0 first."""
    if not strata:
        return []
    top = max(s.dim for s in strata)
    assert min(s.dim for s in strata) >= 0
    counts = [0] * (top + 1)
    for s in strata:
        counts[s.dim] += 1
    return counts


def facet_term_bijection(labels):
    """Pair each codimension-1 stratum with the operadic splitting it
    represents: (i, k, j) means k consecutive inputs starting after the
    first i are consumed by the inner operation, i + k + j = d.

    A facet is either a two-vertex tree with one finite interior edge,
    or a one-broken-edge stratum.  A broken stratum whose tree has
    several unilabelled interior edges aggregates more than one
    splitting and gets descriptor None; on tuples with pairwise
    distinct labels every facet has a unique descriptor."""
    labels = tuple(labels)
    d = len(labels) - 1
    out = []
    for s in enumerate_cluster_strata(labels):
        if s.codim != 1:
            continue
        t = s.tree
        if s.broken_count == 0:
            edges = t.floer_interior_edges
            assert len(edges) == 1
            e = edges[0]
        else:
            uni = t.uni_interior_edges
            e = uni[0] if len(uni) == 1 else None
        if e is None:
            out.append((s, None))
        else:
            a, b = t.span[e]
            out.append((s, (a - 1, b - a + 1, d - b)))
    return out


# -- colored trees -----------------------------------------------------


@dataclass(frozen=True)
class ColoredTree:
    tree: LabelledTree
    colored: frozenset

    def __post_init__(self):
        extra = self.colored - set(self.tree.vertex_paths)
        if extra:
            raise ValueError("colored set names non-vertices: %s" % sorted(extra))


@dataclass(frozen=True)
class ColoringReport:
    valid: bool
    violation: str | None
    witness: MetricTree | None
    constraints: tuple


def _edge_names(tree: LabelledTree):
    return {p: "e%d" % k for k, p in enumerate(tree.interior_edges, start=1)}


def _depth_edges(path):
    """Interior edges on the geodesic from the root vertex to the vertex
    at path: all nonempty prefixes."""
    return [path[:i] for i in range(1, len(path) + 1)]


def validate_coloring(ct: ColoredTree) -> ColoringReport:
    """Check the three coloring conditions and build an exact witness
    metric when they hold.

    Conditions: every leaf-to-root geodesic meets exactly one colored
    vertex; every 2-valent vertex is colored; all colored vertices are
    equidistant from the root.  The first two are combinatorial; the
    third always has a strictly positive solution once they hold, and
    the witness realizes the colored vertices at distance 1."""
    t = ct.tree
    colored = ct.colored
    for idx, lp in enumerate(t.leaf_paths, start=1):
        hits = sum(1 for i in range(len(lp)) if lp[:i] in colored)
        if hits != 1:
            return ColoringReport(
                False,
                "geodesic of leaf %d meets %d colored vertices" % (idx, hits),
                None,
                (),
            )
    for p in t.vertex_paths:
        if t.arity(p) == 1 and p not in colored:
            return ColoringReport(
                False,
                "vertex %s has valency 2 but is not colored" % _path_text(p),
                None,
                (),
            )

    # Witness: colored vertices at distance 1.  Edges into a colored
    # vertex close the remaining gap, edges staying below the color line
    # close half of it, edges above it get length 1.
    depth = {(): Fraction(0)}
    lengths = {}
    for p in t.vertex_paths:
        if not p:
            continue
        parent = p[:-1]
        above = any(p[:i] in colored for i in range(len(p)))
        if p in colored:
            lengths[p] = Fraction(1) - depth[parent]
        elif above:
            lengths[p] = Fraction(1)
        else:
            lengths[p] = (Fraction(1) - depth[parent]) / 2
        depth[p] = depth[parent] + lengths[p]
    witness = MetricTree(t, lengths)

    names = _edge_names(t)
    order = sorted(colored)
    constraints = []
    for other in order[1:]:
        lhs = set(_depth_edges(order[0]))
        rhs = set(_depth_edges(other))
        common = lhs & rhs
        left = sorted(lhs - common)
        right = sorted(rhs - common)
        constraints.append(
            "%s = %s"
            % (
                " + ".join(names[e] for e in left),
                " + ".join(names[e] for e in right),
            )
        )
    return ColoringReport(True, None, witness, tuple(constraints))


def _rank(rows):
    """Rank of a list of Fraction rows by Gaussian elimination."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / lead[col]
                rows[i] = [a - f * b for a, b in zip(rows[i], lead)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def coloring_cone_dim(ct: ColoredTree) -> int:
    """Dimension of the metric cone of a valid coloring:
    |interior edges| + 1 - |colored vertices|, with an internal
    cross-check against the corank of the equidistance system."""
    report = validate_coloring(ct)
    if not report.valid:
        raise ValueError("invalid coloring: %s" % report.violation)
    t = ct.tree
    interior = t.interior_edges
    index = {e: i for i, e in enumerate(interior)}
    order = sorted(ct.colored)
    rows = []
    for other in order[1:]:
        row = [Fraction(0)] * len(interior)
        for e in _depth_edges(order[0]):
            row[index[e]] += 1
        for e in _depth_edges(other):
            row[index[e]] -= 1
        rows.append(row)
    corank = len(interior) - _rank(rows)
    formula = len(interior) + 1 - len(ct.colored)
    assert corank == formula
    return formula


def generalized_corner_flag(ct: ColoredTree) -> bool:
    """True when the vertices strictly below the color line do not form
    a chain under the ancestor order; then the equidistance constraints
    come from several branches at once and the metric cone fails to be
    a simplicial corner."""
    below = [
        p
        for p in ct.tree.vertex_paths
        if p not in ct.colored and not any(p[:i] in ct.colored for i in range(len(p)))
    ]
    for a, b in itertools.combinations(below, 2):
        if a != b[: len(a)] and b != a[: len(b)]:
            return True
    return False


# -- stacked strata ----------------------------------------------------


@lru_cache(maxsize=None)
def _loose_shapes(d: int, parent_unary: bool):
    """Planar shapes with d leaves and arities >= 1; unary vertices
    never sit directly under unary vertices (two colored vertices on one
    geodesic are impossible anyway)."""
    out = []
    kmin = 2 if parent_unary else 1
    for k in range(kmin, d + 1):
        for comp in compositions(d, k):
            options = []
            for m in comp:
                subs = [None] if m == 1 else []
                subs.extend(_loose_shapes(m, k == 1))
                options.append(subs)
            for children in itertools.product(*options):
                out.append(tuple(children))
    return tuple(out)


def _has_unary(node) -> bool:
    if node is None:
        return False
    if len(node) == 1:
        return True
    return any(_has_unary(c) for c in node)


def _colorings(shape, path=()):
    """All valid colored sets for the subtree: either color the root of
    the subtree (legal when nothing below is 2-valent), or leave it
    uncolored (needs arity >= 2 and a colored set in every child)."""
    options = []
    if not any(_has_unary(c) for c in shape):
        options.append(frozenset((path,)))
    if len(shape) >= 2 and all(c is not None for c in shape):
        for combo in itertools.product(
            *(_colorings(c, path + (k,)) for k, c in enumerate(shape))
        ):
            options.append(frozenset().union(*combo))
    return options


def stacked_shapes(d: int):
    """Shapes admitting at least one coloring, in canonical order."""
    if d < 1:
        raise ValueError("stacked strata need d >= 1")
    return list(_loose_shapes(d, False))


def stacked_strata_for_shape(labels, shape):
    """Colored strata carried by one shape; dim sums valency - 3 over
    uncolored and valency - 2 over colored vertices."""
    labels = tuple(labels)
    d = len(labels) - 1
    t = LabelledTree(shape, labels)
    out = []
    for colored in _colorings(shape):
        dim = 0
        for p in t.vertex_paths:
            valency = t.arity(p) + 1
            dim += valency - 2 if p in colored else valency - 3
        ct = ColoredTree(t, colored)
        out.append(
            Stratum(t, 0, (d - 1) - dim, dim, colored, generalized_corner_flag(ct))
        )
    return out


def enumerate_stacked_strata(labels):
    """Colored trees with d leaves, against top dimension d - 1."""
    labels = tuple(labels)
    out = []
    for shape in stacked_shapes(len(labels) - 1):
        out.extend(stacked_strata_for_shape(labels, shape))
    return out


# -- intrinsic widths --------------------------------------------------


@dataclass(frozen=True)
class Surface:
    """A disc with d boundary inputs; all widths vanish."""

    d: int


@dataclass(frozen=True)
class Glue:
    """Glue the root of the inner surface into input slot n (1-based) of
    the outer surface, with the given neck length."""

    outer: object
    n: int
    inner: object
    length: Fraction


@dataclass(frozen=True)
class WidthProfile:
    widths: tuple

    @property
    def d(self) -> int:
        return len(self.widths)

    def w(self, i: int) -> Fraction:
        """1-based access."""
        return self.widths[i - 1]

    def to_text(self) -> str:
        return "(%s)" % ",".join(str(x) for x in self.widths)


def intrinsic_width(expr) -> WidthProfile:
    """Width profile of a glued surface: gluing with neck length rho
    into slot n splices the inner profile into the outer one at slot n,
    shifting every inner width by rho plus the accumulated width of the
    slot itself.  The slot term is what lets inputs recall the lengths
    of earlier gluings; without it the profile would depend on the
    order in which the same surface is assembled."""
    if isinstance(expr, Surface):
        if expr.d < 2:
            raise ValueError("a surface needs at least 2 inputs, got %d" % expr.d)
        return WidthProfile((Fraction(0),) * expr.d)
    if isinstance(expr, Glue):
        outer = intrinsic_width(expr.outer)
        inner = intrinsic_width(expr.inner)
        if not 1 <= expr.n <= outer.d:
            raise ValueError("glue slot %d out of range 1..%d" % (expr.n, outer.d))
        rho = Fraction(expr.length)
        if rho < 0:
            raise ValueError("neck length must be nonnegative, got %s" % rho)
        n = expr.n
        carried = outer.widths[n - 1] + rho
        widths = (
            outer.widths[: n - 1]
            + tuple(x + carried for x in inner.widths)
            + outer.widths[n:]
        )
        return WidthProfile(widths)
    raise ValueError("not a width expression: %r" % (expr,))


def width_expr_to_text(expr) -> str:
    if isinstance(expr, Surface):
        return "(surface %d)" % expr.d
    if isinstance(expr, Glue):
        return "(glue %s %d %s %s)" % (
            width_expr_to_text(expr.outer),
            expr.n,
            width_expr_to_text(expr.inner),
            Fraction(expr.length),
        )
    raise ValueError("not a width expression: %r" % (expr,))


def width_expr_from_text(text: str):
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise ValueError("expected '(' in width expression %r" % text)
        pos += 1
        head = tokens[pos]
        pos += 1
        if head == "surface":
            d = int(tokens[pos])
            pos += 1
            node = Surface(d)
        elif head == "glue":
            outer = parse()
            n = int(tokens[pos])
            pos += 1
            inner = parse()
            length = Fraction(tokens[pos])
            pos += 1
            node = Glue(outer, n, inner, length)
        else:
            raise ValueError("unknown width expression head %r" % head)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError("missing ')' in width expression %r" % text)
        pos += 1
        return node

    out = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens in width expression %r" % text)
    return out


def stacked_gluing_lengths(rho, child_widths, root_widths):
    """Edge lengths l_i = e^(-1/rho) - w_child_i - w_root_i produced by
    a stacking parameter rho in (-1, 0); the i-th entries pair the i-th
    colored vertex (planar order) with the i-th input of the root
    surface."""
    r = float(rho)
    if not -1.0 < r < 0.0:
        raise ValueError("stacking parameter must lie in (-1, 0), got %r" % rho)
    if isinstance(root_widths, WidthProfile):
        root_widths = root_widths.widths
    rw = [float(x) for x in root_widths]
    cw = [float(x) for x in child_widths]
    if len(cw) != len(rw):
        raise ValueError(
            "need one child width per root input, got %d and %d" % (len(cw), len(rw))
        )
    g = math.exp(-1.0 / r)
    out = [g - a - b for a, b in zip(cw, rw)]
    if any(v < 0 for v in out):
        raise ValueError(
            "stacking parameter %r is outside the chart domain for these widths" % rho
        )
    return out
