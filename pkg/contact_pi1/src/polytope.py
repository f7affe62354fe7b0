"""
Rational polytopes {x : <x, u_i> >= lambda_i} and their Morse data.

Vertices, edges and active sets are computed once at construction. Points
are tuples of Fractions; normals are primitive integer vectors.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, count
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from contact_pi1.src.cone import MomentCone, build_cone, pointed_rays
from contact_pi1.src.errors import (
    BadDimension,
    DuplicateNormal,
    Empty,
    NonIntegerOffset,
    NotDelzant,
    NotGeneric,
    NotIntegral,
    NotSimple,
    RedundantFacet,
    Unbounded,
    ZeroNormal,
)
from contact_pi1.src.lattice import (
    AbelianGroup,
    IntMatrix,
    IntVector,
    det,
    gcd_all,
    primitive_part,
    rank,
    solve_exact,
)
from contact_pi1.utils.logger import get_logger, log_validation_diagnostics

logger = get_logger("polytope")

Point = Tuple[Fraction, ...]
Offset = Union[int, Fraction]


def fraction_text(value: Fraction) -> Union[int, str]:
    """JSON form of an exact rational: an int, or "p/q"."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def _clear_denominators(v: Sequence[Fraction]) -> IntVector:
    scale = math.lcm(*(Fraction(x).denominator for x in v)) if v else 1
    return tuple(int(Fraction(x) * scale) for x in v)


def _affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull; -1 for no points."""
    if not points:
        return -1
    base = points[0]
    differences = [_clear_denominators([a - b for a, b in zip(point, base)]) for point in points[1:]]
    differences = [d for d in differences if any(d)]
    if not differences:
        return 0
    return rank(IntMatrix.from_rows(differences))


@dataclass(frozen=True)
class Halfspace:
    """<x, normal> >= offset."""

    normal: IntVector
    offset: Fraction

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return sum((Fraction(x) * u for x, u in zip(point, self.normal)), Fraction(0))

    def contains(self, point: Sequence[Fraction]) -> bool:
        return self.value(point) >= self.offset

    def is_tight(self, point: Sequence[Fraction]) -> bool:
        return self.value(point) == self.offset


@dataclass(frozen=True)
class Vertex:
    point: Point
    active: FrozenSet[int]

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.point)

    def render(self) -> List[Union[int, str]]:
        return [fraction_text(x) for x in self.point]


@dataclass(frozen=True)
class Edge:
    endpoints: Tuple[Vertex, Vertex]
    direction: IntVector
    lattice_length: Optional[int] = None


@dataclass(frozen=True)
class VertexDeterminant:
    """Diagnostics for one vertex: facets through it and |det| of their normals (None if not simple)."""

    vertex: Vertex
    facets: Tuple[int, ...]
    determinant: Optional[int]

    def describe(self) -> str:
        if self.determinant is None:
            return f"vertex {self.vertex.render()} lies on {len(self.facets)} facets {list(self.facets)}"
        return f"vertex {self.vertex.render()} on facets {list(self.facets)} has |det| = {self.determinant}"


@dataclass(frozen=True)
class DelzantCheck:
    delzant: bool
    failures: Tuple[VertexDeterminant, ...] = ()

    def __bool__(self) -> bool:
        return self.delzant


@dataclass(frozen=True)
class MorseData:
    X: IntVector
    index_by_vertex: Dict[Vertex, int]
    index2_down_edges: Tuple[Tuple[Vertex, Edge], ...]

    @property
    def critical_order(self) -> List[Vertex]:
        """Vertices by increasing critical value."""
        return list(self.index_by_vertex)

    @property
    def minimum(self) -> Vertex:
        return self.critical_order[0]

    @property
    def maximum(self) -> Vertex:
        return self.critical_order[-1]

    def count_of_index(self, index: int) -> int:
        return sum(1 for value in self.index_by_vertex.values() if value == index)


@dataclass(frozen=True)
class OrbifoldData:
    order_by_vertex: Dict[Vertex, int]
    m_lcm: int


@dataclass(frozen=True)
class FiltrationStep:
    """Critical vertex and the fundamental group of the sublevel set just above it."""

    vertex: Vertex
    index: int
    pi1: AbelianGroup


@dataclass(frozen=True)
class RationalPolytope:
    """Bounded, nonempty, full-dimensional polytope with irredundant halfspaces."""

    dim: int
    halfspaces: Tuple[Halfspace, ...]
    vertices: Tuple[Vertex, ...]
    edges: Optional[Tuple[Edge, ...]] = None
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def d(self) -> int:
        return len(self.halfspaces)

    @property
    def is_simple(self) -> bool:
        return all(len(vertex.active) == self.dim for vertex in self.vertices)

    def normals(self) -> List[IntVector]:
        return [h.normal for h in self.halfspaces]

    def offsets(self) -> List[Fraction]:
        return [h.offset for h in self.halfspaces]

    @classmethod
    def from_inequalities(cls, rows: Sequence[Tuple[Sequence[int], Offset]], dim: int) -> "RationalPolytope":
        """Build from (normal, offset) pairs meaning <x, normal> >= offset."""
        return cls.from_halfspaces(
            [Halfspace(tuple(int(x) for x in normal), Fraction(offset)) for normal, offset in rows], dim
        )

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace], dim: int,
                        warnings: Sequence[str] = ()) -> "RationalPolytope":
        """
        Normalize halfspaces and compute vertices and edges.

        Args:
            halfspaces: Halfspaces with integer (not necessarily primitive) normals
            dim: Polytope dimension n
            warnings: Warnings carried over from the caller

        Returns:
            RationalPolytope
        """
        if dim < 1:
            raise BadDimension(f"polytope dimension must be at least 1, got {dim}")
        if not halfspaces:
            raise Unbounded("no halfspaces")

        warnings = list(warnings)
        normalized: List[Halfspace] = []
        for index, h in enumerate(halfspaces):
            if len(h.normal) != dim:
                raise BadDimension(f"halfspace {index} has a normal of length {len(h.normal)}, expected {dim}")
            if not any(h.normal):
                raise ZeroNormal(index)
            primitive, g = primitive_part(h.normal)
            if g > 1:
                warnings.append(f"halfspace {index} divided by {g}")
            normalized.append(Halfspace(primitive, Fraction(h.offset) / g))

        seen: Dict[Halfspace, int] = {}
        for index, h in enumerate(normalized):
            if h in seen:
                raise DuplicateNormal(seen[h], index)
            seen[h] = index

        normals = [h.normal for h in normalized]
        lineality, recession = pointed_rays(normals, dim)
        if lineality or recession:
            logger.warning(f"Recession cone is nonzero: lineality {len(lineality)}, rays {len(recession)}")
            raise Unbounded("halfspaces do not bound a polytope", recession_rays=[r.generator for r in recession])

        vertices = _enumerate_vertices(normalized, dim)
        if _affine_rank([v.point for v in vertices]) != dim:
            raise BadDimension("halfspaces cut out a polytope of lower dimension")
        for index in range(len(normalized)):
            face_dim = _affine_rank([v.point for v in vertices if index in v.active])
            if face_dim != dim - 1:
                raise RedundantFacet(index, face_dim)

        edges = _edges(vertices, dim) if all(len(v.active) == dim for v in vertices) else None
        return cls(dim, tuple(normalized), tuple(vertices), edges, tuple(warnings))


def _enumerate_vertices(halfspaces: Sequence[Halfspace], dim: int) -> List[Vertex]:
    found: Dict[Point, Vertex] = {}
    for subset in combinations(range(len(halfspaces)), dim):
        system = IntMatrix.from_rows([halfspaces[i].normal for i in subset], cols=dim)
        if det(system) == 0:
            continue
        point = solve_exact(system, [halfspaces[i].offset for i in subset])
        if point in found or not all(h.contains(point) for h in halfspaces):
            continue
        active = frozenset(i for i, h in enumerate(halfspaces) if h.is_tight(point))
        found[point] = Vertex(point, active)
    if not found:
        raise Empty("halfspaces have empty intersection")
    return [found[point] for point in sorted(found)]


def _edges(vertices: Sequence[Vertex], dim: int) -> Tuple[Edge, ...]:
    edges = []
    for a, b in combinations(vertices, 2):
        if len(a.active & b.active) != dim - 1:
            continue
        difference = [y - x for x, y in zip(a.point, b.point)]
        direction, _ = primitive_part(_clear_denominators(difference))
        length = None
        if a.is_integral and b.is_integral:
            _, length = primitive_part([int(x) for x in difference])
        edges.append(Edge((a, b), direction, length))
    return tuple(edges)


def enumerate_vertices(p: RationalPolytope) -> List[Vertex]:
    return list(p.vertices)


def edge_graph(p: RationalPolytope) -> List[Edge]:
    if p.edges is None:
        raise NotSimple("edge graph needs a simple polytope",
                        vertices=[v.render() for v in p.vertices if len(v.active) != p.dim])
    return list(p.edges)


def is_delzant(p: RationalPolytope) -> DelzantCheck:
    """Simple, with the primitive normals at every vertex forming a lattice basis."""
    failures = []
    for vertex in p.vertices:
        facets = tuple(sorted(vertex.active))
        if len(facets) != p.dim:
            failures.append(VertexDeterminant(vertex, facets, None))
            continue
        determinant = abs(det(IntMatrix.from_rows([p.halfspaces[i].normal for i in facets], cols=p.dim)))
        if determinant != 1:
            failures.append(VertexDeterminant(vertex, facets, determinant))
    log_validation_diagnostics("Delzant", [failure.describe() for failure in failures])
    return DelzantCheck(delzant=not failures, failures=tuple(failures))


def is_integral(p: RationalPolytope) -> bool:
    return all(vertex.is_integral for vertex in p.vertices)


def _functional_values(p: RationalPolytope, X: Sequence[int]) -> List[Fraction]:
    return [sum((x * c for x, c in zip(v.point, X)), Fraction(0)) for v in p.vertices]


def choose_generic_functional(p: RationalPolytope, reverse: bool = False) -> IntVector:
    """
    Smallest t >= 1 for which X = (1, t, ..., t^{n-1}) separates all vertex values.

    reverse=True scans the reversed moment curve (t^{n-1}, ..., t, 1) instead.
    """
    for t in count(1):
        X = tuple(t ** k for k in range(p.dim))
        if reverse:
            X = X[::-1]
        values = _functional_values(p, X)
        if len(set(values)) == len(values):
            logger.debug(f"Generic functional {X} (t={t})")
            return X


def _neighbors(edges: Sequence[Edge]) -> Dict[Vertex, List[Tuple[Vertex, Edge]]]:
    adjacency: Dict[Vertex, List[Tuple[Vertex, Edge]]] = {}
    for edge in edges:
        a, b = edge.endpoints
        adjacency.setdefault(a, []).append((b, edge))
        adjacency.setdefault(b, []).append((a, edge))
    return adjacency


def morse_indices(p: RationalPolytope, X: Sequence[int]) -> MorseData:
    """
    Morse index of every vertex for the height function <., X>.

    Args:
        p: Simple polytope
        X: Integer functional with pairwise distinct vertex values

    Returns:
        MorseData with vertices ordered by increasing value
    """
    X = tuple(int(x) for x in X)
    if len(X) != p.dim:
        raise BadDimension(f"functional has length {len(X)}, expected {p.dim}")
    values = dict(zip(p.vertices, _functional_values(p, X)))
    if len(set(values.values())) != len(values):
        raise NotGeneric(f"{X} takes equal values on distinct vertices", X=X)

    adjacency = _neighbors(edge_graph(p))
    index_by_vertex: Dict[Vertex, int] = {}
    down_edges = []
    for vertex in sorted(p.vertices, key=values.__getitem__):
        below = [(w, edge) for w, edge in adjacency.get(vertex, []) if values[w] < values[vertex]]
        index_by_vertex[vertex] = 2 * len(below)
        if len(below) == 1:
            down_edges.append((vertex, below[0][1]))

    return MorseData(X=X, index_by_vertex=index_by_vertex, index2_down_edges=tuple(down_edges))


def _require_integral_delzant(p: RationalPolytope):
    check = is_delzant(p)
    if not check:
        raise NotDelzant(
            "; ".join(failure.describe() for failure in check.failures),
            vertices=[failure.vertex.render() for failure in check.failures],
        )
    if not is_integral(p):
        raise NotIntegral("polytope has non-integral vertices",
                          vertices=[v.render() for v in p.vertices if not v.is_integral])


def pi1_thmC(p: RationalPolytope, X: Optional[Sequence[int]] = None) -> AbelianGroup:
    """Z/l with l the gcd of the lattice lengths of the down-edges at index-2 vertices."""
    _require_integral_delzant(p)
    morse = morse_indices(p, X if X is not None else choose_generic_functional(p))
    lengths = [edge.lattice_length for _, edge in morse.index2_down_edges]
    l = gcd_all(lengths)
    logger.debug(f"Down-edge lengths {lengths}, gcd {l}")
    return AbelianGroup.cyclic(l)


def morse_filtration(p: RationalPolytope, X: Optional[Sequence[int]] = None) -> List[FiltrationStep]:
    """Fundamental group of each sublevel set, attaching critical orbits in order."""
    _require_integral_delzant(p)
    morse = morse_indices(p, X if X is not None else choose_generic_functional(p))
    down = dict(morse.index2_down_edges)
    steps = []
    g = 0
    for vertex, index in morse.index_by_vertex.items():
        if index == 2:
            g = math.gcd(g, down[vertex].lattice_length)
        steps.append(FiltrationStep(vertex, index, AbelianGroup.cyclic(g)))
    return steps


def second_betti_number(p: RationalPolytope) -> int:
    """Rank of H^2 of the symplectic quotient: number of index-2 critical orbits, d - n."""
    check = is_delzant(p)
    if not check:
        raise NotDelzant("second Betti number needs a Delzant polytope")
    return p.d - p.dim


def orbifold_vertex_orders(p: RationalPolytope) -> OrbifoldData:
    if not p.is_simple:
        raise NotSimple("orbifold orders need a simple polytope")
    orders = {
        vertex: abs(det(IntMatrix.from_rows([p.halfspaces[i].normal for i in sorted(vertex.active)], cols=p.dim)))
        for vertex in p.vertices
    }
    return OrbifoldData(order_by_vertex=orders, m_lcm=math.lcm(*orders.values()))


def cone_over_polytope(p: RationalPolytope) -> MomentCone:
    """Cone in dimension n+1 with normals (u_i, -lambda_i)."""
    fractional = [i for i, h in enumerate(p.halfspaces) if h.offset.denominator != 1]
    if fractional:
        raise NonIntegerOffset(f"halfspaces {fractional} have non-integer offsets", indices=fractional)
    return build_cone([h.normal + (-int(h.offset),) for h in p.halfspaces], p.dim + 1)


def rescaled_cone_over_polytope(p: RationalPolytope) -> MomentCone:
    """
    Cone over p with each (u_i, -lambda_i) scaled to its primitive integer multiple.

    Equal to cone_over_polytope when every offset is an integer. Each scaled
    halfspace is recorded as a warning on the cone.
    """
    rows = []
    warnings = []
    for index, h in enumerate(p.halfspaces):
        q = h.offset.denominator
        if q != 1:
            warnings.append(f"halfspace {index} scaled by {q} to clear its offset denominator")
        rows.append(tuple(q * x for x in h.normal) + (-h.offset.numerator,))
    cone = build_cone(rows, p.dim + 1)
    return replace(cone, warnings=cone.warnings + tuple(warnings))


def euler_gcd_consistency(p: RationalPolytope) -> Tuple[int, int, bool]:
    """(gcd of index-2 down-edge lengths, gcd of |Euler coefficients| of the cone over p, equal)."""
    from contact_pi1.src.pi1 import euler_coefficients

    _require_integral_delzant(p)
    morse = morse_indices(p, choose_generic_functional(p))
    gcd_lengths = gcd_all(edge.lattice_length for _, edge in morse.index2_down_edges)
    gcd_dets = gcd_all(euler_coefficients(cone_over_polytope(p)).coeffs)
    return gcd_lengths, gcd_dets, gcd_lengths == gcd_dets


# builders

def simplex(n: int, k: Offset = 1) -> RationalPolytope:
    """k times the standard n-simplex."""
    rows = [(tuple(int(i == j) for j in range(n)), 0) for i in range(n)]
    rows.append(((-1,) * n, -k))
    return RationalPolytope.from_inequalities(rows, n)


def box(lengths: Sequence[Offset]) -> RationalPolytope:
    n = len(lengths)
    rows = []
    for i, length in enumerate(lengths):
        e = tuple(int(i == j) for j in range(n))
        rows.append((e, 0))
        rows.append((tuple(-x for x in e), -length))
    return RationalPolytope.from_inequalities(rows, n)


def segment(length: Offset) -> RationalPolytope:
    return box([length])


def hirzebruch(a: int, b: int, k: int) -> RationalPolytope:
    """Trapezoid x >= 0, y >= 0, y <= b, x + k·y <= a; needs a > k·b."""
    if b <= 0 or k < 0 or a <= k * b:
        raise BadDimension(f"hirzebruch trapezoid needs b > 0, k >= 0 and a > k*b, got a={a}, b={b}, k={k}")
    rows = [((1, 0), 0), ((0, 1), 0), ((0, -1), -b), ((-1, -k), -a)]
    return RationalPolytope.from_inequalities(rows, 2)


def product(P: RationalPolytope, Q: RationalPolytope) -> RationalPolytope:
    rows = [(h.normal + (0,) * Q.dim, h.offset) for h in P.halfspaces]
    rows += [((0,) * P.dim + h.normal, h.offset) for h in Q.halfspaces]
    return RationalPolytope.from_inequalities(rows, P.dim + Q.dim)


def dilate(P: RationalPolytope, k: int) -> RationalPolytope:
    if k < 1:
        raise BadDimension(f"dilation factor must be positive, got {k}")
    return RationalPolytope.from_inequalities([(h.normal, h.offset * k) for h in P.halfspaces], P.dim)
