"""
Moment cones given by primitive inward facet normals.

C = {x : <x, v_i> >= 0 for all i}. Faces are enumerated through rays and
the sets of facets that vanish on them, which is plenty at desk scale
(d up to ~20 normals, ambient dimension up to ~7).
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from contact_pi1.src.errors import (
    BadDimension,
    CrossCheckDisagreement,
    DuplicateNormal,
    InteriorVectorNotFound,
    InvalidMomentCone,
    MissingBundleClass,
    NotPrimitive,
    NotStrictlyConvex,
    RedundantFacet,
    ReebNotPositiveOnCone,
    ZeroNormal,
)
from contact_pi1.src.lattice import (
    AbelianGroup,
    IntMatrix,
    IntVector,
    complete_to_unimodular,
    dot,
    gcd_all,
    kernel_basis,
    primitive_part,
    rank,
    smith_normal_form,
)
from contact_pi1.utils.logger import get_logger, log_performance, log_validation_diagnostics

logger = get_logger("cone")


@dataclass(frozen=True)
class Ray:
    """Primitive generator of a 1-dimensional face and the facets vanishing on it."""

    generator: IntVector
    facet_indices: FrozenSet[int]


@dataclass(frozen=True)
class FaceFailure:
    """A face at which the goodness condition fails."""

    facets: Tuple[int, ...]
    dimension: int
    codimension: int
    smith_invariants: Tuple[int, ...]
    reason: str
    generator: Optional[IntVector] = None

    def describe(self) -> str:
        where = f"ray {self.generator}" if self.generator is not None else f"{self.dimension}-dimensional face"
        return f"{where} on facets {list(self.facets)}: {self.reason} (Smith invariants {self.smith_invariants})"


@dataclass(frozen=True)
class ConeValidation:
    strictly_convex: bool
    lineality_dim: int
    good: bool
    failures: Tuple[FaceFailure, ...] = ()


@dataclass(frozen=True)
class MomentCone:
    """Rational polyhedral cone in R^{n+1}; an empty normal list is the whole space."""

    ambient_dim: int
    normals: Tuple[IntVector, ...]
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return self.ambient_dim - 1

    @property
    def d(self) -> int:
        return len(self.normals)

    def normal_matrix(self) -> IntMatrix:
        """d x (n+1) matrix whose rows are the normals."""
        return IntMatrix.from_rows(self.normals, cols=self.ambient_dim)

    @cached_property
    def pointed_decomposition(self) -> Tuple[Tuple[IntVector, ...], Tuple[Ray, ...]]:
        """(basis of the lineality space, rays of the cone's part orthogonal to it)."""
        lineality, rays = pointed_rays(self.normals, self.ambient_dim)
        return tuple(lineality), tuple(rays)


class ManifoldKind(str, Enum):
    REEB_TYPE = "ReebType"
    TORUS_TIMES_SPHERE = "TorusTimesSphere"
    PRINCIPAL_T3_BUNDLE = "PrincipalT3BundleOverS2"
    INVALID_MOMENT_CONE = "InvalidMomentCone"


@dataclass(frozen=True)
class ManifoldClass:
    """Diffeomorphism class of a (2n+1)-dimensional contact toric manifold."""

    kind: ManifoldKind
    n: int
    m: int = 0
    bundle_class: Optional[Tuple[int, int, int]] = None

    @property
    def label(self) -> str:
        if self.kind is ManifoldKind.TORUS_TIMES_SPHERE:
            return f"{self.kind.value}({self.m})"
        return self.kind.value

    @property
    def sphere_dim(self) -> int:
        return 2 * self.n + 1 - self.m

    @property
    def manifold(self) -> str:
        if self.kind is ManifoldKind.TORUS_TIMES_SPHERE:
            return f"T^{self.m} x S^{self.sphere_dim}"
        if self.kind is ManifoldKind.PRINCIPAL_T3_BUNDLE:
            return "principal T^3-bundle over S^2"
        return f"M^{2 * self.n + 1}"

    @property
    def non_reeb_case(self) -> Optional[int]:
        """Position in the list of non-Reeb manifolds (1..5), None for Reeb type."""
        if self.kind is ManifoldKind.PRINCIPAL_T3_BUNDLE:
            return 3
        if self.kind is not ManifoldKind.TORUS_TIMES_SPHERE:
            return None
        if self.n == 1:
            return 1 if self.m == 2 else 2
        if self.n == 2:
            return 4
        return 5

    def torus_sphere_pi1(self) -> AbelianGroup:
        # S^1 contributes one more free generator
        extra = 1 if self.sphere_dim == 1 else 0
        return AbelianGroup.free(self.m + extra)

    def torus_sphere_pi2(self) -> AbelianGroup:
        return AbelianGroup.free(1) if self.sphere_dim == 2 else AbelianGroup.trivial()


def _rank_of(vectors: Sequence[IntVector], dim: int) -> int:
    if not vectors:
        return 0
    return rank(IntMatrix.from_rows(vectors, cols=dim))


def pointed_rays(normals: Sequence[IntVector], dim: int) -> Tuple[List[IntVector], List[Ray]]:
    """
    Rays of C ∩ L^perp where L is the lineality space of C.

    Every (r-1)-subset of normals (r = rank of the normals) is intersected with
    L^perp; a 1-dimensional solution is kept when one of its two signs pairs
    nonnegatively with every normal.
    """
    lineality = kernel_basis(IntMatrix.from_rows(normals, cols=dim))
    top = dim - len(lineality)
    if top == 0:
        return lineality, []

    found: Dict[IntVector, Ray] = {}
    for subset in combinations(range(len(normals)), top - 1):
        system = IntMatrix.from_rows(list(lineality) + [normals[i] for i in subset], cols=dim)
        kernel = kernel_basis(system)
        if len(kernel) != 1:
            continue
        generator = kernel[0]
        pairings = [dot(v, generator) for v in normals]
        if all(p <= 0 for p in pairings):
            generator = tuple(-x for x in generator)
            pairings = [-p for p in pairings]
        elif not all(p >= 0 for p in pairings):
            continue
        if generator not in found:
            found[generator] = Ray(generator, frozenset(i for i, p in enumerate(pairings) if p == 0))
    return lineality, sorted(found.values(), key=lambda ray: ray.generator)


def build_cone(raw_normals: Sequence[Sequence[int]], ambient_dim: int) -> MomentCone:
    """
    Normalize and validate facet normals into a MomentCone.

    Args:
        raw_normals: Integer inward normals, not necessarily primitive
        ambient_dim: n+1

    Returns:
        MomentCone with primitive, pairwise distinct, irredundant normals
    """
    if ambient_dim < 2:
        raise BadDimension(f"ambient dimension must be at least 2, got {ambient_dim}", ambient_dim=ambient_dim)

    normals: List[IntVector] = []
    warnings: List[str] = []
    for index, raw in enumerate(raw_normals):
        raw = tuple(int(x) for x in raw)
        if len(raw) != ambient_dim:
            raise BadDimension(
                f"normal {index} has length {len(raw)}, expected {ambient_dim}", index=index
            )
        if not any(raw):
            raise ZeroNormal(index)
        primitive, g = primitive_part(raw)
        if g > 1:
            warnings.append(f"normal {index} {list(raw)} replaced by its primitive part {list(primitive)}")
        normals.append(primitive)

    seen: Dict[IntVector, int] = {}
    for index, v in enumerate(normals):
        if v in seen:
            raise DuplicateNormal(seen[v], index)
        seen[v] = index

    cone = MomentCone(ambient_dim, tuple(normals), tuple(warnings))
    lineality, rays = cone.pointed_decomposition
    top = ambient_dim - len(lineality)
    if top and _rank_of([ray.generator for ray in rays], ambient_dim) != top:
        raise BadDimension("normals do not cut out a full-dimensional cone", ambient_dim=ambient_dim)

    for index in range(len(normals)):
        tight = [ray.generator for ray in rays if index in ray.facet_indices]
        face_dim = len(lineality) + _rank_of(tight, ambient_dim)
        if face_dim != ambient_dim - 1:
            logger.warning(f"Halfspace {index} is redundant (face dimension {face_dim})")
            raise RedundantFacet(index, face_dim)

    for warning in warnings:
        logger.info(warning)
    return cone


def apply_unimodular(c: MomentCone, A: IntMatrix) -> MomentCone:
    """Image of c under a lattice automorphism acting on normals by v -> A·v."""
    return MomentCone(c.ambient_dim, tuple(A @ v for v in c.normals), c.warnings)


def lineality_dim(c: MomentCone) -> int:
    """Dimension of the largest linear subspace inside c."""
    return c.ambient_dim - rank(c.normal_matrix())


def enumerate_rays(c: MomentCone) -> List[Ray]:
    if lineality_dim(c) != 0:
        raise NotStrictlyConvex(
            f"cone contains a linear subspace of dimension {lineality_dim(c)}", lineality_dim=lineality_dim(c)
        )
    return list(c.pointed_decomposition[1])


def _face_lattice(rays: Sequence[Ray]) -> Set[FrozenSet[int]]:
    """Active facet sets of all nonempty proper faces (closure of ray facet sets under intersection)."""
    faces = {ray.facet_indices for ray in rays}
    frontier = set(faces)
    while frontier:
        new = {a & b for a in frontier for b in faces} - faces
        faces |= new
        frontier = new
    return {face for face in faces if face}


def is_good(c: MomentCone) -> ConeValidation:
    """
    Check strict convexity and goodness.

    At every nonempty proper face F the facets through F must number codim F
    and their normals must have all Smith invariants equal to 1.
    """
    m = lineality_dim(c)
    if m:
        return ConeValidation(strictly_convex=False, lineality_dim=m, good=False)

    rays = enumerate_rays(c)
    failures: List[FaceFailure] = []
    for active in sorted(_face_lattice(rays), key=lambda face: (-len(face), sorted(face))):
        members = [ray.generator for ray in rays if active <= ray.facet_indices]
        face_dim = _rank_of(members, c.ambient_dim)
        codim = c.ambient_dim - face_dim
        facets = tuple(sorted(active))
        columns = IntMatrix.from_columns([c.normals[i] for i in facets], rows=c.ambient_dim)
        invariants = smith_normal_form(columns).invariants

        if len(facets) != codim:
            reason = f"{len(facets)} facets meet along a face of codimension {codim}"
        elif any(d != 1 for d in invariants):
            reason = "facet normals do not form a basis of a saturated sublattice"
        else:
            continue
        failures.append(FaceFailure(
            facets=facets,
            dimension=face_dim,
            codimension=codim,
            smith_invariants=invariants,
            reason=reason,
            generator=members[0] if face_dim == 1 else None,
        ))

    log_validation_diagnostics("goodness", [failure.describe() for failure in failures])
    return ConeValidation(strictly_convex=True, lineality_dim=0, good=not failures, failures=tuple(failures))


def find_reeb_vector(c: MomentCone) -> IntVector:
    """Primitive R pairing strictly positively with every ray: the primitivized sum of the normals."""
    rays = enumerate_rays(c)
    total = tuple(sum(column) for column in zip(*c.normals))
    if not any(total):
        raise InteriorVectorNotFound("normals sum to zero on a strictly convex cone")
    R, _ = primitive_part(total)
    failing = [ray.generator for ray in rays if dot(ray.generator, R) <= 0]
    if failing:
        logger.error(f"Normal sum {R} is not positive on rays {failing}")
        raise InteriorVectorNotFound(f"{R} is not positive on rays {failing}", rays=failing)
    return R


def check_reeb_vector(c: MomentCone, R: Sequence[int]) -> IntVector:
    """Validate a supplied Reeb vector: primitive and strictly positive on every ray."""
    R = tuple(int(x) for x in R)
    if len(R) != c.ambient_dim:
        raise BadDimension(f"Reeb vector has length {len(R)}, expected {c.ambient_dim}")
    if gcd_all(R) != 1:
        raise NotPrimitive(f"Reeb vector {R} is not primitive", vector=R)
    failing = [ray.generator for ray in enumerate_rays(c) if dot(ray.generator, R) <= 0]
    if failing:
        raise ReebNotPositiveOnCone(f"{R} is not positive on rays {failing}", rays=failing)
    return R


def reparametrize_to_last_axis(c: MomentCone, R: Sequence[int]) -> Tuple[MomentCone, IntMatrix]:
    """
    Change lattice coordinates so that R becomes e_{n+1}.

    Normals (same lattice as R) map by A; cone points and rays map by the
    inverse transpose of A, so every pairing <x, v> is unchanged and ray
    heights <r, R> become last coordinates.
    """
    A = complete_to_unimodular(R)
    return apply_unimodular(c, A), A


@log_performance
def slice_at_height_one(c: MomentCone):
    """
    Intersect c with {x_{n+1} = 1}.

    Args:
        c: Strictly convex cone whose rays all have positive last coordinate

    Returns:
        RationalPolytope with halfspaces <x, u_i> >= -v_{i,n+1}
    """
    from contact_pi1.src.polytope import Halfspace, RationalPolytope

    rays = enumerate_rays(c)
    low = [ray.generator for ray in rays if ray.generator[-1] <= 0]
    if low:
        raise ReebNotPositiveOnCone(f"rays {low} do not have positive last coordinate", rays=low)

    halfspaces = []
    warnings = list(c.warnings)
    for index, v in enumerate(c.normals):
        u, last = v[:-1], v[-1]
        if not any(u):
            raise ReebNotPositiveOnCone(f"normal {index} is parallel to the slicing axis", index=index)
        primitive, g = primitive_part(u)
        if g > 1:
            warnings.append(
                f"slice normal {index} {list(u)} is not primitive; normal and offset divided by {g}"
            )
        halfspaces.append(Halfspace(primitive, Fraction(-last, g)))

    polytope = RationalPolytope.from_halfspaces(halfspaces, dim=c.n, warnings=warnings)

    expected = sorted(tuple(Fraction(x, ray.generator[-1]) for x in ray.generator[:-1]) for ray in rays)
    if sorted(vertex.point for vertex in polytope.vertices) != expected:
        raise CrossCheckDisagreement("slice vertices are not the rays divided by their heights")
    return polytope


def classify(c: MomentCone, bundle_class: Optional[Sequence[int]] = None) -> ManifoldClass:
    """
    Place the manifold with moment cone c in the Reeb / non-Reeb list.

    Args:
        c: Validated cone
        bundle_class: (a, b, c) classifying the T^3-bundle when the cone is all of R^3

    Returns:
        ManifoldClass
    """
    n = c.n
    m = lineality_dim(c)
    if m == 0:
        validation = is_good(c)
        if not validation.good:
            failing = "; ".join(failure.describe() for failure in validation.failures)
            raise InvalidMomentCone(f"strictly convex cone is not good: {failing}")
        return ManifoldClass(ManifoldKind.REEB_TYPE, n)
    if m < n + 1:
        return ManifoldClass(ManifoldKind.TORUS_TIMES_SPHERE, n, m)
    if n == 2:
        if bundle_class is None:
            raise MissingBundleClass("the whole-space cone in dimension 3 needs the bundle class (a, b, c)")
        a, b, k = (int(x) for x in bundle_class)
        return ManifoldClass(ManifoldKind.PRINCIPAL_T3_BUNDLE, 2, 3, (a, b, k))
    return ManifoldClass(ManifoldKind.TORUS_TIMES_SPHERE, n, n + 1)
