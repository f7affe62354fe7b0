"""
Fundamental groups of contact toric manifolds.

Three routes for Reeb-type cones (Euler-coefficient gcd, lattice quotient,
Morse lengths on a Delzant slice), the closed formulas for the non-Reeb
cases, and the dispatcher that runs every applicable route and cross-checks
them.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from contact_pi1.src.cone import (
    ConeValidation,
    ManifoldClass,
    ManifoldKind,
    MomentCone,
    Ray,
    check_reeb_vector,
    classify,
    enumerate_rays,
    find_reeb_vector,
    is_good,
    lineality_dim,
    reparametrize_to_last_axis,
    slice_at_height_one,
)
from contact_pi1.src.errors import (
    CrossCheckDisagreement,
    InvalidInputError,
    NotGood,
    NotStrictlyConvex,
)
from contact_pi1.src.lattice import (
    AbelianGroup,
    IntMatrix,
    IntVector,
    cokernel,
    complete_to_unimodular,
    det,
    gcd_all,
    primitive_part,
    solve_exact,
    unimodular_inverse,
)
from contact_pi1.src.polytope import (
    FiltrationStep,
    OrbifoldData,
    RationalPolytope,
    is_delzant,
    is_integral,
    morse_filtration,
    orbifold_vertex_orders,
    pi1_thmC,
    rescaled_cone_over_polytope,
    second_betti_number,
)
from contact_pi1.utils.logger import get_logger, log_performance

logger = get_logger("pi1")

REEB_METHODS = ("thmB", "lerman", "thmC")


@dataclass(frozen=True)
class EulerCoefficients:
    """a_i = det[v_1..v_n, v_j] for the normals v_j not through base_ray."""

    base_ray: Ray
    ordered_first_n: Tuple[int, ...]
    remaining: Tuple[int, ...]
    coeffs: Tuple[int, ...]


@dataclass(frozen=True)
class T3Bundle:
    """Principal T^3-bundle over S^2 with class (a, b, c) in H^2(S^2; Z^3)."""

    a: int
    b: int
    c: int

    @property
    def bundle_class(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class MethodResult:
    group: Optional[AbelianGroup] = None
    skipped: Optional[str] = None

    def render(self) -> str:
        if self.group is None:
            return f"skipped: {self.skipped}"
        return self.group.render()


@dataclass(frozen=True)
class CrossCheck:
    agree: bool
    details: str = ""

    def render(self) -> str:
        return "Agree" if self.agree else "Disagree"


@dataclass
class Pi1Report:
    class_label: str
    pi1: AbelianGroup
    methods: Dict[str, MethodResult]
    cross_check: CrossCheck
    manifold: ManifoldClass
    warnings: List[str] = field(default_factory=list)
    validation: Optional[ConeValidation] = None
    delzant: Optional[bool] = None
    integral: Optional[bool] = None
    orbifold: Optional[OrbifoldData] = None
    reeb: Optional[IntVector] = None
    betti2: Optional[int] = None
    filtration: List[FiltrationStep] = field(default_factory=list)
    bundle_basis: Optional[Tuple[IntVector, IntVector, IntVector]] = None
    higher_homotopy: Dict[str, str] = field(default_factory=dict)


def _require_good(c: MomentCone) -> ConeValidation:
    m = lineality_dim(c)
    if m:
        raise NotStrictlyConvex(f"cone contains a linear subspace of dimension {m}", lineality_dim=m)
    validation = is_good(c)
    if not validation.good:
        failure = validation.failures[0]
        raise NotGood(failure.describe(), facets=failure.facets, smith_invariants=failure.smith_invariants)
    return validation


def euler_coefficients(c: MomentCone, base_ray: Optional[Ray] = None) -> EulerCoefficients:
    """
    Euler-class coefficients of the cone.

    Args:
        c: Strictly convex good cone
        base_ray: Ray whose n facets come first; defaults to the lexicographically smallest

    Returns:
        EulerCoefficients
    """
    _require_good(c)
    ray = base_ray if base_ray is not None else enumerate_rays(c)[0]
    first = tuple(sorted(ray.facet_indices))
    remaining = tuple(j for j in range(c.d) if j not in ray.facet_indices)
    base = [c.normals[i] for i in first]
    coeffs = tuple(
        det(IntMatrix.from_columns(base + [c.normals[j]], rows=c.ambient_dim)) for j in remaining
    )
    return EulerCoefficients(base_ray=ray, ordered_first_n=first, remaining=remaining, coeffs=coeffs)


def pi1_thmB(c: MomentCone, base_ray: Optional[Ray] = None) -> AbelianGroup:
    """Z/k with k the gcd of the Euler coefficients."""
    euler = euler_coefficients(c, base_ray)
    k = gcd_all(euler.coeffs)
    if k == 0:
        raise CrossCheckDisagreement("every Euler coefficient vanishes on a good cone", coeffs=euler.coeffs)
    return AbelianGroup.cyclic(k)


def pi1_lerman(c: MomentCone) -> AbelianGroup:
    """Z^{n+1} modulo the span of the normals."""
    m = lineality_dim(c)
    if m:
        raise NotStrictlyConvex(f"cone contains a linear subspace of dimension {m}", lineality_dim=m)
    return cokernel(IntMatrix.from_columns(c.normals, rows=c.ambient_dim))


def pi1_t3_bundle(a: int, b: int, c: int) -> Tuple[AbelianGroup, AbelianGroup]:
    """(pi1, pi2) of the principal T^3-bundle over S^2 with class (a, b, c)."""
    k = gcd_all((a, b, c))
    pi1 = AbelianGroup.from_orders([k], free_rank=2)
    pi2 = AbelianGroup.free(1) if k == 0 else AbelianGroup.trivial()
    return pi1, pi2


def t3_bundle_basis(a: int, b: int, c: int) -> Tuple[IntVector, IntVector, IntVector]:
    """Basis (w1, w2, w3) of Z^3 with w1 the primitive part of (a, b, c); (0, 0, 0) gives the standard basis."""
    if not any((a, b, c)):
        return (1, 0, 0), (0, 1, 0), (0, 0, 1)
    w1, _ = primitive_part((a, b, c))
    columns = unimodular_inverse(complete_to_unimodular(w1)).columns()
    return columns[2], columns[0], columns[1]


def euler_class_from_relations(c: MomentCone, R: Optional[Sequence[int]] = None) -> Tuple[Fraction, ...]:
    """
    Euler coefficients from the degree-two relations of the quotient.

    After moving R to the last axis, the first n normals v'_1..v'_n (slice
    parts) are solved against each remaining v'_j and the heights are
    substituted; the result is a_j / det[v'_1..v'_n].
    """
    euler = euler_coefficients(c)
    R = find_reeb_vector(c) if R is None else check_reeb_vector(c, R)
    shifted, _ = reparametrize_to_last_axis(c, R)
    first = euler.ordered_first_n
    P = IntMatrix.from_columns([shifted.normals[i][:-1] for i in first], rows=c.n)
    heights = [shifted.normals[i][-1] for i in first]
    values = []
    for j in euler.remaining:
        y = solve_exact(P, shifted.normals[j][:-1])
        values.append(shifted.normals[j][-1] - sum((h * yi for h, yi in zip(heights, y)), Fraction(0)))
    return tuple(values)


def higher_homotopy(manifold: ManifoldClass, bundle: Optional[T3Bundle] = None) -> Dict[str, str]:
    """pi_2 and a note on pi_j (j >= 3) for the non-Reeb classes; empty for Reeb type."""
    if manifold.kind is ManifoldKind.TORUS_TIMES_SPHERE:
        return {
            "pi2": manifold.torus_sphere_pi2().render(),
            "pi_k": f"pi_j = pi_j(S^{manifold.sphere_dim}) for j >= 2",
        }
    if manifold.kind is ManifoldKind.PRINCIPAL_T3_BUNDLE and bundle is not None:
        _, pi2 = pi1_t3_bundle(*bundle.bundle_class)
        return {"pi2": pi2.render(), "pi_k": "pi_j = pi_j(S^2) for j >= 3"}
    return {}


def _agreement(results: Dict[str, MethodResult]) -> CrossCheck:
    computed = {name: result.group for name, result in results.items() if result.group is not None}
    if len(set(computed.values())) <= 1:
        return CrossCheck(agree=True)
    details = ", ".join(f"{name}={group}" for name, group in computed.items())
    logger.error(f"Methods disagree: {details}")
    return CrossCheck(agree=False, details=details)


def _first_group(results: Dict[str, MethodResult]) -> AbelianGroup:
    return next(result.group for result in results.values() if result.group is not None)


def _selected(methods: Optional[Iterable[str]]) -> Tuple[str, ...]:
    if methods is None:
        return REEB_METHODS
    if isinstance(methods, str):
        methods = [methods]
    chosen = set()
    for name in methods:
        if name == "all":
            chosen.update(REEB_METHODS)
        elif name in REEB_METHODS:
            chosen.add(name)
        else:
            raise InvalidInputError(f"unknown method '{name}'", method=name)
    return tuple(name for name in REEB_METHODS if name in chosen)


def _bundle_report(bundle: T3Bundle, warnings: Sequence[str] = ()) -> Pi1Report:
    manifold = ManifoldClass(ManifoldKind.PRINCIPAL_T3_BUNDLE, 2, 3, bundle.bundle_class)
    pi1, _ = pi1_t3_bundle(*bundle.bundle_class)
    return Pi1Report(
        class_label=manifold.label,
        pi1=pi1,
        methods={"thmA": MethodResult(pi1)},
        cross_check=CrossCheck(agree=True),
        manifold=manifold,
        warnings=list(warnings),
        validation=ConeValidation(strictly_convex=False, lineality_dim=3, good=False),
        bundle_basis=t3_bundle_basis(*bundle.bundle_class),
        higher_homotopy=higher_homotopy(manifold, bundle),
    )


@dataclass
class _SliceData:
    result: MethodResult
    delzant: bool
    integral: bool
    orbifold: Optional[OrbifoldData] = None
    betti2: Optional[int] = None
    filtration: List[FiltrationStep] = field(default_factory=list)


def _slice_result(p: RationalPolytope, required: bool) -> _SliceData:
    delzant = bool(is_delzant(p))
    integral = is_integral(p)
    orbifold = orbifold_vertex_orders(p) if p.is_simple else None
    if required or (delzant and integral):
        return _SliceData(MethodResult(pi1_thmC(p)), delzant, integral, orbifold,
                          betti2=second_betti_number(p), filtration=morse_filtration(p))
    reason = "slice is not Delzant" if not delzant else "slice is not integral"
    return _SliceData(MethodResult(skipped=reason), delzant, integral, orbifold)


def _invalid_cone_report(c: MomentCone, methods: Tuple[str, ...], validation: ConeValidation,
                         warnings: List[str]) -> Pi1Report:
    failure = validation.failures[0]
    if "lerman" not in methods:
        raise NotGood(failure.describe(), facets=failure.facets, smith_invariants=failure.smith_invariants)

    group = pi1_lerman(c)
    warnings.append("cone is strictly convex but not good: no contact toric manifold has it as moment cone")
    results: Dict[str, MethodResult] = {}
    for name in methods:
        if name == "lerman":
            results[name] = MethodResult(group)
        else:
            results[name] = MethodResult(skipped=f"NotGood: {failure.describe()}")
    return Pi1Report(
        class_label=ManifoldKind.INVALID_MOMENT_CONE.value,
        pi1=group,
        methods=results,
        cross_check=CrossCheck(agree=True),
        manifold=ManifoldClass(ManifoldKind.INVALID_MOMENT_CONE, c.n),
        warnings=warnings,
        validation=validation,
    )


def _cone_report(c: MomentCone, methods: Tuple[str, ...], reeb: Optional[Sequence[int]],
                 bundle_class: Optional[Sequence[int]], polytope: Optional[RationalPolytope] = None) -> Pi1Report:
    warnings = list(polytope.warnings) if polytope is not None else []
    warnings.extend(w for w in c.warnings if w not in warnings)
    m = lineality_dim(c)
    if m:
        manifold = classify(c, bundle_class)
        if manifold.kind is ManifoldKind.PRINCIPAL_T3_BUNDLE:
            return _bundle_report(T3Bundle(*manifold.bundle_class), warnings)
        group = manifold.torus_sphere_pi1()
        return Pi1Report(
            class_label=manifold.label,
            pi1=group,
            methods={"nonreeb": MethodResult(group)},
            cross_check=CrossCheck(agree=True),
            manifold=manifold,
            warnings=warnings,
            validation=ConeValidation(strictly_convex=False, lineality_dim=m, good=False),
            higher_homotopy=higher_homotopy(manifold),
        )

    validation = is_good(c)
    if not validation.good:
        return _invalid_cone_report(c, methods, validation, warnings)

    manifold = ManifoldClass(ManifoldKind.REEB_TYPE, c.n)
    results: Dict[str, MethodResult] = {}
    if "thmB" in methods:
        results["thmB"] = MethodResult(pi1_thmB(c))
    if "lerman" in methods:
        results["lerman"] = MethodResult(pi1_lerman(c))

    slice_data = R = None
    if "thmC" in methods:
        if polytope is None:
            R = check_reeb_vector(c, reeb) if reeb is not None else find_reeb_vector(c)
            shifted, _ = reparametrize_to_last_axis(c, R)
            polytope = slice_at_height_one(shifted)
            warnings.extend(w for w in polytope.warnings if w not in warnings)
        else:
            R = (0,) * polytope.dim + (1,)
        slice_data = _slice_result(polytope, required=methods == ("thmC",))
        results["thmC"] = slice_data.result

    return Pi1Report(
        class_label=manifold.label,
        pi1=_first_group(results),
        methods=results,
        cross_check=_agreement(results),
        manifold=manifold,
        warnings=warnings,
        validation=validation,
        delzant=slice_data.delzant if slice_data else None,
        integral=slice_data.integral if slice_data else None,
        orbifold=slice_data.orbifold if slice_data else None,
        reeb=R,
        betti2=slice_data.betti2 if slice_data else None,
        filtration=slice_data.filtration if slice_data else [],
    )


@log_performance
def compute_pi1(source: Union[MomentCone, RationalPolytope, T3Bundle],
                methods: Optional[Union[str, Iterable[str]]] = None,
                reeb: Optional[Sequence[int]] = None,
                bundle_class: Optional[Sequence[int]] = None) -> Pi1Report:
    """
    Classify the manifold and compute its fundamental group by every applicable route.

    A polytope with fractional offsets is read through the cone whose normals
    are the primitive integer multiples of (u_i, -lambda_i).

    Args:
        source: Moment cone, polytope (read as the slice of its cone at height 1), or T^3-bundle class
        methods: "all" (default) or a subset of thmB, lerman, thmC; ignored for non-Reeb inputs
        reeb: Primitive Reeb vector used for the thmC slice instead of the derived one
        bundle_class: (a, b, c) for the whole-space cone in dimension 3

    Returns:
        Pi1Report
    """
    selected = _selected(methods)
    if isinstance(source, T3Bundle):
        return _bundle_report(source)
    if isinstance(source, RationalPolytope):
        return _cone_report(rescaled_cone_over_polytope(source), selected, None, None, polytope=source)
    return _cone_report(source, selected, reeb, bundle_class)
