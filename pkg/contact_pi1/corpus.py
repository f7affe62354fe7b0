"""
Built-in examples with known answers.

Spheres, lens spaces, square cones, dilated simplices and other Delzant
polytopes, a cone that fails goodness, the non-Reeb list, and T^3-bundles.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

from contact_pi1.schemas import CorpusExpectation, InputDocument
from contact_pi1.src.polytope import RationalPolytope, box, fraction_text, hirzebruch, simplex
from contact_pi1.utils.logger import get_logger

logger = get_logger("corpus")


def _cyclic(order: int) -> str:
    return "0" if order == 1 else f"Z/{order}"


def cone_document(normals: Sequence[Sequence[int]], ambient_dim: int, label: str, **extra: Any) -> InputDocument:
    data = {"kind": "cone", "ambient_dim": ambient_dim, "normals": [list(v) for v in normals], "label": label}
    data.update(extra)
    return InputDocument.model_validate(data)


def polytope_document(p: RationalPolytope, label: str) -> InputDocument:
    return InputDocument.model_validate({
        "kind": "polytope",
        "ambient_dim": p.dim,
        "halfspaces": [{"normal": list(h.normal), "offset": fraction_text(h.offset)} for h in p.halfspaces],
        "label": label,
    })


def _entry(name: str, document: InputDocument, expected_class: str, expected_pi1: str,
           expected_pi2: str = None) -> CorpusExpectation:
    return CorpusExpectation(
        name=name, document=document, expected_class=expected_class,
        expected_pi1=expected_pi1, expected_pi2=expected_pi2,
    )


def orthant(ambient_dim: int) -> List[Tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(ambient_dim)) for i in range(ambient_dim)]


def lens_cone(p: int, q: int = 1) -> List[Tuple[int, int]]:
    return [(1, 0), (-q, p)]


def square_cone(p: int) -> List[Tuple[int, int, int]]:
    return [(1, 0, 0), (0, 1, 0), (-1, 0, p), (0, -1, p)]


NON_GOOD_CONE = [(1, 0, 0), (1, 2, 0), (-1, -1, 1)]

# (a, b, c) -> (pi1, pi2)
T3_BUNDLES = {
    (0, 0, 0): ("Z^3", "Z"),
    (2, 4, 6): ("Z/2 + Z^2", "0"),
    (1, 5, 7): ("Z^2", "0"),
}


def corpus() -> List[CorpusExpectation]:
    """Every built-in example, in a fixed order."""
    entries: List[CorpusExpectation] = []

    for dim in range(2, 7):
        entries.append(_entry(f"orthant_dim{dim}", cone_document(orthant(dim), dim, f"S^{2 * dim - 1}"),
                              "ReebType", "0"))

    for p in range(1, 11):
        entries.append(_entry(f"lens_p{p}", cone_document(lens_cone(p), 2, f"L({p}, 1)"),
                              "ReebType", _cyclic(p)))
    entries.append(_entry("lens_p5_q2", cone_document(lens_cone(5, 2), 2, "L(5, 2)"), "ReebType", "Z/5"))

    for p in range(1, 6):
        entries.append(_entry(f"square_p{p}", cone_document(square_cone(p), 3, f"square cone p={p}"),
                              "ReebType", _cyclic(p)))

    for n in range(1, 4):
        for k in range(1, 4):
            entries.append(_entry(f"simplex_n{n}_k{k}", polytope_document(simplex(n, k), f"{k} x simplex"),
                                  "ReebType", _cyclic(k)))
    entries.append(_entry("box_2x2", polytope_document(box([2, 2]), "2 x 2 square"), "ReebType", "Z/2"))
    entries.append(_entry("box_2x3", polytope_document(box([2, 3]), "2 x 3 rectangle"), "ReebType", "0"))
    entries.append(_entry("hirzebruch_4_2_1", polytope_document(hirzebruch(4, 2, 1), "trapezoid a=4 b=2 k=1"),
                          "ReebType", "Z/2"))

    entries.append(_entry("non_good", cone_document(NON_GOOD_CONE, 3, "not good"), "InvalidMomentCone", "Z/2"))

    entries.append(_entry("half_plane", cone_document([(0, 1)], 2, "S^1 x S^2"), "TorusTimesSphere(1)", "Z", "Z"))
    entries.append(_entry("half_space_dim3", cone_document([(0, 0, 1)], 3, "T^2 x S^3"),
                          "TorusTimesSphere(2)", "Z^2", "0"))
    entries.append(_entry("lineality2_dim4", cone_document([(0, 0, 1, 0), (0, 0, 0, 1)], 4, "T^2 x S^5"),
                          "TorusTimesSphere(2)", "Z^2", "0"))
    entries.append(_entry("whole_plane", cone_document([], 2, "T^2 x S^1"), "TorusTimesSphere(2)", "Z^3", "0"))
    entries.append(_entry("whole_space_dim5", cone_document([], 5, "T^5 x S^4"), "TorusTimesSphere(5)", "Z^5", "0"))

    for bundle_class, (pi1, pi2) in T3_BUNDLES.items():
        a, b, c = bundle_class
        entries.append(_entry(f"t3_bundle_{a}_{b}_{c}",
                              InputDocument(kind="t3_bundle", bundle_class=list(bundle_class)),
                              "PrincipalT3BundleOverS2", pi1, pi2))
        entries.append(_entry(f"whole_space_dim3_{a}_{b}_{c}",
                              cone_document([], 3, "principal T^3-bundle", bundle_class=list(bundle_class)),
                              "PrincipalT3BundleOverS2", pi1, pi2))

    return entries


def emit(directory: str) -> List[Path]:
    """Write each corpus document to <directory>/<name>.json."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in corpus():
        path = target / f"{entry.name}.json"
        path.write_text(json.dumps(entry.document.echo(), indent=2) + "\n")
        written.append(path)
    logger.info(f"Wrote {len(written)} corpus documents to {target}")
    return written


def check_entry(entry: CorpusExpectation) -> Dict[str, Any]:
    """Run one corpus entry and compare with its expectation."""
    report = entry.document.compute()
    pi2 = report.higher_homotopy.get("pi2")
    passed = (
        report.class_label == entry.expected_class
        and report.pi1.render() == entry.expected_pi1
        and report.cross_check.agree
        and (entry.expected_pi2 is None or pi2 == entry.expected_pi2)
    )
    if not passed:
        logger.error(
            f"Corpus entry {entry.name}: expected {entry.expected_class} / {entry.expected_pi1}, "
            f"got {report.class_label} / {report.pi1} ({report.cross_check.details or 'agree'})"
        )
    return {"name": entry.name, "passed": passed, "class_label": report.class_label, "pi1": report.pi1.render()}
