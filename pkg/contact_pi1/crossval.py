"""
Randomized cross-validation of the fundamental-group routes.

Each trial draws either an integral Delzant polytope (dilations and products
of simplices, boxes and trapezoids) or a random unimodular image of a good
corpus cone, runs every applicable route and checks that they agree. Trial
i uses its own Random(seed * 1_000_003 + i), so sharding across workers
does not change any result.
"""

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Tuple

from dotenv import load_dotenv

from contact_pi1.corpus import check_entry, cone_document, corpus, polytope_document
from contact_pi1.src.cone import MomentCone, apply_unimodular, enumerate_rays, is_good
from contact_pi1.src.errors import ContactToricError, ParseError
from contact_pi1.src.lattice import (
    IntMatrix,
    random_elementary_ops,
    unimodular_from_ops,
)
from contact_pi1.src.pi1 import compute_pi1, euler_class_from_relations, euler_coefficients, pi1_lerman, pi1_thmB
from contact_pi1.src.polytope import (
    RationalPolytope,
    box,
    choose_generic_functional,
    cone_over_polytope,
    dilate,
    euler_gcd_consistency,
    hirzebruch,
    morse_indices,
    pi1_thmC,
    product,
    simplex,
)
from contact_pi1.utils.logger import get_logger, log_crossval_metrics, log_performance

load_dotenv()

Range = Tuple[int, int]

AGREE = "agree"
DISAGREE = "disagree"
SKIPPED = "skipped"


@dataclass
class TrialResult:
    index: int
    kind: str
    status: str
    reason: str = ""
    recipe: Dict[str, Any] = field(default_factory=dict)
    document: Optional[Dict[str, Any]] = None


def parse_range(text: str) -> Range:
    """'a..b' (or a single integer) to an inclusive pair."""
    low, _, high = text.strip().partition("..")
    try:
        return int(low), int(high or low)
    except ValueError:
        raise ParseError(f"cannot read range '{text}', expected a..b")


# polytope recipes

def build_polytope(recipe: Dict[str, Any]) -> RationalPolytope:
    builder = recipe["builder"]
    if builder == "simplex":
        base = simplex(recipe["n"])
    elif builder == "box":
        base = box(recipe["lengths"])
    elif builder == "hirzebruch":
        base = hirzebruch(recipe["a"], recipe["b"], recipe["k"])
    elif builder == "product":
        base = product(build_polytope(recipe["left"]), build_polytope(recipe["right"]))
    else:
        raise ValueError(f"Unknown polytope builder: {builder}")
    k = recipe.get("dilate", 1)
    return dilate(base, k) if k > 1 else base


def random_recipe(rng: random.Random, dim: int, depth: int = 0) -> Dict[str, Any]:
    choices = ["simplex", "box"]
    if dim == 2:
        choices.append("hirzebruch")
    if dim >= 2 and depth == 0:
        choices.append("product")
    builder = rng.choice(choices)

    if builder == "simplex":
        recipe = {"builder": "simplex", "n": dim}
    elif builder == "box":
        recipe = {"builder": "box", "lengths": [rng.randint(1, 5) for _ in range(dim)]}
    elif builder == "hirzebruch":
        b, k = rng.randint(1, 3), rng.randint(0, 2)
        recipe = {"builder": "hirzebruch", "a": k * b + rng.randint(1, 4), "b": b, "k": k}
    else:
        left = rng.randint(1, dim - 1)
        recipe = {
            "builder": "product",
            "left": random_recipe(rng, left, depth + 1),
            "right": random_recipe(rng, dim - left, depth + 1),
        }
    recipe["dilate"] = rng.randint(1, 5)
    return recipe


def shrink_recipe(recipe: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
    """Strictly smaller variants of a recipe, smallest change first."""
    if recipe.get("dilate", 1) > 1:
        yield {**recipe, "dilate": recipe["dilate"] - 1}
    builder = recipe["builder"]
    if builder == "box":
        for i, length in enumerate(recipe["lengths"]):
            if length > 1:
                lengths = list(recipe["lengths"])
                lengths[i] = length - 1
                yield {**recipe, "lengths": lengths}
    elif builder == "hirzebruch" and recipe["a"] - 1 > recipe["k"] * recipe["b"]:
        yield {**recipe, "a": recipe["a"] - 1}
    elif builder == "product":
        for side in ("left", "right"):
            for smaller in shrink_recipe(recipe[side]):
                yield {**recipe, side: smaller}


def check_polytope(p: RationalPolytope) -> str:
    """Empty string when every route agrees, otherwise what went wrong."""
    report = compute_pi1(p)
    if not report.cross_check.agree:
        return report.cross_check.details
    thmC = pi1_thmC(p)
    reversed_thmC = pi1_thmC(p, choose_generic_functional(p, reverse=True))
    if thmC != reversed_thmC:
        return f"thmC depends on the functional: {thmC} vs {reversed_thmC}"
    gcd_lengths, gcd_dets, equal = euler_gcd_consistency(p)
    if not equal:
        return f"edge-length gcd {gcd_lengths} differs from Euler gcd {gcd_dets}"
    morse = morse_indices(p, choose_generic_functional(p))
    if morse.count_of_index(2) != p.d - p.dim:
        return f"{morse.count_of_index(2)} index-2 vertices, expected d - n = {p.d - p.dim}"
    if morse.count_of_index(0) != 1 or morse.count_of_index(2 * p.dim) != 1:
        return "minimum or maximum is not unique"
    if report.betti2 != morse.count_of_index(2):
        return f"b2 {report.betti2} differs from the {morse.count_of_index(2)} index-2 vertices"
    if not report.filtration or report.filtration[-1].pi1 != thmC:
        return "last sublevel set does not carry the thmC group"
    relations = euler_class_from_relations(cone_over_polytope(p), (0,) * p.dim + (1,))
    if sorted(abs(x) for x in relations) != sorted(abs(a) for a in euler_coefficients(cone_over_polytope(p)).coeffs):
        return f"Euler coefficients from relations {relations} differ from determinants"
    return ""


# cone trials

@lru_cache(maxsize=None)
def good_corpus_cones() -> Tuple[MomentCone, ...]:
    cones = []
    for entry in corpus():
        document = entry.document
        if entry.expected_class != "ReebType":
            continue
        cone = document.to_source()
        if not isinstance(cone, MomentCone):
            cone = cone_over_polytope(cone)
        cones.append(cone)
    return tuple(cones)


def check_cone(c: MomentCone, U: IntMatrix) -> str:
    image = apply_unimodular(c, U)
    if is_good(image).good != is_good(c).good:
        return "goodness changed under a unimodular transform"
    lerman = pi1_lerman(image)
    thmB = pi1_thmB(image)
    if not lerman.is_cyclic:
        return f"lattice quotient {lerman} is not cyclic"
    if thmB != lerman:
        return f"thmB={thmB}, lerman={lerman}"
    if lerman != pi1_lerman(c):
        return f"group changed under a unimodular transform: {pi1_lerman(c)} vs {lerman}"
    orders = {pi1_thmB(image, ray).order for ray in enumerate_rays(image)}
    if len(orders) != 1:
        return f"thmB depends on the base ray: orders {sorted(orders)}"
    report = compute_pi1(image)
    if not report.cross_check.agree:
        return report.cross_check.details
    return ""


def _cone_document(c: MomentCone, ops, label: str) -> Dict[str, Any]:
    image = apply_unimodular(c, unimodular_from_ops(c.ambient_dim, ops))
    return cone_document(image.normals, image.ambient_dim, label).echo()


def run_trial(seed: int, index: int, dim_range: Range, facet_range: Range) -> TrialResult:
    """One seeded trial; failures are findings, not exceptions."""
    rng = random.Random(seed * 1_000_003 + index)
    dims = [n for n in range(max(dim_range[0], 1), dim_range[1] + 1)]
    if not dims:
        return TrialResult(index, "none", SKIPPED, reason=f"empty dimension range {dim_range}")

    if rng.random() < 0.5:
        n = rng.choice(dims)
        recipe = random_recipe(rng, n)
        try:
            p = build_polytope(recipe)
        except ContactToricError as e:
            return TrialResult(index, "polytope", SKIPPED, reason=f"{type(e).__name__}: {e}", recipe=recipe)
        if not facet_range[0] <= p.d <= facet_range[1]:
            return TrialResult(index, "polytope", SKIPPED, reason=f"{p.d} facets outside {facet_range}", recipe=recipe)
        try:
            problem = check_polytope(p)
        except ContactToricError as e:
            problem = f"{type(e).__name__}: {e}"
        if not problem:
            return TrialResult(index, "polytope", AGREE, recipe=recipe)
        recipe, problem = _minimize_polytope(recipe, problem)
        document = polytope_document(build_polytope(recipe), f"crossval seed {seed} trial {index}").echo()
        return TrialResult(index, "polytope", DISAGREE, reason=problem, recipe=recipe, document=document)

    candidates = [c for c in good_corpus_cones()
                  if c.n in dims and facet_range[0] <= c.d <= facet_range[1]]
    if not candidates:
        return TrialResult(index, "cone", SKIPPED, reason=f"no corpus cone with n in {dim_range} and d in {facet_range}")
    c = rng.choice(candidates)
    ops = random_elementary_ops(c.ambient_dim, rng)
    recipe = {"normals": [list(v) for v in c.normals], "ops": [list(op) for op in ops]}
    try:
        problem = check_cone(c, unimodular_from_ops(c.ambient_dim, ops))
    except ContactToricError as e:
        problem = f"{type(e).__name__}: {e}"
    if not problem:
        return TrialResult(index, "cone", AGREE, recipe=recipe)
    ops, problem = _minimize_ops(c, ops, problem)
    recipe["ops"] = [list(op) for op in ops]
    document = _cone_document(c, ops, f"crossval seed {seed} trial {index}")
    return TrialResult(index, "cone", DISAGREE, reason=problem, recipe=recipe, document=document)


def _minimize_polytope(recipe: Dict[str, Any], problem: str) -> Tuple[Dict[str, Any], str]:
    improved = True
    while improved:
        improved = False
        for smaller in shrink_recipe(recipe):
            try:
                smaller_problem = check_polytope(build_polytope(smaller))
            except ContactToricError as e:
                smaller_problem = str(e)
            if smaller_problem:
                recipe, problem, improved = smaller, smaller_problem, True
                break
    return recipe, problem


def _minimize_ops(c: MomentCone, ops, problem: str):
    ops = list(ops)
    i = 0
    while i < len(ops):
        trial_ops = ops[:i] + ops[i + 1:]
        try:
            trial_problem = check_cone(c, unimodular_from_ops(c.ambient_dim, trial_ops))
        except ContactToricError as e:
            trial_problem = str(e)
        if trial_problem:
            ops, problem = trial_ops, trial_problem
        else:
            i += 1
    return ops, problem


def _run_shard(args) -> List[TrialResult]:
    seed, indices, dim_range, facet_range = args
    return [run_trial(seed, index, dim_range, facet_range) for index in indices]


class CrossValidator:
    """Runs corpus goldens and seeded random trials, collecting statistics"""

    def __init__(self, seed: Optional[int] = None, workers: Optional[int] = None,
                 dim_range: Range = (1, 3), facet_range: Range = (2, 8)):
        self.logger = get_logger("crossval")
        self.seed = seed if seed is not None else int(os.getenv("CONTACT_PI1_SEED", "7"))
        self.workers = workers if workers is not None else int(os.getenv("CONTACT_PI1_WORKERS", "1"))
        self.dim_range = dim_range
        self.facet_range = facet_range
        self.stats = {
            'trials': 0,
            'agree': 0,
            'disagree': 0,
            'skipped': 0,
            'corpus_passed': 0,
            'corpus_failed': 0,
        }

    def run_corpus(self) -> List[Dict[str, Any]]:
        results = []
        for entry in corpus():
            try:
                result = check_entry(entry)
            except ContactToricError as e:
                self.logger.error(f"Corpus entry {entry.name} raised {type(e).__name__}: {e}")
                result = {"name": entry.name, "passed": False, "error": str(e)}
            results.append(result)
            self.stats['corpus_passed' if result["passed"] else 'corpus_failed'] += 1
        return results

    def run_trials(self, count: int) -> List[TrialResult]:
        indices = list(range(count))
        if self.workers <= 1 or count < 2:
            results = _run_shard((self.seed, indices, self.dim_range, self.facet_range))
        else:
            shards = [indices[w::self.workers] for w in range(self.workers)]
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                parts = pool.map(_run_shard, [(self.seed, shard, self.dim_range, self.facet_range) for shard in shards])
                results = [result for part in parts for result in part]
        results.sort(key=lambda result: result.index)

        for result in results:
            self.stats['trials'] += 1
            self.stats[result.status] += 1
            if result.status == DISAGREE:
                self.logger.error(f"Trial {result.index} ({result.kind}) disagrees: {result.reason}")
            elif result.status == SKIPPED:
                self.logger.info(f"Trial {result.index} skipped: {result.reason}")
        return results

    @log_performance
    def run(self, count: int) -> Dict[str, Any]:
        """
        Corpus goldens followed by `count` random trials.

        Args:
            count: Number of random trials (0 runs only the corpus)

        Returns:
            Summary dictionary; 'reproduction' holds the minimized document of the first disagreement
        """
        start_time = time.perf_counter()
        self.logger.info(f"Starting cross-validation: {count} trials, seed {self.seed}, {self.workers} workers")

        corpus_results = self.run_corpus()
        trials = self.run_trials(count)

        failures = [result for result in trials if result.status == DISAGREE]
        skip_reasons: Dict[str, int] = {}
        for result in trials:
            if result.status == SKIPPED:
                skip_reasons[result.reason] = skip_reasons.get(result.reason, 0) + 1

        log_crossval_metrics(
            total=count,
            agreed=self.stats['agree'],
            disagreed=self.stats['disagree'],
            skipped=self.stats['skipped'],
            execution_time=time.perf_counter() - start_time,
        )

        return {
            'seed': self.seed,
            'statistics': dict(self.stats),
            'corpus_failures': [result["name"] for result in corpus_results if not result["passed"]],
            'skip_reasons': skip_reasons,
            'reproduction': failures[0].document if failures else None,
            'failure_reason': failures[0].reason if failures else None,
            'success': not failures and not self.stats['corpus_failed'],
        }
