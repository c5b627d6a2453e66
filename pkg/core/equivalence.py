"""
Equivalence over a Base - Double Categories Fibred over B
=========================================================
Decides whether strict double functors P: A -> B and Q: A' -> B are
equivalent over B: pseudo double functors G: A -> A' and G': A' -> A
commuting strictly with the projections, with invertible vertical
transformations G'G => 1 and GG' => 1 lying over identities.

Search:
- Candidates are restricted to the fiber over the image in B and tried
  label-hint first (equal labels, or a composite label whose last
  component is the other label)
- Each level must be fully faithful and essentially surjective through
  vertical isomorphisms before comparison cells are chosen
- Comparison cells are the least globular vertical isomorphisms
- A node budget turns an exhausted search into an inconclusive verdict

Round trips:
- roundtrip_fibration: El(fibers(P)) against P
- roundtrip_indexed: fibers(El(F)) against F
"""

import logging
from itertools import product
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from api.models.report_models import Certification, Report
from core.dblcat import (DoubleFunctor, Flavor, PseudoDoubleCategory, VerticalTransformation,
                         compose_double_functors, validate_double_functor, validate_vertical_transformation)
from core.dblfib import DoubleCleavage, search_double_cleavage
from core.elements import IndexedDoubleCategory, compare_indexed, elements_construction, fibers_construction
from core.errors import PreconditionError
from core.fincat import FinCategory, Functor, Label, SearchBudget, search_functors

logger = logging.getLogger(__name__)


class EquivalenceWitness(NamedTuple):
    """G: A -> A', G': A' -> A and the invertible G'G => 1, GG' => 1"""
    forward: DoubleFunctor
    backward: DoubleFunctor
    unit: VerticalTransformation
    counit: VerticalTransformation

    def describe(self) -> dict:
        G = self.forward
        return {
            "forward": {"flavor": G.flavor.value,
                        "objects": [[G.dom.E0.objects[x], G.cod.E0.objects[G.F0.obj(x)]]
                                    for x in range(G.dom.E0.n_objects)]},
            "backward": {"flavor": self.backward.flavor.value},
        }


def _hint(source: Label, target: Label) -> bool:
    if source == target:
        return True
    if isinstance(source, tuple) and source and source[-1] == target:
        return True
    return isinstance(target, tuple) and bool(target) and target[-1] == source


def _hinted(candidates: Sequence[int], labels: Sequence[Label], source: Label) -> List[int]:
    return sorted(candidates, key=lambda c: 0 if _hint(source, labels[c]) else 1)


def _vertical_iso(C: FinCategory, p: Functor, a: int) -> bool:
    return p.cod.is_identity(p.arr(a)) and C.is_isomorphism(a)


def _fully_faithful(G: Functor) -> bool:
    X, Y = G.dom, G.cod
    for x in range(X.n_objects):
        for y in range(X.n_objects):
            hom = X.hom(x, y)
            if len(Y.hom(G.obj(x), G.obj(y))) != len(hom) or len({G.arr(a) for a in hom}) != len(hom):
                return False
    return True


def _essentially_surjective(G: Functor, q: Functor) -> bool:
    Y = G.cod
    images = {G.obj(x) for x in range(G.dom.n_objects)}
    for y in range(Y.n_objects):
        if y in images:
            continue
        if not any(_vertical_iso(Y, q, a) for a in Y.arrows_into(y) if Y.src(a) in images):
            return False
    return True


def _level_functors(p: Functor, q: Functor, budget: SearchBudget,
                    object_ok: Callable[[int, int], bool] = lambda x, y: True,
                    arrow_ok: Callable[[int, int], bool] = lambda a, b: True) -> Iterator[Functor]:
    """Functors G with q G = p, fully faithful and essentially surjective"""
    X, Y = p.dom, q.dom

    def objects(x: int) -> List[int]:
        found = [y for y in q.fiber_over_object(p.obj(x)) if object_ok(x, y)]
        return _hinted(found, Y.objects, X.objects[x])

    def arrows(a: int, x: int, y: int) -> List[int]:
        found = [b for b in Y.hom(x, y) if q.arr(b) == p.arr(a) and arrow_ok(a, b)]
        return _hinted(found, Y.arrows, X.arrows[a])

    for G in search_functors(X, Y, object_candidates=objects, arrow_candidates=arrows, budget=budget):
        if _fully_faithful(G) and _essentially_surjective(G, q):
            yield G


def _least_globular_iso(D: PseudoDoubleCategory, q: Functor, source: int, target: int) -> Optional[int]:
    E1 = D.E1
    for c in E1.hom(source, target):
        if _vertical_iso(E1, q, c) and D.E0.is_identity(D.src.arr(c)) and D.E0.is_identity(D.tgt.arr(c)):
            return c
    return None


def _double_functors(P: DoubleFunctor, Q: DoubleFunctor, budget: SearchBudget) -> Iterator[DoubleFunctor]:
    """Pseudo double functors G: dom P -> dom Q over the base, levelwise equivalences"""
    A, A2 = P.dom, Q.dom
    for G0 in _level_functors(P.F0, Q.F0, budget):
        def object_ok(m: int, m2: int) -> bool:
            return A2.src.obj(m2) == G0.obj(A.src.obj(m)) and A2.tgt.obj(m2) == G0.obj(A.tgt.obj(m))

        def arrow_ok(t: int, t2: int) -> bool:
            return A2.src.arr(t2) == G0.arr(A.src.arr(t)) and A2.tgt.arr(t2) == G0.arr(A.tgt.arr(t))

        for G1 in _level_functors(P.F1, Q.F1, budget, object_ok, arrow_ok):
            phi, iota = {}, {}
            for m, n in A.composable_pairs():
                c = _least_globular_iso(A2, Q.F1, A2.tensor_obj(G1.obj(m), G1.obj(n)), G1.obj(A.tensor_obj(m, n)))
                if c is None:
                    break
                phi[(m, n)] = c
            else:
                for x in range(A.E0.n_objects):
                    c = _least_globular_iso(A2, Q.F1, A2.unit_obj(G0.obj(x)), G1.obj(A.unit_obj(x)))
                    if c is None:
                        break
                    iota[x] = c
                else:
                    strict = all(A2.E1.is_identity(c) for c in list(phi.values()) + list(iota.values()))
                    G = DoubleFunctor(A, A2, G0, G1, phi, iota, flavor=Flavor.STRICT if strict else Flavor.PSEUDO,
                                      name="G")
                    if validate_double_functor(G).passed:
                        yield G
            if budget.exhausted:
                return
        if budget.exhausted:
            return


def _invertible_transformation(source: DoubleFunctor, target: DoubleFunctor, p: DoubleFunctor,
                               budget: SearchBudget) -> Optional[VerticalTransformation]:
    """A vertical transformation source => target with iso components over identities"""
    D = target.cod
    E0, E1 = D.E0, D.E1
    X = source.dom
    choices0 = [[a for a in E0.hom(source.F0.obj(x), target.F0.obj(x)) if _vertical_iso(E0, p.F0, a)]
                for x in range(X.E0.n_objects)]
    for components0 in product(*choices0):
        if not budget.tick():
            return None
        choices1 = [[c for c in E1.hom(source.F1.obj(m), target.F1.obj(m))
                     if _vertical_iso(E1, p.F1, c) and D.src.arr(c) == components0[X.src.obj(m)]
                     and D.tgt.arr(c) == components0[X.tgt.obj(m)]]
                    for m in range(X.E1.n_objects)]
        for components1 in product(*choices1):
            if not budget.tick():
                return None
            alpha = VerticalTransformation(source, target, components0, components1)
            if validate_vertical_transformation(alpha).passed:
                return alpha
    return None


def _same_base(P: DoubleFunctor, Q: DoubleFunctor) -> None:
    P.require_strict()
    Q.require_strict()
    if P.cod is not Q.cod and (P.cod.E0 != Q.cod.E0 or P.cod.E1 != Q.cod.E1):
        raise PreconditionError("projections have different bases")


def check_equivalence_over_base(P: DoubleFunctor, Q: DoubleFunctor,
                                bound: Optional[int] = None) -> Tuple[Optional[EquivalenceWitness], Report]:
    """An equivalence dom P = dom Q commuting with the projections"""
    check = "equivalence_over_base"
    _same_base(P, Q)
    budget = SearchBudget(limit=bound)
    stage = "forward"
    for G in _double_functors(P, Q, budget):
        stage = "backward"
        for G2 in _double_functors(Q, P, budget):
            stage = "transformations"
            unit = _invertible_transformation(compose_double_functors(G, G2), DoubleFunctor.identity(P.dom), P,
                                              budget)
            if unit is None:
                if budget.exhausted:
                    break
                continue
            counit = _invertible_transformation(compose_double_functors(G2, G), DoubleFunctor.identity(Q.dom), Q,
                                                budget)
            if counit is None:
                if budget.exhausted:
                    break
                continue
            witness = EquivalenceWitness(G, G2, unit, counit)
            logger.info("equivalence over base found (%s / %s)", G.flavor.value, G2.flavor.value)
            report = Report.passing(check, witness=witness.describe(), stats={"nodes": budget.spent})
            return witness, report.certified(Certification.EXHAUSTIVE)
        if budget.exhausted:
            break
    if budget.exhausted:
        return None, Report.inconclusive(check, stats={"nodes": budget.spent},
                                         notes=[f"search bound reached at {stage}"])
    return None, Report.failing(check, {"stage": stage, "reason": "no equivalence over the base"},
                                stats={"nodes": budget.spent})


def roundtrip_fibration(P: DoubleFunctor, cleavage: Optional[DoubleCleavage] = None,
                        bound: Optional[int] = None) -> Report:
    """El(fibers(P)) -> B against P itself"""
    check = "roundtrip_fibration"
    if cleavage is None:
        cleavage, found = search_double_cleavage(P, bound=bound)
        if cleavage is None:
            return found.model_copy(update={"check": check})
    elements = elements_construction(fibers_construction(P, cleavage))
    _, report = check_equivalence_over_base(elements.projection, P, bound=bound)
    return report.model_copy(update={"check": check})


def roundtrip_indexed(F: IndexedDoubleCategory, bound: Optional[int] = None) -> Report:
    """fibers(El(F)) with the canonical cleavage against F"""
    elements = elements_construction(F)
    G = fibers_construction(elements.projection, elements.cleavage, name=f"fibers(El({F.name}))")
    report = compare_indexed(F, G, bound=bound)
    return report.model_copy(update={"check": "roundtrip_indexed"})
