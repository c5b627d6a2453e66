"""
Double Categories - Pseudo Categories in Cat
============================================
Normalized pseudo double categories over finite categories, lax/pseudo/
strict double functors, vertical transformations and the concrete
double-category builders used throughout the toolkit.

Features:
- Composites evaluated per pair on demand; the strict pullback of tgt
  and src is built only when asked for
- Coherence validation: unit laws, associator globularity, naturality,
  pentagon and normalization
- Double functors with comparison cells and flavor checks
- Builders: vertically trivial, quintets of a 2-category, arrow double
  category, comma double category, codomain double category,
  monoidal categories as one-object double categories, generator shapes
- Vertical 2-category, horizontal hom categories

Proarrows compose in diagrammatic order: for tgt m = src n the composite
m (x) n runs from src m to tgt n.
"""

import logging
from enum import Enum
from typing import Callable, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from api.models.report_models import Report, combine
from core.errors import FlavorError, PreconditionError
from core.fib import ClovenFibration
from core.fincat import (ArrowCategory, FinCategory, Functor, Pullback, arrow_category, arrow_functor,
                         chosen_pullback, has_pullbacks, pullback_category, subcategory,
                         terminal_category, validate_category, validate_functor)
from core.twocat import Fin2Category, TwoFunctor, whisker_left, whisker_right

logger = logging.getLogger(__name__)

Label = Hashable
Pair = Tuple[int, int]
Triple = Tuple[int, int, int]
TensorFn = Callable[[int, int], int]
AssociatorFn = Callable[[int, int, int], Optional[int]]


class Flavor(str, Enum):
    LAX = "lax"
    PSEUDO = "pseudo"
    STRICT = "strict"


class PseudoDoubleCategory:
    """Two categories E0, E1 with src, tgt, unit, tensor and an associator

    The tensor is given as two id-level functions and evaluated per pair on
    demand; the category of composable pairs is only materialized when
    `composable` or `tensor` is read.
    """

    def __init__(self, E0: FinCategory, E1: FinCategory, src: Functor, tgt: Functor, unit: Functor,
                 tensor_obj: TensorFn, tensor_arr: TensorFn, associator: Optional[AssociatorFn] = None,
                 name: str = ""):
        self.E0 = E0
        self.E1 = E1
        self.src = src
        self.tgt = tgt
        self.unit = unit
        self.name = name
        self.window: Optional[Dict] = None
        self._tensor_obj = tensor_obj
        self._tensor_arr = tensor_arr
        self._associator = associator
        self._objs: Dict[Pair, int] = {}
        self._arrs: Dict[Pair, int] = {}
        self._assoc: Dict[Triple, int] = {}
        self._cache: Dict = {}

    # composition --------------------------------------------------------

    def tensor_obj(self, m: int, n: int) -> int:
        key = (m, n)
        if key not in self._objs:
            if self.tgt.obj(m) != self.src.obj(n):
                raise PreconditionError(f"proarrows {self.E1.objects[m]!r} and {self.E1.objects[n]!r} "
                                        f"are not composable")
            self._objs[key] = int(self._tensor_obj(m, n))
        return self._objs[key]

    def tensor_arr(self, theta: int, delta: int) -> int:
        key = (theta, delta)
        if key not in self._arrs:
            if self.tgt.arr(theta) != self.src.arr(delta):
                raise PreconditionError(f"cells {self.E1.arrows[theta]!r} and {self.E1.arrows[delta]!r} "
                                        f"are not composable")
            self._arrs[key] = int(self._tensor_arr(theta, delta))
        return self._arrs[key]

    def unit_obj(self, x: int) -> int:
        return self.unit.obj(x)

    def unit_arr(self, f: int) -> int:
        return self.unit.arr(f)

    def associator(self, m: int, n: int, p: int) -> int:
        """Component (m (x) n) (x) p -> m (x) (n (x) p); identity when none was given"""
        key = (m, n, p)
        if key not in self._assoc:
            if self.tgt.obj(n) != self.src.obj(p):
                raise PreconditionError(f"proarrows {self.E1.objects[n]!r} and {self.E1.objects[p]!r} "
                                        f"are not composable")
            source = self.tensor_obj(self.tensor_obj(m, n), p)
            a = None if self._associator is None else self._associator(m, n, p)
            self._assoc[key] = self.E1.identity(source) if a is None else int(a)
        return self._assoc[key]

    @property
    def associator_components(self) -> Dict[Triple, int]:
        return {triple: self.associator(*triple) for triple in self.composable_triples()}

    def composable_pairs(self) -> List[Pair]:
        if "pairs" not in self._cache:
            self._cache["pairs"] = [(m, n) for m in range(self.E1.n_objects)
                                    for n in self.proarrows_from(self.tgt.obj(m))]
        return list(self._cache["pairs"])

    def composable_arrow_pairs(self) -> List[Pair]:
        if "arrow_pairs" not in self._cache:
            self._cache["arrow_pairs"] = [(theta, delta) for theta in range(self.E1.n_arrows)
                                          for delta in self.cells_from(self.tgt.arr(theta))]
        return list(self._cache["arrow_pairs"])

    @property
    def composable(self) -> Pullback:
        """E1 x_E0 E1 as a finite category"""
        if "composable" not in self._cache:
            self._cache["composable"] = composable_pullback(self.tgt, self.src)
        return self._cache["composable"]

    @property
    def tensor(self) -> Functor:
        """The tensor as a functor on the composable pairs"""
        if "tensor" not in self._cache:
            comp = self.composable
            self._cache["tensor"] = Functor.from_functions(
                comp.category, self.E1,
                lambda i: self.tensor_obj(comp.left.obj(i), comp.right.obj(i)),
                lambda k: self.tensor_arr(comp.left.arr(k), comp.right.arr(k)),
                name="tensor")
        return self._cache["tensor"]

    def proarrows_from(self, x: int) -> Tuple[int, ...]:
        return self.src.fiber_over_object(x)

    def cells_from(self, f: int) -> Tuple[int, ...]:
        """Cells whose source vertical arrow is f"""
        return self.src.arrows_over(f)

    def composable_triples(self) -> List[Triple]:
        return [(m, n, p) for m, n in self.composable_pairs() for p in self.proarrows_from(self.tgt.obj(n))]

    def composable_arrow_triples(self) -> Iterable[Triple]:
        for theta, delta in self.composable_arrow_pairs():
            for eps in self.cells_from(self.tgt.arr(delta)):
                yield theta, delta, eps

    def composable_quadruples(self) -> Iterable[Tuple[int, int, int, int]]:
        for m, n, p in self.composable_triples():
            for q in self.proarrows_from(self.tgt.obj(p)):
                yield m, n, p, q

    def is_unit(self, m: int) -> bool:
        return self.unit.obj(self.src.obj(m)) == m

    def is_strict(self) -> bool:
        if self._associator is None:
            return True
        if "strict" not in self._cache:
            self._cache["strict"] = all(self.E1.is_identity(self.associator(*triple))
                                        for triple in self.composable_triples())
        return self._cache["strict"]

    def __repr__(self) -> str:
        return (f"PseudoDoubleCategory({self.name or '?'}: {self.E0.n_objects} objects, {self.E1.n_objects} "
                f"proarrows, {self.E1.n_arrows} cells)")


def composable_pullback(tgt: Functor, src: Functor) -> Pullback:
    return pullback_category(tgt, src, name="E1xE1")


def make_double_category(E0: FinCategory, E1: FinCategory, src: Functor, tgt: Functor, unit: Functor,
                         tensor_obj: TensorFn, tensor_arr: TensorFn, associator: Optional[AssociatorFn] = None,
                         name: str = "") -> PseudoDoubleCategory:
    """Assemble a double category from id-level tensor functions"""
    return PseudoDoubleCategory(E0, E1, src, tgt, unit, tensor_obj, tensor_arr, associator, name=name)


# validation -----------------------------------------------------------------

def validate_double_category(D: PseudoDoubleCategory) -> Report:
    """Every structural law of a normalized pseudo double category, exhaustively"""
    checks = [validate_category(D.E0).model_copy(update={"check": "objects_category"}),
              validate_category(D.E1).model_copy(update={"check": "proarrows_category"})]
    for label, F in (("src", D.src), ("tgt", D.tgt), ("unit", D.unit)):
        checks.append(validate_functor(F).model_copy(update={"check": f"{label}_functor"}))
    if any(r.failed for r in checks):
        return combine("validate_double_category", checks)
    checks.append(_unit_sections(D))
    checks.append(_tensor_endpoints(D))
    if any(r.failed for r in checks):
        return combine("validate_double_category", checks)
    checks.append(_tensor_functor(D))
    checks.append(_unit_laws(D))
    if any(r.failed for r in checks):
        return combine("validate_double_category", checks)
    checks.append(_associator_laws(D))
    report = combine("validate_double_category", checks, witness={"strict": D.is_strict()})
    logger.debug("validated %r: %s", D, report.status.value)
    return report


def _unit_sections(D: PseudoDoubleCategory) -> Report:
    for label, leg in (("src", D.src), ("tgt", D.tgt)):
        for f in range(D.E0.n_arrows):
            if leg.arr(D.unit_arr(f)) != f:
                return Report.failing("unit_sections", {"leg": label, "arrow": D.E0.arrows[f]})
    return Report.passing("unit_sections")


def _tensor_endpoints(D: PseudoDoubleCategory) -> Report:
    """src(m (x) n) = src m and tgt(m (x) n) = tgt n, on proarrows and cells"""
    E1 = D.E1
    pairs = D.composable_pairs()
    for m, n in pairs:
        mn = D.tensor_obj(m, n)
        if not (0 <= mn < E1.n_objects):
            return Report.failing("tensor_endpoints", {"reason": "not a proarrow",
                                                       "pair": [E1.objects[m], E1.objects[n]]})
        for label, leg, end in (("src", D.src, m), ("tgt", D.tgt, n)):
            if leg.obj(mn) != leg.obj(end):
                return Report.failing("tensor_endpoints", {"leg": label, "pair": [E1.objects[m], E1.objects[n]]})
    for theta, delta in D.composable_arrow_pairs():
        td = D.tensor_arr(theta, delta)
        if not (0 <= td < E1.n_arrows):
            return Report.failing("tensor_endpoints", {"reason": "not a cell",
                                                       "cells": [E1.arrows[theta], E1.arrows[delta]]})
        for label, leg, end in (("src", D.src, theta), ("tgt", D.tgt, delta)):
            if leg.arr(td) != leg.arr(end):
                return Report.failing("tensor_endpoints",
                                      {"leg": label, "cells": [E1.arrows[theta], E1.arrows[delta]]})
    return Report.passing("tensor_endpoints", stats={"pairs": len(pairs)})


def _tensor_functor(D: PseudoDoubleCategory) -> Report:
    """Tensor typing, identities and interchange, pair by pair"""
    E1 = D.E1
    T = E1.table
    for m, n in D.composable_pairs():
        if D.tensor_arr(E1.identity(m), E1.identity(n)) != E1.identity(D.tensor_obj(m, n)):
            return Report.failing("tensor_functor", {"reason": "identity", "pair": [E1.objects[m], E1.objects[n]]})
    pairs = D.composable_arrow_pairs()
    for theta, delta in pairs:
        td = D.tensor_arr(theta, delta)
        if E1.src(td) != D.tensor_obj(E1.src(theta), E1.src(delta)) or \
                E1.tgt(td) != D.tensor_obj(E1.tgt(theta), E1.tgt(delta)):
            return Report.failing("tensor_functor", {"reason": "typing",
                                                     "cells": [E1.arrows[theta], E1.arrows[delta]]})
    count = 0
    for theta, delta in pairs:
        td = D.tensor_arr(theta, delta)
        for theta2 in E1.arrows_out_of(E1.tgt(theta)):
            for delta2 in E1.arrows_out_of(E1.tgt(delta)):
                if D.tgt.arr(theta2) != D.src.arr(delta2):
                    continue
                count += 1
                lhs = D.tensor_arr(int(T[theta2, theta]), int(T[delta2, delta]))
                if lhs != T[D.tensor_arr(theta2, delta2), td]:
                    return Report.failing("tensor_functor",
                                          {"reason": "interchange",
                                           "cells": [E1.arrows[c] for c in (theta, delta, theta2, delta2)]},
                                          stats={"interchange": count})
    return Report.passing("tensor_functor", stats={"interchange": count})


def _unit_laws(D: PseudoDoubleCategory) -> Report:
    """y(src m) (x) m = m = m (x) y(tgt m) on proarrows and cells"""
    E1 = D.E1
    for m in range(E1.n_objects):
        if D.tensor_obj(D.unit_obj(D.src.obj(m)), m) != m or D.tensor_obj(m, D.unit_obj(D.tgt.obj(m))) != m:
            return Report.failing("unit_laws", {"proarrow": E1.objects[m]})
    for theta in range(E1.n_arrows):
        left = D.tensor_arr(D.unit_arr(D.src.arr(theta)), theta)
        right = D.tensor_arr(theta, D.unit_arr(D.tgt.arr(theta)))
        if left != theta or right != theta:
            return Report.failing("unit_laws", {"cell": E1.arrows[theta]})
    return Report.passing("unit_laws", stats={"proarrows": E1.n_objects, "cells": E1.n_arrows})


def _associator_laws(D: PseudoDoubleCategory) -> Report:
    E0, E1 = D.E0, D.E1
    T = E1.table
    count = 0
    for (m, n, p), a in sorted(D.associator_components.items()):
        count += 1
        source = D.tensor_obj(D.tensor_obj(m, n), p)
        target = D.tensor_obj(m, D.tensor_obj(n, p))
        triple = [E1.objects[m], E1.objects[n], E1.objects[p]]
        if E1.src(a) != source or E1.tgt(a) != target:
            return Report.failing("associator", {"reason": "typing", "triple": triple})
        if not (E0.is_identity(D.src.arr(a)) and E0.is_identity(D.tgt.arr(a))):
            return Report.failing("associator", {"reason": "not globular", "triple": triple})
        if not E1.is_isomorphism(a):
            return Report.failing("associator", {"reason": "not invertible", "triple": triple})
        if (D.is_unit(m) or D.is_unit(n) or D.is_unit(p)) and not E1.is_identity(a):
            return Report.failing("associator", {"reason": "unit component is not an identity", "triple": triple})
    for theta, delta, eps in D.composable_arrow_triples():
        count += 1
        source = (E1.src(theta), E1.src(delta), E1.src(eps))
        target = (E1.tgt(theta), E1.tgt(delta), E1.tgt(eps))
        lhs = T[D.associator(*target), D.tensor_arr(D.tensor_arr(theta, delta), eps)]
        rhs = T[D.tensor_arr(theta, D.tensor_arr(delta, eps)), D.associator(*source)]
        if lhs != rhs:
            return Report.failing("associator", {"reason": "naturality",
                                                 "cells": [E1.arrows[theta], E1.arrows[delta], E1.arrows[eps]]})
    for m, n, p, q in D.composable_quadruples():
        count += 1
        lhs = T[D.associator(m, n, D.tensor_obj(p, q)), D.associator(D.tensor_obj(m, n), p, q)]
        step1 = D.tensor_arr(D.associator(m, n, p), E1.identity(q))
        step2 = D.associator(m, D.tensor_obj(n, p), q)
        step3 = D.tensor_arr(E1.identity(m), D.associator(n, p, q))
        rhs = T[step3, T[step2, step1]]
        if lhs != rhs:
            return Report.failing("associator", {"reason": "pentagon",
                                                 "quadruple": [E1.objects[x] for x in (m, n, p, q)]},
                                  stats={"coherence": count})
    return Report.passing("associator", stats={"coherence": count})


# double functors --------------------------------------------------------------

class DoubleFunctor:
    """Lax double functor: F0, F1 with comparison cells phi and iota"""

    def __init__(self, dom: PseudoDoubleCategory, cod: PseudoDoubleCategory, F0: Functor, F1: Functor,
                 phi: Optional[Dict[Pair, int]] = None, iota: Optional[Dict[int, int]] = None,
                 flavor: Flavor = Flavor.STRICT, name: str = ""):
        self.dom = dom
        self.cod = cod
        self.F0 = F0
        self.F1 = F1
        self.flavor = Flavor(flavor)
        self.name = name or F1.name
        self.phi: Dict[Pair, int] = {}
        for m, n in dom.composable_pairs():
            given = None if phi is None else phi.get((m, n))
            if given is None:
                given = cod.E1.identity(cod.tensor_obj(F1.obj(m), F1.obj(n)))
            self.phi[(m, n)] = given
        self.iota: Dict[int, int] = {}
        for x in range(dom.E0.n_objects):
            given = None if iota is None else iota.get(x)
            if given is None:
                given = cod.E1.identity(cod.unit_obj(F0.obj(x)))
            self.iota[x] = given

    @classmethod
    def identity(cls, D: PseudoDoubleCategory) -> "DoubleFunctor":
        return cls(D, D, Functor.identity(D.E0), Functor.identity(D.E1), name="1")

    def is_unitary(self) -> bool:
        return all(self.cod.E1.is_identity(c) for c in self.iota.values())

    def comparisons_are_identities(self) -> bool:
        E1 = self.cod.E1
        return self.is_unitary() and all(E1.is_identity(c) for c in self.phi.values())

    def comparisons_are_invertible(self) -> bool:
        E1 = self.cod.E1
        return all(E1.is_isomorphism(c) for c in list(self.phi.values()) + list(self.iota.values()))

    def require_strict(self) -> None:
        if self.flavor != Flavor.STRICT or not self.comparisons_are_identities():
            raise FlavorError(f"double functor {self.name or '?'} is not strict")

    def op(self) -> "DoubleFunctor":
        """Levelwise opposite, used for opfibration checks on strict functors"""
        self.require_strict()
        return DoubleFunctor(opposite_double(self.dom), opposite_double(self.cod),
                             self.F0.op(), self.F1.op(), name=f"{self.name}^op")

    def __repr__(self) -> str:
        return f"DoubleFunctor({self.name or '?'}, {self.flavor.value}: {self.dom!r} -> {self.cod!r})"


def validate_double_functor(F: DoubleFunctor) -> Report:
    """Source/target preservation, globular natural comparisons, coherence and flavor"""
    D, C = F.dom, F.cod
    CE1 = C.E1
    T = CE1.table
    checks = [validate_functor(F.F0).model_copy(update={"check": "F0"}),
              validate_functor(F.F1).model_copy(update={"check": "F1"})]
    if any(r.failed for r in checks):
        return combine("validate_double_functor", checks)
    if F.F1.then(C.src) != D.src.then(F.F0) or F.F1.then(C.tgt) != D.tgt.then(F.F0):
        checks.append(Report.failing("endpoints", {"reason": "source or target not preserved"}))
        return combine("validate_double_functor", checks)

    def globular(cell: int, left: int, right: int) -> bool:
        return C.src.arr(cell) == C.E0.identity(left) and C.tgt.arr(cell) == C.E0.identity(right)

    for x, c in F.iota.items():
        if CE1.src(c) != C.unit_obj(F.F0.obj(x)) or CE1.tgt(c) != F.F1.obj(D.unit_obj(x)) \
                or not globular(c, F.F0.obj(x), F.F0.obj(x)):
            checks.append(Report.failing("comparisons", {"reason": "iota typing", "object": D.E0.objects[x]}))
            return combine("validate_double_functor", checks)
    for (m, n), c in F.phi.items():
        if CE1.src(c) != C.tensor_obj(F.F1.obj(m), F.F1.obj(n)) or CE1.tgt(c) != F.F1.obj(D.tensor_obj(m, n)) \
                or not globular(c, F.F0.obj(D.src.obj(m)), F.F0.obj(D.tgt.obj(n))):
            checks.append(Report.failing("comparisons", {"reason": "phi typing",
                                                         "pair": [D.E1.objects[m], D.E1.objects[n]]}))
            return combine("validate_double_functor", checks)
    for f in range(D.E0.n_arrows):
        x, y = D.E0.src(f), D.E0.tgt(f)
        if T[F.F1.arr(D.unit_arr(f)), F.iota[x]] != T[F.iota[y], C.unit_arr(F.F0.arr(f))]:
            checks.append(Report.failing("comparisons", {"reason": "iota naturality", "arrow": D.E0.arrows[f]}))
            return combine("validate_double_functor", checks)
    for theta, delta in D.composable_arrow_pairs():
        s = (D.E1.src(theta), D.E1.src(delta))
        t = (D.E1.tgt(theta), D.E1.tgt(delta))
        lhs = T[F.F1.arr(D.tensor_arr(theta, delta)), F.phi[s]]
        rhs = T[F.phi[t], C.tensor_arr(F.F1.arr(theta), F.F1.arr(delta))]
        if lhs != rhs:
            checks.append(Report.failing("comparisons", {"reason": "phi naturality",
                                                         "cells": [D.E1.arrows[theta], D.E1.arrows[delta]]}))
            return combine("validate_double_functor", checks)
    checks.append(Report.passing("comparisons"))
    checks.append(_functor_coherence(F))
    checks.append(_flavor(F))
    return combine("validate_double_functor", checks, witness={"flavor": F.flavor.value,
                                                               "unitary": F.is_unitary()})


def _functor_coherence(F: DoubleFunctor) -> Report:
    D, C = F.dom, F.cod
    CE1 = C.E1
    T = CE1.table
    F1 = F.F1
    count = 0
    for m, n, p in D.composable_triples():
        count += 1
        fm, fn, fp = F1.obj(m), F1.obj(n), F1.obj(p)
        lhs = T[F1.arr(D.associator(m, n, p)),
                T[F.phi[(D.tensor_obj(m, n), p)], C.tensor_arr(F.phi[(m, n)], CE1.identity(fp))]]
        rhs = T[F.phi[(m, D.tensor_obj(n, p))],
                T[C.tensor_arr(CE1.identity(fm), F.phi[(n, p)]), C.associator(fm, fn, fp)]]
        if lhs != rhs:
            return Report.failing("coherence", {"reason": "associativity",
                                                "triple": [D.E1.objects[x] for x in (m, n, p)]})
    for m in range(D.E1.n_objects):
        count += 1
        a, b = D.src.obj(m), D.tgt.obj(m)
        fm = F1.obj(m)
        left = T[F.phi[(D.unit_obj(a), m)], C.tensor_arr(F.iota[a], CE1.identity(fm))]
        right = T[F.phi[(m, D.unit_obj(b))], C.tensor_arr(CE1.identity(fm), F.iota[b])]
        if left != CE1.identity(fm) or right != CE1.identity(fm):
            return Report.failing("coherence", {"reason": "unit", "proarrow": D.E1.objects[m]})
    return Report.passing("coherence", stats={"coherence": count})


def _flavor(F: DoubleFunctor) -> Report:
    if F.flavor == Flavor.STRICT and not F.comparisons_are_identities():
        return Report.failing("flavor", {"claimed": "strict", "reason": "comparison cell is not an identity"})
    if F.flavor == Flavor.PSEUDO and not F.comparisons_are_invertible():
        return Report.failing("flavor", {"claimed": "pseudo", "reason": "comparison cell is not invertible"})
    return Report.passing("flavor", witness={"flavor": F.flavor.value})


def compose_double_functors(F: DoubleFunctor, G: DoubleFunctor) -> DoubleFunctor:
    """G after F"""
    if F.cod is not G.dom and F.cod.E1 != G.dom.E1:
        raise PreconditionError("double functors are not composable")
    C = G.cod
    T = C.E1.table
    phi = {(m, n): int(T[G.F1.arr(c), G.phi[(F.F1.obj(m), F.F1.obj(n))]]) for (m, n), c in F.phi.items()}
    iota = {x: int(T[G.F1.arr(c), G.iota[F.F0.obj(x)]]) for x, c in F.iota.items()}
    order = [Flavor.LAX, Flavor.PSEUDO, Flavor.STRICT]
    flavor = order[min(order.index(F.flavor), order.index(G.flavor))]
    return DoubleFunctor(F.dom, C, F.F0.then(G.F0), F.F1.then(G.F1), phi, iota, flavor=flavor,
                         name=f"{G.name}.{F.name}")


class VerticalTransformation:
    """Per-object arrows alpha_X in E0 and per-proarrow cells alpha_M in E1"""

    def __init__(self, source: DoubleFunctor, target: DoubleFunctor,
                 components0: Sequence[int], components1: Sequence[int], name: str = ""):
        self.source = source
        self.target = target
        self.components0 = [int(a) for a in components0]
        self.components1 = [int(c) for c in components1]
        self.name = name

    @classmethod
    def identity(cls, F: DoubleFunctor) -> "VerticalTransformation":
        C = F.cod
        return cls(F, F, [C.E0.identity(F.F0.obj(x)) for x in range(F.dom.E0.n_objects)],
                   [C.E1.identity(F.F1.obj(m)) for m in range(F.dom.E1.n_objects)])


def validate_vertical_transformation(alpha: VerticalTransformation) -> Report:
    F, G = alpha.source, alpha.target
    D, C = F.dom, F.cod
    E0, E1 = C.E0, C.E1
    T0, T1 = E0.table, E1.table
    a0, a1 = alpha.components0, alpha.components1
    for x in range(D.E0.n_objects):
        if E0.src(a0[x]) != F.F0.obj(x) or E0.tgt(a0[x]) != G.F0.obj(x):
            return Report.failing("validate_vertical_transformation", {"reason": "typing", "object": D.E0.objects[x]})
    for f in range(D.E0.n_arrows):
        if T0[a0[D.E0.tgt(f)], F.F0.arr(f)] != T0[G.F0.arr(f), a0[D.E0.src(f)]]:
            return Report.failing("validate_vertical_transformation", {"reason": "naturality", "arrow": D.E0.arrows[f]})
    for m in range(D.E1.n_objects):
        c = a1[m]
        if E1.src(c) != F.F1.obj(m) or E1.tgt(c) != G.F1.obj(m):
            return Report.failing("validate_vertical_transformation",
                                  {"reason": "typing", "proarrow": D.E1.objects[m]})
        if C.src.arr(c) != a0[D.src.obj(m)] or C.tgt.arr(c) != a0[D.tgt.obj(m)]:
            return Report.failing("validate_vertical_transformation",
                                  {"reason": "boundary", "proarrow": D.E1.objects[m]})
    for theta in range(D.E1.n_arrows):
        if T1[a1[D.E1.tgt(theta)], F.F1.arr(theta)] != T1[G.F1.arr(theta), a1[D.E1.src(theta)]]:
            return Report.failing("validate_vertical_transformation",
                                  {"reason": "naturality", "cell": D.E1.arrows[theta]})
    for x in range(D.E0.n_objects):
        if T1[G.iota[x], C.unit_arr(a0[x])] != T1[a1[D.unit_obj(x)], F.iota[x]]:
            return Report.failing("validate_vertical_transformation", {"reason": "unit", "object": D.E0.objects[x]})
    for m, n in D.composable_pairs():
        if T1[G.phi[(m, n)], C.tensor_arr(a1[m], a1[n])] != T1[a1[D.tensor_obj(m, n)], F.phi[(m, n)]]:
            return Report.failing("validate_vertical_transformation",
                                  {"reason": "tensor", "pair": [D.E1.objects[m], D.E1.objects[n]]})
    return Report.passing("validate_vertical_transformation",
                          stats={"objects": D.E0.n_objects, "proarrows": D.E1.n_objects})


# builders ----------------------------------------------------------------------

def vertically_trivial(C: FinCategory) -> PseudoDoubleCategory:
    """Only identity proarrows: E1 = E0 = C"""
    one = Functor.identity(C)
    return make_double_category(C, C, one, one, one, lambda m, n: m, lambda a, b: a,
                                name=f"V({C.name})" if C.name else "V")


def terminal_double() -> PseudoDoubleCategory:
    D = vertically_trivial(terminal_category())
    D.name = "1"
    return D


def walking_proarrow() -> PseudoDoubleCategory:
    """Objects 1, 2, one proarrow p: 1 -|-> 2 and no non-identity arrows or cells"""
    E0 = FinCategory.from_ids([1, 2], ["1_1", "1_2"], [0, 1], [0, 1], [0, 1], lambda g, f: g, name="{1,2}")
    E1 = FinCategory.from_ids(["y1", "y2", "p"], ["1_y1", "1_y2", "1_p"], [0, 1, 2], [0, 1, 2], [0, 1, 2],
                              lambda g, f: g, name="proarrows")
    src = Functor(E1, E0, [0, 1, 0], [0, 1, 0], name="src")
    tgt = Functor(E1, E0, [0, 1, 1], [0, 1, 1], name="tgt")
    unit = Functor(E0, E1, [0, 1], [0, 1], name="y")
    table = {(0, 0): 0, (1, 1): 1, (0, 2): 2, (2, 1): 2}
    return make_double_category(E0, E1, src, tgt, unit, lambda m, n: table[(m, n)], lambda a, b: table[(a, b)],
                                name="1-|->2")


def quintet(K: Fin2Category) -> PseudoDoubleCategory:
    """Proarrows are arrows of K; a cell m => n with legs f, g is a 2-cell g m => n f"""
    C = K.underlying
    T = C.table
    cells: List[Tuple[int, int, int, int, int]] = []
    for m in range(C.n_arrows):
        for n in range(C.n_arrows):
            for f in C.hom(C.src(m), C.src(n)):
                for g in C.hom(C.tgt(m), C.tgt(n)):
                    for alpha in K.cells_between(int(T[g, m]), int(T[n, f])):
                        cells.append((m, n, f, g, alpha))
    index = {cell: k for k, cell in enumerate(cells)}
    labels = [(C.arrows[m], C.arrows[n], C.arrows[f], C.arrows[g], K.cells[a]) for m, n, f, g, a in cells]

    def compose(k2: int, k1: int) -> int:
        m, _, f, g, alpha = cells[k1]
        _, p, f2, g2, alpha2 = cells[k2]
        beta = K.vcompose(whisker_right(K, alpha2, f), whisker_left(K, g2, alpha))
        return index[(m, p, int(T[f2, f]), int(T[g2, g]), beta)]

    ident = [index[(m, m, C.identity(C.src(m)), C.identity(C.tgt(m)), K.id2(m))] for m in range(C.n_arrows)]
    E1 = FinCategory.from_ids(list(C.arrows), labels, [c[0] for c in cells], [c[1] for c in cells], ident,
                              compose, name=f"Q({K.name})")
    src = Functor(E1, C, [C.src(m) for m in range(C.n_arrows)], [c[2] for c in cells], name="src")
    tgt = Functor(E1, C, [C.tgt(m) for m in range(C.n_arrows)], [c[3] for c in cells], name="tgt")
    unit = Functor(C, E1, [C.identity(x) for x in range(C.n_objects)],
                   [index[(C.identity(C.src(f)), C.identity(C.tgt(f)), f, f, K.id2(f))] for f in range(C.n_arrows)],
                   name="y")

    def tensor_arr(k: int, k2: int) -> int:
        m, n, f, g, alpha = cells[k]
        m2, n2, _, h, alpha2 = cells[k2]
        beta = K.vcompose(whisker_left(K, n2, alpha), whisker_right(K, alpha2, m))
        return index[(int(T[m2, m]), int(T[n2, n]), f, h, beta)]

    return make_double_category(C, E1, src, tgt, unit, lambda m, n: int(T[n, m]), tensor_arr,
                                name=f"Q({K.name})")


def quintet_functor(P: TwoFunctor, dom: PseudoDoubleCategory, cod: PseudoDoubleCategory) -> DoubleFunctor:
    """Q(P), a strict double functor acting on labels"""
    K, L = P.dom, P.cod
    C = K.underlying

    def arrow_label(a: Label) -> Label:
        return L.underlying.arrows[P.functor.arr(C.arrow_index(a))]

    def cell_label(label: Tuple) -> Tuple:
        m, n, f, g, alpha = label
        return (arrow_label(m), arrow_label(n), arrow_label(f), arrow_label(g),
                L.cells[P.cell(K.cell_index(alpha))])

    F1 = Functor.by_labels(dom.E1, cod.E1, arrow_label, cell_label, name=f"Q({P.name})")
    return DoubleFunctor(dom, cod, P.functor, F1, name=f"Q({P.name})")


def vertical_2cat(D: PseudoDoubleCategory,
                  cell_label: Optional[Callable[[Label], Label]] = None) -> Fin2Category:
    """Arrows of E0 with horizontally globular cells: theta is the 2-cell tgt(theta) => src(theta)"""
    E0, E1 = D.E0, D.E1
    units = {D.unit_obj(x) for x in range(E0.n_objects)}
    globular = [c for c in range(E1.n_arrows) if E1.src(c) in units and E1.tgt(c) in units]
    index = {c: k for k, c in enumerate(globular)}
    label = cell_label or (lambda x: x)

    def vcompose(b: int, a: int) -> int:
        return index[D.tensor_arr(globular[b], globular[a])]

    def hcompose(b: int, a: int) -> int:
        return index[E1.compose(globular[b], globular[a])]

    return Fin2Category.from_ids(
        E0, [label(E1.arrows[c]) for c in globular],
        [D.tgt.arr(c) for c in globular], [D.src.arr(c) for c in globular],
        [index[D.unit_arr(f)] for f in range(E0.n_arrows)], vcompose, hcompose,
        name=f"V({D.name})")


def vertical_2functor(P: DoubleFunctor, dom: Optional[Fin2Category] = None,
                      cod: Optional[Fin2Category] = None) -> TwoFunctor:
    """V(P) between vertical 2-categories; needs a unitary functor"""
    if not P.is_unitary():
        raise FlavorError("vertical 2-functor needs identity unit comparisons")
    dom = dom or vertical_2cat(P.dom)
    cod = cod or vertical_2cat(P.cod)
    return TwoFunctor.by_labels(
        dom, cod,
        lambda x: P.cod.E0.objects[P.F0.obj(P.dom.E0.object_index(x))],
        lambda f: P.cod.E0.arrows[P.F0.arr(P.dom.E0.arrow_index(f))],
        lambda c: P.cod.E1.arrows[P.F1.arr(P.dom.E1.arrow_index(c))],
        name=f"V({P.name})")


def horizontal_hom(D: PseudoDoubleCategory, a: int, b: int) -> Tuple[FinCategory, Functor]:
    """Proarrows a -|-> b and the cells between them with identity vertical legs"""
    E0, E1 = D.E0, D.E1
    objects = [m for m in range(E1.n_objects) if D.src.obj(m) == a and D.tgt.obj(m) == b]
    keep = set(objects)
    arrows = [c for c in range(E1.n_arrows) if E1.src(c) in keep and E1.tgt(c) in keep
              and D.src.arr(c) == E0.identity(a) and D.tgt.arr(c) == E0.identity(b)]
    return subcategory(E1, objects, arrows, name=f"H({E0.objects[a]},{E0.objects[b]})")


def sub_double_category(D: PseudoDoubleCategory, objects0: Iterable[int], arrows0: Iterable[int],
                        objects1: Iterable[int], arrows1: Iterable[int], name: str = "") -> PseudoDoubleCategory:
    """Restriction to ids closed under every operation"""
    E0, _ = subcategory(D.E0, objects0, arrows0, name=f"{name}0")
    E1, _ = subcategory(D.E1, objects1, arrows1, name=f"{name}1")
    src = D.src.restrict(E1, E0, name="src")
    tgt = D.tgt.restrict(E1, E0, name="tgt")
    unit = D.unit.restrict(E0, E1, name="y")

    def tensor_obj(m: int, n: int) -> int:
        return E1.object_index(D.E1.objects[D.tensor_obj(D.E1.object_index(E1.objects[m]),
                                                         D.E1.object_index(E1.objects[n]))])

    def tensor_arr(a: int, b: int) -> int:
        return E1.arrow_index(D.E1.arrows[D.tensor_arr(D.E1.arrow_index(E1.arrows[a]),
                                                       D.E1.arrow_index(E1.arrows[b]))])

    def associator(m: int, n: int, p: int) -> int:
        full = [D.E1.object_index(E1.objects[x]) for x in (m, n, p)]
        return E1.arrow_index(D.E1.arrows[D.associator(*full)])

    return make_double_category(E0, E1, src, tgt, unit, tensor_obj, tensor_arr, associator, name=name)


class ArrowDouble(NamedTuple):
    """D^2 with its arrow categories at both levels"""
    double: PseudoDoubleCategory
    level0: ArrowCategory
    level1: ArrowCategory


def arrow_double(D: PseudoDoubleCategory) -> Tuple[ArrowDouble, DoubleFunctor]:
    """D^2 and the strict domain projection dom: D^2 -> D"""
    A0, A1 = arrow_category(D.E0), arrow_category(D.E1)
    E1 = D.E1
    src = arrow_functor(D.src, A1, A0)
    tgt = arrow_functor(D.tgt, A1, A0)
    unit = arrow_functor(D.unit, A0, A1)
    S1 = A1.category

    def tensor_arr(s1: int, s2: int) -> int:
        first = [E1.arrow_index(part) for part in S1.arrows[s1]]
        second = [E1.arrow_index(part) for part in S1.arrows[s2]]
        return S1.arrow_index(tuple(E1.arrows[D.tensor_arr(a, b)] for a, b in zip(first, second)))

    def associator(x: int, y: int, z: int) -> int:
        top = D.associator(E1.src(x), E1.src(y), E1.src(z))
        bottom = D.associator(E1.tgt(x), E1.tgt(y), E1.tgt(z))
        source = D.tensor_arr(D.tensor_arr(x, y), z)
        target = D.tensor_arr(x, D.tensor_arr(y, z))
        return S1.arrow_index((E1.arrows[source], E1.arrows[target], E1.arrows[top], E1.arrows[bottom]))

    D2 = make_double_category(A0.category, S1, src, tgt, unit, D.tensor_arr, tensor_arr,
                              None if D.is_strict() else associator, name=f"{D.name}^2")
    dom = DoubleFunctor(D2, D, A0.dom, A1.dom, name="dom")
    return ArrowDouble(D2, A0, A1), dom


def comma_double(D: PseudoDoubleCategory, c: int) -> Tuple[PseudoDoubleCategory, DoubleFunctor]:
    """D/C: the part of D^2 whose codomain components are id_C and id_yC"""
    arrows, _ = arrow_double(D)
    A0, A1 = arrows.level0, arrows.level1
    D2 = arrows.double
    yc = D.unit_obj(c)
    idc, idyc = D.E0.identity(c), D.E1.identity(yc)
    objects0 = [f for f in range(D.E0.n_arrows) if D.E0.tgt(f) == c]
    arrows0 = [s for s in range(A0.category.n_arrows) if A0.cod.arr(s) == idc]
    objects1 = [t for t in range(D.E1.n_arrows) if D.E1.tgt(t) == yc]
    arrows1 = [s for s in range(A1.category.n_arrows) if A1.cod.arr(s) == idyc]
    comma = sub_double_category(D2, objects0, arrows0, objects1, arrows1, name=f"{D.name}/{D.E0.objects[c]}")
    F0 = A0.dom.restrict(comma.E0, D.E0, name="dom")
    F1 = A1.dom.restrict(comma.E1, D.E1, name="dom")
    return comma, DoubleFunctor(comma, D, F0, F1, name="dom")


class CodomainDouble(NamedTuple):
    """D^2 with cod: D^2 -> D and the cleavages supplied by chosen pullbacks"""
    arrows: ArrowDouble
    cod: DoubleFunctor
    cleavage0: ClovenFibration
    cleavage1: ClovenFibration


def _chosen_pullback_cleavage(A: ArrowCategory) -> ClovenFibration:
    C = A.cod.cod
    cleavage = {}
    for f in range(C.n_arrows):
        for u in C.arrows_into(C.tgt(f)):
            cone = chosen_pullback(C, u, f)
            cleavage[(u, f)] = A.category.arrow_index(
                (C.arrows[cone.left], C.arrows[f], C.arrows[cone.right], C.arrows[u]))
    return ClovenFibration(A.cod, cleavage, name="cod")


def require_pullbacks(D: PseudoDoubleCategory) -> None:
    """Pullbacks at both levels, preserved on the nose by src and tgt"""
    for level, C in (("objects", D.E0), ("proarrows", D.E1)):
        report = has_pullbacks(C)
        if not report.passed:
            raise PreconditionError(f"category of {level} lacks a pullback for {report.counterexample}")
    E0, E1 = D.E0, D.E1
    for u in range(E1.n_arrows):
        for f in E1.arrows_into(E1.tgt(u)):
            cone = chosen_pullback(E1, u, f)
            for leg in (D.src, D.tgt):
                image = chosen_pullback(E0, leg.arr(u), leg.arr(f))
                if (leg.obj(cone.apex), leg.arr(cone.left), leg.arr(cone.right)) != tuple(image):
                    raise PreconditionError(f"{leg.name} does not preserve the chosen pullback of "
                                            f"{E1.arrows[u]!r} and {E1.arrows[f]!r}")


def cod_double(D: PseudoDoubleCategory) -> CodomainDouble:
    """Codomain double functor with its cleavage from the chosen pullbacks"""
    require_pullbacks(D)
    arrows, _ = arrow_double(D)
    cod = DoubleFunctor(arrows.double, D, arrows.level0.cod, arrows.level1.cod, name="cod")
    return CodomainDouble(arrows, cod, _chosen_pullback_cleavage(arrows.level0),
                          _chosen_pullback_cleavage(arrows.level1))


def monoidal_as_double(M: FinCategory, tensor_obj: Callable[[int, int], int],
                       tensor_arr: Callable[[int, int], int], unit: int,
                       associator: Optional[Callable[[int, int, int], int]] = None,
                       name: str = "") -> PseudoDoubleCategory:
    """One object, proarrows = objects of M, cells = arrows of M"""
    one = terminal_category()
    to_one = Functor.to_terminal(M, one)
    y = Functor(one, M, [unit], [M.identity(unit)], name="y")
    return make_double_category(one, M, to_one, to_one, y, tensor_obj, tensor_arr, associator,
                                name=name or f"B({M.name})")


def opposite_double(D: PseudoDoubleCategory) -> PseudoDoubleCategory:
    """Levelwise opposite (vertical arrows and cells reversed, proarrows kept)"""
    if "op" not in D._cache:
        associator = None
        if D._associator is not None:
            def associator(m: int, n: int, p: int) -> Optional[int]:
                return D.E1.inverse(D.associator(m, n, p))
        op = PseudoDoubleCategory(D.E0.op(), D.E1.op(), D.src.op(), D.tgt.op(), D.unit.op(),
                                  D.tensor_obj, D.tensor_arr, associator, name=f"{D.name}^op")
        op.window = D.window
        D._cache["op"] = op
    return D._cache["op"]
