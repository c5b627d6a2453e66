"""
Finite 2-Categories - 2-Cartesian Arrows and 2-Fibrations
=========================================================
Strict finite 2-categories stored as an underlying category plus 2-cells
with vertical and horizontal composition tables.

Features:
- Vertical and horizontal categories of 2-cells (validated as categories)
- Interchange law checked exhaustively
- 2-functors, hom categories, hom functors, whiskering
- Builders: locally discrete, locally posetal, monotone maps between
  small chains, products with projections
- 2-Cartesian arrows and the three conditions of a 2-fibration
"""

import logging
from collections import Counter
from itertools import product
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from api.models.report_models import Report, Status, combine
from core.errors import PreconditionError, SchemaError
from core.fib import build_cleavage, cartesian, is_fibration
from core.fincat import (FinCategory, Functor, full_subcategory, product_category,
                         validate_category, validate_functor)

logger = logging.getLogger(__name__)

Label = Hashable


class Fin2Category:
    """Strict 2-category: underlying category, 2-cells, vertical and horizontal tables"""

    __slots__ = ("underlying", "cells", "_csrc", "_ctgt", "_id2", "_vtable", "_htable",
                 "name", "_cell_index", "_cache")

    def __init__(self, underlying: FinCategory, cells: Sequence[Label],
                 cell_src: Sequence[int], cell_tgt: Sequence[int], id2: Sequence[int],
                 vtable: np.ndarray, htable: np.ndarray, name: str = ""):
        self.underlying = underlying
        self.cells: Tuple[Label, ...] = tuple(cells)
        self._csrc = np.asarray(cell_src, dtype=np.int32)
        self._ctgt = np.asarray(cell_tgt, dtype=np.int32)
        self._id2 = np.asarray(id2, dtype=np.int32)
        self._vtable = np.asarray(vtable, dtype=np.int32)
        self._htable = np.asarray(htable, dtype=np.int32)
        self.name = name or underlying.name
        self._cell_index = {label: c for c, label in enumerate(self.cells)}
        if len(self._cell_index) != len(self.cells):
            raise SchemaError("duplicate 2-cell id", "twocells")
        self._cache: Dict = {}

    @classmethod
    def from_ids(cls, underlying: FinCategory, cells: Sequence[Label],
                 cell_src: Sequence[int], cell_tgt: Sequence[int], id2: Sequence[int],
                 vcompose: Callable[[int, int], int], hcompose: Callable[[int, int], int],
                 name: str = "") -> "Fin2Category":
        K = underlying
        c = len(cells)
        vtable = np.full((c, c), -1, dtype=np.int32)
        htable = np.full((c, c), -1, dtype=np.int32)
        for b in range(c):
            for a in range(c):
                if cell_tgt[a] == cell_src[b]:
                    vtable[b, a] = vcompose(b, a)
                if K.src(cell_src[b]) == K.tgt(cell_src[a]):
                    htable[b, a] = hcompose(b, a)
        return cls(underlying, cells, cell_src, cell_tgt, id2, vtable, htable, name=name)

    @classmethod
    def build(cls, underlying: FinCategory, cells: Sequence[Tuple[Label, Label, Label]],
              id2: Mapping[Label, Label],
              vcompose: Callable[[Label, Label], Optional[Label]],
              hcompose: Callable[[Label, Label], Optional[Label]],
              name: str = "") -> "Fin2Category":
        """Build from labels; vcompose(b, a) is b after a, hcompose(b, a) is b * a"""
        K = underlying
        labels = [cell[0] for cell in cells]
        index = {label: i for i, label in enumerate(labels)}
        if len(index) != len(labels):
            raise SchemaError("duplicate 2-cell id", "twocells")

        def lookup(result: Optional[Label], where: str) -> int:
            if result is None:
                return -1
            if result not in index:
                raise SchemaError(f"composite {result!r} is not a 2-cell", where)
            return index[result]

        try:
            ids = [index[id2[a]] for a in K.arrows]
        except KeyError as e:
            raise SchemaError(f"missing identity 2-cell for {e.args[0]!r}", "id2") from None
        return cls.from_ids(
            K, labels, [K.arrow_index(cell[1]) for cell in cells], [K.arrow_index(cell[2]) for cell in cells], ids,
            lambda b, a: lookup(vcompose(labels[b], labels[a]), "vcompose"),
            lambda b, a: lookup(hcompose(labels[b], labels[a]), "hcompose"),
            name=name)

    # structure --------------------------------------------------------------

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def cell_sources(self) -> np.ndarray:
        return self._csrc

    @property
    def cell_targets(self) -> np.ndarray:
        return self._ctgt

    @property
    def vtable(self) -> np.ndarray:
        return self._vtable

    @property
    def htable(self) -> np.ndarray:
        return self._htable

    def cell_src(self, c: int) -> int:
        return int(self._csrc[c])

    def cell_tgt(self, c: int) -> int:
        return int(self._ctgt[c])

    def id2(self, a: int) -> int:
        return int(self._id2[a])

    def cell_index(self, label: Label) -> int:
        try:
            return self._cell_index[label]
        except KeyError:
            raise SchemaError(f"unknown 2-cell {label!r}") from None

    def vcompose(self, b: int, a: int) -> int:
        result = int(self._vtable[b, a])
        if result < 0:
            raise PreconditionError(f"2-cells {self.cells[b]!r} and {self.cells[a]!r} are not vertically composable")
        return result

    def hcompose(self, b: int, a: int) -> int:
        result = int(self._htable[b, a])
        if result < 0:
            raise PreconditionError(f"2-cells {self.cells[b]!r} and {self.cells[a]!r} are not horizontally composable")
        return result

    def cells_between(self, f: int, g: int) -> Tuple[int, ...]:
        return self.vertical.hom(f, g)

    @property
    def vertical(self) -> FinCategory:
        """Objects are arrows, arrows are 2-cells under vertical composition"""
        if "vertical" not in self._cache:
            self._cache["vertical"] = FinCategory(self.underlying.arrows, self.cells, self._csrc, self._ctgt,
                                                  self._id2, self._vtable, name=f"{self.name}:v")
        return self._cache["vertical"]

    @property
    def horizontal(self) -> FinCategory:
        """Objects are objects, arrows are 2-cells under horizontal composition"""
        if "horizontal" not in self._cache:
            K = self.underlying
            self._cache["horizontal"] = FinCategory(
                K.objects, self.cells, K.sources[self._csrc], K.targets[self._csrc],
                self._id2[K.identities], self._htable, name=f"{self.name}:h")
        return self._cache["horizontal"]

    def is_locally_discrete(self) -> bool:
        return self.n_cells == self.underlying.n_arrows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fin2Category):
            return NotImplemented
        return (self.underlying == other.underlying and self.cells == other.cells
                and self.vertical == other.vertical and np.array_equal(self._htable, other._htable))

    def __hash__(self) -> int:
        return hash((hash(self.underlying), self.cells))

    def __repr__(self) -> str:
        return f"Fin2Category({self.name or '?'}: {self.underlying.n_objects} objects, " \
               f"{self.underlying.n_arrows} arrows, {self.n_cells} 2-cells)"


def structurally_equal(K: Fin2Category, L: Fin2Category) -> bool:
    """Same underlying category and the same 2-cells up to reordering, compared by label"""
    if K.underlying != L.underlying or set(K.cells) != set(L.cells):
        return False
    to_l = np.array([L.cell_index(label) for label in K.cells], dtype=np.int64)
    if not (np.array_equal(K.cell_sources, L.cell_sources[to_l])
            and np.array_equal(K.cell_targets, L.cell_targets[to_l])):
        return False
    if not np.array_equal(to_l[K._id2], L._id2):
        return False
    for table_k, table_l in ((K.vtable, L.vtable), (K.htable, L.htable)):
        image = np.where(table_k >= 0, to_l[np.maximum(table_k, 0)], -1)
        if not np.array_equal(image, table_l[np.ix_(to_l, to_l)]):
            return False
    return True


def whisker_left(K: Fin2Category, h: int, alpha: int) -> int:
    """h * alpha"""
    return K.hcompose(K.id2(h), alpha)


def whisker_right(K: Fin2Category, beta: int, f: int) -> int:
    """beta * f"""
    return K.hcompose(beta, K.id2(f))


def validate_2category(K: Fin2Category) -> Report:
    """Underlying, vertical and horizontal categories, endpoints and interchange"""
    C = K.underlying
    checks = [validate_category(C)]
    csrc, ctgt = K.cell_sources, K.cell_targets
    parallel = (C.sources[csrc] == C.sources[ctgt]) & (C.targets[csrc] == C.targets[ctgt])
    if not parallel.all():
        c = int(np.flatnonzero(~parallel)[0])
        checks.append(Report.failing("cell_endpoints", {"cell": K.cells[c]}))
        return combine("validate_2category", checks)
    checks.append(validate_category(K.vertical).model_copy(update={"check": "vertical_composition"}))
    checks.append(validate_category(K.horizontal).model_copy(update={"check": "horizontal_composition"}))
    if any(r.failed for r in checks):
        return combine("validate_2category", checks)
    H = K.htable
    bs, as_ = np.nonzero(H >= 0)
    results = H[bs, as_]
    typed = ((csrc[results] == C.table[csrc[bs], csrc[as_]])
             & (ctgt[results] == C.table[ctgt[bs], ctgt[as_]]))
    if not typed.all():
        k = int(np.flatnonzero(~typed)[0])
        checks.append(Report.failing("horizontal_endpoints", {"pair": [K.cells[bs[k]], K.cells[as_[k]]]}))
        return combine("validate_2category", checks)
    gs, fs = np.nonzero(C.table >= 0)
    ids = K._id2
    bad = np.flatnonzero(H[ids[gs], ids[fs]] != ids[C.table[gs, fs]])
    if bad.size:
        k = int(bad[0])
        checks.append(Report.failing("identity_cells", {"pair": [C.arrows[gs[k]], C.arrows[fs[k]]]}))
        return combine("validate_2category", checks)
    checks.append(_interchange(K))
    return combine("validate_2category", checks)


def _interchange(K: Fin2Category) -> Report:
    """(b2 . b1) * (a2 . a1) = (b2 * a2) . (b1 * a1)"""
    V, H = K.vtable, K.htable
    count = 0
    for b1, a1 in zip(*np.nonzero(H >= 0)):
        after_a = np.flatnonzero(V[:, a1] >= 0)
        after_b = np.flatnonzero(V[:, b1] >= 0)
        for a2 in after_a:
            for b2 in after_b:
                count += 1
                lhs = H[V[b2, b1], V[a2, a1]]
                rhs = V[H[b2, a2], H[b1, a1]]
                if lhs != rhs:
                    return Report.failing("interchange",
                                          {"cells": [K.cells[int(x)] for x in (b2, b1, a2, a1)]},
                                          stats={"interchange": count})
    return Report.passing("interchange", stats={"interchange": count})


class TwoFunctor:
    """Strict 2-functor: an underlying functor plus an image per 2-cell"""

    __slots__ = ("dom", "cod", "functor", "_cells", "name", "_cache")

    def __init__(self, dom: Fin2Category, cod: Fin2Category, functor: Functor,
                 on_cells: Sequence[int], name: str = ""):
        if len(on_cells) != dom.n_cells:
            raise SchemaError("2-functor must map every 2-cell")
        self.dom = dom
        self.cod = cod
        self.functor = functor
        self._cells = np.asarray(on_cells, dtype=np.int32)
        self.name = name or functor.name
        self._cache: Dict = {}

    @classmethod
    def by_labels(cls, dom: Fin2Category, cod: Fin2Category,
                  object_label: Callable[[Label], Label], arrow_label: Callable[[Label], Label],
                  cell_label: Callable[[Label], Label], name: str = "") -> "TwoFunctor":
        F = Functor.by_labels(dom.underlying, cod.underlying, object_label, arrow_label, name=name)
        return cls(dom, cod, F, [cod.cell_index(cell_label(c)) for c in dom.cells], name=name)

    @classmethod
    def identity(cls, K: Fin2Category) -> "TwoFunctor":
        return cls(K, K, Functor.identity(K.underlying), range(K.n_cells), name="1")

    def cell(self, c: int) -> int:
        return int(self._cells[c])

    @property
    def cell_map(self) -> np.ndarray:
        return self._cells

    @property
    def vertical_functor(self) -> Functor:
        if "vertical" not in self._cache:
            self._cache["vertical"] = Functor(self.dom.vertical, self.cod.vertical,
                                              self.functor.arrow_map, self._cells, name=f"{self.name}:v")
        return self._cache["vertical"]

    @property
    def horizontal_functor(self) -> Functor:
        if "horizontal" not in self._cache:
            self._cache["horizontal"] = Functor(self.dom.horizontal, self.cod.horizontal,
                                                self.functor.object_map, self._cells, name=f"{self.name}:h")
        return self._cache["horizontal"]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoFunctor):
            return NotImplemented
        return self.functor == other.functor and np.array_equal(self._cells, other._cells)

    def __hash__(self) -> int:
        return hash((hash(self.functor), self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"TwoFunctor({self.name or '?'}: {self.dom!r} -> {self.cod!r})"


def validate_2functor(P: TwoFunctor) -> Report:
    checks = [validate_functor(P.functor)]
    if checks[0].passed:
        checks.append(validate_functor(P.vertical_functor).model_copy(update={"check": "vertical_preservation"}))
        checks.append(validate_functor(P.horizontal_functor).model_copy(update={"check": "horizontal_preservation"}))
    return combine("validate_2functor", checks)


def hom_category(K: Fin2Category, x: int, y: int) -> FinCategory:
    """K(x, y): arrows x -> y and the 2-cells between them"""
    key = ("hom", x, y)
    if key not in K._cache:
        C = K.underlying
        sub, _ = full_subcategory(K.vertical, C.hom(x, y), name=f"{K.name}({C.objects[x]},{C.objects[y]})")
        K._cache[key] = sub
    return K._cache[key]


def hom_functor(P: TwoFunctor, x: int, y: int) -> Functor:
    """P restricted to K(x, y) -> L(Px, Py)"""
    key = ("hom", x, y)
    if key not in P._cache:
        dom = hom_category(P.dom, x, y)
        cod = hom_category(P.cod, P.functor.obj(x), P.functor.obj(y))
        P._cache[key] = P.vertical_functor.restrict(dom, cod, name=f"{P.name}({x},{y})")
    return P._cache[key]


# builders -----------------------------------------------------------------

def locally_posetal(C: FinCategory, leq: Callable[[int, int], bool], name: str = "") -> Fin2Category:
    """One 2-cell f => g exactly when leq(f, g); composition must be monotone"""
    cells = [(f, g) for f in range(C.n_arrows) for g in C.hom(C.src(f), C.tgt(f)) if leq(f, g)]
    index = {cell: k for k, cell in enumerate(cells)}
    try:
        id2 = [index[(a, a)] for a in range(C.n_arrows)]
    except KeyError:
        raise SchemaError("order on arrows is not reflexive") from None

    def cell(key: Tuple[int, int]) -> int:
        if key not in index:
            raise SchemaError("order on arrows is not transitive or not preserved by composition")
        return index[key]

    return Fin2Category.from_ids(
        C, [(C.arrows[f], C.arrows[g]) for f, g in cells], [f for f, _ in cells], [g for _, g in cells], id2,
        lambda b, a: cell((cells[a][0], cells[b][1])),
        lambda b, a: cell((int(C.table[cells[b][0], cells[a][0]]), int(C.table[cells[b][1], cells[a][1]]))),
        name=name or C.name)


def locally_discrete(C: FinCategory) -> Fin2Category:
    return locally_posetal(C, lambda f, g: f == g, name=C.name)


def monotone_maps(sizes: Sequence[int]) -> FinCategory:
    """Chains [0..n-1] for n in sizes and all monotone maps between them"""
    chains = list(sizes)
    arrows: List[Tuple[Label, Label, Label]] = []
    for i, n in enumerate(chains):
        for j, k in enumerate(chains):
            for values in product(range(k), repeat=n):
                if all(values[t] <= values[t + 1] for t in range(n - 1)):
                    arrows.append(((i, j, values), i, j))
    identities = {i: (i, i, tuple(range(n))) for i, n in enumerate(chains)}

    def compose(g: Tuple, f: Tuple) -> Tuple:
        return (f[0], g[1], tuple(g[2][v] for v in f[2]))

    return FinCategory.build(list(range(len(chains))), arrows, identities, compose, name="Mono")


def chains_2category(sizes: Sequence[int]) -> Fin2Category:
    """Monotone maps ordered pointwise"""
    C = monotone_maps(sizes)
    return locally_posetal(C, lambda f, g: all(a <= b for a, b in zip(C.arrows[f][2], C.arrows[g][2])),
                           name="Chains")


def walking_2cell() -> Fin2Category:
    """Two parallel arrows f, g: 0 -> 1 and one 2-cell f => g"""
    arrows = [("1_0", 0, 0), ("1_1", 1, 1), ("f", 0, 1), ("g", 0, 1)]

    def compose(g: str, f: str) -> str:
        return f if g.startswith("1_") else g

    C = FinCategory.build([0, 1], arrows, {0: "1_0", 1: "1_1"}, compose, name="2cell")
    return locally_posetal(C, lambda f, g: f == g or (C.arrows[f], C.arrows[g]) == ("f", "g"), name="2cell")


def product_2category(K: Fin2Category, L: Fin2Category) -> Tuple[Fin2Category, TwoFunctor, TwoFunctor]:
    """K x L with both projection 2-functors"""
    base = product_category(K.underlying, L.underlying)
    P = base.category
    cells = [(a, b) for a in range(K.n_cells) for b in range(L.n_cells)]
    index = {cell: k for k, cell in enumerate(cells)}

    def arrow_pair(f: int, g: int) -> int:
        return base.pair_arrow(f, g)

    M = Fin2Category.from_ids(
        P, [(K.cells[a], L.cells[b]) for a, b in cells],
        [arrow_pair(K.cell_src(a), L.cell_src(b)) for a, b in cells],
        [arrow_pair(K.cell_tgt(a), L.cell_tgt(b)) for a, b in cells],
        [index[(K.id2(base.left.arr(x)), L.id2(base.right.arr(x)))] for x in range(P.n_arrows)],
        lambda q, p: index[(int(K.vtable[cells[q][0], cells[p][0]]), int(L.vtable[cells[q][1], cells[p][1]]))],
        lambda q, p: index[(int(K.htable[cells[q][0], cells[p][0]]), int(L.htable[cells[q][1], cells[p][1]]))],
        name=f"{K.name}x{L.name}")
    left = TwoFunctor(M, K, base.left, [a for a, _ in cells], name="pi1")
    right = TwoFunctor(M, L, base.right, [b for _, b in cells], name="pi2")
    return M, left, right


# 2-fibrations ---------------------------------------------------------------

def _two_dim_obstruction(P: TwoFunctor, f: int) -> Optional[Dict]:
    key = ("2cart", f)
    if key in P._cache:
        return P._cache[key]
    E, B = P.dom, P.cod
    C = E.underlying
    EH, BH = E.htable, B.htable
    X, Y = C.src(f), C.tgt(f)
    wf = E.id2(f)
    wpf = B.id2(P.functor.arr(f))
    into_x = [c for c in range(E.n_cells) if C.tgt(E.cell_src(c)) == X]
    counts = Counter((int(EH[wf, c]), P.cell(c)) for c in into_x)
    obstruction = None
    whiskered = BH[wpf, :]
    for theta in range(E.n_cells):
        if C.tgt(E.cell_src(theta)) != Y:
            continue
        p_theta = P.cell(theta)
        for gamma in np.flatnonzero(whiskered == p_theta):
            n = counts.get((theta, int(gamma)), 0)
            if n != 1:
                obstruction = {"arrow": C.arrows[f], "theta": E.cells[theta], "gamma": B.cells[int(gamma)],
                               "lifts": n}
                break
        if obstruction:
            break
    P._cache[key] = obstruction
    return obstruction


def is_2cartesian(P: TwoFunctor, f: int) -> Report:
    """Cartesian on underlying categories and unique lifting of 2-cells through f"""
    C = P.dom.underlying
    if not 0 <= f < C.n_arrows:
        raise SchemaError(f"arrow id {f} is not in {C.name or 'the domain'}")
    if not cartesian(P.functor, f):
        return Report.failing("is_2cartesian", {"arrow": C.arrows[f], "reason": "not cartesian"},
                              conditions={"1": Status.FAIL})
    obstruction = _two_dim_obstruction(P, f)
    if obstruction is not None:
        return Report.failing("is_2cartesian", obstruction, conditions={"1": Status.PASS, "2": Status.FAIL})
    return Report.passing("is_2cartesian", witness={"arrow": C.arrows[f]},
                          conditions={"1": Status.PASS, "2": Status.PASS})


def two_cartesian(P: TwoFunctor, f: int) -> bool:
    return cartesian(P.functor, f) and _two_dim_obstruction(P, f) is None


def _locally_cartesian(P: TwoFunctor, c: int) -> bool:
    E = P.dom
    C = E.underlying
    f = E.cell_src(c)
    x, y = C.src(f), C.tgt(f)
    local = hom_functor(P, x, y)
    return cartesian(local, local.dom.arrow_index(E.cells[c]))


def is_2fibration(P: TwoFunctor) -> Report:
    """2-Cartesian lifts, local fibrations, and Cartesian 2-cells closed under horizontal composition"""
    E, B = P.dom, P.cod
    C = E.underlying
    F = P.functor
    conditions: Dict[str, Status] = {}
    subreports: List[Report] = []

    lifts = []
    missing = None
    for e in range(C.n_objects):
        for u in B.underlying.arrows_into(F.obj(e)):
            lift = next((a for a in C.arrows_into(e) if F.arr(a) == u and two_cartesian(P, a)), None)
            if lift is None:
                missing = (u, e)
                break
            lifts.append([B.underlying.arrows[u], C.objects[e], C.arrows[lift]])
        if missing:
            break
    if missing:
        u, e = missing
        subreports.append(Report.failing("two_cartesian_lifts",
                                         {"base_arrow": B.underlying.arrows[u], "object": C.objects[e]}))
    else:
        subreports.append(Report.passing("two_cartesian_lifts", witness=lifts, stats={"pairs": len(lifts)}))
    conditions["1"] = subreports[-1].status

    local_cleavages = []
    local_failure = None
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            local = hom_functor(P, x, y)
            report = is_fibration(local)
            if not report.passed:
                local_failure = {"hom": [C.objects[x], C.objects[y]], "detail": report.counterexample}
                break
            if local.dom.n_arrows:
                local_cleavages.append({"hom": [C.objects[x], C.objects[y]],
                                        "cleavage": build_cleavage(local).witness()})
        if local_failure:
            break
    if local_failure:
        subreports.append(Report.failing("local_fibrations", local_failure))
    else:
        subreports.append(Report.passing("local_fibrations", witness=local_cleavages))
    conditions["2"] = subreports[-1].status

    if local_failure:
        subreports.append(Report.inconclusive("horizontal_cartesian", notes=["local fibrations missing"]))
    else:
        local_cart = [c for c in range(E.n_cells) if _locally_cartesian(P, c)]
        H = E.htable
        bad = None
        count = 0
        for b in local_cart:
            for a in local_cart:
                composite = int(H[b, a])
                if composite < 0:
                    continue
                count += 1
                if not _locally_cartesian(P, composite):
                    bad = (b, a)
                    break
            if bad:
                break
        if bad:
            subreports.append(Report.failing("horizontal_cartesian", {"cells": [E.cells[bad[0]], E.cells[bad[1]]]},
                                             stats={"composites": count}))
        else:
            subreports.append(Report.passing("horizontal_cartesian", stats={"composites": count}))
    conditions["3"] = subreports[-1].status

    report = combine("is_2fibration", subreports, conditions=conditions)
    logger.info("2-fibration check for %s: %s", P.name or "2-functor", report.status.value)
    return report
