"""
Double Category Providers - Finite Windows into Span, Rel and Fam
=================================================================
Span, Rel and Fam are not finite. A provider enumerates the part of them
that lives inside a declared window and checks that the window is closed
under the operations it needs.

Windows:
- Named finite sets {0..n-1} and all functions between them
- Spans A <- S -> B up to isomorphism, i.e. multisets of pairs in A x B,
  with apex size bounded per endpoint pair (units are always present)
- Relations R in A x B with the same bounds (diagonals always present)
- Fam(C) as the elements of the family indexed double category
- Small monoidal categories (ordered, cyclic, an involution) as one-object
  double categories

Composite spans are canonical: the apex of m (x) n lists its pairs sorted,
ties broken by the pullback order, so unit composites are strict and the
associator is a permutation cell.
"""

import logging
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from api.models.report_models import Report
from core.errors import SchemaError, WindowClosureError
from core.fincat import FinCategory, Functor
from core.dblcat import DoubleFunctor, PseudoDoubleCategory, make_double_category, monoidal_as_double

logger = logging.getLogger(__name__)

PairList = Tuple[Tuple[int, int], ...]


class SetWindow:
    """Named finite sets and a bound on proarrow size per endpoint pair"""

    def __init__(self, sets: Mapping[str, int], bounds: Optional[Mapping[Tuple[str, str], int]] = None,
                 apex: int = 1):
        self.sets: Dict[str, int] = dict(sets)
        if bounds is None:
            bounds = {(a, b): apex for a in self.sets for b in self.sets}
        for a, b in bounds:
            if a not in self.sets or b not in self.sets:
                raise SchemaError(f"bound refers to an unknown set {(a, b)!r}", "window.bounds")
        self.bounds: Dict[Tuple[str, str], int] = dict(bounds)

    @classmethod
    def uniform(cls, sizes: Sequence[int], apex: int) -> "SetWindow":
        return cls({f"s{i}": n for i, n in enumerate(sizes)}, apex=apex)

    def describe(self) -> Dict:
        return {"sets": dict(self.sets), "bounds": {f"{a}->{b}": n for (a, b), n in sorted(self.bounds.items())}}


def functions_category(window: SetWindow) -> FinCategory:
    """The sets of the window and all functions between them"""
    names = list(window.sets)
    arrows = []
    for a in names:
        for b in names:
            for values in product(range(window.sets[b]), repeat=window.sets[a]):
                arrows.append(((a, b, values), a, b))
    identities = {a: (a, a, tuple(range(window.sets[a]))) for a in names}

    def compose(g: Tuple, f: Tuple) -> Tuple:
        return (f[0], g[1], tuple(g[2][v] for v in f[2]))

    return FinCategory.build(names, arrows, identities, compose, name="Set")


def _multisets(a: int, b: int, size: int) -> List[PairList]:
    cells = [(i, j) for i in range(a) for j in range(b)]
    out: List[PairList] = []

    def extend(prefix: List[Tuple[int, int]], start: int) -> None:
        out.append(tuple(prefix))
        if len(prefix) == size:
            return
        for k in range(start, len(cells)):
            prefix.append(cells[k])
            extend(prefix, k)
            prefix.pop()

    extend([], 0)
    return out


def compose_spans(first: PairList, second: PairList) -> Tuple[PairList, Dict[Tuple[int, int], int]]:
    """Canonical composite and the position of each pullback element in it"""
    elements = [(i, j) for i, (_, b) in enumerate(first) for j, (b2, _) in enumerate(second) if b == b2]
    keyed = sorted(((first[i][0], second[j][1]), (i, j)) for i, j in elements)
    return tuple(pair for pair, _ in keyed), {element: pos for pos, (_, element) in enumerate(keyed)}


def _cell_maps(source: PairList, target: PairList, f: Tuple[int, ...], g: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    """Apex maps h with d' h = f d and c' h = g c"""
    choices = []
    for a, b in source:
        options = [k for k, (a2, b2) in enumerate(target) if a2 == f[a] and b2 == g[b]]
        if not options:
            return []
        choices.append(options)
    return [tuple(h) for h in product(*choices)]


def _proarrows(window: SetWindow, relations: bool) -> List[Tuple[str, str, PairList]]:
    proarrows = []
    for a, n in window.sets.items():
        for b, k in window.sets.items():
            bound = window.bounds.get((a, b), 0)
            found = set()
            for pairs in _multisets(n, k, bound):
                if relations and len(set(pairs)) != len(pairs):
                    continue
                found.add(pairs)
            if a == b:
                found.add(tuple((i, i) for i in range(n)))
            proarrows.extend((a, b, pairs) for pairs in sorted(found))
    return proarrows


def span_window(window: SetWindow) -> PseudoDoubleCategory:
    """Span(Set) restricted to the window"""
    E0 = functions_category(window)
    proarrows = _proarrows(window, relations=False)
    present = set(proarrows)
    cells = []
    for m in proarrows:
        for n in proarrows:
            for f in E0.hom(E0.object_index(m[0]), E0.object_index(n[0])):
                for g in E0.hom(E0.object_index(m[1]), E0.object_index(n[1])):
                    fv, gv = E0.arrows[f][2], E0.arrows[g][2]
                    for h in _cell_maps(m[2], n[2], fv, gv):
                        cells.append(((m, n, fv, gv, h), m, n))
    identities = {m: (m, m, tuple(range(window.sets[m[0]])), tuple(range(window.sets[m[1]])),
                      tuple(range(len(m[2])))) for m in proarrows}

    def compose(second: Tuple, first: Tuple) -> Tuple:
        return (first[0], second[1], tuple(second[2][v] for v in first[2]),
                tuple(second[3][v] for v in first[3]), tuple(second[4][v] for v in first[4]))

    E1 = FinCategory.build(proarrows, cells, identities, compose, name="Span")
    src = Functor.by_labels(E1, E0, lambda m: m[0], lambda c: (c[0][0], c[1][0], c[2]), name="src")
    tgt = Functor.by_labels(E1, E0, lambda m: m[1], lambda c: (c[0][1], c[1][1], c[3]), name="tgt")

    def unit_obj(a: str) -> Tuple:
        return (a, a, tuple((i, i) for i in range(window.sets[a])))

    unit = Functor.by_labels(E0, E1, unit_obj,
                             lambda f: (unit_obj(f[0]), unit_obj(f[1]), f[2], f[2], f[2]), name="y")

    composites: Dict[Tuple, Tuple] = {}

    def composite(m: Tuple, n: Tuple) -> Tuple[Tuple, Dict]:
        key = (m, n)
        if key not in composites:
            pairs, position = compose_spans(m[2], n[2])
            result = (m[0], n[1], pairs)
            if result not in present:
                raise WindowClosureError(f"composite of {m!r} and {n!r} has apex {len(pairs)}, "
                                         f"outside the window bound for {(m[0], n[1])!r}")
            composites[key] = (result, position)
        return composites[key]

    def tensor_obj(i: int, j: int) -> int:
        return E1.object_index(composite(E1.objects[i], E1.objects[j])[0])

    def tensor_arr(x: int, y: int) -> int:
        c1, c2 = E1.arrows[x], E1.arrows[y]
        source, position = composite(c1[0], c2[0])
        target, position2 = composite(c1[1], c2[1])
        h = [0] * len(source[2])
        for (i, j), pos in position.items():
            h[pos] = position2[(c1[4][i], c2[4][j])]
        return E1.arrow_index((source, target, c1[2], c2[3], tuple(h)))

    def associator(i: int, j: int, k: int) -> int:
        m, n, p = E1.objects[i], E1.objects[j], E1.objects[k]
        mn, pos_mn = composite(m, n)
        left, pos_left = composite(mn, p)
        np_, pos_np = composite(n, p)
        right, pos_right = composite(m, np_)
        h = [0] * len(left[2])
        for (a, b), ab in pos_mn.items():
            for (ab2, c), pos in pos_left.items():
                if ab2 != ab:
                    continue
                h[pos] = pos_right[(a, pos_np[(b, c)])]
        return E1.arrow_index((left, right, tuple(range(window.sets[m[0]])), tuple(range(window.sets[p[1]])),
                               tuple(h)))

    D = make_double_category(E0, E1, src, tgt, unit, tensor_obj, tensor_arr, associator, name="Span")
    D.window = window.describe()
    logger.debug("span window: %d proarrows, %d cells", E1.n_objects, E1.n_arrows)
    return D


def rel_window(window: SetWindow) -> PseudoDoubleCategory:
    """Rel restricted to the window"""
    E0 = functions_category(window)
    proarrows = _proarrows(window, relations=True)
    present = set(proarrows)
    cells = []
    for m in proarrows:
        for n in proarrows:
            targets = set(n[2])
            for f in E0.hom(E0.object_index(m[0]), E0.object_index(n[0])):
                for g in E0.hom(E0.object_index(m[1]), E0.object_index(n[1])):
                    fv, gv = E0.arrows[f][2], E0.arrows[g][2]
                    if all((fv[a], gv[b]) in targets for a, b in m[2]):
                        cells.append(((m, n, fv, gv), m, n))
    identities = {m: (m, m, tuple(range(window.sets[m[0]])), tuple(range(window.sets[m[1]]))) for m in proarrows}

    def compose(second: Tuple, first: Tuple) -> Tuple:
        return (first[0], second[1], tuple(second[2][v] for v in first[2]), tuple(second[3][v] for v in first[3]))

    E1 = FinCategory.build(proarrows, cells, identities, compose, name="Rel")
    src = Functor.by_labels(E1, E0, lambda m: m[0], lambda c: (c[0][0], c[1][0], c[2]), name="src")
    tgt = Functor.by_labels(E1, E0, lambda m: m[1], lambda c: (c[0][1], c[1][1], c[3]), name="tgt")

    def unit_obj(a: str) -> Tuple:
        return (a, a, tuple((i, i) for i in range(window.sets[a])))

    unit = Functor.by_labels(E0, E1, unit_obj, lambda f: (unit_obj(f[0]), unit_obj(f[1]), f[2], f[2]), name="y")

    def composite(m: Tuple, n: Tuple) -> Tuple:
        pairs = tuple(sorted({(a, c) for a, b in m[2] for b2, c in n[2] if b == b2}))
        result = (m[0], n[1], pairs)
        if result not in present:
            raise WindowClosureError(f"relational composite of {m!r} and {n!r} is outside the window")
        return result

    def tensor_obj(i: int, j: int) -> int:
        return E1.object_index(composite(E1.objects[i], E1.objects[j]))

    def tensor_arr(x: int, y: int) -> int:
        c1, c2 = E1.arrows[x], E1.arrows[y]
        return E1.arrow_index((composite(c1[0], c2[0]), composite(c1[1], c2[1]), c1[2], c2[3]))

    D = make_double_category(E0, E1, src, tgt, unit, tensor_obj, tensor_arr, name="Rel")
    D.window = window.describe()
    return D


def image_functor(spans: PseudoDoubleCategory, relations: PseudoDoubleCategory) -> DoubleFunctor:
    """im: Span -> Rel, taking a span to the image of its apex in A x B"""
    def relation(m: Tuple) -> Tuple:
        return (m[0], m[1], tuple(sorted(set(m[2]))))

    F0 = Functor.by_labels(spans.E0, relations.E0, lambda a: a, lambda f: f, name="im0")
    F1 = Functor.by_labels(spans.E1, relations.E1, relation,
                           lambda c: (relation(c[0]), relation(c[1]), c[2], c[3]), name="im1")
    return DoubleFunctor(spans, relations, F0, F1, name="im")


def window_closure(D: PseudoDoubleCategory) -> Report:
    """Composite of every composable pair lies in the window"""
    count = 0
    for m, n in D.composable_pairs():
        count += 1
        try:
            D.tensor_obj(m, n)
        except WindowClosureError as e:
            return Report.failing("window_closure", {"pair": [D.E1.objects[m], D.E1.objects[n]], "reason": str(e)},
                                  stats={"pairs": count})
    return Report.passing("window_closure", stats={"pairs": count})


# monoidal ---------------------------------------------------------------------

def ordered_monoid(operation: str = "max") -> PseudoDoubleCategory:
    """The chain 0 <= 1 under max (unit 0) or min (unit 1) as a one-object double category"""
    if operation not in ("max", "min"):
        raise SchemaError(f"unknown monoid operation {operation!r}")
    op = max if operation == "max" else min
    M = FinCategory.build([0, 1], [("0", 0, 0), ("1", 1, 1), ("<=", 0, 1)], {0: "0", 1: "1"},
                          lambda g, f: "<=" if "<=" in (g, f) else f, name=f"2_{operation}")

    def tensor_obj(x: int, y: int) -> int:
        return op(x, y)

    def tensor_arr(a: int, b: int) -> int:
        s = op(M.src(a), M.src(b))
        t = op(M.tgt(a), M.tgt(b))
        return M.hom(s, t)[0]

    return monoidal_as_double(M, tensor_obj, tensor_arr, unit=0 if operation == "max" else 1,
                              name=f"B(2,{operation})")


def cyclic_monoid(order: int = 2) -> PseudoDoubleCategory:
    """Z/order as a discrete monoidal category"""
    M = FinCategory.from_ids(list(range(order)), [f"1_{i}" for i in range(order)], range(order), range(order),
                             range(order), lambda g, f: g, name=f"Z{order}")
    return monoidal_as_double(M, lambda x, y: (x + y) % order, lambda a, b: (a + b) % order, unit=0,
                              name=f"B(Z{order})")


def involutive_monoid() -> PseudoDoubleCategory:
    """Objects I and a with a (x) a = a; a has an involution s, and tensor adds s-exponents mod 2"""
    exponent = {1: 0, 2: 1}

    def compose(g: int, f: int) -> int:
        if g == 0:
            return 0
        return 1 + (exponent[g] + exponent[f]) % 2

    M = FinCategory.from_ids(["I", "a"], ["1_I", "1_a", "s"], [0, 1, 1], [0, 1, 1], [0, 1], compose, name="Inv")

    def tensor_arr(f: int, g: int) -> int:
        if f == 0 and g == 0:
            return 0
        return 1 + (exponent.get(f, 0) + exponent.get(g, 0)) % 2

    return monoidal_as_double(M, max, tensor_arr, unit=0, name="B(Inv)")


def monoidal_functor(dom: PseudoDoubleCategory, cod: PseudoDoubleCategory, on_objects: Sequence[int],
                     laxity: bool = True, name: str = "") -> DoubleFunctor:
    """Double functor between one-object double categories of preorders from an object map

    Comparison cells are the unique arrows F x (x) F y -> F(x (x) y) and
    I -> F I of the codomain preorder.
    """
    M, N = dom.E1, cod.E1
    F1 = Functor.from_functions(M, N, lambda x: on_objects[x],
                                lambda a: N.hom(on_objects[M.src(a)], on_objects[M.tgt(a)])[0], name=name or "F")
    F0 = Functor(dom.E0, cod.E0, [0], [0], name="*")
    phi = {(x, y): N.hom(cod.tensor_obj(on_objects[x], on_objects[y]), on_objects[dom.tensor_obj(x, y)])[0]
           for x, y in dom.composable_pairs()}
    iota = {0: N.hom(cod.unit_obj(0), on_objects[dom.unit_obj(0)])[0]}
    functor = DoubleFunctor(dom, cod, F0, F1, phi, iota, flavor="lax" if laxity else "strict", name=name)
    return functor


def build_provider(kind: str, sizes: Sequence[int] = (1, 2), apex: int = 1, **params) -> PseudoDoubleCategory:
    """Dispatch on provider kind: span, rel, fam, monoidal"""
    window = SetWindow.uniform(sizes, apex)
    if kind == "span":
        return span_window(window)
    if kind == "rel":
        return rel_window(window)
    if kind == "monoidal":
        return ordered_monoid(params.get("operation", "max"))
    if kind == "fam":
        from core.indexed_examples import fam_window
        return fam_window(window, params.get("category")).double
    raise SchemaError(f"unknown provider kind {kind!r}")
