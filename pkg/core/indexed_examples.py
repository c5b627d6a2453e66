"""
Indexed Double Categories - Standard Examples
=============================================
Concrete F: B^op -> Span(Cat) used by the tests, the corpus and the Fam
provider.

Examples:
- constant_indexed: every fiber is one category, every map the identity
- representable_indexed: F(X) = Hom(X, K) as a discrete category; El is D/K
- slice_indexed: F(C) = D0/C, F(m) = D1/m, reindexing by chosen pullbacks
- family_indexed: families in C over a span window, F(m) a comma category
- profunctor_indexed: a profunctor between full subcategories of a
  category, indexed over the walking proarrow
- indexed_examples: one of the above by kind, as recipe documents name them
"""

import logging
from itertools import product
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from core.dblcat import DoubleFunctor, PseudoDoubleCategory, require_pullbacks, walking_proarrow
from core.dblfib import DoubleCleavage
from core.elements import IndexedDoubleCategory, elements_locally_discrete
from core.errors import PreconditionError, SchemaError, WindowClosureError
from core.fincat import (FinCategory, Functor, arrow_category, chosen_pullback, full_subcategory,
                         mediating_arrow, slice_category, subcategory, terminal_category,
                         walking_arrow)
from core.providers import SetWindow, compose_spans, span_window, window_closure

logger = logging.getLogger(__name__)

IdTuple = Tuple[int, ...]


def _require_strict_base(B: PseudoDoubleCategory) -> None:
    if not B.is_strict():
        raise PreconditionError(f"{B.name or 'base'} is not strict")


def _with_laxity(F: IndexedDoubleCategory, on_object, on_arrow) -> IndexedDoubleCategory:
    """Fill laxity[(m, n)] from label functions on the pair pullbacks"""
    B = F.base
    for m, n in B.composable_pairs():
        pb = F.pair_pullback(m, n)
        target = F.fiber1[B.tensor_obj(m, n)]
        F.laxity[(m, n)] = Functor.by_labels(pb.category, target,
                                             lambda pair, m=m, n=n: on_object(m, n, pair),
                                             lambda pair, m=m, n=n: on_arrow(m, n, pair), name="phi")
    return F


# constant ------------------------------------------------------------------------

def constant_indexed(B: PseudoDoubleCategory, category: Optional[FinCategory] = None) -> IndexedDoubleCategory:
    """Every fiber is the given category (terminal by default)"""
    _require_strict_base(B)
    C = category or terminal_category()
    one = Functor.identity(C)
    F = IndexedDoubleCategory(
        B, [C] * B.E0.n_objects, [one] * B.E0.n_arrows, [C] * B.E1.n_objects, [(one, one)] * B.E1.n_objects,
        [one] * B.E1.n_arrows, {}, [one] * B.E0.n_objects, name=f"const({C.name})")
    return _with_laxity(F, lambda m, n, pair: pair[0], lambda m, n, pair: pair[0])


# representable -------------------------------------------------------------------------

def discrete_category(labels: Sequence, name: str = "") -> FinCategory:
    ids = range(len(labels))
    return FinCategory.from_ids(list(labels), [("1", label) for label in labels], ids, ids, ids,
                                lambda g, f: g, name=name)


def _discrete_functor(dom: FinCategory, cod: FinCategory, on_label, name: str = "") -> Functor:
    return Functor.by_labels(dom, cod, on_label, lambda a: ("1", on_label(a[1])), name=name)


def representable_indexed(D: PseudoDoubleCategory, k: int) -> IndexedDoubleCategory:
    """F(X) = vertical arrows X -> K, F(m) = cells m => y_K, reindexing by precomposition"""
    _require_strict_base(D)
    E0, E1 = D.E0, D.E1
    yk = D.unit_obj(k)
    fiber0 = [discrete_category([E0.arrows[a] for a in E0.hom(x, k)], name=f"Hom({E0.objects[x]},K)")
              for x in range(E0.n_objects)]
    fiber1 = [discrete_category([E1.arrows[t] for t in E1.hom(m, yk)], name=f"Cell({E1.objects[m]},yK)")
              for m in range(E1.n_objects)]

    def leg(m: int, side: Functor) -> Functor:
        return _discrete_functor(fiber1[m], fiber0[side.obj(m)],
                                 lambda t: E0.arrows[side.arr(E1.arrow_index(t))])

    legs = [(leg(m, D.src), leg(m, D.tgt)) for m in range(E1.n_objects)]
    reindex0 = [_discrete_functor(fiber0[E0.tgt(f)], fiber0[E0.src(f)],
                                  lambda a, f=f: E0.arrows[E0.compose(E0.arrow_index(a), f)], name="precompose")
                for f in range(E0.n_arrows)]
    reindex1 = [_discrete_functor(fiber1[E1.tgt(t)], fiber1[E1.src(t)],
                                  lambda d, t=t: E1.arrows[E1.compose(E1.arrow_index(d), t)], name="precompose")
                for t in range(E1.n_arrows)]
    unit = [_discrete_functor(fiber0[x], fiber1[D.unit_obj(x)],
                              lambda a: E1.arrows[D.unit_arr(E0.arrow_index(a))], name="y")
            for x in range(E0.n_objects)]
    F = IndexedDoubleCategory(D, fiber0, reindex0, fiber1, legs, reindex1, {}, unit,
                              name=f"Hom(-,{E0.objects[k]})")

    def tensor_label(pair) -> object:
        return E1.arrows[D.tensor_arr(E1.arrow_index(pair[0]), E1.arrow_index(pair[1]))]

    return _with_laxity(F, lambda m, n, pair: tensor_label(pair),
                        lambda m, n, pair: ("1", tensor_label((pair[0][1], pair[1][1]))))


# slices -------------------------------------------------------------------------------

class _SliceLevel(NamedTuple):
    fibers: List[FinCategory]
    reindex: List[Functor]
    comparisons: Dict[Tuple[int, int, int], int]


def _slice_level(C: FinCategory) -> _SliceLevel:
    """C/x for every x, reindexing along chosen pullbacks and the comparisons between them"""
    fibers = [slice_category(C, x)[0] for x in range(C.n_objects)]
    reindex = []
    for f in range(C.n_arrows):
        def on_object(label, f=f):
            return C.arrows[chosen_pullback(C, f, C.arrow_index(label)).left]

        def on_arrow(label, f=f):
            u, a, a2 = (C.arrow_index(part) for part in label)
            c1, c2 = chosen_pullback(C, f, a), chosen_pullback(C, f, a2)
            k = mediating_arrow(C, c2, c1.left, C.compose(u, c1.right))
            return C.arrows[k], C.arrows[c1.left], C.arrows[c2.left]

        reindex.append(Functor.by_labels(fibers[C.tgt(f)], fibers[C.src(f)], on_object, on_arrow,
                                         name=f"{C.arrows[f]}*"))
    comparisons = {}
    for f in range(C.n_arrows):
        for g in C.arrows_out_of(C.tgt(f)):
            gf = C.compose(g, f)
            fibre = fibers[C.tgt(g)]
            for z in range(fibre.n_objects):
                a = C.arrow_index(fibre.objects[z])
                cg = chosen_pullback(C, g, a)
                cf = chosen_pullback(C, f, cg.left)
                cgf = chosen_pullback(C, gf, a)
                k = mediating_arrow(C, cgf, cf.left, C.compose(cg.right, cf.right))
                if not C.is_identity(k):
                    comparisons[(f, g, z)] = fibers[C.src(f)].arrow_index(
                        (C.arrows[k], C.arrows[cf.left], C.arrows[cgf.left]))
    return _SliceLevel(fibers, reindex, comparisons)


def _require_normal_pullbacks(C: FinCategory, level: str) -> None:
    for a in range(C.n_arrows):
        cone = chosen_pullback(C, C.identity(C.tgt(a)), a)
        if tuple(cone) != (C.src(a), a, C.identity(C.src(a))):
            raise PreconditionError(f"chosen pullback of {C.arrows[a]!r} along an identity of {level} "
                                    f"is not the arrow itself")


def slice_indexed(D: PseudoDoubleCategory) -> IndexedDoubleCategory:
    """F(C) = D0/C and F(m) = D1/m, the indexed form of the codomain double fibration"""
    _require_strict_base(D)
    require_pullbacks(D)
    E0, E1 = D.E0, D.E1
    _require_normal_pullbacks(E0, "objects")
    _require_normal_pullbacks(E1, "proarrows")
    level0, level1 = _slice_level(E0), _slice_level(E1)

    def leg(m: int, side: Functor) -> Functor:
        def on_arrow(label):
            return tuple(E0.arrows[side.arr(E1.arrow_index(part))] for part in label)

        return Functor.by_labels(level1.fibers[m], level0.fibers[side.obj(m)],
                                 lambda t: E0.arrows[side.arr(E1.arrow_index(t))], on_arrow, name=side.name)

    def on_unit_arrow(label):
        return tuple(E1.arrows[D.unit_arr(E0.arrow_index(part))] for part in label)

    legs = [(leg(m, D.src), leg(m, D.tgt)) for m in range(E1.n_objects)]
    unit = [Functor.by_labels(level0.fibers[x], level1.fibers[D.unit_obj(x)],
                              lambda a: E1.arrows[D.unit_arr(E0.arrow_index(a))], on_unit_arrow, name="y")
            for x in range(E0.n_objects)]

    laxity_iso = {}
    for t, d in D.composable_arrow_pairs():
        n, q = E1.tgt(t), E1.tgt(d)
        mp = D.tensor_obj(E1.src(t), E1.src(d))
        td = D.tensor_arr(t, d)
        for x in range(level1.fibers[n].n_objects):
            cx = E1.arrow_index(level1.fibers[n].objects[x])
            for y in range(level1.fibers[q].n_objects):
                cy = E1.arrow_index(level1.fibers[q].objects[y])
                if D.tgt.arr(cx) != D.src.arr(cy):
                    continue
                ct, cd = chosen_pullback(E1, t, cx), chosen_pullback(E1, d, cy)
                whole = chosen_pullback(E1, td, D.tensor_arr(cx, cy))
                left = D.tensor_arr(ct.left, cd.left)
                k = mediating_arrow(E1, whole, left, D.tensor_arr(ct.right, cd.right))
                if not E1.is_identity(k):
                    laxity_iso[(t, d, x, y)] = level1.fibers[mp].arrow_index(
                        (E1.arrows[k], E1.arrows[left], E1.arrows[whole.left]))

    unit_iso = {}
    for f in range(E0.n_arrows):
        yc = D.unit_obj(E0.src(f))
        fibre = level0.fibers[E0.tgt(f)]
        for y in range(fibre.n_objects):
            a = E0.arrow_index(fibre.objects[y])
            c0 = chosen_pullback(E0, f, a)
            c1 = chosen_pullback(E1, D.unit_arr(f), D.unit_arr(a))
            left = D.unit_arr(c0.left)
            k = mediating_arrow(E1, c1, left, D.unit_arr(c0.right))
            if not E1.is_identity(k):
                unit_iso[(f, y)] = level1.fibers[yc].arrow_index((E1.arrows[k], E1.arrows[left], E1.arrows[c1.left]))

    F = IndexedDoubleCategory(D, level0.fibers, level0.reindex, level1.fibers, legs, level1.reindex, {}, unit,
                              comp0=level0.comparisons, comp1=level1.comparisons, laxity_iso=laxity_iso,
                              unit_iso=unit_iso, name=f"slice({D.name})")

    def tensor_label(first, second):
        return E1.arrows[D.tensor_arr(E1.arrow_index(first), E1.arrow_index(second))]

    return _with_laxity(F, lambda m, n, pair: tensor_label(*pair),
                        lambda m, n, pair: tuple(tensor_label(a, b) for a, b in zip(*pair)))


# families ---------------------------------------------------------------------------------

class _Power(NamedTuple):
    """C^n with id tuples for objects and arrows"""
    category: FinCategory
    objects: List[IdTuple]
    arrows: List[IdTuple]
    oid: Dict[IdTuple, int]
    aid: Dict[IdTuple, int]


def power_category(C: FinCategory, n: int) -> _Power:
    objects = list(product(range(C.n_objects), repeat=n))
    arrows = list(product(range(C.n_arrows), repeat=n))
    oid = {x: i for i, x in enumerate(objects)}
    aid = {a: k for k, a in enumerate(arrows)}
    T = C.table
    category = FinCategory.from_ids(
        [tuple(C.objects[i] for i in x) for x in objects], [tuple(C.arrows[i] for i in a) for a in arrows],
        [oid[tuple(C.src(i) for i in a)] for a in arrows], [oid[tuple(C.tgt(i) for i in a)] for a in arrows],
        [aid[tuple(C.identity(i) for i in x)] for x in objects],
        lambda g, f: aid[tuple(int(T[b, a]) for a, b in zip(arrows[f], arrows[g]))],
        name=f"{C.name}^{n}")
    return _Power(category, objects, arrows, oid, aid)


class _Comma(NamedTuple):
    """Objects (x, z, k) with k_s: x[d_s] -> z[c_s]; arrows (source, target, a, b)"""
    category: FinCategory
    objects: List[Tuple[IdTuple, IdTuple, IdTuple]]
    arrows: List[Tuple[int, int, IdTuple, IdTuple]]
    oid: Dict[Tuple[IdTuple, IdTuple, IdTuple], int]
    aid: Dict[Tuple[int, int, IdTuple, IdTuple], int]


def _comma_fiber(C: FinCategory, n_left: int, n_right: int, pairs: Sequence[Tuple[int, int]], name: str) -> _Comma:
    T = C.table
    objects = []
    for x in product(range(C.n_objects), repeat=n_left):
        for z in product(range(C.n_objects), repeat=n_right):
            for k in product(*[C.hom(x[d], z[c]) for d, c in pairs]):
                objects.append((x, z, tuple(k)))
    oid = {o: i for i, o in enumerate(objects)}
    arrows = []
    for i, (x, z, k) in enumerate(objects):
        for j, (x2, z2, k2) in enumerate(objects):
            for a in product(*[C.hom(x[v], x2[v]) for v in range(n_left)]):
                for b in product(*[C.hom(z[v], z2[v]) for v in range(n_right)]):
                    if all(T[b[c], k[s]] == T[k2[s], a[d]] for s, (d, c) in enumerate(pairs)):
                        arrows.append((i, j, tuple(a), tuple(b)))
    aid = {a: k for k, a in enumerate(arrows)}

    def object_label(o):
        x, z, k = o
        return (tuple(C.objects[v] for v in x), tuple(C.objects[v] for v in z), tuple(C.arrows[v] for v in k))

    def compose(g: int, f: int) -> int:
        i, _, a, b = arrows[f]
        _, j, a2, b2 = arrows[g]
        return aid[(i, j, tuple(int(T[p, q]) for q, p in zip(a, a2)), tuple(int(T[p, q]) for q, p in zip(b, b2)))]

    category = FinCategory.from_ids(
        [object_label(o) for o in objects],
        [(object_label(objects[i]), object_label(objects[j]), tuple(C.arrows[v] for v in a),
          tuple(C.arrows[v] for v in b)) for i, j, a, b in arrows],
        [i for i, _, _, _ in arrows], [j for _, j, _, _ in arrows],
        [aid[(i, i, tuple(C.identity(v) for v in x), tuple(C.identity(v) for v in z))]
         for i, (x, z, _) in enumerate(objects)],
        compose, name=name)
    return _Comma(category, objects, arrows, oid, aid)


def family_indexed(B: PseudoDoubleCategory, C: FinCategory) -> IndexedDoubleCategory:
    """F(A) = C^A and F(A <- S -> B) = families x, z with arrows x(d s) -> z(c s)"""
    _require_strict_base(B)
    E0, E1 = B.E0, B.E1
    size = {a: len(E0.arrows[E0.identity(a)][2]) for a in range(E0.n_objects)}
    powers = {n: power_category(C, n) for n in set(size.values())}
    power = [powers[size[a]] for a in range(E0.n_objects)]
    commas = [_comma_fiber(C, size[B.src.obj(m)], size[B.tgt.obj(m)], E1.objects[m][2], name=f"F{m}")
              for m in range(E1.n_objects)]
    T = C.table

    def pull(values: Sequence[int], along: Sequence[int]) -> IdTuple:
        return tuple(values[v] for v in along)

    reindex0 = []
    for f in range(E0.n_arrows):
        fv = E0.arrows[f][2]
        source, target = power[E0.tgt(f)], power[E0.src(f)]
        reindex0.append(Functor(source.category, target.category,
                                [target.oid[pull(x, fv)] for x in source.objects],
                                [target.aid[pull(a, fv)] for a in source.arrows], name="restrict"))

    legs = []
    for m in range(E1.n_objects):
        fibre = commas[m]
        left, right = power[B.src.obj(m)], power[B.tgt.obj(m)]
        legs.append((
            Functor(fibre.category, left.category, [left.oid[o[0]] for o in fibre.objects],
                    [left.aid[a] for _, _, a, _ in fibre.arrows], name="L"),
            Functor(fibre.category, right.category, [right.oid[o[1]] for o in fibre.objects],
                    [right.aid[b] for _, _, _, b in fibre.arrows], name="R")))

    reindex1 = []
    for t in range(E1.n_arrows):
        _, _, fv, gv, h = E1.arrows[t]
        source, target = commas[E1.tgt(t)], commas[E1.src(t)]
        move = [target.oid[(pull(x, fv), pull(z, gv), pull(k, h))] for x, z, k in source.objects]
        reindex1.append(Functor(source.category, target.category, move,
                                [target.aid[(move[i], move[j], pull(a, fv), pull(b, gv))]
                                 for i, j, a, b in source.arrows], name="restrict"))

    unit = []
    for c in range(E0.n_objects):
        fibre, comma = power[c], commas[B.unit_obj(c)]
        move = [comma.oid[(x, x, tuple(C.identity(v) for v in x))] for x in fibre.objects]
        arrows = []
        for a in fibre.arrows:
            src = fibre.oid[tuple(C.src(v) for v in a)]
            tgt = fibre.oid[tuple(C.tgt(v) for v in a)]
            arrows.append(comma.aid[(move[src], move[tgt], a, a)])
        unit.append(Functor(fibre.category, comma.category, move, arrows, name="iota"))

    F = IndexedDoubleCategory(B, [p.category for p in power], reindex0, [c.category for c in commas], legs,
                              reindex1, {}, unit, name=f"Fam({C.name})")
    for m, n in B.composable_pairs():
        pb = F.pair_pullback(m, n)
        mn = B.tensor_obj(m, n)
        first, second, whole = commas[m], commas[n], commas[mn]
        _, position = compose_spans(E1.objects[m][2], E1.objects[n][2])

        def glue(i: int, j: int) -> int:
            x, _, k = first.objects[i]
            _, w, l = second.objects[j]
            composite = [0] * len(position)
            for (s, r), pos in position.items():
                composite[pos] = int(T[l[r], k[s]])
            return whole.oid[(x, w, tuple(composite))]

        move = [glue(pb.left.obj(i), pb.right.obj(i)) for i in range(pb.category.n_objects)]
        arrows = []
        for k in range(pb.category.n_arrows):
            _, _, a, _ = first.arrows[pb.left.arr(k)]
            _, _, _, c = second.arrows[pb.right.arr(k)]
            arrows.append(whole.aid[(move[pb.category.src(k)], move[pb.category.tgt(k)], a, c)])
        F.laxity[(m, n)] = Functor(pb.category, whole.category, move, arrows, name="phi")
    return F


class FamWindow(NamedTuple):
    """Fam(C) over a span window: the elements of the family indexed double category"""
    double: PseudoDoubleCategory
    indexed: IndexedDoubleCategory
    projection: DoubleFunctor
    cleavage: DoubleCleavage


def fam_window(window: SetWindow, category: Optional[FinCategory] = None) -> FamWindow:
    """Fam(C) restricted to the window; C defaults to the walking arrow"""
    base = span_window(window)
    closure = window_closure(base)
    if closure.failed:
        raise WindowClosureError(f"Fam needs a closed span window: {closure.counterexample['reason']}")
    if not base.is_strict():
        raise PreconditionError("Fam needs a strict span window (apex bound at most 1)")
    C = category or walking_arrow()
    F = family_indexed(base, C)
    elements = elements_locally_discrete(F)
    D = elements.double
    D.name = F.name
    D.window = dict(base.window, category=C.name)
    logger.debug("Fam window: %d objects, %d proarrows", D.E0.n_objects, D.E1.n_objects)
    return FamWindow(D, F, elements.projection, elements.cleavage)


# profunctors ------------------------------------------------------------------------------

def profunctor_indexed(K: FinCategory, left: Iterable[int], right: Iterable[int]) -> IndexedDoubleCategory:
    """K(a, b) for a in left, b in right, as squares over the walking proarrow 1 -|-> 2"""
    W = walking_proarrow()
    A, _ = full_subcategory(K, left, name="A")
    Bc, _ = full_subcategory(K, right, name="B")
    arrows_a, arrows_b, arrows_k = arrow_category(A), arrow_category(Bc), arrow_category(K)
    hetero = {h for h in range(K.n_arrows)
              if A.has_object(K.objects[K.src(h)]) and Bc.has_object(K.objects[K.tgt(h)])}
    squares = [s for s in range(arrows_k.category.n_arrows)
               if arrows_k.category.src(s) in hetero and arrows_k.category.tgt(s) in hetero]
    P, _ = subcategory(arrows_k.category, hetero, squares, name="El(H)")
    fiber0 = [A, Bc]
    fiber1 = [arrows_a.category, arrows_b.category, P]
    legs = [(arrows_a.dom, arrows_a.cod), (arrows_b.dom, arrows_b.cod),
            (arrows_k.dom.restrict(P, A, name="L"), arrows_k.cod.restrict(P, Bc, name="R"))]
    one = [Functor.identity(C) for C in fiber0]
    ones = [Functor.identity(C) for C in fiber1]

    def unit(C: FinCategory, arrows) -> Functor:
        return Functor.by_labels(C, arrows.category, lambda x: C.arrows[C.identity(C.object_index(x))],
                                 lambda u: _square(C, C.identity(C.src(C.arrow_index(u))),
                                                   C.identity(C.tgt(C.arrow_index(u))), u, u), name="iota")

    F = IndexedDoubleCategory(W, fiber0, one, fiber1, legs, ones, {}, [unit(A, arrows_a), unit(Bc, arrows_b)],
                              name=f"Prof({K.name})")

    def compose_label(f, g):
        return K.arrows[K.compose(K.arrow_index(g), K.arrow_index(f))]

    def paste(first, second):
        f, f2, u, _ = first
        g, g2, _, w = second
        return compose_label(f, g), compose_label(f2, g2), u, w

    return _with_laxity(F, lambda m, n, pair: compose_label(*pair), lambda m, n, pair: paste(*pair))


def _square(C: FinCategory, f: int, f2: int, u, v):
    return C.arrows[f], C.arrows[f2], u, v


INDEXED_KINDS = ("constant", "representable", "slice", "family", "profunctor")


def indexed_examples(kind: str, base: Optional[PseudoDoubleCategory] = None, category: Optional[FinCategory] = None,
                     target: int = 0, sizes: Sequence[int] = (1,), apex: int = 1, left: Iterable[int] = (),
                     right: Iterable[int] = ()) -> IndexedDoubleCategory:
    """Stock indexed double category by kind; missing or bad parameters raise SchemaError"""
    if kind not in INDEXED_KINDS:
        raise SchemaError(f"unknown indexed example {kind!r}", "example")
    if kind in ("constant", "representable", "slice") and base is None:
        raise SchemaError(f"{kind} needs a base double category", "base")
    if kind == "constant":
        return constant_indexed(base, category)
    if kind == "representable":
        if not 0 <= target < base.E0.n_objects:
            raise SchemaError("unknown object id", "target")
        return representable_indexed(base, target)
    if kind == "slice":
        return slice_indexed(base)
    if kind == "family":
        return fam_window(SetWindow.uniform(sizes, apex), category).indexed
    if category is None:
        raise SchemaError("profunctor needs a category", "category")
    return profunctor_indexed(category, left, right)
