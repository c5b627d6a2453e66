"""
Indexed Double Categories - Elements and Fibers
===============================================
Span-of-categories valued lax functors F on a strict base double category
B, the double elements construction El(F) -> B with its canonical
cleavage, and the fibers construction going back from a cloven double
fibration.

Features:
- IndexedDoubleCategory with stored comparison components (identities elided)
- validate_indexed: typing, normalization, span morphisms, pseudo-functoriality
  at both levels, naturality of the laxity and unit comparisons, unit and
  composition coherence
- elements_construction / elements_locally_discrete
- fibers_construction (cleavage normalized first)
- IndexedMorphism validation and componentwise comparison of indexed data

Conventions:
- reindex0[f]: F(D) -> F(C) for f: C -> D in B0, reindex1[t]: F(n) -> F(m) for t: m => n
- comp0[(f, g, z)]: f* g* z -> (g f)* z, comp1 likewise for composable cells
- laxity_iso[(t, d, x, y)]: phi(t* x, d* y) -> (t (x) d)* phi(x, y)
- unit_iso[(f, y)]: iota(f* y) -> (y_f)* iota(y)
- associativity[(m, n, p, x, y, z)]: phi(phi(x, y), z) -> phi(x, phi(y, z))
"""

import logging
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from api.models.report_models import Report, combine
from core.dblcat import DoubleFunctor, PseudoDoubleCategory, make_double_category
from core.dblfib import DoubleCleavage
from core.errors import CompositionError, PreconditionError, SchemaError
from core.fib import ClovenFibration, lift_pairs, normalize_cleavage
from core.fincat import (FinCategory, Functor, NatTransformation, Pullback, SearchBudget, fiber_category,
                         find_isomorphism, isomorphisms, pullback_category, pullback_map, validate_category,
                         validate_functor, validate_transformation)

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class IndexedDoubleCategory:
    """F: B^op -> Span(Cat), stored level by level with identity comparisons elided"""

    def __init__(self, base: PseudoDoubleCategory, fiber0: Sequence[FinCategory], reindex0: Sequence[Functor],
                 fiber1: Sequence[FinCategory], legs: Sequence[Tuple[Functor, Functor]],
                 reindex1: Sequence[Functor], laxity: Dict[Pair, Functor], unit: Sequence[Functor],
                 comp0: Optional[Dict] = None, comp1: Optional[Dict] = None,
                 laxity_iso: Optional[Dict] = None, unit_iso: Optional[Dict] = None,
                 associativity: Optional[Dict] = None, name: str = ""):
        self.base = base
        self.fiber0 = list(fiber0)
        self.reindex0 = list(reindex0)
        self.fiber1 = list(fiber1)
        self.legs = [tuple(pair) for pair in legs]
        self.reindex1 = list(reindex1)
        self.laxity = dict(laxity)
        self.unit = list(unit)
        self.comp0: Dict[Tuple[int, int, int], int] = dict(comp0 or {})
        self.comp1: Dict[Tuple[int, int, int], int] = dict(comp1 or {})
        self.laxity_iso: Dict[Tuple[int, int, int, int], int] = dict(laxity_iso or {})
        self.unit_iso: Dict[Tuple[int, int], int] = dict(unit_iso or {})
        self.associativity: Dict[Tuple[int, ...], int] = dict(associativity or {})
        self.name = name
        self._cache: Dict = {}

    def left(self, m: int) -> Functor:
        return self.legs[m][0]

    def right(self, m: int) -> Functor:
        return self.legs[m][1]

    def pair_pullback(self, m: int, n: int) -> Pullback:
        """F(m) x_F(B) F(n) over the right leg of m and the left leg of n"""
        key = ("pb", m, n)
        if key not in self._cache:
            self._cache[key] = pullback_category(self.right(m), self.left(n), name=f"F{m}xF{n}")
        return self._cache[key]

    def phi_obj(self, m: int, n: int, x: int, y: int) -> int:
        return self.laxity[(m, n)].obj(self.pair_pullback(m, n).pair_object(x, y))

    def phi_arr(self, m: int, n: int, a: int, b: int) -> int:
        return self.laxity[(m, n)].arr(self.pair_pullback(m, n).pair_arrow(a, b))

    # comparison components ---------------------------------------------------

    def gamma0(self, f: int, g: int, z: int) -> int:
        if (f, g, z) in self.comp0:
            return self.comp0[(f, g, z)]
        B0 = self.base.E0
        return self.fiber0[B0.src(f)].identity(self.reindex0[B0.compose(g, f)].obj(z))

    def gamma1(self, theta: int, delta: int, p: int) -> int:
        if (theta, delta, p) in self.comp1:
            return self.comp1[(theta, delta, p)]
        B1 = self.base.E1
        return self.fiber1[B1.src(theta)].identity(self.reindex1[B1.compose(delta, theta)].obj(p))

    def lax_iso(self, theta: int, delta: int, x: int, y: int) -> int:
        if (theta, delta, x, y) in self.laxity_iso:
            return self.laxity_iso[(theta, delta, x, y)]
        B = self.base
        n, q = B.E1.tgt(theta), B.E1.tgt(delta)
        mp = B.tensor_obj(B.E1.src(theta), B.E1.src(delta))
        return self.fiber1[mp].identity(self.reindex1[B.tensor_arr(theta, delta)].obj(self.phi_obj(n, q, x, y)))

    def unit_iso_at(self, f: int, y: int) -> int:
        if (f, y) in self.unit_iso:
            return self.unit_iso[(f, y)]
        B = self.base
        c, d = B.E0.src(f), B.E0.tgt(f)
        return self.fiber1[B.unit_obj(c)].identity(self.reindex1[B.unit_arr(f)].obj(self.unit[d].obj(y)))

    def assoc(self, m: int, n: int, p: int, x: int, y: int, z: int) -> int:
        if (m, n, p, x, y, z) in self.associativity:
            return self.associativity[(m, n, p, x, y, z)]
        B = self.base
        np_ = B.tensor_obj(n, p)
        mnp = B.tensor_obj(m, np_)
        return self.fiber1[mnp].identity(self.phi_obj(m, np_, x, self.phi_obj(n, p, y, z)))

    def stored_components(self) -> Iterator[Tuple[FinCategory, int]]:
        """Every stored comparison arrow with the fiber it lives in"""
        B = self.base
        for (f, _, _), c in self.comp0.items():
            yield self.fiber0[B.E0.src(f)], c
        for (theta, _, _), c in self.comp1.items():
            yield self.fiber1[B.E1.src(theta)], c
        for (theta, delta, _, _), c in self.laxity_iso.items():
            yield self.fiber1[B.tensor_obj(B.E1.src(theta), B.E1.src(delta))], c
        for (f, _), c in self.unit_iso.items():
            yield self.fiber1[B.unit_obj(B.E0.src(f))], c
        for (m, n, p, _, _, _), c in self.associativity.items():
            yield self.fiber1[B.tensor_obj(B.tensor_obj(m, n), p)], c

    def is_locally_discrete(self) -> bool:
        return all(C.is_identity(c) for C, c in self.stored_components())

    def __repr__(self) -> str:
        return f"IndexedDoubleCategory({self.name or '?'} over {self.base!r})"


# validation ---------------------------------------------------------------------

def _is_identity_functor(G: Functor) -> bool:
    return (G.dom == G.cod and np.array_equal(G.object_map, np.arange(G.dom.n_objects))
            and np.array_equal(G.arrow_map, np.arange(G.dom.n_arrows)))


def _comparison(check: str, source: Functor, target: Functor, components: List[int],
                where: object) -> Optional[Report]:
    """Failing report when the components are not a natural isomorphism source => target"""
    try:
        alpha = NatTransformation(source, target, components)
    except SchemaError as e:
        return Report.failing(check, {"at": where, "reason": str(e)})
    report = validate_transformation(alpha)
    if not report.passed:
        return Report.failing(check, {"at": where, "detail": report.counterexample})
    if not alpha.is_isomorphism():
        return Report.failing(check, {"at": where, "reason": "comparison is not invertible"})
    return None


def _typing(F: IndexedDoubleCategory) -> Report:
    check = "typing"
    B = F.base
    B0, B1 = B.E0, B.E1
    sizes = [(len(F.fiber0), B0.n_objects, "fiber0"), (len(F.reindex0), B0.n_arrows, "reindex0"),
             (len(F.fiber1), B1.n_objects, "fiber1"), (len(F.legs), B1.n_objects, "legs"),
             (len(F.reindex1), B1.n_arrows, "reindex1"), (len(F.unit), B0.n_objects, "unit")]
    for found, expected, part in sizes:
        if found != expected:
            return Report.failing(check, {"part": part, "found": found, "expected": expected})
    functors: List[Functor] = []
    for f in range(B0.n_arrows):
        r = F.reindex0[f]
        if r.dom != F.fiber0[B0.tgt(f)] or r.cod != F.fiber0[B0.src(f)]:
            return Report.failing(check, {"reindex0": B0.arrows[f]})
        functors.append(r)
    for m in range(B1.n_objects):
        L, R = F.legs[m]
        if L.dom != F.fiber1[m] or R.dom != F.fiber1[m] or L.cod != F.fiber0[B.src.obj(m)] \
                or R.cod != F.fiber0[B.tgt.obj(m)]:
            return Report.failing(check, {"legs": B1.objects[m]})
        functors.extend((L, R))
    for t in range(B1.n_arrows):
        r = F.reindex1[t]
        if r.dom != F.fiber1[B1.tgt(t)] or r.cod != F.fiber1[B1.src(t)]:
            return Report.failing(check, {"reindex1": B1.arrows[t]})
        functors.append(r)
    for m, n in B.composable_pairs():
        phi = F.laxity.get((m, n))
        if phi is None or phi.dom != F.pair_pullback(m, n).category or phi.cod != F.fiber1[B.tensor_obj(m, n)]:
            return Report.failing(check, {"laxity": [B1.objects[m], B1.objects[n]]})
        functors.append(phi)
    for c in range(B0.n_objects):
        iota = F.unit[c]
        if iota.dom != F.fiber0[c] or iota.cod != F.fiber1[B.unit_obj(c)]:
            return Report.failing(check, {"unit": B0.objects[c]})
        functors.append(iota)
    subs = [validate_category(C) for C in F.fiber0 + F.fiber1] + [validate_functor(G) for G in functors]
    return combine(check, subs)


def _normalization(F: IndexedDoubleCategory) -> Report:
    check = "normalization"
    B = F.base
    B0, B1 = B.E0, B.E1
    for c in range(B0.n_objects):
        if not _is_identity_functor(F.reindex0[B0.identity(c)]):
            return Report.failing(check, {"reason": "reindexing along an identity", "object": B0.objects[c]})
        yc = B.unit_obj(c)
        for side in (0, 1):
            if not _is_identity_functor(F.unit[c].then(F.legs[yc][side])):
                return Report.failing(check, {"reason": "unit legs", "object": B0.objects[c]})
    for m in range(B1.n_objects):
        if not _is_identity_functor(F.reindex1[B1.identity(m)]):
            return Report.failing(check, {"reason": "reindexing along an identity cell", "proarrow": B1.objects[m]})
    for m in range(B1.n_objects):
        a, b = B.src.obj(m), B.tgt.obj(m)
        Fm = F.fiber1[m]
        ya, yb = B.unit_obj(a), B.unit_obj(b)
        L, R = F.legs[m]
        left_pb, right_pb = F.pair_pullback(ya, m), F.pair_pullback(m, yb)
        left_unit = Functor.from_functions(
            Fm, left_pb.category,
            lambda x: left_pb.pair_object(F.unit[a].obj(L.obj(x)), x),
            lambda k: left_pb.pair_arrow(F.unit[a].arr(L.arr(k)), k))
        right_unit = Functor.from_functions(
            Fm, right_pb.category,
            lambda x: right_pb.pair_object(x, F.unit[b].obj(R.obj(x))),
            lambda k: right_pb.pair_arrow(k, F.unit[b].arr(R.arr(k))))
        if not _is_identity_functor(left_unit.then(F.laxity[(ya, m)])):
            return Report.failing(check, {"reason": "left unit", "proarrow": B1.objects[m]})
        if not _is_identity_functor(right_unit.then(F.laxity[(m, yb)])):
            return Report.failing(check, {"reason": "right unit", "proarrow": B1.objects[m]})
    return Report.passing(check)


def _span_morphisms(F: IndexedDoubleCategory) -> Report:
    """L_m t* = f* L_n and R_m t* = g* R_n for every cell t: m => n"""
    check = "span_morphisms"
    B = F.base
    B1 = B.E1
    for t in range(B1.n_arrows):
        m, n = B1.src(t), B1.tgt(t)
        r = F.reindex1[t]
        if r.then(F.left(m)) != F.left(n).then(F.reindex0[B.src.arr(t)]):
            return Report.failing(check, {"side": "left", "cell": B1.arrows[t]})
        if r.then(F.right(m)) != F.right(n).then(F.reindex0[B.tgt.arr(t)]):
            return Report.failing(check, {"side": "right", "cell": B1.arrows[t]})
    return Report.passing(check, stats={"cells": B1.n_arrows})


def _pseudo_functor(check: str, C: FinCategory, fibers: Sequence[FinCategory], reindex: Sequence[Functor],
                    gamma: Callable[[int, int, int], int]) -> Report:
    """Natural iso comparisons, identities at identities, and the cocycle condition"""
    pairs = [(f, g) for f in range(C.n_arrows) for g in C.arrows_out_of(C.tgt(f))]
    for f, g in pairs:
        fibre = fibers[C.tgt(g)]
        components = [gamma(f, g, z) for z in range(fibre.n_objects)]
        failure = _comparison(check, reindex[g].then(reindex[f]), reindex[int(C.table[g, f])], components,
                              [C.arrows[f], C.arrows[g]])
        if failure is not None:
            return failure
        if (C.is_identity(f) or C.is_identity(g)) and not all(fibers[C.src(f)].is_identity(c) for c in components):
            return Report.failing(check, {"reason": "comparison at an identity", "pair": [C.arrows[f], C.arrows[g]]})
    count = 0
    for f, g in pairs:
        Fa = fibers[C.src(f)]
        for h in C.arrows_out_of(C.tgt(g)):
            hg, gf = int(C.table[h, g]), int(C.table[g, f])
            for z in range(fibers[C.tgt(h)].n_objects):
                count += 1
                lhs = Fa.compose(gamma(f, hg, z), reindex[f].arr(gamma(g, h, z)))
                rhs = Fa.compose(gamma(gf, h, z), gamma(f, g, reindex[h].obj(z)))
                if lhs != rhs:
                    return Report.failing(check, {"reason": "cocycle",
                                                  "triple": [C.arrows[f], C.arrows[g], C.arrows[h]]})
    return Report.passing(check, stats={"pairs": len(pairs), "cocycles": count})


def _cell_comparisons_over_arrows(F: IndexedDoubleCategory) -> Report:
    """The legs of each cell comparison are the arrow comparisons"""
    check = "cell_comparison_legs"
    B = F.base
    B1 = B.E1
    for t in range(B1.n_arrows):
        for d in B1.arrows_out_of(B1.tgt(t)):
            p = B1.tgt(d)
            for z in range(F.fiber1[p].n_objects):
                c = F.gamma1(t, d, z)
                m = B1.src(t)
                if F.left(m).arr(c) != F.gamma0(B.src.arr(t), B.src.arr(d), F.left(p).obj(z)) or \
                        F.right(m).arr(c) != F.gamma0(B.tgt.arr(t), B.tgt.arr(d), F.right(p).obj(z)):
                    return Report.failing(check, {"cells": [B1.arrows[t], B1.arrows[d]]})
    return Report.passing(check)


def _globular(F: IndexedDoubleCategory, m: int, c: int) -> bool:
    return F.fiber0[F.base.src.obj(m)].is_identity(F.left(m).arr(c)) \
        and F.fiber0[F.base.tgt.obj(m)].is_identity(F.right(m).arr(c))


def _laxity(F: IndexedDoubleCategory) -> Report:
    """Globular laxity functors, natural in cells through laxity_iso"""
    check = "laxity"
    B = F.base
    B1 = B.E1
    for m, n in B.composable_pairs():
        pb = F.pair_pullback(m, n)
        phi = F.laxity[(m, n)]
        mn = B.tensor_obj(m, n)
        if phi.then(F.left(mn)) != pb.left.then(F.left(m)) or phi.then(F.right(mn)) != pb.right.then(F.right(n)):
            return Report.failing(check, {"reason": "laxity legs", "pair": [B1.objects[m], B1.objects[n]]})
    count = 0
    for t, d in B.composable_arrow_pairs():
        m, n, p, q = B1.src(t), B1.tgt(t), B1.src(d), B1.tgt(d)
        pb_nq, pb_mp = F.pair_pullback(n, q), F.pair_pullback(m, p)
        mp = B.tensor_obj(m, p)
        source = pullback_map(pb_nq, pb_mp, F.reindex1[t], F.reindex1[d]).then(F.laxity[(m, p)])
        target = F.laxity[(n, q)].then(F.reindex1[B.tensor_arr(t, d)])
        components = [F.lax_iso(t, d, pb_nq.left.obj(i), pb_nq.right.obj(i)) for i in range(pb_nq.category.n_objects)]
        count += len(components)
        failure = _comparison(check, source, target, components, [B1.arrows[t], B1.arrows[d]])
        if failure is not None:
            return failure
        if not all(_globular(F, mp, c) for c in components):
            return Report.failing(check, {"reason": "laxity comparison is not globular",
                                          "cells": [B1.arrows[t], B1.arrows[d]]})
        if B1.is_identity(t) and B1.is_identity(d) and not all(F.fiber1[mp].is_identity(c) for c in components):
            return Report.failing(check, {"reason": "laxity comparison at identity cells",
                                          "cells": [B1.arrows[t], B1.arrows[d]]})
    return Report.passing(check, stats={"laxity_components": count})


def _unit_naturality(F: IndexedDoubleCategory) -> Report:
    check = "unit_naturality"
    B = F.base
    B0 = B.E0
    for f in range(B0.n_arrows):
        c, d = B0.src(f), B0.tgt(f)
        yc = B.unit_obj(c)
        source = F.reindex0[f].then(F.unit[c])
        target = F.unit[d].then(F.reindex1[B.unit_arr(f)])
        components = [F.unit_iso_at(f, y) for y in range(F.fiber0[d].n_objects)]
        failure = _comparison(check, source, target, components, B0.arrows[f])
        if failure is not None:
            return failure
        if not all(_globular(F, yc, k) for k in components):
            return Report.failing(check, {"reason": "unit comparison is not globular", "arrow": B0.arrows[f]})
        if B0.is_identity(f) and not all(F.fiber1[yc].is_identity(k) for k in components):
            return Report.failing(check, {"reason": "unit comparison at an identity", "arrow": B0.arrows[f]})
    return Report.passing(check)


def _unit_coherence(F: IndexedDoubleCategory) -> Report:
    """Unit comparisons cancel the laxity comparison against units, on both sides"""
    check = "unit_coherence"
    B = F.base
    B0, B1 = B.E0, B.E1
    try:
        for d in range(B1.n_arrows):
            p, q = B1.src(d), B1.tgt(d)
            Fp = F.fiber1[p]
            f, g = B.src.arr(d), B.tgt.arr(d)
            yf, yg = B.unit_arr(f), B.unit_arr(g)
            yc, yc2 = B.unit_obj(B0.src(f)), B.unit_obj(B0.src(g))
            for z in range(F.fiber1[q].n_objects):
                dz = F.reindex1[d].obj(z)
                x, w = F.left(q).obj(z), F.right(q).obj(z)
                left = Fp.compose(F.lax_iso(yf, d, F.unit[B0.tgt(f)].obj(x), z),
                                  F.phi_arr(yc, p, F.unit_iso_at(f, x), Fp.identity(dz)))
                right = Fp.compose(F.lax_iso(d, yg, z, F.unit[B0.tgt(g)].obj(w)),
                                   F.phi_arr(p, yc2, Fp.identity(dz), F.unit_iso_at(g, w)))
                if not (Fp.is_identity(left) and Fp.is_identity(right)):
                    return Report.failing(check, {"cell": B1.arrows[d], "object": F.fiber1[q].objects[z]})
    except (CompositionError, SchemaError) as e:
        return Report.failing(check, {"reason": str(e)})
    return Report.passing(check)


def _triples(F: IndexedDoubleCategory, m: int, n: int, p: int) -> Iterator[Tuple[int, int, int]]:
    pb = F.pair_pullback(m, n)
    Fp = F.fiber1[p]
    for i in range(pb.category.n_objects):
        x, y = pb.left.obj(i), pb.right.obj(i)
        middle = F.right(n).obj(y)
        for z in range(Fp.n_objects):
            if F.left(p).obj(z) == middle:
                yield x, y, z


def _associativity(F: IndexedDoubleCategory) -> Report:
    """Typing, invertibility, naturality, unit normalization and the pentagon for Phi"""
    check = "associativity"
    B = F.base
    B1 = B.E1
    count = 0
    try:
        for m, n, p in B.composable_triples():
            mn, np_ = B.tensor_obj(m, n), B.tensor_obj(n, p)
            mnp = B.tensor_obj(mn, p)
            Fmnp = F.fiber1[mnp]
            units = B.is_unit(m) or B.is_unit(n) or B.is_unit(p)
            for x, y, z in _triples(F, m, n, p):
                count += 1
                c = F.assoc(m, n, p, x, y, z)
                source = F.phi_obj(mn, p, F.phi_obj(m, n, x, y), z)
                target = F.phi_obj(m, np_, x, F.phi_obj(n, p, y, z))
                if Fmnp.src(c) != source or Fmnp.tgt(c) != target or not Fmnp.is_isomorphism(c) \
                        or not _globular(F, mnp, c):
                    return Report.failing(check, {"reason": "component",
                                                  "proarrows": [B1.objects[k] for k in (m, n, p)]})
                if units and not Fmnp.is_identity(c):
                    return Report.failing(check, {"reason": "unit argument",
                                                  "proarrows": [B1.objects[k] for k in (m, n, p)]})
            pb = F.pair_pullback(m, n)
            for k in range(pb.category.n_arrows):
                a, b = pb.left.arr(k), pb.right.arr(k)
                mid = F.right(n).arr(b)
                for cc in range(F.fiber1[p].n_arrows):
                    if F.left(p).arr(cc) != mid:
                        continue
                    s = (F.fiber1[m].src(a), F.fiber1[n].src(b), F.fiber1[p].src(cc))
                    t = (F.fiber1[m].tgt(a), F.fiber1[n].tgt(b), F.fiber1[p].tgt(cc))
                    lhs = Fmnp.compose(F.assoc(m, n, p, *t), F.phi_arr(mn, p, F.phi_arr(m, n, a, b), cc))
                    rhs = Fmnp.compose(F.phi_arr(m, np_, a, F.phi_arr(n, p, b, cc)), F.assoc(m, n, p, *s))
                    if lhs != rhs:
                        return Report.failing(check, {"reason": "naturality",
                                                      "proarrows": [B1.objects[j] for j in (m, n, p)]})
        for m, n, p, q in B.composable_quadruples():
            mn, np_, pq = B.tensor_obj(m, n), B.tensor_obj(n, p), B.tensor_obj(p, q)
            npq = B.tensor_obj(np_, q)
            whole = F.fiber1[B.tensor_obj(mn, pq)]
            for x, y, z in _triples(F, m, n, p):
                for w in range(F.fiber1[q].n_objects):
                    if F.left(q).obj(w) != F.right(p).obj(z):
                        continue
                    xy, yz, zw = F.phi_obj(m, n, x, y), F.phi_obj(n, p, y, z), F.phi_obj(p, q, z, w)
                    lhs = whole.compose(F.assoc(m, n, pq, x, y, zw), F.assoc(mn, p, q, xy, z, w))
                    first = F.phi_arr(B.tensor_obj(mn, p), q, F.assoc(m, n, p, x, y, z), F.fiber1[q].identity(w))
                    middle = F.assoc(m, np_, q, x, yz, w)
                    last = F.phi_arr(m, npq, F.fiber1[m].identity(x), F.assoc(n, p, q, y, z, w))
                    if lhs != whole.compose_path(last, middle, first):
                        return Report.failing(check, {"reason": "pentagon",
                                                      "proarrows": [B1.objects[j] for j in (m, n, p, q)]})
        for t1, t2, t3 in B.composable_arrow_triples():
            m, n, p = B1.src(t1), B1.src(t2), B1.src(t3)
            m2, n2, p2 = B1.tgt(t1), B1.tgt(t2), B1.tgt(t3)
            t12, t23 = B.tensor_arr(t1, t2), B.tensor_arr(t2, t3)
            t123 = B.tensor_arr(t12, t3)
            np_, mn = B.tensor_obj(n, p), B.tensor_obj(m, n)
            Fmnp = F.fiber1[B.tensor_obj(mn, p)]
            for x2, y2, z2 in _triples(F, m2, n2, p2):
                x, y, z = F.reindex1[t1].obj(x2), F.reindex1[t2].obj(y2), F.reindex1[t3].obj(z2)
                yz2, xy2 = F.phi_obj(n2, p2, y2, z2), F.phi_obj(m2, n2, x2, y2)
                path_a = Fmnp.compose_path(
                    F.lax_iso(t1, t23, x2, yz2),
                    F.phi_arr(m, np_, F.fiber1[m].identity(x), F.lax_iso(t2, t3, y2, z2)),
                    F.assoc(m, n, p, x, y, z))
                path_b = Fmnp.compose_path(
                    F.reindex1[t123].arr(F.assoc(m2, n2, p2, x2, y2, z2)),
                    F.lax_iso(t12, t3, xy2, z2),
                    F.phi_arr(mn, p, F.lax_iso(t1, t2, x2, y2), F.fiber1[p].identity(z)))
                if path_a != path_b:
                    return Report.failing(check, {"reason": "modification",
                                                  "cells": [B1.arrows[t] for t in (t1, t2, t3)]})
    except (CompositionError, SchemaError) as e:
        return Report.failing(check, {"reason": str(e)})
    return Report.passing(check, stats={"associativity_components": count})


def validate_indexed(F: IndexedDoubleCategory) -> Report:
    """Well-definition, globularity, unit coherence and composition coherence"""
    check = "validate_indexed"
    if not F.base.is_strict():
        return Report.failing(check, {"reason": "indexed data needs a strict base"})
    steps = [
        _typing, _normalization, _span_morphisms,
        lambda G: _pseudo_functor("reindexing0", G.base.E0, G.fiber0, G.reindex0, G.gamma0),
        lambda G: _pseudo_functor("reindexing1", G.base.E1, G.fiber1, G.reindex1, G.gamma1),
        _cell_comparisons_over_arrows, _laxity, _unit_naturality, _unit_coherence, _associativity,
    ]
    subreports = []
    for step in steps:
        report = step(F)
        subreports.append(report)
        if not report.passed:
            break
    result = combine(check, subreports)
    logger.info("indexed double category %s: %s", F.name or "?", result.status.value)
    return result


# elements -----------------------------------------------------------------------

class _Level(NamedTuple):
    category: FinCategory
    projection: Functor
    objects: List[Pair]
    arrows: List[Tuple[int, int, int]]
    oid: Dict[Pair, int]
    aid: Dict[Tuple[int, int, int], int]


def _grothendieck(C: FinCategory, fibers: Sequence[FinCategory], reindex: Sequence[Functor],
                  gamma: Callable[[int, int, int], int], insert: bool, name: str) -> _Level:
    """Objects (c, x); arrows (f, y, fbar) with fbar: x -> f* y"""
    objects = [(c, x) for c in range(C.n_objects) for x in range(fibers[c].n_objects)]
    oid = {pair: i for i, pair in enumerate(objects)}
    arrows: List[Tuple[int, int, int]] = []
    for f in range(C.n_arrows):
        Fc = fibers[C.src(f)]
        for y in range(fibers[C.tgt(f)].n_objects):
            for fbar in Fc.arrows_into(reindex[f].obj(y)):
                arrows.append((f, y, fbar))
    aid = {arrow: k for k, arrow in enumerate(arrows)}

    def compose(k2: int, k1: int) -> int:
        g, z, gbar = arrows[k2]
        f, _, fbar = arrows[k1]
        Fa = fibers[C.src(f)]
        step = Fa.compose(reindex[f].arr(gbar), fbar)
        if insert:
            step = Fa.compose(gamma(f, g, z), step)
        return aid[(int(C.table[g, f]), z, step)]

    category = FinCategory.from_ids(
        [(C.objects[c], fibers[c].objects[x]) for c, x in objects],
        [(C.arrows[f], fibers[C.tgt(f)].objects[y], fibers[C.src(f)].arrows[fbar]) for f, y, fbar in arrows],
        [oid[(C.src(f), fibers[C.src(f)].src(fbar))] for f, _, fbar in arrows],
        [oid[(C.tgt(f), y)] for f, y, _ in arrows],
        [aid[(C.identity(c), x, fibers[c].identity(x))] for c, x in objects],
        compose, name=name)
    projection = Functor(category, C, [c for c, _ in objects], [f for f, _, _ in arrows], name="Pi")
    return _Level(category, projection, objects, arrows, oid, aid)


class Elements(NamedTuple):
    """El(F), the projection to the base and its canonical double cleavage"""
    double: PseudoDoubleCategory
    projection: DoubleFunctor
    cleavage: DoubleCleavage


def _build_elements(F: IndexedDoubleCategory, insert: bool) -> Elements:
    B = F.base
    B0, B1 = B.E0, B.E1
    level0 = _grothendieck(B0, F.fiber0, F.reindex0, F.gamma0, insert, f"El({F.name})0")
    level1 = _grothendieck(B1, F.fiber1, F.reindex1, F.gamma1, insert, f"El({F.name})1")
    E0, E1 = level0.category, level1.category

    def leg(side: int) -> Functor:
        base_leg = B.src if side == 0 else B.tgt

        def on_object(i: int) -> int:
            m, x = level1.objects[i]
            return level0.oid[(base_leg.obj(m), F.legs[m][side].obj(x))]

        def on_arrow(k: int) -> int:
            t, n_bar, t_bar = level1.arrows[k]
            m, n = B1.src(t), B1.tgt(t)
            return level0.aid[(base_leg.arr(t), F.legs[n][side].obj(n_bar), F.legs[m][side].arr(t_bar))]

        return Functor.from_functions(E1, E0, on_object, on_arrow, name="src" if side == 0 else "tgt")

    def unit_arrow(k: int) -> int:
        f, y, f_bar = level0.arrows[k]
        c, d = B0.src(f), B0.tgt(f)
        step = F.unit[c].arr(f_bar)
        if insert:
            step = F.fiber1[B.unit_obj(c)].compose(F.unit_iso_at(f, y), step)
        return level1.aid[(B.unit_arr(f), F.unit[d].obj(y), step)]

    unit = Functor.from_functions(
        E0, E1, lambda i: level1.oid[(B.unit_obj(level0.objects[i][0]),
                                      F.unit[level0.objects[i][0]].obj(level0.objects[i][1]))],
        unit_arrow, name="y")

    def tensor_obj(i: int, j: int) -> int:
        (m, x), (n, z) = level1.objects[i], level1.objects[j]
        return level1.oid[(B.tensor_obj(m, n), F.phi_obj(m, n, x, z))]

    def tensor_arr(k: int, l: int) -> int:
        t, n_bar, t_bar = level1.arrows[k]
        d, q_bar, d_bar = level1.arrows[l]
        m, n, p, q = B1.src(t), B1.tgt(t), B1.src(d), B1.tgt(d)
        step = F.phi_arr(m, p, t_bar, d_bar)
        if insert:
            step = F.fiber1[B.tensor_obj(m, p)].compose(F.lax_iso(t, d, n_bar, q_bar), step)
        return level1.aid[(B.tensor_arr(t, d), F.phi_obj(n, q, n_bar, q_bar), step)]

    def associator(i: int, j: int, k: int) -> int:
        (m, x), (n, y), (p, z) = level1.objects[i], level1.objects[j], level1.objects[k]
        np_ = B.tensor_obj(n, p)
        mnp = B.tensor_obj(m, np_)
        target = F.phi_obj(m, np_, x, F.phi_obj(n, p, y, z))
        return level1.aid[(B1.identity(mnp), target, F.assoc(m, n, p, x, y, z))]

    D = make_double_category(E0, E1, leg(0), leg(1), unit, tensor_obj, tensor_arr,
                             associator if insert else None, name=f"El({F.name})")
    projection = DoubleFunctor(D, B, level0.projection, level1.projection, name="Pi")
    cleavage0 = {(u, e): level0.aid[(u, level0.objects[e][1],
                                     F.fiber0[B0.src(u)].identity(F.reindex0[u].obj(level0.objects[e][1])))]
                 for u, e in lift_pairs(level0.projection)}
    cleavage1 = {(t, e): level1.aid[(t, level1.objects[e][1],
                                     F.fiber1[B1.src(t)].identity(F.reindex1[t].obj(level1.objects[e][1])))]
                 for t, e in lift_pairs(level1.projection)}
    cleavage = DoubleCleavage(ClovenFibration(level0.projection, cleavage0, name="c0"),
                              ClovenFibration(level1.projection, cleavage1, name="c1"))
    logger.debug("El(%s): %d objects, %d proarrows, %d cells", F.name or "?", E0.n_objects, E1.n_objects,
                 E1.n_arrows)
    return Elements(D, projection, cleavage)


def elements_construction(F: IndexedDoubleCategory) -> Elements:
    """El(F) with the structure comparisons inserted into composites"""
    if not F.base.is_strict():
        raise PreconditionError("elements construction needs a strict base")
    return _build_elements(F, insert=True)


def elements_locally_discrete(F: IndexedDoubleCategory) -> Elements:
    """El(F) when every comparison is an identity"""
    if not F.is_locally_discrete():
        raise PreconditionError(f"{F.name or 'indexed double category'} has non-identity comparisons")
    if not F.base.is_strict():
        raise PreconditionError("elements construction needs a strict base")
    return _build_elements(F, insert=False)


# fibers -----------------------------------------------------------------------------

def _reindexing(c: ClovenFibration, u: int, source: FinCategory, target: FinCategory) -> Functor:
    """u*: fiber over tgt u -> fiber over src u, by chosen lifts and factoring"""
    E, base = c.total, c.base
    ident = base.identity(base.src(u))
    objects, arrows = [], []
    for y in range(source.n_objects):
        e = E.object_index(source.objects[y])
        objects.append(target.object_index(E.objects[E.src(c.lift(u, e))]))
    for a in range(source.n_arrows):
        k = E.arrow_index(source.arrows[a])
        moved = E.compose(k, c.lift(u, E.src(k)))
        arrows.append(target.arrow_index(E.arrows[c.factor(u, E.tgt(k), moved, ident)]))
    return Functor(source, target, objects, arrows, name=f"{base.arrows[u]}*")


def _comparisons(c: ClovenFibration, fibers: Sequence[FinCategory]) -> Dict[Tuple[int, int, int], int]:
    """Non-identity f* g* z -> (g f)* z from lift uniqueness"""
    E, base = c.total, c.base
    out = {}
    for f in range(base.n_arrows):
        ident = base.identity(base.src(f))
        for g in base.arrows_out_of(base.tgt(f)):
            gf = int(base.table[g, f])
            fibre = fibers[base.tgt(g)]
            for z in range(fibre.n_objects):
                e = E.object_index(fibre.objects[z])
                g_lift = c.lift(g, e)
                k = c.factor(gf, e, E.compose(g_lift, c.lift(f, E.src(g_lift))), ident)
                if not E.is_identity(k):
                    out[(f, g, z)] = fibers[base.src(f)].arrow_index(E.arrows[k])
    return out


def fibers_construction(P: DoubleFunctor, cleavage: DoubleCleavage, name: str = "") -> IndexedDoubleCategory:
    """Fibers of P0 and P1 with reindexing, laxity and comparisons read off the cleavage"""
    P.require_strict()
    E, B = P.dom, P.cod
    if not B.is_strict():
        raise PreconditionError("fibers construction needs a strict base")
    B0, B1 = B.E0, B.E1
    c0 = normalize_cleavage(cleavage.cleavage0)
    c1 = normalize_cleavage(cleavage.cleavage1)
    fiber0 = [fiber_category(P.F0, c, name=f"F({B0.objects[c]})")[0] for c in range(B0.n_objects)]
    fiber1 = [fiber_category(P.F1, m, name=f"F({B1.objects[m]})")[0] for m in range(B1.n_objects)]
    reindex0 = [_reindexing(c0, f, fiber0[B0.tgt(f)], fiber0[B0.src(f)]) for f in range(B0.n_arrows)]
    reindex1 = [_reindexing(c1, t, fiber1[B1.tgt(t)], fiber1[B1.src(t)]) for t in range(B1.n_arrows)]
    legs = [(E.src.restrict(fiber1[m], fiber0[B.src.obj(m)], name="L"),
             E.tgt.restrict(fiber1[m], fiber0[B.tgt.obj(m)], name="R")) for m in range(B1.n_objects)]
    unit = [E.unit.restrict(fiber0[c], fiber1[B.unit_obj(c)], name="iota") for c in range(B0.n_objects)]
    E0, E1 = E.E0, E.E1

    laxity = {}
    for m, n in B.composable_pairs():
        pb = pullback_category(legs[m][1], legs[n][0])
        laxity[(m, n)] = Functor.by_labels(
            pb.category, fiber1[B.tensor_obj(m, n)],
            lambda pair: E1.objects[E.tensor_obj(E1.object_index(pair[0]), E1.object_index(pair[1]))],
            lambda pair: E1.arrows[E.tensor_arr(E1.arrow_index(pair[0]), E1.arrow_index(pair[1]))],
            name="phi")

    laxity_iso = {}
    for t, d in B.composable_arrow_pairs():
        n, q = B1.tgt(t), B1.tgt(d)
        mp = B.tensor_obj(B1.src(t), B1.src(d))
        td = B.tensor_arr(t, d)
        pb = pullback_category(legs[n][1], legs[q][0])
        for i in range(pb.category.n_objects):
            x, y = pb.left.obj(i), pb.right.obj(i)
            X, Y = E1.object_index(fiber1[n].objects[x]), E1.object_index(fiber1[q].objects[y])
            moved = E.tensor_arr(c1.lift(t, X), c1.lift(d, Y))
            k = c1.factor(td, E.tensor_obj(X, Y), moved, B1.identity(mp))
            if not E1.is_identity(k):
                laxity_iso[(t, d, x, y)] = fiber1[mp].arrow_index(E1.arrows[k])

    unit_iso = {}
    for f in range(B0.n_arrows):
        c, dd = B0.src(f), B0.tgt(f)
        yc = B.unit_obj(c)
        for y in range(fiber0[dd].n_objects):
            Y = E0.object_index(fiber0[dd].objects[y])
            k = c1.factor(B.unit_arr(f), E.unit_obj(Y), E.unit_arr(c0.lift(f, Y)), B1.identity(yc))
            if not E1.is_identity(k):
                unit_iso[(f, y)] = fiber1[yc].arrow_index(E1.arrows[k])

    F = IndexedDoubleCategory(B, fiber0, reindex0, fiber1, legs, reindex1, laxity, unit,
                              comp0=_comparisons(c0, fiber0), comp1=_comparisons(c1, fiber1),
                              laxity_iso=laxity_iso, unit_iso=unit_iso, name=name or f"fibers({P.name})")
    associativity = {}
    for m, n, p in B.composable_triples():
        mnp = B.tensor_obj(B.tensor_obj(m, n), p)
        for x, y, z in _triples(F, m, n, p):
            X, Y, Z = (E1.object_index(F.fiber1[k].objects[v]) for k, v in ((m, x), (n, y), (p, z)))
            a = E.associator(X, Y, Z)
            if not E1.is_identity(a):
                associativity[(m, n, p, x, y, z)] = fiber1[mnp].arrow_index(E1.arrows[a])
    F.associativity = associativity
    logger.debug("fibers of %s: %d comparison components", P.name or "?",
                 len(F.comp0) + len(F.comp1) + len(laxity_iso) + len(unit_iso) + len(associativity))
    return F


# morphisms and comparison -------------------------------------------------------------

class IndexedMorphism:
    """tau: F => G H over a strict base double functor H, with laxity and unit modifications"""

    def __init__(self, source: IndexedDoubleCategory, target: IndexedDoubleCategory, base_map: DoubleFunctor,
                 tau0: Sequence[Functor], tau1: Sequence[Functor],
                 multiplicativity: Optional[Dict[Tuple[int, int, int], int]] = None,
                 unitality: Optional[Dict[Tuple[int, int], int]] = None, name: str = ""):
        self.source = source
        self.target = target
        self.base_map = base_map
        self.tau0 = list(tau0)
        self.tau1 = list(tau1)
        self.multiplicativity = dict(multiplicativity or {})
        self.unitality = dict(unitality or {})
        self.name = name

    @classmethod
    def identity(cls, F: IndexedDoubleCategory) -> "IndexedMorphism":
        return cls(F, F, DoubleFunctor.identity(F.base),
                   [Functor.identity(C) for C in F.fiber0], [Functor.identity(C) for C in F.fiber1], name="1")

    def t_component(self, m: int, n: int, i: int) -> int:
        """phi_G(tau x, tau y) -> tau phi_F(x, y) at pullback object i"""
        if (m, n, i) in self.multiplicativity:
            return self.multiplicativity[(m, n, i)]
        F, H = self.source, self.base_map
        mn = F.base.tensor_obj(m, n)
        target = self.tau1[mn].obj(F.laxity[(m, n)].obj(i))
        return self.target.fiber1[H.F1.obj(mn)].identity(target)

    def i_component(self, c: int, x: int) -> int:
        """iota_G(tau x) -> tau iota_F(x)"""
        if (c, x) in self.unitality:
            return self.unitality[(c, x)]
        yc = self.source.base.unit_obj(c)
        target = self.tau1[yc].obj(self.source.unit[c].obj(x))
        return self.target.fiber1[self.base_map.F1.obj(yc)].identity(target)


def validate_indexed_morphism(tau: IndexedMorphism) -> Report:
    """Typing, strict naturality in reindexing and legs, multiplicativity and unitality"""
    check = "validate_indexed_morphism"
    F, G, H = tau.source, tau.target, tau.base_map
    H.require_strict()
    B = F.base
    B0, B1 = B.E0, B.E1
    for c in range(B0.n_objects):
        t = tau.tau0[c]
        if t.dom != F.fiber0[c] or t.cod != G.fiber0[H.F0.obj(c)]:
            return Report.failing(check, {"reason": "typing", "object": B0.objects[c]})
    for m in range(B1.n_objects):
        t = tau.tau1[m]
        if t.dom != F.fiber1[m] or t.cod != G.fiber1[H.F1.obj(m)]:
            return Report.failing(check, {"reason": "typing", "proarrow": B1.objects[m]})
        hm = H.F1.obj(m)
        if t.then(G.left(hm)) != F.left(m).then(tau.tau0[B.src.obj(m)]) or \
                t.then(G.right(hm)) != F.right(m).then(tau.tau0[B.tgt.obj(m)]):
            return Report.failing(check, {"reason": "legs", "proarrow": B1.objects[m]})
    for f in range(B0.n_arrows):
        if tau.tau0[B0.tgt(f)].then(G.reindex0[H.F0.arr(f)]) != F.reindex0[f].then(tau.tau0[B0.src(f)]):
            return Report.failing(check, {"reason": "naturality", "arrow": B0.arrows[f]})
    for t in range(B1.n_arrows):
        if tau.tau1[B1.tgt(t)].then(G.reindex1[H.F1.arr(t)]) != F.reindex1[t].then(tau.tau1[B1.src(t)]):
            return Report.failing(check, {"reason": "naturality", "cell": B1.arrows[t]})
    for m, n in B.composable_pairs():
        pb_f = F.pair_pullback(m, n)
        pb_g = G.pair_pullback(H.F1.obj(m), H.F1.obj(n))
        mn = B.tensor_obj(m, n)
        source = pullback_map(pb_f, pb_g, tau.tau1[m], tau.tau1[n]).then(G.laxity[(H.F1.obj(m), H.F1.obj(n))])
        target = F.laxity[(m, n)].then(tau.tau1[mn])
        components = [tau.t_component(m, n, i) for i in range(pb_f.category.n_objects)]
        try:
            report = validate_transformation(NatTransformation(source, target, components))
        except SchemaError as e:
            return Report.failing(check, {"reason": str(e)})
        if not report.passed:
            return Report.failing(check, {"reason": "multiplicativity", "pair": [B1.objects[m], B1.objects[n]],
                                          "detail": report.counterexample})
    for c in range(B0.n_objects):
        yc = B.unit_obj(c)
        source = tau.tau0[c].then(G.unit[H.F0.obj(c)])
        target = F.unit[c].then(tau.tau1[yc])
        components = [tau.i_component(c, x) for x in range(F.fiber0[c].n_objects)]
        report = validate_transformation(NatTransformation(source, target, components))
        if not report.passed:
            return Report.failing(check, {"reason": "unitality", "object": B0.objects[c],
                                          "detail": report.counterexample})
    return Report.passing(check)


def _first_iso(C: FinCategory, x: int, y: int) -> Optional[int]:
    if x == y:
        return C.identity(x)
    return next((a for a in C.hom(x, y) if C.is_isomorphism(a)), None)


def _comparison_cells(F: IndexedDoubleCategory, G: IndexedDoubleCategory, tau0: Sequence[Functor],
                      tau1: Sequence[Functor]) -> Optional[Tuple[Dict[Tuple[int, int, int], int],
                                                                Dict[Tuple[int, int], int]]]:
    """Multiplicativity and unitality cells for a fiberwise family, None if an endpoint pair is not isomorphic"""
    B = F.base
    multiplicativity: Dict[Tuple[int, int, int], int] = {}
    for m, n in B.composable_pairs():
        pb_f = F.pair_pullback(m, n)
        mn = B.tensor_obj(m, n)
        source = pullback_map(pb_f, G.pair_pullback(m, n), tau1[m], tau1[n]).then(G.laxity[(m, n)])
        target = F.laxity[(m, n)].then(tau1[mn])
        for i in range(pb_f.category.n_objects):
            a = _first_iso(G.fiber1[mn], source.obj(i), target.obj(i))
            if a is None:
                return None
            multiplicativity[(m, n, i)] = a
    unitality: Dict[Tuple[int, int], int] = {}
    for c in range(B.E0.n_objects):
        yc = B.unit_obj(c)
        source = tau0[c].then(G.unit[c])
        target = F.unit[c].then(tau1[yc])
        for x in range(F.fiber0[c].n_objects):
            a = _first_iso(G.fiber1[yc], source.obj(x), target.obj(x))
            if a is None:
                return None
            unitality[(c, x)] = a
    return multiplicativity, unitality


def compare_indexed(F: IndexedDoubleCategory, G: IndexedDoubleCategory, bound: Optional[int] = None) -> Report:
    """An isomorphism F = G of indexed double categories over the identity of the base

    Fiber isomorphisms are searched object by object, then proarrow by
    proarrow, commuting with the legs and on the nose with reindexing. The
    multiplicativity and unitality cells are the first isomorphisms between
    the objects they connect, and every candidate family must pass
    validate_indexed_morphism.
    """
    check = "compare_indexed"
    if F.base.E0 != G.base.E0 or F.base.E1 != G.base.E1:
        raise PreconditionError("indexed double categories live over different bases")
    budget = SearchBudget(limit=bound)
    B = F.base
    B0, B1 = B.E0, B.E1
    count = B0.n_objects + B1.n_objects
    parts = [("object", B0.objects, F.fiber0, G.fiber0), ("proarrow", B1.objects, F.fiber1, G.fiber1)]
    for kind, labels, mine, theirs in parts:
        for i, (a, b) in enumerate(zip(mine, theirs)):
            if find_isomorphism(a, b, budget=budget) is None:
                if budget.exhausted:
                    return Report.inconclusive(check, notes=["search bound reached"])
                return Report.failing(check, {kind: labels[i], "sizes": [[a.n_objects, a.n_arrows],
                                                                         [b.n_objects, b.n_arrows]]})

    slots = [(0, c) for c in range(B0.n_objects)] + [(1, m) for m in range(B1.n_objects)]
    arrows_at = [[f for f in range(B0.n_arrows) if max(B0.src(f), B0.tgt(f)) == c] for c in range(B0.n_objects)]
    cells_at = [[t for t in range(B1.n_arrows) if max(B1.src(t), B1.tgt(t)) == m] for m in range(B1.n_objects)]
    tau0: List[Optional[Functor]] = [None] * B0.n_objects
    tau1: List[Optional[Functor]] = [None] * B1.n_objects
    base_map = DoubleFunctor.identity(B)
    deepest = -1

    def candidates(level: int, i: int) -> Iterator[Functor]:
        if level == 0:
            return isomorphisms(F.fiber0[i], G.fiber0[i], budget=budget)
        s, t = tau0[B.src.obj(i)], tau0[B.tgt.obj(i)]
        lf, rf, lg, rg = F.left(i), F.right(i), G.left(i), G.right(i)
        C = G.fiber1[i]

        def objects(x: int) -> List[int]:
            return [y for y in range(C.n_objects)
                    if lg.obj(y) == s.obj(lf.obj(x)) and rg.obj(y) == t.obj(rf.obj(x))]

        def arrows(a: int, x: int, y: int) -> List[int]:
            return [b for b in C.hom(x, y) if lg.arr(b) == s.arr(lf.arr(a)) and rg.arr(b) == t.arr(rf.arr(a))]

        return isomorphisms(F.fiber1[i], C, objects, arrows, budget=budget)

    def natural(level: int, i: int) -> bool:
        if level == 0:
            return all(tau0[B0.tgt(f)].then(G.reindex0[f]) == F.reindex0[f].then(tau0[B0.src(f)])
                       for f in arrows_at[i])
        return all(tau1[B1.tgt(t)].then(G.reindex1[t]) == F.reindex1[t].then(tau1[B1.src(t)])
                   for t in cells_at[i])

    def extend(k: int) -> Optional[IndexedMorphism]:
        nonlocal deepest
        if k == len(slots):
            cells = _comparison_cells(F, G, tau0, tau1)
            if cells is None:
                return None
            tau = IndexedMorphism(F, G, base_map, tau0, tau1, *cells, name="tau")
            return tau if validate_indexed_morphism(tau).passed else None
        level, i = slots[k]
        for candidate in candidates(level, i):
            if not budget.tick():
                return None
            (tau0 if level == 0 else tau1)[i] = candidate
            if natural(level, i):
                found = extend(k + 1)
                if found is not None:
                    return found
            if budget.exhausted:
                return None
        deepest = max(deepest, k)
        return None

    tau = extend(0)
    if tau is not None:
        logger.debug("indexed isomorphism over %s found after %d nodes", B.name or "base", budget.spent)
        return Report.passing(check, witness={"isomorphisms": count}, stats={"isomorphisms": count,
                                                                           "nodes": budget.spent})
    if budget.exhausted:
        return Report.inconclusive(check, stats={"nodes": budget.spent}, notes=["search bound reached"])
    level, i = slots[max(deepest, 0)]
    where = {"object": B0.objects[i]} if level == 0 else {"proarrow": B1.objects[i]}
    return Report.failing(check, {**where, "reason": "no fiber isomorphisms commute with legs, reindexing and laxity"},
                          stats={"nodes": budget.spent})
