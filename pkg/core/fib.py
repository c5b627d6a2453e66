"""
Fibrations - Cartesian Lifts and Cleavages
==========================================
Cartesian arrows, cloven fibrations, morphisms of fibrations and pullbacks
of cloven fibrations with a pointwise cleavage.

Features:
- Exhaustive Cartesianness check (strong form) with a cached per-arrow verdict
- The SGA1 form (bijection of vertical and over-the-image hom sets)
- Deterministic cleavages: least arrow id among the Cartesian lifts
- Split / normalized cleavages, vertical comparison isos
- Fibration squares: Cartesian- and cleavage-preservation
- Pullbacks of cloven fibrations with the pairwise cleavage

Opfibration checks run the fibration checks on opposite categories.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from api.models.report_models import Report, combine
from core.errors import NotAFibration, PreconditionError, SchemaError
from core.fincat import FinCategory, Functor, Pullback, pullback_category

logger = logging.getLogger(__name__)

LiftKey = Tuple[int, int]


def _check_arrow(p: Functor, f: int) -> None:
    if not 0 <= f < p.dom.n_arrows:
        raise SchemaError(f"arrow id {f} is not in {p.dom.name or 'the total category'}")


def _cartesian_obstruction(p: Functor, f: int) -> Optional[Dict]:
    """None if f is Cartesian, else the offending (g, h) with its lift count"""
    key = ("cartesian", f)
    if key in p._cache:
        return p._cache[key]
    E, B = p.dom, p.cod
    ET, BT = E.table, B.table
    X, Y = E.src(f), E.tgt(f)
    pf, pX = p.arr(f), p.obj(X)
    obstruction = None
    for Z in range(E.n_objects):
        counts = Counter((int(ET[f, k]), p.arr(k)) for k in E.hom(Z, X))
        base = [h for h in B.hom(p.obj(Z), pX)]
        for g in E.hom(Z, Y):
            pg = p.arr(g)
            for h in base:
                if BT[pf, h] != pg:
                    continue
                count = counts.get((g, h), 0)
                if count != 1:
                    obstruction = {"arrow": E.arrows[f], "g": E.arrows[g], "h": B.arrows[h], "lifts": count}
                    break
            if obstruction:
                break
        if obstruction:
            break
    p._cache[key] = obstruction
    return obstruction


def cartesian(p: Functor, f: int) -> bool:
    """Cached boolean form of is_cartesian"""
    return _cartesian_obstruction(p, f) is None


def is_cartesian(p: Functor, f: int) -> Report:
    """Every g into tgt f factors uniquely through f over every compatible base arrow"""
    _check_arrow(p, f)
    obstruction = _cartesian_obstruction(p, f)
    if obstruction is None:
        return Report.passing("is_cartesian", witness={"arrow": p.dom.arrows[f]})
    return Report.failing("is_cartesian", obstruction)


def is_cartesian_sga1(p: Functor, f: int) -> Report:
    """Composition with f is a bijection from vertical arrows Z -> src f to arrows Z -> tgt f over pf"""
    _check_arrow(p, f)
    E, B = p.dom, p.cod
    X, Y = E.src(f), E.tgt(f)
    pf = p.arr(f)
    vertical = B.identity(p.obj(X))
    for Z in p.fiber_over_object(p.obj(X)):
        composites = [int(E.table[f, k]) for k in E.hom(Z, X) if p.arr(k) == vertical]
        over = {g for g in E.hom(Z, Y) if p.arr(g) == pf}
        if len(set(composites)) != len(composites) or set(composites) != over:
            return Report.failing("is_cartesian_sga1", {"arrow": E.arrows[f], "object": E.objects[Z]})
    return Report.passing("is_cartesian_sga1", witness={"arrow": E.arrows[f]})


def cartesian_lifts(p: Functor, u: int, e: int) -> Iterator[int]:
    """Cartesian arrows over u with codomain e, in increasing id order"""
    for a in p.dom.arrows_into(e):
        if p.arr(a) == u and cartesian(p, a):
            yield a


def lift_pairs(p: Functor) -> Iterator[LiftKey]:
    """Every (base arrow u, object E) with tgt u = pE"""
    B = p.cod
    for e in range(p.dom.n_objects):
        for u in B.arrows_into(p.obj(e)):
            yield (u, e)


def _least_lifts(p: Functor) -> Tuple[Dict[LiftKey, int], Optional[LiftKey], int]:
    chosen: Dict[LiftKey, int] = {}
    count = 0
    for u, e in lift_pairs(p):
        count += 1
        lift = next(cartesian_lifts(p, u, e), None)
        if lift is None:
            return chosen, (u, e), count
        chosen[(u, e)] = lift
    return chosen, None, count


def is_fibration(p: Functor) -> Report:
    """Every (u: B -> pE, E) has a Cartesian lift; witness is the least lift per pair"""
    chosen, missing, count = _least_lifts(p)
    E, B = p.dom, p.cod
    stats = {"pairs": count}
    if missing is not None:
        u, e = missing
        logger.info("%s is not a fibration: %r at %r", p.name or "functor", B.arrows[u], E.objects[e])
        return Report.failing("is_fibration", {"base_arrow": B.arrows[u], "object": E.objects[e]}, stats=stats)
    logger.info("%s is a fibration (%d lift pairs)", p.name or "functor", count)
    witness = [[B.arrows[u], E.objects[e], E.arrows[a]] for (u, e), a in chosen.items()]
    return Report.passing("is_fibration", witness=witness, stats=stats)


def is_discrete_fibration(p: Functor) -> Report:
    """Every (u, E) has exactly one arrow over u into E"""
    E, B = p.dom, p.cod
    count = 0
    for u, e in lift_pairs(p):
        count += 1
        lifts = [a for a in E.arrows_into(e) if p.arr(a) == u]
        if len(lifts) != 1:
            return Report.failing("is_discrete_fibration",
                                  {"base_arrow": B.arrows[u], "object": E.objects[e], "lifts": len(lifts)},
                                  stats={"pairs": count})
    return Report.passing("is_discrete_fibration", witness={"pairs": count}, stats={"pairs": count})


def opposite(p: Functor) -> Functor:
    """p^op, turning opfibration questions into fibration questions"""
    return p.op()


def is_opcartesian(p: Functor, f: int) -> Report:
    report = is_cartesian(p.op(), f)
    return report.model_copy(update={"check": "is_opcartesian"})


def is_opfibration(p: Functor) -> Report:
    report = is_fibration(p.op())
    return report.model_copy(update={"check": "is_opfibration"})


def vertical_isomorphism(p: Functor, f: int, f2: int) -> Optional[int]:
    """The unique vertical v with f2 v = f between two Cartesian lifts of one pair"""
    E = p.dom
    if E.tgt(f) != E.tgt(f2) or p.arr(f) != p.arr(f2):
        raise PreconditionError("arrows are not lifts of the same pair")
    vertical = p.cod.identity(p.obj(E.src(f)))
    candidates = [v for v in E.hom(E.src(f), E.src(f2))
                  if p.arr(v) == vertical and E.table[f2, v] == f]
    if len(candidates) != 1 or not E.is_isomorphism(candidates[0]):
        return None
    return candidates[0]


class ClovenFibration:
    """A functor together with a chosen Cartesian lift per (base arrow, object)"""

    __slots__ = ("p", "cleavage", "name")

    def __init__(self, p: Functor, cleavage: Dict[LiftKey, int], name: str = ""):
        self.p = p
        self.cleavage = dict(cleavage)
        self.name = name or p.name

    @property
    def total(self) -> FinCategory:
        return self.p.dom

    @property
    def base(self) -> FinCategory:
        return self.p.cod

    def lift(self, u: int, e: int) -> int:
        try:
            return self.cleavage[(u, e)]
        except KeyError:
            raise NotAFibration((self.base.arrows[u], self.total.objects[e])) from None

    def reindex(self, u: int, e: int) -> int:
        """u*E, the domain of the chosen lift"""
        return self.total.src(self.lift(u, e))

    def factor(self, u: int, e: int, g: int, h: int) -> int:
        """The unique k over h with lift(u, E) k = g"""
        E = self.total
        f = self.lift(u, e)
        for k in E.hom(E.src(g), E.src(f)):
            if self.p.arr(k) == h and E.table[f, k] == g:
                return k
        raise PreconditionError(f"{E.arrows[g]!r} does not factor through the chosen lift over {self.base.arrows[h]!r}")

    def is_normalized(self) -> bool:
        return all(self.cleavage[(self.base.identity(self.p.obj(e)), e)] == self.total.identity(e)
                   for e in range(self.total.n_objects))

    def is_split(self) -> Report:
        """Chosen lifts of identities are identities and chosen lifts compose"""
        E, B = self.total, self.base
        for e in range(E.n_objects):
            if self.cleavage[(B.identity(self.p.obj(e)), e)] != E.identity(e):
                return Report.failing("is_split", {"reason": "identity", "object": E.objects[e]})
        count = 0
        for (u, e), lift in self.cleavage.items():
            mid = E.src(lift)
            for v in B.arrows_into(B.src(u)):
                count += 1
                expected = int(E.table[lift, self.cleavage[(v, mid)]])
                if self.cleavage[(int(B.table[u, v]), e)] != expected:
                    return Report.failing("is_split", {"reason": "composition", "object": E.objects[e],
                                                       "pair": [B.arrows[u], B.arrows[v]]},
                                          stats={"composites": count})
        return Report.passing("is_split", witness={"lifts": len(self.cleavage)}, stats={"composites": count})

    def witness(self) -> List[List]:
        E, B = self.total, self.base
        return [[B.arrows[u], E.objects[e], E.arrows[a]] for (u, e), a in sorted(self.cleavage.items())]

    def __repr__(self) -> str:
        return f"ClovenFibration({self.name or '?'}, {len(self.cleavage)} lifts)"


def build_cleavage(p: Functor) -> ClovenFibration:
    """Least-id Cartesian lift per pair; raises NotAFibration otherwise"""
    chosen, missing, _ = _least_lifts(p)
    if missing is not None:
        u, e = missing
        raise NotAFibration((p.cod.arrows[u], p.dom.objects[e]))
    return ClovenFibration(p, chosen)


def normalize_cleavage(c: ClovenFibration) -> ClovenFibration:
    """Replace chosen lifts of identities by identities"""
    E, B, p = c.total, c.base, c.p
    cleavage = dict(c.cleavage)
    for e in range(E.n_objects):
        cleavage[(B.identity(p.obj(e)), e)] = E.identity(e)
    return ClovenFibration(p, cleavage, name=c.name)


def validate_cloven(c: ClovenFibration) -> Report:
    """Each pair has an entry over u into E which is Cartesian"""
    E, B, p = c.total, c.base, c.p
    count = 0
    for u, e in lift_pairs(p):
        count += 1
        if (u, e) not in c.cleavage:
            return Report.failing("validate_cloven", {"reason": "missing", "pair": [B.arrows[u], E.objects[e]]},
                                  stats={"pairs": count})
        a = c.cleavage[(u, e)]
        if p.arr(a) != u or E.tgt(a) != e:
            return Report.failing("validate_cloven", {"reason": "typing", "pair": [B.arrows[u], E.objects[e]]},
                                  stats={"pairs": count})
        if not cartesian(p, a):
            return Report.failing("validate_cloven", {"reason": "not cartesian", "pair": [B.arrows[u], E.objects[e]],
                                                      "detail": _cartesian_obstruction(p, a)}, stats={"pairs": count})
    return Report.passing("validate_cloven", witness={"lifts": count}, stats={"pairs": count})


# morphisms ------------------------------------------------------------------

@dataclass
class FibrationSquare:
    """Strictly commuting square target.p top = bottom source.p"""
    top: Functor
    bottom: Functor
    source: ClovenFibration
    target: ClovenFibration
    name: str = field(default="")

    def commutes(self) -> bool:
        return self.top.then(self.target.p) == self.source.p.then(self.bottom)

    def require_commuting(self) -> None:
        if not self.commutes():
            raise PreconditionError(f"square {self.name or '?'} does not commute")


def preserves_cartesian(functor: Functor, p_src: Functor, p_tgt: Functor) -> Report:
    """Cartesian arrows for p_src go to Cartesian arrows for p_tgt"""
    count = 0
    for a in range(p_src.dom.n_arrows):
        if not cartesian(p_src, a):
            continue
        count += 1
        if not cartesian(p_tgt, functor.arr(a)):
            return Report.failing("is_cartesian_preserving",
                                  {"arrow": p_src.dom.arrows[a], "image": p_tgt.dom.arrows[functor.arr(a)]},
                                  stats={"cartesian_arrows": count})
    return Report.passing("is_cartesian_preserving", stats={"cartesian_arrows": count})


def is_cartesian_preserving(sq: FibrationSquare) -> Report:
    sq.require_commuting()
    return preserves_cartesian(sq.top, sq.source.p, sq.target.p)


def is_cleavage_preserving(sq: FibrationSquare) -> Report:
    """top(lift(u, E)) is the chosen lift of (bottom u, top E)"""
    sq.require_commuting()
    src, tgt = sq.source, sq.target
    for (u, e), a in sorted(src.cleavage.items()):
        expected = tgt.lift(sq.bottom.arr(u), sq.top.obj(e))
        if sq.top.arr(a) != expected:
            return Report.failing("is_cleavage_preserving",
                                  {"pair": [src.base.arrows[u], src.total.objects[e]],
                                   "image": tgt.total.arrows[sq.top.arr(a)],
                                   "chosen": tgt.total.arrows[expected]},
                                  stats={"lifts": len(src.cleavage)})
    return Report.passing("is_cleavage_preserving", stats={"lifts": len(src.cleavage)})


def identity_square(c: ClovenFibration) -> FibrationSquare:
    return FibrationSquare(Functor.identity(c.total), Functor.identity(c.base), c, c, name="1")


class PullbackFibration(NamedTuple):
    """Pullback of two cleavage-preserving squares over a common cloven fibration"""
    fibration: ClovenFibration
    left: FibrationSquare
    right: FibrationSquare
    total: Pullback
    base: Pullback
    lemma: Report


def pullback_fibrations(s: FibrationSquare, t: FibrationSquare) -> PullbackFibration:
    """P1 x_P0 P2 with the cleavage chosen pairwise"""
    if s.target.p != t.target.p:
        raise PreconditionError("squares do not share a target fibration")
    for sq in (s, t):
        report = is_cleavage_preserving(sq)
        if not report.passed:
            raise PreconditionError(f"square {sq.name or '?'} is not cleavage-preserving: {report.counterexample}")
    total = pullback_category(s.top, t.top, name="E1xE2")
    base = pullback_category(s.bottom, t.bottom, name="B1xB2")
    p1, p2 = s.source.p, t.source.p
    P = total.category
    p = Functor.from_functions(
        P, base.category,
        lambda x: base.pair_object(p1.obj(total.left.obj(x)), p2.obj(total.right.obj(x))),
        lambda a: base.pair_arrow(p1.arr(total.left.arr(a)), p2.arr(total.right.arr(a))),
        name=f"{p1.name}x{p2.name}")
    cleavage: Dict[LiftKey, int] = {}
    for u, e in lift_pairs(p):
        u1, u2 = base.left.arr(u), base.right.arr(u)
        e1, e2 = total.left.obj(e), total.right.obj(e)
        cleavage[(u, e)] = total.pair_arrow(s.source.lift(u1, e1), t.source.lift(u2, e2))
    fibration = ClovenFibration(p, cleavage)
    left = FibrationSquare(total.left, base.left, fibration, s.source, name="pi1")
    right = FibrationSquare(total.right, base.right, fibration, t.source, name="pi2")
    lemma = _pairwise_cartesian_lemma(fibration, total, p1, p2)
    logger.debug("pullback fibration with %d lifts, lemma %s", len(cleavage), lemma.status.value)
    return PullbackFibration(fibration, left, right, total, base, lemma)


def _pairwise_cartesian_lemma(c: ClovenFibration, total: Pullback, p1: Functor, p2: Functor) -> Report:
    """(f1, f2) is Cartesian exactly when both components are"""
    checks = [validate_cloven(c)]
    P = total.category
    for a in range(P.n_arrows):
        f1, f2 = total.left.arr(a), total.right.arr(a)
        pair = cartesian(c.p, a)
        parts = cartesian(p1, f1) and cartesian(p2, f2)
        if pair != parts:
            checks.append(Report.failing("pairwise_cartesian",
                                         {"arrow": P.arrows[a], "pair_cartesian": pair, "components_cartesian": parts}))
            break
    else:
        checks.append(Report.passing("pairwise_cartesian", stats={"arrows": P.n_arrows}))
    return combine("pullback_lemma", checks)


def cartesian_mask(p: Functor) -> np.ndarray:
    """Boolean array over total arrows"""
    return np.array([cartesian(p, a) for a in range(p.dom.n_arrows)], dtype=bool)
