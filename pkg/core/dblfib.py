"""
Double Fibrations - Checkers and Lifting
========================================
Double (op)fibrations as strict double functors P: E -> B whose levels are
fibrations with compatible cleavages, plus the internal-fibration
characterization and liftings against the two generator shapes.

Conditions (tags used in every report):
- 1:  P0 and P1 are fibrations
- 2:  src and tgt are cleavage-preserving for some pair of cleavages
- 3:  unit and tensor of E preserve Cartesian arrows
- 3s: unit and tensor of E preserve the chosen cleavages

Algorithm:
- Cleavage search is a constraint search over the P0 choices; each pair
  (base cell, proarrow) of P1 constrains the two P0 choices under it
- A node budget turns an exhausted search into an inconclusive verdict
- Opfibrations are fibrations between levelwise opposites
"""

import logging
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Dict, Hashable, List, NamedTuple, Optional, Sequence, Tuple

from api.models.report_models import Certification, Report, Status, combine
from core.dblcat import (DoubleFunctor, Flavor, PseudoDoubleCategory, VerticalTransformation, horizontal_hom,
                         quintet, quintet_functor, validate_double_functor, validate_vertical_transformation,
                         vertical_2functor)
from core.errors import FlavorError, PreconditionError
from core.fib import (ClovenFibration, cartesian, cartesian_lifts, is_discrete_fibration,
                      is_fibration, lift_pairs, preserves_cartesian)
from core.fincat import Functor, SearchBudget
from core.twocat import TwoFunctor, is_2fibration, two_cartesian

logger = logging.getLogger(__name__)

Key = Hashable


class DoubleCleavage(NamedTuple):
    """A cleavage for P0 and a cleavage for P1"""
    cleavage0: ClovenFibration
    cleavage1: ClovenFibration

    def witness(self) -> Dict:
        return {"cleavage0": self.cleavage0.witness(), "cleavage1": self.cleavage1.witness()}


def _certification(P: DoubleFunctor) -> Certification:
    if P.dom.window is not None or P.cod.window is not None:
        return Certification.WINDOW
    return Certification.EXHAUSTIVE


# constraint search ------------------------------------------------------------

Constraint = Tuple[Tuple[Key, ...], Callable[..., bool], Key]


def _solve(variables: Sequence[Key], domains: Dict[Key, Sequence[int]], constraints: Sequence[Constraint],
           budget: SearchBudget) -> Tuple[Optional[Dict[Key, int]], Optional[Key]]:
    """First assignment in canonical order satisfying every constraint

    Each constraint is (variables, predicate, tag); it is checked as soon as
    its last variable is assigned. Returns (solution, deepest conflict tag).
    """
    order = list(variables)
    position = {v: i for i, v in enumerate(order)}
    by_last: Dict[Key, List[Constraint]] = {}
    for constraint in constraints:
        last = max(constraint[0], key=position.__getitem__)
        by_last.setdefault(last, []).append(constraint)
    assignment: Dict[Key, int] = {}
    choice = [-1] * len(order)
    pos = 0
    deepest, conflict = -1, None
    while 0 <= pos < len(order):
        if not budget.tick():
            return None, conflict
        var = order[pos]
        choice[pos] += 1
        if choice[pos] >= len(domains[var]):
            choice[pos] = -1
            assignment.pop(var, None)
            pos -= 1
            continue
        assignment[var] = domains[var][choice[pos]]
        failed = next((c for c in by_last.get(var, ()) if not c[1](*(assignment[v] for v in c[0]))), None)
        if failed is None:
            pos += 1
        elif pos >= deepest:
            deepest, conflict = pos, failed[2]
    if pos < 0:
        return None, conflict
    return assignment, None


def _candidates(p, pairs) -> Dict[Key, List[int]]:
    return {pair: list(cartesian_lifts(p, *pair)) for pair in pairs}


def search_double_cleavage(P: DoubleFunctor, bound: Optional[int] = None,
                           budget: Optional[SearchBudget] = None) -> Tuple[Optional[DoubleCleavage], Report]:
    """Cleavages for P0 and P1 with src and tgt cleavage-preserving"""
    E, B = P.dom, P.cod
    P0, P1 = P.F0, P.F1
    budget = budget or SearchBudget(limit=bound)
    conditions: Dict[str, Status] = {}
    certification = _certification(P)
    level_reports = [is_fibration(P0).model_copy(update={"check": "P0_fibration"}),
                     is_fibration(P1).model_copy(update={"check": "P1_fibration"})]
    if any(r.failed for r in level_reports):
        conditions["1"] = Status.FAIL
        return None, combine("find_double_cleavage", level_reports, conditions=conditions,
                             certification=certification)
    conditions["1"] = Status.PASS
    pairs0 = list(lift_pairs(P0))
    pairs1 = list(lift_pairs(P1))
    domains0 = _candidates(P0, pairs0)
    domains1 = _candidates(P1, pairs1)

    constraints: List[Constraint] = []
    for theta, m in pairs1:
        below_src = (B.src.arr(theta), E.src.obj(m))
        below_tgt = (B.tgt.arr(theta), E.tgt.obj(m))
        allowed = {(E.src.arr(l), E.tgt.arr(l)) for l in domains1[(theta, m)]}
        tag = (theta, m)
        if below_src == below_tgt:
            constraints.append(((below_src,), lambda a, allowed=allowed: (a, a) in allowed, tag))
        else:
            constraints.append(((below_src, below_tgt), lambda a, b, allowed=allowed: (a, b) in allowed, tag))
    solution, conflict = _solve(pairs0, domains0, constraints, budget)
    stats = {"pairs0": len(pairs0), "pairs1": len(pairs1), "nodes": budget.spent}
    if solution is None:
        if budget.exhausted:
            conditions["2"] = Status.INCONCLUSIVE
            return None, Report.inconclusive("find_double_cleavage", conditions=conditions, stats=stats,
                                             certification=certification, notes=["search bound reached"])
        conditions["2"] = Status.FAIL
        theta, m = conflict
        return None, Report.failing("find_double_cleavage",
                                    {"condition": "2", "base_cell": B.E1.arrows[theta], "proarrow": E.E1.objects[m]},
                                    conditions=conditions, stats=stats, certification=certification)
    c0 = ClovenFibration(P0, solution, name="c0")
    cleavage1 = {}
    for theta, m in pairs1:
        s = c0.cleavage[(B.src.arr(theta), E.src.obj(m))]
        t = c0.cleavage[(B.tgt.arr(theta), E.tgt.obj(m))]
        cleavage1[(theta, m)] = next(l for l in domains1[(theta, m)] if E.src.arr(l) == s and E.tgt.arr(l) == t)
    cleavage = DoubleCleavage(c0, ClovenFibration(P1, cleavage1, name="c1"))
    conditions["2"] = Status.PASS
    return cleavage, Report.passing("find_double_cleavage", witness=cleavage.witness(), conditions=conditions,
                                    stats=stats, certification=certification)


def find_double_cleavage(P: DoubleFunctor, bound: Optional[int] = None) -> Report:
    return search_double_cleavage(P, bound)[1]


def check_double_cleavage(P: DoubleFunctor, cleavage: DoubleCleavage) -> Report:
    """A given pair of cleavages is Cartesian and src/tgt cleavage-preserving"""
    E, B = P.dom, P.cod
    c0, c1 = cleavage
    for label, c in (("P0", c0), ("P1", c1)):
        for key, lift in c.cleavage.items():
            if not cartesian(c.p, lift):
                return Report.failing("check_double_cleavage", {"level": label, "lift": c.total.arrows[lift]},
                                      conditions={"1": Status.FAIL})
    for (theta, m), lift in sorted(c1.cleavage.items()):
        s = c0.lift(B.src.arr(theta), E.src.obj(m))
        t = c0.lift(B.tgt.arr(theta), E.tgt.obj(m))
        if E.src.arr(lift) != s or E.tgt.arr(lift) != t:
            return Report.failing("check_double_cleavage",
                                  {"base_cell": B.E1.arrows[theta], "proarrow": E.E1.objects[m]},
                                  conditions={"1": Status.PASS, "2": Status.FAIL})
    return Report.passing("check_double_cleavage", conditions={"1": Status.PASS, "2": Status.PASS},
                          certification=_certification(P))


def cartesian_preservation(P: DoubleFunctor, cleavage: DoubleCleavage) -> Report:
    """Condition 3: unit and tensor of E preserve Cartesian arrows

    Once src and tgt preserve `cleavage`, a composable pair of cells is
    Cartesian over the composable pairs of B exactly when both cells are
    Cartesian for P1, so the tensor is checked pair by pair without building
    the pullback fibration.
    """
    E = P.dom
    E1 = E.E1
    unit = preserves_cartesian(E.unit, P.F0, P.F1).model_copy(update={"check": "unit_cartesian"})
    lifts = {a for a in range(E1.n_arrows) if cartesian(P.F1, a)}
    count = 0
    for theta in sorted(lifts):
        for delta in E.cells_from(E.tgt.arr(theta)):
            if delta not in lifts:
                continue
            count += 1
            if not cartesian(P.F1, E.tensor_arr(theta, delta)):
                tensor = Report.failing("tensor_cartesian", {"cells": [E1.arrows[theta], E1.arrows[delta]],
                                                             "image": E1.arrows[E.tensor_arr(theta, delta)]},
                                        stats={"cartesian_pairs": count})
                return combine("cartesian_preservation", [unit, tensor])
    tensor = Report.passing("tensor_cartesian", stats={"cartesian_pairs": count,
                                                       "chosen_lifts": len(cleavage.cleavage1.cleavage)})
    return combine("cartesian_preservation", [unit, tensor])


def cleavage_preservation(P: DoubleFunctor, cleavage: DoubleCleavage) -> Report:
    """Condition 3s: unit and tensor of E send chosen lifts to chosen lifts"""
    E, B = P.dom, P.cod
    c0, c1 = cleavage
    for (u, x), lift in sorted(c0.cleavage.items()):
        if E.unit_arr(lift) != c1.lift(B.unit_arr(u), E.unit_obj(x)):
            return Report.failing("cleavage_preservation",
                                  {"reason": "unit", "pair": [B.E0.arrows[u], E.E0.objects[x]]})
    count = 0
    for (theta, m), l1 in sorted(c1.cleavage.items()):
        for delta in B.cells_from(B.tgt.arr(theta)):
            for n in E.proarrows_from(E.tgt.obj(m)):
                if (delta, n) not in c1.cleavage:
                    continue
                count += 1
                l2 = c1.cleavage[(delta, n)]
                expected = c1.lift(B.tensor_arr(theta, delta), E.tensor_obj(m, n))
                if E.tensor_arr(l1, l2) != expected:
                    return Report.failing("cleavage_preservation",
                                          {"reason": "tensor", "cells": [B.E1.arrows[theta], B.E1.arrows[delta]],
                                           "proarrows": [E.E1.objects[m], E.E1.objects[n]]},
                                          stats={"composites": count})
    return Report.passing("cleavage_preservation", stats={"composites": count})


def _resolve_cleavage(P: DoubleFunctor, cleavage: Optional[DoubleCleavage],
                      bound: Optional[int]) -> Tuple[Optional[DoubleCleavage], Report]:
    if cleavage is None:
        return search_double_cleavage(P, bound)
    return cleavage, check_double_cleavage(P, cleavage)


def is_double_fibration(P: DoubleFunctor, cleavage: Optional[DoubleCleavage] = None,
                        bound: Optional[int] = None) -> Report:
    """Conditions 1, 2 and 3 for a strict double functor"""
    P.require_strict()
    found, report = _resolve_cleavage(P, cleavage, bound)
    conditions = dict(report.conditions)
    if found is None or not report.passed:
        result = combine("is_double_fibration", [report], conditions=conditions,
                         certification=_certification(P))
    else:
        preservation = cartesian_preservation(P, found)
        conditions["3"] = preservation.status
        result = combine("is_double_fibration", [report, preservation], conditions=conditions,
                         certification=_certification(P))
    logger.info("double fibration check for %s: %s", P.name or "double functor", result.status.value)
    return result


def is_double_opfibration(P: DoubleFunctor, bound: Optional[int] = None) -> Report:
    report = is_double_fibration(P.op(), bound=bound)
    return report.model_copy(update={"check": "is_double_opfibration"})


def _cleavage_is_forced(cleavage: DoubleCleavage) -> bool:
    """Every (base arrow, object) pair has exactly one Cartesian lift at both levels"""
    return all(next(islice(cartesian_lifts(c.p, u, e), 1, None), None) is None
               for c in cleavage for u, e in c.cleavage)


def is_split_double_fibration(P: DoubleFunctor, cleavage: Optional[DoubleCleavage] = None,
                              bound: Optional[int] = None) -> Report:
    """Double fibration whose cleavages are split and preserved by unit and tensor

    Without a given cleavage the first one found by the search is judged. A
    failure is then only final when that cleavage is the only one; otherwise
    the verdict is inconclusive and another cleavage should be passed in.
    """
    P.require_strict()
    found, report = _resolve_cleavage(P, cleavage, bound)
    if found is None or not report.passed:
        return combine("is_split_double_fibration", [report], certification=_certification(P))
    preservation = cartesian_preservation(P, found)
    subreports = [report, preservation,
                  found.cleavage0.is_split().model_copy(update={"check": "split_P0"}),
                  found.cleavage1.is_split().model_copy(update={"check": "split_P1"}),
                  cleavage_preservation(P, found)]
    result = combine("is_split_double_fibration", subreports, certification=_certification(P))
    if result.failed and cleavage is None and preservation.passed and not _cleavage_is_forced(found):
        return Report.inconclusive("is_split_double_fibration", subreports=subreports,
                                   certification=_certification(P),
                                   notes=["only the first cleavage found was judged"])
    return result


def is_discrete_double_fibration(P: DoubleFunctor) -> Report:
    return combine("is_discrete_double_fibration",
                   [is_discrete_fibration(P.F0).model_copy(update={"check": "discrete_P0"}),
                    is_discrete_fibration(P.F1).model_copy(update={"check": "discrete_P1"})],
                   certification=_certification(P))


_FLAVOR_CONDITIONS = {"L": ("1", "2"), "P": ("1", "2", "3"), "S": ("1", "2", "3", "3s")}
_FLAVOR_CATEGORY = {"L": "Dbl_lax", "P": "Dbl_pseudo", "S": "Dbl"}


def internal_fibration_check(P: DoubleFunctor, flavor: str, cleavage: Optional[DoubleCleavage] = None,
                             bound: Optional[int] = None, allow_pseudo: bool = False) -> Report:
    """Characterization of P as a fibration in the 2-category of double categories of the flavor"""
    flavor = flavor.upper()
    if flavor not in _FLAVOR_CONDITIONS:
        raise PreconditionError(f"unknown flavor {flavor!r}; expected L, P or S")
    if P.flavor == Flavor.LAX:
        raise FlavorError("the characterization needs a pseudo double functor")
    if flavor == "S" and P.flavor != Flavor.STRICT:
        raise FlavorError(f"flavor {flavor} needs a strict double functor")
    found, report = _resolve_cleavage(P, cleavage, bound)
    conditions = dict(report.conditions)
    subreports = [report]
    wanted = _FLAVOR_CONDITIONS[flavor]
    if found is not None and report.passed:
        if "3" in wanted:
            preservation = cartesian_preservation(P, found)
            conditions["3"] = preservation.status
            subreports.append(preservation)
        if "3s" in wanted:
            chosen = cleavage_preservation(P, found)
            conditions["3s"] = chosen.status
            subreports.append(chosen)
    metadata = {"flavor": flavor, "category": _FLAVOR_CATEGORY[flavor], "double_functor": P.flavor.value,
                "conditions": list(wanted)}
    result = combine("internal_fibration_check", subreports, conditions=conditions,
                     certification=Certification.CHARACTERIZATION, notes=[f"{metadata['category']}"])
    if result.passed:
        result = result.model_copy(update={"witness": {**metadata, **(found.witness() if found else {})}})
    return result


# liftings against generator shapes ----------------------------------------------

@dataclass
class LiftingTriangle:
    """E: X -> dom P, B: X -> cod P and beta: B => P E over a generator shape X"""
    shape: PseudoDoubleCategory
    top: DoubleFunctor
    bottom: DoubleFunctor
    beta: VerticalTransformation


class Lift(NamedTuple):
    functor: DoubleFunctor
    alpha: VerticalTransformation


def _require_generator(X: PseudoDoubleCategory) -> None:
    if X.E0.n_arrows != X.E0.n_objects or X.E1.n_arrows != X.E1.n_objects or X.E0.n_objects > 2:
        raise PreconditionError("lifting shapes are the terminal double category and the walking proarrow")


def lift_triangle(t: LiftingTriangle, P: DoubleFunctor, cleavage: DoubleCleavage) -> Lift:
    """E'(x) = src of the chosen lift of beta_x at E x, alpha the chosen lifts"""
    _require_generator(t.shape)
    X, E, Bf, beta = t.shape, t.top, t.bottom, t.beta
    c0, c1 = cleavage
    Ecat = P.dom
    T1 = Ecat.E1.table
    alpha0 = [c0.lift(beta.components0[x], E.F0.obj(x)) for x in range(X.E0.n_objects)]
    alpha1 = [c1.lift(beta.components1[m], E.F1.obj(m)) for m in range(X.E1.n_objects)]
    objects0 = [Ecat.E0.src(a) for a in alpha0]
    objects1 = [Ecat.E1.src(a) for a in alpha1]
    F0 = Functor(X.E0, Ecat.E0, objects0, [Ecat.E0.identity(objects0[X.E0.src(a)]) for a in range(X.E0.n_arrows)],
                 name="E'0")
    F1 = Functor(X.E1, Ecat.E1, objects1, [Ecat.E1.identity(objects1[X.E1.src(a)]) for a in range(X.E1.n_arrows)],
                 name="E'1")
    iota = {}
    for x in range(X.E0.n_objects):
        yx = X.unit_obj(x)
        g = int(T1[E.iota[x], Ecat.unit_arr(alpha0[x])])
        iota[x] = c1.factor(beta.components1[yx], E.F1.obj(yx), g, Bf.iota[x])
    phi = {}
    for m, n in X.composable_pairs():
        mn = X.tensor_obj(m, n)
        g = int(T1[E.phi[(m, n)], Ecat.tensor_arr(alpha1[m], alpha1[n])])
        phi[(m, n)] = c1.factor(beta.components1[mn], E.F1.obj(mn), g, Bf.phi[(m, n)])
    lifted = DoubleFunctor(X, Ecat, F0, F1, phi, iota, flavor=Flavor.LAX, name="E'")
    if lifted.comparisons_are_identities():
        lifted.flavor = Flavor.STRICT
    elif lifted.comparisons_are_invertible():
        lifted.flavor = Flavor.PSEUDO
    return Lift(lifted, VerticalTransformation(lifted, E, alpha0, alpha1, name="alpha"))


def check_lift(t: LiftingTriangle, P: DoubleFunctor, lift: Lift) -> Report:
    """P alpha = beta, P E' = B, and every alpha component is Cartesian"""
    X = t.shape
    checks = []
    ok = all(P.F0.arr(a) == b for a, b in zip(lift.alpha.components0, t.beta.components0)) and \
        all(P.F1.arr(a) == b for a, b in zip(lift.alpha.components1, t.beta.components1))
    checks.append(Report.passing("projects_to_beta") if ok else
                  Report.failing("projects_to_beta", {"reason": "P alpha differs from beta"}))
    cart = all(cartesian(P.F0, a) for a in lift.alpha.components0) and \
        all(cartesian(P.F1, a) for a in lift.alpha.components1)
    checks.append(Report.passing("alpha_cartesian") if cart else
                  Report.failing("alpha_cartesian", {"reason": "alpha component is not Cartesian"}))
    checks.append(validate_double_functor(lift.functor))
    checks.append(validate_vertical_transformation(lift.alpha))
    bottom = all(P.F1.arr(lift.functor.iota[x]) == t.bottom.iota[x] for x in range(X.E0.n_objects)) and \
        all(P.F1.arr(c) == t.bottom.phi[pair] for pair, c in lift.functor.phi.items())
    checks.append(Report.passing("comparisons_over_base") if bottom else
                  Report.failing("comparisons_over_base", {"reason": "comparison cells do not lie over B"}))
    return combine("lift_triangle", checks, certification=Certification.LIFTING)


def factor_through_lift(P: DoubleFunctor, cleavage: DoubleCleavage, t: LiftingTriangle, lift: Lift,
                        other: DoubleFunctor, xi: VerticalTransformation,
                        gamma: VerticalTransformation) -> VerticalTransformation:
    """The unique zeta: E'' => E' with alpha zeta = xi over gamma"""
    c0, c1 = cleavage
    X, E = t.shape, t.top
    zeta0 = [c0.factor(t.beta.components0[x], E.F0.obj(x), xi.components0[x], gamma.components0[x])
             for x in range(X.E0.n_objects)]
    zeta1 = [c1.factor(t.beta.components1[m], E.F1.obj(m), xi.components1[m], gamma.components1[m])
             for m in range(X.E1.n_objects)]
    return VerticalTransformation(other, lift.functor, zeta0, zeta1, name="zeta")


# vertical and horizontal consequences -----------------------------------------------

def vh_props(P: DoubleFunctor, cleavage: Optional[DoubleCleavage] = None, bound: Optional[int] = None) -> Report:
    """For a double fibration: chosen P0 lifts are 2-Cartesian in V(P); horizontal homs are fibrations"""
    found, report = _resolve_cleavage(P, cleavage, bound)
    if found is None or not report.passed:
        return combine("vh_props", [report], certification=_certification(P))
    fibration = is_double_fibration(P, found)
    if not fibration.passed:
        return combine("vh_props", [fibration], certification=_certification(P))
    VP = vertical_2functor(P)
    E0 = P.dom.E0
    bad = next((a for a in sorted(set(found.cleavage0.cleavage.values())) if not two_cartesian(VP, a)), None)
    if bad is None:
        vertical = Report.passing("enough_2cartesian", stats={"lifts": len(found.cleavage0.cleavage)})
    else:
        vertical = Report.failing("enough_2cartesian", {"arrow": E0.arrows[bad]})
    horizontal = None
    count = 0
    for a in range(E0.n_objects):
        for b in range(E0.n_objects):
            H, _ = horizontal_hom(P.dom, a, b)
            HB, _ = horizontal_hom(P.cod, P.F0.obj(a), P.F0.obj(b))
            local = P.F1.restrict(H, HB, name=f"H({a},{b})")
            count += 1
            result = is_fibration(local)
            if not result.passed:
                horizontal = Report.failing("locally_fibration",
                                            {"hom": [E0.objects[a], E0.objects[b]], "detail": result.counterexample},
                                            stats={"homs": count})
                break
        if horizontal is not None:
            break
    if horizontal is None:
        horizontal = Report.passing("locally_fibration", stats={"homs": count})
    return combine("vh_props", [fibration, vertical, horizontal], certification=_certification(P))


def quintet_equiv_test(P: TwoFunctor, bound: Optional[int] = None) -> Report:
    """is_2fibration(P) agrees with is_double_fibration(Q(P))"""
    QP = quintet_functor(P, quintet(P.dom), quintet(P.cod))
    two = is_2fibration(P)
    double = is_double_fibration(QP, bound=bound)
    agree = (two.status == Status.PASS) == (double.status == Status.PASS) \
        and Status.INCONCLUSIVE not in (two.status, double.status)
    if double.status == Status.INCONCLUSIVE:
        return Report.inconclusive("quintet_equiv_test", subreports=[two, double])
    if agree:
        return Report.passing("quintet_equiv_test", witness={"2fibration": two.status.value,
                                                             "double_fibration": double.status.value},
                              subreports=[two, double])
    return Report.failing("quintet_equiv_test", {"2fibration": two.status.value,
                                                 "double_fibration": double.status.value},
                          subreports=[two, double])
