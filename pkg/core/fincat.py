"""
Finite Categories - Data Substrate
==================================
Finite 1-categories with interned integer ids and a dense composition
table, functors, natural transformations, and the strict limits used by
the higher modules (pullbacks, products, arrow categories, slices).

Features:
- Dense numpy composition tables (-1 marks non-composable pairs)
- Exhaustive validators for categories, functors and transformations
- Strict pullbacks with canonical pair labels
- Brute-force functor search (universal properties, isomorphisms)
- Canonical least-id pullback cones ("chosen pullbacks")

Arrow ids compose right to left: compose(g, f) is g after f.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import (Callable, Dict, Hashable, Iterable, Iterator, List, Mapping,
                    NamedTuple, Optional, Sequence, Tuple)

import numpy as np

from api.models.report_models import Report
from core.errors import CompositionError, PreconditionError, SchemaError

logger = logging.getLogger(__name__)

Label = Hashable

_INDEX = np.int32


def _frozen(values: Iterable[int]) -> np.ndarray:
    array = np.asarray(list(values), dtype=_INDEX)
    array.setflags(write=False)
    return array


class FinCategory:
    """A finite category with objects 0..n-1 and arrows 0..m-1"""

    __slots__ = ("name", "objects", "arrows", "_src", "_tgt", "_ident", "_table",
                 "_obj_index", "_arr_index", "_homs", "_hash", "_cache")

    def __init__(self, objects: Sequence[Label], arrows: Sequence[Label],
                 src: Sequence[int], tgt: Sequence[int], identities: Sequence[int],
                 table: np.ndarray, name: str = ""):
        self.name = name
        self.objects: Tuple[Label, ...] = tuple(objects)
        self.arrows: Tuple[Label, ...] = tuple(arrows)
        self._src = _frozen(src)
        self._tgt = _frozen(tgt)
        self._ident = _frozen(identities)
        table = np.array(table, dtype=_INDEX).reshape(len(self.arrows), len(self.arrows))
        table.setflags(write=False)
        self._table = table
        self._obj_index = {label: i for i, label in enumerate(self.objects)}
        self._arr_index = {label: a for a, label in enumerate(self.arrows)}
        if len(self._obj_index) != len(self.objects):
            raise SchemaError("duplicate object id", "objects")
        if len(self._arr_index) != len(self.arrows):
            raise SchemaError("duplicate arrow id", "arrows")
        self._homs: Optional[Dict[Tuple[int, int], Tuple[int, ...]]] = None
        self._hash: Optional[int] = None
        self._cache: Dict = {}

    # construction -------------------------------------------------------

    @classmethod
    def from_ids(cls, objects: Sequence[Label], arrows: Sequence[Label],
                 src: Sequence[int], tgt: Sequence[int], identities: Sequence[int],
                 compose: Callable[[int, int], int], name: str = "") -> "FinCategory":
        """Build from integer endpoint data and a composition function on ids"""
        m = len(arrows)
        table = np.full((m, m), -1, dtype=_INDEX)
        outgoing: Dict[int, List[int]] = {}
        for g in range(m):
            outgoing.setdefault(src[g], []).append(g)
        for f in range(m):
            for g in outgoing.get(tgt[f], ()):
                table[g, f] = compose(g, f)
        return cls(objects, arrows, src, tgt, identities, table, name=name)

    @classmethod
    def build(cls, objects: Sequence[Label],
              arrows: Sequence[Tuple[Label, Label, Label]],
              identities: Mapping[Label, Label],
              compose: Callable[[Label, Label], Optional[Label]],
              name: str = "") -> "FinCategory":
        """Build from labels; compose(g, f) returns the label of g after f (or None if unknown)"""
        obj_index = {}
        for i, label in enumerate(objects):
            if label in obj_index:
                raise SchemaError(f"duplicate object id {label!r}", f"objects[{i}]")
            obj_index[label] = i
        arr_index = {}
        src, tgt = [], []
        for a, (label, s, t) in enumerate(arrows):
            if label in arr_index:
                raise SchemaError(f"duplicate arrow id {label!r}", f"arrows[{a}]")
            if s not in obj_index or t not in obj_index:
                raise SchemaError(f"arrow {label!r} references an unknown object", f"arrows[{a}]")
            arr_index[label] = a
            src.append(obj_index[s])
            tgt.append(obj_index[t])
        ident = []
        for x in objects:
            if x not in identities:
                raise SchemaError(f"object {x!r} has no identity", "identities")
            if identities[x] not in arr_index:
                raise SchemaError(f"identity {identities[x]!r} is not an arrow", "identities")
            ident.append(arr_index[identities[x]])
        labels = [a[0] for a in arrows]

        def _compose(g: int, f: int) -> int:
            result = compose(labels[g], labels[f])
            if result is None:
                return -1
            if result not in arr_index:
                raise SchemaError(f"composite {result!r} is not an arrow", "compose")
            return arr_index[result]

        return cls.from_ids(list(objects), labels, src, tgt, ident, _compose, name=name)

    def with_composite(self, g: int, f: int, result: int) -> "FinCategory":
        """Copy with one table entry replaced (used to build negative instances)"""
        table = self._table.copy()
        table[g, f] = result
        return FinCategory(self.objects, self.arrows, self._src, self._tgt, self._ident, table,
                           name=f"{self.name}*")

    def relabel(self, name: str) -> "FinCategory":
        return FinCategory(self.objects, self.arrows, self._src, self._tgt, self._ident,
                           self._table, name=name)

    # basic structure ----------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def sources(self) -> np.ndarray:
        return self._src

    @property
    def targets(self) -> np.ndarray:
        return self._tgt

    @property
    def identities(self) -> np.ndarray:
        return self._ident

    def src(self, a: int) -> int:
        return int(self._src[a])

    def tgt(self, a: int) -> int:
        return int(self._tgt[a])

    def identity(self, x: int) -> int:
        return int(self._ident[x])

    def is_identity(self, a: int) -> bool:
        return int(self._ident[self._src[a]]) == a

    def composable(self, g: int, f: int) -> bool:
        return self._src[g] == self._tgt[f]

    def compose(self, g: int, f: int) -> int:
        """g after f"""
        if self._src[g] != self._tgt[f]:
            raise CompositionError(
                f"{self.arrows[g]!r} cannot follow {self.arrows[f]!r} in {self.name or 'category'}")
        result = int(self._table[g, f])
        if result < 0:
            raise CompositionError(f"composite of {self.arrows[g]!r} and {self.arrows[f]!r} is undefined")
        return result

    def compose_path(self, *arrows: int) -> int:
        """Compose right to left: compose_path(h, g, f) is h after g after f"""
        result = arrows[-1]
        for g in reversed(arrows[:-1]):
            result = self.compose(g, result)
        return result

    def object_index(self, label: Label) -> int:
        try:
            return self._obj_index[label]
        except KeyError:
            raise SchemaError(f"unknown object {label!r} in {self.name or 'category'}") from None

    def arrow_index(self, label: Label) -> int:
        try:
            return self._arr_index[label]
        except KeyError:
            raise SchemaError(f"unknown arrow {label!r} in {self.name or 'category'}") from None

    def has_object(self, label: Label) -> bool:
        return label in self._obj_index

    def has_arrow(self, label: Label) -> bool:
        return label in self._arr_index

    def _hom_index(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        if self._homs is None:
            homs: Dict[Tuple[int, int], List[int]] = {}
            for a in range(self.n_arrows):
                homs.setdefault((int(self._src[a]), int(self._tgt[a])), []).append(a)
            self._homs = {key: tuple(value) for key, value in homs.items()}
        return self._homs

    def hom(self, x: int, y: int) -> Tuple[int, ...]:
        return self._hom_index().get((x, y), ())

    def arrows_into(self, y: int) -> Tuple[int, ...]:
        key = ("into", y)
        if key not in self._cache:
            self._cache[key] = tuple(int(a) for a in np.flatnonzero(self._tgt == y))
        return self._cache[key]

    def arrows_out_of(self, x: int) -> Tuple[int, ...]:
        key = ("out", x)
        if key not in self._cache:
            self._cache[key] = tuple(int(a) for a in np.flatnonzero(self._src == x))
        return self._cache[key]

    def inverse(self, a: int) -> Optional[int]:
        """Two-sided inverse of an arrow, if any"""
        s, t = self.src(a), self.tgt(a)
        for b in self.hom(t, s):
            if self._table[b, a] == self._ident[s] and self._table[a, b] == self._ident[t]:
                return b
        return None

    def is_isomorphism(self, a: int) -> bool:
        return self.inverse(a) is not None

    def op(self) -> "FinCategory":
        """Opposite category: same labels, endpoints swapped, table transposed"""
        return FinCategory(self.objects, self.arrows, self._tgt, self._src, self._ident,
                           self._table.T, name=f"{self.name}^op" if self.name else "")

    # identity -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (self.objects == other.objects and self.arrows == other.arrows
                and np.array_equal(self._src, other._src) and np.array_equal(self._tgt, other._tgt)
                and np.array_equal(self._ident, other._ident)
                and np.array_equal(self._table, other._table))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.objects, self.arrows))
        return self._hash

    def __repr__(self) -> str:
        return f"FinCategory({self.name or '?'}: {self.n_objects} objects, {self.n_arrows} arrows)"


class Functor:
    """A functor between finite categories, stored as two id arrays"""

    __slots__ = ("dom", "cod", "_obj", "_arr", "name", "_cache")

    def __init__(self, dom: FinCategory, cod: FinCategory,
                 on_objects: Sequence[int], on_arrows: Sequence[int], name: str = ""):
        if len(on_objects) != dom.n_objects or len(on_arrows) != dom.n_arrows:
            raise SchemaError("functor maps must cover every object and arrow of the domain")
        self.dom = dom
        self.cod = cod
        self._obj = _frozen(on_objects)
        self._arr = _frozen(on_arrows)
        self.name = name
        self._cache: Dict = {}

    @classmethod
    def from_functions(cls, dom: FinCategory, cod: FinCategory,
                       on_object: Callable[[int], int], on_arrow: Callable[[int], int],
                       name: str = "") -> "Functor":
        return cls(dom, cod, [on_object(x) for x in range(dom.n_objects)],
                   [on_arrow(a) for a in range(dom.n_arrows)], name=name)

    @classmethod
    def from_labels(cls, dom: FinCategory, cod: FinCategory,
                    on_objects: Mapping[Label, Label], on_arrows: Mapping[Label, Label],
                    name: str = "") -> "Functor":
        try:
            objs = [cod.object_index(on_objects[x]) for x in dom.objects]
            arrs = [cod.arrow_index(on_arrows[a]) for a in dom.arrows]
        except KeyError as e:
            raise SchemaError(f"functor {name or '?'} misses {e.args[0]!r}") from None
        return cls(dom, cod, objs, arrs, name=name)

    @classmethod
    def by_labels(cls, dom: FinCategory, cod: FinCategory,
                  object_label: Callable[[Label], Label], arrow_label: Callable[[Label], Label],
                  name: str = "") -> "Functor":
        """Functor whose images are found by computing their labels"""
        return cls(dom, cod, [cod.object_index(object_label(x)) for x in dom.objects],
                   [cod.arrow_index(arrow_label(a)) for a in dom.arrows], name=name)

    @classmethod
    def identity(cls, category: FinCategory) -> "Functor":
        return cls(category, category, range(category.n_objects), range(category.n_arrows),
                   name=f"1_{category.name}" if category.name else "1")

    @classmethod
    def to_terminal(cls, category: FinCategory, terminal: FinCategory) -> "Functor":
        return cls(category, terminal, [0] * category.n_objects, [0] * category.n_arrows, name="!")

    def obj(self, x: int) -> int:
        return int(self._obj[x])

    def arr(self, a: int) -> int:
        return int(self._arr[a])

    @property
    def object_map(self) -> np.ndarray:
        return self._obj

    @property
    def arrow_map(self) -> np.ndarray:
        return self._arr

    def then(self, other: "Functor") -> "Functor":
        """other after self"""
        if self.cod != other.dom:
            raise PreconditionError(f"cannot compose {self.name or '?'} with {other.name or '?'}")
        return Functor(self.dom, other.cod, other._obj[self._obj], other._arr[self._arr],
                       name=f"{other.name}.{self.name}")

    def op(self) -> "Functor":
        return Functor(self.dom.op(), self.cod.op(), self._obj, self._arr,
                       name=f"{self.name}^op" if self.name else "")

    def restrict(self, dom: FinCategory, cod: FinCategory, name: str = "") -> "Functor":
        """Restriction to categories whose labels are among the original ones"""
        return Functor.by_labels(
            dom, cod,
            lambda x: self.cod.objects[self.obj(self.dom.object_index(x))],
            lambda a: self.cod.arrows[self.arr(self.dom.arrow_index(a))],
            name=name or self.name)

    def fiber_over_object(self, b: int) -> Tuple[int, ...]:
        key = ("fo", b)
        if key not in self._cache:
            self._cache[key] = tuple(int(x) for x in np.flatnonzero(self._obj == b))
        return self._cache[key]

    def arrows_over(self, u: int) -> Tuple[int, ...]:
        key = ("fa", u)
        if key not in self._cache:
            self._cache[key] = tuple(int(a) for a in np.flatnonzero(self._arr == u))
        return self._cache[key]

    def is_vertical(self, a: int) -> bool:
        return self.cod.is_identity(self.arr(a))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Functor):
            return NotImplemented
        return (self.dom == other.dom and self.cod == other.cod
                and np.array_equal(self._obj, other._obj) and np.array_equal(self._arr, other._arr))

    def __hash__(self) -> int:
        return hash((hash(self.dom), hash(self.cod), self._arr.tobytes()))

    def __repr__(self) -> str:
        return f"Functor({self.name or '?'}: {self.dom!r} -> {self.cod!r})"


class NatTransformation:
    """A natural transformation between parallel functors"""

    __slots__ = ("source", "target", "_components", "name")

    def __init__(self, source: Functor, target: Functor, components: Sequence[int], name: str = ""):
        if len(components) != source.dom.n_objects:
            raise SchemaError("transformation needs one component per object")
        self.source = source
        self.target = target
        self._components = _frozen(components)
        self.name = name

    @classmethod
    def identity(cls, functor: Functor) -> "NatTransformation":
        cod = functor.cod
        return cls(functor, functor, [cod.identity(functor.obj(x)) for x in range(functor.dom.n_objects)])

    def component(self, x: int) -> int:
        return int(self._components[x])

    @property
    def components(self) -> np.ndarray:
        return self._components

    def is_identity(self) -> bool:
        cod = self.source.cod
        return all(cod.is_identity(self.component(x)) for x in range(self.source.dom.n_objects))

    def is_isomorphism(self) -> bool:
        cod = self.source.cod
        return all(cod.is_isomorphism(self.component(x)) for x in range(self.source.dom.n_objects))


# validators --------------------------------------------------------------

def validate_category(C: FinCategory) -> Report:
    """Check endpoints, closure, identity laws and associativity exhaustively"""
    check = "validate_category"
    m, n = C.n_arrows, C.n_objects
    src, tgt, ident, T = C.sources, C.targets, C.identities, C.table
    stats = {"objects": n, "arrows": m}
    if m and (src.min(initial=0) < 0 or src.max(initial=0) >= n or tgt.max(initial=0) >= n):
        return Report.failing(check, {"reason": "dangling endpoint"}, stats=stats)
    if n and (ident.min() < 0 or ident.max() >= m):
        return Report.failing(check, {"reason": "dangling identity"}, stats=stats)
    for x in range(n):
        i = int(ident[x])
        if src[i] != x or tgt[i] != x:
            return Report.failing(check, {"reason": "identity endpoints", "object": C.objects[x]},
                                  stats=stats)
    composable = src[:, None] == tgt[None, :]
    defined = T >= 0
    missing = composable & ~defined
    if missing.any():
        g, f = (int(v) for v in np.argwhere(missing)[0])
        return Report.failing(check, {"reason": "composite missing", "pair": [C.arrows[g], C.arrows[f]]},
                              stats=stats)
    extra = defined & ~composable
    if extra.any():
        g, f = (int(v) for v in np.argwhere(extra)[0])
        return Report.failing(check, {"reason": "composite of non-composable pair",
                                      "pair": [C.arrows[g], C.arrows[f]]}, stats=stats)
    if (T >= m).any():
        g, f = (int(v) for v in np.argwhere(T >= m)[0])
        return Report.failing(check, {"reason": "composite is not an arrow", "pair": [C.arrows[g], C.arrows[f]]},
                              stats=stats)
    gs, fs = np.nonzero(defined)
    results = T[gs, fs]
    typed = (src[results] == src[fs]) & (tgt[results] == tgt[gs])
    stats["composites"] = int(gs.size)
    if not typed.all():
        k = int(np.flatnonzero(~typed)[0])
        return Report.failing(check, {"reason": "composite has wrong endpoints",
                                      "pair": [C.arrows[gs[k]], C.arrows[fs[k]]]}, stats=stats)
    arrows = np.arange(m)
    left = T[ident[tgt], arrows] if m else np.array([], dtype=_INDEX)
    right = T[arrows, ident[src]] if m else np.array([], dtype=_INDEX)
    bad = np.flatnonzero((left != arrows) | (right != arrows))
    if bad.size:
        return Report.failing(check, {"reason": "identity law", "arrow": C.arrows[int(bad[0])]}, stats=stats)
    triples = 0
    for f in range(m):
        gf = T[:, f]
        gs_f = np.flatnonzero(gf >= 0)
        if gs_f.size == 0:
            continue
        hg = T[:, gs_f]
        mask = hg >= 0
        lhs = T[:, gf[gs_f]]
        rhs = np.where(mask, T[np.where(mask, hg, 0), f], -1)
        bad_mask = mask & (lhs != rhs)
        triples += int(mask.sum())
        if bad_mask.any():
            h, pos = (int(v) for v in np.argwhere(bad_mask)[0])
            g = int(gs_f[pos])
            stats["triples"] = triples
            return Report.failing(check, {"reason": "associativity",
                                          "triple": [C.arrows[h], C.arrows[g], C.arrows[f]]}, stats=stats)
    stats["triples"] = triples
    logger.debug("validated %r with %d composites and %d triples", C, int(gs.size), triples)
    return Report.passing(check, stats=stats)


def validate_functor(F: Functor) -> Report:
    """Check that F preserves endpoints, identities and composition"""
    check = "validate_functor"
    A, B = F.dom, F.cod
    objs, arrs = F.object_map, F.arrow_map
    stats = {"objects": A.n_objects, "arrows": A.n_arrows}
    if A.n_objects and (objs.min() < 0 or objs.max() >= B.n_objects):
        return Report.failing(check, {"reason": "object image out of range"}, stats=stats)
    if A.n_arrows and (arrs.min() < 0 or arrs.max() >= B.n_arrows):
        return Report.failing(check, {"reason": "arrow image out of range"}, stats=stats)
    endpoints = (B.sources[arrs] == objs[A.sources]) & (B.targets[arrs] == objs[A.targets])
    if not endpoints.all():
        a = int(np.flatnonzero(~endpoints)[0])
        return Report.failing(check, {"reason": "endpoints", "arrow": A.arrows[a]}, stats=stats)
    ids = arrs[A.identities] == B.identities[objs] if A.n_objects else np.array([], dtype=bool)
    if not ids.all():
        x = int(np.flatnonzero(~ids)[0])
        return Report.failing(check, {"reason": "identity", "object": A.objects[x]}, stats=stats)
    gs, fs = np.nonzero(A.table >= 0)
    lhs = arrs[A.table[gs, fs]]
    rhs = B.table[arrs[gs], arrs[fs]]
    stats["composites"] = int(gs.size)
    bad = np.flatnonzero(lhs != rhs)
    if bad.size:
        k = int(bad[0])
        return Report.failing(check, {"reason": "composition", "pair": [A.arrows[gs[k]], A.arrows[fs[k]]]},
                              stats=stats)
    return Report.passing(check, stats=stats)


def validate_transformation(alpha: NatTransformation) -> Report:
    """Check typing and naturality of every square"""
    check = "validate_transformation"
    F, G = alpha.source, alpha.target
    if F.dom != G.dom or F.cod != G.cod:
        return Report.failing(check, {"reason": "functors are not parallel"})
    A, B = F.dom, F.cod
    for x in range(A.n_objects):
        c = alpha.component(x)
        if B.src(c) != F.obj(x) or B.tgt(c) != G.obj(x):
            return Report.failing(check, {"reason": "component typing", "object": A.objects[x]})
    for a in range(A.n_arrows):
        s, t = A.src(a), A.tgt(a)
        if B.compose(alpha.component(t), F.arr(a)) != B.compose(G.arr(a), alpha.component(s)):
            return Report.failing(check, {"reason": "naturality", "arrow": A.arrows[a]},
                                  stats={"squares": a + 1})
    return Report.passing(check, stats={"squares": A.n_arrows})


# limits and constructions -------------------------------------------------

class Pullback(NamedTuple):
    """Strict pullback with its projections; objects are labelled by label pairs"""
    category: FinCategory
    left: Functor
    right: Functor

    def pair_object(self, a: int, b: int) -> int:
        return self.category.object_index((self.left.cod.objects[a], self.right.cod.objects[b]))

    def pair_arrow(self, f: int, g: int) -> int:
        return self.category.arrow_index((self.left.cod.arrows[f], self.right.cod.arrows[g]))


def pullback_category(F: Functor, G: Functor, name: str = "") -> Pullback:
    """Strict pullback of a cospan A -F-> C <-G- B"""
    if F.cod != G.cod:
        raise PreconditionError("pullback needs functors with a common codomain")
    A, B = F.dom, G.dom
    obj_pairs = [(int(a), int(b)) for a, b in np.argwhere(F.object_map[:, None] == G.object_map[None, :])]
    arr_pairs = [(int(f), int(g)) for f, g in np.argwhere(F.arrow_map[:, None] == G.arrow_map[None, :])]
    obj_id = {pair: i for i, pair in enumerate(obj_pairs)}
    arr_id = {pair: k for k, pair in enumerate(arr_pairs)}
    src = [obj_id[(A.src(f), B.src(g))] for f, g in arr_pairs]
    tgt = [obj_id[(A.tgt(f), B.tgt(g))] for f, g in arr_pairs]
    ident = [arr_id[(A.identity(a), B.identity(b))] for a, b in obj_pairs]

    def compose(k2: int, k1: int) -> int:
        (g1, g2), (f1, f2) = arr_pairs[k2], arr_pairs[k1]
        return arr_id[(int(A.table[g1, f1]), int(B.table[g2, f2]))]

    P = FinCategory.from_ids([(A.objects[a], B.objects[b]) for a, b in obj_pairs],
                             [(A.arrows[f], B.arrows[g]) for f, g in arr_pairs],
                             src, tgt, ident, compose, name=name or f"{A.name}x{B.name}")
    left = Functor(P, A, [a for a, _ in obj_pairs], [f for f, _ in arr_pairs], name="p1")
    right = Functor(P, B, [b for _, b in obj_pairs], [g for _, g in arr_pairs], name="p2")
    return Pullback(P, left, right)


def terminal_category() -> FinCategory:
    return FinCategory.from_ids(["*"], ["1*"], [0], [0], [0], lambda g, f: 0, name="1")


def walking_arrow() -> FinCategory:
    """0 -> 1"""
    return FinCategory.from_ids([0, 1], ["1_0", "1_1", "a"], [0, 1, 0], [0, 1, 1], [0, 1],
                                lambda g, f: f if g in (0, 1) else g, name="2")


def product_category(A: FinCategory, B: FinCategory) -> Pullback:
    """Product as the pullback over the terminal category"""
    one = terminal_category()
    return pullback_category(Functor.to_terminal(A, one), Functor.to_terminal(B, one),
                             name=f"{A.name}x{B.name}")


def pullback_map(source: Pullback, target: Pullback, left: Functor, right: Functor,
                 name: str = "") -> Functor:
    """The functor between pullbacks induced by componentwise functors"""
    P, Q = source.category, target.category
    sl, sr = source.left, source.right
    return Functor.from_functions(
        P, Q,
        lambda x: target.pair_object(left.obj(sl.obj(x)), right.obj(sr.obj(x))),
        lambda a: target.pair_arrow(left.arr(sl.arr(a)), right.arr(sr.arr(a))),
        name=name)


class ArrowCategory(NamedTuple):
    """C^2 with its domain and codomain projections"""
    category: FinCategory
    dom: Functor
    cod: Functor


def square_label(C: FinCategory, f: int, f2: int, u: int, v: int) -> Tuple[Label, Label, Label, Label]:
    return (C.arrows[f], C.arrows[f2], C.arrows[u], C.arrows[v])


def arrow_category(C: FinCategory) -> ArrowCategory:
    """Objects are arrows of C, arrows are commutative squares (u, v): f -> f'"""
    T = C.table
    squares: List[Tuple[int, int, int, int]] = []
    for f in range(C.n_arrows):
        for f2 in range(C.n_arrows):
            for u in C.hom(C.src(f), C.src(f2)):
                for v in C.hom(C.tgt(f), C.tgt(f2)):
                    if T[v, f] == T[f2, u]:
                        squares.append((f, f2, u, v))
    index = {sq: k for k, sq in enumerate(squares)}
    ident = [index[(f, f, C.identity(C.src(f)), C.identity(C.tgt(f)))] for f in range(C.n_arrows)]

    def compose(k2: int, k1: int) -> int:
        f, _, u, v = squares[k1]
        _, f3, u2, v2 = squares[k2]
        return index[(f, f3, int(T[u2, u]), int(T[v2, v]))]

    arrows = FinCategory.from_ids(
        list(C.arrows), [square_label(C, *sq) for sq in squares],
        [sq[0] for sq in squares], [sq[1] for sq in squares], ident, compose,
        name=f"{C.name}^2")
    dom = Functor(arrows, C, [C.src(f) for f in range(C.n_arrows)], [sq[2] for sq in squares], name="dom")
    cod = Functor(arrows, C, [C.tgt(f) for f in range(C.n_arrows)], [sq[3] for sq in squares], name="cod")
    return ArrowCategory(arrows, dom, cod)


def arrow_functor(F: Functor, source: ArrowCategory, target: ArrowCategory) -> Functor:
    """F^2 between arrow categories"""
    A, B = F.dom, F.cod

    def on_square(label: Tuple[Label, Label, Label, Label]) -> Tuple[Label, ...]:
        return tuple(B.arrows[F.arr(A.arrow_index(part))] for part in label)

    return Functor.by_labels(source.category, target.category,
                             lambda f: B.arrows[F.arr(A.arrow_index(f))], on_square,
                             name=f"{F.name}^2")


def subcategory(C: FinCategory, objects: Iterable[int], arrows: Iterable[int],
                name: str = "") -> Tuple[FinCategory, Functor]:
    """Subcategory on the given ids (assumed closed) with its inclusion"""
    objs = sorted(set(objects))
    arrs = sorted(set(arrows))
    obj_id = {x: i for i, x in enumerate(objs)}
    arr_id = {a: k for k, a in enumerate(arrs)}
    S = FinCategory.from_ids(
        [C.objects[x] for x in objs], [C.arrows[a] for a in arrs],
        [obj_id[C.src(a)] for a in arrs], [obj_id[C.tgt(a)] for a in arrs],
        [arr_id[C.identity(x)] for x in objs],
        lambda g, f: arr_id[int(C.table[arrs[g], arrs[f]])], name=name)
    return S, Functor(S, C, objs, arrs, name="incl")


def full_subcategory(C: FinCategory, objects: Iterable[int], name: str = "") -> Tuple[FinCategory, Functor]:
    keep = set(objects)
    arrows = [a for a in range(C.n_arrows) if C.src(a) in keep and C.tgt(a) in keep]
    return subcategory(C, keep, arrows, name=name)


def fiber_category(p: Functor, b: int, name: str = "") -> Tuple[FinCategory, Functor]:
    """Objects over b and arrows over its identity"""
    base_id = p.cod.identity(b)
    return subcategory(p.dom, p.fiber_over_object(b), p.arrows_over(base_id),
                       name=name or f"fiber({p.cod.objects[b]})")


def slice_category(C: FinCategory, x: int) -> Tuple[FinCategory, Functor]:
    """C/x with its forgetful functor to C"""
    T = C.table
    over = list(C.arrows_into(x))
    maps: List[Tuple[int, int, int]] = []
    for f in over:
        for f2 in over:
            for u in C.hom(C.src(f), C.src(f2)):
                if T[f2, u] == f:
                    maps.append((f, f2, u))
    obj_id = {f: i for i, f in enumerate(over)}
    index = {mp: k for k, mp in enumerate(maps)}
    ident = [index[(f, f, C.identity(C.src(f)))] for f in over]
    S = FinCategory.from_ids(
        [C.arrows[f] for f in over], [(C.arrows[u], C.arrows[f], C.arrows[f2]) for f, f2, u in maps],
        [obj_id[mp[0]] for mp in maps], [obj_id[mp[1]] for mp in maps], ident,
        lambda g, f: index[(maps[f][0], maps[g][1], int(T[maps[g][2], maps[f][2]]))],
        name=f"{C.name}/{C.objects[x]}")
    forget = Functor(S, C, [C.src(f) for f in over], [mp[2] for mp in maps], name="forget")
    return S, forget


# search ------------------------------------------------------------------

@dataclass
class SearchBudget:
    """Node budget shared by backtracking searches"""
    limit: Optional[int] = None
    spent: int = 0
    exhausted: bool = False

    def tick(self) -> bool:
        self.spent += 1
        if self.limit is not None and self.spent > self.limit:
            self.exhausted = True
        return not self.exhausted


def search_functors(X: FinCategory, C: FinCategory,
                    object_candidates: Optional[Callable[[int], Iterable[int]]] = None,
                    arrow_candidates: Optional[Callable[[int, int, int], Iterable[int]]] = None,
                    injective: bool = False,
                    budget: Optional[SearchBudget] = None) -> Iterator[Functor]:
    """Enumerate functors X -> C by backtracking, in canonical order

    arrow_candidates(a, x, y) lists allowed images of arrow a given the
    object images x, y of its endpoints (defaults to hom(x, y)). Objects
    are assigned first, then non-identity arrows, on an explicit stack.
    """
    budget = budget or SearchBudget()
    n = X.n_objects
    XT, CT = X.table, C.table
    composites: Dict[int, List[Tuple[int, int]]] = {}
    gs, fs = np.nonzero(XT >= 0)
    for g, f in zip(gs.tolist(), fs.tolist()):
        composites.setdefault(int(XT[g, f]), []).append((g, f))
    non_identity = [a for a in range(X.n_arrows) if not X.is_identity(a)]
    levels = n + len(non_identity)
    objs = [-1] * n
    arrs = [-1] * X.n_arrows
    used_objects: set = set()
    used_arrows: set = set()

    if levels == 0:
        yield Functor(X, C, [], [])
        return

    def consistent(a: int) -> bool:
        for g, f in composites.get(a, ()):
            if arrs[g] >= 0 and arrs[f] >= 0 and CT[arrs[g], arrs[f]] != arrs[a]:
                return False
        for f in X.arrows_into(X.src(a)):
            h = int(XT[a, f])
            if arrs[f] >= 0 and arrs[h] >= 0 and CT[arrs[a], arrs[f]] != arrs[h]:
                return False
        for g in X.arrows_out_of(X.tgt(a)):
            h = int(XT[g, a])
            if arrs[g] >= 0 and arrs[h] >= 0 and CT[arrs[g], arrs[a]] != arrs[h]:
                return False
        return True

    def options(level: int) -> List[int]:
        if level < n:
            return list(object_candidates(level)) if object_candidates else list(range(C.n_objects))
        a = non_identity[level - n]
        x, y = objs[X.src(a)], objs[X.tgt(a)]
        return list(arrow_candidates(a, x, y)) if arrow_candidates else list(C.hom(x, y))

    def undo(level: int) -> None:
        if level < n:
            c = objs[level]
            if c >= 0:
                used_objects.discard(c)
                used_arrows.discard(C.identity(c))
                objs[level] = -1
                arrs[X.identity(level)] = -1
            return
        a = non_identity[level - n]
        if arrs[a] >= 0:
            used_arrows.discard(arrs[a])
            arrs[a] = -1

    def place(level: int, c: int) -> bool:
        if level < n:
            if injective and c in used_objects:
                return False
            objs[level] = c
            arrs[X.identity(level)] = C.identity(c)
            if injective:
                used_objects.add(c)
                used_arrows.add(C.identity(c))
            return True
        a = non_identity[level - n]
        if injective and c in used_arrows:
            return False
        arrs[a] = c
        if not consistent(a):
            arrs[a] = -1
            return False
        if injective:
            used_arrows.add(c)
        return True

    choices = [[] for _ in range(levels)]
    position = [0] * levels
    choices[0] = options(0)
    level = 0
    while level >= 0:
        if not budget.tick():
            return
        undo(level)
        placed = False
        while position[level] < len(choices[level]):
            c = choices[level][position[level]]
            position[level] += 1
            if place(level, c):
                placed = True
                break
        if not placed:
            level -= 1
            continue
        if level + 1 == levels:
            yield Functor(X, C, list(objs), list(arrs))
            continue
        level += 1
        choices[level] = options(level)
        position[level] = 0


def all_functors(X: FinCategory, C: FinCategory, budget: Optional[SearchBudget] = None) -> List[Functor]:
    return list(search_functors(X, C, budget=budget))


def mediating_functors(left: Functor, right: Functor, pullback: Pullback,
                       budget: Optional[SearchBudget] = None) -> List[Functor]:
    """All u: X -> P with p1 u = left and p2 u = right, by brute force over every functor"""
    if left.dom != right.dom:
        raise PreconditionError("cone legs need a common domain")
    return [u for u in search_functors(left.dom, pullback.category, budget=budget)
            if u.then(pullback.left) == left and u.then(pullback.right) == right]


def isomorphisms(C: FinCategory, D: FinCategory,
                 object_candidates: Optional[Callable[[int], Iterable[int]]] = None,
                 arrow_candidates: Optional[Callable[[int, int, int], Iterable[int]]] = None,
                 budget: Optional[SearchBudget] = None) -> Iterator[Functor]:
    """Isomorphisms C -> D in canonical order, optionally narrowed like search_functors"""
    if C.n_objects != D.n_objects or C.n_arrows != D.n_arrows:
        return
    signature_c = [(len(C.arrows_out_of(x)), len(C.arrows_into(x))) for x in range(C.n_objects)]
    signature_d = [(len(D.arrows_out_of(y)), len(D.arrows_into(y))) for y in range(D.n_objects)]

    def objects(x: int) -> List[int]:
        allowed = object_candidates(x) if object_candidates else range(D.n_objects)
        return [y for y in allowed if signature_d[y] == signature_c[x]]

    yield from search_functors(C, D, object_candidates=objects, arrow_candidates=arrow_candidates,
                               injective=True, budget=budget)


def find_isomorphism(C: FinCategory, D: FinCategory,
                     budget: Optional[SearchBudget] = None) -> Optional[Functor]:
    """First isomorphism C -> D in canonical order, or None"""
    return next(isomorphisms(C, D, budget=budget), None)


# chosen pullbacks ----------------------------------------------------------

class Cone(NamedTuple):
    apex: int
    left: int
    right: int


def pullback_cones(C: FinCategory, u: int, f: int) -> List[Cone]:
    """All commuting cones over the cospan u: x -> b <- a: f, in canonical order"""
    if C.tgt(u) != C.tgt(f):
        raise PreconditionError("not a cospan")
    T = C.table
    x, a = C.src(u), C.src(f)
    cones = []
    for P in range(C.n_objects):
        for p in C.hom(P, x):
            for q in C.hom(P, a):
                if T[u, p] == T[f, q]:
                    cones.append(Cone(P, p, q))
    return cones


def chosen_pullback(C: FinCategory, u: int, f: int) -> Optional[Cone]:
    """Least-id universal cone over u and f, memoized per category"""
    key = ("pb", u, f)
    if key in C._cache:
        return C._cache[key]
    T = C.table
    cones = pullback_cones(C, u, f)
    chosen = None
    for cand in cones:
        universal = True
        for other in cones:
            count = sum(1 for k in C.hom(other.apex, cand.apex)
                        if T[cand.left, k] == other.left and T[cand.right, k] == other.right)
            if count != 1:
                universal = False
                break
        if universal:
            chosen = cand
            break
    C._cache[key] = chosen
    return chosen


def has_pullbacks(C: FinCategory) -> Report:
    """Every cospan has a universal cone"""
    check = "has_pullbacks"
    count = 0
    for b in range(C.n_objects):
        into = C.arrows_into(b)
        for u, f in product(into, into):
            count += 1
            if chosen_pullback(C, u, f) is None:
                return Report.failing(check, {"cospan": [C.arrows[u], C.arrows[f]]}, stats={"cospans": count})
    return Report.passing(check, stats={"cospans": count})


def mediating_arrow(C: FinCategory, cone: Cone, left: int, right: int) -> int:
    """The unique k with cone.left k = left and cone.right k = right"""
    T = C.table
    for k in C.hom(C.src(left), cone.apex):
        if T[cone.left, k] == left and T[cone.right, k] == right:
            return k
    raise PreconditionError("cone does not factor through the chosen pullback")
