"""
Serialization - Documents, Loading and Saving
=============================================
Converts between core structures and the pydantic document models, and
reads and writes them as canonical UTF-8 JSON (sorted keys), so that
saving a loaded file reproduces its canonical form.

Features:
- Structural checks with location paths (`E1.compose[3][2]`,
  `tensor.objects[4]`) raised as SchemaError
- Documents for categories, functors, 2-categories, 2-functors, double
  categories, double functors and cloven double fibrations
- Indexed recipes built into IndexedDoubleCategory values
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from api.models.report_models import plain
from api.models.schema_models import (DOCUMENT_KINDS, DOCUMENT_SCHEMA_VERSION, ArrowEntry, CategoryDocument,
                                      ClovenDoubleFibrationDocument, DoubleCategoryDocument,
                                      DoubleFunctorDocument, FunctorDocument, IndexedRecipeDocument,
                                      MapEntry, TensorEntry, TwoCategoryDocument, TwoFunctorDocument)
from core.dblcat import DoubleFunctor, PseudoDoubleCategory, make_double_category
from core.dblfib import DoubleCleavage
from core.elements import IndexedDoubleCategory
from core.errors import SchemaError
from core.fib import ClovenFibration, lift_pairs
from core.fincat import FinCategory, Functor, Label
from core.indexed_examples import indexed_examples
from core.twocat import Fin2Category, TwoFunctor

logger = logging.getLogger(__name__)

Loaded = Union[FinCategory, Functor, Fin2Category, TwoFunctor, PseudoDoubleCategory, DoubleFunctor,
               "ClovenDoubleFibration", IndexedDoubleCategory, BaseModel]


class ClovenDoubleFibration(NamedTuple):
    """A strict double functor with a given double cleavage"""
    functor: DoubleFunctor
    cleavage: DoubleCleavage


# locations and labels ----------------------------------------------------------

def _location(loc: Sequence[Union[str, int]]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path


def _label(value: Any, where: str) -> Label:
    if isinstance(value, list):
        return tuple(_label(v, where) for v in value)
    if isinstance(value, dict):
        raise SchemaError("labels must be scalars or lists", where)
    return value


def _ids(values: Sequence[int], size: int, where: str, length: Optional[int] = None) -> List[int]:
    if length is not None and len(values) != length:
        raise SchemaError(f"expected {length} entries, found {len(values)}", where)
    for i, v in enumerate(values):
        if not 0 <= v < size:
            raise SchemaError(f"id {v} out of range 0..{size - 1}", f"{where}[{i}]")
    return list(values)


def _dense(rows: Sequence[Sequence[int]], size: int, defined: Callable[[int, int], bool],
           where: str) -> np.ndarray:
    """A size x size table whose entry [g][f] is set exactly when defined(g, f)"""
    if len(rows) != size:
        raise SchemaError(f"expected {size} rows, found {len(rows)}", where)
    for g, row in enumerate(rows):
        if len(row) != size:
            raise SchemaError(f"expected {size} entries, found {len(row)}", f"{where}[{g}]")
        for f, value in enumerate(row):
            if defined(g, f):
                if not 0 <= value < size:
                    raise SchemaError(f"composable pair needs a composite, found {value}", f"{where}[{g}][{f}]")
            elif value != -1:
                raise SchemaError(f"non-composable pair must be -1, found {value}", f"{where}[{g}][{f}]")
    return np.array(rows, dtype=np.int32).reshape(size, size)


def _unique(labels: Sequence[Label], where: str) -> None:
    seen = set()
    for i, label in enumerate(labels):
        if label in seen:
            raise SchemaError(f"duplicate id {label!r}", f"{where}[{i}]")
        seen.add(label)


def _prefix(where: str, field: str) -> str:
    return f"{where}.{field}" if where else field


# categories and functors ----------------------------------------------------------

def category_to_document(C: FinCategory) -> CategoryDocument:
    return CategoryDocument(
        name=C.name, objects=plain(list(C.objects)),
        arrows=[ArrowEntry(id=plain(C.arrows[a]), src=C.src(a), tgt=C.tgt(a)) for a in range(C.n_arrows)],
        identities=[int(i) for i in C.identities], compose=C.table.tolist())


def category_from_document(doc: CategoryDocument, where: str = "") -> FinCategory:
    objects = [_label(x, f"{_prefix(where, 'objects')}[{i}]") for i, x in enumerate(doc.objects)]
    arrows = [_label(entry.id, f"{_prefix(where, 'arrows')}[{a}].id") for a, entry in enumerate(doc.arrows)]
    _unique(objects, _prefix(where, "objects"))
    _unique(arrows, _prefix(where, "arrows"))
    n, m = len(objects), len(arrows)
    for a, entry in enumerate(doc.arrows):
        for side in ("src", "tgt"):
            if getattr(entry, side) >= n:
                raise SchemaError("unknown object id", f"{_prefix(where, 'arrows')}[{a}].{side}")
    src = [entry.src for entry in doc.arrows]
    tgt = [entry.tgt for entry in doc.arrows]
    identities = _ids(doc.identities, m, _prefix(where, "identities"), length=n)
    for x, a in enumerate(identities):
        if src[a] != x or tgt[a] != x:
            raise SchemaError(f"identity of object {objects[x]!r} is not an endo-arrow on it",
                              f"{_prefix(where, 'identities')}[{x}]")
    table = _dense(doc.compose, m, lambda g, f: tgt[f] == src[g], _prefix(where, "compose"))
    return FinCategory(objects, arrows, src, tgt, identities, table, name=doc.name)


def _map_entry(F: Functor) -> MapEntry:
    return MapEntry(objects=F.object_map.tolist(), arrows=F.arrow_map.tolist())


def _functor(entry: MapEntry, dom: FinCategory, cod: FinCategory, where: str, name: str = "") -> Functor:
    objects = _ids(entry.objects, cod.n_objects, _prefix(where, "objects"), length=dom.n_objects)
    arrows = _ids(entry.arrows, cod.n_arrows, _prefix(where, "arrows"), length=dom.n_arrows)
    return Functor(dom, cod, objects, arrows, name=name)


def functor_to_document(F: Functor) -> FunctorDocument:
    return FunctorDocument(name=F.name, dom=category_to_document(F.dom), cod=category_to_document(F.cod),
                           objects=F.object_map.tolist(), arrows=F.arrow_map.tolist())


def functor_from_document(doc: FunctorDocument) -> Functor:
    dom = category_from_document(doc.dom, "dom")
    cod = category_from_document(doc.cod, "cod")
    return _functor(MapEntry(objects=doc.objects, arrows=doc.arrows), dom, cod, "", name=doc.name)


# 2-categories ------------------------------------------------------------------------

def two_category_to_document(K: Fin2Category) -> TwoCategoryDocument:
    return TwoCategoryDocument(
        name=K.name, underlying=category_to_document(K.underlying),
        cells=[ArrowEntry(id=plain(K.cells[c]), src=K.cell_src(c), tgt=K.cell_tgt(c)) for c in range(K.n_cells)],
        id2=[K.id2(a) for a in range(K.underlying.n_arrows)],
        vcompose=K.vtable.tolist(), hcompose=K.htable.tolist())


def two_category_from_document(doc: TwoCategoryDocument, where: str = "") -> Fin2Category:
    K = category_from_document(doc.underlying, _prefix(where, "underlying"))
    cells = [_label(entry.id, f"{_prefix(where, 'cells')}[{c}].id") for c, entry in enumerate(doc.cells)]
    _unique(cells, _prefix(where, "cells"))
    for c, entry in enumerate(doc.cells):
        for side in ("src", "tgt"):
            if getattr(entry, side) >= K.n_arrows:
                raise SchemaError("unknown arrow id", f"{_prefix(where, 'cells')}[{c}].{side}")
        if K.src(entry.src) != K.src(entry.tgt) or K.tgt(entry.src) != K.tgt(entry.tgt):
            raise SchemaError("2-cell between non-parallel arrows", f"{_prefix(where, 'cells')}[{c}]")
    csrc = [entry.src for entry in doc.cells]
    ctgt = [entry.tgt for entry in doc.cells]
    k = len(cells)
    id2 = _ids(doc.id2, k, _prefix(where, "id2"), length=K.n_arrows)
    vtable = _dense(doc.vcompose, k, lambda b, a: ctgt[a] == csrc[b], _prefix(where, "vcompose"))
    htable = _dense(doc.hcompose, k, lambda b, a: K.src(csrc[b]) == K.tgt(csrc[a]), _prefix(where, "hcompose"))
    return Fin2Category(K, cells, csrc, ctgt, id2, vtable, htable, name=doc.name)


def two_functor_to_document(P: TwoFunctor) -> TwoFunctorDocument:
    return TwoFunctorDocument(name=P.name, dom=two_category_to_document(P.dom), cod=two_category_to_document(P.cod),
                              objects=P.functor.object_map.tolist(), arrows=P.functor.arrow_map.tolist(),
                              cells=P.cell_map.tolist())


def two_functor_from_document(doc: TwoFunctorDocument) -> TwoFunctor:
    dom = two_category_from_document(doc.dom, "dom")
    cod = two_category_from_document(doc.cod, "cod")
    F = _functor(MapEntry(objects=doc.objects, arrows=doc.arrows), dom.underlying, cod.underlying, "", name=doc.name)
    cells = _ids(doc.cells, cod.n_cells, "cells", length=dom.n_cells)
    return TwoFunctor(dom, cod, F, cells, name=doc.name)


# double categories ---------------------------------------------------------------------

def double_category_to_document(D: PseudoDoubleCategory) -> DoubleCategoryDocument:
    associator = [(m, n, p, c) for (m, n, p), c in sorted(D.associator_components.items())
                  if not D.E1.is_identity(c)]
    return DoubleCategoryDocument(
        name=D.name, E0=category_to_document(D.E0), E1=category_to_document(D.E1),
        src=_map_entry(D.src), tgt=_map_entry(D.tgt), y=_map_entry(D.unit),
        tensor=TensorEntry(objects=[(m, n, D.tensor_obj(m, n)) for m, n in D.composable_pairs()],
                           arrows=[(a, b, D.tensor_arr(a, b)) for a, b in D.composable_arrow_pairs()]),
        associator=associator, window=plain(D.window) if D.window is not None else None)


def _composites(entries: Sequence[Tuple[int, int, int]], size: int, composable: Callable[[int, int], bool],
                where: str) -> Dict[Tuple[int, int], int]:
    result: Dict[Tuple[int, int], int] = {}
    for i, (first, second, value) in enumerate(entries):
        if not (0 <= first < size and 0 <= second < size and 0 <= value < size):
            raise SchemaError("id out of range", f"{where}[{i}]")
        if not composable(first, second):
            raise SchemaError("pair is not composable", f"{where}[{i}]")
        if (first, second) in result:
            raise SchemaError("duplicate composite", f"{where}[{i}]")
        result[(first, second)] = value
    return result


def _lookup(table: Dict[Tuple[int, int], int], where: str, labels: Sequence[Label]) -> Callable[[int, int], int]:
    def composite(first: int, second: int) -> int:
        try:
            return table[(first, second)]
        except KeyError:
            raise SchemaError(f"missing composite for ({labels[first]!r}, {labels[second]!r})", where) from None
    return composite


def double_category_from_document(doc: DoubleCategoryDocument, where: str = "") -> PseudoDoubleCategory:
    E0 = category_from_document(doc.E0, _prefix(where, "E0"))
    E1 = category_from_document(doc.E1, _prefix(where, "E1"))
    src = _functor(doc.src, E1, E0, _prefix(where, "src"), name="src")
    tgt = _functor(doc.tgt, E1, E0, _prefix(where, "tgt"), name="tgt")
    unit = _functor(doc.y, E0, E1, _prefix(where, "y"), name="y")
    objects = _composites(doc.tensor.objects, E1.n_objects, lambda m, n: tgt.obj(m) == src.obj(n),
                          _prefix(where, "tensor.objects"))
    arrows = _composites(doc.tensor.arrows, E1.n_arrows, lambda a, b: tgt.arr(a) == src.arr(b),
                         _prefix(where, "tensor.arrows"))
    given: Dict[Tuple[int, int, int], int] = {}
    for i, (m, n, p, c) in enumerate(doc.associator):
        if not all(0 <= v < E1.n_objects for v in (m, n, p)) or not 0 <= c < E1.n_arrows:
            raise SchemaError("id out of range", f"{_prefix(where, 'associator')}[{i}]")
        if tgt.obj(m) != src.obj(n) or tgt.obj(n) != src.obj(p):
            raise SchemaError("triple is not composable", f"{_prefix(where, 'associator')}[{i}]")
        given[(m, n, p)] = c
    tensor_obj = _lookup(objects, _prefix(where, "tensor.objects"), E1.objects)
    tensor_arr = _lookup(arrows, _prefix(where, "tensor.arrows"), E1.arrows)

    def associator(m: int, n: int, p: int) -> int:
        if (m, n, p) in given:
            return given[(m, n, p)]
        return E1.identity(tensor_obj(tensor_obj(m, n), p))

    D = make_double_category(E0, E1, src, tgt, unit, tensor_obj, tensor_arr, associator, name=doc.name)
    for pairs, table, field in ((D.composable_pairs(), objects, "tensor.objects"),
                                (D.composable_arrow_pairs(), arrows, "tensor.arrows")):
        for pair in pairs:
            if pair not in table:
                raise SchemaError(f"missing composite for ids {list(pair)}", _prefix(where, field))
    D.window = doc.window
    return D


def double_functor_to_document(F: DoubleFunctor) -> DoubleFunctorDocument:
    E1 = F.cod.E1
    return DoubleFunctorDocument(
        name=F.name, flavor=F.flavor.value,
        dom=double_category_to_document(F.dom), cod=double_category_to_document(F.cod),
        F0=_map_entry(F.F0), F1=_map_entry(F.F1),
        phi=[(m, n, c) for (m, n), c in sorted(F.phi.items()) if not E1.is_identity(c)],
        iota=[(x, c) for x, c in sorted(F.iota.items()) if not E1.is_identity(c)])


def double_functor_from_document(doc: DoubleFunctorDocument, where: str = "") -> DoubleFunctor:
    dom = double_category_from_document(doc.dom, _prefix(where, "dom"))
    cod = double_category_from_document(doc.cod, _prefix(where, "cod"))
    F0 = _functor(doc.F0, dom.E0, cod.E0, _prefix(where, "F0"), name=f"{doc.name}0")
    F1 = _functor(doc.F1, dom.E1, cod.E1, _prefix(where, "F1"), name=f"{doc.name}1")
    pairs = set(dom.composable_pairs())
    phi = {}
    for i, (m, n, c) in enumerate(doc.phi):
        if (m, n) not in pairs or not 0 <= c < cod.E1.n_arrows:
            raise SchemaError("comparison cell for an unknown pair", f"{_prefix(where, 'phi')}[{i}]")
        phi[(m, n)] = c
    iota = {}
    for i, (x, c) in enumerate(doc.iota):
        if not 0 <= x < dom.E0.n_objects or not 0 <= c < cod.E1.n_arrows:
            raise SchemaError("id out of range", f"{_prefix(where, 'iota')}[{i}]")
        iota[x] = c
    return DoubleFunctor(dom, cod, F0, F1, phi, iota, flavor=doc.flavor, name=doc.name)


# cleavages ---------------------------------------------------------------------------------

def _cleavage_entries(c: ClovenFibration) -> List[Tuple[int, int, int]]:
    return [(u, e, lift) for (u, e), lift in sorted(c.cleavage.items())]


def _cleavage(p: Functor, entries: Sequence[Tuple[int, int, int]], where: str, name: str) -> ClovenFibration:
    chosen = {}
    for i, (u, e, lift) in enumerate(entries):
        if not (0 <= u < p.cod.n_arrows and 0 <= e < p.dom.n_objects and 0 <= lift < p.dom.n_arrows):
            raise SchemaError("id out of range", f"{where}[{i}]")
        if p.cod.tgt(u) != p.obj(e) or p.dom.tgt(lift) != e or p.arr(lift) != u:
            raise SchemaError("lift does not lie over its base arrow", f"{where}[{i}]")
        chosen[(u, e)] = lift
    for u, e in lift_pairs(p):
        if (u, e) not in chosen:
            raise SchemaError(f"missing lift of {p.cod.arrows[u]!r} at {p.dom.objects[e]!r}", where)
    return ClovenFibration(p, chosen, name=name)


def cloven_to_document(value: ClovenDoubleFibration) -> ClovenDoubleFibrationDocument:
    return ClovenDoubleFibrationDocument(name=value.functor.name, functor=double_functor_to_document(value.functor),
                                         cleavage0=_cleavage_entries(value.cleavage.cleavage0),
                                         cleavage1=_cleavage_entries(value.cleavage.cleavage1))


def cloven_from_document(doc: ClovenDoubleFibrationDocument) -> ClovenDoubleFibration:
    P = double_functor_from_document(doc.functor, "functor")
    return ClovenDoubleFibration(P, DoubleCleavage(_cleavage(P.F0, doc.cleavage0, "cleavage0", "c0"),
                                                   _cleavage(P.F1, doc.cleavage1, "cleavage1", "c1")))


# indexed recipes -------------------------------------------------------------------------------

def indexed_from_document(doc: IndexedRecipeDocument) -> IndexedDoubleCategory:
    """Build the stock indexed double category a recipe names"""
    base = double_category_from_document(doc.base, "base") if doc.base is not None else None
    category = category_from_document(doc.category, "category") if doc.category is not None else None
    left, right = doc.left, doc.right
    if category is not None:
        left = _ids(doc.left, category.n_objects, "left")
        right = _ids(doc.right, category.n_objects, "right")
    return indexed_examples(doc.example, base, category, target=doc.target, sizes=doc.sizes, apex=doc.apex,
                            left=left, right=right)


# documents <-> values -------------------------------------------------------------------------

_WRITERS: List[Tuple[type, Callable[[Any], BaseModel]]] = [
    (FinCategory, category_to_document),
    (Functor, functor_to_document),
    (Fin2Category, two_category_to_document),
    (TwoFunctor, two_functor_to_document),
    (PseudoDoubleCategory, double_category_to_document),
    (DoubleFunctor, double_functor_to_document),
    (ClovenDoubleFibration, cloven_to_document),
]

_READERS: Dict[str, Callable[[Any], Any]] = {
    "category": category_from_document,
    "functor": functor_from_document,
    "2-category": two_category_from_document,
    "2-functor": two_functor_from_document,
    "double_category": double_category_from_document,
    "double_functor": double_functor_from_document,
    "cloven_double_fibration": cloven_from_document,
    "indexed": indexed_from_document,
    "corpus": lambda doc: doc,
}


def to_document(value: Any) -> BaseModel:
    if isinstance(value, BaseModel):
        return value
    for kind, writer in _WRITERS:
        if isinstance(value, kind):
            return writer(value)
    raise SchemaError(f"cannot serialize {type(value).__name__}")


def parse_document(data: Any) -> BaseModel:
    """Validate a decoded JSON value against the model its `kind` names"""
    if not isinstance(data, dict):
        raise SchemaError("document must be a JSON object")
    kind = data.get("kind")
    if kind not in DOCUMENT_KINDS:
        raise SchemaError(f"unknown document kind {kind!r}", "kind")
    version = str(data.get("schema_version", DOCUMENT_SCHEMA_VERSION))
    if version.split(".")[0] != DOCUMENT_SCHEMA_VERSION.split(".")[0]:
        raise SchemaError(f"unsupported schema version {version!r}", "schema_version")
    try:
        return DOCUMENT_KINDS[kind].model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        raise SchemaError(error["msg"], _location(error["loc"])) from None


def from_document(doc: BaseModel) -> Loaded:
    return _READERS[doc.kind](doc)


def dumps(value: Any) -> str:
    """Canonical JSON text of a value or document"""
    data = to_document(value).model_dump(mode="json")
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Loaded:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, f"line {e.lineno} column {e.colno}") from None
    return from_document(parse_document(data))


def save(value: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(value), encoding="utf-8")
    logger.debug("saved %s", path)
    return path


def load(path: Union[str, Path]) -> Loaded:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"cannot read file: {e}", str(path)) from None
    return loads(text)


def load_document(path: Union[str, Path]) -> BaseModel:
    """The validated document without building the core value"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"cannot read file: {e}", str(path)) from None
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, f"line {e.lineno} column {e.colno}") from None
    return parse_document(data)
