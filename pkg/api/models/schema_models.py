"""
Document Models - Pydantic Schemas for Every JSON File
======================================================
Defines the on-disk shape of categories, functors, 2-categories, double
categories, double functors, cleavages and indexed-data recipes.
Every document carries a `kind` and a `schema_version`.

Models:
- CategoryDocument: objects, arrows with integer endpoints, identities and
  a dense composition table (-1 marks non-composable pairs)
- FunctorDocument, TwoCategoryDocument, TwoFunctorDocument
- DoubleCategoryDocument: E0, E1, src, tgt, y, tensor and associator
- DoubleFunctorDocument, ClovenDoubleFibrationDocument
- IndexedRecipeDocument: how to build a stock indexed double category
- CorpusManifest: the files of a generated corpus with expected verdicts

Labels are arbitrary JSON scalars or (nested) lists; lists become tuples
when loaded.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

DOCUMENT_SCHEMA_VERSION = "1.0"


class Document(BaseModel):
    """Common header of every file"""
    model_config = ConfigDict(extra="forbid")

    schema_version: str = DOCUMENT_SCHEMA_VERSION
    name: str = ""


class ArrowEntry(BaseModel):
    """One arrow (or 2-cell): label and integer endpoints"""
    model_config = ConfigDict(extra="forbid")

    id: Any
    src: int = Field(ge=0)
    tgt: int = Field(ge=0)


class CategoryDocument(Document):
    kind: Literal["category"] = "category"
    objects: List[Any] = []
    arrows: List[ArrowEntry] = []
    identities: List[int] = []
    compose: List[List[int]] = []


class MapEntry(BaseModel):
    """Object and arrow images of a functor, as id lists"""
    model_config = ConfigDict(extra="forbid")

    objects: List[int] = []
    arrows: List[int] = []


class FunctorDocument(Document):
    kind: Literal["functor"] = "functor"
    dom: CategoryDocument
    cod: CategoryDocument
    objects: List[int] = []
    arrows: List[int] = []


class TwoCategoryDocument(Document):
    kind: Literal["2-category"] = "2-category"
    underlying: CategoryDocument
    cells: List[ArrowEntry] = []
    id2: List[int] = []
    vcompose: List[List[int]] = []
    hcompose: List[List[int]] = []


class TwoFunctorDocument(Document):
    kind: Literal["2-functor"] = "2-functor"
    dom: TwoCategoryDocument
    cod: TwoCategoryDocument
    objects: List[int] = []
    arrows: List[int] = []
    cells: List[int] = []


class TensorEntry(BaseModel):
    """Composites of composable proarrow pairs and cell pairs: [first, second, result]"""
    model_config = ConfigDict(extra="forbid")

    objects: List[Tuple[int, int, int]] = []
    arrows: List[Tuple[int, int, int]] = []


class DoubleCategoryDocument(Document):
    kind: Literal["double_category"] = "double_category"
    E0: CategoryDocument
    E1: CategoryDocument
    src: MapEntry
    tgt: MapEntry
    y: MapEntry
    tensor: TensorEntry
    associator: List[Tuple[int, int, int, int]] = []
    window: Optional[dict] = None


class DoubleFunctorDocument(Document):
    kind: Literal["double_functor"] = "double_functor"
    flavor: Literal["lax", "pseudo", "strict"] = "strict"
    dom: DoubleCategoryDocument
    cod: DoubleCategoryDocument
    F0: MapEntry
    F1: MapEntry
    phi: List[Tuple[int, int, int]] = []
    iota: List[Tuple[int, int]] = []


class ClovenDoubleFibrationDocument(Document):
    """A strict double functor with chosen lifts [base arrow, object, lift] per level"""
    kind: Literal["cloven_double_fibration"] = "cloven_double_fibration"
    functor: DoubleFunctorDocument
    cleavage0: List[Tuple[int, int, int]] = []
    cleavage1: List[Tuple[int, int, int]] = []


class IndexedRecipeDocument(Document):
    """A stock indexed double category: providers are configured, not serialized"""
    kind: Literal["indexed"] = "indexed"
    example: Literal["constant", "representable", "slice", "family", "profunctor"]
    base: Optional[DoubleCategoryDocument] = None
    category: Optional[CategoryDocument] = None
    sizes: List[int] = [1]
    apex: int = Field(default=1, ge=0)
    target: int = Field(default=0, ge=0)
    left: List[int] = []
    right: List[int] = []


class CorpusBounds(BaseModel):
    """Size limits for generated corpus instances"""
    model_config = ConfigDict(extra="forbid")

    objects: int = Field(default=4, ge=1, le=6)
    random: int = Field(default=4, ge=1, le=50)
    density: float = Field(default=0.5, ge=0.0, le=1.0)
    window: int = Field(default=1, ge=1, le=2)


class CorpusEntry(BaseModel):
    """One corpus file and the verdicts expected of it"""
    model_config = ConfigDict(extra="forbid")

    file: str
    kind: str
    expect: Dict[str, str] = {}


class CorpusManifest(Document):
    kind: Literal["corpus"] = "corpus"
    seed: int
    bounds: CorpusBounds
    entries: List[CorpusEntry] = []


DOCUMENT_KINDS = {
    "category": CategoryDocument,
    "functor": FunctorDocument,
    "2-category": TwoCategoryDocument,
    "2-functor": TwoFunctorDocument,
    "double_category": DoubleCategoryDocument,
    "double_functor": DoubleFunctorDocument,
    "cloven_double_fibration": ClovenDoubleFibrationDocument,
    "indexed": IndexedRecipeDocument,
    "corpus": CorpusManifest,
}
