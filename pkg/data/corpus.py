"""
Corpus Generator - Seeded Instances with Expected Verdicts
==========================================================
Writes a deterministic corpus of categories, functors, double functors,
cloven double fibrations, 2-functors and indexed recipes, together with a
manifest recording the verdict each checker is expected to return.

Batches:
- categories: stock shapes, random posets and a mutated composition table
- fibrations: domain and codomain projections, slice projections,
  elements of constant presheaves, and non-fibrations
- double: domain and codomain double fibrations, the image functor of a
  span window, a cloven but not split instance, a quintet non-fibration
- two_functors: projections and identities, with at least three negatives
- indexed: constant, representable, slice, family and profunctor recipes

Each batch draws its random seeds from (seed, batch number) only, so the
corpus is identical whether batches run serially or in a process pool.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from api.models.schema_models import CorpusBounds, CorpusEntry, CorpusManifest, IndexedRecipeDocument
from core.dblcat import (DoubleFunctor, PseudoDoubleCategory, arrow_double, cod_double, quintet, quintet_functor,
                         terminal_double, vertically_trivial, walking_proarrow)
from core.dblfib import DoubleCleavage
from core.fib import ClovenFibration
from core.fincat import FinCategory, Functor, arrow_category, product_category, slice_category, \
    terminal_category, walking_arrow
from core.providers import SetWindow, image_functor, involutive_monoid, rel_window, span_window
from core.serialization import ClovenDoubleFibration, dumps, save, to_document
from core.twocat import TwoFunctor, chains_2category, locally_discrete, product_2category, walking_2cell
from data.shapes import chain, cospan_poset, divisor_lattice, generate_shape, random_poset

logger = logging.getLogger(__name__)


class CorpusItem(NamedTuple):
    name: str
    value: Any
    expect: Dict[str, str]


PASS, FAIL = "pass", "fail"


def _seeds(seed: int, batch: int, count: int) -> List[int]:
    rng = np.random.default_rng([seed, batch])
    return [int(s) for s in rng.integers(0, 2 ** 31 - 1, size=count)]


def _random_posets(seed: int, batch: int, bounds: CorpusBounds) -> List[FinCategory]:
    rng = np.random.default_rng([seed, batch, 1])
    return [random_poset(s, int(rng.integers(2, bounds.objects + 1)), bounds.density, name=f"P{i}")
            for i, s in enumerate(_seeds(seed, batch, bounds.random))]


# instances used outside the corpus as well -----------------------------------------

def mutated_cyclic_group() -> FinCategory:
    """Z/3 with r after r replaced by the identity: associativity fails"""
    Z3 = FinCategory.from_ids(["*"], ["e", "r", "r2"], [0, 0, 0], [0, 0, 0], [0], lambda g, f: (g + f) % 3,
                              name="Z3")
    return Z3.with_composite(1, 1, 0)


def acyclic_image_window() -> DoubleFunctor:
    """im: Span -> Rel on sets a(1), b(2), c(1) with bounds a->b: 2, b->c: 1, a->c: 2"""
    window = SetWindow({"a": 1, "b": 2, "c": 1}, bounds={("a", "b"): 2, ("b", "c"): 1, ("a", "c"): 2})
    return image_functor(span_window(window), rel_window(window))


def involution_fibration() -> ClovenDoubleFibration:
    """B(Inv) -> 1 with the chosen lift at a taken to be the involution s"""
    D = involutive_monoid()
    one = terminal_double()
    P = DoubleFunctor(D, one, Functor.to_terminal(D.E0, one.E0), Functor.to_terminal(D.E1, one.E1), name="Inv->1")
    c0 = ClovenFibration(P.F0, {(0, 0): 0}, name="c0")
    c1 = ClovenFibration(P.F1, {(0, D.E1.object_index("I")): D.E1.arrow_index("1_I"),
                                (0, D.E1.object_index("a")): D.E1.arrow_index("s")}, name="c1")
    return ClovenDoubleFibration(P, DoubleCleavage(c0, c1))


def locally_discrete_functor(F: Functor) -> TwoFunctor:
    return TwoFunctor(locally_discrete(F.dom), locally_discrete(F.cod), F, F.arrow_map, name=F.name)


def collapse_2cell() -> TwoFunctor:
    """f, g: 0 -> 1 both sent to the walking arrow: not a fibration"""
    K = walking_2cell()
    L = locally_discrete(walking_arrow())

    def arrow(label: str) -> str:
        return "a" if label in ("f", "g") else label

    return TwoFunctor.by_labels(K, L, lambda x: x, arrow, lambda c: (arrow(c[0]), arrow(c[1])), name="collapse")


def squares(C: FinCategory) -> PseudoDoubleCategory:
    """Commutative squares of C as a double category"""
    return quintet(locally_discrete(C))


# batches -----------------------------------------------------------------------

def _categories(seed: int, bounds: CorpusBounds) -> List[CorpusItem]:
    ok = {"validate": PASS}
    items = [CorpusItem("terminal", generate_shape("terminal"), ok),
             CorpusItem("walking_arrow", generate_shape("walking_arrow"), ok),
             CorpusItem("discrete3", generate_shape("discrete", n=3), ok),
             CorpusItem("divisors12", generate_shape("lattice", n=12), ok),
             CorpusItem("chain3", generate_shape("lattice", length=3), ok),
             CorpusItem("cospan", cospan_poset(), ok),
             CorpusItem("arrow_squared", generate_shape("product", walking_arrow(), walking_arrow()), ok),
             CorpusItem("empty", generate_shape("discrete", n=0), ok),
             CorpusItem("mutated_z3", mutated_cyclic_group(), {"validate": FAIL}),
             CorpusItem("walking_2cell", walking_2cell(), ok),
             CorpusItem("chains12", chains_2category([1, 2]), ok)]
    for i, P in enumerate(_random_posets(seed, 0, bounds)):
        items.append(CorpusItem(f"random{i}", P, ok))
        items.append(CorpusItem(f"random{i}_op", generate_shape("opposite", P), ok))
    return items


def _fibrations(seed: int, bounds: CorpusBounds) -> List[CorpusItem]:
    cod12 = arrow_category(divisor_lattice(12)).cod
    cod12.name = "cod(Div12)"
    cospan_cod = arrow_category(cospan_poset()).cod
    cospan_cod.name = "cod(cospan)"
    point = Functor(terminal_category(), walking_arrow(), [1], [1], name="pick1")
    items = [CorpusItem("cod_div12", cod12, {"fib": PASS}),
             CorpusItem("cod_cospan", cospan_cod, {"fib": FAIL}),
             CorpusItem("pick_codomain", point, {"fib": FAIL, "discrete": FAIL})]
    for i, P in enumerate(_random_posets(seed, 1, bounds)):
        dom = arrow_category(P).dom
        dom.name = f"dom({P.name})"
        items.append(CorpusItem(f"dom_random{i}", dom, {"fib": PASS}))
        top = P.n_objects - 1
        _, forget = slice_category(P, top)
        items.append(CorpusItem(f"slice_random{i}", forget, {"fib": PASS, "discrete": PASS}))
        constant = product_category(P, generate_shape("discrete", n=2)).left
        constant.name = f"el(const2 on {P.name})"
        items.append(CorpusItem(f"constant_presheaf{i}", constant, {"fib": PASS, "discrete": PASS}))
    return items


def _double(seed: int, bounds: CorpusBounds) -> List[CorpusItem]:
    positive = {"double_fibration": PASS, "internal_P": PASS}
    items = []
    bases = [("chain3", squares(chain(3))), ("div6", squares(divisor_lattice(6)))]
    for i, P in enumerate(_random_posets(seed, 2, bounds)):
        bases.append((f"vtrivial{i}", vertically_trivial(P)))
    for name, D in bases:
        _, dom = arrow_double(D)
        items.append(CorpusItem(f"dom_{name}", dom, positive))
    cod = cod_double(squares(divisor_lattice(6)))
    items.append(CorpusItem("cod_div6", ClovenDoubleFibration(cod.cod, DoubleCleavage(cod.cleavage0, cod.cleavage1)),
                            positive))
    items.append(CorpusItem("image_acyclic", acyclic_image_window(),
                            {"double_fibration": FAIL, "opfibration": PASS, "internal_P": FAIL}))
    items.append(CorpusItem("involution", involution_fibration(),
                            {"double_fibration": PASS, "internal_P": PASS, "internal_S": FAIL, "split": FAIL}))
    collapse = collapse_2cell()
    items.append(CorpusItem("quintet_collapse", quintet_functor(collapse, quintet(collapse.dom), quintet(collapse.cod)),
                            {"double_fibration": FAIL, "internal_P": FAIL}))
    return items


def _two_functors(seed: int, bounds: CorpusBounds) -> List[CorpusItem]:
    ok, bad = {"2fib": PASS, "quintet": PASS}, {"2fib": FAIL, "quintet": PASS}
    K = walking_2cell()
    _, pi1, pi2 = product_2category(K, locally_discrete(walking_arrow()))
    one = locally_discrete(terminal_category())
    to_one = TwoFunctor.by_labels(K, one, lambda x: "*", lambda a: "1*", lambda c: ("1*", "1*"), name="!")
    items = [CorpusItem("identity_2cell", TwoFunctor.identity(K), ok),
             CorpusItem("identity_chains", TwoFunctor.identity(chains_2category([1, 2])), ok),
             CorpusItem("projection1", pi1, ok),
             CorpusItem("projection2", pi2, ok),
             CorpusItem("to_terminal", to_one, ok),
             CorpusItem("collapse", collapse_2cell(), bad),
             CorpusItem("cod_cospan", locally_discrete_functor(arrow_category(cospan_poset()).cod), bad),
             CorpusItem("pick_codomain",
                        locally_discrete_functor(Functor(terminal_category(), walking_arrow(), [1], [1])), bad)]
    for i, P in enumerate(_random_posets(seed, 3, bounds)):
        items.append(CorpusItem(f"dom_random{i}", locally_discrete_functor(arrow_category(P).dom), ok))
    return items


def _recipe(example: str, base: Optional[PseudoDoubleCategory] = None, category: Optional[FinCategory] = None,
            **fields: Any) -> IndexedRecipeDocument:
    return IndexedRecipeDocument(example=example, base=to_document(base) if base is not None else None,
                                 category=to_document(category) if category is not None else None, **fields)


def _indexed(seed: int, bounds: CorpusBounds) -> List[CorpusItem]:
    full = {"elements": PASS, "double_fibration": PASS, "roundtrip": PASS}
    discrete = dict(full, discrete=PASS)
    bases = [("terminal", terminal_double()), ("proarrow", walking_proarrow()),
             ("chain2", squares(chain(2))), ("chain3", squares(chain(3)))]
    for i, P in enumerate(_random_posets(seed, 4, bounds)):
        bases.append((f"vtrivial{i}", vertically_trivial(P)))
    items = []
    for name, B in bases:
        items.append(CorpusItem(f"constant_{name}", _recipe("constant", B), discrete))
        for k in range(min(B.E0.n_objects, 3)):
            items.append(CorpusItem(f"representable_{name}_{k}", _recipe("representable", B, target=k), discrete))
    for name, B in bases[:3]:
        items.append(CorpusItem(f"constant_{name}_arrow", _recipe("constant", B, walking_arrow()), full))
    for name, C in (("terminal", terminal_category()), ("chain2", chain(2)), ("chain3", chain(3))):
        items.append(CorpusItem(f"slice_{name}", _recipe("slice", squares(C)), full))
    items.append(CorpusItem("family_arrow", _recipe("family", sizes=[1] * bounds.window, apex=1), full))
    for name, C, left, right in (("arrow", walking_arrow(), [0], [1]), ("chain3_low", chain(3), [0, 1], [2]),
                                 ("chain3_high", chain(3), [0], [1, 2]), ("div6", divisor_lattice(6), [0], [3])):
        items.append(CorpusItem(f"profunctor_{name}", _recipe("profunctor", category=C, left=left, right=right),
                                full))
    return items


BATCHES: Dict[str, Callable[[int, CorpusBounds], List[CorpusItem]]] = {
    "categories": _categories,
    "fibrations": _fibrations,
    "double": _double,
    "two_functors": _two_functors,
    "indexed": _indexed,
}


def _kind(value: Any) -> str:
    return to_document(value).kind


def render_batch(batch: str, seed: int, bounds: Dict) -> List[Tuple[str, str, Dict]]:
    """(file, canonical text, manifest entry) per item of one batch"""
    limits = CorpusBounds(**bounds)
    rendered = []
    for i, item in enumerate(BATCHES[batch](seed, limits)):
        file = f"{batch}/{i:02d}_{item.name}.json"
        rendered.append((file, dumps(item.value), {"file": file, "kind": _kind(item.value), "expect": item.expect}))
    logger.debug("corpus batch %s: %d files", batch, len(rendered))
    return rendered


def generate_corpus(seed: int, out_dir: Union[str, Path], bounds: Optional[CorpusBounds] = None,
                    jobs: int = 1) -> CorpusManifest:
    """Write every batch and a manifest under out_dir; identical seeds give identical files"""
    bounds = bounds or CorpusBounds()
    out = Path(out_dir)
    names = list(BATCHES)
    arguments = [(name, seed, bounds.model_dump()) for name in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(render_batch, *zip(*arguments)))
    else:
        results = [render_batch(*args) for args in arguments]
    entries = []
    for rendered in results:
        for file, text, entry in rendered:
            path = out / file
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            entries.append(CorpusEntry(**entry))
    manifest = CorpusManifest(name=f"corpus-{seed}", seed=seed, bounds=bounds,
                              entries=sorted(entries, key=lambda e: e.file))
    save(manifest, out / "manifest.json")
    logger.info("corpus %d: %d files in %s", seed, len(entries), out)
    return manifest
