"""
Shape Generators - Small Finite Categories
==========================================
Builds the small categories the checks, tests and corpus run on: the
terminal category, the walking arrow, discrete categories, opposites,
products, finite lattices ordered by divisibility or as chains, and
random posets drawn deterministically from a seed.

Every generated category is validated before it is returned.
"""

import logging
from typing import Any, Callable, Optional, Sequence

import numpy as np

from core.errors import PreconditionError, SchemaError
from core.fincat import (FinCategory, product_category, terminal_category, validate_category,
                         walking_arrow)
from core.indexed_examples import discrete_category

logger = logging.getLogger(__name__)

SHAPE_KINDS = ("terminal", "walking_arrow", "discrete", "opposite", "product", "lattice", "random")


def poset_category(elements: Sequence[Any], leq: Callable[[Any, Any], bool], name: str = "") -> FinCategory:
    """One arrow (x, y) for every x <= y"""
    elements = list(elements)
    arrows = [((x, y), x, y) for x in elements for y in elements if leq(x, y)]
    return FinCategory.build(elements, arrows, {x: (x, x) for x in elements},
                             lambda g, f: (f[0], g[1]), name=name)


def divisor_lattice(n: int) -> FinCategory:
    if n < 1:
        raise SchemaError("lattice needs a positive integer", "params.n")
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    return poset_category(divisors, lambda a, b: b % a == 0, name=f"Div({n})")


def chain(length: int) -> FinCategory:
    if length < 1:
        raise SchemaError("chain needs at least one element", "params.length")
    return poset_category(range(length), lambda a, b: a <= b, name=f"[{length}]")


def random_poset(seed: int, objects: int = 3, density: float = 0.5, name: str = "") -> FinCategory:
    """Transitive closure of a random DAG on 0..objects-1 (edges only go upward)"""
    if objects < 1 or not 0.0 <= density <= 1.0:
        raise SchemaError(f"invalid random shape bounds (objects={objects}, density={density})", "params")
    rng = np.random.default_rng(seed)
    reach = np.eye(objects, dtype=bool)
    for i in range(objects):
        for j in range(i + 1, objects):
            if rng.random() < density:
                reach[i, j] = True
    for k in range(objects):
        reach |= reach[:, [k]] & reach[[k], :]
    return poset_category(range(objects), lambda a, b: bool(reach[a, b]), name=name or f"P{seed}")


def cospan_poset() -> FinCategory:
    """a -> c <- b with no meet of a and b"""
    order = {("a", "a"), ("b", "b"), ("c", "c"), ("a", "c"), ("b", "c")}
    return poset_category(["a", "b", "c"], lambda x, y: (x, y) in order, name="cospan")


def generate_shape(kind: str, category: Optional[FinCategory] = None, other: Optional[FinCategory] = None,
                   **params: Any) -> FinCategory:
    """Build and validate one shape; random shapes are deterministic in `seed`"""
    if kind == "terminal":
        C = terminal_category()
    elif kind == "walking_arrow":
        C = walking_arrow()
    elif kind == "discrete":
        n = int(params.get("n", 1))
        if n < 0:
            raise SchemaError("discrete needs a non-negative size", "params.n")
        C = discrete_category(list(range(n)), name=f"Disc({n})")
    elif kind == "opposite":
        if category is None:
            raise SchemaError("opposite needs a category", "category")
        C = category.op()
    elif kind == "product":
        if category is None or other is None:
            raise SchemaError("product needs two categories", "category")
        C = product_category(category, other).category
    elif kind == "lattice":
        if "length" in params:
            C = chain(int(params["length"]))
        else:
            C = divisor_lattice(int(params.get("n", 12)))
    elif kind == "random":
        C = random_poset(int(params.get("seed", 0)), int(params.get("objects", 3)),
                         float(params.get("density", 0.5)))
    else:
        raise SchemaError(f"unknown shape kind {kind!r}; expected one of {', '.join(SHAPE_KINDS)}", "kind")
    report = validate_category(C)
    if not report.passed:
        raise PreconditionError(f"generated {kind} shape is not a category: {report.counterexample}")
    logger.debug("shape %s: %d objects, %d arrows", kind, C.n_objects, C.n_arrows)
    return C
