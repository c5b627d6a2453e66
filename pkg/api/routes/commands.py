"""
Command Handlers - One Handler per Subcommand
=============================================
Resolves the inputs of a job (JSON files or `@provider` names), calls the
checkers and constructions, and returns a single Report.

Commands:
- validate: structural laws of any loaded structure
- check: fib | opfib | discrete | double-fibration | split | 2fib | internal
- elements, fibers: the two directions of the representation theorem
- roundtrip: El(fibers(P)) against P, or fibers(El(F)) against F
- quintet, vhprops: the 2-categorical consequences
- corpus: generate the seeded corpus
"""

import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

from api.models.job_models import Job
from api.models.report_models import Report, combine
from api.models.schema_models import CorpusBounds
from core.dblcat import DoubleFunctor, PseudoDoubleCategory, validate_double_category, validate_double_functor
from core.dblfib import (DoubleCleavage, check_double_cleavage, internal_fibration_check,
                         is_discrete_double_fibration, is_double_fibration, is_double_opfibration,
                         is_split_double_fibration, quintet_equiv_test, search_double_cleavage, vh_props)
from core.elements import (IndexedDoubleCategory, elements_construction, fibers_construction, validate_indexed)
from core.equivalence import roundtrip_fibration, roundtrip_indexed
from core.errors import SchemaError
from core.fib import is_discrete_fibration, is_fibration, is_opfibration
from core.fincat import FinCategory, Functor, validate_category, validate_functor
from core.indexed_examples import fam_window
from core.providers import SetWindow, image_functor, ordered_monoid, rel_window, span_window, window_closure
from core.serialization import ClovenDoubleFibration, load, save
from core.twocat import Fin2Category, TwoFunctor, is_2fibration, validate_2category, validate_2functor
from data.corpus import generate_corpus

logger = logging.getLogger(__name__)

Handler = Callable[[Job], Report]

COMMANDS: Dict[str, Handler] = {}

CHECK_TARGETS = ("fib", "opfib", "discrete", "double-fibration", "split", "2fib", "internal")


def command(name: str) -> Callable[[Handler], Handler]:
    """Register a handler under a subcommand name"""
    def register(handler: Handler) -> Handler:
        COMMANDS[name] = handler
        return handler
    return register


# inputs -----------------------------------------------------------------------

def _window(job: Job) -> SetWindow:
    return SetWindow.uniform(list(range(1, job.window + 1)), job.apex)


def resolve_input(job: Job, source: str):
    """A file path, or `@span`, `@rel`, `@im`, `@fam`, `@monoidal` built from the job's window"""
    if not source.startswith("@"):
        return load(source)
    provider = source[1:]
    if provider == "span":
        return span_window(_window(job))
    if provider == "rel":
        return rel_window(_window(job))
    if provider == "im":
        window = _window(job)
        return image_functor(span_window(window), rel_window(window))
    if provider == "fam":
        fam = fam_window(_window(job))
        return ClovenDoubleFibration(fam.projection, fam.cleavage)
    if provider == "monoidal":
        return ordered_monoid()
    raise SchemaError(f"unknown provider {provider!r}", "input")


def _single_input(job: Job):
    if len(job.inputs) != 1:
        raise SchemaError(f"{job.command} takes exactly one input, got {len(job.inputs)}", "input")
    return resolve_input(job, job.inputs[0])


def _double(value, wanted: str) -> Tuple[DoubleFunctor, Optional[DoubleCleavage]]:
    if isinstance(value, ClovenDoubleFibration):
        return value.functor, value.cleavage
    if isinstance(value, DoubleFunctor):
        return value, None
    raise SchemaError(f"{wanted} needs a double functor, got {type(value).__name__}", "input")


def _require(value, kind: type, wanted: str):
    if not isinstance(value, kind):
        raise SchemaError(f"{wanted} needs a {kind.__name__}, got {type(value).__name__}", "input")
    return value


# commands ---------------------------------------------------------------------

@command("validate")
def validate(job: Job) -> Report:
    """Structural laws of whatever the input holds"""
    value = _single_input(job)
    if isinstance(value, FinCategory):
        return validate_category(value)
    if isinstance(value, Functor):
        return validate_functor(value)
    if isinstance(value, Fin2Category):
        return validate_2category(value)
    if isinstance(value, TwoFunctor):
        return validate_2functor(value)
    if isinstance(value, PseudoDoubleCategory):
        if value.window is not None:
            closure = window_closure(value)
            if closure.failed:
                return combine("validate", [closure])
            return combine("validate", [closure, validate_double_category(value)])
        return combine("validate", [validate_double_category(value)])
    if isinstance(value, ClovenDoubleFibration):
        return combine("validate", [validate_double_functor(value.functor),
                                    check_double_cleavage(value.functor, value.cleavage)])
    if isinstance(value, DoubleFunctor):
        return validate_double_functor(value)
    if isinstance(value, IndexedDoubleCategory):
        return validate_indexed(value)
    raise SchemaError(f"nothing to validate in a {type(value).__name__}", "input")


@command("check")
def check(job: Job) -> Report:
    """Fibration-type checks selected by the job target"""
    value = _single_input(job)
    target = job.target
    if target == "fib":
        if isinstance(value, (DoubleFunctor, ClovenDoubleFibration)):
            P, cleavage = _double(value, target)
            return is_double_fibration(P, cleavage, bound=job.bound)
        return is_fibration(_require(value, Functor, target))
    if target == "opfib":
        if isinstance(value, (DoubleFunctor, ClovenDoubleFibration)):
            return is_double_opfibration(_double(value, target)[0], bound=job.bound)
        return is_opfibration(_require(value, Functor, target))
    if target == "discrete":
        if isinstance(value, (DoubleFunctor, ClovenDoubleFibration)):
            return is_discrete_double_fibration(_double(value, target)[0])
        return is_discrete_fibration(_require(value, Functor, target))
    if target == "double-fibration":
        P, cleavage = _double(value, target)
        return is_double_fibration(P, cleavage, bound=job.bound)
    if target == "split":
        P, cleavage = _double(value, target)
        return is_split_double_fibration(P, cleavage, bound=job.bound)
    if target == "2fib":
        return is_2fibration(_require(value, TwoFunctor, target))
    if target == "internal":
        P, cleavage = _double(value, target)
        return internal_fibration_check(P, job.flavor, cleavage, bound=job.bound)
    raise SchemaError(f"unknown check {target!r}; expected one of {', '.join(CHECK_TARGETS)}", "check")


@command("elements")
def elements(job: Job) -> Report:
    """El(F): validated, projected, and checked as a double fibration"""
    F = _require(_single_input(job), IndexedDoubleCategory, "elements")
    validity = validate_indexed(F)
    if not validity.passed:
        return combine("elements", [validity])
    El = elements_construction(F)
    checks = [validity, validate_double_category(El.double),
              is_double_fibration(El.projection, El.cleavage, bound=job.bound)]
    if F.is_locally_discrete() and all(C.n_arrows == C.n_objects for C in list(F.fiber0) + list(F.fiber1)):
        checks.append(is_discrete_double_fibration(El.projection))
    if job.save:
        save(ClovenDoubleFibration(El.projection, El.cleavage), job.save)
    witness = {"objects": El.double.E0.n_objects, "arrows": El.double.E0.n_arrows,
               "proarrows": El.double.E1.n_objects, "cells": El.double.E1.n_arrows}
    return combine("elements", checks, witness=witness)


@command("fibers")
def fibers(job: Job) -> Report:
    """Indexed double category of fibers of a double fibration"""
    P, cleavage = _double(_single_input(job), "fibers")
    if cleavage is None:
        cleavage, found = search_double_cleavage(P, bound=job.bound)
        if cleavage is None:
            return combine("fibers", [found])
    F = fibers_construction(P, cleavage)
    sizes = {"fiber0": [C.n_objects for C in F.fiber0], "fiber1": [C.n_objects for C in F.fiber1]}
    return combine("fibers", [validate_indexed(F)], witness=sizes)


@command("roundtrip")
def roundtrip(job: Job) -> Report:
    value = _single_input(job)
    if isinstance(value, IndexedDoubleCategory):
        return roundtrip_indexed(value, bound=job.bound)
    P, cleavage = _double(value, "roundtrip")
    return roundtrip_fibration(P, cleavage, bound=job.bound)


@command("quintet")
def quintet(job: Job) -> Report:
    return quintet_equiv_test(_require(_single_input(job), TwoFunctor, "quintet"), bound=job.bound)


@command("vhprops")
def vhprops(job: Job) -> Report:
    P, cleavage = _double(_single_input(job), "vhprops")
    return vh_props(P, cleavage, bound=job.bound)


@command("corpus")
def corpus(job: Job) -> Report:
    """Seeded corpus under the given directory (or the configured output directory)"""
    out = Path(job.inputs[0]) if job.inputs else Path(job.output_dir) / f"corpus-{job.seed}"
    manifest = generate_corpus(job.seed, out, CorpusBounds(window=min(max(job.window, 1), 2)), jobs=job.jobs)
    kinds: Dict[str, int] = {}
    for entry in manifest.entries:
        kinds[entry.kind] = kinds.get(entry.kind, 0) + 1
    return Report.passing("corpus", witness={"seed": job.seed, "files": len(manifest.entries), "kinds": kinds},
                          stats={"files": len(manifest.entries)})
