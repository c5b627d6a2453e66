import pytest

from api.models.report_models import Certification
from core.dblcat import validate_double_category, validate_double_functor
from core.dblfib import is_double_opfibration
from core.errors import SchemaError, WindowClosureError
from core.providers import (SetWindow, build_provider, compose_spans, cyclic_monoid, functions_category,
                            image_functor, ordered_monoid, rel_window, span_window, window_closure)


@pytest.fixture(scope="module")
def window():
    return SetWindow.uniform([1, 2], apex=1)


@pytest.fixture(scope="module")
def spans(window):
    return span_window(window)


@pytest.fixture(scope="module")
def relations(window):
    return rel_window(window)


class TestWindows:

    def test_describe(self, window):
        assert window.describe() == {"sets": {"s0": 1, "s1": 2},
                                     "bounds": {"s0->s0": 1, "s0->s1": 1, "s1->s0": 1, "s1->s1": 1}}

    def test_bound_on_an_unknown_set(self):
        with pytest.raises(SchemaError):
            SetWindow({"a": 1}, bounds={("a", "b"): 1})

    def test_functions(self, window):
        C = functions_category(window)
        assert C.n_objects == 2
        assert C.n_arrows == 1 + 2 + 1 + 4

    def test_unclosed_window(self):
        D = span_window(SetWindow.uniform([2], apex=2))
        report = window_closure(D)
        assert report.failed
        assert len(report.counterexample["pair"]) == 2
        assert "outside the window bound" in report.counterexample["reason"]
        m, n = (D.E1.object_index(("s0", "s0", ((0, 0), (0, 0)))),) * 2
        with pytest.raises(WindowClosureError):
            D.tensor_obj(m, n)


class TestSpans:

    def test_span_composition_is_a_pullback(self):
        pairs, position = compose_spans(((0, 0), (0, 1)), ((0, 0), (1, 0)))
        assert pairs == ((0, 0), (0, 0))
        assert position == {(0, 0): 0, (1, 1): 1}

    def test_span_window_is_a_double_category(self, spans):
        report = validate_double_category(spans)
        assert report.passed
        assert spans.is_strict()
        assert spans.window is not None
        assert window_closure(spans).passed

    def test_identity_spans_are_units(self, spans):
        for x in range(spans.E0.n_objects):
            y = spans.E1.objects[spans.unit_obj(x)]
            assert y[0] == y[1]
            assert all(a == b for a, b in y[2])


class TestRelations:

    def test_rel_window_is_a_double_category(self, relations):
        assert validate_double_category(relations).passed

    def test_relations_have_no_repeated_pairs(self, relations):
        for _, _, pairs in relations.E1.objects:
            assert len(set(pairs)) == len(pairs)

    def test_image_functor(self, spans, relations):
        im = image_functor(spans, relations)
        report = validate_double_functor(im)
        assert report.passed
        assert report.witness["flavor"] == "strict"

    def test_image_is_a_window_opfibration(self, spans, relations):
        report = is_double_opfibration(image_functor(spans, relations))
        assert report.passed
        assert report.conditions == {"1": "pass", "2": "pass", "3": "pass"}
        assert report.certification == Certification.WINDOW


class TestMonoids:

    def test_ordered_monoids(self):
        for operation in ("max", "min"):
            assert validate_double_category(ordered_monoid(operation)).passed

    def test_unknown_operation(self):
        with pytest.raises(SchemaError):
            ordered_monoid("sum")

    def test_cyclic_monoid(self):
        D = cyclic_monoid(3)
        assert validate_double_category(D).passed
        assert D.tensor_obj(2, 2) == 1


class TestBuildProvider:

    def test_kinds(self):
        assert build_provider("monoidal").E0.n_objects == 1
        assert build_provider("span").name == "Span"
        assert build_provider("rel").name == "Rel"

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            build_provider("graphs")
