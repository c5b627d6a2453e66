import pytest

from api.models.report_models import Certification
from core.dblcat import walking_proarrow
from core.dblfib import is_double_fibration, is_split_double_fibration
from core.elements import elements_construction, validate_indexed
from core.errors import PreconditionError, SchemaError, WindowClosureError
from core.fincat import terminal_category, walking_arrow
from core.indexed_examples import (constant_indexed, fam_window, indexed_examples, profunctor_indexed,
                                   representable_indexed, slice_indexed)
from core.providers import SetWindow, ordered_monoid
from data.corpus import squares
from data.shapes import chain, cospan_poset, divisor_lattice


class TestConstant:

    def test_fibers(self):
        F = constant_indexed(walking_proarrow(), walking_arrow())
        assert all(C.n_objects == 2 for C in F.fiber0 + F.fiber1)
        assert F.is_locally_discrete()

    def test_over_a_one_object_base(self):
        assert ordered_monoid().is_strict()
        assert validate_indexed(constant_indexed(ordered_monoid())).passed


class TestRepresentable:

    def test_no_arrows_into_the_other_object(self):
        F = representable_indexed(walking_proarrow(), 1)
        assert [C.n_objects for C in F.fiber0] == [0, 1]
        assert validate_indexed(F).passed

    def test_arrows_into_the_top_of_a_chain(self):
        F = representable_indexed(squares(chain(3)), 2)
        assert [C.n_objects for C in F.fiber0] == [1, 1, 1]
        assert F.is_locally_discrete()


class TestSlices:

    def test_fibers_are_slices(self):
        F = slice_indexed(squares(chain(2)))
        assert [C.n_objects for C in F.fiber0] == [1, 2]
        assert validate_indexed(F).passed

    def test_elements_form_a_double_fibration(self):
        El = elements_construction(slice_indexed(squares(chain(2))))
        assert is_double_fibration(El.projection, El.cleavage).passed

    def test_needs_pullbacks(self):
        with pytest.raises(PreconditionError):
            slice_indexed(squares(cospan_poset()))

    def test_over_a_point(self):
        assert validate_indexed(slice_indexed(squares(terminal_category()))).passed


class TestFamilies:

    def test_fam_window(self):
        fam = fam_window(SetWindow.uniform([1], apex=1))
        assert validate_indexed(fam.indexed).passed
        assert fam.double.window["category"] == walking_arrow().name
        report = is_double_fibration(fam.projection, fam.cleavage)
        assert report.passed
        assert report.certification == Certification.WINDOW

    def test_fam_is_split(self):
        fam = fam_window(SetWindow.uniform([1], apex=1))
        report = is_split_double_fibration(fam.projection, fam.cleavage)
        assert report.passed
        assert report.certification == Certification.WINDOW

    def test_families_of_points_on_index_sets_up_to_two(self):
        fam = fam_window(SetWindow.uniform([1, 2], apex=1), terminal_category())
        assert fam.double.E1.n_arrows == fam.indexed.base.E1.n_arrows
        assert is_split_double_fibration(fam.projection, fam.cleavage).passed

    def test_large_apex(self):
        with pytest.raises(WindowClosureError):
            fam_window(SetWindow.uniform([1], apex=2))


class TestProfunctors:

    def test_heteromorphisms(self):
        F = profunctor_indexed(chain(3), [0, 1], [2])
        assert [C.n_objects for C in F.fiber0] == [2, 1]
        assert F.fiber1[2].n_objects == 2
        assert validate_indexed(F).passed

    def test_divisors(self):
        assert validate_indexed(profunctor_indexed(divisor_lattice(6), [0], [3])).passed


class TestByKind:

    @pytest.mark.parametrize("kind, params", [
        ("constant", {"base": squares(chain(2))}),
        ("representable", {"base": walking_proarrow(), "target": 1}),
        ("slice", {"base": squares(chain(2))}),
        ("family", {"sizes": [1], "apex": 1}),
        ("profunctor", {"category": chain(3), "left": [0, 1], "right": [2]}),
    ])
    def test_stock_examples(self, kind, params):
        assert validate_indexed(indexed_examples(kind, **params)).passed

    @pytest.mark.parametrize("kind, params, location", [
        ("sheaves", {}, "example"),
        ("slice", {}, "base"),
        ("representable", {"base": walking_proarrow(), "target": 2}, "target"),
        ("profunctor", {"left": [0]}, "category"),
    ])
    def test_bad_requests(self, kind, params, location):
        with pytest.raises(SchemaError) as info:
            indexed_examples(kind, **params)
        assert info.value.location == location
