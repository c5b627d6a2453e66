import pytest
from hypothesis import given

from conftest import random_posets
from core.dblcat import (DoubleFunctor, Flavor, VerticalTransformation, arrow_double, cod_double, comma_double,
                         compose_double_functors, horizontal_hom, make_double_category, opposite_double,
                         terminal_double, validate_double_category, validate_double_functor,
                         validate_vertical_transformation, vertical_2cat, vertical_2functor, vertically_trivial,
                         walking_proarrow)
from core.errors import FlavorError, PreconditionError
from core.fincat import validate_functor
from core.providers import involutive_monoid, monoidal_functor, ordered_monoid
from core.twocat import validate_2category
from data.corpus import squares
from data.shapes import chain, cospan_poset, divisor_lattice


def constant_top():
    """x -> 1 on the max-monoid: lax with a non-invertible unit comparison"""
    M = ordered_monoid("max")
    return monoidal_functor(M, M, [1, 1], laxity=True, name="top")


class TestDoubleCategories:

    @pytest.mark.parametrize("build", [terminal_double, walking_proarrow, ordered_monoid, involutive_monoid])
    def test_stock_double_categories(self, build):
        report = validate_double_category(build())
        assert report.passed
        assert report.witness == {"strict": True}

    @given(random_posets())
    def test_vertically_trivial(self, C):
        assert validate_double_category(vertically_trivial(C)).passed

    def test_squares_compose_like_arrows(self, squares3):
        E1 = squares3.E1
        m, n = E1.object_index((0, 1)), E1.object_index((1, 2))
        assert E1.objects[squares3.tensor_obj(m, n)] == (0, 2)
        assert validate_double_category(squares3).passed

    def test_tensor_of_non_composable_proarrows(self, squares3):
        E1 = squares3.E1
        with pytest.raises(PreconditionError):
            squares3.tensor_obj(E1.object_index((1, 2)), E1.object_index((0, 1)))

    def test_associator_with_wrong_endpoints(self):
        D = ordered_monoid()
        up = D.E1.arrow_index("<=")
        broken = make_double_category(D.E0, D.E1, D.src, D.tgt, D.unit, D.tensor_obj, D.tensor_arr,
                                      lambda m, n, p: up)
        report = validate_double_category(broken)
        assert report.failed
        assert report.counterexample["failed"] == "associator"
        assert report.counterexample["detail"]["reason"] == "typing"

    def test_mistyped_tensor_of_cells(self):
        D = ordered_monoid()
        up, bottom, top = (D.E1.arrow_index(label) for label in ("<=", "0", "1"))

        def tensor_arr(a, b):
            return top if (a, b) == (up, bottom) else D.tensor_arr(a, b)

        broken = make_double_category(D.E0, D.E1, D.src, D.tgt, D.unit, D.tensor_obj, tensor_arr)
        report = validate_double_category(broken)
        assert report.failed
        assert report.counterexample["failed"] == "tensor_functor"
        assert report.counterexample["detail"]["reason"] == "typing"

    def test_composites_are_computed_on_demand(self, squares3):
        calls = []

        def tensor_obj(m, n):
            calls.append((m, n))
            return squares3.tensor_obj(m, n)

        D = make_double_category(squares3.E0, squares3.E1, squares3.src, squares3.tgt, squares3.unit,
                                 tensor_obj, squares3.tensor_arr)
        assert calls == []
        m, n = D.composable_pairs()[0]
        assert D.tensor_obj(m, n) == D.tensor_obj(m, n)
        assert calls == [(m, n)]

    def test_tensor_on_the_composable_pairs(self, squares3):
        comp = squares3.composable
        assert validate_functor(squares3.tensor).passed
        assert comp.category.n_objects == len(squares3.composable_pairs())
        assert all(squares3.tensor.obj(i) == squares3.tensor_obj(comp.left.obj(i), comp.right.obj(i))
                   for i in range(comp.category.n_objects))

    def test_opposite(self, squares3):
        assert validate_double_category(opposite_double(squares3)).passed

    def test_horizontal_hom(self, squares3):
        H, incl = horizontal_hom(squares3, 0, 2)
        assert H.n_objects == 1
        assert incl.cod is squares3.E1


class TestConstructions:

    def test_vertical_2category(self, squares3):
        assert validate_2category(vertical_2cat(squares3)).passed

    def test_arrow_double_category(self):
        arrows, dom = arrow_double(squares(chain(2)))
        assert validate_double_category(arrows.double).passed
        assert validate_double_functor(dom).passed

    def test_codomain_double_functor(self):
        cod = cod_double(squares(divisor_lattice(6)))
        assert validate_double_functor(cod.cod).passed

    def test_comma_double_category(self):
        comma, dom = comma_double(squares(chain(2)), 1)
        assert comma.E0.n_objects == 2
        assert validate_double_category(comma).passed
        assert validate_double_functor(dom).passed

    def test_codomain_needs_pullbacks(self):
        with pytest.raises(PreconditionError):
            cod_double(squares(cospan_poset()))


class TestDoubleFunctors:

    def test_identity(self, squares3):
        F = DoubleFunctor.identity(squares3)
        assert F.comparisons_are_identities()
        assert validate_double_functor(F).passed
        assert validate_double_functor(compose_double_functors(F, F)).passed

    def test_lax_functor(self):
        F = constant_top()
        report = validate_double_functor(F)
        assert report.passed
        assert report.witness == {"flavor": "lax", "unitary": False}
        assert not F.comparisons_are_invertible()

    def test_lax_functor_claimed_strict(self):
        F = constant_top()
        claimed = DoubleFunctor(F.dom, F.cod, F.F0, F.F1, F.phi, F.iota, flavor=Flavor.STRICT)
        report = validate_double_functor(claimed)
        assert report.failed
        assert report.counterexample["failed"] == "flavor"

    def test_strictness_is_required(self):
        with pytest.raises(FlavorError):
            constant_top().require_strict()
        with pytest.raises(FlavorError):
            vertical_2functor(constant_top())

    def test_vertical_2functor_of_the_identity(self, squares3):
        P = vertical_2functor(DoubleFunctor.identity(squares3))
        assert P.functor.object_map.tolist() == list(range(squares3.E0.n_objects))

    def test_identity_transformation(self, squares3):
        alpha = VerticalTransformation.identity(DoubleFunctor.identity(squares3))
        assert validate_vertical_transformation(alpha).passed

    def test_transformation_with_wrong_components(self, squares3):
        F = DoubleFunctor.identity(squares3)
        alpha = VerticalTransformation.identity(F)
        E0 = squares3.E0
        components0 = list(alpha.components0)
        components0[0] = E0.arrow_index((0, 1))
        broken = VerticalTransformation(F, F, components0, alpha.components1)
        report = validate_vertical_transformation(broken)
        assert report.counterexample["reason"] == "typing"
