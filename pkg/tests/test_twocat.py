import pytest
from hypothesis import given

from conftest import random_posets
from core.errors import SchemaError
from core.fincat import Functor, arrow_category, terminal_category, validate_functor, walking_arrow
from core.twocat import (Fin2Category, TwoFunctor, chains_2category, hom_category, hom_functor, is_2cartesian,
                         is_2fibration, locally_discrete, locally_posetal, product_2category, structurally_equal,
                         validate_2category, validate_2functor, walking_2cell, whisker_left, whisker_right)
from data.corpus import collapse_2cell, locally_discrete_functor
from data.shapes import cospan_poset


class TestTwoCategories:

    def test_walking_2cell(self):
        K = walking_2cell()
        assert K.n_cells == 3
        assert validate_2category(K).passed
        f, g = K.underlying.arrow_index("f"), K.underlying.arrow_index("g")
        assert len(K.cells_between(f, g)) == 1
        assert K.cells_between(g, f) == ()

    def test_chains(self):
        K = chains_2category([1, 2])
        report = validate_2category(K)
        assert report.passed
        assert not K.is_locally_discrete()

    @given(random_posets())
    def test_locally_discrete(self, C):
        K = locally_discrete(C)
        assert K.is_locally_discrete()
        assert validate_2category(K).passed

    def test_non_reflexive_order(self, arrow):
        with pytest.raises(SchemaError):
            locally_posetal(arrow, lambda f, g: False)

    def test_corrupt_vertical_composition(self):
        K = walking_2cell()
        vtable = K.vtable.copy()
        cell = K.cell_index(("f", "g"))
        vtable[cell, K.id2(K.underlying.arrow_index("f"))] = K.id2(K.underlying.arrow_index("f"))
        broken = Fin2Category(K.underlying, K.cells, K.cell_sources, K.cell_targets,
                              [K.id2(a) for a in range(K.underlying.n_arrows)], vtable, K.htable)
        assert validate_2category(broken).failed
        assert not structurally_equal(K, broken)

    def test_hom_category(self):
        K = walking_2cell()
        H = hom_category(K, 0, 1)
        assert H.n_objects == 2
        assert H.n_arrows == 3

    def test_whiskering_by_identities(self):
        K = walking_2cell()
        C = K.underlying
        cell = K.cell_index(("f", "g"))
        assert whisker_left(K, C.identity(1), cell) == cell
        assert whisker_right(K, cell, C.identity(0)) == cell

    def test_hom_functor_of_the_identity(self):
        K = walking_2cell()
        H = hom_functor(TwoFunctor.identity(K), 0, 1)
        assert H.dom.n_objects == 2
        assert validate_functor(H).passed

    def test_product(self):
        K = walking_2cell()
        M, pi1, pi2 = product_2category(K, locally_discrete(walking_arrow()))
        assert validate_2category(M).passed
        assert validate_2functor(pi1).passed
        assert validate_2functor(pi2).passed


class TestTwoFibrations:

    def test_identity_is_a_2fibration(self):
        report = is_2fibration(TwoFunctor.identity(chains_2category([1, 2])))
        assert report.passed
        assert report.conditions == {"1": "pass", "2": "pass", "3": "pass"}

    def test_projections_are_2fibrations(self):
        K = walking_2cell()
        _, pi1, pi2 = product_2category(K, locally_discrete(walking_arrow()))
        assert is_2fibration(pi1).passed
        assert is_2fibration(pi2).passed

    def test_collapsing_a_2cell(self):
        P = collapse_2cell()
        assert validate_2functor(P).passed
        report = is_2fibration(P)
        assert report.failed
        assert report.conditions["1"] == "fail"

    def test_codomain_without_pullbacks(self):
        report = is_2fibration(locally_discrete_functor(arrow_category(cospan_poset()).cod))
        assert report.failed

    def test_2cartesian_identity(self):
        K = walking_2cell()
        P = TwoFunctor.identity(K)
        report = is_2cartesian(P, K.underlying.arrow_index("f"))
        assert report.passed
        assert report.conditions == {"1": "pass", "2": "pass"}

    def test_to_a_point(self):
        K = walking_2cell()
        one = locally_discrete(terminal_category())
        P = TwoFunctor.by_labels(K, one, lambda x: "*", lambda a: "1*", lambda c: ("1*", "1*"))
        assert validate_2functor(P).passed
        assert is_2fibration(P).passed

    @given(random_posets())
    def test_locally_discrete_domain_functor(self, C):
        P = locally_discrete_functor(arrow_category(C).dom)
        assert is_2fibration(P).passed

    def test_point_of_a_locally_discrete_arrow(self):
        P = locally_discrete_functor(Functor(terminal_category(), walking_arrow(), [1], [1]))
        assert is_2fibration(P).conditions["1"] == "fail"
