import pytest
from hypothesis import given

from conftest import random_posets
from core.errors import NotAFibration, SchemaError
from core.fib import (ClovenFibration, build_cleavage, cartesian, cartesian_lifts, identity_square, is_cartesian,
                      is_cartesian_preserving, is_cartesian_sga1, is_cleavage_preserving, is_discrete_fibration,
                      is_fibration, is_opfibration, lift_pairs, normalize_cleavage, pullback_fibrations,
                      validate_cloven, vertical_isomorphism)
from core.fincat import Functor, arrow_category, product_category, slice_category, terminal_category, walking_arrow
from data.corpus import involution_fibration
from data.shapes import cospan_poset, divisor_lattice, generate_shape


def pick_codomain():
    return Functor(terminal_category(), walking_arrow(), [1], [1], name="pick1")


class TestFibrations:

    def test_codomain_functor_of_a_lattice(self):
        report = is_fibration(arrow_category(divisor_lattice(12)).cod)
        assert report.passed
        assert all(len(entry) == 3 for entry in report.witness)

    def test_codomain_functor_without_pullbacks(self):
        report = is_fibration(arrow_category(cospan_poset()).cod)
        assert report.failed
        assert set(report.counterexample) == {"base_arrow", "object"}

    def test_codomain_functor_is_always_an_opfibration(self):
        assert is_opfibration(arrow_category(cospan_poset()).cod).passed

    def test_point_is_not_a_fibration(self):
        report = is_fibration(pick_codomain())
        assert report.counterexample == {"base_arrow": "a", "object": "*"}
        assert is_discrete_fibration(pick_codomain()).failed

    def test_functor_to_the_terminal_category(self, arrow):
        p = Functor.to_terminal(arrow, terminal_category())
        assert is_fibration(p).passed
        report = is_discrete_fibration(p)
        assert report.failed
        assert report.counterexample["lifts"] == 2

    @given(random_posets())
    def test_domain_functor(self, C):
        assert is_fibration(arrow_category(C).dom).passed

    @given(random_posets())
    def test_opposite_functor(self, C):
        p = arrow_category(C).cod
        twice = p.op().op()
        assert twice.dom == p.dom and twice.cod == p.cod
        assert twice.arrow_map.tolist() == p.arrow_map.tolist()
        assert is_opfibration(p).status == is_fibration(p.op()).status

    @given(random_posets())
    def test_slice_projection_is_discrete(self, C):
        _, forget = slice_category(C, C.n_objects - 1)
        assert is_discrete_fibration(forget).passed
        assert is_fibration(forget).passed

    @given(random_posets())
    def test_constant_presheaf_is_discrete(self, C):
        p = product_category(C, generate_shape("discrete", n=2)).left
        assert is_discrete_fibration(p).passed


class TestCartesianArrows:

    def test_unknown_arrow_id(self, arrow):
        p = Functor.identity(arrow)
        with pytest.raises(SchemaError):
            is_cartesian(p, 17)

    def test_identities_are_cartesian(self, div12):
        p = arrow_category(div12).cod
        for x in range(p.dom.n_objects):
            assert is_cartesian(p, p.dom.identity(x)).passed

    @given(random_posets())
    def test_cartesian_arrows_are_weakly_cartesian(self, C):
        p = arrow_category(C).dom
        for f in range(p.dom.n_arrows):
            if cartesian(p, f):
                assert is_cartesian_sga1(p, f).passed

    def test_lifts_come_in_increasing_order(self):
        p = arrow_category(divisor_lattice(12)).cod
        for u, e in lift_pairs(p):
            lifts = list(cartesian_lifts(p, u, e))
            assert lifts == sorted(lifts)
            assert all(p.arr(a) == u and p.dom.tgt(a) == e for a in lifts)

    def test_vertical_isomorphism_between_lifts(self):
        c1 = involution_fibration().cleavage.cleavage1
        E = c1.total
        one, s = E.arrow_index("1_a"), E.arrow_index("s")
        assert vertical_isomorphism(c1.p, one, s) == s


class TestCleavages:

    def test_least_cleavage_is_valid(self, div12):
        c = build_cleavage(arrow_category(div12).cod)
        assert validate_cloven(c).passed
        assert normalize_cleavage(c).is_normalized()

    def test_no_cleavage_without_lifts(self):
        with pytest.raises(NotAFibration) as info:
            build_cleavage(pick_codomain())
        assert info.value.pair == ("a", "*")

    def test_missing_lift(self, arrow):
        c = ClovenFibration(Functor.identity(arrow), {})
        with pytest.raises(NotAFibration):
            c.lift(0, 0)
        assert validate_cloven(c).failed

    def test_chosen_involution_is_not_split(self):
        report = involution_fibration().cleavage.cleavage1.is_split()
        assert report.failed
        assert report.counterexample["reason"] == "identity"

    def test_posets_over_a_point_are_split(self, chain3):
        c = build_cleavage(Functor.to_terminal(chain3, terminal_category()))
        assert c.is_split().passed

    def test_factor_through_a_chosen_lift(self, chain3):
        c = build_cleavage(arrow_category(chain3).dom)
        E, B = c.total, c.base
        for (u, e), lift in c.cleavage.items():
            assert c.factor(u, e, lift, B.identity(B.src(u))) == E.identity(E.src(lift))


class TestSquares:

    def test_identity_square_preserves_everything(self, div12):
        c = build_cleavage(arrow_category(div12).cod)
        square = identity_square(c)
        assert square.commutes()
        assert is_cartesian_preserving(square).passed
        assert is_cleavage_preserving(square).passed

    def test_pullback_of_identity_squares(self, chain3):
        c = build_cleavage(arrow_category(chain3).cod)
        pb = pullback_fibrations(identity_square(c), identity_square(c))
        assert pb.lemma.passed
        assert validate_cloven(pb.fibration).passed
        assert pb.total.category.n_objects == c.total.n_objects
