import pytest

from api.models.report_models import Certification, Status
from core.dblcat import (DoubleFunctor, Flavor, VerticalTransformation, arrow_double, cod_double, monoidal_as_double,
                         quintet, quintet_functor, terminal_double, validate_vertical_transformation,
                         vertically_trivial)
from core.dblfib import (DoubleCleavage, LiftingTriangle, cartesian_preservation, check_double_cleavage, check_lift,
                         find_double_cleavage, internal_fibration_check, is_discrete_double_fibration,
                         is_double_fibration, is_double_opfibration, is_split_double_fibration, lift_triangle,
                         quintet_equiv_test, search_double_cleavage, vh_props)
from core.errors import FlavorError, PreconditionError
from core.fib import ClovenFibration, FibrationSquare, preserves_cartesian, pullback_fibrations
from core.fincat import Functor
from core.twocat import TwoFunctor, walking_2cell
from data.corpus import acyclic_image_window, collapse_2cell, involution_fibration, squares
from data.shapes import chain, divisor_lattice
from test_dblcat import constant_top


@pytest.fixture
def identity3(squares3):
    return DoubleFunctor.identity(squares3)


def max_chain(length):
    C = chain(length)

    def tensor_arr(a, b):
        return C.hom(max(C.src(a), C.src(b)), max(C.tgt(a), C.tgt(b)))[0]

    return monoidal_as_double(C, max, tensor_arr, unit=0, name=f"B([{length}],max)")


@pytest.fixture
def halving():
    """x -> x // 2 from [4] to [2] under max; (1,3) and (2,2) are Cartesian, (2,3) is not"""
    E, B = max_chain(4), max_chain(2)
    F1 = Functor.by_labels(E.E1, B.E1, lambda x: x // 2, lambda a: (a[0] // 2, a[1] // 2), name="halve1")
    return DoubleFunctor(E, B, Functor(E.E0, B.E0, [0], [0], name="halve0"), F1, name="halve")


class TestDoubleFibrations:

    def test_identity(self, identity3):
        report = is_double_fibration(identity3)
        assert report.passed
        assert report.conditions == {"1": "pass", "2": "pass", "3": "pass"}
        assert report.certification == Certification.EXHAUSTIVE

    def test_domain_projection(self):
        _, dom = arrow_double(squares(chain(2)))
        assert is_double_fibration(dom).passed

    def test_codomain_with_chosen_pullbacks(self):
        cod = cod_double(squares(divisor_lattice(6)))
        cleavage = DoubleCleavage(cod.cleavage0, cod.cleavage1)
        assert check_double_cleavage(cod.cod, cleavage).passed
        assert is_double_fibration(cod.cod, cleavage).passed

    def test_image_on_an_acyclic_window(self):
        im = acyclic_image_window()
        report = is_double_fibration(im)
        assert report.failed
        assert report.certification == Certification.WINDOW
        assert is_double_opfibration(im).passed

    def test_tensor_loses_cartesian_cells(self, halving):
        report = is_double_fibration(halving)
        assert report.failed
        assert report.conditions == {"1": "pass", "2": "pass", "3": "fail"}
        assert report.counterexample["failed"] == "cartesian_preservation"

    def test_pairwise_tensor_check_matches_the_pullback_fibration(self):
        _, dom = arrow_double(squares(chain(2)))
        cleavage, _ = search_double_cleavage(dom)
        E, B = dom.dom, dom.cod
        c0, c1 = cleavage
        pullback = pullback_fibrations(FibrationSquare(E.tgt, B.tgt, c1, c0), FibrationSquare(E.src, B.src, c1, c0))
        assert pullback.lemma.passed
        assert pullback.total.category == E.composable.category
        assert preserves_cartesian(E.tensor, pullback.fibration.p, dom.F1).passed
        assert cartesian_preservation(dom, cleavage).passed

    def test_collapsed_quintet(self):
        P = collapse_2cell()
        QP = quintet_functor(P, quintet(P.dom), quintet(P.cod))
        report = is_double_fibration(QP)
        assert report.failed
        assert report.conditions["1"] == "fail"

    def test_discrete(self, identity3):
        assert is_discrete_double_fibration(identity3).passed

    def test_lax_functor_is_rejected(self):
        with pytest.raises(FlavorError):
            is_double_fibration(constant_top())


class TestCleavageSearch:

    def test_search_finds_the_identity_cleavage(self, identity3):
        cleavage, report = search_double_cleavage(identity3)
        assert report.passed
        assert all(lift == identity3.dom.E0.identity(e)
                   for (u, e), lift in cleavage.cleavage0.cleavage.items() if identity3.cod.E0.is_identity(u))
        assert set(report.witness) == {"cleavage0", "cleavage1"}

    def test_bound_makes_the_search_inconclusive(self, identity3):
        report = find_double_cleavage(identity3, bound=1)
        assert report.status == Status.INCONCLUSIVE
        assert report.conditions["2"] == "inconclusive"
        assert is_double_fibration(identity3, bound=1).status == Status.INCONCLUSIVE

    def test_level_that_is_not_a_fibration(self):
        P = collapse_2cell()
        cleavage, report = search_double_cleavage(quintet_functor(P, quintet(P.dom), quintet(P.cod)))
        assert cleavage is None
        assert report.conditions == {"1": "fail"}

    def test_cleavage_that_does_not_match_the_boundary(self, identity3, squares3):
        cleavage, _ = search_double_cleavage(identity3)
        c1 = cleavage.cleavage1
        up = squares3.E0.arrow_index((0, 1))
        theta = squares3.unit_arr(up)
        m = squares3.E1.tgt(theta)
        broken = ClovenFibration(c1.p, {**c1.cleavage, (theta, m): squares3.E1.identity(m)})
        report = check_double_cleavage(identity3, DoubleCleavage(cleavage.cleavage0, broken))
        assert report.failed
        assert report.conditions["2"] == "fail"


class TestInternalFibrations:

    def test_chosen_involution(self):
        value = involution_fibration()
        P, cleavage = value.functor, value.cleavage
        assert is_double_fibration(P, cleavage).passed
        pseudo = internal_fibration_check(P, "P", cleavage)
        assert pseudo.passed
        assert pseudo.certification == Certification.CHARACTERIZATION
        assert pseudo.witness["category"] == "Dbl_pseudo"
        strict = internal_fibration_check(P, "S", cleavage)
        assert strict.failed
        assert strict.conditions["3s"] == "fail"
        assert is_split_double_fibration(P, cleavage).failed

    def test_lax_flavor_only_needs_conditions_1_and_2(self, identity3):
        report = internal_fibration_check(identity3, "L")
        assert report.passed
        assert "3" not in report.conditions
        assert report.witness["conditions"] == ["1", "2"]

    def test_identity_is_split(self, identity3):
        assert internal_fibration_check(identity3, "S").passed
        assert is_split_double_fibration(identity3).passed

    def test_split_needs_a_strict_functor(self):
        with pytest.raises(FlavorError):
            is_split_double_fibration(constant_top())

    def test_split_fails_on_a_forced_cleavage(self, halving):
        report = is_split_double_fibration(halving)
        assert report.status == Status.FAIL
        assert report.counterexample["failed"] == "cartesian_preservation"

    def test_unknown_flavor(self, identity3):
        with pytest.raises(PreconditionError):
            internal_fibration_check(identity3, "X")

    def test_flavor_requirements(self, squares3):
        with pytest.raises(FlavorError):
            internal_fibration_check(constant_top(), "P")
        pseudo = DoubleFunctor(squares3, squares3, Functor.identity(squares3.E0), Functor.identity(squares3.E1),
                               flavor=Flavor.PSEUDO)
        with pytest.raises(FlavorError):
            internal_fibration_check(pseudo, "S")
        assert internal_fibration_check(pseudo, "P").witness["double_functor"] == "pseudo"


class TestLifting:

    @pytest.fixture
    def triangle(self):
        D = vertically_trivial(chain(2))
        X = terminal_double()

        def point(x):
            return DoubleFunctor(X, D, Functor(X.E0, D.E0, [x], [D.E0.identity(x)]),
                                 Functor(X.E1, D.E1, [x], [D.E1.identity(x)]))

        up = D.E0.arrow_index((0, 1))
        beta = VerticalTransformation(point(0), point(1), [up], [up])
        assert validate_vertical_transformation(beta).passed
        P = DoubleFunctor.identity(D)
        cleavage, _ = search_double_cleavage(P)
        return LiftingTriangle(X, point(1), point(0), beta), P, cleavage

    def test_lift_at_the_terminal_shape(self, triangle):
        t, P, cleavage = triangle
        lift = lift_triangle(t, P, cleavage)
        assert lift.functor.F0.obj(0) == 0
        assert lift.functor.flavor == Flavor.STRICT
        report = check_lift(t, P, lift)
        assert report.passed
        assert report.certification == Certification.LIFTING

    def test_only_generator_shapes(self, triangle, squares3):
        t, P, cleavage = triangle
        with pytest.raises(PreconditionError):
            lift_triangle(LiftingTriangle(squares3, t.top, t.bottom, t.beta), P, cleavage)


class TestConsequences:

    def test_vh_props_of_the_identity(self, identity3):
        report = vh_props(identity3)
        assert report.passed
        assert [sub.check for sub in report.subreports] == ["is_double_fibration", "enough_2cartesian",
                                                            "locally_fibration"]

    def test_vh_props_needs_a_double_fibration(self, halving):
        report = vh_props(halving)
        assert report.failed
        assert report.counterexample["failed"] == "is_double_fibration"

    def test_quintet_agrees_with_2fibrations(self):
        report = quintet_equiv_test(TwoFunctor.identity(walking_2cell()))
        assert report.passed
        assert report.witness == {"2fibration": "pass", "double_fibration": "pass"}

    def test_quintet_agrees_on_failures(self):
        report = quintet_equiv_test(collapse_2cell())
        assert report.passed
        assert report.witness == {"2fibration": "fail", "double_fibration": "fail"}
