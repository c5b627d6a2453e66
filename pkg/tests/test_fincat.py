import pytest
from hypothesis import given

from conftest import random_posets
from core.errors import CompositionError, PreconditionError, SchemaError
from core.fincat import (FinCategory, Functor, NatTransformation, SearchBudget, all_functors, arrow_category,
                         chosen_pullback, find_isomorphism, fiber_category, full_subcategory, has_pullbacks,
                         product_category, pullback_category, search_functors, slice_category, terminal_category,
                         validate_category, validate_functor, validate_transformation)
from data.corpus import mutated_cyclic_group
from data.shapes import chain, cospan_poset, divisor_lattice


class TestComposition:

    def test_identities_are_units(self, arrow):
        a = arrow.arrow_index("a")
        assert arrow.compose(a, arrow.identity(0)) == a
        assert arrow.compose(arrow.identity(1), a) == a

    def test_non_composable_pair_raises(self, arrow):
        a = arrow.arrow_index("a")
        with pytest.raises(CompositionError):
            arrow.compose(arrow.identity(0), a)

    def test_compose_path_reads_right_to_left(self, chain3):
        f = chain3.arrow_index((0, 1))
        g = chain3.arrow_index((1, 2))
        assert chain3.arrows[chain3.compose_path(g, f)] == (0, 2)

    def test_non_composable_entries_are_minus_one(self, arrow):
        table = arrow.table
        a = arrow.arrow_index("a")
        assert table[arrow.identity(0), a] == -1
        assert not table.flags.writeable

    def test_hom_sets(self, div12):
        one, twelve = div12.object_index(1), div12.object_index(12)
        assert len(div12.hom(one, twelve)) == 1
        assert div12.hom(twelve, one) == ()

    def test_duplicate_object_label_is_a_schema_error(self):
        with pytest.raises(SchemaError) as info:
            FinCategory.build(["x", "x"], [("1", "x", "x")], {"x": "1"}, lambda g, f: "1")
        assert info.value.location == "objects[1]"


class TestValidateCategory:

    @given(random_posets())
    def test_random_posets_are_categories(self, C):
        report = validate_category(C)
        assert report.passed
        assert report.stats["arrows"] == C.n_arrows

    @given(random_posets())
    def test_opposite_is_an_involution(self, C):
        assert C.op().op() == C
        assert validate_category(C.op()).passed

    def test_mutated_group_breaks_associativity(self):
        report = validate_category(mutated_cyclic_group())
        assert report.failed
        assert report.counterexample["reason"] == "associativity"
        assert len(report.counterexample["triple"]) == 3

    def test_missing_composite(self, arrow):
        a = arrow.arrow_index("a")
        broken = arrow.with_composite(a, arrow.identity(0), -1)
        report = validate_category(broken)
        assert report.counterexample == {"reason": "composite missing", "pair": ["a", "1_0"]}

    def test_composite_of_non_composable_pair(self, arrow):
        a = arrow.arrow_index("a")
        broken = arrow.with_composite(arrow.identity(0), a, a)
        assert validate_category(broken).counterexample["reason"] == "composite of non-composable pair"

    def test_composite_with_wrong_endpoints(self, arrow):
        a = arrow.arrow_index("a")
        broken = arrow.with_composite(a, arrow.identity(0), arrow.identity(1))
        assert validate_category(broken).counterexample["reason"] == "composite has wrong endpoints"


class TestFunctors:

    def test_identity_functor_is_valid(self, div12):
        assert validate_functor(Functor.identity(div12)).passed

    def test_composition_checks_codomain(self, arrow, chain3):
        with pytest.raises(PreconditionError):
            Functor.identity(arrow).then(Functor.identity(chain3))

    def test_wrong_map_length(self, arrow):
        with pytest.raises(SchemaError):
            Functor(arrow, arrow, [0], [0, 1, 2])

    def test_functor_with_wrong_endpoints(self, chain3):
        objects = [0, 0, 1]
        arrows = [chain3.arrow_index((objects[x], objects[y])) if objects[x] != objects[y]
                  else chain3.identity(objects[x]) for x, y in chain3.arrows]
        bad = list(arrows)
        bad[chain3.arrow_index((0, 2))] = chain3.identity(0)
        assert validate_functor(Functor(chain3, chain3, objects, arrows)).passed
        report = validate_functor(Functor(chain3, chain3, [0, 0, 1], bad))
        assert report.failed

    def test_counting_functors(self, arrow, chain3):
        assert len(all_functors(terminal_category(), chain3)) == 3
        assert len(all_functors(arrow, arrow)) == 3
        assert len(all_functors(arrow, chain3)) == 6

    def test_search_stops_at_the_budget(self, chain3):
        budget = SearchBudget(limit=2)
        found = list(search_functors(chain3, chain3, budget=budget))
        assert budget.exhausted
        assert len(found) < len(all_functors(chain3, chain3))

    def test_identity_transformation(self, chain3):
        alpha = NatTransformation.identity(Functor.identity(chain3))
        assert validate_transformation(alpha).passed
        assert alpha.is_isomorphism()


class TestConstructions:

    @given(random_posets(), random_posets())
    def test_products_are_categories(self, A, B):
        P = product_category(A, B)
        assert P.category.n_objects == A.n_objects * B.n_objects
        assert validate_category(P.category).passed
        assert validate_functor(P.left).passed

    def test_pullback_needs_a_common_codomain(self, arrow, chain3):
        with pytest.raises(PreconditionError):
            pullback_category(Functor.identity(arrow), Functor.identity(chain3))

    @given(random_posets())
    def test_arrow_category(self, C):
        A = arrow_category(C)
        assert A.category.n_objects == C.n_arrows
        assert validate_category(A.category).passed
        assert validate_functor(A.cod).passed

    def test_slice_of_a_chain_is_a_chain(self, chain3):
        S, forget = slice_category(chain3, chain3.object_index(2))
        assert find_isomorphism(S, chain3) is not None
        assert validate_functor(forget).passed

    def test_fiber_of_a_projection(self, arrow, chain3):
        P = product_category(arrow, chain3)
        fiber, incl = fiber_category(P.left, 0)
        assert fiber.n_objects == 3
        assert validate_functor(incl).passed

    def test_full_subcategory(self, div12):
        keep = [div12.object_index(d) for d in (1, 2, 4)]
        S, _ = full_subcategory(div12, keep)
        assert find_isomorphism(S, chain(3)) is not None


class TestIsomorphisms:

    @given(random_posets())
    def test_every_category_is_isomorphic_to_itself(self, C):
        F = find_isomorphism(C, C)
        assert F is not None
        assert validate_functor(F).passed

    def test_self_dual_lattice(self):
        D = divisor_lattice(6)
        assert find_isomorphism(D, D.op()) is not None

    def test_different_sizes(self, arrow, chain3):
        assert find_isomorphism(arrow, chain3) is None


class TestPullbacks:

    def test_chains_have_pullbacks(self, chain3, div12):
        assert has_pullbacks(chain3).passed
        assert has_pullbacks(div12).passed

    def test_cospan_lacks_a_pullback(self):
        report = has_pullbacks(cospan_poset())
        assert report.failed
        assert report.counterexample["cospan"] == [["a", "c"], ["b", "c"]]

    def test_chosen_pullback_is_the_meet(self, div12):
        u = div12.arrow_index((4, 12))
        f = div12.arrow_index((6, 12))
        cone = chosen_pullback(div12, u, f)
        assert div12.objects[cone.apex] == 2

    def test_identity_entries_of_the_table(self, chain3):
        for i in chain3.identities:
            assert chain3.table[i, i] == i
