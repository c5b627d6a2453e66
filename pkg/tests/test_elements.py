import pytest

from core.dblcat import DoubleFunctor, terminal_double, validate_double_category, walking_proarrow
from core.dblfib import is_discrete_double_fibration, is_double_fibration, search_double_cleavage
from core.elements import (IndexedMorphism, compare_indexed, elements_construction, elements_locally_discrete,
                           fibers_construction, validate_indexed, validate_indexed_morphism)
from core.errors import PreconditionError
from core.fincat import walking_arrow
from core.indexed_examples import constant_indexed, profunctor_indexed, representable_indexed
from data.corpus import squares
from data.shapes import chain, poset_category


@pytest.fixture(scope="module")
def base():
    return squares(chain(2))


class TestValidateIndexed:

    @pytest.mark.parametrize("build", [
        lambda: constant_indexed(squares(chain(2))),
        lambda: constant_indexed(walking_proarrow(), walking_arrow()),
        lambda: representable_indexed(squares(chain(3)), 2),
        lambda: profunctor_indexed(walking_arrow(), [0], [1]),
    ])
    def test_recipes_are_valid(self, build):
        assert validate_indexed(build()).passed

    def test_identity_morphism(self, base):
        assert validate_indexed_morphism(IndexedMorphism.identity(constant_indexed(base))).passed


class TestElements:

    def test_constant_terminal_fibers_give_the_base(self, base):
        El = elements_construction(constant_indexed(base))
        assert El.double.E0.n_objects == base.E0.n_objects
        assert El.double.E1.n_objects == base.E1.n_objects
        assert validate_double_category(El.double).passed
        assert is_double_fibration(El.projection, El.cleavage).passed
        assert is_discrete_double_fibration(El.projection).passed

    def test_constant_walking_arrow(self, base):
        El = elements_construction(constant_indexed(base, walking_arrow()))
        assert El.double.E0.n_objects == 2 * base.E0.n_objects
        assert is_double_fibration(El.projection, El.cleavage).passed

    def test_profunctor(self):
        El = elements_construction(profunctor_indexed(chain(3), [0, 1], [2]))
        assert validate_double_category(El.double).passed
        assert is_double_fibration(El.projection, El.cleavage).passed

    def test_locally_discrete_variant(self, base):
        F = constant_indexed(base)
        assert F.is_locally_discrete()
        El = elements_locally_discrete(F)
        assert validate_double_category(El.double).passed


class TestFibers:

    def test_fibers_of_the_identity_are_terminal(self, base):
        P = DoubleFunctor.identity(base)
        cleavage, _ = search_double_cleavage(P)
        F = fibers_construction(P, cleavage)
        assert [C.n_objects for C in F.fiber0] == [1] * base.E0.n_objects
        assert [C.n_objects for C in F.fiber1] == [1] * base.E1.n_objects
        assert validate_indexed(F).passed

    def test_compare_with_constant(self, base):
        P = DoubleFunctor.identity(base)
        cleavage, _ = search_double_cleavage(P)
        report = compare_indexed(fibers_construction(P, cleavage), constant_indexed(base))
        assert report.passed
        assert report.witness == {"isomorphisms": base.E0.n_objects + base.E1.n_objects}

    def test_compare_needs_a_common_base(self, base):
        with pytest.raises(PreconditionError):
            compare_indexed(constant_indexed(base), constant_indexed(terminal_double()))

    def test_compare_detects_different_fibers(self, base):
        report = compare_indexed(constant_indexed(base), constant_indexed(base, walking_arrow()))
        assert report.failed
        assert report.counterexample["sizes"] == [[1, 1], [2, 3]]

    def test_compare_sees_the_legs(self):
        def heteromorphisms(pairs):
            K = poset_category("abcd", lambda x, y: x == y or (x, y) in pairs, name="K")
            return profunctor_indexed(K, [0, 1], [2, 3])

        fan_in = heteromorphisms({("a", "c"), ("b", "c")})
        parallel = heteromorphisms({("a", "c"), ("b", "d")})
        assert [C.n_objects for C in fan_in.fiber1] == [C.n_objects for C in parallel.fiber1]
        assert compare_indexed(fan_in, heteromorphisms({("a", "c"), ("b", "c")})).passed
        report = compare_indexed(fan_in, parallel)
        assert report.failed
        assert "proarrow" in report.counterexample
