import pytest

from core.dblcat import DoubleFunctor, terminal_double, walking_proarrow
from core.dblfib import search_double_cleavage
from core.elements import elements_construction
from core.equivalence import check_equivalence_over_base, roundtrip_fibration, roundtrip_indexed
from core.errors import PreconditionError
from core.fincat import walking_arrow
from core.indexed_examples import constant_indexed, profunctor_indexed, representable_indexed
from data.corpus import squares
from data.shapes import chain


class TestEquivalenceOverBase:

    def test_identity_is_equivalent_to_itself(self):
        P = DoubleFunctor.identity(squares(chain(2)))
        witness, report = check_equivalence_over_base(P, P)
        assert report.passed
        assert witness is not None
        assert report.witness["forward"]["flavor"] == "strict"

    def test_elements_of_the_constant_terminal_family(self):
        B = squares(chain(2))
        El = elements_construction(constant_indexed(B))
        witness, report = check_equivalence_over_base(El.projection, DoubleFunctor.identity(B))
        assert report.passed
        assert len(report.witness["forward"]["objects"]) == B.E0.n_objects

    def test_different_sizes_are_not_equivalent(self):
        B = walking_proarrow()
        El = elements_construction(constant_indexed(B, walking_arrow()))
        witness, report = check_equivalence_over_base(El.projection, DoubleFunctor.identity(B))
        assert witness is None
        assert report.failed

    def test_different_bases(self):
        with pytest.raises(PreconditionError):
            check_equivalence_over_base(DoubleFunctor.identity(squares(chain(2))),
                                        DoubleFunctor.identity(terminal_double()))


class TestRoundTrips:

    @pytest.mark.parametrize("build", [
        lambda: constant_indexed(terminal_double()),
        lambda: constant_indexed(walking_proarrow(), walking_arrow()),
        lambda: representable_indexed(squares(chain(2)), 1),
        lambda: profunctor_indexed(walking_arrow(), [0], [1]),
    ])
    def test_indexed(self, build):
        assert roundtrip_indexed(build()).passed

    def test_identity_fibration(self):
        P = DoubleFunctor.identity(squares(chain(2)))
        report = roundtrip_fibration(P)
        assert report.passed
        assert report.check == "roundtrip_fibration"

    def test_with_a_given_cleavage(self):
        P = DoubleFunctor.identity(walking_proarrow())
        cleavage, _ = search_double_cleavage(P)
        assert roundtrip_fibration(P, cleavage).passed
