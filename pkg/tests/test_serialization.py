import json

import pytest

from api.models.schema_models import CategoryDocument, IndexedRecipeDocument
from core.dblcat import DoubleFunctor, PseudoDoubleCategory
from core.elements import IndexedDoubleCategory
from core.errors import SchemaError
from core.fincat import FinCategory
from core.serialization import (ClovenDoubleFibration, category_to_document, dumps, load, load_document, loads,
                                parse_document, save, to_document)
from data.corpus import collapse_2cell, involution_fibration, squares
from data.shapes import chain, divisor_lattice


def category_data(C: FinCategory) -> dict:
    return category_to_document(C).model_dump(mode="json")


def schema_error(data) -> SchemaError:
    with pytest.raises(SchemaError) as info:
        loads(json.dumps(data))
    return info.value


class TestCanonicalText:

    @pytest.mark.parametrize("build", [
        lambda: divisor_lattice(12),
        lambda: squares(chain(2)),
        collapse_2cell,
        involution_fibration,
    ], ids=["category", "double_category", "2-functor", "cloven"])
    def test_text_is_stable(self, build):
        text = dumps(build())
        assert dumps(loads(text)) == text

    def test_layout(self):
        text = dumps(chain(2))
        assert text.endswith("}\n")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert data["kind"] == "category"
        assert data["compose"][2][0] == -1

    def test_loaded_values(self):
        C = loads(dumps(divisor_lattice(6)))
        assert isinstance(C, FinCategory)
        assert C == divisor_lattice(6)
        value = loads(dumps(involution_fibration()))
        assert isinstance(value, ClovenDoubleFibration)
        assert isinstance(value.functor, DoubleFunctor)
        assert isinstance(loads(dumps(squares(chain(2)))), PseudoDoubleCategory)

    def test_indexed_recipe(self):
        recipe = IndexedRecipeDocument(example="constant", base=to_document(squares(chain(2))))
        F = loads(dumps(recipe))
        assert isinstance(F, IndexedDoubleCategory)
        assert len(F.fiber0) == 2

    def test_files(self, tmp_path):
        path = save(chain(3), tmp_path / "nested" / "chain.json")
        assert path.exists()
        assert load(path) == chain(3)
        assert isinstance(load_document(path), CategoryDocument)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load(tmp_path / "absent.json")


class TestSchemaErrors:

    def test_bad_json(self):
        with pytest.raises(SchemaError) as info:
            loads("{")
        assert info.value.location.startswith("line 1 column")

    def test_unknown_kind(self):
        assert schema_error({"kind": "graph"}).location == "kind"

    def test_major_version(self):
        data = dict(category_data(chain(2)), schema_version="2.0")
        assert schema_error(data).location == "schema_version"

    def test_minor_version_is_accepted(self):
        data = dict(category_data(chain(2)), schema_version="1.7")
        assert isinstance(loads(json.dumps(data)), FinCategory)

    def test_not_an_object(self):
        with pytest.raises(SchemaError):
            parse_document([1, 2])

    def test_unknown_field(self):
        data = dict(category_data(chain(2)), colour="red")
        assert schema_error(data).location == "colour"

    def test_negative_endpoint(self):
        data = category_data(chain(2))
        data["arrows"][0]["src"] = -1
        assert schema_error(data).location == "arrows[0].src"

    def test_dangling_object_id(self):
        data = category_data(chain(2))
        data["arrows"][1]["tgt"] = 5
        assert schema_error(data).location == "arrows[1].tgt"

    def test_duplicate_object(self):
        data = category_data(chain(2))
        data["objects"] = [0, 0]
        error = schema_error(data)
        assert error.location == "objects[1]"
        assert "duplicate id" in str(error)

    def test_identity_that_is_not_an_endo_arrow(self):
        data = category_data(chain(2))
        data["identities"] = [1, 2]
        assert schema_error(data).location == "identities[0]"

    def test_composite_for_a_non_composable_pair(self):
        data = category_data(chain(2))
        data["compose"][2][0] = 1
        error = schema_error(data)
        assert error.location == "compose[2][0]"
        assert "non-composable pair must be -1, found 1" in str(error)

    def test_missing_composite(self):
        data = category_data(chain(2))
        data["compose"][1][0] = -1
        error = schema_error(data)
        assert error.location == "compose[1][0]"
        assert "composable pair needs a composite" in str(error)

    def test_errors_inside_a_double_category(self):
        data = to_document(squares(chain(2))).model_dump(mode="json")
        data["E1"]["objects"].append(data["E1"]["objects"][0])
        assert schema_error(data).location.startswith("E1.objects[")

    def test_representable_target(self):
        recipe = IndexedRecipeDocument(example="representable", base=to_document(squares(chain(2))), target=5)
        assert schema_error(recipe.model_dump(mode="json")).location == "target"

    def test_recipe_without_a_base(self):
        assert schema_error(IndexedRecipeDocument(example="slice").model_dump(mode="json")).location == "base"
