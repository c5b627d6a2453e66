import pytest

from api.models.schema_models import CorpusBounds, CorpusManifest
from core.errors import SchemaError
from core.fib import is_discrete_fibration, is_fibration
from core.fincat import FinCategory, validate_category
from core.serialization import load_document, loads
from core.twocat import validate_2category
from data.corpus import BATCHES, generate_corpus, render_batch
from data.shapes import chain, cospan_poset, divisor_lattice, generate_shape, random_poset

SMALL = CorpusBounds(objects=3, random=2, density=0.5, window=1)


class TestShapes:

    def test_lattices(self):
        assert tuple(divisor_lattice(12).objects) == (1, 2, 3, 4, 6, 12)
        assert chain(3).n_arrows == 6
        assert cospan_poset().n_arrows == 5

    def test_random_posets_are_deterministic(self):
        assert random_poset(7, 4, 0.5) == random_poset(7, 4, 0.5)

    @pytest.mark.parametrize("kind, params", [
        ("terminal", {}), ("walking_arrow", {}), ("discrete", {"n": 3}), ("lattice", {"n": 6}),
        ("lattice", {"length": 4}), ("random", {"seed": 3, "objects": 4, "density": 0.7}),
    ])
    def test_generated_shapes_are_categories(self, kind, params):
        assert validate_category(generate_shape(kind, **params)).passed

    def test_opposite_and_product(self):
        assert generate_shape("opposite", chain(3)).n_arrows == 6
        assert generate_shape("product", chain(2), chain(2)).n_objects == 4

    @pytest.mark.parametrize("kind, params, location", [
        ("polygon", {}, "kind"),
        ("lattice", {"n": 0}, "params.n"),
        ("random", {"density": 1.5}, "params"),
        ("opposite", {}, "category"),
    ])
    def test_bad_requests(self, kind, params, location):
        with pytest.raises(SchemaError) as info:
            generate_shape(kind, **params)
        assert info.value.location == location


class TestCorpus:

    def test_identical_seeds_give_identical_files(self, tmp_path):
        first = generate_corpus(5, tmp_path / "a", SMALL)
        second = generate_corpus(5, tmp_path / "b", SMALL)
        assert first == second
        for entry in first.entries:
            assert (tmp_path / "a" / entry.file).read_bytes() == (tmp_path / "b" / entry.file).read_bytes()
        assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()

    def test_manifest(self, tmp_path):
        manifest = generate_corpus(1, tmp_path, SMALL)
        assert manifest.name == "corpus-1"
        files = [entry.file for entry in manifest.entries]
        assert files == sorted(files)
        assert {f.split("/")[0] for f in files} == set(BATCHES)
        kinds = {entry.kind for entry in manifest.entries}
        assert {"category", "2-category", "functor", "2-functor", "double_functor", "cloven_double_fibration",
                "indexed"} <= kinds
        assert isinstance(load_document(tmp_path / "manifest.json"), CorpusManifest)

    def test_batches_render_in_parallel_like_in_sequence(self, tmp_path):
        sequential = generate_corpus(2, tmp_path / "seq", SMALL, jobs=1)
        parallel = generate_corpus(2, tmp_path / "par", SMALL, jobs=2)
        assert sequential == parallel

    def test_category_verdicts(self):
        for file, text, entry in render_batch("categories", 3, SMALL.model_dump()):
            value = loads(text)
            report = validate_category(value) if isinstance(value, FinCategory) else validate_2category(value)
            assert report.status == entry["expect"]["validate"], file

    def test_fibration_verdicts(self):
        for file, text, entry in render_batch("fibrations", 3, SMALL.model_dump()):
            p = loads(text)
            assert is_fibration(p).status == entry["expect"]["fib"], file
            if "discrete" in entry["expect"]:
                assert is_discrete_fibration(p).status == entry["expect"]["discrete"], file

