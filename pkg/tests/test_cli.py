import json

import pytest

from api.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main, parse_job, run
from api.models.job_models import Job
from api.models.schema_models import IndexedRecipeDocument
from core.dblcat import DoubleFunctor
from core.errors import ConfigurationError
from core.fincat import arrow_category
from core.serialization import load, save, to_document
from core.settings import Settings, load_settings
from data.corpus import involution_fibration, squares
from data.shapes import chain, cospan_poset


def read_report(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestRun:

    def test_validate_a_span_window(self, tmp_path):
        out = tmp_path / "reports" / "span.json"
        code = run(Job(command="validate", inputs=["@span"], window=1, apex=1, out=str(out)))
        assert code == EXIT_PASS
        report = read_report(out)
        assert report["status"] == "pass"
        assert [sub["check"] for sub in report["subreports"]] == ["window_closure", "validate_double_category"]

    def test_validate_an_unclosed_window(self, tmp_path):
        out = tmp_path / "span.json"
        assert run(Job(command="validate", inputs=["@span"], window=1, apex=2, out=str(out))) == EXIT_FAIL
        report = read_report(out)
        assert report["counterexample"]["failed"] == "window_closure"
        assert len(report["counterexample"]["detail"]["pair"]) == 2

    def test_failing_check(self, tmp_path):
        path = save(arrow_category(cospan_poset()).cod, tmp_path / "cod.json")
        out = tmp_path / "report.json"
        assert run(Job(command="check", target="fib", inputs=[str(path)], out=str(out))) == EXIT_FAIL
        assert set(read_report(out)["counterexample"]) == {"base_arrow", "object"}

    def test_unknown_provider(self):
        assert run(Job(command="validate", inputs=["@graphs"])) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert run(Job(command="validate", inputs=[str(tmp_path / "absent.json")])) == EXIT_USAGE

    def test_wrong_kind_of_input(self, tmp_path):
        path = save(chain(2), tmp_path / "chain.json")
        assert run(Job(command="check", target="2fib", inputs=[str(path)])) == EXIT_USAGE

    def test_internal_flavors(self, tmp_path):
        path = save(involution_fibration(), tmp_path / "inv.json")
        assert run(Job(command="check", target="internal", flavor="P", inputs=[str(path)],
                       out=str(tmp_path / "p.json"))) == EXIT_PASS
        assert run(Job(command="check", target="internal", flavor="S", inputs=[str(path)],
                       out=str(tmp_path / "s.json"))) == EXIT_FAIL
        assert read_report(tmp_path / "p.json")["witness"]["category"] == "Dbl_pseudo"

    def test_inconclusive_search(self, tmp_path):
        path = save(DoubleFunctor.identity(squares(chain(3))), tmp_path / "id.json")
        out = tmp_path / "report.json"
        assert run(Job(command="check", target="double-fibration", inputs=[str(path)], bound=1,
                       out=str(out))) == EXIT_FAIL
        assert read_report(out)["status"] == "inconclusive"

    def test_elements_with_save(self, tmp_path):
        recipe = save(IndexedRecipeDocument(example="constant", base=to_document(squares(chain(2)))),
                      tmp_path / "const.json")
        saved = tmp_path / "el.json"
        assert run(Job(command="elements", inputs=[str(recipe)], save=str(saved),
                       out=str(tmp_path / "report.json"))) == EXIT_PASS
        assert run(Job(command="check", target="double-fibration", inputs=[str(saved)],
                       out=str(tmp_path / "again.json"))) == EXIT_PASS
        assert load(saved).functor.cod.E0.n_objects == 2

    def test_identical_jobs_give_identical_bytes(self, tmp_path):
        for name in ("a.json", "b.json"):
            run(Job(command="validate", inputs=["@monoidal"], out=str(tmp_path / name)))
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_report_goes_to_stdout(self, capsys):
        assert run(Job(command="validate", inputs=["@monoidal"])) == EXIT_PASS
        assert json.loads(capsys.readouterr().out)["check"] == "validate"


class TestParseJob:

    def test_internal_flavor_comes_before_the_input(self):
        job = parse_job(["check", "internal", "S", "fib.json"], Settings())
        assert job.target == "internal"
        assert job.flavor == "S"
        assert job.inputs == ["fib.json"]

    def test_flavor_option_wins(self):
        job = parse_job(["check", "internal", "S", "fib.json", "--flavor", "L"], Settings())
        assert job.flavor == "L"

    def test_defaults_come_from_settings(self):
        job = parse_job(["validate", "@span"], Settings(window=3, apex=2, bound=50, output_dir="out"))
        assert (job.window, job.apex, job.bound, job.output_dir) == (3, 2, 50, "out")

    def test_corpus_directory_is_optional(self):
        assert parse_job(["corpus", "--seed", "4"], Settings()).inputs == []
        assert parse_job(["corpus", "here"], Settings()).inputs == ["here"]

    @pytest.mark.parametrize("argv", [["check", "nonsense", "x.json"], ["validate", "@span", "--window", "9"]])
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as info:
            parse_job(argv, Settings())
        assert info.value.code == 2


class TestSettings:

    def test_environment(self):
        settings = load_settings({"DBLFIB_LOG_LEVEL": "debug", "DBLFIB_BOUND": "10", "DBLFIB_OUTPUT_DIR": "x"})
        assert settings.log_level == "DEBUG"
        assert settings.bound == 10
        assert settings.output_dir == "x"
        assert settings.window == 2

    @pytest.mark.parametrize("environ", [{"DBLFIB_WINDOW": "9"}, {"DBLFIB_LOG_LEVEL": "loud"},
                                         {"DBLFIB_BOUND": "many"}])
    def test_bad_values(self, environ):
        with pytest.raises(ConfigurationError):
            load_settings(environ)

    def test_main_reports_bad_configuration(self, monkeypatch):
        monkeypatch.setenv("DBLFIB_WINDOW", "9")
        assert main(["validate", "@span"]) == EXIT_USAGE
