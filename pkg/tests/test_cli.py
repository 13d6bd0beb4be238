import json

import pytest

from styledit import toydata
from styledit.cli import main
from styledit.fluency import NgramLM
from styledit.service.ops import reset_engine_cache


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_bench")
    toydata.write_benchmark(out, size=10, seed=5, corpus_size=120)
    reset_engine_cache()
    return out


class TestTransferCommand:
    def test_writes_outputs_and_trace(self, bench, tmp_path, capsys):
        out_path = tmp_path / "out.txt"
        trace_path = tmp_path / "trace.jsonl"
        code = main([
            "transfer",
            "--input", str(bench / "inputs.txt"),
            "--output", str(out_path),
            "--config", str(bench / "run.cfg"),
            "--trace", str(trace_path),
        ])
        assert code == 0
        outputs = [line for line in out_path.read_text().splitlines() if line]
        inputs = [line for line in (bench / "inputs.txt").read_text().splitlines() if line]
        assert len(outputs) == len(inputs)
        records = [json.loads(line) for line in trace_path.read_text().splitlines() if line]
        assert records and {"input_index", "step", "edit", "scores", "neighborhood_size"} <= set(
            records[0]
        )
        assert "ACC" in capsys.readouterr().out

    def test_deterministic_output_files(self, bench, tmp_path):
        paths = [tmp_path / "a.txt", tmp_path / "b.txt"]
        for path in paths:
            assert main([
                "transfer",
                "--input", str(bench / "inputs.txt"),
                "--output", str(path),
                "--config", str(bench / "run.cfg"),
            ]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_missing_input_file_is_config_error(self, bench, tmp_path):
        code = main([
            "transfer",
            "--input", str(tmp_path / "absent.txt"),
            "--output", str(tmp_path / "out.txt"),
            "--config", str(bench / "run.cfg"),
        ])
        assert code == 1

    def test_unknown_config_key_is_config_error(self, bench, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text((bench / "run.cfg").read_text() + "mystery = 1\n")
        code = main([
            "transfer",
            "--input", str(bench / "inputs.txt"),
            "--output", str(tmp_path / "out.txt"),
            "--config", str(bad),
        ])
        assert code == 1


class TestEvaluateCommand:
    def test_report_written(self, bench, tmp_path):
        report_path = tmp_path / "report.json"
        code = main([
            "evaluate",
            "--hyp", str(bench / "references.txt"),
            "--refs", str(bench / "references.txt"),
            "--config", str(bench / "run.cfg"),
            "--report", str(report_path),
        ])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["bleu"] == pytest.approx(100.0)
        assert report["accuracy"] == 100.0

    def test_multiple_reference_files(self, bench, tmp_path):
        code = main([
            "evaluate",
            "--hyp", str(bench / "references.txt"),
            "--refs", f"{bench / 'references.txt'},{bench / 'inputs.txt'}",
            "--config", str(bench / "run.cfg"),
            "--report", str(tmp_path / "r.json"),
        ])
        assert code == 0

    def test_misaligned_references_rejected(self, bench, tmp_path):
        short = tmp_path / "short.txt"
        short.write_text("the food was good\n")
        code = main([
            "evaluate",
            "--hyp", str(bench / "references.txt"),
            "--refs", str(short),
            "--config", str(bench / "run.cfg"),
        ])
        assert code == 1


class TestTrainLmCommand:
    def test_model_file_loads(self, bench, tmp_path):
        out = tmp_path / "toy.nglm"
        code = main([
            "train-lm",
            "--corpus", str(bench / "corpus.txt"),
            "--order", "2",
            "--delta", "0.5",
            "--out", str(out),
        ])
        assert code == 0
        lm = NgramLM.load(out)
        assert lm.order == 2 and lm.deltas == (0.5, 0.5)

    def test_bad_delta_is_config_error(self, bench, tmp_path):
        code = main([
            "train-lm",
            "--corpus", str(bench / "corpus.txt"),
            "--order", "2",
            "--delta", "7",
            "--out", str(tmp_path / "x.nglm"),
        ])
        assert code == 1


class TestCompareSearchCommand:
    def test_report_written(self, bench, tmp_path):
        report_path = tmp_path / "cmp.json"
        code = main([
            "compare-search",
            "--algos", "sahc,fchc",
            "--seeds", "2",
            "--input", str(bench / "inputs.txt"),
            "--config", str(bench / "run.cfg"),
            "--report", str(report_path),
        ])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert set(report["results"]) == {"sahc", "fchc"}


class TestExitCodes:
    def test_bad_flags_exit_one(self):
        assert main(["transfer", "--no-such-flag"]) == 1

    def test_unknown_subcommand_exit_one(self):
        assert main(["frobnicate"]) == 1

    def test_dead_server_exit_two(self, bench, tmp_path):
        code = main([
            "--server", "http://127.0.0.1:9",  # discard port: nothing listens
            "transfer",
            "--input", str(bench / "inputs.txt"),
            "--output", str(tmp_path / "out.txt"),
            "--config", str(bench / "run.cfg"),
        ])
        assert code == 2

    def test_server_mode_against_live_app(self, bench, tmp_path, monkeypatch):
        # drive the real HTTP request path against an in-process app
        import httpx
        from fastapi.testclient import TestClient

        from styledit.service import create_app

        with TestClient(create_app()) as service:

            def service_post(url, **kwargs):
                kwargs.pop("timeout", None)
                return service.post(url.replace("http://svc.test", ""), **kwargs)

            monkeypatch.setattr(httpx, "post", service_post)
            out_path = tmp_path / "out.txt"
            code = main([
                "--server", "http://svc.test",
                "transfer",
                "--input", str(bench / "inputs.txt"),
                "--output", str(out_path),
                "--config", str(bench / "run.cfg"),
            ])
        assert code == 0
        outputs = [line for line in out_path.read_text().splitlines() if line]
        assert len(outputs) == 10
