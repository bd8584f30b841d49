import json

import pytest
import yaml

from main import build_parser, main
from src.config import load_run_config
from src.services.dataset_loader import load_pool
from src.models import TaskKind
from tests.conftest import CONFIG_DIR


def test_every_command_is_registered():
    parser = build_parser()

    for argv in (
        ["match", "--config", "c.yaml"],
        ["knowledge", "build", "--source", "EaK", "--config", "c.yaml"],
        ["dataset", "build", "--input", "m.jsonl", "--output", "p.jsonl"],
        ["render", "--pair-id", "t01", "--config", "c.yaml"],
        ["eval", "--log", "run-1.jsonl", "--config", "c.yaml"],
    ):
        assert callable(parser.parse_args(argv).handler)


def test_match_prints_the_report(toy_run, capsys):
    config_path = toy_run()

    assert main(["match", "--config", str(config_path)]) == 0

    out = capsys.readouterr().out
    assert "format audit: 20 well-formatted, 0 badly-formatted, 0 eliminated" in out
    assert "selected run: 1" in out
    assert out.splitlines()[-4].split()[:5] == ["best_f1", "0.7000", "0.7500", "0.6000", "0.6667"]


def test_run_logs_do_not_depend_on_worker_count(toy_run):
    logs = []
    for workers in (1, 4, 16):
        config_path = toy_run(name=f"w{workers}")
        assert main(["match", "--config", str(config_path), "--workers", str(workers)]) == 0
        out = load_run_config(config_path).output_dir
        logs.append([(out / "runs" / f"run-{i}.jsonl").read_bytes() for i in (1, 2)])

    assert logs[0] == logs[1] == logs[2]


def test_mock_flag_overrides_the_backend(toy_run, tmp_path, capsys):
    script = tmp_path / "all-yes.yaml"
    script.write_text(
        yaml.safe_dump({"rules": [{"tag": "self_indicator", "response": "x"}, {"tag": "match", "response": "yes"}]})
    )
    config_path = toy_run(backend={"kind": "anthropic"})

    assert main(["match", "--config", str(config_path), "--mock", str(script), "--seed", "3"]) == 0

    summary = json.loads((load_run_config(config_path).output_dir / "report.json").read_text())
    assert summary["recall"] == 1.0
    assert summary["precision"] == 0.5


def test_eval_rescores_logs(toy_run, capsys):
    config_path = toy_run()
    main(["match", "--config", str(config_path)])
    out_dir = load_run_config(config_path).output_dir
    logs = [str(out_dir / "runs" / f"run-{i}.jsonl") for i in (1, 2)]
    capsys.readouterr()

    assert main(["eval", "--config", str(config_path), "--log", *logs]) == 0

    assert capsys.readouterr().out == (out_dir / "report.txt").read_text()


def test_eval_rejects_logs_of_another_pool(toy_run, tmp_path):
    config_path = toy_run()
    log = tmp_path / "partial.jsonl"
    log.write_text(
        json.dumps({"pair_id": "t00", "votes": [], "final": "yes", "format_class": "WellFormatted"}) + "\n"
    )

    assert main(["eval", "--config", str(config_path), "--log", str(log)]) == 4


def test_render_prints_one_prompt_per_source(toy_run, capsys):
    assert main(["render", "--config", str(toy_run()), "--pair-id", "t03"]) == 0

    out = capsys.readouterr().out
    assert out.count("===== ") == 3
    assert "===== DaK* (k=4, " in out
    assert out.count("Your turn:\nSchema A: tbl03-c03\n") == 3


def test_knowledge_build(toy_run, capsys):
    config_path = toy_run()

    assert main(["knowledge", "build", "--source", "DaK", "--config", str(config_path)]) == 0
    assert main(["knowledge", "build", "--source", "DaK", "--config", str(config_path)]) == 0
    assert main(["knowledge", "build", "--source", "Null", "--config", str(config_path)]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "DaK: 20 pairs, 0 cached, 20 built, 0 empty",
        "DaK: 20 pairs, 20 cached, 0 built, 0 empty",
        "Null source: no knowledge to build",
    ]


def test_dataset_build(tmp_path, capsys):
    output = tmp_path / "pool.jsonl"
    argv = [
        "dataset", "build",
        "--input", str(CONFIG_DIR / "data" / "mmm_mentions_sample.jsonl"),
        "--output", str(output),
        "--quota", "5",
    ]

    assert main(argv) == 0

    pool = load_pool(output, TaskKind.EM)
    assert len([p for p in pool.pairs if p.label is False]) == 5
    assert capsys.readouterr().out.startswith(f"{output}: {len(pool.pairs)} pairs")


@pytest.mark.parametrize(
    "argv,code",
    [
        (["match", "--config", "missing.yaml"], 2),
        (["knowledge", "build", "--source", "Freebase", "--config", "missing.yaml"], 2),
        (["render", "--pair-id", "t99"], 4),
    ],
)
def test_exit_codes(toy_run, argv, code):
    if "--pair-id" in argv:
        argv = argv + ["--config", str(toy_run())]

    assert main(argv) == code


def test_unscripted_prompt_exits_with_backend_error(toy_run, tmp_path):
    script = tmp_path / "silent.yaml"
    script.write_text(yaml.safe_dump({"rules": [{"tag": "self_indicator", "response": "x"}]}))

    assert main(["match", "--config", str(toy_run()), "--mock", str(script)]) == 3
