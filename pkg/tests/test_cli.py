import json
import subprocess
import sys

import pytest

from frogrec.cli import main
from frogrec.config import ConfigError, parse_config, parse_override, resolve_key

SMALL = ["--set", "n=200", "--set", "random_candidates=50", "--set", "precision=\"float64\""]


def test_parse_config_defaults_and_overrides(tmp_path):
    cfg = parse_config()
    assert cfg.seed == 0 and cfg.model.d == 32 and cfg.train.lr == 0.001
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 5, "model": {"d": 16}}))
    cfg = parse_config(path, ["train.lr=0.01", "h=4"])
    assert (cfg.seed, cfg.model.d, cfg.train.lr, cfg.model.h) == (5, 16, 0.01, 4)


def test_file_is_not_mutated(tmp_path):
    path = tmp_path / "c.json"
    text = json.dumps({"model": {"d": 16}})
    path.write_text(text)
    parse_config(path, ["d=32"])
    assert path.read_text() == text


@pytest.mark.parametrize(
    "override, fragment",
    [("d=-1", "model: d must be >= 1"), ("foo=1", "foo: unknown"), ("train.lr=\"x\"", "train.lr"),
     ("seed=1.5", "seed: expected an integer"), ("modalities=[\"graph\"]", "ambiguous")],
)
def test_config_errors_name_key(override, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(None, [override])


def test_config_file_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_override_parsing():
    assert parse_override("lr=0.5") == ("train.lr", 0.5)
    assert parse_override("variant=no-local") == ("model.variant", "no-local")
    assert resolve_key("model.d") == "model.d"


def test_unknown_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_bad_override_exits_2(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path), "--set", "d=0"]) == 2
    assert "model: d" in capsys.readouterr().err


def test_synth_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["synth", "--seed", "3", "--out", str(tmp_path / name), *SMALL]) == 0
    files = sorted(p.name for p in (tmp_path / "a" / "data").iterdir())
    assert files
    for f in files:
        assert (tmp_path / "a" / "data" / f).read_bytes() == (tmp_path / "b" / "data" / f).read_bytes()
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma["artifacts"] == mb["artifacts"] and ma["seed"] == 3 and ma["command"] == "synth"


def test_train_eval_and_manifest(tmp_path):
    out = tmp_path / "run"
    args = ["--out", str(out), *SMALL, "--set", "d=8", "--set", "h=8", "--set", "max_epochs=1"]
    assert main(["train", *args]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["artifacts"]) == {"metrics.json", "model.npz"}
    assert manifest["config"]["model"]["d"] == 8
    assert "timings" not in metrics and (out / "timings.json").is_file()
    assert main(["eval", *args]) == 0
    ev = json.loads((out / "eval.json").read_text())
    assert ev["test"] == metrics["test"]


def test_train_baseline_kind(tmp_path):
    out = tmp_path / "lr"
    assert main(["train", "--kind", "lr", "--out", str(out), *SMALL, "--set", "max_epochs=1"]) == 0
    assert json.loads((out / "metrics.json").read_text())["model"] == "lr"


def test_eval_missing_checkpoint(tmp_path, capsys):
    assert main(["eval", "--out", str(tmp_path), "--checkpoint", str(tmp_path / "none.npz"), *SMALL]) == 2


def test_gradcheck_command(tmp_path):
    assert main(["gradcheck", "--out", str(tmp_path), "--set", "users=30", "--set", "dim=4", "--set", "hidden=4",
                 "--set", "gradcheck.modalities=[\"profile\",\"pair\"]"]) == 0
    out = json.loads((tmp_path / "gradcheck.json").read_text())
    assert out["passed"] and out["max_rel_error"] <= 1e-4


def test_bench_command(tmp_path):
    assert main(["bench", "--out", str(tmp_path), "--set", "d_list=[4,8,16]", "--set", "repetitions=1",
                 "--set", "bench.batch=2"]) == 0
    assert "slope" in json.loads((tmp_path / "bench.json").read_text())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "frogrec", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "synth" in res.stdout
