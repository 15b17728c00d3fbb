"""Tests for the mesh-transformer command line."""

import json
import math

import pandas as pd
import pytest
from click.testing import CliRunner

import mesh_transformer
from mesh_transformer import main
from mesh_transformer.dataio.dataset import load_dataset
from mesh_transformer.dataio.mgf import load_mgf
from mesh_transformer.models.config import ModelConfig
from mesh_transformer.network.weights import param_count

TINY_RUN = {
    "model": {
        "d": 8,
        "layers": 2,
        "heads": 2,
        "expansion": 2,
        "p_in": 1,
        "p_out": 1,
        "augment": {"random_edge_fraction": 0.1, "global_fraction": 0.05},
    },
    "train": {
        "schedule": {
            "kind": "warmup_cosine",
            "lr_max": 1e-3,
            "lr_min": 1e-4,
            "warmup_iters": 1,
            "total_iters": 3,
        },
        "noise_sigmas": [0.01],
        "log_every": 2,
    },
}


@pytest.fixture(autouse=True)
def no_signal_handlers(monkeypatch, clean_environment):
    """Keep the test process's own SIGINT handling."""
    monkeypatch.setattr(mesh_transformer, "setup_signal_handlers", lambda: None)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def heat_data(runner, tmp_path):
    out = tmp_path / "data"
    result = runner.invoke(
        main,
        ["gen-data", "--out", str(out), "--trajectories", "2", "--nodes", "30", "--steps", "5"],
    )
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture
def run_config(heat_data, tmp_path):
    path = tmp_path / "run.json"
    config = {
        **TINY_RUN,
        "data": {"train": str(heat_data / "train"), "test": str(heat_data / "test")},
    }
    path.write_text(json.dumps(config))
    return path


def _invoke(runner, *args):
    result = runner.invoke(main, [str(a) for a in args])
    assert result.exit_code == 0, result.output
    return result


class TestGenData:
    def test_splits(self, heat_data):
        train = load_dataset(heat_data / "train")
        test = load_dataset(heat_data / "test")

        assert len(train) == 2
        assert len(test) == 1
        assert train[0].fields.shape == (5, 30, 1)
        assert json.loads((heat_data / "config.json").read_text())["nodes"] == 30

    def test_invalid_size_is_a_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["gen-data", "--out", str(tmp_path), "--nodes", "2"])

        assert result.exit_code == 2


class TestPipeline:
    """gen-data → train → eval → rollout → pretrain → fine-tune."""

    def test_train_writes_artifacts(self, runner, run_config, tmp_path):
        out = tmp_path / "run"

        _invoke(runner, "train", "--config", run_config, "--out", out)

        record = json.loads((out / "run_record.json").read_text())
        curve = pd.read_csv(out / "loss_curve.csv")
        assert record["steps"] == 3
        assert record["flop_budget"] == pytest.approx(
            6 * record["param_count"] * record["training_nodes"]
        )
        assert record["final_all_rollout"] >= 0.0
        assert len(curve) == 3
        assert (out / "checkpoint" / "meta.json").is_file()
        assert (out / "config.json").is_file()

    def test_eval_and_rollout(self, runner, run_config, heat_data, tmp_path):
        out = tmp_path / "run"
        _invoke(runner, "train", "--config", run_config, "--out", out)
        checkpoint = out / "checkpoint"

        _invoke(
            runner,
            "eval",
            "--checkpoint",
            checkpoint,
            "--data",
            heat_data / "test",
            "--out",
            tmp_path / "eval",
        )
        _invoke(
            runner,
            "rollout",
            "--checkpoint",
            checkpoint,
            "--data",
            heat_data / "test",
            "--steps",
            2,
            "--out",
            tmp_path / "pred",
        )

        metrics = json.loads((tmp_path / "eval" / "metrics.json").read_text())
        assert metrics["trajectories"][0]["name"] == "traj-0000"
        assert math.isfinite(metrics["aggregate"]["all_rollout"])
        assert metrics["persistence"]["one_step"] > 0.0
        predicted = load_mgf(tmp_path / "pred" / "traj-0000")
        truth = load_dataset(heat_data / "test")[0]
        assert predicted.fields.shape == (3, 30, 1)
        assert predicted.graph == truth.graph

    def test_pretrain_then_fine_tune(self, runner, run_config, tmp_path):
        _invoke(
            runner,
            "pretrain",
            "--config",
            run_config,
            "--mask-fraction",
            0.2,
            "--out",
            tmp_path / "pre",
        )
        _invoke(
            runner,
            "train",
            "--config",
            run_config,
            "--out",
            tmp_path / "tuned",
            "--pretrained",
            tmp_path / "pre" / "encoder",
        )

        assert (tmp_path / "pre" / "encoder" / "meta.json").is_file()
        assert (tmp_path / "pre" / "loss_curve.csv").is_file()
        assert json.loads((tmp_path / "tuned" / "run_record.json").read_text())["steps"] == 3

    def test_data_override_without_config_paths(self, runner, heat_data, tmp_path):
        config = tmp_path / "nodata.json"
        config.write_text(json.dumps(TINY_RUN))

        _invoke(
            runner,
            "train",
            "--config",
            config,
            "--data",
            heat_data / "train",
            "--out",
            tmp_path / "run",
        )

        assert "final_all_rollout" not in json.loads(
            (tmp_path / "run" / "run_record.json").read_text()
        )


class TestUsageErrors:
    def test_unknown_command(self, runner):
        result = runner.invoke(main, ["fly"])

        assert result.exit_code == 2

    def test_unknown_config_key(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({**TINY_RUN, "extra": 1}))

        result = runner.invoke(main, ["train", "--config", str(path), "--out", str(tmp_path)])

        assert result.exit_code == 2
        assert "ConfigurationError" in result.output

    def test_missing_training_data(self, runner, tmp_path):
        path = tmp_path / "nodata.json"
        path.write_text(json.dumps(TINY_RUN))

        result = runner.invoke(main, ["train", "--config", str(path), "--out", str(tmp_path)])

        assert result.exit_code == 2
        assert "No training data" in result.output

    def test_corrupt_dataset_is_a_runtime_error(self, runner, run_config, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()

        result = runner.invoke(
            main,
            ["train", "--config", str(run_config), "--data", str(empty), "--out", str(tmp_path)],
        )

        assert result.exit_code == 1
        assert "DataFormatError" in result.output


class TestFlops:
    def test_presets_table(self, runner):
        result = _invoke(runner, "flops")

        lines = result.output.strip().splitlines()
        assert "transformer/2P" in lines[0]
        assert [line.split()[0] for line in lines[1:]] == ["S", "M", "L", "XL"]
        assert str(param_count(ModelConfig.from_preset("S"))) in lines[1]

    def test_config_row(self, runner, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(TINY_RUN))

        result = _invoke(runner, "flops", "--config", path)

        assert result.output.strip().splitlines()[1].split()[0] == "config"


class TestScaling:
    def test_scaling_fit(self, runner, tmp_path):
        rows = [
            {
                "budget": budget,
                "P": params,
                "final_loss": (math.log10(params) - math.log10(1e5 * (budget / 6e10) ** 0.5))
                ** 2,
            }
            for budget in (6e9, 6e10, 6e11)
            for params in (10_000, 100_000, 1_000_000)
        ]
        runs = tmp_path / "runs.csv"
        pd.DataFrame(rows).to_csv(runs, index=False)

        _invoke(runner, "scaling-fit", "--runs", runs, "--out", tmp_path / "fit")

        summary = json.loads((tmp_path / "fit" / "fit.json").read_text())
        assert summary["fit"]["exponent"] == pytest.approx(0.5)
        assert summary["skipped_budgets"] == []

    def test_scaling_sweep(self, runner, heat_data, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(
            json.dumps(
                {
                    **TINY_RUN,
                    "data": {"train": str(heat_data / "train")},
                    "sweep": {
                        "budgets": [3e6, 6e6],
                        "grid": [
                            {"d": 8, "layers": 1, "heads": 2},
                            {"d": 8, "layers": 2, "heads": 2},
                        ],
                        "min_steps": 1,
                        "eval_rollout": False,
                    },
                }
            )
        )

        _invoke(runner, "scaling-sweep", "--config", config, "--out", tmp_path / "sweep")

        frame = pd.read_csv(tmp_path / "sweep" / "sweep.csv")
        assert len(frame) == 4
        assert sorted(frame["budget"].unique()) == [3e6, 6e6]
        assert (tmp_path / "sweep" / "fit.json").is_file()

    def test_sweep_section_required(self, runner, run_config, tmp_path):
        result = runner.invoke(
            main, ["scaling-sweep", "--config", str(run_config), "--out", str(tmp_path)]
        )

        assert result.exit_code == 2


class TestAugmentPreview:
    def test_stages(self, runner, heat_data, tmp_path):
        spec = tmp_path / "augment.json"
        spec.write_text(
            json.dumps(
                {"dilation_plan": "dilation2", "random_edge_fraction": 0.1, "tail_layers": 2}
            )
        )

        result = _invoke(
            runner, "augment-preview", "--data", heat_data / "test", "--spec", spec
        )

        for stage in ("adjacency", "khop-1", "random", "global"):
            assert stage in result.output
