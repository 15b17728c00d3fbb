"""Subcommands of the mesh-transformer command line."""

import json
import logging
from pathlib import Path

import click
import pandas as pd

from ..augment.builder import augment_stats
from ..dataio.checkpoint import load_checkpoint, save_checkpoint, save_weights_dir
from ..dataio.dataset import MeshDataset, load_dataset, save_dataset
from ..dataio.heat import gen_heat_dataset
from ..dataio.mgf import save_mgf
from ..exceptions import ConfigurationError
from ..models.config import AugmentSpec, ModelConfig, RunConfig
from ..models.constants import DEFAULT_FORCED_NODE_TYPES, PRESETS
from ..network.flops import flops_estimate
from ..network.normalizer import Normalizer
from ..network.weights import transfer_weights
from ..rollout.engine import rollout
from ..rollout.metrics import evaluate
from ..scaling.sweep import FIT_JSON, aggregate, load_runs_csv, sweep_driver
from ..settings import RuntimeSettings
from ..train.loop import (
    LOSS_CURVE_FILENAME,
    RUN_RECORD_FILENAME,
    build_simulator,
    train_steps,
)
from ..train.pretrain import mask_pretrain
from ..train.streams import RandomStreams
from ..utils.decorators import handle_cli_errors
from ..utils.io import ensure_output_dir, write_json
from ..utils.logging import log_config_param

logger = logging.getLogger("mesh-transformer.cli")

CONFIG_COPY = "config.json"
CHECKPOINT_DIR = "checkpoint"
ENCODER_DIR = "encoder"
METRICS_JSON = "metrics.json"


def _load_config(path: str) -> RunConfig:
    cfg = RunConfig.load(path)
    log_config_param(logger, "model", "shape", (cfg.model.d, cfg.model.layers, cfg.model.heads))
    log_config_param(logger, "model", "augment", cfg.model.augment.to_simplified_dict())
    log_config_param(logger, "train", "total_iters", cfg.train.total_iters)
    log_config_param(logger, "train", "seed", cfg.train.seed)
    return cfg


def _copy_config(cfg: RunConfig, out: Path) -> None:
    write_json(out / CONFIG_COPY, cfg.model_dump(mode="json"))


def _train_data(cfg: RunConfig, data: str | None) -> tuple[MeshDataset, MeshDataset | None]:
    train_path = data or (cfg.data.train if cfg.data else None)
    if train_path is None:
        raise ConfigurationError("No training data: set data.train in the config or pass --data")
    test_path = cfg.data.test if cfg.data else None
    return load_dataset(train_path), load_dataset(test_path) if test_path else None


def _echo_json(payload: object) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@click.command("gen-data")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--trajectories", default=20, show_default=True, help="Training trajectories")
@click.option(
    "--test-trajectories", default=None, type=int, help="Test trajectories (default: K/5)"
)
@click.option("--nodes", default=200, show_default=True, help="Nodes per mesh")
@click.option("--steps", default=30, show_default=True, help="Frames per trajectory")
@click.option("--diffusivity", default=1.0, show_default=True)
@click.option("--k-neighbors", default=6, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--workers", default=None, type=int, help="Worker processes (default: MESH_WORKERS)")
@handle_cli_errors("gen-data")
def gen_data(
    out_dir: str,
    trajectories: int,
    test_trajectories: int | None,
    nodes: int,
    steps: int,
    diffusivity: float,
    k_neighbors: int,
    seed: int,
    workers: int | None,
) -> None:
    """Generate synthetic heat-diffusion train/ and test/ splits."""
    out = ensure_output_dir(out_dir)
    settings = RuntimeSettings.from_env()
    workers = workers or settings.workers
    n_test = max(1, trajectories // 5) if test_trajectories is None else test_trajectories
    params = {
        "trajectories": trajectories,
        "test_trajectories": n_test,
        "nodes": nodes,
        "steps": steps,
        "diffusivity": diffusivity,
        "k_neighbors": k_neighbors,
        "seed": seed,
    }
    write_json(out / CONFIG_COPY, params)
    for split, count, split_seed in (("train", trajectories, seed), ("test", n_test, seed + 1)):
        if count == 0:
            continue
        trajs = gen_heat_dataset(
            nodes,
            steps,
            diffusivity,
            k_neighbors,
            seed=split_seed,
            num_trajectories=count,
            workers=workers,
        )
        save_dataset(trajs, out / split)
    click.echo(str(out))


@click.command("train")
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--data", default=None, type=click.Path(exists=True), help="Override data.train")
@click.option(
    "--pretrained",
    default=None,
    type=click.Path(exists=True, file_okay=False),
    help="Encoder directory written by pretrain",
)
@handle_cli_errors("train")
def train(config_path: str, out_dir: str, data: str | None, pretrained: str | None) -> None:
    """Train a model; writes a checkpoint, the loss curve CSV and the run record JSON."""
    cfg = _load_config(config_path)
    out = ensure_output_dir(out_dir)
    _copy_config(cfg, out)
    settings = RuntimeSettings.from_env()
    dataset, test = _train_data(cfg, data)

    sim = build_simulator(cfg.model, dataset, cfg.train.seed, settings)
    if pretrained:
        encoder = load_checkpoint(pretrained, settings)
        sim = sim.with_weights(
            transfer_weights(
                encoder.weights,
                sim.cfg,
                RandomStreams(cfg.train.seed).init,
                settings.dtype,
            )
        )
    result = train_steps(sim, dataset, cfg.train, test)
    save_checkpoint(result.simulator, out / CHECKPOINT_DIR)
    result.write(out)
    _echo_json(result.record.to_simplified_dict())


@click.command("pretrain")
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--mask-fraction", default=None, type=float, help="Default: train.mask_fraction")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--data", default=None, type=click.Path(exists=True), help="Override data.train")
@handle_cli_errors("pretrain")
def pretrain(config_path: str, mask_fraction: float | None, out_dir: str, data: str | None) -> None:
    """Masked-node pretraining; writes the encoder for `train --pretrained`."""
    cfg = _load_config(config_path)
    out = ensure_output_dir(out_dir)
    _copy_config(cfg, out)
    settings = RuntimeSettings.from_env()
    dataset, _ = _train_data(cfg, data)
    fraction = cfg.train.mask_fraction if mask_fraction is None else mask_fraction
    log_config_param(logger, "pretrain", "mask_fraction", fraction)

    encoder_cfg, decoder_cfg = pretrain_configs(cfg.model)
    result = mask_pretrain(encoder_cfg, decoder_cfg, dataset, fraction, cfg.train, settings)
    save_weights_dir(
        result.encoder,
        out / ENCODER_DIR,
        result.encoder_cfg,
        result.input_norm,
        Normalizer.identity(result.encoder_cfg.p_out),
    )
    result.curve.to_csv(out / LOSS_CURVE_FILENAME, index=False)
    write_json(out / RUN_RECORD_FILENAME, result.record.to_simplified_dict())
    _echo_json(result.record.to_simplified_dict())


def pretrain_configs(model: ModelConfig) -> tuple[ModelConfig, ModelConfig]:
    """
    Encoder: the configured model emitting its latent width d.
    Decoder: a shallow un-augmented transformer of the same width.
    """
    base = model.model_dump()
    encoder = ModelConfig.model_validate({**base, "p_out": model.d})
    decoder = ModelConfig.model_validate(
        {
            **base,
            "preset": "custom",
            "layers": max(1, model.layers // 4),
            "p_in": model.d,
            "pe": {"mode": "none"},
            "augment": AugmentSpec.disabled().model_dump(),
        }
    )
    return encoder, decoder


@click.command("rollout")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--steps", default=None, type=int, help="Predicted frames (default: all)")
@click.option("--start", default=0, show_default=True, help="Start frame")
@click.option("--seed", default=0, show_default=True, help="Seed of the random attention edges")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@handle_cli_errors("rollout")
def rollout_cmd(
    checkpoint: str, data: str, steps: int | None, start: int, seed: int, out_dir: str
) -> None:
    """Roll a checkpoint forward; writes one predicted MGF directory per trajectory."""
    out = ensure_output_dir(out_dir)
    settings = RuntimeSettings.from_env()
    sim = load_checkpoint(checkpoint, settings)
    dataset = load_dataset(data)
    write_json(
        out / CONFIG_COPY,
        {"checkpoint": checkpoint, "data": data, "steps": steps, "start": start, "seed": seed},
    )
    edges = RandomStreams(seed).random_edges
    for name, traj in zip(dataset.names, dataset, strict=True):
        frames = rollout(sim, traj, start_t=start, steps=steps, rng=edges)
        save_mgf(traj.with_fields(frames), out / name)
        logger.info(f"Rolled out {name}: {frames.shape[0] - 1} steps")
    click.echo(str(out))


@click.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--root", is_flag=True, help="Report root-mean-square metrics")
@click.option("--seed", default=0, show_default=True, help="Seed of the random attention edges")
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@handle_cli_errors("eval")
def eval_cmd(checkpoint: str, data: str, root: bool, seed: int, out_dir: str | None) -> None:
    """Print 1-step and all-rollout metrics (also ×10³) with the persistence baseline."""
    sim = load_checkpoint(checkpoint, RuntimeSettings.from_env())
    dataset = load_dataset(data)
    report = evaluate(
        sim, dataset.trajectories, dataset.names, DEFAULT_FORCED_NODE_TYPES, root, seed=seed
    )
    payload = report.to_simplified_dict()
    if out_dir:
        write_json(ensure_output_dir(out_dir) / METRICS_JSON, payload)
    _echo_json(payload)


@click.command("flops")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
@handle_cli_errors("flops")
def flops(config_path: str | None) -> None:
    """Print per-node FLOPs under the transformer, message-passing and 2P formulas."""
    if config_path:
        models = {"config": RunConfig.load(config_path).model}
    else:
        models = {name: ModelConfig.from_preset(name) for name in PRESETS}
    rows = []
    for name, cfg in models.items():
        report = flops_estimate(cfg)
        rows.append(
            {
                "model": name,
                "d": cfg.d,
                "L": cfg.layers,
                "P": report.param_count,
                "transformer": report.transformer_per_node,
                "mps": report.mps_per_node,
                "2P": report.two_p,
                "transformer/2P": round(report.ratio_transformer, 3),
                "mps/2P": round(report.ratio_mps, 3),
            }
        )
    click.echo(pd.DataFrame(rows).to_string(index=False))


@click.command("scaling-fit")
@click.option("--runs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--refine/--no-refine", default=True, show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@handle_cli_errors("scaling-fit")
def scaling_fit(runs: str, refine: bool, out_dir: str | None) -> None:
    """Fit P* = k·C^a to the isoFLOP minima of a sweep CSV."""
    summary = aggregate(load_runs_csv(runs), refine).summary()
    if out_dir:
        write_json(ensure_output_dir(out_dir) / FIT_JSON, summary)
    _echo_json(summary)


@click.command("scaling-sweep")
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--workers", default=None, type=int, help="Parallel runs (default: sweep.workers)")
@handle_cli_errors("scaling-sweep")
def scaling_sweep(config_path: str, out_dir: str, workers: int | None) -> None:
    """Train the model grid at every budget and fit the compute-optimal frontier."""
    cfg = _load_config(config_path)
    if cfg.sweep is None:
        raise ConfigurationError(f"{config_path} has no 'sweep' section")
    out = ensure_output_dir(out_dir)
    _copy_config(cfg, out)
    dataset, test = _train_data(cfg, None)
    result = sweep_driver(
        cfg.model, cfg.sweep, dataset, cfg.train, test, RuntimeSettings.from_env(), workers
    )
    result.write(out)
    _echo_json(result.summary())


@click.command("augment-preview")
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--self-loops", is_flag=True)
@handle_cli_errors("augment-preview")
def augment_preview(data: str, spec_path: str, self_loops: bool) -> None:
    """Print nnz and degree statistics after each augmentation stage."""
    spec = AugmentSpec.from_json_file(spec_path)
    dataset = load_dataset(data)
    rows = []
    for name, traj in zip(dataset.names, dataset, strict=True):
        for stage in augment_stats(traj.graph, spec, self_loops, seed=spec.seed):
            rows.append({"trajectory": name, **stage.model_dump()})
    click.echo(pd.DataFrame(rows).to_string(index=False))


COMMANDS = [
    gen_data,
    train,
    pretrain,
    rollout_cmd,
    eval_cmd,
    flops,
    scaling_fit,
    scaling_sweep,
    augment_preview,
]
