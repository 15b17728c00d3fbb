"""Training: schedules, optimizer, noise injection, the training loop and masked pretraining."""

from .losses import l2_loss
from .loop import (
    LOSS_CURVE_FILENAME,
    RUN_RECORD_FILENAME,
    TrainResult,
    build_simulator,
    model_for_dataset,
    next_step_loss,
    optimize,
    run_record,
    train_steps,
)
from .noise import add_noise, calibrate_noise, noisy_state
from .optimizer import AdamState, adamw_step
from .pretrain import PretrainResult, mask_pretrain, masked_rows, stacked_configs
from .schedules import lr_at
from .streams import RandomStreams, stream

__all__ = [
    "LOSS_CURVE_FILENAME",
    "RUN_RECORD_FILENAME",
    "AdamState",
    "PretrainResult",
    "RandomStreams",
    "TrainResult",
    "adamw_step",
    "add_noise",
    "build_simulator",
    "calibrate_noise",
    "l2_loss",
    "lr_at",
    "mask_pretrain",
    "masked_rows",
    "model_for_dataset",
    "next_step_loss",
    "noisy_state",
    "optimize",
    "run_record",
    "stacked_configs",
    "stream",
    "train_steps",
]
