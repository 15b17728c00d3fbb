"""
Constants and default values for configurations.

This module centralizes the named model presets, the full model grid used for
ablations and isoFLOP sweeps, and the default hyperparameters of each preset.
"""

#
# Model presets (d, layers, heads)
#
PRESET_S = (64, 10, 2)
PRESET_M = (128, 15, 4)
PRESET_L = (256, 15, 4)
PRESET_XL = (512, 15, 4)

PRESETS: dict[str, tuple[int, int, int]] = {
    "S": PRESET_S,
    "M": PRESET_M,
    "L": PRESET_L,
    "XL": PRESET_XL,
}

# Published parameter counts in millions, for the Cylinder-like widths below
PRESET_PARAMS_MILLIONS: dict[str, float] = {"S": 0.55, "M": 3.2, "L": 13.0, "XL": 51.0}

DEFAULT_EXPANSION = 3

#
# Full model grid: (d, layers, heads) in increasing size
#
MODEL_GRID: tuple[tuple[int, int, int], ...] = (
    (16, 3, 2),
    (16, 5, 2),
    (32, 5, 2),
    (32, 10, 2),
    (48, 10, 2),
    (64, 10, 2),
    (80, 10, 2),
    (128, 10, 4),
    (128, 12, 4),
    (128, 14, 4),
    (128, 15, 4),
    (152, 15, 4),
    (200, 15, 4),
    (256, 15, 4),
    (512, 15, 4),
)

#
# Cylinder-like feature widths: 2 velocity components + 5 node-type one-hot in,
# 2 velocity components out, 2D coordinates as positional encoding
#
CYLINDER_P_IN = 7
CYLINDER_P_OUT = 2
CYLINDER_COORD_DIM = 2

#
# Augmentation defaults
#
DEFAULT_RANDOM_EDGE_FRACTION = 0.20
DEFAULT_GLOBAL_FRACTION = 0.01
DEFAULT_TAIL_LAYERS = 5
DEFAULT_GLOBAL_NODE_TYPES = ("wall",)
DEFAULT_FORCED_NODE_TYPES = ("inflow",)

#
# Training defaults
#
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.95
DEFAULT_WEIGHT_DECAY = 1e-4
DEFAULT_ADAM_EPS = 1e-8
DEFAULT_FLAT_FRACTION = 0.75
DEFAULT_MASK_FRACTION = 0.15
DEFAULT_LOG_EVERY = 50

# (lr_max, lr_min, warmup_iters) per preset
PRESET_SCHEDULES: dict[str, tuple[float, float, int]] = {
    "S": (1e-3, 1e-6, 1000),
    "M": (1e-3, 1e-6, 1000),
    "L": (1e-3, 1e-6, 5000),
    "XL": (1e-4, 1e-7, 5000),
}

#
# Scaling sweeps
#
MIN_SWEEP_STEPS = 50
MIN_RUNS_PER_GROUP = 3

#
# Files
#
MGF_FORMAT_VERSION = 1
METRIC_DISPLAY_SCALE = 1e3
