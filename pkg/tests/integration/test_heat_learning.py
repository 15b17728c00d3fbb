"""
End-to-end learning on the synthetic heat-diffusion dataset.

These runs train for thousands of steps and take several minutes each.
"""

import numpy as np
import pytest

from mesh_transformer.dataio.dataset import MeshDataset
from mesh_transformer.dataio.heat import gen_heat_dataset
from mesh_transformer.models.config import AugmentSpec
from mesh_transformer.rollout.metrics import evaluate
from mesh_transformer.settings import RuntimeSettings
from mesh_transformer.train.loop import build_simulator, train_steps
from tests.utils.factories import ConfigFactory

pytestmark = pytest.mark.slow

STEPS = 2000
# Augmentation must not make training loss worse by more than this factor.
NON_INFERIORITY_MARGIN = 1.05


@pytest.fixture(scope="module")
def heat_splits():
    train = gen_heat_dataset(200, 30, seed=0, num_trajectories=20)
    test = gen_heat_dataset(200, 30, seed=1, num_trajectories=4)
    return MeshDataset(train), MeshDataset(test)


def _train(heat_splits, seed: int, augment: AugmentSpec | None = None):
    dataset, _ = heat_splits
    model_cfg = ConfigFactory.model(
        d=32,
        layers=4,
        heads=2,
        expansion=3,
        augment=(augment or AugmentSpec.disabled()).model_dump(),
    )
    train_cfg = ConfigFactory.train(total_iters=STEPS, lr=1e-3, seed=seed, log_every=100)
    train_cfg = train_cfg.model_copy(
        update={"schedule": train_cfg.schedule.model_copy(update={"warmup_iters": 100})}
    )
    sim = build_simulator(model_cfg, dataset, seed, RuntimeSettings())
    return train_steps(sim, dataset, train_cfg)


class TestHeatLearning:
    def test_beats_persistence(self, heat_splits):
        _, test = heat_splits
        result = _train(heat_splits, seed=0)

        report = evaluate(result.simulator, test.trajectories, test.names)

        assert report.persistence is not None
        assert report.aggregate.all_rollout <= 0.5 * report.persistence.all_rollout

    def test_augmentation_non_inferior(self, heat_splits):
        augment = AugmentSpec(
            random_edge_fraction=0.2,
            dilation_plan="dilation2",
            global_fraction=0.01,
            tail_layers=2,
        )
        base = [_train(heat_splits, seed).record.final_loss for seed in range(3)]
        augmented = [_train(heat_splits, seed, augment).record.final_loss for seed in range(3)]

        assert np.mean(augmented) <= NON_INFERIORITY_MARGIN * np.mean(base)
