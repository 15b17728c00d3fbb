"""Tests for datasets and checkpoints."""

import json

import numpy as np
import pytest

from mesh_transformer.dataio.blobs import META_FILENAME
from mesh_transformer.dataio.checkpoint import load_checkpoint, save_checkpoint
from mesh_transformer.dataio.dataset import MeshDataset, load_dataset, save_dataset
from mesh_transformer.exceptions import CorruptMetaError, DataFormatError
from mesh_transformer.network.normalizer import Normalizer
from mesh_transformer.network.simulator import Simulator
from mesh_transformer.network.weights import init_weights
from tests.utils.factories import GraphFactory, TrajectoryFactory


class TestMeshDataset:
    """Tests for MeshDataset."""

    def test_counts(self, tiny_dataset):
        assert len(tiny_dataset) == 2
        assert tiny_dataset.num_samples == 7
        assert tiny_dataset.nodes_per_sample == 12.0
        assert tiny_dataset.names == ["traj-0000", "traj-0001"]

    def test_sampling_covers_every_transition(self, tiny_dataset):
        rng = np.random.default_rng(0)
        seen = set()
        for _ in range(300):
            traj, t = tiny_dataset.sample(rng)
            assert 0 <= t < traj.num_frames - 1
            seen.add((id(traj), t))

        assert len(seen) == 7

    def test_empty_dataset(self):
        with pytest.raises(DataFormatError):
            MeshDataset([]).sample(np.random.default_rng(0))

    def test_names_length(self, tiny_dataset):
        with pytest.raises(DataFormatError):
            MeshDataset(tiny_dataset.trajectories, names=["only"])


class TestDatasetFiles:
    def test_save_and_load_directory(self, tiny_dataset, tmp_path):
        save_dataset(tiny_dataset.trajectories, tmp_path / "data", names=["b", "a"])

        loaded = load_dataset(tmp_path / "data")

        assert loaded.names == ["a", "b"]
        assert loaded[1].graph == tiny_dataset[0].graph

    def test_single_trajectory_directory(self, grid_trajectory, tmp_path):
        save_dataset([grid_trajectory], tmp_path / "data")

        loaded = load_dataset(tmp_path / "data" / "traj-0000")

        assert len(loaded) == 1

    def test_no_trajectories(self, tmp_path):
        with pytest.raises(DataFormatError, match="No MGF"):
            load_dataset(tmp_path)

    def test_not_a_directory(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_dataset(tmp_path / "missing")


class TestCheckpoint:
    @pytest.fixture
    def simulator(self, tiny_model_cfg):
        input_norm, target_norm = Normalizer(7), Normalizer(1)
        input_norm.accumulate(np.random.default_rng(0).normal(size=(10, 7)))
        target_norm.accumulate(np.random.default_rng(1).normal(size=(10, 1)))
        weights = init_weights(tiny_model_cfg, seed=2, dtype=np.float32)
        return Simulator(tiny_model_cfg, weights, input_norm, target_norm)

    def test_round_trip(self, simulator, tmp_path):
        save_checkpoint(simulator, tmp_path / "ckpt")

        loaded = load_checkpoint(tmp_path / "ckpt")

        assert loaded.cfg == simulator.cfg
        for name, array in simulator.weights.items():
            assert np.array_equal(loaded.weights[name], array), name
        assert np.allclose(loaded.input_norm.mean, simulator.input_norm.mean)

    def test_predictions_survive_reload(self, simulator, tmp_path):
        traj = TrajectoryFactory.create(GraphFactory.grid(3, 3))
        save_checkpoint(simulator, tmp_path / "ckpt")

        loaded = load_checkpoint(tmp_path / "ckpt")

        assert np.allclose(
            loaded.predict(traj, traj.fields[0]), simulator.predict(traj, traj.fields[0])
        )

    def test_weights_not_matching_config(self, simulator, tmp_path):
        directory = save_checkpoint(simulator, tmp_path / "ckpt")
        meta = json.loads((directory / META_FILENAME).read_text())
        meta["model"]["d"] = 16
        (directory / META_FILENAME).write_text(json.dumps(meta))

        with pytest.raises(CorruptMetaError, match="do not fit"):
            load_checkpoint(directory)
