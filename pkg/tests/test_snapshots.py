import numpy as np
import pytest

from thermrom.assembly import assemble_affine_system
from thermrom.errors import InvalidArgument
from thermrom.fom import energy_norm
from thermrom.mesh import build_thermal_block_mesh
from thermrom.snapshots import (
    ParameterGrid,
    SnapshotSet,
    generate_snapshots,
    parse_grid_spec,
)


def test_parse_grid_spec():
    assert parse_grid_spec("10x10") == (10, 10)
    assert parse_grid_spec(" 3x7 ") == (3, 7)
    for bad in ("10", "axb", "3x", "0x3", "3x0", "-1x2"):
        with pytest.raises(InvalidArgument):
            parse_grid_spec(bad)


def test_training_grid_layout():
    grid = ParameterGrid.training(3, 3)
    assert np.allclose(grid.mu0_values, [0.1, 5.05, 10.0])
    assert np.allclose(grid.mu1_values, [-1.0, 0.0, 1.0])
    pts = grid.points
    assert pts.shape == (9, 2)
    # Row-major: mu0 outer, mu1 inner.
    assert np.allclose(pts[0], [0.1, -1.0])
    assert np.allclose(pts[1], [0.1, 0.0])
    assert np.allclose(pts[3], [5.05, -1.0])
    assert len(grid) == 9


def test_log_spacing_option():
    grid = ParameterGrid.training(3, 3, mu0_spacing="log")
    assert np.allclose(grid.mu0_values, [0.1, 1.0, 10.0])
    ratios = grid.mu0_values[1:] / grid.mu0_values[:-1]
    assert np.allclose(ratios, ratios[0])
    with pytest.raises(InvalidArgument):
        ParameterGrid.training(3, 3, mu0_spacing="cubic")


def test_validation_grid_offset():
    train = ParameterGrid.training(10, 10)
    val = ParameterGrid.validation(10, 10)
    assert len(val) == 100
    # No validation point coincides with a training point.
    train_set = {tuple(np.round(p, 12)) for p in train.points}
    val_set = {tuple(np.round(p, 12)) for p in val.points}
    assert not train_set & val_set
    # Axes shrink by half a training step at each end, keeping the
    # same point count.
    h0 = train.mu0_values[1] - train.mu0_values[0]
    assert abs(val.mu0_values[0] - (train.mu0_values[0] + 0.5 * h0)) <= 1e-12
    assert abs(val.mu0_values[-1] - (train.mu0_values[-1] - 0.5 * h0)) <= 1e-12
    h1 = train.mu1_values[1] - train.mu1_values[0]
    assert abs(val.mu1_values[0] - (train.mu1_values[0] + 0.5 * h1)) <= 1e-12
    assert abs(val.mu1_values[-1] - (train.mu1_values[-1] - 0.5 * h1)) <= 1e-12
    # All points stay inside the box.
    assert val.points[:, 0].min() >= 0.1 and val.points[:, 0].max() <= 10.0
    assert val.points[:, 1].min() >= -1.0 and val.points[:, 1].max() <= 1.0


def test_validation_grid_offset_log():
    train = ParameterGrid.training(10, 10, mu0_spacing="log")
    val = ParameterGrid.validation(10, 10, mu0_spacing="log")
    log_train = np.log10(train.mu0_values)
    log_val = np.log10(val.mu0_values)
    h0 = log_train[1] - log_train[0]
    assert abs(log_val[0] - (log_train[0] + 0.5 * h0)) <= 1e-12
    assert abs(log_val[-1] - (log_train[-1] - 0.5 * h0)) <= 1e-12
    train_set = {tuple(np.round(p, 12)) for p in train.points}
    assert not train_set & {tuple(np.round(p, 12)) for p in val.points}


def test_single_point_axes():
    train = ParameterGrid.training(1, 1)
    assert np.allclose(train.points, [[0.1, -1.0]])
    val = ParameterGrid.validation(1, 1)
    assert np.allclose(val.points, [[5.05, 0.0]])
    val_log = ParameterGrid.validation(1, 1, mu0_spacing="log")
    assert np.allclose(val_log.points, [[1.0, 0.0]])


@pytest.fixture(scope="module")
def sys8():
    return assemble_affine_system(build_thermal_block_mesh(8))


def test_generate_snapshots_counts(sys8):
    snaps = generate_snapshots(sys8, ParameterGrid.training(3, 3))
    assert snaps.count == 9
    assert snaps.fields.shape == (9, sys8.n_free)
    assert snaps.provenance["grid"] == "3x3"


def test_snapshot_zero_flux_row(sys8):
    snaps = generate_snapshots(sys8, ParameterGrid.training(2, 3))
    zero_rows = np.isclose(snaps.parameters[:, 1], 0.0)
    assert zero_rows.sum() == 2
    assert np.all(snaps.fields[zero_rows] == 0.0)
    assert np.all(snaps.outputs[zero_rows] == 0.0)


def test_snapshots_satisfy_energy_identity(sys8):
    snaps = generate_snapshots(sys8, ParameterGrid.training(3, 3))
    for mu, row, s in zip(snaps.parameters, snaps.fields, snaps.outputs):
        a_uu = energy_norm(sys8, row, mu) ** 2
        f_u = mu[1] * s
        assert abs(a_uu - f_u) <= 1e-10 * max(1.0, abs(f_u))


def test_distinct_parameters_enforced(sys8):
    params = np.array([[1.0, 0.5], [1.0, 0.5]])
    fields = np.zeros((2, sys8.n_free))
    with pytest.raises(InvalidArgument):
        SnapshotSet(
            parameters=params,
            fields=fields,
            outputs=np.zeros(2),
            dof_map=sys8.dof_map,
        )
