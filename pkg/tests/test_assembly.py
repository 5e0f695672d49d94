import numpy as np
import pytest

from thermrom.assembly import DofMap, assemble_affine_system
from thermrom.errors import AssemblyError
from thermrom.mesh import Mesh, build_thermal_block_mesh


def local_stiffness_oracle(points: np.ndarray) -> np.ndarray:
    """Textbook 3x3 element stiffness via barycentric gradient solve.

    Gradients of the P1 basis come from inverting the affine coordinate
    matrix, a different route than the cyclic b/c formulas used by the
    assembly code.
    """
    mat = np.column_stack([np.ones(3), points])
    grads = np.linalg.inv(mat)[1:, :]  # rows: d/dx, d/dy of each basis
    area = 0.5 * abs(np.linalg.det(mat))
    return area * grads.T @ grads


@pytest.fixture(scope="module")
def sys16():
    return assemble_affine_system(build_thermal_block_mesh(16))


def test_row_sums_zero_before_elimination(sys16):
    full = sys16.a_ops_full[0] + sys16.a_ops_full[1]
    row_sums = np.asarray(full.sum(axis=1)).ravel()
    assert np.max(np.abs(row_sums)) <= 1e-12


def test_f0_total_is_base_length():
    sys = assemble_affine_system(build_thermal_block_mesh(2))
    assert abs(sys.f_vecs_full[0].sum() - 2.0) <= 1e-12


def test_local_stiffness_matches_oracle(sys16):
    mesh = sys16.mesh
    full = (sys16.a_ops_full[0] + sys16.a_ops_full[1]).toarray()
    rng = np.random.default_rng(7)
    cells = rng.choice(mesh.n_cells, size=5, replace=False)
    for cell in cells:
        tri = mesh.triangles[cell]
        local = local_stiffness_oracle(mesh.nodes[tri])
        # The assembled entry sums contributions of all incident cells;
        # compare through a one-cell assembly instead.
        one_cell = Mesh(
            refine=mesh.refine,
            nodes=mesh.nodes,
            triangles=mesh.triangles[[cell]],
            cell_subdomain=mesh.cell_subdomain[[cell]],
            base_edges=mesh.base_edges,
            side_edges=mesh.side_edges,
            top_edges=mesh.top_edges,
            dirichlet_nodes=mesh.dirichlet_nodes,
            free_nodes=mesh.free_nodes,
        )
        single = assemble_affine_system(one_cell)
        assembled = (single.a_ops_full[0] + single.a_ops_full[1]).toarray()
        assert np.allclose(assembled[np.ix_(tri, tri)], local, atol=1e-13)
    # And the summed global matrix reproduces a fully independent
    # assembly over every cell.
    dense = np.zeros((mesh.n_nodes, mesh.n_nodes))
    for tri in mesh.triangles:
        dense[np.ix_(tri, tri)] += local_stiffness_oracle(mesh.nodes[tri])
    assert np.allclose(full, dense, atol=1e-12)


def test_subdomain_split_is_partition(sys16):
    total = sys16.a_ops_full[0] + sys16.a_ops_full[1]
    assert abs(total - sys16.gram_full).max() == 0.0
    # A0 only touches nodes of disk cells.
    mesh = sys16.mesh
    disk_nodes = np.unique(mesh.triangles[mesh.cell_subdomain == 1])
    coo = sys16.a_ops_full[0].tocoo()
    touched = np.union1d(np.unique(coo.row[coo.data != 0]),
                         np.unique(coo.col[coo.data != 0]))
    assert set(touched) <= set(disk_nodes)


def test_symmetry_and_positive_definite(sys16):
    for mat in (*sys16.a_ops, sys16.gram_x):
        gap = abs(mat - mat.T)
        assert gap.max() <= 1e-14 if gap.nnz else True
    # gram_x is SPD on the free block: Cholesky-style check via eigsh
    # bound replaced by a cheap random quadratic form plus a dense
    # eigenvalue check at a coarse level.
    coarse = assemble_affine_system(build_thermal_block_mesh(4))
    eigvals = np.linalg.eigvalsh(coarse.gram_x.toarray())
    assert eigvals.min() > 0.0
    rng = np.random.default_rng(3)
    for _ in range(5):
        v = rng.standard_normal(sys16.n_free)
        assert v @ (sys16.gram_x @ v) > 0.0


def test_theta_evaluations():
    sys = assemble_affine_system(build_thermal_block_mesh(2))
    assert np.array_equal(sys.theta_a((2.5, -0.5)), [2.5, 1.0])
    assert np.array_equal(sys.theta_f((2.5, -0.5)), [-0.5])
    op = sys.operator((2.5, -0.5))
    manual = 2.5 * sys.a_ops[0] + sys.a_ops[1]
    assert abs(op - manual).max() == 0.0
    assert np.allclose(sys.rhs((2.5, -0.5)), -0.5 * sys.f_vecs[0])


def test_free_block_shapes(sys16):
    n_free = len(sys16.mesh.free_nodes)
    assert sys16.gram_x.shape == (n_free, n_free)
    assert sys16.a_ops[0].shape == (n_free, n_free)
    assert sys16.f_vecs[0].shape == (n_free,)
    assert sys16.l_vec is sys16.f_vecs[0]


def test_dof_map_round_trip(sys16):
    dm = sys16.dof_map
    rng = np.random.default_rng(11)
    free_vals = rng.standard_normal(len(dm.free_nodes))
    full = dm.extend(free_vals)
    assert full.shape == (dm.n_nodes,)
    dirichlet = np.setdiff1d(np.arange(dm.n_nodes), dm.free_nodes)
    assert np.all(full[dirichlet] == 0.0)
    assert np.array_equal(dm.restrict(full), free_vals)


def test_degenerate_cell_raises():
    mesh = build_thermal_block_mesh(2)
    tris = mesh.triangles.copy()
    tris[3] = [0, 1, 1]  # zero-area cell
    broken = Mesh(
        refine=mesh.refine,
        nodes=mesh.nodes,
        triangles=tris,
        cell_subdomain=mesh.cell_subdomain,
        base_edges=mesh.base_edges,
        side_edges=mesh.side_edges,
        top_edges=mesh.top_edges,
        dirichlet_nodes=mesh.dirichlet_nodes,
        free_nodes=mesh.free_nodes,
    )
    with pytest.raises(AssemblyError, match="3"):
        assemble_affine_system(broken)


def test_dof_map_standalone():
    dm = DofMap(n_nodes=5, free_nodes=np.array([0, 2, 4]))
    full = dm.extend(np.array([1.0, 2.0, 3.0]))
    assert np.array_equal(full, [1.0, 0.0, 2.0, 0.0, 3.0])
