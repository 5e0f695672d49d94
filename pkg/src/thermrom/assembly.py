"""P1 finite-element assembly of the parametric diffusion problem.

The bilinear form splits into two stiffness blocks, one per material
subdomain, weighted by theta_a(mu) = [mu0, 1].  The load is the
boundary mass vector on the base edge weighted by theta_f(mu) = [mu1].
The output functional reuses the same boundary mass vector.  The inner
product on the trial space is the full gradient form, i.e. the sum of
both stiffness blocks.

Dirichlet conditions on the top edge are enforced by eliminating the
constrained rows and columns: all solver-facing operators live on the
free-node block, while the full-size operators stay available for
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError
from .mesh import Mesh

DEGENERATE_AREA = 1e-14


@dataclass
class DofMap:
    """Mapping between full node vectors and the free-node block."""

    n_nodes: int
    free_nodes: np.ndarray

    def extend(self, free_values: np.ndarray) -> np.ndarray:
        """Embed free-node values into a full vector, zero on Dirichlet."""
        full = np.zeros(self.n_nodes, dtype=np.float64)
        full[self.free_nodes] = free_values
        return full

    def restrict(self, full_values: np.ndarray) -> np.ndarray:
        return np.asarray(full_values, dtype=np.float64)[self.free_nodes]


@dataclass
class AffineSystem:
    """Affine-parametric operators of the discretized problem.

    ``a_ops``, ``f_vecs``, ``l_vec`` and ``gram_x`` live on the
    free-node block; the ``*_full`` fields keep the unconstrained
    versions for tests and post-processing.
    """

    mesh: Mesh
    dof_map: DofMap
    a_ops: list
    f_vecs: list
    l_vec: np.ndarray
    gram_x: sp.csr_matrix
    a_ops_full: list = field(repr=False, default_factory=list)
    f_vecs_full: list = field(repr=False, default_factory=list)
    l_vec_full: np.ndarray = field(repr=False, default=None)
    gram_full: sp.csr_matrix = field(repr=False, default=None)

    @property
    def n_free(self) -> int:
        return len(self.dof_map.free_nodes)

    @staticmethod
    def theta_a(mu) -> np.ndarray:
        mu0, _ = float(mu[0]), float(mu[1])
        return np.array([mu0, 1.0])

    @staticmethod
    def theta_f(mu) -> np.ndarray:
        _, mu1 = float(mu[0]), float(mu[1])
        return np.array([mu1])

    def operator(self, mu) -> sp.csr_matrix:
        """Parametric stiffness mu0*A0 + A1 on the free block."""
        theta = self.theta_a(mu)
        return (theta[0] * self.a_ops[0] + theta[1] * self.a_ops[1]).tocsr()

    def rhs(self, mu) -> np.ndarray:
        return self.theta_f(mu)[0] * self.f_vecs[0]


def _stiffness(mesh: Mesh, cell_mask: np.ndarray) -> sp.csr_matrix:
    """Assemble the P1 stiffness matrix over the selected cells."""
    tris = mesh.triangles[cell_mask]
    p = mesh.nodes[tris]  # (n_cells, 3, 2)
    x = p[:, :, 0]
    y = p[:, :, 1]
    # Gradient coefficients of the barycentric basis (cyclic formulas).
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    bad = np.nonzero(np.abs(area) <= DEGENERATE_AREA)[0]
    if bad.size:
        cell_index = np.nonzero(cell_mask)[0][bad[0]]
        raise AssemblyError(f"degenerate cell {cell_index} (area {area[bad[0]]:g})")

    scale = 1.0 / (4.0 * area)
    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    local = local * scale[:, None, None]

    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    mat = sp.coo_matrix(
        (local.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)
    )
    return mat.tocsr()


def _base_boundary_mass(mesh: Mesh) -> np.ndarray:
    """P1 mass vector of the base edge: integral of each hat function."""
    vec = np.zeros(mesh.n_nodes, dtype=np.float64)
    d = mesh.nodes[mesh.base_edges[:, 0]] - mesh.nodes[mesh.base_edges[:, 1]]
    lengths = np.hypot(d[:, 0], d[:, 1])
    np.add.at(vec, mesh.base_edges[:, 0], 0.5 * lengths)
    np.add.at(vec, mesh.base_edges[:, 1], 0.5 * lengths)
    return vec


def assemble_affine_system(mesh: Mesh) -> AffineSystem:
    a_full = [
        _stiffness(mesh, mesh.cell_subdomain == 1),
        _stiffness(mesh, mesh.cell_subdomain == 2),
    ]
    f0_full = _base_boundary_mass(mesh)
    gram_full = (a_full[0] + a_full[1]).tocsr()

    free = mesh.free_nodes
    dof_map = DofMap(n_nodes=mesh.n_nodes, free_nodes=free)
    a_ops = [m[np.ix_(free, free)].tocsr() for m in a_full]
    gram_x = gram_full[np.ix_(free, free)].tocsr()
    f0 = f0_full[free].copy()

    for vec in (f0, f0_full):
        vec.setflags(write=False)
    return AffineSystem(
        mesh=mesh,
        dof_map=dof_map,
        a_ops=a_ops,
        f_vecs=[f0],
        l_vec=f0,
        gram_x=gram_x,
        a_ops_full=a_full,
        f_vecs_full=[f0_full],
        l_vec_full=f0_full,
        gram_full=gram_full,
    )
