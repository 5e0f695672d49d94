"""Structured triangular mesh of the two-material square domain.

The domain is the square (-1, 1)^2 with an inner disk of radius 0.5
centred at the origin.  The disk carries the parametric conductivity,
the remainder has unit conductivity.  The boundary splits into the top
edge (homogeneous Dirichlet), the two vertical sides (homogeneous
Neumann) and the base edge (parametric flux).

The mesh is a uniform grid of ``refine`` x ``refine`` squares, each cut
into two triangles.  The cutting diagonal alternates in a checkerboard
pattern so that, for even ``refine``, the triangulation is exactly
symmetric under x -> -x.  Cells are assigned to the disk subdomain when
their centroid lies inside the disk, so the material interface is
approximated by a staircase that converges with refinement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .errors import InvalidArgument

DISK_RADIUS = 0.5


@dataclass
class Mesh:
    """Triangulation with subdomain and boundary metadata.

    Attributes
    ----------
    nodes : (n_nodes, 2) float array of vertex coordinates.
    triangles : (n_cells, 3) int array of CCW vertex indices.
    cell_subdomain : (n_cells,) int array, 1 inside the disk else 2.
    base_edges, side_edges, top_edges : (k, 2) int arrays of boundary
        edge endpoints on y = -1, x = +/-1 and y = +1 respectively.
    dirichlet_nodes : sorted indices of nodes on the top edge.
    free_nodes : sorted indices of all remaining nodes.
    """

    refine: int
    nodes: np.ndarray
    triangles: np.ndarray
    cell_subdomain: np.ndarray
    base_edges: np.ndarray
    side_edges: np.ndarray
    top_edges: np.ndarray
    dirichlet_nodes: np.ndarray
    free_nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_cells(self) -> int:
        return self.triangles.shape[0]

    @property
    def h(self) -> float:
        """Grid spacing of the underlying square lattice."""
        return 2.0 / self.refine

    def cell_areas(self) -> np.ndarray:
        """Signed areas of all cells; positive for CCW orientation."""
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def to_json_dict(self) -> dict:
        """Plain-data view used by the model package and the HTTP API."""
        return {
            "refine": self.refine,
            "nodes": self.nodes.tolist(),
            "triangles": self.triangles.tolist(),
            "subdomain": self.cell_subdomain.tolist(),
            "boundary": {
                "base": self.base_edges.tolist(),
                "side": self.side_edges.tolist(),
                "top": self.top_edges.tolist(),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def build_thermal_block_mesh(refine: int) -> Mesh:
    """Build the structured mesh with ``refine`` squares per side.

    Even values of ``refine`` give an x-mirror symmetric triangulation.
    Note the disk subdomain is empty below refine=4: at refine=2 every
    cell centroid lies outside the disk.
    """
    refine = check_positive_int(refine, "refine", minimum=2)

    n_side = refine + 1
    coords_1d = np.linspace(-1.0, 1.0, n_side)
    xg, yg = np.meshgrid(coords_1d, coords_1d, indexing="xy")
    # Row-major node order: j (y) outer, i (x) inner.
    nodes = np.column_stack([xg.ravel(), yg.ravel()])

    def nid(i: int | np.ndarray, j: int | np.ndarray):
        return j * n_side + i

    ii, jj = np.meshgrid(np.arange(refine), np.arange(refine), indexing="xy")
    ii = ii.ravel()
    jj = jj.ravel()
    a = nid(ii, jj)          # lower-left
    b = nid(ii + 1, jj)      # lower-right
    c = nid(ii + 1, jj + 1)  # upper-right
    d = nid(ii, jj + 1)      # upper-left

    even = (ii + jj) % 2 == 0
    tris = np.empty((2 * refine * refine, 3), dtype=np.int64)
    # Diagonal a-c on even squares, b-d on odd ones; all CCW.
    tris[0::2] = np.where(even[:, None], np.column_stack([a, b, c]),
                          np.column_stack([a, b, d]))
    tris[1::2] = np.where(even[:, None], np.column_stack([a, c, d]),
                          np.column_stack([b, c, d]))

    centroids = nodes[tris].mean(axis=1)
    inside = np.hypot(centroids[:, 0], centroids[:, 1]) < DISK_RADIUS
    cell_subdomain = np.where(inside, 1, 2).astype(np.int64)

    i_range = np.arange(refine)
    base_edges = np.column_stack([nid(i_range, 0), nid(i_range + 1, 0)])
    top_edges = np.column_stack([nid(i_range, refine), nid(i_range + 1, refine)])
    j_range = np.arange(refine)
    left = np.column_stack([nid(0, j_range), nid(0, j_range + 1)])
    right = np.column_stack([nid(refine, j_range), nid(refine, j_range + 1)])
    side_edges = np.vstack([left, right])

    dirichlet_nodes = nid(np.arange(n_side), refine).astype(np.int64)
    mask = np.ones(nodes.shape[0], dtype=bool)
    mask[dirichlet_nodes] = False
    free_nodes = np.nonzero(mask)[0].astype(np.int64)

    mesh = Mesh(
        refine=refine,
        nodes=nodes,
        triangles=tris,
        cell_subdomain=cell_subdomain,
        base_edges=base_edges,
        side_edges=side_edges,
        top_edges=top_edges,
        dirichlet_nodes=np.sort(dirichlet_nodes),
        free_nodes=free_nodes,
    )
    for arr in (mesh.nodes, mesh.triangles, mesh.cell_subdomain, mesh.base_edges,
                mesh.side_edges, mesh.top_edges, mesh.dirichlet_nodes,
                mesh.free_nodes):
        arr.setflags(write=False)
    if np.any(mesh.cell_areas() <= 0.0):
        raise InvalidArgument("mesh construction produced a non-CCW cell")
    return mesh


def mesh_from_json_dict(data: dict) -> Mesh:
    """Rebuild a Mesh from the plain-data form produced by to_json_dict."""
    refine = int(data["refine"])
    mesh = build_thermal_block_mesh(refine)
    stored = np.asarray(data["nodes"], dtype=np.float64)
    if stored.shape != mesh.nodes.shape or not np.array_equal(stored, mesh.nodes):
        raise InvalidArgument("stored mesh does not match its refine level")
    return mesh
