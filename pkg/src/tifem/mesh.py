"""Structured quadrilateral meshes for the beam and the tapered Cook panel.

Q1 elements carry their 4 corner nodes counterclockwise; Q2 elements append
the 4 midside nodes (one per edge, same ordering) and the center node.
Local edges: 0 = bottom (nodes 0-1), 1 = right (1-2), 2 = top (2-3),
3 = left (3-0).
"""

from dataclasses import dataclass

import numpy as np

# Midside node of local edge e is local node 4 + e on Q2 elements.
_EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))

COOK_CORNERS = np.array([(0.0, 0.0), (48.0, 44.0), (48.0, 60.0), (0.0, 44.0)])


@dataclass
class QuadMesh:
    nodes: np.ndarray            # (n_nodes, 2)
    elements: np.ndarray         # (n_elems, 4) or (n_elems, 9)
    boundary_edges: dict         # tag -> list of (element, local edge)
    boundary_nodes: dict         # tag -> sorted node index list
    h: float                     # max element diameter
    order: int                   # 1 or 2

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    def edge_nodes(self, element, local_edge):
        """Node indices along a local edge, endpoints first, midside last."""
        c0, c1 = _EDGE_CORNERS[local_edge]
        conn = self.elements[element]
        if self.order == 1:
            return np.array([conn[c0], conn[c1]])
        return np.array([conn[c0], conn[c1], conn[4 + local_edge]])

    def dump(self, stream):
        """Plain-text listing: one node / element / boundary entity per line."""
        stream.write(f"nodes {self.n_nodes}\n")
        for i, (x, y) in enumerate(self.nodes):
            stream.write(f"{i} {x:.17g} {y:.17g}\n")
        stream.write(f"elements {self.n_elements} order {self.order}\n")
        for e, conn in enumerate(self.elements):
            stream.write(f"{e} " + " ".join(str(n) for n in conn) + "\n")
        for tag in sorted(self.boundary_edges):
            pairs = self.boundary_edges[tag]
            stream.write(f"boundary {tag} {len(pairs)}\n")
            for elem, edge in pairs:
                stream.write(f"{elem} {edge}\n")


def _structured_mesh(nx, ny, order, mapping):
    """Grid of nx x ny cells on the unit square, nodes placed by `mapping`."""
    if nx < 1 or ny < 1:
        raise ValueError("need at least one cell per direction")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    mx, my = nx * order, ny * order
    s = np.linspace(0.0, 1.0, mx + 1)
    t = np.linspace(0.0, 1.0, my + 1)
    S, T = np.meshgrid(s, t, indexing="xy")
    nodes = mapping(S.ravel(), T.ravel())

    def idx(i, j):
        return j * (mx + 1) + i

    elements = []
    for ey in range(ny):
        for ex in range(nx):
            i0, j0 = ex * order, ey * order
            if order == 1:
                conn = [idx(i0, j0), idx(i0 + 1, j0), idx(i0 + 1, j0 + 1), idx(i0, j0 + 1)]
            else:
                conn = [
                    idx(i0, j0), idx(i0 + 2, j0), idx(i0 + 2, j0 + 2), idx(i0, j0 + 2),
                    idx(i0 + 1, j0), idx(i0 + 2, j0 + 1), idx(i0 + 1, j0 + 2), idx(i0, j0 + 1),
                    idx(i0 + 1, j0 + 1),
                ]
            elements.append(conn)
    elements = np.array(elements, dtype=int)

    boundary_edges = {
        "bottom": [(ex, 0) for ex in range(nx)],
        "right": [(ey * nx + nx - 1, 1) for ey in range(ny)],
        "top": [((ny - 1) * nx + ex, 2) for ex in range(nx)],
        "left": [(ey * nx, 3) for ey in range(ny)],
    }

    corners = elements[:, :4]
    pts = nodes[corners]                      # (E, 4, 2)
    diffs = pts[:, :, None, :] - pts[:, None, :, :]
    h = float(np.sqrt((diffs**2).sum(-1).max()))

    mesh = QuadMesh(
        nodes=nodes,
        elements=elements,
        boundary_edges=boundary_edges,
        boundary_nodes={},
        h=h,
        order=order,
    )
    for tag, pairs in boundary_edges.items():
        seen = set()
        for elem, edge in pairs:
            seen.update(mesh.edge_nodes(elem, edge).tolist())
        mesh.boundary_nodes[tag] = sorted(seen)
    return mesh


def rectangle_mesh(L, H, nx, ny, order=1):
    """Axis-aligned grid over [0, L] x [-H/2, H/2].

    Boundary tags: left, right, top, bottom.
    """
    if L <= 0 or H <= 0:
        raise ValueError("L and H must be positive")

    def mapping(s, t):
        return np.column_stack([L * s, H * (t - 0.5)])

    return _structured_mesh(nx, ny, order, mapping)


def cook_mesh(n, order=1):
    """n x n mesh of the tapered Cook panel.

    Bilinear image of the unit square onto the quadrilateral with corners
    (0,0), (48,44), (48,60), (0,44).  Tags: left (clamped), right (loaded),
    top, bottom, and "tip" for the monitored corner (48, 60).
    """
    p00, p10, p11, p01 = COOK_CORNERS

    def mapping(s, t):
        w = (
            np.outer((1 - s) * (1 - t), p00)
            + np.outer(s * (1 - t), p10)
            + np.outer(s * t, p11)
            + np.outer((1 - s) * t, p01)
        )
        return w

    mesh = _structured_mesh(n, n, order, mapping)
    tip = int(np.argmin(((mesh.nodes - p11) ** 2).sum(axis=1)))
    mesh.boundary_nodes["tip"] = [tip]
    return mesh
