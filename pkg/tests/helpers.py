"""Small builders shared by the test modules."""

import numpy as np

from torusperc.complexes import FilteredComplex


def build_complex(cells, ambient_dim=2, param="t"):
    """cells: list of (dim, value, boundary_ids) in id order."""
    dims = [c[0] for c in cells]
    vals = [c[1] for c in cells]
    bnd = [c[2] for c in cells]
    return FilteredComplex(ambient_dim, dims, vals, bnd, param=param)


def random_clique_complex(rng, nverts=12, p_edge=0.4, ambient_dim=2):
    """Lower-star clique complex (up to triangles) of a random graph.

    Vertex values are iid uniform; higher cells take the max of their
    vertices, so the filtration is monotone by construction. Used for
    determinism and Euler-Poincare checks on unstructured inputs.
    """
    vv = rng.random(nverts)
    adj = np.zeros((nverts, nverts), dtype=bool)
    for i in range(nverts):
        for j in range(i + 1, nverts):
            if rng.random() < p_edge:
                adj[i, j] = adj[j, i] = True
    cells = [(0, float(vv[i]), []) for i in range(nverts)]
    eid = {}
    for i in range(nverts):
        for j in range(i + 1, nverts):
            if adj[i, j]:
                eid[(i, j)] = len(cells)
                cells.append((1, float(max(vv[i], vv[j])), [i, j]))
    for i in range(nverts):
        for j in range(i + 1, nverts):
            if not adj[i, j]:
                continue
            for k in range(j + 1, nverts):
                if adj[i, k] and adj[j, k]:
                    cells.append((2, float(max(vv[i], vv[j], vv[k])),
                                  [eid[(i, j)], eid[(i, k)], eid[(j, k)]]))
    return build_complex(cells, ambient_dim=ambient_dim)
