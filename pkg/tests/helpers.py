"""Small deterministic scenarios shared by several test modules."""

import numpy as np

from risconn.radio import ArrayGeometry, Scenario


def two_cluster_scenario(n_ris=1, gap=16.0, elements=10, **kwargs):
    """Two tight UE triangles ``gap`` meters apart with RISs between them.

    With unit fading every intra-cluster pair clears the D2D threshold and no
    cross-cluster pair does, so the D2D graph is two disjoint triangles.
    """
    left = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.5]])
    right = left + [gap, 0.0]
    ues = np.vstack([left, right])
    ris = np.array([[gap / 2 + 0.5 * k, -6.0 - k] for k in range(n_ris)]).reshape(-1, 2)
    fading = np.ones((6, 6), complex) - np.eye(6)
    geom = ArrayGeometry.from_carrier(elements, 3e9)
    return Scenario(ues, ris, geom, d2d_fading=fading, **kwargs)
