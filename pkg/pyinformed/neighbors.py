from __future__ import annotations

from typing import List

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from .exceptions import EmptyIndexError, InvalidInputError
from .utils import PyinformedOptions, _parse_state

VertexId = int

# slack on tree query radii so that roundoff in the tree never hides a candidate
_RADIUS_SLACK = 1e-9


class NearestNeighborIndex:
    """Nearest and radius queries over vertex states

    Ids are dense from 0 and inserted in increasing order. Points are kept in a growing array;
    a k-d tree covers a prefix of them and the rest are scanned linearly. The tree is rebuilt
    when the number of points has doubled since the last build, or when the scanned tail exceeds
    PyinformedOptions.nn_buffer_limit. Below PyinformedOptions.nn_linear_threshold points no tree
    is built.

    Results are defined by the exact distance np.linalg.norm(p − x): the tree only proposes
    candidates, whose distances are then recomputed. Ties go to the smallest id.

    Parameters
    ----------
    dimension : int
        Dimension of the indexed states.

    capacity : int, default 1024
        Initial size of the point array.
    """

    def __init__(self, dimension: int, capacity: int = 1024):
        self.dimension = dimension
        self._points: NDArray[np.float64] = np.empty((max(capacity, 1), dimension))
        self._size: int = 0
        self._tree: cKDTree = None
        self._tree_size: int = 0

    def __len__(self) -> int:
        return self._size

    @property
    def points(self) -> NDArray[np.float64]:
        return self._points[: self._size]

    def insert(self, x: ArrayLike, vertex_id: VertexId) -> None:
        """Adds a point under the next id

        Raises
        ------
        InvalidInputError
            If vertex_id is already present or is not the next dense id.
        """

        if vertex_id < self._size:
            raise InvalidInputError(f"Vertex id {vertex_id} is already in the index")
        if vertex_id != self._size:
            raise InvalidInputError(f"Vertex ids must be dense: expected {self._size}, got {vertex_id}")

        x = _parse_state(x, self.dimension)
        if self._size == self._points.shape[0]:
            grown = np.empty((2 * self._points.shape[0], self.dimension))
            grown[: self._size] = self._points[: self._size]
            self._points = grown
        self._points[self._size] = x
        self._size += 1

        if self._size >= PyinformedOptions.nn_linear_threshold:
            tail = self._size - self._tree_size
            if self._size >= 2 * self._tree_size or tail > PyinformedOptions.nn_buffer_limit:
                self._tree = cKDTree(self._points[: self._size].copy())
                self._tree_size = self._size

    def _candidates(self, x: NDArray[np.float64], r: float) -> NDArray[np.int64]:
        """Ids that may lie within r of x, in ascending order"""

        tail = np.arange(self._tree_size, self._size)
        if self._tree is None:
            return tail
        radius = r * (1 + _RADIUS_SLACK) + _RADIUS_SLACK
        in_tree = np.asarray(self._tree.query_ball_point(x, radius), dtype=np.int64)
        in_tree.sort()
        return np.concatenate([in_tree, tail])

    def nearest(self, x: ArrayLike) -> VertexId:
        """Id of the closest point, the smallest id among equidistant ones

        Raises
        ------
        EmptyIndexError
            If no point has been inserted.
        """

        if self._size == 0:
            raise EmptyIndexError("Cannot query the nearest point of an empty index")

        x = np.asarray(x, dtype=np.float64)
        if self._tree is None:
            distances = np.linalg.norm(self._points[: self._size] - x, axis=1)
            return int(np.argmin(distances))

        tree_distance, _ = self._tree.query(x)
        tail = self._points[self._tree_size : self._size]
        if tail.shape[0]:
            tree_distance = min(tree_distance, float(np.linalg.norm(tail - x, axis=1).min()))
        candidates = self._candidates(x, tree_distance)
        distances = np.linalg.norm(self._points[candidates] - x, axis=1)
        return int(candidates[np.argmin(distances)])

    def near(self, x: ArrayLike, r: float) -> List[VertexId]:
        """Ids of all points within distance r of x (inclusive), in ascending order"""

        if r < 0:
            raise InvalidInputError(f"Radius must be non-negative, got {r!r}")
        if self._size == 0:
            return []

        x = np.asarray(x, dtype=np.float64)
        candidates = self._candidates(x, r)
        distances = np.linalg.norm(self._points[candidates] - x, axis=1)
        return candidates[distances <= r].tolist()
