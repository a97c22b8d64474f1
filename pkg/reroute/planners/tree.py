from __future__ import annotations

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from ..cspace import Configuration
from ..errors import ContractViolation

__all__ = (
    "KD_TREE_MAX_DIMENSION",
    "NearestNeighbors",
    "Tree",
)


KD_TREE_MAX_DIMENSION = 3
_MIN_REBUILD = 64


class NearestNeighbors:
    """Nearest-neighbour queries over a growing set of points.

    In low dimensions a kd-tree indexes a prefix of the points and the unindexed tail is
    scanned linearly; the index is rebuilt once the tail outgrows it. In higher dimensions
    every query is a linear scan. Ties go to the lowest index.
    """

    def __init__(self, dimension: int, *, use_kd_tree: bool | None = None) -> None:
        self.dimension: int = dimension
        self.use_kd_tree: bool = dimension <= KD_TREE_MAX_DIMENSION if use_kd_tree is None else use_kd_tree
        self._points: npt.NDArray[np.float64] = np.empty((16, dimension))
        self._count: int = 0
        self._index: cKDTree | None = None
        self._indexed: int = 0

    def __len__(self) -> int:
        return self._count

    @property
    def points(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The stored points, shape ``(n, d)``. A view; do not modify."""
        return self._points[: self._count]

    def add(self, q: Configuration) -> int:
        """Stores a point and returns its index."""
        if self._count == self._points.shape[0]:
            grown = np.empty((2 * self._count, self.dimension))
            grown[: self._count] = self._points[: self._count]
            self._points = grown
        self._points[self._count] = q
        self._count += 1
        if self.use_kd_tree and self._count - self._indexed > max(_MIN_REBUILD, self._indexed):
            self._index = cKDTree(self._points[: self._count].copy())
            self._indexed = self._count
        return self._count - 1

    def nearest(self, q: Configuration) -> int:
        """Returns the index of the stored point closest to ``q``."""
        if self._count == 0:
            raise ContractViolation("No points to search.")
        best_index, best_distance = -1, np.inf
        if self._index is not None:
            distance, index = self._index.query(q)
            best_index, best_distance = int(index), float(distance)
        tail = self._points[self._indexed : self._count]
        if tail.shape[0]:
            distances = np.linalg.norm(tail - q, axis=1)
            k = int(np.argmin(distances))
            if distances[k] < best_distance:
                best_index, best_distance = self._indexed + k, float(distances[k])
        return best_index

    def within(self, q: Configuration, radius: float) -> list[int]:
        """Returns the indices of the stored points within ``radius`` of ``q``, ascending."""
        found: list[int] = []
        if self._index is not None:
            found.extend(int(i) for i in self._index.query_ball_point(q, radius))
        tail = self._points[self._indexed : self._count]
        if tail.shape[0]:
            distances = np.linalg.norm(tail - q, axis=1)
            found.extend(int(i) + self._indexed for i in np.flatnonzero(distances <= radius))
        return sorted(found)


class Tree:
    """A search tree rooted at one configuration.

    Vertices are stored by index; ``cost[v]`` is the length of the parent chain from the root.

    Attributes
    ----------
    parents : list[int]
        The parent of each vertex; -1 for the root.
    costs : list[float]
        The cost from the root to each vertex.
    """

    def __init__(self, root: Configuration, *, use_kd_tree: bool | None = None) -> None:
        root = np.asarray(root, dtype=np.float64)
        self.neighbors: NearestNeighbors = NearestNeighbors(root.shape[0], use_kd_tree=use_kd_tree)
        self.neighbors.add(root)
        self.parents: list[int] = [-1]
        self.costs: list[float] = [0.0]
        self._children: list[list[int]] = [[]]

    def __len__(self) -> int:
        return len(self.parents)

    @property
    def dimension(self) -> int:
        """int: The configuration-space dimension."""
        return self.neighbors.dimension

    def vertex(self, index: int) -> npt.NDArray[np.float64]:
        """Returns the configuration of a vertex."""
        return self.neighbors.points[index]

    def add(self, q: Configuration, parent: int) -> int:
        """Adds a vertex below ``parent`` and returns its index."""
        edge = float(np.linalg.norm(np.asarray(q) - self.vertex(parent)))
        index = self.neighbors.add(q)
        self.parents.append(parent)
        self.costs.append(self.costs[parent] + edge)
        self._children.append([])
        self._children[parent].append(index)
        return index

    def nearest(self, q: Configuration) -> int:
        """Returns the vertex closest to ``q``."""
        return self.neighbors.nearest(q)

    def near(self, q: Configuration, radius: float) -> list[int]:
        """Returns the vertices within ``radius`` of ``q``."""
        return self.neighbors.within(q, radius)

    def rewire(self, index: int, parent: int) -> None:
        """Moves a vertex below a new parent and updates the costs of its subtree.

        Raises
        ------
        ContractViolation
            The vertex is the root, or the new parent lies in its subtree.
        """
        if self.parents[index] == -1:
            raise ContractViolation("The root cannot be rewired.")
        ancestor = parent
        while ancestor != -1:
            if ancestor == index:
                raise ContractViolation("Rewiring would create a cycle.")
            ancestor = self.parents[ancestor]

        self._children[self.parents[index]].remove(index)
        self._children[parent].append(index)
        self.parents[index] = parent
        delta = self.costs[parent] + float(np.linalg.norm(self.vertex(index) - self.vertex(parent))) - self.costs[index]

        stack = [index]
        while stack:
            v = stack.pop()
            self.costs[v] += delta
            stack.extend(self._children[v])

    def branch(self, index: int) -> npt.NDArray[np.float64]:
        """Returns the configurations from the root down to ``index``, shape ``(k, d)``."""
        chain = []
        v = index
        while v != -1:
            chain.append(v)
            v = self.parents[v]
        return self.neighbors.points[chain[::-1]].copy()
