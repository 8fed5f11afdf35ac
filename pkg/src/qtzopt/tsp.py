"""Euclidean TSP instances, tours, nearest-neighbour construction and the swap move."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class TspInstance:
    cities: np.ndarray
    seed: int | None = None
    side: float | None = None

    def __post_init__(self):
        cities = np.asarray(self.cities, dtype=float)
        if cities.ndim != 2 or cities.shape[1] != 2:
            raise DomainError(f"cities must be an (n, 2) array, got shape {cities.shape}")
        if len(cities) < 3:
            raise DomainError(f"need at least 3 cities, got {len(cities)}")
        cities.setflags(write=False)
        object.__setattr__(self, "cities", cities)

    @property
    def n(self) -> int:
        return len(self.cities)

    @cached_property
    def dist(self) -> np.ndarray:
        diff = self.cities[:, None, :] - self.cities[None, :, :]
        d = np.sqrt((diff**2).sum(axis=-1))
        d = 0.5 * (d + d.T)  # exact symmetry
        np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        return d

    @cached_property
    def _rows(self) -> list[list[float]]:
        # Python-level lookups are far cheaper than numpy scalar indexing in the hot loop.
        return self.dist.tolist()

    def tour_cost(self, order) -> float:
        order = np.asarray(order)
        return float(self.dist[order, np.roll(order, -1)].sum())


def generate_instance(n: int, side: float = 300.0, seed: int = 0) -> TspInstance:
    """``n`` cities drawn i.i.d. uniform on ``[0, side]^2``."""
    if n < 3:
        raise DomainError(f"need at least 3 cities, got {n}")
    if not (side > 0):
        raise DomainError(f"side must be positive, got {side!r}")
    rng = np.random.default_rng(seed)
    return TspInstance(rng.uniform(0.0, side, size=(n, 2)), seed=seed, side=side)


def save_instance(inst: TspInstance, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        for x, y in inst.cities:
            w.writerow([repr(float(x)), repr(float(y))])


def load_instance(path) -> TspInstance:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise DomainError(f"{path}: expected header 'x,y'")
    pts = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    return TspInstance(np.array(pts, dtype=float))


@dataclass(frozen=True, eq=False)
class Tour:
    """A closed tour: ``order`` visits every city once and returns to the start."""

    inst: TspInstance = field(repr=False)
    order: tuple
    cost: float

    @classmethod
    def from_order(cls, inst: TspInstance, order) -> "Tour":
        order = tuple(int(i) for i in order)
        if sorted(order) != list(range(inst.n)):
            raise DomainError("tour order must be a permutation of all city indices")
        return cls(inst, order, inst.tour_cost(order))

    def is_permutation(self) -> bool:
        return sorted(self.order) == list(range(self.inst.n))

    def recomputed_cost(self) -> float:
        return self.inst.tour_cost(self.order)


def nearest_neighbor(inst: TspInstance, start: int = 0) -> Tour:
    """Greedy tour from ``start``; ties go to the lowest city index."""
    n = inst.n
    if not 0 <= start < n:
        raise DomainError(f"start city {start} out of range for {n} cities")
    d = inst.dist
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, d[cur])
        cur = int(np.argmin(row))  # argmin returns the first minimum
        visited[cur] = True
        order.append(cur)
    return Tour.from_order(inst, order)


def swap_delta(inst: TspInstance, order, i: int, j: int) -> float:
    """Cost change from exchanging the cities at positions ``i`` and ``j``."""
    n = len(order)
    rows = inst._rows
    a, b = order[i], order[j]
    delta = 0.0
    for e in {(i - 1) % n, i, (j - 1) % n, j}:
        e2 = (e + 1) % n
        u, v = order[e], order[e2]
        delta -= rows[u][v]
        u2 = b if e == i else a if e == j else u
        v2 = b if e2 == i else a if e2 == j else v
        delta += rows[u2][v2]
    return delta


def swap(t: Tour, i: int, j: int) -> Tour:
    """Exchange positions ``i`` and ``j`` with an incremental cost update."""
    if i == j:
        return t
    delta = swap_delta(t.inst, t.order, i, j)
    order = list(t.order)
    order[i], order[j] = order[j], order[i]
    return Tour(t.inst, tuple(order), t.cost + delta)


def random_swap(t: Tour, rng: np.random.Generator) -> Tour:
    """Exchange two distinct, uniformly chosen positions."""
    n = len(t.order)
    if n < 3:
        raise DomainError("random_swap needs at least 3 cities")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    return swap(t, i, j)


def two_opt_move(t: Tour, i: int, j: int) -> Tour:
    """Reverse the segment ``order[i..j]`` (optional neighbourhood, off by default)."""
    if not 0 <= i < j < len(t.order):
        raise DomainError("two_opt_move needs 0 <= i < j < n")
    order = t.order[:i] + t.order[i : j + 1][::-1] + t.order[j + 1 :]
    n = len(order)
    if i == 0 and j == n - 1:
        return Tour(t.inst, order, t.cost)
    rows = t.inst._rows
    a, b = t.order[(i - 1) % n], t.order[i]
    c, d = t.order[j], t.order[(j + 1) % n]
    delta = rows[a][c] + rows[b][d] - rows[a][b] - rows[c][d]
    return Tour(t.inst, order, t.cost + delta)


def random_two_opt(t: Tour, rng: np.random.Generator) -> Tour:
    i, j = sorted(int(k) for k in rng.choice(len(t.order), size=2, replace=False))
    return two_opt_move(t, i, j)
