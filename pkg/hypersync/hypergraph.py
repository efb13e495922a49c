"""Undirected hypergraphs with pairwise edges and triangles.

A is encoded by the unordered edge list, B by the unordered triangle list.
Triangles are stored sparsely (never as a dense n^3 tensor) together with
per-centre index arrays used by the dynamics kernels.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from pathlib import Path
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from hypersync.exceptions import HypergraphError, OutputError, ParameterError
from hypersync.utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable node count, edge array (m, 2) and triangle array (t, 3).

    Rows are sorted ascending within and lexicographically across rows.
    Instances hash by identity so they can key per-structure caches.
    """

    n: int
    edges: np.ndarray
    triangles: np.ndarray

    @classmethod
    def from_simplices(
        cls,
        n: int,
        edges: Iterable[Sequence[int]] = (),
        triangles: Iterable[Sequence[int]] = (),
        close: bool = False,
    ) -> "Hypergraph":
        """Build a hypergraph, validating indices and degeneracy.

        Duplicates (in any index order) are merged. With `close=True` the
        edges of every triangle are added to the edge set.
        """
        if n < 1:
            raise HypergraphError(f"Node count must be positive, got {n}")
        edge_set = {_canonical(e, 2, n) for e in edges}
        tri_set = {_canonical(t, 3, n) for t in triangles}
        if close:
            for a, b, c in tri_set:
                edge_set.update({(a, b), (a, c), (b, c)})
        return cls(n=n, edges=_as_index_array(edge_set, 2), triangles=_as_index_array(tri_set, 3))

    def __post_init__(self):
        for arr in (self.edges, self.triangles):
            arr.setflags(write=False)

    # Queries

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def num_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def _edge_keys(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(map(tuple, self.edges.tolist()))

    @cached_property
    def _triangle_keys(self) -> FrozenSet[Tuple[int, int, int]]:
        return frozenset(map(tuple, self.triangles.tolist()))

    def has_edge(self, i: int, j: int) -> bool:
        """A_ij in any index order."""
        self._check_index(i)
        self._check_index(j)
        return tuple(sorted((i, j))) in self._edge_keys

    def has_triangle(self, i: int, j: int, k: int) -> bool:
        """B_ijk in any index order."""
        for x in (i, j, k):
            self._check_index(x)
        return tuple(sorted((i, j, k))) in self._triangle_keys

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @cached_property
    def hyperdegrees(self) -> np.ndarray:
        return np.bincount(self.triangles.ravel(), minlength=self.n)

    def degree(self, i: int) -> int:
        self._check_index(i)
        return int(self.degrees[i])

    def hyperdegree(self, i: int) -> int:
        self._check_index(i)
        return int(self.hyperdegrees[i])

    def isolated_nodes(self) -> List[int]:
        """Nodes with neither edges nor triangles; they evolve as free rotators."""
        mask = (self.degrees == 0) & (self.hyperdegrees == 0)
        return [int(i) for i in np.flatnonzero(mask)]

    def is_closed(self) -> bool:
        """Every edge of every triangle is present in the edge set."""
        return all(
            (a, b) in self._edge_keys and (a, c) in self._edge_keys and (b, c) in self._edge_keys
            for a, b, c in self._triangle_keys
        )

    def induced(self, nodes: Sequence[int]) -> "Hypergraph":
        """Sub-hypergraph on `nodes`, relabelled 0..len(nodes)-1 in the given order."""
        index = {int(v): pos for pos, v in enumerate(nodes)}
        if len(index) != len(nodes):
            raise HypergraphError("Induced node list contains duplicates")
        for v in index:
            self._check_index(v)
        edges = [(index[a], index[b]) for a, b in self._edge_keys if a in index and b in index]
        tris = [
            (index[a], index[b], index[c])
            for a, b, c in self._triangle_keys
            if a in index and b in index and c in index
        ]
        return Hypergraph.from_simplices(len(index), edges, tris)

    # Kernel index arrays

    @cached_property
    def triangle_centres(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(centre, a, b) arrays with one row per (triangle, centre) choice."""
        t = self.triangles
        centre = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
        a = np.concatenate([t[:, 1], t[:, 0], t[:, 0]])
        b = np.concatenate([t[:, 2], t[:, 2], t[:, 1]])
        for arr in (centre, a, b):
            arr.setflags(write=False)
        return centre, a, b

    @cached_property
    def pair_triangle_counts(self) -> np.ndarray:
        """Dense n x n matrix of sum_k B_ijk."""
        counts = np.zeros((self.n, self.n))
        t = self.triangles
        for x, y in ((0, 1), (0, 2), (1, 2)):
            np.add.at(counts, (t[:, x], t[:, y]), 1.0)
            np.add.at(counts, (t[:, y], t[:, x]), 1.0)
        return counts

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"Node index {i} out of range [0, {self.n})")

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, edges={self.num_edges}, triangles={self.num_triangles})"


def _canonical(simplex: Sequence[int], size: int, n: int) -> tuple:
    idx = tuple(sorted(int(v) for v in simplex))
    if len(idx) != size:
        raise HypergraphError(f"Expected {size} indices, got {simplex!r}")
    if len(set(idx)) != size:
        raise HypergraphError(f"Degenerate simplex {simplex!r}")
    if idx[0] < 0 or idx[-1] >= n:
        raise HypergraphError(f"Simplex {simplex!r} has indices outside [0, {n})")
    return idx


def _as_index_array(keys, size: int) -> np.ndarray:
    if not keys:
        return np.zeros((0, size), dtype=np.int64)
    return np.array(sorted(keys), dtype=np.int64).reshape(-1, size)


@lru_cache(maxsize=8)
def index_combinations(n: int, size: int) -> np.ndarray:
    if n < size:
        return np.zeros((0, size), dtype=np.int64)
    arr = np.fromiter(
        (v for c in combinations(range(n), size) for v in c), dtype=np.int64
    ).reshape(-1, size)
    arr.setflags(write=False)
    return arr


def all_to_all(n: int) -> Hypergraph:
    """Complete hypergraph: every pair is an edge and every triple a triangle."""
    if n < 2:
        raise HypergraphError(f"all_to_all requires n >= 2, got {n}")
    return Hypergraph(
        n=n,
        edges=index_combinations(n, 2).copy(),
        triangles=index_combinations(n, 3).copy(),
    )


def generator_probabilities(
    n: int, k1: float, k2: float, overlap_correction: bool = True
) -> Tuple[float, float]:
    """Edge and triangle probabilities (p1, p2) targeting mean degree k1 and hyperdegree k2.

    p2 = 2 k2 / ((n-1)(n-2)). With `overlap_correction` the extra-edge
    probability accounts for pairs already covered by a triangle, so that
    the expected degree is exactly k1; otherwise the sparse approximation
    p1 = (k1 - 2 k2) / ((n-1) - 2 k2) is used.
    """
    if n < 3:
        raise HypergraphError(f"random_simplicial_complex requires n >= 3, got {n}")
    p2 = 2.0 * k2 / ((n - 1) * (n - 2))
    if not 0.0 <= p2 <= 1.0:
        raise ParameterError(f"Infeasible hyperdegree k2={k2} for n={n}: p2={p2:.4g}")
    if overlap_correction:
        covered = 1.0 - (1.0 - p2) ** (n - 2)
        target = k1 / (n - 1)
        p1 = 1.0 if covered >= 1.0 else (target - covered) / (1.0 - covered)
    else:
        denom = (n - 1) - 2.0 * k2
        p1 = (k1 - 2.0 * k2) / denom if denom != 0 else float("inf")
    # Tolerate round-off at the boundaries
    if -1e-12 < p1 < 0.0:
        p1 = 0.0
    if 1.0 < p1 < 1.0 + 1e-12:
        p1 = 1.0
    if not 0.0 <= p1 <= 1.0:
        raise ParameterError(f"Infeasible (k1, k2)=({k1}, {k2}) for n={n}: p1={p1:.4g}")
    return p1, p2


def random_simplicial_complex(
    n: int, k1: float, k2: float, seed: int, overlap_correction: bool = True
) -> Hypergraph:
    """Random 2-simplicial complex with target mean degree k1 and mean hyperdegree k2.

    Triangles are drawn independently, their edges are promoted into the
    edge set, then every remaining pair becomes an edge independently.
    Deterministic given `seed`.
    """
    p1, p2 = generator_probabilities(n, k1, k2, overlap_correction)
    rng = np.random.default_rng(seed)
    triples = index_combinations(n, 3)
    pairs = index_combinations(n, 2)

    triangles = triples[rng.random(triples.shape[0]) < p2]

    # Pair (i, j) with i < j maps to a flat index in the combinations order
    covered = np.zeros(pairs.shape[0], dtype=bool)
    if triangles.shape[0]:
        for x, y in ((0, 1), (0, 2), (1, 2)):
            covered[_pair_index(n, triangles[:, x], triangles[:, y])] = True
    extra = rng.random(pairs.shape[0]) < p1
    edges = pairs[covered | extra]

    h = Hypergraph(n=n, edges=edges.copy(), triangles=triangles.copy())
    logger.debug(
        f"Generated {h!r} with p1={p1:.4g}, p2={p2:.4g}, "
        f"{len(h.isolated_nodes())} isolated nodes"
    )
    return h


def _pair_index(n: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Flat index of (i, j), i < j, in lexicographic combinations order."""
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def load_hypergraph(path: Path) -> Hypergraph:
    """Parse the plain-text format: `n <count>`, then `e i j` and `t i j k` lines."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise HypergraphError(f"Cannot read hypergraph file {path}: {e}") from e

    n = None
    edges, tris = set(), set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            values = [int(v) for v in parts[1:]]
        except ValueError:
            raise HypergraphError(f"{path}:{lineno}: non-integer index in {raw!r}")
        tag = parts[0]
        if n is None:
            if tag != "n" or len(values) != 1:
                raise HypergraphError(f"{path}:{lineno}: expected header 'n <count>'")
            n = values[0]
            if n < 1:
                raise HypergraphError(f"{path}:{lineno}: node count must be positive")
            continue
        if tag == "e" and len(values) == 2:
            key, store = _canonical(values, 2, n), edges
        elif tag == "t" and len(values) == 3:
            key, store = _canonical(values, 3, n), tris
        else:
            raise HypergraphError(f"{path}:{lineno}: malformed line {raw!r}")
        if key in store:
            raise HypergraphError(f"{path}:{lineno}: duplicate simplex {key}")
        store.add(key)

    if n is None:
        raise HypergraphError(f"{path}: missing 'n <count>' header")
    h = Hypergraph.from_simplices(n, edges, tris)
    logger.info(f"Loaded {h!r} from {path} ({len(h.isolated_nodes())} isolated nodes)")
    return h


def save_hypergraph(h: Hypergraph, path: Path) -> Path:
    """Write `h` in the plain-text format with 0-based ascending indices."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"n {h.n}\n")
            for i, j in h.edges.tolist():
                f.write(f"e {i} {j}\n")
            for i, j, k in h.triangles.tolist():
                f.write(f"t {i} {j} {k}\n")
    except OSError as e:
        raise OutputError(f"Cannot write hypergraph file {path}: {e}") from e
    return path
