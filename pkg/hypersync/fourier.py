"""Fourier-term table of the interaction part V of the embedding Hamiltonian.

Every interaction term has the form

    C_a * g_a(I) * (k_a . I) * sin(k_a . theta)

with an integer wave vector k_a summing to zero and g_a the geometric mean
of the actions on its support:

    pairwise  (i, j):      k = e_j - e_i,            C = -2 K1 / N
    triadic   (i; j, k):   k = e_j + e_k - 2 e_i,    C = -2 K2 / N^2

One row is kept per distinct wave vector: the two orderings (i, j), (j, i)
of an edge and the two orderings of the non-centre nodes of a triangle
describe the same term, which is what the factor 2 in C accounts for.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from hypersync.exceptions import ResonanceError
from hypersync.hypergraph import Hypergraph
from hypersync.models import ModelParams
from hypersync.settings import settings

PAIRWISE = 1
TRIADIC = 2


@dataclass(frozen=True, eq=False)
class FourierTerms:
    """Sparse wave-vector matrix K (terms x n) and per-term metadata."""

    n: int
    wave: sparse.csr_matrix
    wave_t: sparse.csr_matrix
    mean_op: sparse.csr_matrix
    order: np.ndarray
    simplices: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    kvals: np.ndarray
    arity: np.ndarray

    @property
    def size(self) -> int:
        return int(self.order.shape[0])

    def coefficients(self, p: ModelParams) -> np.ndarray:
        """C per term: -2 K1/N for pairwise rows, -2 K2/N^2 for triadic rows."""
        return np.where(
            self.order == PAIRWISE,
            -2.0 * p.k1 / self.n,
            -2.0 * p.k2 / self.n ** 2,
        )

    def frequencies(self, omega: np.ndarray) -> np.ndarray:
        """k . omega per term."""
        return self.wave @ omega

    def phases(self, theta: np.ndarray) -> np.ndarray:
        """k . theta per term."""
        return self.wave @ theta

    def action_factors(self, actions: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(g, k.I, df) where df holds d f_a / d I_m on the support entries of `wave`.

        f_a = g_a (k_a . I), so d f_a / d I_m = g_a (k_a . I) / (arity_a I_m) + g_a k_am.
        """
        g = np.exp(self.mean_op @ np.log(actions))
        k_dot_i = self.wave @ actions
        f = g * k_dot_i
        df = f[self.rows] / (self.arity[self.rows] * actions[self.cols]) + g[self.rows] * self.kvals
        return g, k_dot_i, df

    def check_resonance(self, omega: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
        """Return k . omega per term, raising ResonanceError below `tol`."""
        tol = settings.RESONANCE_TOL if tol is None else tol
        freq = self.frequencies(omega)
        if freq.size:
            idx = int(np.argmin(np.abs(freq)))
            if abs(freq[idx]) <= tol:
                simplex = tuple(int(v) for v in self.simplices[idx] if v >= 0)
                kind = "edge" if self.order[idx] == PAIRWISE else "triangle (centre first)"
                raise ResonanceError(
                    f"Resonant {kind} {simplex}: frequency combination {freq[idx]:.3g} "
                    f"below tolerance {tol:g}",
                    simplex=simplex,
                    combination=float(freq[idx]),
                )
        return freq


@lru_cache(maxsize=32)
def build_terms(
    h: Hypergraph, nodes: Optional[Tuple[int, ...]] = None, include_triadic: bool = True
) -> FourierTerms:
    """Term table of V restricted to simplices lying entirely inside `nodes` (all nodes if None)."""
    n = h.n
    mask = np.ones(n, dtype=bool)
    if nodes is not None:
        mask[:] = False
        mask[list(nodes)] = True

    edges = h.edges[mask[h.edges].all(axis=1)] if h.num_edges else h.edges
    if include_triadic and h.num_triangles:
        tris = h.triangles[mask[h.triangles].all(axis=1)]
    else:
        tris = np.zeros((0, 3), dtype=np.int64)

    n_pair = edges.shape[0]
    # Triadic rows: one per (triangle, centre)
    centre = np.concatenate([tris[:, 0], tris[:, 1], tris[:, 2]])
    a = np.concatenate([tris[:, 1], tris[:, 0], tris[:, 0]])
    b = np.concatenate([tris[:, 2], tris[:, 2], tris[:, 1]])
    n_tri = centre.shape[0]

    pair_rows = np.arange(n_pair)
    tri_rows = n_pair + np.arange(n_tri)
    rows = np.concatenate([pair_rows, pair_rows, tri_rows, tri_rows, tri_rows])
    cols = np.concatenate([edges[:, 0], edges[:, 1], centre, a, b]).astype(np.int64)
    kvals = np.concatenate([
        -np.ones(n_pair), np.ones(n_pair), -2.0 * np.ones(n_tri), np.ones(n_tri), np.ones(n_tri),
    ])
    total = n_pair + n_tri
    arity = np.concatenate([np.full(n_pair, 2.0), np.full(n_tri, 3.0)])

    # Entries are already unique per (row, col), so the COO -> CSR conversion keeps their order
    order_idx = np.lexsort((cols, rows))
    rows, cols, kvals = rows[order_idx], cols[order_idx], kvals[order_idx]

    wave = sparse.csr_matrix((kvals, (rows, cols)), shape=(total, n))
    mean_op = sparse.csr_matrix((1.0 / arity[rows], (rows, cols)), shape=(total, n))

    simplices = -np.ones((total, 3), dtype=np.int64)
    simplices[:n_pair, :2] = edges
    simplices[n_pair:, 0] = centre
    simplices[n_pair:, 1] = a
    simplices[n_pair:, 2] = b

    order = np.concatenate([np.full(n_pair, PAIRWISE), np.full(n_tri, TRIADIC)])
    return FourierTerms(
        n=n,
        wave=wave,
        wave_t=wave.T.tocsr(),
        mean_op=mean_op,
        order=order,
        simplices=simplices,
        rows=rows,
        cols=cols,
        kvals=kvals,
        arity=arity,
    )
