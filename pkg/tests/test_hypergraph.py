"""Tests for hypergraph structures, the random generator and the file format."""
import sys
from itertools import permutations
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from hypersync.exceptions import HypergraphError, ParameterError
from hypersync.hypergraph import (
    Hypergraph,
    all_to_all,
    generator_probabilities,
    load_hypergraph,
    random_simplicial_complex,
    save_hypergraph,
)


class TestAllToAll:
    """Test the complete hypergraph."""

    def test_three_nodes(self):
        """Test n=3 has 3 edges and 1 triangle."""
        h = all_to_all(3)
        assert (h.num_edges, h.num_triangles) == (3, 1)

    def test_fifty_nodes_degrees(self):
        """Test degrees and hyperdegrees of all_to_all(50)."""
        h = all_to_all(50)
        assert np.all(h.degrees == 49)
        assert np.all(h.hyperdegrees == 1176)

    def test_two_nodes(self):
        """Test n=2 has one edge and no triangle."""
        h = all_to_all(2)
        assert (h.num_edges, h.num_triangles) == (1, 0)

    def test_too_small(self):
        """Test n < 2 is rejected."""
        with pytest.raises(HypergraphError):
            all_to_all(1)

    def test_four_nodes_counts(self):
        """Test degree and hyperdegree queries on all_to_all(4)."""
        h = all_to_all(4)
        for i in range(4):
            assert h.degree(i) == 3
            assert h.hyperdegree(i) == 3


class TestQueries:
    """Test membership and degree queries."""

    def test_triangle_permutations(self):
        """Test every permutation of a stored triple is reported identically."""
        h = Hypergraph.from_simplices(5, [(0, 1)], [(4, 2, 0)])
        for perm in permutations((0, 2, 4)):
            assert h.has_triangle(*perm)
        assert not h.has_triangle(0, 1, 2)
        assert h.has_edge(1, 0)

    def test_empty_structure(self):
        """Test degrees of an empty structure."""
        h = Hypergraph.from_simplices(3)
        assert h.degree(0) == 0
        assert h.hyperdegree(0) == 0
        assert h.isolated_nodes() == [0, 1, 2]

    def test_closed_single_triangle(self):
        """Test closure of a single triangle."""
        h = Hypergraph.from_simplices(3, triangles=[(0, 1, 2)], close=True)
        assert h.degree(0) == 2
        assert h.hyperdegree(0) == 1
        assert h.is_closed()

    def test_index_out_of_range(self):
        """Test queries outside [0, n) raise IndexError."""
        h = all_to_all(3)
        with pytest.raises(IndexError):
            h.degree(3)

    def test_degenerate_simplex(self):
        """Test degenerate and out-of-range simplices are rejected."""
        with pytest.raises(HypergraphError):
            Hypergraph.from_simplices(3, triangles=[(0, 0, 1)])
        with pytest.raises(HypergraphError):
            Hypergraph.from_simplices(3, edges=[(0, 3)])

    def test_duplicates_merged(self):
        """Test duplicate simplices in any order are merged."""
        h = Hypergraph.from_simplices(4, edges=[(0, 1), (1, 0)], triangles=[(0, 1, 2), (2, 1, 0)])
        assert (h.num_edges, h.num_triangles) == (1, 1)

    def test_immutable_arrays(self):
        """Test stored arrays are read-only."""
        h = all_to_all(4)
        with pytest.raises(ValueError):
            h.edges[0, 0] = 3

    def test_induced_relabels(self):
        """Test the induced sub-hypergraph keeps simplices inside the node list."""
        h = all_to_all(5)
        sub = h.induced([4, 1, 3])
        assert sub.n == 3
        assert (sub.num_edges, sub.num_triangles) == (3, 1)
        partial = Hypergraph.from_simplices(4, [(0, 1), (2, 3)], [(0, 1, 2)]).induced([0, 1, 3])
        assert partial.num_edges == 1
        assert partial.num_triangles == 0

    def test_pair_triangle_counts(self):
        """Test the dense pair-triangle count matrix of all_to_all(4)."""
        counts = all_to_all(4).pair_triangle_counts
        expected = 2.0 * (np.ones((4, 4)) - np.eye(4))
        np.testing.assert_array_equal(counts, expected)


class TestGenerator:
    """Test the random simplicial complex generator."""

    def test_degenerate_probabilities(self):
        """Test k2=0, k1=n-1 gives the complete graph without triangles."""
        n = 8
        for correction in (True, False):
            h = random_simplicial_complex(n, n - 1, 0.0, seed=3, overlap_correction=correction)
            assert h.num_edges == n * (n - 1) // 2
            assert h.num_triangles == 0

    def test_mean_degrees(self):
        """Test empirical mean degree and hyperdegree against the targets."""
        degrees, hyperdegrees = [], []
        for seed in range(200):
            h = random_simplicial_complex(50, 40.0, 20.0, seed)
            degrees.append(h.degrees.mean())
            hyperdegrees.append(h.hyperdegrees.mean())
        assert abs(np.mean(degrees) - 40.0) / 40.0 < 0.05
        assert abs(np.mean(hyperdegrees) - 20.0) / 20.0 < 0.05

    def test_determinism(self):
        """Test identical seeds give identical structures."""
        a = random_simplicial_complex(30, 10.0, 4.0, seed=42)
        b = random_simplicial_complex(30, 10.0, 4.0, seed=42)
        np.testing.assert_array_equal(a.edges, b.edges)
        np.testing.assert_array_equal(a.triangles, b.triangles)

    def test_closure(self):
        """Test every edge of every triangle is in the edge set."""
        h = random_simplicial_complex(25, 12.0, 6.0, seed=1)
        assert h.num_triangles > 0
        assert h.is_closed()

    def test_infeasible(self):
        """Test infeasible targets raise a parameter error."""
        with pytest.raises(ParameterError):
            generator_probabilities(10, 5.0, 100.0)
        with pytest.raises(ParameterError):
            generator_probabilities(10, 20.0, 1.0)

    def test_literal_probabilities(self):
        """Test the uncorrected edge probability formula."""
        p1, p2 = generator_probabilities(50, 40.0, 20.0, overlap_correction=False)
        assert p2 == pytest.approx(40.0 / (49 * 48))
        assert p1 == pytest.approx(0.0)


class TestFileFormat:
    """Test the plain-text hypergraph format."""

    def test_save_and_load(self, tmp_path):
        """Test a saved structure loads back unchanged."""
        h = random_simplicial_complex(12, 6.0, 2.0, seed=5)
        path = save_hypergraph(h, tmp_path / "h.txt")
        loaded = load_hypergraph(path)
        assert loaded.n == h.n
        np.testing.assert_array_equal(loaded.edges, h.edges)
        np.testing.assert_array_equal(loaded.triangles, h.triangles)

    def test_comments_and_blank_lines(self, tmp_path):
        """Test comments and blank lines are ignored."""
        path = tmp_path / "h.txt"
        path.write_text("# structure\nn 4\n\ne 0 1  # edge\nt 1 2 3\n")
        h = load_hypergraph(path)
        assert (h.n, h.num_edges, h.num_triangles) == (4, 1, 1)

    @pytest.mark.parametrize("text", [
        "e 0 1\n",
        "n 3\ne 0 1\ne 1 0\n",
        "n 3\nt 0 0 1\n",
        "n 3\ne 0 5\n",
        "n 3\nx 0 1\n",
        "n 3\ne 0 a\n",
    ])
    def test_rejects_bad_files(self, tmp_path, text):
        """Test missing header, duplicates, degenerate and malformed lines."""
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(HypergraphError):
            load_hypergraph(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises a hypergraph error."""
        with pytest.raises(HypergraphError):
            load_hypergraph(tmp_path / "absent.txt")
