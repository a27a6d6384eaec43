"""Unit tests for core.tight module."""

import io

import pytest

from core.exceptions import DisconnectedGraphError, InvalidInstanceError
from core.families import complete, parallel
from core.graph import MultiGraph, contract_sequence, is_bond
from core.tight import (
    CSV_HEADER,
    SweepRow,
    bfs_contraction_order,
    sweep,
    tight_rate_vector,
    write_sweep_csv,
)

pytestmark = pytest.mark.unit


class TestContractionOrder:
    """Tests for bfs_contraction_order."""

    def test_triangle(self, k3):
        """Test that the only off-bond edge of K3 comes first."""
        assert bfs_contraction_order(k3, {"e1", "e3"}) == ("e2",)

    def test_k4_forest_edges(self, k4):
        """Test the forest of the two sides of K4's first maximum bond."""
        assert bfs_contraction_order(k4, {"e1", "e2", "e5", "e6"}) == ("e3", "e4")

    def test_chords_follow_forest(self):
        """Test that non-forest off-bond edges come after the forest."""
        g = MultiGraph.from_pairs(3, [(0, 1), (0, 1), (1, 2)])
        assert bfs_contraction_order(g, {"e3"}) == ("e1", "e2")

    def test_contracting_order_leaves_the_bond(self, k4):
        """Test that contracting the order leaves two vertices and the bond."""
        construction = tight_rate_vector(k4, 10.0)
        minor = contract_sequence(k4, construction.contraction_order)
        assert minor.n == 2
        assert frozenset(minor.edge_ids) == construction.bond_witness


class TestTightRateVector:
    """Tests for the tiered rate construction."""

    def test_parallel_edges(self):
        """Test that parallel edges get one peak rate and unit rates."""
        construction = tight_rate_vector(parallel(3), 100.0)
        assert construction.contraction_order == ()
        assert construction.peak_edge == "e1"
        assert dict(construction.rates) == {"e1": 100.0, "e2": 1.0, "e3": 1.0}

    def test_triangle_rates(self, k3):
        """Test the rates on K3."""
        construction = tight_rate_vector(k3, 10.0)
        assert construction.bond_witness == frozenset({"e1", "e3"})
        assert dict(construction.rates) == {"e1": 10.0, "e2": 100.0, "e3": 1.0}

    def test_tiers_dominate(self, k4):
        """Test that earlier contraction edges get strictly larger rates."""
        construction = tight_rate_vector(k4, 10.0)
        rates = construction.rates
        order = construction.contraction_order
        assert [rates[e] for e in order] == [1000.0, 100.0]
        assert all(rates[e] > rates[construction.peak_edge] for e in order)
        assert is_bond(k4, construction.bond_witness)

    def test_instance(self, k3):
        """Test that the construction builds an exponential instance."""
        inst = tight_rate_vector(k3, 10.0).instance(k3)
        assert inst.is_exponential
        assert inst.rates()["e2"] == 100.0

    @pytest.mark.parametrize("scale", [1.0, 0.5, -2.0])
    def test_scale_must_exceed_one(self, k3, scale):
        """Test the scale guard."""
        with pytest.raises(InvalidInstanceError):
            tight_rate_vector(k3, scale)

    def test_single_vertex(self):
        """Test that one vertex gives an empty construction without a peak edge."""
        construction = tight_rate_vector(MultiGraph(n=1), 10.0)
        assert construction.bond_witness == frozenset()
        assert construction.contraction_order == ()
        assert construction.peak_edge is None
        assert dict(construction.rates) == {}

    def test_disconnected(self):
        """Test that a disconnected graph is rejected."""
        with pytest.raises(DisconnectedGraphError):
            tight_rate_vector(MultiGraph.from_pairs(3, [(0, 1)]), 10.0)


class TestSweep:
    """Tests for tightness sweeps."""

    def test_parallel_closed_form(self):
        """Test alpha = bM/(M+b-1) on parallel edges."""
        rows = sweep(parallel(3), [100.0, 10.0])
        assert [row.scale for row in rows] == [10.0, 100.0]
        for row in rows:
            assert row.b == 3
            assert row.alpha == pytest.approx(3 * row.scale / (row.scale + 2))

    def test_tree_stays_at_one(self, path4):
        """Test that a tree has alpha 1 at every scale."""
        rows = sweep(path4, [10.0, 1000.0])
        assert all(row.b == 1 for row in rows)
        assert all(row.alpha == pytest.approx(1.0) for row in rows)

    def test_triangle_approaches_two(self, k3):
        """Test that K3 approaches its largest bond from below."""
        rows = sweep(k3, [10.0, 100.0])
        assert rows[0].alpha < rows[1].alpha
        assert 1.95 <= rows[1].alpha <= 2.0

    @pytest.mark.slow
    def test_k4_approaches_four(self, k4):
        """Test that K4 gets within 0.1 of b = 4."""
        rows = sweep(k4, [10.0, 100.0, 1e4])
        assert all(row.b == 4 for row in rows)
        assert all(row.alpha <= 4 + 1e-9 for row in rows)
        assert rows[-1].alpha >= 3.9

    def test_four_parallel_edges_approach_four(self):
        """Test that the two-vertex 4-edge graph gets within 0.1 of b = 4."""
        rows = sweep(parallel(4), [10.0, 100.0, 1e4])
        assert all(row.b == 4 for row in rows)
        assert all(row.alpha <= 4 + 1e-9 for row in rows)
        assert rows[-1].alpha >= 3.9

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_item_count_reached(self, m):
        """Test that m parallel edges reach alpha >= m - 0.01 at K = 10^4."""
        (row,) = sweep(parallel(m), [1e4])
        assert m - 0.01 <= row.alpha <= m

    def test_single_vertex_row(self):
        """Test that one vertex sweeps to alpha 1 with b = 0."""
        (row,) = sweep(MultiGraph(n=1, name="point"), [10.0])
        assert row.b == 0
        assert row.alpha == 1.0
        assert row.graph == "point"

    def test_empty_scale_list(self, k3):
        """Test that an empty scale list is rejected."""
        with pytest.raises(ValueError):
            sweep(k3, [])

    def test_graph_name(self):
        """Test that rows carry the graph name."""
        rows = sweep(complete(3), [10.0])
        assert rows[0].graph == "K3"


class TestCsv:
    """Tests for the sweep CSV format."""

    def test_header_and_rows(self):
        """Test the header and the float formatting."""
        stream = io.StringIO()
        write_sweep_csv([SweepRow(scale=10.0, alpha=20 / 11, b=2, graph="parallel-2")], stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1] == "10,1.81818181818,2,parallel-2"

    def test_empty(self):
        """Test that no rows still writes the header."""
        stream = io.StringIO()
        write_sweep_csv([], stream)
        assert stream.getvalue() == "M,alpha,b,graph\n"
