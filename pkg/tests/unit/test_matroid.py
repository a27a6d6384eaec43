"""Unit tests for core.matroid module."""

import itertools
from collections.abc import Iterable

import pytest

from core.exceptions import (
    DistributionError,
    InvalidEdgeSetError,
    InvalidInstanceError,
    InvalidMinorError,
    SizeGuardError,
)
from core.families import bond_illustration, complete, parallel
from core.graph import all_bonds, kruskal_mst
from core.matroid import (
    BinaryMatroid,
    GraphicMatroid,
    IMatroidOracle,
    MatroidInstance,
    UniformMatroid,
    alpha_matroid,
    bases,
    check_axioms,
    circuits,
    closure,
    cocircuits,
    contract_element,
    exact_expected_sam_matroid,
    fundamental_circuit,
    greedy_min_basis,
    hyperplanes,
    is_flat,
    is_loop,
    largest_cocircuit,
    opt_basis,
    rank,
)
from core.stochastic import exact_expected_sam

pytestmark = pytest.mark.unit


class PairOnlyOracle(IMatroidOracle):
    """Independent sets: the empty set, singletons and {a, b}; not a matroid."""

    @property
    def ground_set(self):
        return ("a", "b", "c")

    def is_independent(self, subset: Iterable[str]) -> bool:
        subset = frozenset(subset)
        return len(subset) <= 1 or subset == {"a", "b"}


def _loopy() -> BinaryMatroid:
    return BinaryMatroid.from_vectors([[0, 0], [1, 0]])


class TestOracles:
    """Tests for the independence oracles."""

    def test_graphic_independence(self, k3):
        """Test that forests are independent and cycles are not."""
        m = GraphicMatroid(k3)
        assert m.is_independent({"e1", "e2"})
        assert not m.is_independent({"e1", "e2", "e3"})
        assert m.name == "graphic(K3)"

    def test_uniform(self):
        """Test U2,4 independence and naming."""
        m = UniformMatroid(2, 4)
        assert m.ground_set == ("0", "1", "2", "3")
        assert m.is_independent({"0", "3"})
        assert not m.is_independent({"0", "1", "2"})
        assert m.name == "U2,4"

    def test_uniform_bounds(self):
        """Test that k must lie in 0..n."""
        with pytest.raises(InvalidInstanceError):
            UniformMatroid(3, 2)

    def test_binary_dependence(self):
        """Test that e1 + e2 + (e1 xor e2) is dependent over GF(2)."""
        m = BinaryMatroid.from_vectors([[1, 0], [0, 1], [1, 1]])
        assert m.is_independent({"0", "1"})
        assert not m.is_independent({"0", "1", "2"})

    def test_binary_zero_column_is_loop(self):
        """Test that a zero column is a loop."""
        assert is_loop(_loopy(), "0")
        assert not is_loop(_loopy(), "1")

    def test_binary_rejects_non_binary_entries(self):
        """Test that entries must be 0 or 1."""
        with pytest.raises(InvalidInstanceError):
            BinaryMatroid.from_vectors([[2, 0]])

    def test_fano(self):
        """Test the Fano plane's rank and size."""
        m = BinaryMatroid.fano()
        assert m.size == 7
        assert rank(m) == 3
        assert m.name == "fano"


class TestRankAndMinors:
    """Tests for rank, closure and contraction."""

    def test_rank(self, k3):
        """Test ranks of uniform and graphic matroids."""
        assert rank(UniformMatroid(1, 3)) == 1
        assert rank(GraphicMatroid(k3)) == 2
        assert rank(GraphicMatroid(k3), {"e1"}) == 1

    def test_rank_rejects_foreign_elements(self):
        """Test that subsets must lie in the ground set."""
        with pytest.raises(InvalidEdgeSetError):
            rank(UniformMatroid(1, 3), {"7"})

    def test_contract_uniform(self):
        """Test that U2,4 / x behaves like U1,3."""
        minor = contract_element(UniformMatroid(2, 4), "0")
        assert minor.ground_set == ("1", "2", "3")
        for size in range(4):
            for combo in itertools.combinations(minor.ground_set, size):
                assert minor.is_independent(combo) == (size <= 1)

    def test_contract_graphic(self, k3):
        """Test that contracting a triangle edge leaves a parallel pair."""
        minor = contract_element(GraphicMatroid(k3), "e1")
        assert minor.ground_set == ("e2", "e3")
        assert rank(minor) == 1

    def test_contract_drops_new_loops(self):
        """Test that parallel elements vanish after contraction."""
        minor = contract_element(GraphicMatroid(parallel(3)), "e2")
        assert minor.ground_set == ()
        assert rank(minor) == 0

    def test_nested_contraction(self):
        """Test that contracting twice flattens onto the base matroid."""
        minor = contract_element(contract_element(UniformMatroid(2, 4), "0"), "1")
        assert minor.ground_set == ()
        assert minor.contracted == frozenset({"0", "1"})
        assert minor.base == UniformMatroid(2, 4)

    def test_contract_loop(self):
        """Test that contracting a loop raises InvalidMinorError."""
        with pytest.raises(InvalidMinorError):
            contract_element(_loopy(), "0")

    def test_contract_unknown(self):
        """Test that contracting an unknown element raises InvalidMinorError."""
        with pytest.raises(InvalidMinorError):
            contract_element(UniformMatroid(1, 2), "5")

    def test_closure(self, k3):
        """Test closures in graphic matroids."""
        assert closure(GraphicMatroid(k3), {"e1", "e2"}) == frozenset(k3.edge_ids)
        assert closure(GraphicMatroid(parallel(2)), {"e1"}) == frozenset({"e1", "e2"})

    def test_is_flat(self, k3):
        """Test flats of the triangle."""
        m = GraphicMatroid(k3)
        assert is_flat(m, {"e1"})
        assert not is_flat(m, {"e1", "e2"})


class TestEnumeration:
    """Tests for bases, circuits, cocircuits and hyperplanes."""

    def test_bases_of_graphic_matroid(self, k4):
        """Test that bases of K4 are its 16 spanning trees."""
        assert len(bases(GraphicMatroid(k4))) == 16

    def test_circuits_of_uniform(self):
        """Test that the circuits of U2,4 are its 3-subsets."""
        found = circuits(UniformMatroid(2, 4))
        assert len(found) == 4
        assert all(len(c) == 3 for c in found)

    def test_free_matroid_has_no_circuits(self):
        """Test that U3,3 has no circuits and singleton cocircuits."""
        m = UniformMatroid(3, 3)
        assert circuits(m) == []
        assert largest_cocircuit(m) == 1

    @pytest.mark.parametrize("k, n", [(1, 3), (2, 4), (2, 5), (3, 5)])
    def test_uniform_cocircuits(self, k, n):
        """Test that every cocircuit of Uk,n has n-k+1 elements."""
        found = cocircuits(UniformMatroid(k, n))
        assert {len(c) for c in found} == {n - k + 1}
        assert largest_cocircuit(UniformMatroid(k, n)) == n - k + 1

    @pytest.mark.parametrize("graph", [complete(3), complete(4), bond_illustration()])
    def test_graphic_cocircuits_are_bonds(self, graph):
        """Test that graphic cocircuits are exactly the bonds."""
        assert set(cocircuits(GraphicMatroid(graph))) == set(all_bonds(graph))

    def test_rank_zero_has_no_cocircuit(self):
        """Test that c* is 0 for a rank-0 matroid."""
        assert largest_cocircuit(UniformMatroid(0, 2)) == 0

    def test_fano_cocircuits(self):
        """Test that Fano cocircuits are complements of its seven lines."""
        m = BinaryMatroid.fano()
        found = cocircuits(m)
        assert len(found) == 7
        assert largest_cocircuit(m) == 4

    def test_hyperplanes_are_cocircuit_complements(self, k4):
        """Test hyperplane and cocircuit duality on K4."""
        m = GraphicMatroid(k4)
        ground = frozenset(m.ground_set)
        assert set(hyperplanes(m)) == {ground - c for c in cocircuits(m)}

    def test_cocircuit_contraction(self):
        """Test that contraction never grows the largest cocircuit."""
        for m in (BinaryMatroid.fano(), GraphicMatroid(complete(4)), UniformMatroid(2, 5)):
            c_star = largest_cocircuit(m)
            for e in m.ground_set:
                assert largest_cocircuit(contract_element(m, e)) <= c_star

    def test_size_guard(self):
        """Test the element limit of enumeration."""
        with pytest.raises(SizeGuardError):
            cocircuits(UniformMatroid(1, 13))

    def test_fundamental_circuit(self, k3):
        """Test that a chord closes the whole triangle."""
        m = GraphicMatroid(k3)
        assert fundamental_circuit(m, {"e1", "e2"}, "e3") == frozenset(k3.edge_ids)

    def test_fundamental_circuit_rejects_non_basis(self, k3):
        """Test that the first argument must be a basis."""
        with pytest.raises(InvalidEdgeSetError):
            fundamental_circuit(GraphicMatroid(k3), {"e1"}, "e3")


class TestAxioms:
    """Tests for check_axioms."""

    @pytest.mark.parametrize(
        "m", [UniformMatroid(2, 4), GraphicMatroid(complete(4)), BinaryMatroid.fano()]
    )
    def test_matroids_pass(self, m):
        """Test that real matroids have no violations."""
        assert check_axioms(m) == []

    def test_exchange_violation_found(self):
        """Test that a broken oracle is caught."""
        violations = check_axioms(PairOnlyOracle())
        assert any("exchange" in v for v in violations)

    def test_size_guard(self):
        """Test the element limit of the axiom check."""
        with pytest.raises(SizeGuardError):
            check_axioms(UniformMatroid(2, 9))


class TestGreedy:
    """Tests for greedy_min_basis."""

    def test_uniform(self):
        """Test that greedy picks the lightest elements."""
        assert greedy_min_basis(UniformMatroid(1, 3), {"0": 2, "1": 1, "2": 3}) == {"1"}
        weights = {"0": 4.0, "1": 3.0, "2": 2.0, "3": 1.0}
        assert greedy_min_basis(UniformMatroid(2, 4), weights) == {"2", "3"}

    def test_graphic_matches_kruskal(self, k4, rng):
        """Test greedy against Kruskal on K4."""
        m = GraphicMatroid(k4)
        for _ in range(10):
            weights = {eid: float(w) for eid, w in zip(k4.edge_ids, rng.random(6))}
            assert greedy_min_basis(m, weights) == kruskal_mst(k4, weights)

    def test_missing_weight(self):
        """Test that every element needs a weight."""
        with pytest.raises(InvalidInstanceError):
            greedy_min_basis(UniformMatroid(1, 2), {"0": 1.0})


class TestMatroidInstances:
    """Tests for SAM over matroids."""

    def test_graphic_equals_graph_recursion(self, k3_instance):
        """Test that the matroid recursion agrees with the graph recursion."""
        inst = MatroidInstance(GraphicMatroid(k3_instance.graph), k3_instance.rates())
        assert exact_expected_sam_matroid(inst) == pytest.approx(exact_expected_sam(k3_instance))

    def test_rank_one_uniform(self):
        """Test that U1,m is item selection."""
        inst = MatroidInstance(UniformMatroid(1, 3), {"0": 1.0, "1": 2.0, "2": 5.0})
        assert exact_expected_sam_matroid(inst) == pytest.approx(3 / 8)

    def test_free_matroid(self):
        """Test that a free matroid pays every mean and alpha is one."""
        inst = MatroidInstance(UniformMatroid(3, 3), {"0": 1.0, "1": 2.0, "2": 4.0})
        assert exact_expected_sam_matroid(inst) == pytest.approx(1.75)
        assert alpha_matroid(inst) == pytest.approx(1.0)

    def test_peak_alpha(self):
        """Test alpha = 3K/(K+2) for U1,3 with rates (K, 1, 1)."""
        k = 1000.0
        inst = MatroidInstance(UniformMatroid(1, 3), {"0": k, "1": 1.0, "2": 1.0})
        assert alpha_matroid(inst) == pytest.approx(3 * k / (k + 2))
        assert alpha_matroid(inst) <= largest_cocircuit(inst.matroid)

    def test_opt_basis(self):
        """Test that OPT takes the smallest means."""
        inst = MatroidInstance(UniformMatroid(2, 4), {"0": 1.0, "1": 2.0, "2": 4.0, "3": 8.0})
        basis, cost = opt_basis(inst)
        assert basis == {"2", "3"}
        assert cost == pytest.approx(0.375)

    def test_default_name(self):
        """Test that the instance takes the matroid's name."""
        inst = MatroidInstance(UniformMatroid(1, 2), {"0": 1.0, "1": 1.0})
        assert inst.name == "U1,2"

    def test_rejects_loops(self):
        """Test that loops are not allowed in instances."""
        with pytest.raises(InvalidInstanceError, match="loops"):
            MatroidInstance(_loopy(), {"0": 1.0, "1": 1.0})

    def test_rejects_missing_rate(self):
        """Test that every element needs a rate."""
        with pytest.raises(InvalidInstanceError):
            MatroidInstance(UniformMatroid(1, 2), {"0": 1.0})

    def test_rejects_zero_rate(self):
        """Test that rates must be positive."""
        with pytest.raises(DistributionError):
            MatroidInstance(UniformMatroid(1, 2), {"0": 1.0, "1": 0.0})
