"""Unit tests for core.report module."""

import pytest

from core.distributions import Discrete, Exponential, Instance, with_rates
from core.exceptions import DistributionError
from core.graph import MultiGraph
from core.matroid import BinaryMatroid, MatroidInstance, UniformMatroid
from core.report import LemmaCheck, analyze, analyze_matroid, simulate
from core.stochastic import misleading_sample_instance, symmetric_sample_instance

pytestmark = pytest.mark.unit


class TestLemmaCheck:
    """Tests for LemmaCheck."""

    def test_within_bound(self):
        """Test a value under its bound."""
        check = LemmaCheck.at_most(1.5, 2.0)
        assert check.passed
        assert check.residual == -0.5

    def test_over_bound(self):
        """Test a value over its bound."""
        assert not LemmaCheck.at_most(2.1, 2.0).passed

    def test_slack(self):
        """Test that slack admits small excess."""
        assert LemmaCheck.at_most(2.05, 2.0, slack=0.1).passed


class TestAnalyze:
    """Tests for analyze."""

    def test_exact_triangle(self, k3_instance):
        """Test the exact report of K3 with rates 1, 2, 3."""
        report = analyze(k3_instance)
        assert report.b == 2
        assert report.e_opt == pytest.approx(5 / 6)
        assert report.e_sam_exact == pytest.approx(16 / 15)
        assert report.e_sam_mc is None
        assert report.alpha == pytest.approx(1.28)
        assert set(report.lemma_checks) == {"bond_bound", "exchange_inequality"}
        assert report.passed

    def test_to_dict(self, k3_instance):
        """Test the JSON form."""
        data = analyze(k3_instance).to_dict()
        assert data["instance"] == "K3"
        assert data["bond_witness"] == ["e1", "e3"]
        assert data["lemma_checks"]["bond_bound"]["passed"] is True

    def test_monte_carlo_only(self, k3_instance):
        """Test that alpha falls back to the estimate."""
        report = analyze(k3_instance, exact=False, mc_samples=5000, seed=2)
        assert report.e_sam_exact is None
        assert report.e_sam_mc.n_samples == 5000
        assert report.alpha == pytest.approx(report.e_sam_mc.estimate / report.e_opt)
        assert report.passed

    def test_both(self, k3_instance):
        """Test that the exact value wins when both are computed."""
        report = analyze(k3_instance, mc_samples=2000, seed=2)
        assert report.alpha == pytest.approx(1.28)
        assert report.e_sam_mc is not None

    def test_nothing_requested(self, k3_instance):
        """Test that some E[SAM] must be requested."""
        with pytest.raises(ValueError):
            analyze(k3_instance, exact=False)

    def test_single_vertex(self):
        """Test that the one-vertex instance passes with alpha one."""
        report = analyze(with_rates(MultiGraph(n=1), []))
        assert report.b == 0
        assert report.alpha == 1.0
        assert report.passed

    def test_discrete_skips_bond_checks(self):
        """Test that discrete instances are enumerated without bond checks."""
        report = analyze(misleading_sample_instance(10))
        assert report.e_sam_exact == pytest.approx(9.1)
        assert report.alpha == pytest.approx(9.1)
        assert report.lemma_checks == {}


class TestSimulate:
    """Tests for simulate."""

    def test_discrete(self):
        """Test the symmetric example's report."""
        report = simulate(symmetric_sample_instance(10), 20_000, seed=3)
        assert report.e_adaptive == pytest.approx(0.5)
        assert report.e_sam_exact == pytest.approx(3.0)
        assert report.e_sam_mc.within(3.0, 4.0)
        assert report.to_dict()["e_sam_mc"]["seed"] == 3

    def test_exponential(self, k3_instance):
        """Test that exponential instances get the exact companion."""
        report = simulate(k3_instance, 2000, seed=3)
        assert report.e_adaptive is None
        assert report.e_sam_exact == pytest.approx(16 / 15)

    def test_exponential_over_guard(self, k3_instance):
        """Test that the exact companion is skipped over the edge guard."""
        report = simulate(k3_instance, 1000, seed=3, edge_limit=2)
        assert report.e_sam_exact is None

    def test_mixed_needs_one_family_for_exact(self, k3):
        """Test that mixed families still simulate."""
        inst = Instance(
            k3, {"e1": Exponential(1.0), "e2": Discrete.point(1.0), "e3": Exponential(2.0)}
        )
        report = simulate(inst, 1000, seed=1)
        assert report.e_sam_exact is None
        with pytest.raises(DistributionError):
            analyze(inst)


class TestAnalyzeMatroid:
    """Tests for analyze_matroid."""

    def test_uniform(self):
        """Test U1,3 with rates (K, 1, 1)."""
        inst = MatroidInstance(UniformMatroid(1, 3), {"0": 100.0, "1": 1.0, "2": 1.0})
        report = analyze_matroid(inst)
        assert report.rank == 1
        assert report.c_star == 3
        assert report.alpha == pytest.approx(300 / 102)
        assert report.passed

    def test_fano(self):
        """Test that the Fano plane respects its cocircuit bound."""
        inst = MatroidInstance(BinaryMatroid.fano(), {str(i): float(i + 1) for i in range(7)})
        report = analyze_matroid(inst)
        assert report.rank == 3
        assert report.c_star == 4
        assert report.alpha <= 4
        assert report.to_dict()["lemma_checks"]["cocircuit_bound"]["passed"] is True
