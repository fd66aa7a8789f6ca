import math

import numpy as np
import pytest

from splitrates import DomainError, best_by_enumeration, classify, eta, region_map
from splitrates.rates import Algorithm
from splitrates.regions import default_grid, optimal_rates


class TestEta:
    def test_closure_at_four(self):
        assert eta(4.0) == 1.0

    def test_hand_value_five(self):
        s = math.sqrt(0.2)
        assert eta(5.0) == pytest.approx((1 - s) / (1 + s), abs=1e-14)
        assert eta(5.0) == pytest.approx(0.381966, abs=1e-6)

    def test_hand_value_twentyfive(self):
        assert eta(25.0) == pytest.approx(0.043561, abs=1e-6)

    def test_below_four_rejected(self):
        with pytest.raises(DomainError):
            eta(3.9)

    def test_strictly_decreasing(self):
        betas = np.linspace(4.0, 400.0, 100)
        values = [eta(b) for b in betas]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(0.0 < v <= 1.0 for v in values)


class TestClassify:
    def test_small_beta_is_reflected_scheme(self):
        assert classify(0.1, 0.0022).winner == Algorithm.PRS

    def test_moderate_beta_small_rho_is_averaged_scheme(self):
        # rho = 0.0022 < 1/(16*25) = 0.0025
        label = classify(25.0, 0.0022)
        assert label.winner == Algorithm.DRS
        assert label.region_id == "omega2"

    def test_large_beta_is_prox_forward_backward(self):
        label = classify(1000.0, 0.0022)
        assert label.winner == Algorithm.FBS_PROX_F
        assert label.region_id == "omega1"

    def test_outside_domain(self):
        for beta, rho in ((0.0, 0.5), (1.0, 0.0), (1.0, 1.0), (-2.0, 0.5)):
            with pytest.raises(DomainError):
                classify(beta, rho)

    def test_overlap_resolves_to_strict_inequality(self):
        # where both memberships hold the averaged scheme strictly wins
        beta = 1000.0
        rho = 0.5 / (16.0 * beta)
        label = classify(beta, rho)
        assert label.winner == Algorithm.DRS
        rates = optimal_rates(beta, rho)
        assert rates["r_s_star"] < rates["r_t2_star"]


class TestEnumeration:
    def test_moderate_beta_cell(self):
        winner, rates = best_by_enumeration(25.0, 0.0022)
        assert winner == Algorithm.DRS
        assert rates["r_t2_star"] == pytest.approx(1.0 / 1.11, abs=1e-12)
        assert rates["r_s_star"] == pytest.approx(2.0 / (2.0 + math.sqrt(0.055)), abs=1e-12)
        s = math.sqrt(0.0022)
        assert rates["r_r_star"] == pytest.approx((1 - s) / (1 + s), abs=1e-12)

    def test_large_beta_cell(self):
        winner, rates = best_by_enumeration(1000.0, 0.0022)
        assert winner == Algorithm.FBS_PROX_F
        assert rates["r_t2_star"] == pytest.approx(1.0 / 5.4, abs=1e-12)
        assert rates["r_s_star"] == pytest.approx(2.0 / (2.0 + math.sqrt(2.2)), abs=1e-12)

    def test_balanced_cell(self):
        winner, rates = best_by_enumeration(1.0, 0.25)
        assert winner == Algorithm.PRS
        assert rates["r_r_star"] == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_gradient_chain(self):
        # the explicit and gradient-activated schemes never win
        rng = np.random.default_rng(23)
        for _ in range(500):
            beta = 10.0 ** rng.uniform(-2, 4)
            rho = rng.uniform(1e-4, 0.999)
            rates = optimal_rates(beta, rho)
            assert rates["r_g_star"] > rates["r_t1_star"] > rates["r_r_star"]


def _sides_t2_vs_r(beta, rho):
    rates = optimal_rates(beta, rho)
    lhs = rates["r_t2_star"] < rates["r_r_star"]
    rhs = beta > 4.0 and eta(beta) < beta * rho < 1.0 / eta(beta)
    return lhs, rhs


def _sides_s_vs_r(beta, rho):
    rates = optimal_rates(beta, rho)
    lhs = rates["r_s_star"] < rates["r_r_star"]
    rhs = beta > 16.0 and rho < 1.0 - 8.0 * (math.sqrt(beta) - 2.0) / beta
    return lhs, rhs


def _sides_s_vs_t2(beta, rho):
    rates = optimal_rates(beta, rho)
    lhs = rates["r_s_star"] < rates["r_t2_star"]
    rhs = rho < 1.0 / (16.0 * beta)
    return lhs, rhs


class TestComparisonLaws:
    def test_biconditionals_on_grid(self):
        betas, rhos = default_grid(40, 40)
        for beta in betas:
            for rho in rhos:
                l1, r1 = _sides_t2_vs_r(beta, rho)
                assert l1 == r1, (beta, rho)
                l2, r2 = _sides_s_vs_r(beta, rho)
                assert l2 == r2, (beta, rho)
                if beta > 4.0:
                    l3, r3 = _sides_s_vs_t2(beta, rho)
                    assert l3 == r3, (beta, rho)

    def test_classifier_agrees_with_enumeration(self):
        betas, rhos = default_grid(40, 40)
        for beta in betas:
            for rho in rhos:
                rates = optimal_rates(beta, rho)
                three = sorted([rates["r_t2_star"], rates["r_s_star"], rates["r_r_star"]])
                if three[1] - three[0] <= 1e-12:
                    continue  # boundary cell
                winner, _ = best_by_enumeration(beta, rho)
                assert classify(beta, rho).winner == winner, (beta, rho)


class TestRegionMap:
    def test_single_cell(self):
        table = region_map([0.1], [0.0022])
        assert table.winners == [[Algorithm.PRS]]

    def test_two_cells(self):
        table = region_map([25.0, 1000.0], [0.0022])
        assert table.winners[0] == [Algorithm.DRS, Algorithm.FBS_PROX_F]

    def test_csv_and_svg_outputs(self, tmp_path):
        betas, rhos = default_grid(8, 6)
        table = region_map(betas, rhos)
        csv_path = tmp_path / "regions.csv"
        svg_path = tmp_path / "regions.svg"
        table.write_csv(csv_path)
        table.write_svg(svg_path)
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "beta,rho,winner,r_T2_star,r_S_star,r_R_star"
        assert len(lines) == 1 + 8 * 6
        svg = svg_path.read_text()
        assert svg.count("<rect") >= 8 * 6
        assert "legend" in svg
