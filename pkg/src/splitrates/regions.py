"""Efficiency regions: which scheme has the smallest optimal contraction
factor as a function of (beta, rho), in the normalized setting alpha = 1.

The problem ``minimize f + g`` is invariant under joint rescaling of f and g,
so alpha = 1 loses no generality; callers with alpha != 1 rescale
beta <- beta/alpha, rho <- rho*alpha before classifying.  The parameter
domain is Omega = ]0, inf[ x ]0, 1[.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .rates import Algorithm

#: Candidate winners: every other scheme is dominated everywhere on Omega.
WINNERS = (Algorithm.FBS_PROX_F, Algorithm.DRS, Algorithm.PRS)

#: Enumeration order; ties resolve to the earliest entry, matching the
#: non-strict inequalities that define the fbs region.
_ENUM_ORDER = (
    (Algorithm.FBS_PROX_F, "r_t2_star"),
    (Algorithm.DRS, "r_s_star"),
    (Algorithm.PRS, "r_r_star"),
    (Algorithm.FBS_GRAD_F, "r_t1_star"),
    (Algorithm.EA, "r_g_star"),
)


@dataclass(frozen=True)
class RegionLabel:
    winner: Algorithm
    region_id: str  # "omega1" | "omega2" | "complement"


def _check_point(beta, rho):
    if not (beta > 0 and 0.0 < rho < 1.0):
        raise DomainError(f"(beta, rho)=({beta}, {rho}) outside ]0, inf[ x ]0, 1[")


def eta(beta: float) -> float:
    """Threshold function (1 - sqrt(1 - 4/beta)) / (1 + sqrt(1 - 4/beta)).

    Strictly decreasing on [4, inf[, with eta(4) = 1 admitted as closure.
    """
    if beta < 4.0:
        raise DomainError(f"eta requires beta >= 4, got {beta}")
    s = math.sqrt(1.0 - 4.0 / beta)
    return (1.0 - s) / (1.0 + s)


def optimal_rates(beta: float, rho: float) -> dict[str, float]:
    """The five optimal contraction factors at alpha = 1.

    The gradient-scheme entry uses the generic optimal-rate expression
    (1 + 1/beta - rho) / (1 + 1/beta + rho).
    """
    _check_point(beta, rho)
    q = 0.0 if math.isinf(beta) else 1.0 / beta
    sr = math.sqrt(rho)
    if beta <= 4.0:
        r_s = 1.0 / (1.0 + sr)
    else:
        r_s = 2.0 / (2.0 + math.sqrt(beta * rho))
    return {
        "r_g_star": (1.0 + q - rho) / (1.0 + q + rho),
        "r_t1_star": (1.0 - rho) / (1.0 + rho),
        "r_t2_star": 1.0 / (1.0 + 2.0 * beta * rho),
        "r_r_star": (1.0 - sr) / (1.0 + sr),
        "r_s_star": r_s,
    }


def classify(beta: float, rho: float) -> RegionLabel:
    """Label (beta, rho) with the scheme of smallest optimal factor.

    The drs region is tested first: where both memberships hold its strict
    inequality dominates the fbs region's non-strict one.
    """
    _check_point(beta, rho)
    if beta > 16.0:
        chi = min(1.0 / (16.0 * beta), 1.0 - 8.0 * (math.sqrt(beta) - 2.0) / beta)
        if rho < chi:
            return RegionLabel(Algorithm.DRS, "omega2")
    if beta > 4.0:
        e = eta(beta)
        if max(1.0 / 16.0, e) / beta <= rho <= 1.0 / (beta * e):
            return RegionLabel(Algorithm.FBS_PROX_F, "omega1")
    return RegionLabel(Algorithm.PRS, "complement")


def best_by_enumeration(beta: float, rho: float) -> tuple[Algorithm, dict[str, float]]:
    """Argmin over the five optimal factors; the brute-force oracle for classify."""
    rates = optimal_rates(beta, rho)
    winner = min(_ENUM_ORDER, key=lambda item: rates[item[1]])[0]
    return winner, rates


@dataclass
class RegionMap:
    """Per-cell classification of a (beta, rho) grid."""

    betas: np.ndarray
    rhos: np.ndarray
    winners: list[list[Algorithm]]  # indexed [i_rho][j_beta]
    rates: dict[str, np.ndarray]    # arrays shaped (len(rhos), len(betas))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["beta", "rho", "winner", "r_T2_star", "r_S_star", "r_R_star"])
            for i, rho in enumerate(self.rhos):
                for j, beta in enumerate(self.betas):
                    writer.writerow([
                        f"{beta:.12g}", f"{rho:.12g}", self.winners[i][j].value,
                        f"{self.rates['r_t2_star'][i, j]:.12g}",
                        f"{self.rates['r_s_star'][i, j]:.12g}",
                        f"{self.rates['r_r_star'][i, j]:.12g}",
                    ])

    def write_svg(self, path):
        from .plotting import region_map_svg

        region_map_svg(self, path)


def region_map(beta_grid, rho_grid) -> RegionMap:
    """Classify every cell of the cartesian grid beta_grid x rho_grid."""
    betas = np.asarray(beta_grid, dtype=float)
    rhos = np.asarray(rho_grid, dtype=float)
    keys = ("r_g_star", "r_t1_star", "r_t2_star", "r_r_star", "r_s_star")
    rates = {k: np.empty((rhos.size, betas.size)) for k in keys}
    winners = []
    for i, rho in enumerate(rhos):
        row = []
        for j, beta in enumerate(betas):
            row.append(classify(beta, rho).winner)
            cell = optimal_rates(beta, rho)
            for k in keys:
                rates[k][i, j] = cell[k]
        winners.append(row)
    return RegionMap(betas=betas, rhos=rhos, winners=winners, rates=rates)


def default_grid(n_beta=50, n_rho=50, beta_span=(1e-2, 1e4), rho_span=(1e-4, 0.99)):
    """Log-spaced beta grid and linear rho grid, matching the region plot axes."""
    betas = np.logspace(math.log10(beta_span[0]), math.log10(beta_span[1]), n_beta)
    rhos = np.linspace(rho_span[0], rho_span[1], n_rho)
    return betas, rhos
