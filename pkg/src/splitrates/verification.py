"""Numerical certification of the structural claims behind the rates:
cocoercivity, strong monotonicity, Lipschitz/contraction constants,
averagedness, and the primal-dual product-space construction.

Claims are always checked, never assumed: each check samples Gaussian pairs
at several scales and reports the worst inequality margin together with a
witness for any violation.  For affine operators the exact Lipschitz factor
is additionally computed as the spectral norm of the linear part, which is
authoritative; sampling is advisory.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import rates as rates_mod
from .exceptions import ParameterError
from .operators import DiagonalQuadratic, LinearMap, power_iteration_norm_sq
from .rates import Algorithm, ProblemParams, Setting
from .solvers import drs_operator, ea_operator, fbs_operator, prs_operator

_REL_TOL = 1e-10


@dataclass
class OperatorUnderTest:
    """An operator together with the constants claimed for it."""

    apply: Callable
    claimed_cocoercivity: float = 0.0
    claimed_strong_monotonicity: float = 0.0
    claimed_lipschitz: float = 0.0
    extra: dict = field(default_factory=dict)


@dataclass
class CertificationReport:
    """Outcome of sampling one inequality over many pairs."""

    claim: str
    constant: float
    samples: int
    worst_margin: float
    violated: bool
    witness: Optional[tuple] = None
    seed: int = 0
    exact_factor: Optional[float] = None

    def to_dict(self):
        d = {
            "claim": self.claim,
            "constant": self.constant,
            "samples": self.samples,
            "worst_margin": self.worst_margin,
            "violated": self.violated,
            "seed": self.seed,
        }
        if self.witness is not None:
            d["witness"] = [np.asarray(w).tolist() for w in self.witness]
        if self.exact_factor is not None:
            d["exact_factor"] = self.exact_factor
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


class GaussianPairSampler:
    """Deterministic stream of Gaussian pairs at interleaved scales.

    Scales {1e-2, 1, 1e2} probe local and global behavior; the seed is
    recorded in every report so runs are reproducible.
    """

    def __init__(self, dim, seed=0, scales=(1e-2, 1.0, 1e2)):
        self.dim = int(dim)
        self.seed = int(seed)
        self.scales = tuple(scales)

    def pairs(self, n):
        rng = np.random.default_rng(self.seed)
        x = rng.standard_normal((n, self.dim))
        y = rng.standard_normal((n, self.dim))
        s = np.asarray(self.scales)[np.arange(n) % len(self.scales)]
        return x * s[:, None], y * s[:, None]


def _certify(claim, constant, sampler, n_pairs, margin_fn, scale_fn):
    """Shared sampling loop: margin >= -tol per pair, tol scaled by the pair."""
    if n_pairs < 1:
        raise ParameterError(f"n_pairs must be >= 1, got {n_pairs}")
    xs, ys = sampler.pairs(n_pairs)
    worst = math.inf
    witness = None
    violated = False
    for x, y in zip(xs, ys):
        margin = margin_fn(x, y)
        if margin < worst:
            worst = margin
            witness = (x, y)
        if margin < -_REL_TOL * scale_fn(x, y):
            violated = True
    return CertificationReport(
        claim=claim,
        constant=constant,
        samples=n_pairs,
        worst_margin=worst,
        violated=violated,
        witness=witness if violated else None,
        seed=sampler.seed,
    )


def check_cocoercive(op, eta, sampler, n_pairs) -> CertificationReport:
    """<Mx - My, x - y> >= eta * ||Mx - My||^2 on sampled pairs."""
    apply = op.apply if isinstance(op, OperatorUnderTest) else op

    def margin(x, y):
        dm = apply(x) - apply(y)
        return float((x - y) @ dm - eta * (dm @ dm))

    return _certify("cocoercive", eta, sampler, n_pairs, margin,
                    lambda x, y: float((x - y) @ (x - y)))


def check_strongly_monotone(op, rho, sampler, n_pairs) -> CertificationReport:
    """<Mx - My, x - y> >= rho * ||x - y||^2 on sampled pairs."""
    apply = op.apply if isinstance(op, OperatorUnderTest) else op

    def margin(x, y):
        d = x - y
        return float(d @ (apply(x) - apply(y)) - rho * (d @ d))

    return _certify("strongly_monotone", rho, sampler, n_pairs, margin,
                    lambda x, y: float((x - y) @ (x - y)))


def check_lipschitz(op, omega, sampler, n_pairs, affine_dim=None) -> CertificationReport:
    """||Phi x - Phi y|| <= omega * ||x - y|| on sampled pairs.

    With affine_dim set, the linear part is materialized on the basis and its
    spectral norm (power iteration) becomes the exact factor, overriding the
    sampled verdict.
    """
    apply = op.apply if isinstance(op, OperatorUnderTest) else op

    def margin(x, y):
        return float(omega * np.linalg.norm(x - y) - np.linalg.norm(apply(x) - apply(y)))

    report = _certify("lipschitz", omega, sampler, n_pairs, margin,
                      lambda x, y: float(np.linalg.norm(x - y)))
    if affine_dim is not None:
        exact = affine_lipschitz_factor(apply, affine_dim)
        report.exact_factor = exact
        report.violated = exact > omega + _REL_TOL * max(1.0, omega)
        report.worst_margin = min(report.worst_margin, omega - exact)
    return report


def check_averaged(op, mu, sampler, n_pairs) -> CertificationReport:
    """Averagedness inequality
    ||Phi x - Phi y||^2 <= ||x-y||^2 - ((1-mu)/mu) ||(Id-Phi)x - (Id-Phi)y||^2.
    """
    apply = op.apply if isinstance(op, OperatorUnderTest) else op

    def margin(x, y):
        px, py = apply(x), apply(y)
        d = x - y
        res = (x - px) - (y - py)
        dp = px - py
        return float(d @ d - ((1.0 - mu) / mu) * (res @ res) - dp @ dp)

    return _certify("averaged", mu, sampler, n_pairs, margin,
                    lambda x, y: float((x - y) @ (x - y)))


def affine_lipschitz_factor(apply, dim) -> float:
    """Exact Lipschitz factor of an affine map: spectral norm of its linear part."""
    origin = apply(np.zeros(dim))
    cols = [apply(np.eye(dim)[:, j]) - origin for j in range(dim)]
    m = np.column_stack(cols)
    return math.sqrt(max(power_iteration_norm_sq(
        lambda v: m @ v, lambda w: m.T @ w, dim, tol=1e-13), 0.0))


# ---------------------------------------------------------------------------
# primal-dual product-space construction


def build_example1(f, hstar_gradient, h_grad_lipschitz, h_strong_convexity,
                   D: LinearMap, eta_shift) -> tuple[OperatorUnderTest, OperatorUnderTest]:
    """Split the optimality system of min 0.5||Ax-z||^2 + h(Dx) into a
    strongly monotone part and a cocoercive part on the product space.

    A(x, u) = (grad f(x) - eta*x, grad h*(u) - eta*u) is strongly monotone
    with modulus min(mu_f, 1/L_h) - eta, and, when h is strongly convex,
    cocoercive with min(rho_h, 1/L_f) / (1 + eta*max(1/mu_f, L_h))^2.
    B(x, u) = (eta*x + D^T u, eta*u - D x) is cocoercive with eta / ||B||^2,
    where ||B||^2 = eta^2 + ||D||^2; the looser constant eta / ||B|| is also
    reported under ``extra``.
    """
    mu_f = f.strong_convexity
    l_f = f.grad_lipschitz
    l_h = float(h_grad_lipschitz)
    bound = min(mu_f, 1.0 / l_h)
    if not 0.0 < eta_shift < bound:
        raise ParameterError(
            f"eta_shift must lie in ]0, min(mu_f, 1/L_h)[ = ]0, {bound}[, got {eta_shift}"
        )
    n = D.in_dim

    def apply_a(xu):
        x, u = xu[:n], xu[n:]
        return np.concatenate([f.gradient(x) - eta_shift * x,
                               hstar_gradient(u) - eta_shift * u])

    def apply_b(xu):
        x, u = xu[:n], xu[n:]
        return np.concatenate([eta_shift * x + D.adjoint(u),
                               eta_shift * u - D(x)])

    coco_a = 0.0
    if h_strong_convexity > 0:
        coco_a = (min(h_strong_convexity, 1.0 / l_f)
                  / (1.0 + eta_shift * max(1.0 / mu_f, l_h)) ** 2)
    norm_b_sq = eta_shift ** 2 + D.operator_norm_sq
    op_a = OperatorUnderTest(
        apply=apply_a,
        claimed_strong_monotonicity=bound - eta_shift,
        claimed_cocoercivity=coco_a,
    )
    op_b = OperatorUnderTest(
        apply=apply_b,
        claimed_cocoercivity=eta_shift / norm_b_sq,
        extra={"cocoercivity_norm_scaled": eta_shift / math.sqrt(norm_b_sq),
               "norm_b_sq": norm_b_sq},
    )
    return op_a, op_b


# ---------------------------------------------------------------------------
# contraction fuzzing over diagonal quadratics


_FUZZ_ALGORITHMS = (
    Algorithm.EA,
    Algorithm.FBS_GRAD_F,
    Algorithm.FBS_PROX_F,
    Algorithm.PRS,
    Algorithm.DRS,
)


def _diag_quadratic(eigenvalues):
    return DiagonalQuadratic(eigenvalues)


def _build_operator(algorithm, f, g, tau):
    if algorithm == Algorithm.EA:
        return ea_operator(f, g, tau)
    if algorithm == Algorithm.FBS_GRAD_F:
        return fbs_operator(prox_side=g, grad_side=f, tau=tau)
    if algorithm == Algorithm.FBS_PROX_F:
        return fbs_operator(prox_side=f, grad_side=g, tau=tau)
    if algorithm == Algorithm.PRS:
        return prs_operator(f, g, tau)
    if algorithm == Algorithm.DRS:
        return drs_operator(f, g, tau)
    raise ParameterError(f"no operator constructor for {algorithm}")


def _sample_tau(algorithm, params, rng):
    hi, inclusive = rates_mod.admissible_interval(algorithm, params)
    if math.isinf(hi):
        center = math.sqrt(params.alpha / params.rho)
        return center * 10.0 ** rng.uniform(-0.7, 0.7)
    frac = rng.uniform(0.05, 1.0 if inclusive else 0.95)
    return frac * hi


def contraction_fuzz(n_cases=500, dim=6, seed=2024) -> dict:
    """Exact affine contraction factors versus the claimed rates.

    Random diagonal-Hessian quadratics with spectra inside the admissible
    boxes; for every scheme the exact factor must not exceed the claimed
    cocoercive or optimization rate.  Includes one adversarial alignment
    whose factor attains the explicit-scheme optimization rate exactly.
    """
    rng = np.random.default_rng(seed)
    worst = {}
    records = 0
    tightness_gap = math.inf
    for case in range(n_cases):
        alpha = 10.0 ** rng.uniform(-1.5, 1.5)
        rho = rng.uniform(0.02, 1.0) / alpha
        beta = 10.0 ** rng.uniform(-1.5, 2.0)
        params = ProblemParams(alpha=alpha, beta=beta, rho=rho)

        lam_f = rng.uniform(rho, 1.0 / alpha, size=dim)
        lam_f[rng.integers(dim)] = rho
        lam_f[rng.integers(dim)] = 1.0 / alpha
        lam_g = rng.uniform(0.0, 1.0 / beta, size=dim)
        f = _diag_quadratic(lam_f)
        g = _diag_quadratic(lam_g)

        for algorithm in _FUZZ_ALGORITHMS:
            tau = _sample_tau(algorithm, params, rng)
            op = _build_operator(algorithm, f, g, tau)
            exact = affine_lipschitz_factor(op.apply, dim)
            for setting in (Setting.COCOERCIVE, Setting.OPTIMIZATION):
                claimed = rates_mod.rate(algorithm, setting, params, tau)
                key = (algorithm.value, setting.value)
                margin = claimed - exact
                if key not in worst or margin < worst[key]["margin"]:
                    worst[key] = {"margin": margin, "case": case, "tau": tau,
                                  "claimed": claimed, "exact": exact}
                records += 1

        # adversarial alignment: f pairs its top curvature with g's, so the
        # explicit scheme attains its optimization bound
        f_adv = _diag_quadratic([rho, 1.0 / alpha])
        g_adv = _diag_quadratic([0.0, 1.0 / beta])
        tau = _sample_tau(Algorithm.EA, params, rng)
        exact = affine_lipschitz_factor(ea_operator(f_adv, g_adv, tau).apply, 2)
        claimed = rates_mod.opt_rate(Algorithm.EA, params, tau)
        tightness_gap = min(tightness_gap, abs(claimed - exact))

    violated = any(v["margin"] < -1e-8 for v in worst.values())
    return {
        "cases": n_cases,
        "comparisons": records,
        "worst": worst,
        "violated": violated,
        "tightness_gap": tightness_gap,
        "seed": seed,
    }
