"""Closed-form contraction factors and optimal step-sizes for first-order
splitting methods.

Two parameter regimes are covered.  In the cocoercive regime the problem is
``A x + B x = 0`` with ``A`` alpha-cocoercive and rho-strongly monotone and
``B`` beta-cocoercive.  In the optimization regime the problem is
``minimize f + g`` with ``grad f`` (1/alpha)-Lipschitz, ``f`` rho-strongly
convex and ``grad g`` (1/beta)-Lipschitz.  The optimization factors are never
worse than the cocoercive ones and strictly better for most schemes.

``beta = math.inf`` encodes the single-operator case ``B = 0``; every formula
evaluates the analytic limit (1/beta -> 0) instead of overflowing.  All
functions are pure and accept a scalar or a numpy array for the step-size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DomainError, ParameterError


class Algorithm(str, Enum):
    """Fixed-point schemes with a known contraction factor."""

    EA = "ea"                    # explicit (gradient) step on both terms
    PPA = "ppa"                  # resolvent of the sum
    FBS_GRAD_F = "fbs_grad_f"    # forward step on f, resolvent of g
    FBS_PROX_F = "fbs_prox_f"    # resolvent of f, forward step on g
    PRS = "prs"                  # composition of the two reflected resolvents
    DRS = "drs"                  # average of identity and the PRS operator
    EA_SINGLE = "ea_single"      # gradient step with B = 0
    PROX_SINGLE = "prox_single"  # resolvent step with B = 0


class Setting(str, Enum):
    COCOERCIVE = "cocoercive"
    OPTIMIZATION = "optimization"


#: Schemes that combine the two terms of the splitting.
TWO_OPERATOR_ALGORITHMS = (
    Algorithm.EA,
    Algorithm.PPA,
    Algorithm.FBS_GRAD_F,
    Algorithm.FBS_PROX_F,
    Algorithm.PRS,
    Algorithm.DRS,
)


@dataclass(frozen=True)
class ProblemParams:
    """The triple (alpha, beta, rho) shared by every rate formula.

    alpha : cocoercivity modulus of A, equivalently 1/alpha is the
        gradient-Lipschitz constant of f.  Positive and finite.
    beta : cocoercivity modulus of B (1/beta for g).  Positive, and
        ``math.inf`` means B = 0.
    rho : strong-monotonicity / strong-convexity modulus, in [0, 1/alpha].
        rho = 0 is admitted only for the averaged-nonexpansiveness constants;
        the contraction formulas then evaluate to 1.
    """

    alpha: float
    beta: float
    rho: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be positive and finite, got {self.alpha}")
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive (inf allowed), got {self.beta}")
        if not 0.0 <= self.rho:
            raise ParameterError(f"rho must be nonnegative, got {self.rho}")
        if self.rho > 1.0 / self.alpha:
            raise ParameterError(
                f"rho={self.rho} exceeds 1/alpha={1.0 / self.alpha}; a rho-strongly "
                "monotone alpha-cocoercive operator satisfies rho <= 1/alpha"
            )

    @property
    def inv_beta(self) -> float:
        return 0.0 if math.isinf(self.beta) else 1.0 / self.beta


@dataclass(frozen=True)
class RateResult:
    """A contraction factor tagged with its scheme and step-size."""

    algorithm: Algorithm
    setting: Setting
    tau: float
    rate: float


@dataclass(frozen=True)
class OptimalChoice:
    """The step-size minimizing the contraction factor, and its value."""

    tau_star: float
    rate_star: float


# ---------------------------------------------------------------------------
# contraction factors as functions of the step-size
#
# Formulas are written in terms of q = 1/beta so that beta = inf is the
# plain limit q = 0.  Square-root arguments are clipped at 0 against rounding.


def _omega_ea(alpha, q, rho, tau):
    inner = 1.0 - (2.0 * tau * rho / alpha) * (2.0 * alpha - tau - tau * alpha * q) / (2.0 - tau * q)
    return np.sqrt(np.maximum(inner, 0.0))


def _omega_fbs_grad_f(alpha, q, rho, tau):
    inner = 1.0 - (tau * rho / alpha) * (2.0 * alpha - tau)
    return np.sqrt(np.maximum(inner, 0.0))


def _resolvent_factor(alpha, q, rho, tau):
    return 1.0 / (1.0 + tau * rho)


def _omega_prs(alpha, q, rho, tau):
    t2r = tau * tau * rho
    inner = (alpha - 2.0 * tau * rho * alpha + t2r) / (alpha + 2.0 * tau * rho * alpha + t2r)
    return np.sqrt(np.maximum(inner, 0.0))


def _second_arm_drs(q, rho, tau):
    # (beta + tau^2 rho) / (beta + tau beta rho + tau^2 rho), scaled by 1/beta
    t2rq = tau * tau * rho * q
    return (1.0 + t2rq) / (1.0 + tau * rho + t2rq)


def _omega_drs(alpha, q, rho, tau):
    return np.minimum((1.0 + _omega_prs(alpha, q, rho, tau)) / 2.0, _second_arm_drs(q, rho, tau))


def _r_ea(alpha, q, rho, tau):
    return np.maximum(np.abs(1.0 - tau * rho), np.abs(1.0 - tau * (1.0 / alpha + q)))


def _r_fbs_grad_f(alpha, q, rho, tau):
    return np.maximum(np.abs(1.0 - tau * rho), np.abs(1.0 - tau / alpha))


def _r_prs(alpha, q, rho, tau):
    s = tau / alpha
    return np.maximum((1.0 - tau * rho) / (1.0 + tau * rho), (s - 1.0) / (s + 1.0))


def _r_drs(alpha, q, rho, tau):
    return np.minimum((1.0 + _r_prs(alpha, q, rho, tau)) / 2.0, _second_arm_drs(q, rho, tau))


_RATE_FORMULAS = {
    (Algorithm.EA, Setting.COCOERCIVE): _omega_ea,
    (Algorithm.PPA, Setting.COCOERCIVE): _resolvent_factor,
    (Algorithm.FBS_GRAD_F, Setting.COCOERCIVE): _omega_fbs_grad_f,
    (Algorithm.FBS_PROX_F, Setting.COCOERCIVE): _resolvent_factor,
    (Algorithm.PRS, Setting.COCOERCIVE): _omega_prs,
    (Algorithm.DRS, Setting.COCOERCIVE): _omega_drs,
    (Algorithm.EA, Setting.OPTIMIZATION): _r_ea,
    (Algorithm.PPA, Setting.OPTIMIZATION): _resolvent_factor,
    (Algorithm.FBS_GRAD_F, Setting.OPTIMIZATION): _r_fbs_grad_f,
    (Algorithm.FBS_PROX_F, Setting.OPTIMIZATION): _resolvent_factor,
    (Algorithm.PRS, Setting.OPTIMIZATION): _r_prs,
    (Algorithm.DRS, Setting.OPTIMIZATION): _r_drs,
}


def admissible_interval(algorithm, params: ProblemParams) -> tuple[float, bool]:
    """Upper end of the admissible step-size interval ]0, hi] or ]0, hi[.

    Returns (hi, inclusive).  The interval is the same in both settings.
    """
    algorithm = Algorithm(algorithm)
    if algorithm == Algorithm.EA:
        return 2.0 * params.alpha / (1.0 + params.alpha * params.inv_beta), False
    if algorithm in (Algorithm.FBS_GRAD_F, Algorithm.EA_SINGLE):
        return 2.0 * params.alpha, False
    if algorithm == Algorithm.FBS_PROX_F:
        if math.isinf(params.beta):
            return math.inf, False
        return 2.0 * params.beta, True
    if algorithm in (Algorithm.PPA, Algorithm.PRS, Algorithm.DRS, Algorithm.PROX_SINGLE):
        return math.inf, False
    raise ParameterError(f"unknown algorithm {algorithm}")


def _check_tau(algorithm, params, tau):
    hi, inclusive = admissible_interval(algorithm, params)
    tau_arr = np.asarray(tau, dtype=float)
    ok = (tau_arr > 0.0) & np.isfinite(tau_arr)
    ok &= (tau_arr <= hi) if inclusive else (tau_arr < hi)
    if not np.all(ok):
        bracket = "]" if inclusive else "["
        raise DomainError(
            f"step-size tau={tau} outside ]0, {hi}{bracket} for {Algorithm(algorithm).value}"
        )


def _two_operator(algorithm):
    algorithm = Algorithm(algorithm)
    if algorithm not in TWO_OPERATOR_ALGORITHMS:
        raise ParameterError(
            f"{algorithm.value} is a single-operator scheme; use single_operator_rate"
        )
    return algorithm


def coco_rate(algorithm, params: ProblemParams, tau: float) -> float:
    """Contraction factor in the cocoercive regime at step-size tau."""
    algorithm = _two_operator(algorithm)
    _check_tau(algorithm, params, tau)
    fn = _RATE_FORMULAS[(algorithm, Setting.COCOERCIVE)]
    return float(fn(params.alpha, params.inv_beta, params.rho, tau))


def opt_rate(algorithm, params: ProblemParams, tau: float) -> float:
    """Contraction factor in the optimization regime at step-size tau."""
    algorithm = _two_operator(algorithm)
    _check_tau(algorithm, params, tau)
    fn = _RATE_FORMULAS[(algorithm, Setting.OPTIMIZATION)]
    return float(fn(params.alpha, params.inv_beta, params.rho, tau))


def rate(algorithm, setting, params: ProblemParams, tau: float) -> float:
    """Dispatch to coco_rate or opt_rate by setting."""
    if Setting(setting) == Setting.COCOERCIVE:
        return coco_rate(algorithm, params, tau)
    return opt_rate(algorithm, params, tau)


def rate_curve(algorithm, setting, params: ProblemParams, taus) -> np.ndarray:
    """Vectorized contraction factor over an array of admissible step-sizes."""
    algorithm = _two_operator(algorithm)
    _check_tau(algorithm, params, taus)
    fn = _RATE_FORMULAS[(algorithm, Setting(setting))]
    return np.asarray(fn(params.alpha, params.inv_beta, params.rho, np.asarray(taus, dtype=float)))


def _require_contractive(params):
    if params.rho <= 0.0:
        raise DomainError(
            "rho = 0: the operator is merely nonexpansive, no strict contraction "
            "and no finite optimal step-size exist"
        )


def coco_optimal(algorithm, params: ProblemParams) -> OptimalChoice:
    """Step-size minimizing the cocoercive contraction factor, and its value."""
    algorithm = _two_operator(algorithm)
    _require_contractive(params)
    a, q, r = params.alpha, params.inv_beta, params.rho
    if algorithm == Algorithm.EA:
        s = math.sqrt(1.0 + a * q)
        tau = 2.0 * a / (s * (s + 1.0))
        return OptimalChoice(tau, math.sqrt(max(1.0 - 4.0 * r * a / (s + 1.0) ** 2, 0.0)))
    if algorithm == Algorithm.FBS_GRAD_F:
        return OptimalChoice(a, math.sqrt(max(1.0 - a * r, 0.0)))
    if algorithm == Algorithm.FBS_PROX_F:
        if math.isinf(params.beta):
            return OptimalChoice(math.inf, 0.0)
        return OptimalChoice(2.0 * params.beta, 1.0 / (1.0 + 2.0 * params.beta * r))
    if algorithm == Algorithm.PRS:
        s = math.sqrt(a * r)
        return OptimalChoice(math.sqrt(a / r), math.sqrt((1.0 - s) / (1.0 + s)))
    if algorithm == Algorithm.DRS:
        u = math.sqrt(max(1.0 - a * r, 0.0))
        if params.beta <= 4.0 * a / (1.0 + u) ** 2:
            s = math.sqrt(a * r)
            return OptimalChoice(math.sqrt(a / r), (1.0 + u) / (1.0 + u + s))
        if math.isinf(params.beta):
            return OptimalChoice(math.inf, 0.0)
        return OptimalChoice(math.sqrt(params.beta / r), 2.0 / (2.0 + math.sqrt(params.beta * r)))
    # PPA: 1/(1+tau*rho) decreases in tau, the infimum 0 is not attained
    raise DomainError("ppa has no finite optimal step-size; its factor decreases in tau")


def opt_optimal(algorithm, params: ProblemParams) -> OptimalChoice:
    """Step-size minimizing the optimization contraction factor, and its value."""
    algorithm = _two_operator(algorithm)
    _require_contractive(params)
    a, q, r = params.alpha, params.inv_beta, params.rho
    if algorithm == Algorithm.EA:
        total = 1.0 / a + q
        return OptimalChoice(2.0 / (r + total), (total - r) / (total + r))
    if algorithm == Algorithm.FBS_GRAD_F:
        return OptimalChoice(2.0 / (r + 1.0 / a), (1.0 / a - r) / (1.0 / a + r))
    if algorithm == Algorithm.FBS_PROX_F:
        if math.isinf(params.beta):
            return OptimalChoice(math.inf, 0.0)
        return OptimalChoice(2.0 * params.beta, 1.0 / (1.0 + 2.0 * params.beta * r))
    if algorithm == Algorithm.PRS:
        s = math.sqrt(a * r)
        return OptimalChoice(math.sqrt(a / r), (1.0 - s) / (1.0 + s))
    if algorithm == Algorithm.DRS:
        if params.beta <= 4.0 * a:
            return OptimalChoice(math.sqrt(a / r), 1.0 / (1.0 + math.sqrt(a * r)))
        if math.isinf(params.beta):
            return OptimalChoice(math.inf, 0.0)
        return OptimalChoice(math.sqrt(params.beta / r), 2.0 / (2.0 + math.sqrt(params.beta * r)))
    raise DomainError("ppa has no finite optimal step-size; its factor decreases in tau")


def optimal(algorithm, setting, params: ProblemParams) -> OptimalChoice:
    """Dispatch to coco_optimal or opt_optimal by setting."""
    if Setting(setting) == Setting.COCOERCIVE:
        return coco_optimal(algorithm, params)
    return opt_optimal(algorithm, params)


def single_operator_rate(kind, setting, alpha: float, rho: float, tau: float) -> float:
    """Contraction factor for a lone gradient or resolvent step (B = 0).

    These are the beta -> inf limits of the two-operator formulas: the
    gradient kind requires tau in ]0, 2*alpha[, the resolvent kind accepts
    any tau > 0 and does not depend on the setting.
    """
    params = ProblemParams(alpha=alpha, beta=math.inf, rho=rho)
    if kind == "gradient":
        _check_tau(Algorithm.EA_SINGLE, params, tau)
        if Setting(setting) == Setting.COCOERCIVE:
            return float(_omega_fbs_grad_f(alpha, 0.0, rho, tau))
        return float(_r_fbs_grad_f(alpha, 0.0, rho, tau))
    if kind == "resolvent":
        _check_tau(Algorithm.PROX_SINGLE, params, tau)
        return float(_resolvent_factor(alpha, 0.0, rho, tau))
    raise ParameterError(f"kind must be 'gradient' or 'resolvent', got {kind!r}")


def averaged_constant(algorithm, alpha: float, beta: float, tau: float) -> float:
    """Averaged-nonexpansiveness parameter of the scheme when rho = 0.

    Without strong monotonicity the fixed-point operators are no longer
    strict contractions but remain mu-averaged, which still yields weak
    convergence of the iterates.
    """
    algorithm = Algorithm(algorithm)
    params = ProblemParams(alpha=alpha, beta=beta, rho=0.0)
    a, q = alpha, params.inv_beta
    if algorithm == Algorithm.EA:
        _check_tau(Algorithm.EA, params, tau)
        return float(tau * (1.0 + a * q) / (2.0 * a))
    if algorithm == Algorithm.FBS_GRAD_F:
        _check_tau(Algorithm.FBS_GRAD_F, params, tau)
        return float(2.0 * tau * (1.0 + a * q) / (4.0 * a + tau * (4.0 * a - tau) * q))
    if algorithm in (Algorithm.PRS, Algorithm.DRS):
        if not tau > 0:
            raise DomainError(f"step-size tau={tau} outside ]0, inf[ for {algorithm.value}")
        mu_r = tau / (a / (1.0 + a * q) + tau)
        return float(mu_r if algorithm == Algorithm.PRS else mu_r / 2.0)
    raise ParameterError(f"no averaged constant for {algorithm.value}")
