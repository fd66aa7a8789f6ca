"""Fixed-point operator constructors and the iteration driver.

Each constructor wires value/gradient/prox calls of two function objects into
a self-map whose fixed points encode the solution of the underlying problem.
The driver repeatedly applies the map, recording per-iteration errors either
against a supplied reference solution (measured through the operator's
``recover`` map, i.e. in the solution variable) or as fixed-point residuals.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import DivergenceError


def _identity(x):
    return x


@dataclass(frozen=True)
class FixedPointOperator:
    """A self-map with an optional certified contraction factor.

    ``recover`` sends a fixed point to a solution of the inclusion; it is the
    identity for explicit and forward-backward schemes and the resolvent of
    the first function for the reflected schemes.
    """

    apply: Callable
    recover: Callable = _identity
    theoretical_rate: Optional[float] = None
    step_size: float = math.nan


def ea_operator(f, g, tau, rate=None) -> FixedPointOperator:
    """Explicit step on both terms: x - tau*(grad f(x) + grad g(x))."""
    return FixedPointOperator(
        apply=lambda x: x - tau * (f.gradient(x) + g.gradient(x)),
        theoretical_rate=rate,
        step_size=tau,
    )


def ppa_operator(fg, tau, rate=None) -> FixedPointOperator:
    """Resolvent of the sum: prox_{tau*(f+g)}, supplied as one function object."""
    return FixedPointOperator(
        apply=lambda x: fg.prox(x, tau), theoretical_rate=rate, step_size=tau
    )


def fbs_operator(prox_side, grad_side, tau, rate=None) -> FixedPointOperator:
    """Forward step on grad_side, then the resolvent of prox_side."""
    return FixedPointOperator(
        apply=lambda x: prox_side.prox(x - tau * grad_side.gradient(x), tau),
        theoretical_rate=rate,
        step_size=tau,
    )


def prs_operator(f, g, tau, rate=None) -> FixedPointOperator:
    """Composition of the reflected resolvents, f first.

    The solution is recovered from a fixed point through prox_{tau f}.
    """

    def apply(x):
        half = f.prox(x, tau)
        return 2.0 * g.prox(2.0 * half - x, tau) - 2.0 * half + x

    return FixedPointOperator(
        apply=apply, recover=lambda x: f.prox(x, tau), theoretical_rate=rate, step_size=tau
    )


def drs_operator(f, g, tau, rate=None) -> FixedPointOperator:
    """Average of the identity and the reflected composition, f first."""

    def apply(x):
        half = f.prox(x, tau)
        return g.prox(2.0 * half - x, tau) - half + x

    return FixedPointOperator(
        apply=apply, recover=lambda x: f.prox(x, tau), theoretical_rate=rate, step_size=tau
    )


@dataclass
class IterationTrace:
    """Per-iteration record of a fixed-point run.

    ``errors`` has one entry per visited iterate (iterations_run + 1 values):
    distances to the reference when one was given, fixed-point residuals
    otherwise.
    """

    errors: np.ndarray
    step_size: float
    iterations_run: int
    converged: bool
    final_point: np.ndarray
    theoretical_rate: Optional[float] = None
    algorithm: str = ""


def banach_picard(op: FixedPointOperator, x0, max_iter, stop_tol=1e-12,
                  reference=None, algorithm="") -> IterationTrace:
    """Iterate x_{k+1} = op.apply(x_k), recording errors.

    Stops once the successive change satisfies
    ||x_{k+1} - x_k|| <= stop_tol * (1 + ||x_k||) or after max_iter steps;
    stop_tol = 0 disables the early exit.  With a reference, errors are
    ||recover(x_k) - reference||; without one they are the residuals
    ||apply(x_k) - x_k||.  A non-finite iterate raises DivergenceError.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if stop_tol < 0:
        raise ValueError(f"stop_tol must be >= 0, got {stop_tol}")
    x = np.asarray(x0, dtype=float)
    errors = []
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        errors.append(float(np.linalg.norm(op.recover(x) - reference)))
    converged = False
    iterations = 0
    for k in range(1, max_iter + 1):
        x_new = op.apply(x)
        if not np.all(np.isfinite(x_new)):
            raise DivergenceError(f"non-finite iterate at iteration {k}")
        change = float(np.linalg.norm(x_new - x))
        if reference is not None:
            errors.append(float(np.linalg.norm(op.recover(x_new) - reference)))
        else:
            errors.append(change)
        stop = stop_tol > 0 and change <= stop_tol * (1.0 + float(np.linalg.norm(x)))
        x = x_new
        iterations = k
        if stop:
            converged = True
            break
    if reference is None:
        # one extra application so the trace also carries the final residual
        errors.append(float(np.linalg.norm(op.apply(x) - x)))
    return IterationTrace(
        errors=np.asarray(errors),
        step_size=op.step_size,
        iterations_run=iterations,
        converged=converged,
        final_point=x,
        theoretical_rate=op.theoretical_rate,
        algorithm=algorithm,
    )


def empirical_rate(trace: IterationTrace, burn_in=10) -> float:
    """Per-iteration contraction fitted from the error trace.

    Least-squares slope of log(error) versus iteration over the post-burn-in
    points that sit above the rounding floor, exponentiated.  Requires at
    least 5 usable points.
    """
    errors = np.asarray(trace.errors, dtype=float)
    idx = np.arange(errors.size)
    floor = 1e2 * np.finfo(float).eps * errors[0] if errors.size else 0.0
    mask = (idx >= burn_in) & (errors > floor)
    if mask.sum() < 5:
        raise ValueError("need at least 5 post-burn-in points above the rounding floor")
    slope = np.polyfit(idx[mask], np.log(errors[mask]), 1)[0]
    return float(np.exp(slope))


def write_trace_csv(trace: IterationTrace, path, theoretical_rate=None):
    """Export iter, error, theoretical_bound columns.

    The bound column is rate^k * error_0 using the supplied rate, falling
    back to the trace's own; it is left empty when neither is set.
    """
    rate = theoretical_rate if theoretical_rate is not None else trace.theoretical_rate
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "error", "theoretical_bound"])
        e0 = trace.errors[0] if len(trace.errors) else 0.0
        for k, err in enumerate(trace.errors):
            bound = f"{rate ** k * e0:.16g}" if rate is not None else ""
            writer.writerow([k, f"{err:.16g}", bound])
