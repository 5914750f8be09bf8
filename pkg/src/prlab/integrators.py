"""Thin integration layer: adaptive explicit stepping and implicit midpoint.

The adaptive path wraps scipy's DOP853 (order 8 with dense output); the
implicit midpoint rule is provided as an independent alternative because
it is genuinely symplectic for the constant forms used here.  Midpoint
steps solve the stage equation by Newton iteration with the analytic
field Jacobian.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

TOL_RANGE = (1e-13, 1e-3)


class StepUnderflowError(RuntimeError):
    """The adaptive integrator could not make progress."""


def check_tol(tol: float) -> float:
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise ValueError(f"tolerance {tol} outside {TOL_RANGE}")
    return float(tol)


def solve_to_times(rhs, y0, t_span, times, tol, dense: bool = False):
    """Integrate rhs over t_span, returning states at the given times.

    Returns the (len(times), len(y0)) state array, or (states, sol) with
    the dense interpolant when ``dense`` is set.
    """
    check_tol(tol)
    res = solve_ivp(
        rhs,
        tuple(float(t) for t in t_span),
        np.asarray(y0, dtype=float),
        method="DOP853",
        t_eval=[float(t) for t in times],
        rtol=tol,
        atol=tol,
        dense_output=dense,
    )
    if not res.success:
        raise StepUnderflowError(f"integration failed: {res.message}")
    states = res.y.T
    return (states, res.sol) if dense else states


def implicit_midpoint(rhs, jac, y0, t0: float, t1: float, steps: int,
                      newton_tol: float = 1e-12, max_newton: int = 12):
    """Fixed-step implicit midpoint rule with Newton solves.

    ``jac(t, y)`` must return the (n, n) Jacobian of the field.  The rule
    is second order and preserves the constant symplectic forms used
    throughout this package; choose ``steps`` so that (span/steps)^2
    matches the accuracy you need.
    """
    y = np.asarray(y0, dtype=float).copy()
    n = y.size
    h = (t1 - t0) / steps
    eye = np.eye(n)
    for i in range(steps):
        t_mid = t0 + (i + 0.5) * h
        z = y + 0.5 * h * rhs(t_mid, y)  # predictor for the midpoint stage
        for _ in range(max_newton):
            f = z - y - 0.5 * h * rhs(t_mid, z)
            if np.max(np.abs(f)) <= newton_tol:
                break
            jm = eye - 0.5 * h * jac(t_mid, z)
            z = z - np.linalg.solve(jm, f)
        else:
            raise StepUnderflowError("implicit midpoint Newton iteration stalled")
        y = 2.0 * z - y
    return y
