"""Damped least squares with covariance and rank checks."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

__all__ = ["FitFailure", "RankDeficientError", "LsqSolution", "damped_least_squares"]


class FitFailure(RuntimeError):
    """The minimiser did not converge."""


class RankDeficientError(FitFailure):
    """The weighted Jacobian is (numerically) singular at the solution."""


@dataclass
class LsqSolution:
    x: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int
    nfev: int
    converged: bool
    residuals: np.ndarray

    @property
    def chi2_reduced(self):
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    @property
    def errors(self):
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))


def damped_least_squares(
    residuals,
    x0,
    jac="2-point",
    x_scale=1.0,
    xtol=1e-10,
    ftol=1e-12,
    max_iter=200,
    absolute_sigma=True,
    rcond=1e-12,
):
    """Minimise ``sum(residuals(x)**2)`` with Levenberg-Marquardt.

    ``residuals`` must already be weighted (``(model - data) / sigma``).
    The covariance is ``(J^T J)^-1`` at the solution, scaled by the reduced
    chi-square unless ``absolute_sigma``.

    Raises
    ------
    RankDeficientError
        If the smallest singular value of ``J`` falls below ``rcond`` times the
        largest (after column scaling).
    FitFailure
        If the iteration budget is exhausted.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    res = least_squares(
        residuals,
        x0,
        jac=jac,
        method="lm",
        x_scale=x_scale,
        xtol=xtol,
        ftol=ftol,
        gtol=1e-15,
        max_nfev=max_iter * (n + 1),
    )
    if res.status <= 0:
        raise FitFailure(f"least squares did not converge: {res.message}")
    jmat = np.atleast_2d(res.jac)
    col = np.linalg.norm(jmat, axis=0)
    if np.any(col == 0) or not np.all(np.isfinite(jmat)):
        raise RankDeficientError("parameter has no influence on the residuals")
    js = jmat / col
    u, s, vt = np.linalg.svd(js, full_matrices=False)
    if s[-1] < rcond * s[0]:
        raise RankDeficientError(f"singular curvature (condition {s[0] / s[-1]:.3g})")
    cov_s = (vt.T / s**2) @ vt
    cov = cov_s / np.outer(col, col)
    chi2 = float(np.sum(res.fun**2))
    dof = res.fun.size - n
    if not absolute_sigma and dof > 0:
        cov = cov * chi2 / dof
    cov = 0.5 * (cov + cov.T)
    return LsqSolution(
        x=res.x,
        covariance=cov,
        chi2=chi2,
        dof=dof,
        nfev=res.nfev,
        converged=True,
        residuals=res.fun,
    )
