"""FDR-controlled variable selection for the Gaussian linear model.

Ordinary least squares supplies per-coefficient squared t statistics; the
design's Gram matrix supplies the weights w_i = 1 / (a_ii * a^ii), where a_ii
and a^ii are the i-th diagonal entries of the Gram matrix and of its inverse.
Selection then runs the same calibrated weighted step-up as the t-test
procedure, with critical constants i * alpha1 and denominator dof n - d.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .dist import f_sf
from .errors import DegenerateFitError, InvalidInputError
from .procedure import MethodKind, StepUpOutcome, calibrated_method, stepup

# Residual variances below this multiple of mean(Y^2) flag a noiseless fit.
_DEGENERATE_RTOL = 1e-14
# Gram pivot threshold relative to the largest diagonal entry.
_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class RegressionProblem:
    """Design matrix of full column rank with more rows than columns, plus response."""

    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        design = np.asarray(self.design, dtype=float)
        response = np.asarray(self.response, dtype=float)
        if design.ndim != 2:
            raise InvalidInputError(f"design must be a 2-d matrix, got shape {design.shape}")
        n, d = design.shape
        if d < 1:
            raise InvalidInputError("design needs at least one column")
        if n <= d:
            raise InvalidInputError(
                f"need more observations than variables for the scale estimate, got n={n}, d={d}"
            )
        if response.shape != (n,):
            raise InvalidInputError(
                f"response has shape {response.shape}, expected ({n},)"
            )
        if not (np.all(np.isfinite(design)) and np.all(np.isfinite(response))):
            raise InvalidInputError("design/response contain non-finite entries")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "response", response)

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def d(self) -> int:
        return self.design.shape[1]


@dataclass(frozen=True)
class OLSFit:
    """Least-squares fit with the Gram quantities the selection rule reads."""

    beta_hat: np.ndarray
    tau2_hat: float
    gram: np.ndarray
    gram_inv: np.ndarray
    dof: int
    degenerate: bool


def _gram_factor(design: np.ndarray):
    """Gram matrix of the design with its Cholesky factor and inverse."""
    gram = design.T @ design
    gram = 0.5 * (gram + gram.T)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError(f"design is rank deficient: {exc}") from exc
    pivots = np.diagonal(chol) ** 2
    threshold = _PIVOT_RTOL * float(np.max(np.diagonal(gram)))
    if float(np.min(pivots)) < threshold:
        raise InvalidInputError(
            f"design is numerically rank deficient: pivot {float(np.min(pivots)):.3e} "
            f"below threshold {threshold:.3e}"
        )
    inv_chol = solve_triangular(chol, np.eye(design.shape[1]), lower=True)
    return gram, chol, inv_chol.T @ inv_chol


def ols_fit(problem: RegressionProblem) -> OLSFit:
    """Fit by ordinary least squares, factoring the Gram matrix once.

    The coefficient vector, the inverse Gram matrix, and the residual
    variance estimate all derive from a single Cholesky factorization;
    a failed or near-singular factorization signals a rank-deficient design.
    A residual variance below 1e-14 * mean(Y^2) marks the fit degenerate
    (noiseless data) rather than producing unbounded statistics downstream.
    """
    x, y = problem.design, problem.response
    gram, chol, gram_inv = _gram_factor(x)

    xty = x.T @ y
    beta_hat = solve_triangular(chol.T, solve_triangular(chol, xty, lower=True), lower=False)

    dof = problem.n - problem.d
    residual = y - x @ beta_hat
    tau2_hat = float(residual @ residual) / dof
    degenerate = tau2_hat < _DEGENERATE_RTOL * float(np.mean(y * y))

    return OLSFit(
        beta_hat=beta_hat,
        tau2_hat=tau2_hat,
        gram=gram,
        gram_inv=gram_inv,
        dof=dof,
        degenerate=degenerate,
    )


def t_squared(fit: OLSFit) -> np.ndarray:
    """Squared per-coefficient t statistics, beta_i^2 / (a^ii * tau2)."""
    if fit.degenerate or fit.tau2_hat <= 0.0:
        raise DegenerateFitError(
            f"residual variance {fit.tau2_hat!r} is numerically zero; t statistics undefined"
        )
    return fit.beta_hat**2 / (np.diagonal(fit.gram_inv) * fit.tau2_hat)


def selection_weights(fit: OLSFit) -> np.ndarray:
    """Weights w_i = 1 / (a_ii * a^ii) from the Gram diagonal and its inverse.

    Equals one minus the squared multiple correlation between coefficient i's
    estimate and the remaining estimates; exactly 1 for orthogonal designs.
    """
    w = 1.0 / (np.diagonal(fit.gram) * np.diagonal(fit.gram_inv))
    return np.minimum(w, 1.0)


def select_variables(problem: RegressionProblem, alpha: float) -> StepUpOutcome:
    """Select variables by the calibrated weighted step-up on squared t statistics.

    Critical constants are i * alpha1, the same ladder as the z- and t-test
    procedures, with alpha1 solving the calibration identity for the F(1, n-d)
    tail and the design-derived weights. The returned indices are the selected
    variables.
    """
    fit = ols_fit(problem)
    stats = t_squared(fit)
    weights = selection_weights(fit)
    kind = MethodKind.t(float(fit.dof))
    cm = calibrated_method(weights, alpha, kind)
    p_tilde = f_sf(stats / cm.weights, 1.0, float(fit.dof))
    return stepup(p_tilde, cm.critical_constants)
