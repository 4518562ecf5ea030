"""Covariance preprocessing for the weighted procedures.

A covariance matrix is standardized to correlation form, factored once, and
the per-coordinate weights are read off the precision diagonal: weight
w_i = 1 - R_i^2, the complement of the squared multiple correlation between
coordinate i and the remaining coordinates, equals the reciprocal of the i-th
diagonal entry of the inverse correlation matrix. The scaled precision matrix
with unit diagonal drives conditional-noncentrality calculations, and the
Cholesky factor drives sampling.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DecompositionError, InvalidInputError, InvalidParameterError

# Relative symmetry tolerance; inputs within it are symmetrized by averaging.
_SYMMETRY_RTOL = 1e-10
# Cholesky pivot threshold relative to the largest diagonal entry.
_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class CorrelationModel:
    """Correlation structure of the test statistics with derived weights.

    Immutable after construction; the arrays are marked read-only so a model
    can be shared freely across threads and replications.
    """

    dimension: int
    sigma: np.ndarray
    corr: np.ndarray
    precision_diag: np.ndarray
    weights: np.ndarray
    gamma: np.ndarray
    chol: np.ndarray


@dataclass(frozen=True)
class MeanSpec:
    """Mean vector with its standardized and weight-rescaled forms."""

    mu: np.ndarray
    nu: np.ndarray
    delta: np.ndarray


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _failing_pivot(matrix):
    """Locate the first nonpositive pivot of a failed Cholesky factorization."""
    work = np.array(matrix, dtype=float)
    d = work.shape[0]
    for k in range(d):
        pivot = work[k, k]
        if pivot <= 0.0 or not np.isfinite(pivot):
            return k, float(pivot)
        root = np.sqrt(pivot)
        work[k:, k] /= root
        work[k + 1 :, k + 1 :] -= np.outer(work[k + 1 :, k], work[k + 1 :, k])
    return d - 1, float(work[d - 1, d - 1])


def _checked_cholesky(matrix, what):
    try:
        chol = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        index, pivot = _failing_pivot(matrix)
        raise DecompositionError(
            f"{what} is not positive definite: pivot {pivot:.3e} at index {index}"
        ) from exc
    pivots = np.diagonal(chol) ** 2
    threshold = _PIVOT_RTOL * float(np.max(np.diagonal(matrix)))
    worst = int(np.argmin(pivots))
    if pivots[worst] < threshold:
        raise DecompositionError(
            f"{what} is numerically singular: pivot {pivots[worst]:.3e} at "
            f"index {worst} below threshold {threshold:.3e}"
        )
    return chol


def build_model(sigma) -> CorrelationModel:
    """Standardize a positive-definite covariance matrix and derive weights.

    Returns a :class:`CorrelationModel` whose ``weights`` satisfy
    w_i = 1 / (corr^{-1})_ii = 1 - R_i^2. The precision matrix is formed from
    the Cholesky factor by triangular solves; the input is symmetrized by
    averaging after an asymmetry check at 1e-10 relative tolerance.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise InvalidInputError(f"covariance must be a square matrix, got shape {sigma.shape}")
    if sigma.shape[0] < 1:
        raise InvalidInputError("covariance must be at least 1 x 1")
    if not np.all(np.isfinite(sigma)):
        raise InvalidInputError("covariance contains non-finite entries")

    scale = float(np.max(np.abs(sigma)))
    if scale == 0.0:
        raise DecompositionError("covariance is identically zero")
    if float(np.max(np.abs(sigma - sigma.T))) > _SYMMETRY_RTOL * scale:
        raise InvalidInputError("covariance is asymmetric beyond tolerance")
    sigma = 0.5 * (sigma + sigma.T)

    variances = np.diagonal(sigma).copy()
    if np.any(variances <= 0.0):
        bad = int(np.argmin(variances))
        raise DecompositionError(f"diagonal entry {bad} is not positive: {variances[bad]!r}")

    inv_sd = 1.0 / np.sqrt(variances)
    corr = sigma * np.outer(inv_sd, inv_sd)
    np.fill_diagonal(corr, 1.0)

    chol = _checked_cholesky(corr, "correlation matrix")
    inv_chol = solve_triangular(chol, np.eye(corr.shape[0]), lower=True)
    precision = inv_chol.T @ inv_chol
    precision_diag = np.diagonal(precision).copy()
    # Exactly 1 for coordinates uncorrelated with the rest; never below 1
    # in exact arithmetic, so clamp rounding noise.
    weights = np.minimum(1.0 / precision_diag, 1.0)

    root_w = np.sqrt(weights)
    gamma = precision * np.outer(root_w, root_w)
    gamma = 0.5 * (gamma + gamma.T)

    return CorrelationModel(
        dimension=sigma.shape[0],
        sigma=_freeze(sigma),
        corr=_freeze(corr),
        precision_diag=_freeze(precision_diag),
        weights=_freeze(weights),
        gamma=_freeze(gamma),
        chol=_freeze(chol),
    )


def mean_spec(model: CorrelationModel, mu) -> MeanSpec:
    """Attach a mean vector to a model, deriving its standardized forms."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (model.dimension,):
        raise InvalidInputError(
            f"mean vector has shape {mu.shape}, expected ({model.dimension},)"
        )
    if not np.all(np.isfinite(mu)):
        raise InvalidInputError("mean vector contains non-finite entries")
    nu = mu / np.sqrt(np.diagonal(model.sigma))
    delta = nu / np.sqrt(model.weights)
    return MeanSpec(mu=_freeze(mu), nu=_freeze(nu), delta=_freeze(delta))


def equicorrelated_weight(d: int, rho: float) -> float:
    """Closed-form shared weight of the equicorrelated model.

    All coordinates of the matrix (1-rho) I + rho 11' share the weight
    (1-rho)(1+(d-1)rho) / (1+(d-2)rho); ``rho`` must respect the
    positive-definiteness range (-1/(d-1), 1).
    """
    if not (isinstance(d, int) and d >= 2):
        raise InvalidParameterError(f"dimension must be an integer >= 2, got {d!r}")
    if not (-1.0 / (d - 1) < rho < 1.0):
        raise InvalidParameterError(
            f"rho={rho!r} outside the positive-definite range (-1/{d - 1}, 1)"
        )
    return (1.0 - rho) * (1.0 + (d - 1) * rho) / (1.0 + (d - 2) * rho)


def equicorrelated_matrix(d: int, rho: float) -> np.ndarray:
    """Explicit equicorrelated correlation matrix (1-rho) I + rho 11'."""
    if not (isinstance(d, int) and d >= 1):
        raise InvalidParameterError(f"dimension must be a positive integer, got {d!r}")
    if d > 1 and not (-1.0 / (d - 1) < rho < 1.0):
        raise InvalidParameterError(
            f"rho={rho!r} outside the positive-definite range (-1/{d - 1}, 1)"
        )
    return (1.0 - rho) * np.eye(d) + rho * np.ones((d, d))


def conditional_noncentrality(model: CorrelationModel, i: int, y_rest, delta_rest) -> float:
    """Noncentrality of coordinate i's conditional squared law given the rest.

    Equals the squared inner product of the i-th off-diagonal column of the
    unit-diagonal scaled precision matrix with the centered remaining
    coordinates (on the weight-rescaled scale).
    """
    if not (0 <= i < model.dimension):
        raise InvalidInputError(f"index {i} out of range for dimension {model.dimension}")
    y_rest = np.asarray(y_rest, dtype=float)
    delta_rest = np.asarray(delta_rest, dtype=float)
    expected = (model.dimension - 1,)
    if y_rest.shape != expected or delta_rest.shape != expected:
        raise InvalidInputError(
            f"rest vectors must have shape {expected}, got {y_rest.shape} and {delta_rest.shape}"
        )
    gamma_col = np.delete(model.gamma[:, i], i)
    s = float(gamma_col @ (y_rest - delta_rest))
    return s * s


def sample_mvn(model: CorrelationModel, mean: MeanSpec, rng, size=None):
    """Draw from the standardized normal model N(nu, corr) via the Cholesky factor.

    Returns a length-d vector, or a (size, d) array when ``size`` is given.
    The caller owns ``rng``; one generator must not be shared across
    concurrent callers.
    """
    if size is None:
        return mean.nu + model.chol @ rng.standard_normal(model.dimension)
    z = rng.standard_normal((size, model.dimension))
    return mean.nu + z @ model.chol.T
