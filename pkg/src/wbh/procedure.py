"""Weighted step-up testing engine.

Each squared test statistic is inflated by the reciprocal of its weight
(one minus the squared multiple correlation of that coordinate with the
rest), mapped through the null survival function, and the step-up rule is
applied with critical constants i * alpha1. The base constant alpha1 solves
the calibration identity

    sum_i sf(w_i * isf(alpha1)) = alpha,

which makes the procedure control the false discovery rate at alpha for
two-sided z tests with known covariance and for two-sided t tests whose
covariance is known up to a scalar estimated by an independent chi-square.
Both the p-value-space and the statistic-space formulations of the step-up
rule are provided; they reject identical sets.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import dist
from .corr import build_model
from .errors import InvalidInputError, InvalidParameterError
from .roots import solve_monotone

# Raw p-values of exactly 0 or 1 are clamped into this range before inverse
# transforms; decisions are taken on the transformed values.
_P_FLOOR = 1e-300
_P_CEIL = 1.0 - 1e-16
# Absolute residual target for the calibration identity (contract is 1e-10).
_CALIBRATION_FTOL = 1e-12


@dataclass(frozen=True)
class MethodKind:
    """Two-sided test family: ``z`` (known scale) or ``t`` with denominator dof ``m``."""

    kind: str
    m: float | None = None

    def __post_init__(self):
        if self.kind not in ("z", "t"):
            raise InvalidParameterError(f"kind must be 'z' or 't', got {self.kind!r}")
        if self.kind == "t":
            if self.m is None or not (self.m > 0 and math.isfinite(self.m)):
                raise InvalidParameterError(f"t method needs positive dof m, got {self.m!r}")
        elif self.m is not None:
            raise InvalidParameterError("z method takes no denominator dof")

    @classmethod
    def z(cls) -> "MethodKind":
        return cls("z")

    @classmethod
    def t(cls, m: float) -> "MethodKind":
        return cls("t", float(m))

    def null_sf(self, x):
        """Survival function of the squared null statistic (chi-square 1 or F(1, m))."""
        if self.kind == "z":
            return dist.chi2_sf(x, 1.0)
        return dist.f_sf(x, 1.0, self.m)

    def null_isf(self, u):
        if self.kind == "z":
            return dist.chi2_isf(u, 1.0)
        return dist.f_isf(u, 1.0, self.m)

    def null_pdf(self, x):
        if self.kind == "z":
            return dist._chi2_pdf(x, 1.0)
        return dist._f_pdf(x, 1.0, self.m)


@dataclass(frozen=True)
class CalibratedMethod:
    """A method kind with solved base constant and step-up ladder."""

    kind: MethodKind
    weights: np.ndarray
    alpha: float
    alpha1: float
    critical_constants: np.ndarray
    residual: float


@dataclass(frozen=True)
class StepUpOutcome:
    """Result of one step-up run: count, rejected index set, and threshold."""

    R: int
    rejected: tuple[int, ...]
    threshold: float | None

    def rejected_set(self) -> frozenset[int]:
        return frozenset(self.rejected)


def _check_weights(weights) -> np.ndarray:
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    if w.ndim != 1 or w.size == 0:
        raise InvalidInputError("weights must be a nonempty vector")
    if np.any(~np.isfinite(w)) or np.any(w <= 0.0) or np.any(w > 1.0):
        raise InvalidParameterError(f"weights must lie in (0, 1], got {weights!r}")
    return w


def transform_pvalue(p, w, kind: MethodKind) -> float:
    """Map a raw two-sided p-value through the weight-w statistic inflation.

    Returns sf(isf(p) / w) for the method's null law. A unit weight is the
    identity and is returned without the inverse round-trip; p-values of
    exactly 0 or 1 are clamped before inversion.
    """
    if not (0.0 < w <= 1.0):
        raise InvalidParameterError(f"weight must lie in (0, 1], got {w!r}")
    if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
        raise InvalidParameterError(f"p-value must lie in [0, 1], got {p!r}")
    if w == 1.0:
        return float(p)
    clamped = min(max(float(p), _P_FLOOR), _P_CEIL)
    return float(kind.null_sf(kind.null_isf(clamped) / w))


def calibrate_alpha1(weights, alpha: float, kind: MethodKind) -> float:
    """Solve sum_i sf(w_i * isf(a)) = alpha for the base constant a.

    The left side is continuous and strictly increasing with a root in
    (0, alpha/d]; bisection with Newton polish drives the residual below
    1e-12. With all weights equal to 1 the identity collapses to d*a = alpha.
    """
    w = _check_weights(weights)
    if not (0.0 < alpha < 1.0):
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    d = w.size
    if np.all(w == 1.0):
        return alpha / d

    unit = w == 1.0
    w_frac = w[~unit]
    n_unit = int(unit.sum())

    def total(a):
        x = kind.null_isf(a)
        return n_unit * a + float(np.sum(kind.null_sf(w_frac * x))) - alpha

    def total_prime(a):
        x = kind.null_isf(a)
        pdf_x = kind.null_pdf(x)
        if pdf_x <= 0.0 or not math.isfinite(pdf_x):
            return 0.0  # rejects the Newton step, bisection takes over
        slopes = [kind.null_pdf(wi * x) * wi / pdf_x for wi in w_frac]
        return n_unit + math.fsum(slopes)

    return solve_monotone(
        total, dist.TINY_TAIL, alpha / d, fprime=total_prime, ftol=_CALIBRATION_FTOL
    )


def calibration_total(weights, alpha1: float, kind: MethodKind) -> float:
    """Left side of the calibration identity, sum_i sf(w_i * isf(alpha1)).

    Unit-weight terms contribute alpha1 without the inverse round-trip,
    mirroring :func:`transform_pvalue`.
    """
    w = _check_weights(weights)
    unit = w == 1.0
    total = float(unit.sum()) * alpha1
    if np.any(~unit):
        x = kind.null_isf(alpha1)
        total += float(np.sum(kind.null_sf(w[~unit] * x)))
    return total


def calibrated_method(weights, alpha: float, kind: MethodKind) -> CalibratedMethod:
    """Calibrate and package the full step-up ladder i * alpha1."""
    w = _check_weights(weights)
    alpha1 = calibrate_alpha1(w, alpha, kind)
    residual = abs(calibration_total(w, alpha1, kind) - alpha)
    constants = np.arange(1, w.size + 1, dtype=float) * alpha1
    return CalibratedMethod(
        kind=kind,
        weights=w,
        alpha=float(alpha),
        alpha1=float(alpha1),
        critical_constants=constants,
        residual=residual,
    )


def stepup(pvalues, constants) -> StepUpOutcome:
    """Step-up rule: find the largest i with the i-th order statistic at or
    below its constant, then reject everything at or below that order statistic.

    Ties at the threshold are all rejected together; ordering of tied values
    is stable in the original index, which cannot change the rejected set.
    """
    p = np.asarray(pvalues, dtype=float)
    c = np.asarray(constants, dtype=float)
    if p.ndim != 1 or c.ndim != 1 or p.size != c.size:
        raise InvalidInputError(
            f"pvalues and constants must be equal-length vectors, got {p.shape} and {c.shape}"
        )
    if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise InvalidInputError("p-values must lie in [0, 1]")
    if np.any(np.diff(c) < 0.0) or np.any(c <= 0.0) or np.any(c >= 1.0):
        raise InvalidInputError("constants must be nondecreasing within (0, 1)")

    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    hits = np.nonzero(sorted_p <= c)[0]
    if hits.size == 0:
        return StepUpOutcome(R=0, rejected=(), threshold=None)
    count = int(hits[-1]) + 1
    threshold = float(sorted_p[count - 1])
    rejected = tuple(int(i) for i in np.nonzero(p <= threshold)[0])
    return StepUpOutcome(R=count, rejected=rejected, threshold=threshold)


def statistic_space_stepup(stats, alpha1: float, kind: MethodKind) -> StepUpOutcome:
    """Step-up rule phrased on the weighted squared statistics themselves.

    Sorting the statistics ascending, the rule finds the smallest position i
    whose statistic clears isf((d-i+1) * alpha1) and rejects that statistic
    and everything above it; with no such position nothing is rejected. The
    rejected set is identical to running :func:`stepup` on the transformed
    p-values with constants i * alpha1.
    """
    t = np.asarray(stats, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("stats must be a nonempty vector")
    if np.any(~np.isfinite(t)) or np.any(t < 0.0):
        raise InvalidInputError("stats must be finite and nonnegative")
    if not (0.0 < alpha1 < 1.0):
        raise InvalidParameterError(f"alpha1 must lie in (0, 1), got {alpha1!r}")
    d = t.size
    if d * alpha1 >= 1.0:
        raise InvalidParameterError("d * alpha1 must stay below 1")

    cutoffs = np.array([kind.null_isf((d - i + 1) * alpha1) for i in range(1, d + 1)])
    sorted_t = np.sort(t, kind="stable")
    hits = np.nonzero(sorted_t >= cutoffs)[0]
    if hits.size == 0:
        return StepUpOutcome(R=0, rejected=(), threshold=None)
    first = int(hits[0])
    stat_threshold = float(sorted_t[first])
    rejected = tuple(int(i) for i in np.nonzero(t >= stat_threshold)[0])
    return StepUpOutcome(
        R=d - first,
        rejected=rejected,
        threshold=float(kind.null_sf(stat_threshold)),
    )


def _weighted_pipeline(z2, weights, alpha, kind):
    cm = calibrated_method(weights, alpha, kind)
    weighted_stats = z2 / cm.weights
    p_tilde = cm.kind.null_sf(weighted_stats)
    return stepup(p_tilde, cm.critical_constants)


def weighted_bh_z(x, sigma, alpha: float) -> StepUpOutcome:
    """Weighted step-up test of all means being zero, two-sided, known covariance.

    Standardizes the observations, inflates each squared z statistic by the
    reciprocal of its weight, and applies the calibrated step-up rule. With a
    diagonal covariance this reduces to the classic linear step-up on the
    unweighted two-sided p-values at level alpha.
    """
    model = build_model(sigma)
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dimension,):
        raise InvalidInputError(f"x has shape {x.shape}, expected ({model.dimension},)")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x contains non-finite entries")
    z = x / np.sqrt(np.diagonal(model.sigma))
    return _weighted_pipeline(z * z, model.weights, alpha, MethodKind.z())


def weighted_bh_t(x, v, m, sigma, alpha: float) -> StepUpOutcome:
    """Weighted step-up test with an unknown scale estimated by v ~ scale * chi2(m).

    The squared t statistics m * z_i^2 / v replace the squared z statistics
    and the F(1, m) tail replaces the chi-square tail.
    """
    if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
        raise InvalidInputError(f"scale statistic v must be positive, got {v!r}")
    kind = MethodKind.t(m)
    model = build_model(sigma)
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dimension,):
        raise InvalidInputError(f"x has shape {x.shape}, expected ({model.dimension},)")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x contains non-finite entries")
    z = x / np.sqrt(np.diagonal(model.sigma))
    t2 = kind.m * z * z / v
    return _weighted_pipeline(t2, model.weights, alpha, kind)


def plain_bh(pvalues, alpha: float) -> StepUpOutcome:
    """Classic linear step-up at level alpha (constants i * alpha / d)."""
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError("pvalues must be a nonempty vector")
    if not (0.0 < alpha < 1.0):
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    constants = np.arange(1, p.size + 1, dtype=float) * (alpha / p.size)
    return stepup(p, constants)


def simes_global(pvalues_transformed, alpha1: float) -> bool:
    """Global intersection test: significant iff the step-up rule rejects anything.

    Equivalent to min over i of the i-th order statistic divided by i*alpha1
    being at most 1.
    """
    p = np.sort(np.asarray(pvalues_transformed, dtype=float))
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError("pvalues must be a nonempty vector")
    if not (0.0 < alpha1 < 1.0):
        raise InvalidParameterError(f"alpha1 must lie in (0, 1), got {alpha1!r}")
    ladder = np.arange(1, p.size + 1, dtype=float) * alpha1
    return bool(np.any(p <= ladder))
