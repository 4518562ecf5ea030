"""Monte Carlo validation harness for the weighted step-up procedures.

Scenarios pair a correlation structure with a mean configuration (which
coordinates are true nulls, how strong the alternatives are) and a method
kind. Replication ``i`` draws from a dedicated RNG stream derived from
``(base seed, i)``, so results are bit-identical no matter how replications
are scheduled across workers.

The false discovery rate is estimated two ways on the same draws: the direct
average of per-replication false discovery proportions, and a leave-one-out
decomposition that evaluates, for every true null, the rejection indicator
against the count of rejections among the remaining coordinates. For a
step-up rule the two expressions are equal realization by realization, which
the test suite asserts exactly; the pair of estimators therefore doubles as a
consistency check on the step-up implementation itself. The unweighted
linear step-up is evaluated on the same draws for comparison only.
"""

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .corr import CorrelationModel, MeanSpec, build_model, equicorrelated_matrix, sample_mvn
from .dist import _nc_chi2_sf_lams
from .errors import InvalidInputError, InvalidParameterError, NumericalError
from .procedure import MethodKind, calibrated_method
from .varselect import RegressionProblem, _gram_factor, ols_fit, t_squared

# Fixed chunk layout keeps results independent of the worker count.
_CHUNK = 4096
# A run with more than this fraction of failed replications fails validation.
_MAX_FAILURE_FRACTION = 1e-4


@dataclass(frozen=True)
class CovarianceSpec:
    """How a scenario's correlation structure is produced."""

    kind: str
    rho: float | None = None
    matrix: np.ndarray | None = None
    seed: int | None = None

    @classmethod
    def identity(cls) -> "CovarianceSpec":
        return cls(kind="identity")

    @classmethod
    def equicorrelated(cls, rho: float) -> "CovarianceSpec":
        return cls(kind="equicorrelated", rho=float(rho))

    @classmethod
    def explicit(cls, matrix) -> "CovarianceSpec":
        return cls(kind="matrix", matrix=np.asarray(matrix, dtype=float))

    @classmethod
    def random_pd(cls, seed: int) -> "CovarianceSpec":
        return cls(kind="random_pd", seed=int(seed))

    def build(self, dimension: int) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(dimension)
        if self.kind == "equicorrelated":
            return equicorrelated_matrix(dimension, self.rho)
        if self.kind == "matrix":
            m = self.matrix
            if m is None or m.shape != (dimension, dimension):
                raise InvalidInputError(
                    f"explicit covariance must be {dimension} x {dimension}"
                )
            return m
        if self.kind == "random_pd":
            return random_correlation(dimension, self.seed)
        raise InvalidInputError(f"unknown covariance kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "equicorrelated":
            return f"rho={self.rho:g}"
        if self.kind == "matrix":
            return "matrix"
        return f"random_pd({self.seed})"


def random_correlation(dimension: int, seed: int) -> np.ndarray:
    """Random positive-definite correlation matrix.

    A random orthogonal basis (QR of a Gaussian matrix) is combined with
    log-uniform eigenvalues on [0.1, 10], then the result is standardized to
    unit diagonal. Positive definiteness is inherited from the eigenvalues.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    basis, _ = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    eigenvalues = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=dimension))
    cov = (basis * eigenvalues) @ basis.T
    inv_sd = 1.0 / np.sqrt(np.diagonal(cov))
    corr = cov * np.outer(inv_sd, inv_sd)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True)
class Scenario:
    """One simulation configuration; fully determines every result with ``seed``.

    ``signal`` is the standardized alternative mean: alternatives get mean
    signal * sqrt(sigma_jj). A tuple gives one value per alternative
    coordinate in index order.
    """

    dimension: int
    covariance: CovarianceSpec
    null_indices: tuple[int, ...]
    signal: float | tuple[float, ...]
    method: MethodKind
    alpha: float
    replications: int
    seed: int

    def __post_init__(self):
        d = self.dimension
        if not (isinstance(d, int) and d >= 1):
            raise InvalidInputError(f"dimension must be a positive integer, got {d!r}")
        nulls = tuple(int(i) for i in self.null_indices)
        if len(set(nulls)) != len(nulls) or any(not 0 <= i < d for i in nulls):
            raise InvalidInputError(f"null indices must be distinct and in [0, {d}), got {nulls!r}")
        object.__setattr__(self, "null_indices", nulls)
        if not (0.0 < self.alpha < 1.0):
            raise InvalidParameterError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (isinstance(self.replications, int) and self.replications >= 1):
            raise InvalidInputError(
                f"replication count must be a positive integer, got {self.replications!r}"
            )
        if isinstance(self.signal, tuple):
            if len(self.signal) != d - len(nulls):
                raise InvalidInputError(
                    f"per-alternative signal tuple must have length {d - len(nulls)}"
                )

    @property
    def alternative_indices(self) -> tuple[int, ...]:
        nulls = set(self.null_indices)
        return tuple(i for i in range(self.dimension) if i not in nulls)


@dataclass(frozen=True)
class FdrEstimate:
    """Monte Carlo FDR estimate with its standard error."""

    mean_fdp: float
    std_error: float
    replications: int
    estimator: str


@dataclass
class ReplicationRecords:
    """Per-replication outcomes, indexed by replication number."""

    fdp: np.ndarray
    rejections: np.ndarray
    false_rejections: np.ndarray
    true_discoveries: np.ndarray
    plain_fdp: np.ndarray
    plain_rejections: np.ndarray
    loo: np.ndarray | None
    failures: int

    @property
    def count(self) -> int:
        return int(self.fdp.size)


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated results of one scenario; reproducible from (scenario, seed)."""

    scenario: dict
    direct: FdrEstimate
    leave_one_out: FdrEstimate
    power: float
    plain: FdrEstimate
    failures: int
    wall_time_s: float


@dataclass(frozen=True)
class Lemma2Diagnostic:
    """Binned comparison of an empirical conditional tail with its predicted law."""

    threshold: float
    draws: int
    bin_edges: np.ndarray
    counts: np.ndarray
    empirical: np.ndarray
    predicted: np.ndarray
    z_scores: np.ndarray
    max_abs_z: float


class _Prepared:
    """Scenario constants shared across replications (model, calibration, masks)."""

    __slots__ = (
        "scenario", "model", "nu", "cm", "null_mask", "null_indices",
        "alt_count", "plain_constants", "sf", "m",
    )

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        sigma = scenario.covariance.build(scenario.dimension)
        self.model = build_model(sigma)

        mu = np.zeros(scenario.dimension)
        alts = scenario.alternative_indices
        if alts:
            root_var = np.sqrt(np.diagonal(self.model.sigma))
            if isinstance(scenario.signal, tuple):
                for j, s in zip(alts, scenario.signal):
                    mu[j] = s * root_var[j]
            else:
                for j in alts:
                    mu[j] = scenario.signal * root_var[j]
        self.nu = mu / np.sqrt(np.diagonal(self.model.sigma))

        self.cm = calibrated_method(self.model.weights, scenario.alpha, scenario.method)
        self.null_mask = np.zeros(scenario.dimension, dtype=bool)
        self.null_mask[list(scenario.null_indices)] = True
        self.null_indices = np.array(scenario.null_indices, dtype=int)
        self.alt_count = scenario.dimension - len(scenario.null_indices)
        d = scenario.dimension
        self.plain_constants = np.arange(1, d + 1, dtype=float) * (scenario.alpha / d)
        if scenario.method.kind == "z":
            self.m = None
            self.sf = lambda a: special.gammaincc(0.5, 0.5 * a)
        else:
            self.m = scenario.method.m
            self.sf = lambda a, m=self.m: special.fdtrc(1.0, m, a)


def replication_rng(seed: int, rep_index: int) -> np.random.Generator:
    """The RNG stream owned by one replication of one scenario."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(rep_index)]))


def _stepup_counts(pvalues, constants, null_mask):
    """Lean step-up evaluation: (rejection count, false count, true discoveries)."""
    sorted_p = np.sort(pvalues)
    hits = np.nonzero(sorted_p <= constants)[0]
    if hits.size == 0:
        return 0, 0, 0
    count = int(hits[-1]) + 1
    rejected = pvalues <= sorted_p[count - 1]
    false = int(np.count_nonzero(rejected & null_mask))
    return count, false, count - false


def leave_one_out_terms(pvalues, alpha1, null_indices):
    """Denominators of the leave-one-out FDR contributions that fire.

    For each true null i, the step-up count over the remaining p-values with
    constants shifted by one position gives r; the contribution is
    1/(r+1) when p_i clears (r+1) * alpha1. Returns the list of
    denominators r+1 so callers can aggregate exactly.
    """
    p = np.asarray(pvalues, dtype=float)
    d = p.size
    sorted_p = np.sort(p)
    shifted = np.arange(2, d + 1, dtype=float) * alpha1
    denominators = []
    for i in null_indices:
        # Removing any one occurrence of a tied value leaves the same multiset.
        k = int(np.searchsorted(sorted_p, p[i]))
        rest = np.delete(sorted_p, k)
        hits = np.nonzero(rest <= shifted)[0]
        r_minus = int(hits[-1]) + 1 if hits.size else 0
        if p[i] <= (r_minus + 1) * alpha1:
            denominators.append(r_minus + 1)
    return denominators


def leave_one_out_value(pvalues, alpha1, null_indices) -> float:
    """Per-replication leave-one-out FDR contribution (sum of reciprocals)."""
    return math.fsum(1.0 / k for k in leave_one_out_terms(pvalues, alpha1, null_indices))


def _replicate(prep: _Prepared, rep_index: int, with_loo: bool):
    rng = replication_rng(prep.scenario.seed, rep_index)
    z = prep.nu + prep.model.chol @ rng.standard_normal(prep.scenario.dimension)
    raw_stats = z * z
    if prep.m is not None:
        v = rng.chisquare(prep.m)
        raw_stats = (prep.m / v) * raw_stats
    p_tilde = prep.sf(raw_stats / prep.cm.weights)
    p_raw = prep.sf(raw_stats)

    count, false, discovered = _stepup_counts(p_tilde, prep.cm.critical_constants, prep.null_mask)
    plain_count, plain_false, _ = _stepup_counts(p_raw, prep.plain_constants, prep.null_mask)
    fdp = false / count if count else 0.0
    plain_fdp = plain_false / plain_count if plain_count else 0.0
    loo = (
        leave_one_out_value(p_tilde, prep.cm.alpha1, prep.null_indices)
        if with_loo
        else 0.0
    )
    return fdp, count, false, discovered, plain_fdp, plain_count, loo


def _run_range(prep: _Prepared, start: int, stop: int, with_loo: bool) -> dict:
    n = stop - start
    fdp = np.empty(n)
    rejections = np.empty(n, dtype=np.int32)
    false_rejections = np.empty(n, dtype=np.int32)
    true_discoveries = np.empty(n, dtype=np.int32)
    plain_fdp = np.empty(n)
    plain_rejections = np.empty(n, dtype=np.int32)
    loo = np.empty(n) if with_loo else None
    failures = 0
    for k in range(n):
        try:
            out = _replicate(prep, start + k, with_loo)
        except NumericalError:
            failures += 1
            fdp[k] = np.nan
            rejections[k] = -1
            false_rejections[k] = -1
            true_discoveries[k] = -1
            plain_fdp[k] = np.nan
            plain_rejections[k] = -1
            if with_loo:
                loo[k] = np.nan
            continue
        fdp[k], rejections[k], false_rejections[k] = out[0], out[1], out[2]
        true_discoveries[k], plain_fdp[k], plain_rejections[k] = out[3], out[4], out[5]
        if with_loo:
            loo[k] = out[6]
    return {
        "fdp": fdp,
        "rejections": rejections,
        "false_rejections": false_rejections,
        "true_discoveries": true_discoveries,
        "plain_fdp": plain_fdp,
        "plain_rejections": plain_rejections,
        "loo": loo,
        "failures": failures,
    }


def _run_chunk(scenario: Scenario, start: int, stop: int, with_loo: bool) -> dict:
    return _run_range(_Prepared(scenario), start, stop, with_loo)


def run_replication(scenario: Scenario, rep_index: int):
    """Run one replication; returns (fdp, true discoveries, rejection count)."""
    if not (0 <= rep_index < scenario.replications):
        raise InvalidInputError(
            f"replication index {rep_index} outside [0, {scenario.replications})"
        )
    out = _replicate(_Prepared(scenario), rep_index, with_loo=False)
    return out[0], out[3], out[1]


def collect_replications(scenario: Scenario, workers: int = 1, with_loo: bool = False) -> ReplicationRecords:
    """Run every replication of a scenario and collect per-replication records.

    The chunk layout is fixed, each replication owns its RNG stream, and
    chunks are reassembled in index order, so the result is identical for any
    worker count. Fails with NumericalError if more than 0.01% of
    replications abort.
    """
    if not (isinstance(workers, int) and workers >= 1):
        raise InvalidInputError(f"workers must be a positive integer, got {workers!r}")
    reps = scenario.replications
    if workers == 1:
        parts = [_run_range(_Prepared(scenario), 0, reps, with_loo)]
    else:
        bounds = [(a, min(a + _CHUNK, reps)) for a in range(0, reps, _CHUNK)]
        parts = [None] * len(bounds)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_chunk, scenario, a, b, with_loo): k
                for k, (a, b) in enumerate(bounds)
            }
            for future in futures:
                parts[futures[future]] = future.result()

    records = ReplicationRecords(
        fdp=np.concatenate([p["fdp"] for p in parts]),
        rejections=np.concatenate([p["rejections"] for p in parts]),
        false_rejections=np.concatenate([p["false_rejections"] for p in parts]),
        true_discoveries=np.concatenate([p["true_discoveries"] for p in parts]),
        plain_fdp=np.concatenate([p["plain_fdp"] for p in parts]),
        plain_rejections=np.concatenate([p["plain_rejections"] for p in parts]),
        loo=np.concatenate([p["loo"] for p in parts]) if with_loo else None,
        failures=sum(p["failures"] for p in parts),
    )
    if records.failures > _MAX_FAILURE_FRACTION * reps:
        raise NumericalError(
            f"{records.failures} of {reps} replications failed, above the "
            f"{_MAX_FAILURE_FRACTION:.2%} validation limit"
        )
    return records


def _mean_and_se(values: np.ndarray):
    good = values[~np.isnan(values)]
    n = good.size
    if n == 0:
        raise NumericalError("no successful replications to aggregate")
    mean = math.fsum(good) / n
    if n == 1:
        return mean, 0.0, n
    var = math.fsum((x - mean) ** 2 for x in good) / (n - 1)
    return mean, math.sqrt(var / n), n


def estimate_fdr_direct(scenario: Scenario, workers: int = 1) -> FdrEstimate:
    """FDR estimate as the mean per-replication false discovery proportion."""
    records = collect_replications(scenario, workers=workers)
    mean, se, n = _mean_and_se(records.fdp)
    return FdrEstimate(mean_fdp=mean, std_error=se, replications=n, estimator="direct")


def estimate_fdr_leave_one_out(scenario: Scenario, workers: int = 1) -> FdrEstimate:
    """FDR estimate from the leave-one-out decomposition over true nulls."""
    records = collect_replications(scenario, workers=workers, with_loo=True)
    mean, se, n = _mean_and_se(records.loo)
    return FdrEstimate(mean_fdp=mean, std_error=se, replications=n, estimator="leave-one-out")


def _scenario_digest(scenario: Scenario) -> dict:
    digest = {
        "dimension": scenario.dimension,
        "covariance": scenario.covariance.label(),
        "method": scenario.method.kind,
        "alpha": scenario.alpha,
        "null_indices": list(scenario.null_indices),
        "signal": list(scenario.signal) if isinstance(scenario.signal, tuple) else scenario.signal,
        "replications": scenario.replications,
        "seed": scenario.seed,
    }
    if scenario.method.kind == "t":
        digest["m"] = scenario.method.m
    return digest


def simulate_report(scenario: Scenario, workers: int = 1) -> SimulationReport:
    """Full scenario run: both FDR estimators, power, and the unweighted comparison."""
    started = time.perf_counter()
    records = collect_replications(scenario, workers=workers, with_loo=True)
    direct_mean, direct_se, n = _mean_and_se(records.fdp)
    loo_mean, loo_se, _ = _mean_and_se(records.loo)
    plain_mean, plain_se, _ = _mean_and_se(records.plain_fdp)

    alt_count = scenario.dimension - len(scenario.null_indices)
    if alt_count:
        discovered = records.true_discoveries[records.true_discoveries >= 0]
        power = math.fsum(discovered / alt_count) / discovered.size
    else:
        power = 0.0

    return SimulationReport(
        scenario=_scenario_digest(scenario),
        direct=FdrEstimate(direct_mean, direct_se, n, "direct"),
        leave_one_out=FdrEstimate(loo_mean, loo_se, n, "leave-one-out"),
        power=power,
        plain=FdrEstimate(plain_mean, plain_se, n, "plain"),
        failures=records.failures,
        wall_time_s=time.perf_counter() - started,
    )


@dataclass(frozen=True)
class GridSpec:
    """Cartesian scenario grid; each cell gets its own derived seed."""

    dimensions: tuple[int, ...]
    rhos: tuple[float, ...]
    methods: tuple[MethodKind, ...]
    signals: tuple[float, ...] = (3.0,)
    null_fractions: tuple[float, ...] = (1.0, 0.5)
    alpha: float = 0.05
    replications: int = 100_000
    base_seed: int = 20260809


def generate_scenario_grid(spec: GridSpec) -> list[Scenario]:
    """Expand a grid specification into independently seeded scenarios.

    Raises InvalidParameterError when a requested rho is infeasible for a
    requested dimension (outside (-1/(d-1), 1)). All-null cells are emitted
    once regardless of how many signal levels the grid lists.
    """
    scenarios = []
    index = 0
    for d in spec.dimensions:
        for rho in spec.rhos:
            if d > 1 and not (-1.0 / (d - 1) < rho < 1.0):
                raise InvalidParameterError(
                    f"rho={rho!r} infeasible for dimension {d}: needs rho > {-1.0 / (d - 1):g}"
                )
            for method in spec.methods:
                for fraction in spec.null_fractions:
                    null_count = min(d, max(0, round(fraction * d)))
                    nulls = tuple(range(null_count))
                    signals = spec.signals if null_count < d else spec.signals[:1]
                    for signal in signals:
                        scenarios.append(
                            Scenario(
                                dimension=d,
                                covariance=CovarianceSpec.equicorrelated(rho)
                                if rho != 0.0
                                else CovarianceSpec.identity(),
                                null_indices=nulls,
                                signal=signal,
                                method=method,
                                alpha=spec.alpha,
                                replications=spec.replications,
                                seed=spec.base_seed + index,
                            )
                        )
                        index += 1
    return scenarios


def selection_replications(design, beta, alpha: float, replications: int, seed: int) -> ReplicationRecords:
    """Monte Carlo records for the variable-selection rule on a fixed design.

    Each replication draws a fresh unit-variance Gaussian response
    Y = X beta + noise from its (seed, replication)-indexed stream, refits
    least squares, and applies the calibrated weighted selection. The weights
    and base constant depend only on the design and are computed once; they
    coincide with what ``select_variables`` derives per call.
    """
    design = np.asarray(design, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n, d = design.shape
    if beta.shape != (d,):
        raise InvalidInputError(f"beta has shape {beta.shape}, expected ({d},)")

    gram, _, gram_inv = _gram_factor(design)
    weights = np.minimum(1.0 / (np.diagonal(gram) * np.diagonal(gram_inv)), 1.0)
    dof = n - d
    cm = calibrated_method(weights, alpha, MethodKind.t(float(dof)))
    null_mask = beta == 0.0
    signal_mean = design @ beta

    fdp = np.empty(replications)
    rejections = np.empty(replications, dtype=np.int32)
    false_rejections = np.empty(replications, dtype=np.int32)
    true_discoveries = np.empty(replications, dtype=np.int32)
    plain_fdp = np.empty(replications)
    plain_rejections = np.empty(replications, dtype=np.int32)
    plain_constants = np.arange(1, d + 1, dtype=float) * (alpha / d)

    for rep in range(replications):
        rng = replication_rng(seed, rep)
        response = signal_mean + rng.standard_normal(n)
        fit = ols_fit(RegressionProblem(design, response))
        stats = t_squared(fit)
        p_tilde = special.fdtrc(1.0, float(dof), stats / cm.weights)
        p_raw = special.fdtrc(1.0, float(dof), stats)
        count, false, discovered = _stepup_counts(p_tilde, cm.critical_constants, null_mask)
        plain_count, plain_false, _ = _stepup_counts(p_raw, plain_constants, null_mask)
        fdp[rep] = false / count if count else 0.0
        rejections[rep] = count
        false_rejections[rep] = false
        true_discoveries[rep] = discovered
        plain_fdp[rep] = plain_false / plain_count if plain_count else 0.0
        plain_rejections[rep] = plain_count

    return ReplicationRecords(
        fdp=fdp,
        rejections=rejections,
        false_rejections=false_rejections,
        true_discoveries=true_discoveries,
        plain_fdp=plain_fdp,
        plain_rejections=plain_rejections,
        loo=None,
        failures=0,
    )


def lemma2_conditional_check(
    model: CorrelationModel,
    mean: MeanSpec,
    i: int,
    draws: int,
    threshold: float,
    seed: int,
    bins: int = 20,
    min_bin_count: int = 200,
) -> Lemma2Diagnostic:
    """Empirical validation of the conditional law of one weighted squared coordinate.

    Coordinate ``i`` must be a true null. Draws are binned by the conditional
    noncentrality implied by the remaining coordinates; within each bin the
    empirical exceedance frequency of the weighted squared coordinate is
    compared with the mean predicted noncentral tail, standardized by the
    binomial standard error. Bins are widened (halved in number) with a
    warning when any bin has fewer than ``min_bin_count`` draws.
    """
    if mean.mu[i] != 0.0:
        raise InvalidInputError(f"coordinate {i} must be a true null (mu=0) for this check")
    if threshold < 0.0:
        raise InvalidParameterError(f"threshold must be nonnegative, got {threshold!r}")
    if draws < 2 or bins < 1:
        raise InvalidInputError("need at least 2 draws and 1 bin")

    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    z = sample_mvn(model, mean, rng, size=draws)
    y = z / np.sqrt(model.weights)

    gamma_col = model.gamma[:, i].copy()
    gamma_col[i] = 0.0
    centered = y - mean.delta
    lam = (centered @ gamma_col) ** 2
    exceeded = y[:, i] ** 2 >= threshold

    n_bins = bins
    while True:
        edges = np.unique(np.quantile(lam, np.linspace(0.0, 1.0, n_bins + 1)))
        assignment = np.clip(np.searchsorted(edges, lam, side="right") - 1, 0, len(edges) - 2)
        counts = np.bincount(assignment, minlength=len(edges) - 1)
        if counts.min() >= min_bin_count or len(edges) <= 2:
            break
        n_bins = max(1, n_bins // 2)
        warnings.warn(
            f"widening noncentrality bins to {n_bins}: minimum bin count "
            f"{int(counts.min())} below {min_bin_count}",
            stacklevel=2,
        )

    n_cells = len(edges) - 1
    empirical = np.empty(n_cells)
    predicted = np.empty(n_cells)
    z_scores = np.empty(n_cells)
    for b in range(n_cells):
        mask = assignment == b
        lam_bin = lam[mask]
        probs = _nc_chi2_sf_lams(threshold, 1.0, lam_bin)
        predicted[b] = float(np.mean(probs))
        empirical[b] = float(np.mean(exceeded[mask]))
        spread = float(np.sum(probs * (1.0 - probs)))
        if spread == 0.0:
            z_scores[b] = 0.0
        else:
            z_scores[b] = (empirical[b] - predicted[b]) * lam_bin.size / math.sqrt(spread)

    return Lemma2Diagnostic(
        threshold=float(threshold),
        draws=draws,
        bin_edges=edges,
        counts=counts,
        empirical=empirical,
        predicted=predicted,
        z_scores=z_scores,
        max_abs_z=float(np.max(np.abs(z_scores))),
    )
