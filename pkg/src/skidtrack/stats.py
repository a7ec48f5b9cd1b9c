"""Nonparametric significance tests for paired controller comparisons.

Omnibus test: Friedman aligned ranks (Hodges-Lehmann alignment).  Each block's
mean is subtracted from its observations, the aligned values are ranked
jointly across the whole k x n table (average ranks on ties), and the
statistic

    T = (k-1) [ sum_j Rt_j^2 - (k n^2 / 4)(k n + 1)^2 ]
        / ( k n (k n + 1)(2 k n + 1) / 6 - (1/k) sum_i Rb_i^2 )

(Rt_j treatment rank totals, Rb_i block rank totals) is referred to a
chi-square law with k-1 degrees of freedom.

Because the chi-square reference is poor at small samples, a permutation
p-value is also provided: treatments are permuted within blocks, exactly by
enumeration when the arrangement count is small and by seeded Monte Carlo
resampling otherwise.

Post hoc: step-down Finner adjustment of a family of p-values,
adj_(i) = max_{j<=i} (1 - (1 - p_(j))^{m/j}) over the ascending order.

References
----------
J. L. Hodges, E. L. Lehmann, "Rank methods for combination of independent
experiments in analysis of variance", Ann. Math. Stat. 33, 1962.
S. Garcia et al., "Advanced nonparametric tests for multiple comparisons in
the design of experiments", Information Sciences 180, 2010.
H. Finner, "On a monotonicity problem in step-down multiple test procedures",
J. Am. Stat. Assoc. 88, 1993.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as st

from .errors import EmptyRecord, MismatchedRuns
from .metrics import MetricsSummary, summarize_record

DEGENERACY_EPS = 1e-12
MAX_EXACT_ARRANGEMENTS = 65536
MC_RESAMPLES = 20000


@dataclass(frozen=True, slots=True)
class FarResult:
    statistic: float
    p_value: float
    dof: int
    degenerate: bool


def _aligned_ranks(groups: np.ndarray) -> np.ndarray:
    aligned = groups - groups.mean(axis=0, keepdims=True)
    flat = st.rankdata(aligned.ravel(), method="average")
    return flat.reshape(groups.shape)


def _statistic_from_rowsums(rowsums: np.ndarray, k: int, n: int, denom: float):
    kn = k * n
    num = (k - 1) * (np.sum(rowsums * rowsums, axis=-1) - k * n * n * (kn + 1) ** 2 / 4.0)
    return num / denom


def _denominator(ranks: np.ndarray, k: int, n: int) -> float:
    kn = k * n
    block_tot = ranks.sum(axis=0)
    return kn * (kn + 1) * (2 * kn + 1) / 6.0 - float(np.sum(block_tot**2)) / k


def far_test(groups) -> FarResult:
    """Friedman aligned-ranks omnibus test.

    Parameters
    ----------
    groups : array-like, shape (k, n)
        One row per treatment, one column per paired block.

    A table with no variation anywhere carries no evidence; it is flagged
    degenerate and reported as statistic 0, p-value 1.
    """
    x = np.asarray(groups, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 1:
        raise EmptyRecord("need a (k >= 2) x (n >= 1) table")
    k, n = x.shape
    aligned = x - x.mean(axis=0, keepdims=True)
    if float(np.ptp(aligned)) <= DEGENERACY_EPS:
        return FarResult(0.0, 1.0, k - 1, True)
    ranks = _aligned_ranks(x)
    denom = _denominator(ranks, k, n)
    if denom <= DEGENERACY_EPS:
        return FarResult(0.0, 1.0, k - 1, True)
    t = float(_statistic_from_rowsums(ranks.sum(axis=1), k, n, denom))
    p = float(st.chi2.sf(t, k - 1))
    return FarResult(t, p, k - 1, False)


def far_permutation_p(
    groups,
    max_exact: int = MAX_EXACT_ARRANGEMENTS,
    n_resamples: int = MC_RESAMPLES,
    seed: int = 0,
) -> tuple[float, str]:
    """Permutation p-value of the aligned-ranks statistic.

    Within-block treatment permutations leave the alignment, the joint rank
    multiset, and the block totals unchanged, so only the treatment totals
    need recomputing per arrangement.  Exact enumeration when (k!)^n fits the
    budget, otherwise seeded Monte Carlo with an add-one estimate.

    Returns (p, method) with method "exact" or "monte-carlo".
    """
    x = np.asarray(groups, dtype=float)
    k, n = x.shape
    aligned = x - x.mean(axis=0, keepdims=True)
    if float(np.ptp(aligned)) <= DEGENERACY_EPS:
        return 1.0, "degenerate"
    ranks = _aligned_ranks(x)
    denom = _denominator(ranks, k, n)
    if denom <= DEGENERACY_EPS:
        return 1.0, "degenerate"
    t_obs = float(_statistic_from_rowsums(ranks.sum(axis=1), k, n, denom))

    n_arrangements = math.factorial(k) ** n
    if n_arrangements <= max_exact:
        perms = list(itertools.permutations(range(k)))
        count = 0
        for choice in itertools.product(range(len(perms)), repeat=n):
            rowsums = np.zeros(k)
            for col, ci in enumerate(choice):
                rowsums[list(perms[ci])] += ranks[:, col]
            t = float(_statistic_from_rowsums(rowsums, k, n, denom))
            if t >= t_obs - DEGENERACY_EPS:
                count += 1
        return count / n_arrangements, "exact"

    rng = np.random.default_rng(seed)
    # vectorized over resamples: independently permute each column
    idx = np.argsort(rng.random((n_resamples, k, n)), axis=1)
    permuted = np.take_along_axis(
        np.broadcast_to(ranks, (n_resamples, k, n)), idx, axis=1
    )
    rowsums = permuted.sum(axis=2)
    t = _statistic_from_rowsums(rowsums, k, n, denom)
    count = int(np.sum(t >= t_obs - DEGENERACY_EPS))
    return (1 + count) / (1 + n_resamples), "monte-carlo"


def finner_posthoc(p_values, comparisons: int | None = None) -> list[float]:
    """Step-down Finner adjustment; returns values in the original order.

    `comparisons` defaults to the family size.  A single comparison is left
    unchanged (the exponent is 1).
    """
    p = np.asarray(p_values, dtype=float)
    if p.size == 0:
        return []
    m = int(comparisons) if comparisons is not None else p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty_like(p)
    running = 0.0
    for rank, j in enumerate(order, start=1):
        exponent = m / rank
        value = p[j] if exponent == 1.0 else 1.0 - (1.0 - p[j]) ** exponent
        running = max(running, value)
        adjusted[j] = min(1.0, running)
    return [float(v) for v in adjusted]


def improvement(baseline: float, variant: float) -> float:
    """Relative improvement in percent, positive when the variant is smaller."""
    return 100.0 * (baseline - variant) / baseline


METRIC_NAMES = ("mean_dis_cm", "rms_dis_cm", "mean_abs_heading_deg", "rms_heading_deg")


@dataclass(frozen=True, slots=True)
class ComparisonResult:
    n_pairs: int
    per_trajectory: dict[str, dict[str, tuple[float, float, float]]]
    overall: dict[str, tuple[float, float, float]]
    far: FarResult
    permutation_p: float
    permutation_method: str
    finner_adjusted: list[float]
    alpha: float = 0.05

    @property
    def significant(self) -> bool:
        return not self.far.degenerate and self.permutation_p < self.alpha


def _mean_metrics(summaries: list[MetricsSummary]) -> dict[str, float]:
    return {
        name: float(np.mean([getattr(s, name) for s in summaries]))
        for name in METRIC_NAMES
    }


def compare(records_a, records_b, alpha: float = 0.05) -> ComparisonResult:
    """Paired comparison of two matched experiment lists (baseline, variant).

    Runs must pair up: same count, and per pair the same trajectory and seeds.
    Improvement columns are computed on per-trajectory and pooled metric means;
    significance is assessed on the paired per-run mean distance errors.
    """
    if len(records_a) != len(records_b):
        raise MismatchedRuns(
            f"cannot pair {len(records_a)} runs with {len(records_b)}"
        )
    if len(records_a) == 0:
        raise EmptyRecord("nothing to compare")
    for ra, rb in zip(records_a, records_b):
        for key in ("trajectory", "slip_seed", "plant_seed"):
            if ra.meta.get(key) != rb.meta.get(key):
                raise MismatchedRuns(
                    f"pairing mismatch on {key}: "
                    f"{ra.meta.get(key)!r} vs {rb.meta.get(key)!r}"
                )

    summaries_a = [summarize_record(r) for r in records_a]
    summaries_b = [summarize_record(r) for r in records_b]

    def table(idx) -> dict[str, tuple[float, float, float]]:
        ma = _mean_metrics([summaries_a[i] for i in idx])
        mb = _mean_metrics([summaries_b[i] for i in idx])
        return {
            name: (ma[name], mb[name], improvement(ma[name], mb[name]))
            for name in METRIC_NAMES
        }

    trajectories = []
    for r in records_a:
        if r.meta["trajectory"] not in trajectories:
            trajectories.append(r.meta["trajectory"])
    per_traj = {
        kind: table([i for i, r in enumerate(records_a) if r.meta["trajectory"] == kind])
        for kind in trajectories
    }
    overall = table(range(len(records_a)))

    paired = np.array(
        [
            [s.mean_dis_cm for s in summaries_a],
            [s.mean_dis_cm for s in summaries_b],
        ]
    )
    far = far_test(paired)
    perm_p, method = far_permutation_p(paired)
    finner = finner_posthoc([perm_p], comparisons=1)
    return ComparisonResult(
        n_pairs=len(records_a),
        per_trajectory=per_traj,
        overall=overall,
        far=far,
        permutation_p=perm_p,
        permutation_method=method,
        finner_adjusted=finner,
        alpha=alpha,
    )
