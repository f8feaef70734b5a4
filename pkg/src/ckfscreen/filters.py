"""Marginal screening statistics and the top-d selection rule.

Five per-feature statistics are available:

* ``CKF`` -- cumulative Kolmogorov filter, the average over every
  dichotomisation of the feature of the KS distance between the two
  conditional response distributions.
* ``KF_BINARY`` -- the same KS distance for the single split at the median.
* ``FKF`` -- fused Kolmogorov filter: the response is cut into G quantile
  slices, the largest pairwise KS distance between the feature samples of
  the slices is taken, and this is averaged over several slicings.
* ``SIS`` -- absolute Pearson correlation.
* ``DCS`` -- squared sample distance correlation.

The three Kolmogorov statistics depend on ranks only.  Feature indices are
0-based throughout.
"""
from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from . import _kernels
from .core_stats import as_finite_vector, paired_vectors
from .errors import (
    DegenerateInputError,
    DegenerateSliceError,
    DegenerateSplitError,
    InvalidInputError,
)


class Method(str, enum.Enum):
    CKF = "ckf"
    KF_BINARY = "kf"
    FKF = "fkf"
    SIS = "sis"
    DCS = "dcs"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for m in cls:
            if key in (m.value, m.name.lower()):
                return m
        raise InvalidInputError(
            f"unknown method {value!r}; choose from {', '.join(m.value for m in cls)}"
        )


@dataclass
class Dataset:
    """An n x p covariate matrix with its length-n response."""

    x: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    response_name: str = "y"

    def __post_init__(self):
        x = np.asfortranarray(self.x, dtype=np.float64)
        if x.ndim != 2:
            raise InvalidInputError(f"x must be a matrix, got shape {x.shape}")
        y = as_finite_vector(self.y, "y")
        if x.shape[0] != y.shape[0]:
            raise InvalidInputError(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("x contains non-finite entries")
        if self.feature_names is None:
            self.feature_names = [f"x{j + 1}" for j in range(x.shape[1])]
        elif len(self.feature_names) != x.shape[1]:
            raise InvalidInputError("feature_names length does not match the number of columns")
        self.x, self.y = x, y

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class KnotScheme:
    """Collection of slicings of the response.

    Each knot set lists the interior cut probabilities, strictly increasing
    inside (0, 1); the outer knots are -inf and +inf.
    """

    knot_sets: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.knot_sets:
            raise InvalidInputError("a knot scheme needs at least one knot set")
        for ks in self.knot_sets:
            validate_knots(ks)

    @classmethod
    def equally_spaced(cls, sizes: Sequence[int] = (3, 4, 5, 6)) -> "KnotScheme":
        """One knot set per slice count G, cut at probabilities g/G."""
        sets = []
        for G in sizes:
            if int(G) != G or G < 2:
                raise InvalidInputError(f"slice count must be an integer >= 2, got {G}")
            sets.append(tuple(g / G for g in range(1, int(G))))
        return cls(tuple(sets))

    @property
    def slice_counts(self) -> tuple[int, ...]:
        return tuple(len(ks) + 1 for ks in self.knot_sets)

    def describe(self) -> str:
        return "knots=" + ";".join(",".join(repr(p) for p in ks) for ks in self.knot_sets)


def validate_knots(knots) -> np.ndarray:
    probs = np.asarray(knots, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise InvalidInputError("a knot set needs at least one interior probability")
    if not np.all((probs > 0) & (probs < 1)):
        raise InvalidInputError(f"knot probabilities must lie strictly inside (0, 1): {knots}")
    if np.any(np.diff(probs) <= 0):
        raise InvalidInputError(f"knot probabilities must be strictly increasing: {knots}")
    return probs


DEFAULT_SCHEME = KnotScheme.equally_spaced((3, 4, 5, 6))


def quantile_positions(n: int, probs) -> np.ndarray:
    """0-based order-statistic positions of the type-1 (inverse ECDF) quantiles."""
    # round away representation noise so that n * (1/3) * 3 lands on an integer
    return np.array([max(math.ceil(round(n * p, 9)), 1) - 1 for p in probs], dtype=np.int64)


def _y_ranks(y):
    return _kernels.dense_rank(y)


def ckf_stat(xj, y) -> float:
    """Average of the split-at-X_ij KS distances over all n observations.

    Tied observations share their split's value; the maximum of ``xj``
    contributes 0 because its upper group is empty.
    """
    xj, y = paired_vectors(xj, y)
    return float(_kernels.ckf_single(xj, *_y_ranks(y)))


def kf_binary_stat(xj, y) -> float:
    """KS distance of y between ``xj <= median`` and ``xj > median``.

    For even n the lower of the two middle order statistics is the median.
    """
    xj, y = paired_vectors(xj, y)
    value = _kernels.binary_single(xj, *_y_ranks(y))
    if math.isnan(value):
        raise DegenerateSplitError("median split leaves the upper group empty")
    return float(value)


def fkf_slice_stat(xj, y, knots) -> float:
    xj, y = paired_vectors(xj, y)
    probs = validate_knots(knots)
    labels, sizes = _kernels.slice_labels(y, quantile_positions(y.shape[0], probs))
    if np.any(sizes == 0):
        raise DegenerateSliceError(f"empty response slice for knots {tuple(probs)}", knots=tuple(probs))
    return float(_kernels.slice_single(xj, labels, sizes))


def fkf_fused_stat(xj, y, scheme: KnotScheme | None = None) -> float:
    """Sum of the sliced statistics over every knot set of ``scheme``.

    ``screen_all`` reports the mean instead, which ranks identically.
    """
    scheme = DEFAULT_SCHEME if scheme is None else scheme
    return float(sum(fkf_slice_stat(xj, y, ks) for ks in scheme.knot_sets))


def sis_stat(xj, y) -> float:
    xj, y = paired_vectors(xj, y)
    xc = xj - xj.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(xc @ xc))
    sy = math.sqrt(float(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("Pearson correlation is undefined for a constant vector")
    return min(abs(float(xc @ yc)) / (sx * sy), 1.0)


def dcor_stat(xj, y) -> float:
    """Squared sample distance correlation ``dCov^2(x, y) / sqrt(dVar^2(x) dVar^2(y))``.

    Defined as 0 when either distance variance vanishes.
    """
    xj, y = paired_vectors(xj, y)
    bc = _kernels.centered_distances(y)
    return float(_kernels.dcor_single(xj, bc, _kernels.mean_square(bc)))


@dataclass
class FeatureScores:
    method: Method
    scores: np.ndarray
    config_digest: str = ""
    warnings: list[str] = field(default_factory=list)

    def __len__(self):
        return self.scores.shape[0]

    def ranking(self) -> np.ndarray:
        """Feature indices from largest to smallest score, ties by lower index."""
        return np.argsort(-self.scores, kind="stable")


@dataclass(frozen=True)
class SelectedSet:
    indices: tuple[int, ...]
    d_n: int

    def __contains__(self, j):
        return j in self.indices

    def __len__(self):
        return len(self.indices)


@contextlib.contextmanager
def thread_limit(threads: int | None):
    """Temporarily cap the number of compiled-kernel threads."""
    if threads is None:
        yield
        return
    if threads < 1:
        raise InvalidInputError(f"thread count must be positive, got {threads}")
    previous = numba.get_num_threads()
    numba.set_num_threads(min(int(threads), numba.config.NUMBA_NUM_THREADS))
    try:
        yield
    finally:
        numba.set_num_threads(previous)


def _zero_degenerate(values, warnings, reason):
    bad = np.flatnonzero(np.isnan(values))
    for j in bad:
        warnings.append(f"feature {j}: {reason}; scored 0")
    values[bad] = 0.0
    return values


def screen_all(
    data: Dataset,
    method="ckf",
    knots: KnotScheme | None = None,
    threads: int | None = None,
) -> FeatureScores:
    """Score every column of ``data`` with one screening statistic.

    Columns for which the statistic is undefined score 0 and are listed in
    ``FeatureScores.warnings``.  Results are identical to calling the
    per-feature function column by column, for any ``threads``.
    """
    method = Method.parse(method)
    x, y = data.x, data.y
    if data.n < 2:
        raise InvalidInputError("screening needs at least two observations")
    warnings: list[str] = []
    digest = method.value
    with thread_limit(threads):
        if method is Method.CKF:
            scores = _kernels.ckf_columns(x, *_y_ranks(y))
        elif method is Method.KF_BINARY:
            scores = _zero_degenerate(
                _kernels.binary_columns(x, *_y_ranks(y)), warnings, "median split is degenerate"
            )
        elif method is Method.FKF:
            scheme = DEFAULT_SCHEME if knots is None else knots
            digest = f"fkf fusion=mean {scheme.describe()}"
            total = np.zeros(data.p)
            for ks in scheme.knot_sets:
                labels, sizes = _kernels.slice_labels(y, quantile_positions(data.n, ks))
                if np.any(sizes == 0):
                    warnings.append(f"knot set {ks}: empty response slice; term scored 0")
                    continue
                total += _kernels.slice_columns(x, labels, sizes)
            scores = total / len(scheme.knot_sets)
        elif method is Method.SIS:
            scores = _sis_columns(x, y, warnings)
        else:
            bc = _kernels.centered_distances(y)
            scores = _kernels.dcor_columns(x, bc, _kernels.mean_square(bc))
    return FeatureScores(method, np.asarray(scores, dtype=np.float64), digest, warnings)


def _sis_columns(x, y, warnings):
    yc = y - y.mean()
    sy = math.sqrt(float(yc @ yc))
    if sy == 0.0:
        warnings.append("response is constant; every feature scored 0")
        return np.zeros(x.shape[1])
    out = np.empty(x.shape[1])
    for j in range(x.shape[1]):
        xc = x[:, j] - x[:, j].mean()
        sx = math.sqrt(float(xc @ xc))
        if sx == 0.0:
            warnings.append(f"feature {j}: constant column; scored 0")
            out[j] = 0.0
        else:
            out[j] = min(abs(float(xc @ yc)) / (sx * sy), 1.0)
    return out


def select_top(scores: FeatureScores | np.ndarray, d_n: int) -> SelectedSet:
    """Indices of the ``d_n`` largest scores; ties go to the lower index."""
    values = scores.scores if isinstance(scores, FeatureScores) else np.asarray(scores, dtype=float)
    p = values.shape[0]
    if int(d_n) != d_n or not 1 <= d_n <= p:
        raise InvalidInputError(f"d_n must be an integer in [1, {p}], got {d_n}")
    order = np.argsort(-values, kind="stable")[: int(d_n)]
    return SelectedSet(tuple(sorted(int(j) for j in order)), int(d_n))
