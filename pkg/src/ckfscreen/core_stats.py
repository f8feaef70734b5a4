"""Rank, empirical-CDF and two-sample Kolmogorov-Smirnov primitives.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import EmptyGroupError, InvalidInputError


def as_finite_vector(values, name="values", min_length=1) -> np.ndarray:
    """Validate and convert ``values`` to a contiguous 1-D float array."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise InvalidInputError(f"{name} needs at least {min_length} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def paired_vectors(x, y, min_length=2):
    x = as_finite_vector(x, "x", min_length)
    y = as_finite_vector(y, "y", min_length)
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError(f"length mismatch: x has {x.shape[0]} entries, y has {y.shape[0]}")
    return x, y


@dataclass(frozen=True)
class SortedSample:
    """Ascending copy of a sample and the original position of each entry.

    ``perm[k]`` is the (0-based) index in the input of ``values[k]``; ties
    keep their input order.
    """

    values: np.ndarray
    perm: np.ndarray

    def __len__(self):
        return self.values.shape[0]


def sort_sample(values) -> SortedSample:
    arr = as_finite_vector(values)
    perm = np.argsort(arr, kind="stable")
    return SortedSample(values=arr[perm], perm=perm)


def two_sample_ks(a, b) -> float:
    """Two-sample KS distance ``sup_y |F_a(y) - F_b(y)|``, exact.

    The supremum is taken over the pooled distinct values, which is where the
    step functions can change.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyGroupError("two_sample_ks needs two non-empty samples")
    a = as_finite_vector(a, "a")
    b = as_finite_vector(b, "b")
    grid = np.unique(np.concatenate([a, b]))
    ca = np.searchsorted(np.sort(a), grid, side="right")
    cb = np.searchsorted(np.sort(b), grid, side="right")
    return float(np.max(np.abs(ca / a.size - cb / b.size)))


class KsSweep(NamedTuple):
    """Result of :func:`ks_sweep`, one entry per distinct split value."""

    splits: np.ndarray
    values: np.ndarray
    counts: np.ndarray


def ks_sweep(x, y) -> KsSweep:
    """KS distance between ``y[x <= v]`` and ``y[x > v]`` for each distinct ``v`` of x.

    Splits are returned in ascending order together with the number of
    observations tied at each one.  At the largest split the upper group is
    empty and the value is 0.  Runs in O(n^2) after sorting.
    """
    x, y = paired_vectors(x, y)
    n = x.shape[0]
    yr, tot, m = _kernels.dense_rank(y)
    split_idx = np.empty(n, dtype=np.int64)
    vals = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    s = _kernels.ks_sweep_single(x, yr, tot, m, split_idx, vals, counts)
    xs = np.sort(x)
    return KsSweep(splits=xs[split_idx[:s]], values=vals[:s].copy(), counts=counts[:s].copy())


class EcdfDiffProfile(NamedTuple):
    """Response counts on either side of a split of x, per distinct response value.

    ``count_low[r]``/``count_high[r]`` count the observations whose response
    equals ``y_values[r]`` and whose x is ``<= split`` / ``> split``.
    Cumulative sums give the two unnormalised conditional ECDFs.
    """

    y_values: np.ndarray
    count_low: np.ndarray
    count_high: np.ndarray

    def ecdf_difference(self) -> np.ndarray:
        """``F(y | x > split) - F(y | x <= split)`` at each distinct y."""
        lo = np.cumsum(self.count_low)
        hi = np.cumsum(self.count_high)
        if lo[-1] == 0 or hi[-1] == 0:
            raise EmptyGroupError("one side of the split is empty")
        return hi / hi[-1] - lo / lo[-1]


def ecdf_profile(x, y, split: float) -> EcdfDiffProfile:
    x, y = paired_vectors(x, y, min_length=1)
    y_values, inverse = np.unique(y, return_inverse=True)
    low = x <= split
    count_low = np.bincount(inverse[low], minlength=y_values.size)
    count_high = np.bincount(inverse[~low], minlength=y_values.size)
    return EcdfDiffProfile(y_values, count_low, count_high)
