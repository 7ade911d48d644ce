"""Dense difference-count tables via fast transforms over the full group.

The count r(t) = #{(a, b) in A^2 : a - b = t} is the autocorrelation of the
indicator vector of A.  For F2n the Walsh-Hadamard transform keeps every
intermediate an integer, so the result is exact by construction.  For Zmod
and Fpn we use the complex FFT and round: the true values are integers, so a
residual below 1/4 certifies the rounding (and is asserted).

Only groups of order <= DENSE_MAX_ORDER are eligible; the quadratic
pairwise path in sets.py remains the always-available reference.
"""

from __future__ import annotations

import numpy as np

from .groups import F2n, Fpn, Group, Zmod

DENSE_MAX_ORDER = 1 << 24

_FFT_RESIDUAL_LIMIT = 0.25


class TransformError(RuntimeError):
    """Dense path unavailable or failed its exactness certificate."""


def dense_eligible(group: Group) -> bool:
    return group.is_finite and group.order <= DENSE_MAX_ORDER


def wht_inplace(v: np.ndarray) -> None:
    """Unnormalized Walsh-Hadamard transform over axis 0, length a power of 2."""
    n = len(v)
    h = 1
    while h < n:
        v2 = v.reshape(-1, 2 * h)
        left = v2[:, :h].copy()
        right = v2[:, h:].copy()
        v2[:, :h] = left + right
        v2[:, h:] = left - right
        h *= 2


def _indicator(group: Group, elements) -> np.ndarray:
    vec = np.zeros(group.order, dtype=np.int64)
    idx = [group.index(a) for a in elements]
    vec[np.asarray(idx, dtype=np.int64)] = 1
    return vec


def autocorrelation(group: Group, elements) -> np.ndarray:
    """r(t) for every t, indexed by group.index(t).  Exact integers."""
    if not dense_eligible(group):
        raise TransformError(f"group {group} not eligible for the dense path")
    if isinstance(group, F2n):
        return _autocorrelation_f2n(group, elements)
    if isinstance(group, Zmod):
        return _autocorrelation_fft(_indicator(group, elements))
    if isinstance(group, Fpn):
        vec = _indicator(group, elements).reshape((group.p,) * group.n)
        return _autocorrelation_fft(vec).reshape(-1)
    raise TransformError(f"no dense path for group {group}")


def _autocorrelation_f2n(group: F2n, elements) -> np.ndarray:
    # Every intermediate of the unnormalized transform is a signed subset sum
    # of the squared spectrum, bounded by order * |A| <= 2^48, so int64 is
    # exact throughout.
    vec = _indicator(group, elements)
    wht_inplace(vec)
    np.multiply(vec, vec, out=vec)
    wht_inplace(vec)
    # In characteristic 2 the spectrum is a perfect square, so the inverse
    # transform is divisible by the order; anything else is a bug.
    if np.any(vec & (group.order - 1)):
        raise TransformError("Walsh-Hadamard inverse not divisible by group order")
    return vec >> group.n


def _autocorrelation_fft(vec: np.ndarray) -> np.ndarray:
    spectrum = np.fft.fftn(vec.astype(np.float64))
    corr = np.fft.ifftn(spectrum * np.conj(spectrum))
    rounded = np.rint(corr.real)
    residual = np.max(np.abs(corr.real - rounded)) if corr.size else 0.0
    if residual >= _FFT_RESIDUAL_LIMIT or np.max(np.abs(corr.imag), initial=0.0) >= _FFT_RESIDUAL_LIMIT:
        raise TransformError(f"FFT residual {residual:.3g} too large to certify exactness")
    return rounded.astype(np.int64)


def index_array(group: Group, elements) -> np.ndarray:
    """Sorted dense indices of a collection of elements."""
    idx = np.fromiter((group.index(a) for a in elements), dtype=np.int64, count=len(elements))
    idx.sort()
    return idx
