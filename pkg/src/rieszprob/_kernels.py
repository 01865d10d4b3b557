"""Float64 hot loops, with a numba path and a pure-numpy fallback.

The backend is picked once at import time from ``RIESZPROB_BACKEND``
(``numba`` or ``numpy``).  When the variable is unset numba is used if it
imports cleanly.  Both implementations stay importable under
``NUMBA_IMPL`` / ``NUMPY_IMPL`` so tests and the benchmark can compare them.

Only the approximate scalar regime goes through here; exact rationals live
in object arrays and never touch these kernels.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _pick_backend() -> str:
    requested = os.environ.get("RIESZPROB_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested not in ("numba", "numpy"):
        raise ImportError(f"RIESZPROB_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        raise ImportError("RIESZPROB_BACKEND=numba but numba is not installed")
    return requested


BACKEND = _pick_backend()


# -- numpy ------------------------------------------------------------------


def _block_average_numpy(values, weights, block_of, n_blocks):
    num = np.bincount(block_of, weights=values * weights, minlength=n_blocks)
    den = np.bincount(block_of, weights=weights, minlength=n_blocks)
    return (num / den)[block_of]


def _log_binomial_pmf_numpy(n, p):
    j = np.arange(n + 1, dtype=np.float64)
    log_comb = gammaln(n + 1.0) - gammaln(j + 1.0) - gammaln(n - j + 1.0)
    # xlogy(0, 0) == 0 handles the degenerate p in {0, 1} rows
    return log_comb + xlogy(j, p) + xlog1py(n - j, -p)


def _repeated_power_numpy(base, n):
    out = np.ones_like(base)
    for _ in range(n):
        out = out * base
    return out


# -- numba ------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _block_average_numba(values, weights, block_of, n_blocks):
        num = np.zeros(n_blocks)
        den = np.zeros(n_blocks)
        for i in range(values.shape[0]):
            b = block_of[i]
            num[b] += values[i] * weights[i]
            den[b] += weights[i]
        out = np.empty(values.shape[0])
        for i in range(values.shape[0]):
            b = block_of[i]
            out[i] = num[b] / den[b]
        return out

    @numba.njit(cache=True)
    def _log_binomial_pmf_numba(n, p):
        out = np.empty(n + 1)
        lg_n = math.lgamma(n + 1.0)
        for j in range(n + 1):
            v = lg_n - math.lgamma(j + 1.0) - math.lgamma(n - j + 1.0)
            if j > 0:
                v += j * math.log(p) if p > 0.0 else -np.inf
            if j < n:
                v += (n - j) * math.log1p(-p) if p < 1.0 else -np.inf
            out[j] = v
        return out

    @numba.njit(cache=True)
    def _repeated_power_numba(base, n):
        out = np.ones(base.shape[0])
        for _ in range(n):
            for i in range(base.shape[0]):
                out[i] *= base[i]
        return out

    NUMBA_IMPL = {
        "block_average": _block_average_numba,
        "log_binomial_pmf": _log_binomial_pmf_numba,
        "repeated_power": _repeated_power_numba,
    }
else:  # pragma: no cover
    NUMBA_IMPL = {}

NUMPY_IMPL = {
    "block_average": _block_average_numpy,
    "log_binomial_pmf": _log_binomial_pmf_numpy,
    "repeated_power": _repeated_power_numpy,
}

_ACTIVE = NUMBA_IMPL if BACKEND == "numba" else NUMPY_IMPL


def block_average(values: np.ndarray, weights: np.ndarray, block_of: np.ndarray, n_blocks: int) -> np.ndarray:
    """Weighted mean of ``values`` over each block, broadcast back to atoms."""
    return _ACTIVE["block_average"](
        np.ascontiguousarray(values, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(block_of, dtype=np.int64),
        int(n_blocks),
    )


def log_binomial_pmf(n: int, p: float) -> np.ndarray:
    """``log C(n,j) p^j (1-p)^(n-j)`` for ``j = 0..n``; ``-inf`` where the mass is zero."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {p}")
    return _ACTIVE["log_binomial_pmf"](int(n), float(p))


def repeated_power(base: np.ndarray, n: int) -> np.ndarray:
    """``base**n`` by ``n`` successive componentwise multiplications."""
    return _ACTIVE["repeated_power"](np.ascontiguousarray(base, dtype=np.float64), int(n))
