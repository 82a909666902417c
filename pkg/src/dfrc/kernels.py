"""Hot loops of the delayed-feedback recursion.

Two interchangeable implementations per node kind:

* ``numba``: a flat per-slot loop compiled with ``@njit``.
* ``numpy``: one τ period at a time; everything that depends only on the
  previous period is vectorized, and only the within-period chain through
  ``s_prev`` runs as a scalar loop (and not at all where the node ignores it).

``DFRC_BACKEND=numpy`` forces the fallback; otherwise numba is used when it
imports. Both evaluate the node expressions in the order used by
:mod:`dfrc.nodes`, so they agree bit for bit with each other and with a
scalar recursion over the step functions.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    requested = os.environ.get("DFRC_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested not in BACKENDS:
        raise ValueError(f"DFRC_BACKEND must be one of {BACKENDS}, got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        raise ImportError("DFRC_BACKEND=numba but numba is not importable")
    return requested


BACKEND = default_backend()


# -- numba -------------------------------------------------------------------

@njit(cache=True)
def _mr_loop_numba(u, n, charge, decay, gamma, undamped_rise, tail_prev):
    s = np.empty(u.size)
    for j in range(u.size):
        fb = s[j - n] if j >= n else 0.0
        prev = s[j - 1] if j >= 1 else 0.0
        charged = (u[j] + gamma * fb) * charge
        tail = prev if tail_prev else fb
        if undamped_rise and u[j] >= prev:
            s[j] = charged + tail
        else:
            s[j] = charged + tail * decay
    return s


@njit(cache=True)
def _mg_loop_numba(u, n, eta, gamma_in, p, h):
    s = np.empty(u.size)
    for j in range(u.size):
        fb = s[j - n] if j >= n else 0.0
        prev = s[j - 1] if j >= 1 else 0.0
        z = fb + gamma_in * u[j]
        drive = eta * z / (1.0 + abs(z) ** p)
        s[j] = prev + h * (drive - prev)
    return s


@njit(cache=True)
def _mzi_loop_numba(u, n, phase_bias, gain, gamma):
    s = np.empty(u.size)
    for j in range(u.size):
        fb = s[j - n] if j >= n else 0.0
        x = math.sin(u[j] + gamma * fb + phase_bias)
        s[j] = gain * (x * x)
    return s


# -- numpy fallback ----------------------------------------------------------

def _mr_loop_numpy(u, n, charge, decay, gamma, undamped_rise, tail_prev):
    rows = u.reshape(-1, n)
    out = np.empty_like(rows)
    fb = np.zeros(n)
    prev = 0.0
    for k in range(rows.shape[0]):
        uk = rows[k]
        charged = (uk + gamma * fb) * charge
        if not tail_prev and not undamped_rise:
            row = charged + fb * decay
            prev = row[-1]
        else:
            c = charged.tolist()
            drive = uk.tolist()
            tails = fb.tolist()
            vals = [0.0] * n
            for i in range(n):
                tail = prev if tail_prev else tails[i]
                if undamped_rise and drive[i] >= prev:
                    prev = c[i] + tail
                else:
                    prev = c[i] + tail * decay
                vals[i] = prev
            row = np.array(vals)
        out[k] = row
        fb = row
    return out.ravel()


def _mg_loop_numpy(u, n, eta, gamma_in, p, h):
    # The drive is evaluated per element with Python's pow: numpy's vectorized
    # power can differ from libm in the last bit for non-integer exponents.
    rows = u.reshape(-1, n)
    out = np.empty_like(rows)
    fb = [0.0] * n
    prev = 0.0
    for k in range(rows.shape[0]):
        z = (np.asarray(fb) + gamma_in * rows[k]).tolist()
        row = [0.0] * n
        for i in range(n):
            zi = z[i]
            prev = prev + h * (eta * zi / (1.0 + abs(zi) ** p) - prev)
            row[i] = prev
        fb = row
        out[k] = row
    return out.ravel()


def _mzi_loop_numpy(u, n, phase_bias, gain, gamma):
    rows = u.reshape(-1, n)
    out = np.empty_like(rows)
    fb = np.zeros(n)
    for k in range(rows.shape[0]):
        x = np.sin(rows[k] + gamma * fb + phase_bias)
        fb = gain * (x * x)
        out[k] = fb
    return out.ravel()


_KERNELS = {
    ("silicon_mr", "numba"): _mr_loop_numba,
    ("silicon_mr", "numpy"): _mr_loop_numpy,
    ("mackey_glass", "numba"): _mg_loop_numba,
    ("mackey_glass", "numpy"): _mg_loop_numpy,
    ("mzi", "numba"): _mzi_loop_numba,
    ("mzi", "numpy"): _mzi_loop_numpy,
}


def get_kernel(kind: str, backend: str | None = None):
    """Return the flat-stream loop for a node kind.

    Every kernel has signature ``kernel(u, n_virtual, *scalars) -> s`` with
    ``u`` and ``s`` contiguous float64 arrays of equal length.
    """
    backend = backend or BACKEND
    if backend == "numba" and not HAVE_NUMBA:
        raise ImportError("numba backend requested but numba is not importable")
    try:
        return _KERNELS[(kind, backend)]
    except KeyError:
        raise ValueError(f"no kernel for node kind {kind!r} on backend {backend!r}") from None
