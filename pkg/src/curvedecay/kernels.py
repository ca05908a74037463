"""Backend selection for the phase-sum kernel.

The compiled extension is used when it imported cleanly; otherwise a chunked
numpy implementation with identical semantics takes over.  Set
CURVEDECAY_KERNEL=python or =compiled to force a backend (the benchmark
does this to compare the two).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from . import _frkernel
    HAVE_COMPILED = True
except ImportError:
    _frkernel = None
    HAVE_COMPILED = False

# chunk sizes are fixed so results do not depend on machine or worker count
_OMEGA_CHUNK = 2048
_PT_CHUNK = 8192


def active_backend() -> str:
    forced = os.environ.get("CURVEDECAY_KERNEL", "").strip().lower()
    if forced == "python":
        return "python"
    if forced == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but not built")
        return "compiled"
    return "compiled" if HAVE_COMPILED else "python"


def _phase_sum_numpy(pts, coef, omegas, scale):
    nw = omegas.shape[0]
    out = np.zeros(nw, dtype=np.complex128)
    for j0 in range(0, nw, _OMEGA_CHUNK):
        block = omegas[j0:j0 + _OMEGA_CHUNK]
        acc_re = np.zeros(block.shape[0])
        acc_im = np.zeros(block.shape[0])
        for i0 in range(0, pts.shape[0], _PT_CHUNK):
            ph = (pts[i0:i0 + _PT_CHUNK] @ block.T)
            ph *= scale
            c = coef[i0:i0 + _PT_CHUNK]
            acc_re += c @ np.cos(ph)
            acc_im += c @ np.sin(ph)
        out[j0:j0 + _OMEGA_CHUNK] = acc_re + 1j * acc_im
    return out


def phase_sum(pts, coef, omegas, scale, backend: str | None = None,
              workers: int = 1) -> np.ndarray:
    """out[j] = sum_i coef[i] exp(1j * scale * <pts[i], omegas[j]>).

    Results are identical for any worker count: the omega axis is split at
    fixed chunk boundaries and each chunk is computed independently.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    omegas = np.ascontiguousarray(np.atleast_2d(omegas), dtype=np.float64)
    be = backend or active_backend()
    fn = _frkernel.phase_sum if be == "compiled" else _phase_sum_numpy

    if workers <= 1 or omegas.shape[0] <= _OMEGA_CHUNK:
        return np.asarray(fn(pts, coef, omegas, float(scale)))

    chunks = [(j0, omegas[j0:j0 + _OMEGA_CHUNK])
              for j0 in range(0, omegas.shape[0], _OMEGA_CHUNK)]
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [(j0, pool.submit(fn, pts, coef, blk, float(scale)))
                for j0, blk in chunks]
        for j0, fut in futs:
            res = np.asarray(fut.result())
            out[j0:j0 + res.size] = res
    return out
