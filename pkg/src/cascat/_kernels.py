"""Hot numeric kernels: closed-form qudit amplitudes, parameter scans and
phase-space grids.

Every kernel exists in two flavours: a loop-style implementation compiled
with numba (default when numba imports cleanly) and a pure-numpy fallback.
Set ``CASCAT_DISABLE_NUMBA=1`` in the environment to force the numpy path;
``BACKEND`` records which one is active.  ``benchmarks/bench_kernels.py``
times the two against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

_MAX_STAGES = 32


def _build_stirling2(nmax: int) -> np.ndarray:
    s = np.zeros((nmax + 1, nmax + 1))
    s[0, 0] = 1.0
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            s[n, k] = k * s[n - 1, k] + s[n - 1, k - 1]
    return s


def _build_binom(nmax: int) -> np.ndarray:
    b = np.zeros((nmax + 1, nmax + 1))
    b[:, 0] = 1.0
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            b[n, k] = b[n - 1, k - 1] + b[n - 1, k]
    return b


STIRLING2 = _build_stirling2(_MAX_STAGES)
BINOM = _build_binom(_MAX_STAGES)
_SQRT_FACT = np.sqrt(np.cumprod(np.concatenate([[1.0], np.arange(1.0, _MAX_STAGES + 1)])))


# ---------------------------------------------------------------------------
# loop-style sources (numba-compilable)


def _qudit_ctilde_src(alpha, refl):
    """Unnormalized displaced-frame amplitudes of the heralded cascade output.

    Returns ``(ctilde, sp)`` where ``sp = sum |ctilde_p|^2`` is the heralding
    probability.  ``sp = -1`` flags a degenerate configuration (alpha = 0 or
    a vanishing reflectivity product) that the caller must route elsewhere.
    """
    l = refl.shape[0]
    ctilde = np.zeros(l + 1, np.complex128)
    # coefficients of prod_i (R_i + (1-R_i) x)
    xc = np.zeros(l + 1)
    xc[0] = 1.0
    for i in range(l):
        r = refl[i]
        for m in range(i + 1, -1, -1):
            prev = xc[m - 1] if m > 0 else 0.0
            xc[m] = xc[m] * r + prev * (1.0 - r)
    x0 = xc[0]
    a2 = alpha.real * alpha.real + alpha.imag * alpha.imag
    if a2 == 0.0 or x0 < 1e-300:
        ctilde[0] = 1.0
        return ctilde, -1.0
    beta_conj = np.conj(alpha) * np.sqrt(x0)
    y = a2 * x0
    ypow = np.ones(l + 1)
    for k in range(1, l + 1):
        ypow[k] = ypow[k - 1] * y
    for p in range(l + 1):
        acc = 0.0
        sign = 1.0 if p % 2 == 0 else -1.0
        for m in range(p, l + 1):
            inner = 0.0
            for k in range(p, m + 1):
                inner += STIRLING2[m, k] * BINOM[k, p] * ypow[k]
            acc += sign * xc[m] * inner
            sign = -sign
        ctilde[p] = _SQRT_FACT[p] * beta_conj ** (-p) * acc
    pref = np.exp(-0.5 * a2 * (1.0 - x0)) / np.sqrt(x0)
    sp = 0.0
    for p in range(l + 1):
        ctilde[p] *= pref
        sp += ctilde[p].real * ctilde[p].real + ctilde[p].imag * ctilde[p].imag
    return ctilde, sp


def _pnd_mismatch_src(alpha, refl, target):
    """Squared-error between achieved and target |A_p|^2; -1 if degenerate."""
    ctilde, sp = _qudit_ctilde_src(alpha, refl)
    if sp <= 0.0:
        if alpha.real == 0.0 and alpha.imag == 0.0:
            # vacuum output: weights collapse onto p = 0
            err = (1.0 - target[0]) ** 2
            for p in range(1, target.shape[0]):
                err += target[p] * target[p]
            return err
        return -1.0
    err = 0.0
    for p in range(target.shape[0]):
        w = (ctilde[p].real ** 2 + ctilde[p].imag ** 2) / sp
        err += (w - target[p]) ** 2
    return err


def _scan_fill_src(alphas, rvals, l, start, out):
    """Fill ``out`` with scan rows [alpha, R_1..R_l, w_0..w_l, sp] for the
    row-major Cartesian cells start .. start+len(out)."""
    nr = rvals.shape[0]
    refl = np.empty(l)
    for row in range(out.shape[0]):
        code = start + row
        for i in range(l - 1, -1, -1):
            refl[i] = rvals[code % nr]
            code //= nr
        alpha = alphas[code]
        out[row, 0] = alpha
        for i in range(l):
            out[row, 1 + i] = refl[i]
        if alpha == 0.0:
            out[row, 1 + l] = 1.0
            for p in range(1, l + 1):
                out[row, 1 + l + p] = 0.0
            sp = 1.0
            for i in range(l):
                sp *= refl[i]
            out[row, 2 * l + 2] = sp
            continue
        ctilde, sp = _qudit_ctilde_src(alpha + 0.0j, refl)
        if sp <= 0.0:
            for p in range(l + 1):
                out[row, 1 + l + p] = 0.0
            out[row, 2 * l + 2] = -1.0
            continue
        for p in range(l + 1):
            out[row, 1 + l + p] = (ctilde[p].real ** 2 + ctilde[p].imag ** 2) / sp
        out[row, 2 * l + 2] = sp


def _wigner_closed_grid_src(amps, disp, betas, out):
    """W(beta) of D(disp) sum_p amps_p |p> via the two-variable Hermite
    recurrence H[u,v] = x H[u-1,v] - v H[u-1,v-1], H[0,v] = y^v."""
    l = amps.shape[0] - 1
    H = np.empty((l + 1, l + 1), np.complex128)
    two_over_pi = 2.0 / np.pi
    for i in range(betas.shape[0]):
        x = 2.0 * (betas[i] - disp)
        y = np.conj(x)
        for v in range(l + 1):
            H[0, v] = y ** v
        for u in range(1, l + 1):
            H[u, 0] = x * H[u - 1, 0]
            for v in range(1, l + 1):
                H[u, v] = x * H[u - 1, v] - v * H[u - 1, v - 1]
        acc = 0.0
        for p in range(l + 1):
            for q in range(l + 1):
                z = np.conj(amps[p]) * amps[q] * H[p, q]
                acc += z.real / (_SQRT_FACT[p] * _SQRT_FACT[q])
        out[i] = two_over_pi * math.exp(-0.5 * (x.real * x.real + x.imag * x.imag)) * acc


def _wigner_overlap_grid_src(psi, betas, out):
    """W(beta) = (2/pi) sum_n (-1)^n |<n|D(-beta)|psi>|^2 for a pure state.

    Columns of D(-beta) follow the ladder recurrence
    D|m+1> = (a^dag D|m> - conj(gamma) D|m>)/sqrt(m+1), gamma = -beta.
    """
    dim = psi.shape[0]
    col = np.empty(dim, np.complex128)
    nxt = np.empty(dim, np.complex128)
    phi = np.empty(dim, np.complex128)
    sqrtn = np.sqrt(np.arange(dim))
    for i in range(betas.shape[0]):
        gamma = -betas[i]
        gc = np.conj(gamma)
        mag2 = gamma.real * gamma.real + gamma.imag * gamma.imag
        col[0] = math.exp(-0.5 * mag2)
        for k in range(1, dim):
            col[k] = col[k - 1] * gamma / sqrtn[k]
        for k in range(dim):
            phi[k] = psi[0] * col[k]
        for m in range(dim - 1):
            s = 1.0 / sqrtn[m + 1]
            nxt[0] = -gc * col[0] * s
            for k in range(1, dim):
                nxt[k] = (sqrtn[k] * col[k - 1] - gc * col[k]) * s
            for k in range(dim):
                col[k] = nxt[k]
                phi[k] += psi[m + 1] * col[k]
        acc = 0.0
        sign = 1.0
        for k in range(dim):
            acc += sign * (phi[k].real ** 2 + phi[k].imag ** 2)
            sign = -sign
        out[i] = (2.0 / np.pi) * acc


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks for the grid kernels


def _wigner_closed_grid_np(amps, disp, betas, out):
    l = amps.shape[0] - 1
    x = 2.0 * (betas - disp)
    y = np.conj(x)
    H = np.empty((l + 1, l + 1, betas.shape[0]), np.complex128)
    H[0, 0] = 1.0
    for v in range(1, l + 1):
        H[0, v] = H[0, v - 1] * y
    for u in range(1, l + 1):
        H[u, 0] = x * H[u - 1, 0]
        for v in range(1, l + 1):
            H[u, v] = x * H[u - 1, v] - v * H[u - 1, v - 1]
    w = np.conj(amps)[:, None] * amps[None, :] / np.outer(_SQRT_FACT[: l + 1], _SQRT_FACT[: l + 1])
    acc = np.einsum("pq,pqi->i", w, H).real
    out[:] = (2.0 / np.pi) * np.exp(-0.5 * np.abs(x) ** 2) * acc


def _wigner_overlap_grid_np(psi, betas, out):
    dim = psi.shape[0]
    npts = betas.shape[0]
    gamma = -betas
    sqrtn = np.sqrt(np.arange(dim))
    col = np.empty((npts, dim), np.complex128)
    col[:, 0] = np.exp(-0.5 * np.abs(gamma) ** 2)
    for k in range(1, dim):
        col[:, k] = col[:, k - 1] * gamma / sqrtn[k]
    phi = psi[0] * col
    gc = np.conj(gamma)[:, None]
    for m in range(dim - 1):
        nxt = np.empty_like(col)
        nxt[:, 0] = -gc[:, 0] * col[:, 0]
        nxt[:, 1:] = sqrtn[1:] * col[:, :-1] - gc * col[:, 1:]
        col = nxt / sqrtn[m + 1]
        phi += psi[m + 1] * col
    parity = (-1.0) ** np.arange(dim)
    out[:] = (2.0 / np.pi) * (parity * np.abs(phi) ** 2).sum(axis=1)


# ---------------------------------------------------------------------------
# backend selection

_DISABLE = os.environ.get("CASCAT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

py_qudit_ctilde = _qudit_ctilde_src
py_pnd_mismatch = _pnd_mismatch_src
py_scan_fill = _scan_fill_src
py_wigner_closed_grid = _wigner_closed_grid_np
py_wigner_overlap_grid = _wigner_overlap_grid_np

jit_qudit_ctilde = None
jit_pnd_mismatch = None
jit_scan_fill = None
jit_wigner_closed_grid = None
jit_wigner_overlap_grid = None

if not _DISABLE:
    try:
        import numba

        jit_qudit_ctilde = numba.njit(cache=True)(_qudit_ctilde_src)
        jit_pnd_mismatch = numba.njit(cache=True)(_pnd_mismatch_src)
        jit_scan_fill = numba.njit(cache=True)(_scan_fill_src)
        jit_wigner_closed_grid = numba.njit(cache=True)(_wigner_closed_grid_src)
        jit_wigner_overlap_grid = numba.njit(cache=True)(_wigner_overlap_grid_src)
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - exercised via env flag instead
        BACKEND = "numpy"
else:
    BACKEND = "numpy"

if BACKEND == "numba":
    qudit_ctilde = jit_qudit_ctilde
    pnd_mismatch = jit_pnd_mismatch
    scan_fill = jit_scan_fill
    wigner_closed_grid = jit_wigner_closed_grid
    wigner_overlap_grid = jit_wigner_overlap_grid
else:
    qudit_ctilde = py_qudit_ctilde
    pnd_mismatch = py_pnd_mismatch
    scan_fill = py_scan_fill
    wigner_closed_grid = py_wigner_closed_grid
    wigner_overlap_grid = py_wigner_overlap_grid
