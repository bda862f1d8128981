"""State-comparison and phase-space metrics: overlap fidelity, Wigner
functions (closed-form and numeric), ladder-operator moments, quadrature
variances and squeezing.

Wigner convention: W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag] with P the
photon-number parity operator, normalized so that the integral over the
complex beta plane is one and |W| <= 2/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels
from .cascade import QuditState, qudit_to_fock
from .errors import ConventionMismatchError
from .fock import DensityMatrix, FockVector, default_cutoff


def _as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, FockVector):
        return state.to_density()
    raise TypeError(f"expected FockVector or DensityMatrix, got {type(state).__name__}")


def fidelity(state_a, state_b) -> float:
    """Overlap fidelity Tr(rho_a rho_b); |<a|b>|^2 when both are pure.

    Exactly symmetric in its arguments.  Both operands must share a cutoff
    and be trace-one for the value to be meaningful as a fidelity.
    """
    if isinstance(state_a, FockVector) and isinstance(state_b, FockVector):
        if state_a.amps.size != state_b.amps.size:
            raise ValueError("cutoff mismatch")
        return float(abs(np.vdot(state_a.amps, state_b.amps)) ** 2)
    rho_a = _as_density(state_a)
    rho_b = _as_density(state_b)
    if rho_a.elements.shape != rho_b.elements.shape:
        raise ValueError("dimension mismatch")
    # hermiticity turns Tr(AB) into an elementwise real pairing
    return float(np.vdot(rho_b.elements, rho_a.elements).real)


def rotation_maximized_fidelity(target_amps, qudit_amps, refine_iters: int = 60):
    """max over phi of |sum_p conj(B_p) A_p e^{i p phi}|^2.

    The number operator generates a free phase-space rotation that the
    cascade does not pin down; reporting the maximum over it compares
    states modulo that trivial operation.  Returns (fidelity, phi).
    """
    b = np.asarray(target_amps, dtype=np.complex128)
    a = np.asarray(qudit_amps, dtype=np.complex128)
    if b.size != a.size:
        raise ValueError("length mismatch")
    coeff = np.conj(b) * a
    p = np.arange(a.size)

    def val(phi):
        return float(np.abs(np.sum(coeff * np.exp(1j * p * phi))) ** 2)

    phis = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    vals = np.abs(np.exp(1j * np.outer(phis, p)) @ coeff) ** 2
    i = int(np.argmax(vals))
    lo, hi = phis[i] - 2 * np.pi / 4096, phis[i] + 2 * np.pi / 4096
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - golden * (hi - lo)
    x2 = lo + golden * (hi - lo)
    f1, f2 = val(x1), val(x2)
    for _ in range(refine_iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + golden * (hi - lo)
            f2 = val(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - golden * (hi - lo)
            f1 = val(x1)
    phi = (x1 + x2) / 2.0
    return val(phi), phi


# ---------------------------------------------------------------------------
# Wigner functions


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a rectangular grid of beta = x + i p.

    ``values[i, j]`` is W(xs[i] + 1j * ps[j]).
    """

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("xs", "ps", "values"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.values.shape != (self.xs.size, self.ps.size):
            raise ValueError("values shape must be (len(xs), len(ps))")

    def beta(self) -> np.ndarray:
        return self.xs[:, None] + 1j * self.ps[None, :]

    def integral(self) -> float:
        """Trapezoid integral over the sampled window."""
        return float(np.trapezoid(np.trapezoid(self.values, self.ps, axis=1), self.xs))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


def _betas_flat(xs, ps):
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    return xs, ps, (xs[:, None] + 1j * ps[None, :]).ravel()


def wigner_numeric(state, xs, ps) -> WignerGrid:
    """Numeric Wigner transform via displaced-parity expectation values.

    Accepts a pure state or a density matrix (evaluated through its
    eigendecomposition).  The state's cutoff must be generous enough that
    displaced overlaps at the grid edge are converged; see
    ``wigner_cutoff`` for a policy.
    """
    xs, ps, betas = _betas_flat(xs, ps)
    out = np.zeros(betas.size)
    if isinstance(state, FockVector):
        _kernels.wigner_overlap_grid(state.amps, betas, out)
    else:
        rho = _as_density(state)
        vals, vecs = np.linalg.eigh((rho.elements + rho.elements.conj().T) / 2.0)
        buf = np.zeros_like(out)
        for weight, vec in zip(vals, vecs.T):
            if weight < 1e-14:
                continue
            _kernels.wigner_overlap_grid(np.ascontiguousarray(vec), betas, buf)
            out += weight * buf
    return WignerGrid(xs, ps, out.reshape(xs.size, ps.size))


def wigner_closed_form(qudit: QuditState, xs, ps, validate: bool = False, tol: float = 1e-8) -> WignerGrid:
    """Closed-form Wigner function of a displaced qudit.

    Evaluates the finite two-variable Hermite series
        W(beta) = (2/pi) e^{-|z|^2/2} Re sum_{p,q} conj(A_p) A_q
                  H_{p,q}(z, conj(z)) / sqrt(p! q!),   z = 2 (beta - d),
    with H generated by H[u,v] = x H[u-1,v] - v H[u-1,v-1], H[0,v] = y^v.

    With ``validate=True`` the grid is checked pointwise against
    ``wigner_numeric``; disagreement beyond ``tol`` raises
    ConventionMismatchError rather than returning silently wrong data.
    """
    xs, ps, betas = _betas_flat(xs, ps)
    out = np.zeros(betas.size)
    _kernels.wigner_closed_grid(qudit.amplitudes, complex(qudit.displacement), betas, out)
    grid = WignerGrid(xs, ps, out.reshape(xs.size, ps.size))
    if validate:
        cut = wigner_cutoff(qudit, betas)
        reference = wigner_numeric(qudit_to_fock(qudit, cut), xs, ps)
        diff = float(np.max(np.abs(grid.values - reference.values)))
        if diff > tol:
            raise ConventionMismatchError(
                f"closed-form Wigner deviates from numeric by {diff:.3e} (> {tol:.0e})"
            )
    return grid


def wigner_cutoff(qudit: QuditState, betas) -> int:
    """Cutoff large enough that displaced overlaps across the grid stay
    converged: policy cutoff for the largest |beta - d| plus the qudit
    dimension."""
    reach = float(np.max(np.abs(np.asarray(betas) - qudit.displacement)))
    return default_cutoff(abs(qudit.displacement) + reach) + qudit.l


# ---------------------------------------------------------------------------
# moments and quadratures


def moments(qudit: QuditState, t: int, s: int) -> complex:
    """<a^dag^t a^s> of the displaced qudit.

    Expands D^dag a D = a + d and reduces to qudit-frame ladder moments:
    sum_{u,v} C(t,u) C(s,v) conj(d)^{t-u} d^{s-v} <a^dag^u a^v>_qudit.
    Amplitude indices outside 0..l contribute zero.
    """
    if t < 0 or s < 0:
        raise ValueError("moment orders must be nonnegative")
    amps = qudit.amplitudes
    l = qudit.l
    d = complex(qudit.displacement)

    def frame_moment(u, v):
        acc = 0.0 + 0.0j
        for p in range(v, l + 1):
            q = p - v + u
            if q > l:
                continue
            acc += (
                amps[p]
                * np.conj(amps[q])
                * math.sqrt(math.factorial(p) * math.factorial(q))
                / math.factorial(p - v)
            )
        return acc

    total = 0.0 + 0.0j
    for u in range(t + 1):
        for v in range(s + 1):
            total += (
                comb(t, u)
                * comb(s, v)
                * np.conj(d) ** (t - u)
                * d ** (s - v)
                * frame_moment(u, v)
            )
    return complex(total)


@dataclass(frozen=True)
class MomentTable:
    """<a^dag^t a^s> for t, s = 0..order."""

    values: np.ndarray

    @property
    def order(self) -> int:
        return self.values.shape[0] - 1

    def __getitem__(self, key):
        t, s = key
        return self.values[t, s]


def moment_table(qudit: QuditState, order: int = 4) -> MomentTable:
    vals = np.empty((order + 1, order + 1), np.complex128)
    for t in range(order + 1):
        for s in range(order + 1):
            vals[t, s] = moments(qudit, t, s)
    vals.setflags(write=False)
    return MomentTable(vals)


def quadrature_variances(qudit: QuditState) -> tuple[float, float]:
    """Variances of X = (a + a^dag)/sqrt(2) and P = (a - a^dag)/(i sqrt(2)).

    Both are invariant under the qudit's displacement parameter.
    """
    mean_a = moments(qudit, 0, 1)
    mean_a2 = moments(qudit, 0, 2)
    mean_n = moments(qudit, 1, 1).real
    var_x = 0.5 + mean_n + mean_a2.real - 2.0 * mean_a.real**2
    var_p = 0.5 + mean_n - mean_a2.real - 2.0 * mean_a.imag**2
    return float(var_x), float(var_p)


def is_squeezed(var_x: float, var_p: float) -> bool:
    return min(var_x, var_p) < 0.5


def squeezing_db(variance: float) -> float:
    """Squeezing below vacuum in decibels, 10 log10(0.5 / var); positive
    for variances under one half (0.3750 -> 1.25 dB)."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    return 10.0 * math.log10(0.5 / variance)
