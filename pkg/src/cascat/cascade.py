"""Closed-form and brute-force construction of the cascaded catalysis output.

A coherent state is fed through ``l`` beam splitters, each performing one
single-photon catalysis stage.  The heralded output is a displaced qudit:
a displacement ``alpha * sqrt(X0)`` acting on an (l+1)-component Fock
superposition, where ``X_k`` are the coefficients of
``prod_i (R_i + (1 - R_i) x)``.

``closed_form_qudit`` evaluates the analytic amplitudes; ``oracle_cascade``
chains explicit two-mode beam-splitter unitaries and conditional
measurements.  The two are independent routes to the same state and the
test suite holds them to agreement at the 1e-9 level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DegenerateConfigurationError
from .fock import FockVector, apply_displacement, catalysis_step, coherent_state, default_cutoff

MAX_STAGES = _kernels._MAX_STAGES


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k), exact.

    Counts partitions of an n-element set into k nonempty blocks;
    S(n, k) = k S(n-1, k) + S(n-1, k-1).
    """
    if not (0 <= k <= n <= 64):
        raise ValueError(f"need 0 <= k <= n <= 64, got ({n}, {k})")
    if n == 0:
        return 1
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def touchard(n: int, y: complex) -> complex:
    """Touchard polynomial T_n(y) = sum_k S(n, k) y^k."""
    if not 0 <= n <= 64:
        raise ValueError(f"need 0 <= n <= 64, got {n}")
    return complex(sum(stirling2(n, k) * y**k for k in range(n + 1)))


@dataclass(frozen=True)
class CascadeConfig:
    """Experiment description: input coherent amplitude plus the ordered
    beam-splitter reflectivities."""

    alpha: complex
    reflectivities: tuple

    def __post_init__(self):
        rs = tuple(float(r) for r in self.reflectivities)
        if not 1 <= len(rs) <= MAX_STAGES:
            raise ValueError(f"need 1 <= stages <= {MAX_STAGES}, got {len(rs)}")
        for r in rs:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"reflectivity {r} outside [0, 1]")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "reflectivities", rs)

    @property
    def l(self) -> int:
        return len(self.reflectivities)


@dataclass(frozen=True)
class ReflectivityPolynomial:
    """Coefficients X_0..X_l of prod_i (R_i + (1 - R_i) x)."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coefficients, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def x0(self) -> float:
        return float(self.coefficients[0])


def reflectivity_coeffs(config: CascadeConfig) -> ReflectivityPolynomial:
    c = np.array([1.0])
    for r in config.reflectivities:
        c = np.convolve(c, [r, 1.0 - r])
    return ReflectivityPolynomial(c)


@dataclass(frozen=True)
class QuditState:
    """Closed-form cascade output: D(displacement) sum_p amplitudes[p] |p>.

    ``amplitudes`` has unit 2-norm with the first nonzero entry made
    real-positive (fidelities are phase blind); ``success_probability`` is
    the probability that every stage heralds exactly one photon.
    """

    displacement: complex
    amplitudes: np.ndarray
    success_probability: float

    def __post_init__(self):
        a = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def l(self) -> int:
        return self.amplitudes.size - 1

    def weights(self) -> np.ndarray:
        """|A_p|^2, the qudit-frame photon-number weights."""
        return np.abs(self.amplitudes) ** 2


def _canonical_phase(amps: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(amps) > 1e-14)
    if nz.size == 0:
        return amps
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


def closed_form_qudit(config: CascadeConfig) -> QuditState:
    """Analytic displaced-qudit output of the cascade.

    Raises DegenerateConfigurationError when alpha = 0 or the reflectivity
    product vanishes (the amplitude series divides by both); use
    ``oracle_cascade`` for those configurations.
    """
    refl = np.asarray(config.reflectivities, dtype=float)
    ctilde, sp = _kernels.qudit_ctilde(complex(config.alpha), refl)
    if sp <= 0.0:
        raise DegenerateConfigurationError(
            "closed form undefined for alpha = 0 or prod(R) = 0"
        )
    x0 = float(np.prod(refl))
    amps = _canonical_phase(ctilde / math.sqrt(sp))
    return QuditState(
        displacement=config.alpha * math.sqrt(x0),
        amplitudes=amps,
        success_probability=float(sp),
    )


def oracle_cascade(config: CascadeConfig, cutoff: int | None = None) -> tuple[FockVector, float]:
    """Brute-force cascade: chain explicit catalysis stages starting from
    the truncated coherent input.

    Returns the normalized output and the total success probability (the
    product of per-stage heralding probabilities).
    """
    n_max = cutoff if cutoff is not None else default_cutoff(config.alpha)
    state = coherent_state(config.alpha, n_max)
    success = 1.0
    for r in config.reflectivities:
        state, prob = catalysis_step(state, r)
        success *= prob
    return state, success


def qudit_to_fock(qudit: QuditState, cutoff: int | None = None) -> FockVector:
    """Expand the displaced qudit on the truncated Fock basis."""
    n_max = cutoff if cutoff is not None else default_cutoff(qudit.displacement) + qudit.l
    if n_max < qudit.l:
        raise ValueError("cutoff below the qudit dimension")
    amps = np.zeros(n_max + 1, np.complex128)
    amps[: qudit.amplitudes.size] = qudit.amplitudes
    return apply_displacement(FockVector(amps), qudit.displacement)
