"""Truncated Fock-space linear algebra for one and two optical modes.

States are plain complex amplitude arrays wrapped in thin immutable
containers.  The beam splitter acts as ``U = exp(theta (a^dag b - a b^dag))``
with ``theta = arccos(sqrt(R))``; because the generator conserves total
photon number the unitary is stored and applied block-by-block, one block
per total-photon sector, which keeps truncation exact for every sector that
fits inside the array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DegeneratePostselectionError, TruncationError

COHERENT_TAIL_TOL = 1e-12
DISPLACEMENT_TAIL_TOL = 1e-10


def default_cutoff(alpha: complex) -> int:
    """Fock cutoff policy: ceil(|alpha|^2 + 10 |alpha| + 20), at least 32.

    Keeps the truncated coherent tail below 1e-12 for every amplitude used
    in practice (|alpha|^2 <= 18 leaves tail mass ~ 1e-26).
    """
    a = abs(alpha)
    return max(32, math.ceil(a * a + 10.0 * a + 20.0))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FockVector:
    """Pure single-mode state: ``amps[n]`` is the amplitude of ``|n>``."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("amps must be a 1-d array with cutoff >= 1")
        object.__setattr__(self, "amps", _readonly(a))

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return FockVector(self.amps / n)

    def pnd(self) -> np.ndarray:
        """Photon-number distribution |amps[n]|^2."""
        return np.abs(self.amps) ** 2

    def mean_photon(self) -> float:
        return float(np.sum(self.pnd() * np.arange(self.amps.size)))

    def inner(self, other: "FockVector") -> complex:
        if other.amps.size != self.amps.size:
            raise ValueError("cutoff mismatch")
        return complex(np.vdot(self.amps, other.amps))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class TwoModeState:
    """Joint state of modes (a, b): ``amps[na, nb]``."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("amps must be a square 2-d array")
        object.__setattr__(self, "amps", _readonly(a))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @staticmethod
    def from_product(state: FockVector, ancilla_n: int, dim: int | None = None) -> "TwoModeState":
        """``state (x) |ancilla_n>`` embedded in a dim x dim array."""
        d = dim if dim is not None else state.amps.size + 1
        if d < state.amps.size or ancilla_n >= d:
            raise ValueError("embedding dimension too small")
        t = np.zeros((d, d), np.complex128)
        t[: state.amps.size, ancilla_n] = state.amps
        return TwoModeState(t)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian single-mode operator on the truncated Fock basis."""

    elements: np.ndarray

    def __post_init__(self):
        e = np.ascontiguousarray(self.elements, dtype=np.complex128)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("elements must be square")
        object.__setattr__(self, "elements", _readonly(e))

    @property
    def cutoff(self) -> int:
        return self.elements.shape[0] - 1

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.elements)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.elements + self.elements.conj().T) / 2.0)[0])

    @staticmethod
    def from_pure(state: FockVector) -> "DensityMatrix":
        return state.to_density()


def fock_state(n: int, cutoff: int) -> FockVector:
    if not 0 <= n <= cutoff:
        raise ValueError(f"need 0 <= n <= cutoff, got n={n}, cutoff={cutoff}")
    amps = np.zeros(cutoff + 1, np.complex128)
    amps[n] = 1.0
    return FockVector(amps)


def coherent_state(alpha: complex, cutoff: int) -> FockVector:
    """Truncated coherent state, renormalized after truncation.

    Raises TruncationError when the discarded tail mass exceeds
    COHERENT_TAIL_TOL at the requested cutoff.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if alpha == 0:
        return fock_state(0, cutoff)
    n = np.arange(cutoff + 1)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1.0, cutoff + 1)))])
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_fact)
    amps = mag * np.exp(1j * n * np.angle(alpha))
    kept = float(np.sum(mag**2))
    if 1.0 - kept > COHERENT_TAIL_TOL:
        raise TruncationError(
            f"coherent tail mass {1.0 - kept:.3e} above {COHERENT_TAIL_TOL:.0e} "
            f"at cutoff {cutoff}; policy suggests {default_cutoff(alpha)}"
        )
    return FockVector(amps / math.sqrt(kept))


# ---------------------------------------------------------------------------
# beam splitter


def _bs_generator_block(total: int) -> np.ndarray:
    # matrix of (a^dag b - a b^dag) on the basis |n, total-n>, n = 0..total
    k = np.zeros((total + 1, total + 1))
    for n in range(total):
        k[n + 1, n] = math.sqrt((n + 1) * (total - n))
    return k - k.T


def _bs_block_analytic(reflectivity: float, total: int) -> np.ndarray:
    """Block unitary via the binomial expansion of (c a^dag - s b^dag)^n
    (s a^dag + c b^dag)^m; agreement with the matrix exponential is a test
    contract, not a production path."""
    theta = math.acos(math.sqrt(reflectivity))
    c, s = math.cos(theta), math.sin(theta)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1.0, total + 1)))]) if total else np.array([0.0])
    u = np.zeros((total + 1, total + 1))
    for n in range(total + 1):
        m = total - n
        for p in range(total + 1):
            q = total - p
            pref = math.exp(0.5 * (log_fact[p] + log_fact[q] - log_fact[n] - log_fact[m]))
            acc = 0.0
            for j in range(max(0, p - m), min(n, p) + 1):
                acc += (
                    math.comb(n, j)
                    * math.comb(m, p - j)
                    * (-1.0) ** (n - j)
                    * c ** (2 * j + m - p)
                    * s ** (n + p - 2 * j)
                )
            u[p, n] = pref * acc
    return u


@lru_cache(maxsize=256)
def _bs_blocks(reflectivity: float, max_total: int) -> tuple:
    theta = math.acos(math.sqrt(reflectivity))
    blocks = [np.ones((1, 1))]
    for total in range(1, max_total + 1):
        blocks.append(_readonly(expm(theta * _bs_generator_block(total))))
    return tuple(blocks)


@dataclass(frozen=True)
class BeamSplitterUnitary:
    """exp(theta (a^dag b - a b^dag)) stored block-diagonally over total
    photon number; exact within every sector the truncation retains."""

    reflectivity: float
    theta: float
    blocks: tuple = field(repr=False)

    @property
    def max_total(self) -> int:
        return len(self.blocks) - 1

    def block(self, total: int) -> np.ndarray:
        return self.blocks[total]

    def full_matrix(self, dim: int) -> np.ndarray:
        """Dense two-mode matrix on the dim x dim product basis, indexed by
        (na * dim + nb).  Clipped photon-number sectors (total > dim - 1) are
        left zero.  Intended for small-dimension checks."""
        if dim - 1 > self.max_total:
            raise ValueError("not enough blocks for the requested dimension")
        u = np.zeros((dim * dim, dim * dim))
        for total in range(dim):
            idx = [na * dim + (total - na) for na in range(total + 1)]
            u[np.ix_(idx, idx)] = self.blocks[total]
        return u

    def apply(self, state: TwoModeState) -> TwoModeState:
        d = state.dim
        out = np.zeros((d, d), np.complex128)
        amps = state.amps
        for total in range(2 * d - 1):
            nas = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
            vec = amps[nas, total - nas]
            if not np.any(vec):
                continue
            if len(nas) != total + 1 or total > self.max_total:
                raise TruncationError(
                    f"amplitude in clipped photon-number sector {total}; "
                    "enlarge the two-mode embedding"
                )
            out[nas, total - nas] = self.blocks[total] @ vec
        return TwoModeState(out)


def beamsplitter_unitary(reflectivity: float, max_total: int) -> BeamSplitterUnitary:
    """Beam splitter of power reflectivity R covering photon-number sectors
    up to ``max_total``."""
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {reflectivity}")
    return BeamSplitterUnitary(
        reflectivity=float(reflectivity),
        theta=math.acos(math.sqrt(reflectivity)),
        blocks=_bs_blocks(float(reflectivity), max_total),
    )


def catalysis_transfer(reflectivity: float, n: int) -> float:
    """Diagonal amplitude <n,1|U|n,1> of one heralded stage,
    R^((n-1)/2) (R - n(1-R)); follows from photon-number conservation."""
    if n == 0:
        return math.sqrt(reflectivity)
    return reflectivity ** ((n - 1) / 2.0) * (reflectivity - n * (1.0 - reflectivity))


def catalysis_step(state: FockVector, reflectivity: float) -> tuple[FockVector, float]:
    """One catalysis stage: inject |1> in mode b, mix on a beam splitter of
    the given reflectivity, herald exactly one photon in mode b.

    Returns the normalized conditional state and the heralding probability
    (the squared norm of the unnormalized projection).
    """
    dim = state.amps.size + 1
    unitary = beamsplitter_unitary(reflectivity, dim - 1)
    joint = TwoModeState.from_product(state, 1, dim)
    mixed = unitary.apply(joint)
    projected = mixed.amps[: state.amps.size, 1]
    prob = float(np.sum(np.abs(projected) ** 2))
    if prob < 1e-300:
        raise DegeneratePostselectionError(
            f"heralding probability {prob:.3e} at R={reflectivity}"
        )
    return FockVector(projected / math.sqrt(prob)), prob


# ---------------------------------------------------------------------------
# displacement


def displacement_operator(beta: complex, cutoff: int) -> np.ndarray:
    """exp(beta a^dag - conj(beta) a) on the truncated space.

    The truncated generator is anti-Hermitian, so the matrix is exactly
    unitary; truncation error shows up as distorted amplitudes near the
    edge, which apply_displacement guards against.
    """
    a = np.diag(np.sqrt(np.arange(1.0, cutoff + 1)), 1)
    return expm(beta * a.conj().T - np.conj(beta) * a)


def apply_displacement(state: FockVector, beta: complex) -> FockVector:
    """D(beta)|state>; raises TruncationError when the displaced state
    presses against the cutoff (edge-band mass above DISPLACEMENT_TAIL_TOL).
    """
    if beta == 0:
        return state
    out = displacement_operator(beta, state.cutoff) @ state.amps
    band = max(4, (state.amps.size) // 8)
    edge_mass = float(np.sum(np.abs(out[-band:]) ** 2))
    if edge_mass > DISPLACEMENT_TAIL_TOL:
        raise TruncationError(
            f"displaced state carries {edge_mass:.3e} probability in the top "
            f"{band} levels; increase the cutoff"
        )
    return FockVector(out)


def photon_number_distribution(state: FockVector) -> np.ndarray:
    """|amps[n]|^2 for n = 0..cutoff; sums to one for normalized input."""
    return state.pnd()
