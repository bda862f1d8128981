"""Cascade with imperfect hardware: inefficient number-resolving heralding
detectors and mixed single-photon sources.

The detector firing "one photon" is the diagonal POVM element
``sum_{k>=1} k eta_d (1 - eta_d)^(k-1) |k><k|`` (dark counts neglected);
each stage's ancilla is the mixture ``(1 - eta_s)|0><0| + eta_s |1><1|``.
Each stage couples the current (mixed) signal to a fresh imperfect ancilla,
applies the beam-splitter unitary, weights the measured mode by the POVM,
traces it out and renormalizes; the heralding probabilities multiply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import CascadeConfig, oracle_cascade
from .errors import DegeneratePostselectionError
from .fock import DensityMatrix, beamsplitter_unitary, coherent_state, default_cutoff
from .metrics import fidelity


@dataclass(frozen=True)
class ImperfectionParams:
    """Detector efficiency eta_d, source efficiency eta_s, and an optional
    cap on the POVM photon-number sum (None = full truncated range)."""

    eta_d: float
    eta_s: float
    povm_terms: int | None = None

    def __post_init__(self):
        for name in ("eta_d", "eta_s"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def detector_povm(eta_d: float, cutoff: int) -> np.ndarray:
    """Diagonal of the single-photon-click POVM element on |0..cutoff>.

    Entry k is ``k eta_d (1 - eta_d)^(k-1)`` for k >= 1 and exactly zero at
    k = 0; eta_d = 1 leaves the bare |1><1| projector.
    """
    if not 0.0 < eta_d <= 1.0:
        raise ValueError(f"eta_d must be in (0, 1], got {eta_d} (eta_d = 0 has no signal)")
    k = np.arange(cutoff + 1, dtype=float)
    diag = k * eta_d * (1.0 - eta_d) ** np.maximum(k - 1.0, 0.0)
    diag[0] = 0.0
    return diag


def _stage(rho: np.ndarray, reflectivity: float, eta_s: float, povm_diag: np.ndarray):
    """One imperfect catalysis stage on a (cutoff+1)-dim density matrix.

    Works through the eigendecomposition of rho: every eigenvector paired
    with each ancilla component is a pure two-mode state, pushed through the
    block-diagonal unitary and contracted against the POVM diagonal.
    Returns (unnormalized rho', heralding probability).
    """
    dim = rho.shape[0] + 1
    unitary = beamsplitter_unitary(reflectivity, dim - 1)
    vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    keep = vals > max(1e-16, vals.max() * 1e-15)
    rho_next = np.zeros((dim - 1, dim - 1), np.complex128)
    sqrt_povm = np.sqrt(povm_diag[:dim])
    for weight, vec in zip(vals[keep], vecs[:, keep].T):
        for anc, anc_weight in ((0, 1.0 - eta_s), (1, eta_s)):
            if anc_weight <= 0.0:
                continue
            joint = np.zeros((dim, dim), np.complex128)
            joint[: dim - 1, anc] = vec
            mixed = _apply_blocks(joint, unitary)
            m = mixed[: dim - 1, :] * sqrt_povm[None, :]
            rho_next += (weight * anc_weight) * (m @ m.conj().T)
    prob = float(np.real(np.trace(rho_next)))
    return rho_next, prob


def _apply_blocks(joint: np.ndarray, unitary) -> np.ndarray:
    d = joint.shape[0]
    out = np.zeros_like(joint)
    for total in range(2 * d - 1):
        nas = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
        vec = joint[nas, total - nas]
        if not np.any(vec):
            continue
        out[nas, total - nas] = unitary.blocks[total] @ vec
    return out


def realistic_cascade(
    config: CascadeConfig,
    params: ImperfectionParams,
    cutoff: int | None = None,
) -> tuple[DensityMatrix, float]:
    """Heralded cascade output under detector and source imperfections.

    Returns the final single-mode density matrix (trace one) and the total
    heralding probability, the product of per-stage probabilities.
    """
    n_max = cutoff if cutoff is not None else default_cutoff(config.alpha)
    povm = detector_povm(params.eta_d, n_max + 1)
    if params.povm_terms is not None:
        povm = povm.copy()
        povm[params.povm_terms + 1 :] = 0.0
    signal = coherent_state(config.alpha, n_max)
    rho = np.outer(signal.amps, signal.amps.conj())
    success = 1.0
    for r in config.reflectivities:
        rho, prob = _stage(rho, r, params.eta_s, povm)
        if prob < 1e-300:
            raise DegeneratePostselectionError(
                f"heralding probability {prob:.3e} at R={r}"
            )
        success *= prob
        rho = rho / prob
        rho = (rho + rho.conj().T) / 2.0
    return DensityMatrix(rho), success


def realistic_fidelity(ideal: DensityMatrix, realized: DensityMatrix) -> float:
    """Overlap Tr(rho_ideal rho_realized); shares the metrics implementation."""
    return fidelity(ideal, realized)


def source_efficiency_sweep(
    config: CascadeConfig,
    eta_d: float,
    eta_s_values,
    cutoff: int | None = None,
):
    """Fidelity against the ideal pure cascade and heralding probability for
    each source efficiency, at fixed detector efficiency.

    Returns a list of (eta_s, fidelity, success_probability) tuples.
    """
    n_max = cutoff if cutoff is not None else default_cutoff(config.alpha)
    ideal, _ = oracle_cascade(config, n_max)
    rho_ideal = ideal.to_density()
    rows = []
    for eta_s in eta_s_values:
        rho, prob = realistic_cascade(config, ImperfectionParams(eta_d, float(eta_s)), n_max)
        rows.append((float(eta_s), realistic_fidelity(rho_ideal, rho), prob))
    return rows
