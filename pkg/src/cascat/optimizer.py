"""Input-parameter search: match a target photon-number weight vector with
the cascade's qudit weights |A_p|^2.

The objective is the squared mismatch summed over p (the achieved weights
are normalized by construction, so the search is a plain box-bounded
problem over alpha and the reflectivities).  A coarse grid scan seeds a
multistart Nelder-Mead refinement; everything is deterministic for a fixed
seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .cascade import CascadeConfig, closed_form_qudit, oracle_cascade
from .errors import BudgetExceededError, CascatError
from .metrics import rotation_maximized_fidelity

PENALTY = 1e6


def _weights_via_oracle(alpha: complex, refl, l: int) -> tuple[np.ndarray, float]:
    """Qudit-frame weights for configurations the closed form cannot handle
    (vanishing reflectivity product).  The displacement alpha sqrt(X0) is
    zero there, so the low Fock weights are read off directly."""
    try:
        state, sp = oracle_cascade(CascadeConfig(alpha, tuple(refl)))
    except CascatError:
        return np.zeros(l + 1), 0.0
    w = state.pnd()[: l + 1]
    total = w.sum()
    if total <= 0.0:
        return np.zeros(l + 1), 0.0
    return w / total, sp


def objective(config: CascadeConfig, target) -> float:
    """sum_p (|A_p|^2 - target_p)^2 for the given cascade configuration.

    Degenerate configurations are routed through the brute-force cascade;
    unresolvable ones count as a large finite penalty.
    """
    target = np.asarray(target, dtype=float)
    if config.l != target.size - 1:
        raise ValueError("target length must be config.l + 1")
    err = _kernels.pnd_mismatch(complex(config.alpha), np.asarray(config.reflectivities), target)
    if err >= 0.0:
        return float(err)
    weights, sp = _weights_via_oracle(config.alpha, config.reflectivities, config.l)
    if sp <= 0.0:
        return PENALTY
    return float(np.sum((weights - target) ** 2))


def _objective_vec(x: np.ndarray, target: np.ndarray) -> float:
    alpha = complex(x[0])
    refl = np.clip(x[1:], 0.0, 1.0)
    err = _kernels.pnd_mismatch(alpha, refl, target)
    if err >= 0.0:
        return float(err)
    if np.any(refl == 0.0):
        weights, sp = _weights_via_oracle(alpha, refl, target.size - 1)
        if sp > 0.0:
            return float(np.sum((weights - target) ** 2))
    return PENALTY


# ---------------------------------------------------------------------------
# grid scan


@dataclass(frozen=True)
class ScanDataset:
    """Lazily evaluated Cartesian scan over (alpha, R_1..R_l).

    Rows follow row-major order over (alpha, R_1, ..., R_l) with columns
    ``alpha, R_1..R_l, w_0..w_l, success_probability``.  Rows whose
    heralding fails entirely carry zero weights and zero probability.
    """

    l: int
    alphas: np.ndarray
    r_values: np.ndarray

    def __len__(self) -> int:
        return self.alphas.size * self.r_values.size**self.l

    @property
    def columns(self) -> tuple:
        return (
            ("alpha",)
            + tuple(f"R_{i+1}" for i in range(self.l))
            + tuple(f"w_{p}" for p in range(self.l + 1))
            + ("success_probability",)
        )

    def chunks(self, chunk_size: int = 1 << 15) -> Iterator[np.ndarray]:
        total = len(self)
        width = 2 * self.l + 3
        start = 0
        while start < total:
            count = min(chunk_size, total - start)
            out = np.empty((count, width))
            _kernels.scan_fill(self.alphas, self.r_values, self.l, start, out)
            bad = np.flatnonzero(out[:, -1] < 0.0)
            for i in bad:
                w, sp = _weights_via_oracle(out[i, 0], out[i, 1 : 1 + self.l], self.l)
                out[i, 1 + self.l : 2 + 2 * self.l] = w
                out[i, -1] = sp
            yield out
            start += count

    def as_array(self, max_rows: int = 2_000_000) -> np.ndarray:
        if len(self) > max_rows:
            raise BudgetExceededError(
                f"{len(self)} rows exceed the in-memory limit {max_rows}; iterate chunks() instead"
            )
        return np.concatenate(list(self.chunks()), axis=0)

    def best(self, target, k: int = 8) -> np.ndarray:
        """Top-k rows by squared weight mismatch against ``target``
        (ties broken by success probability, then row order)."""
        target = np.asarray(target, dtype=float)
        if target.size != self.l + 1:
            raise ValueError("target length must be l + 1")
        head: list = []
        offset = 0
        for chunk in self.chunks():
            err = np.sum((chunk[:, 1 + self.l : 2 + 2 * self.l] - target) ** 2, axis=1)
            err[chunk[:, -1] <= 0.0] = PENALTY
            take = np.argsort(err, kind="stable")[: k]
            head.extend((err[i], -chunk[i, -1], offset + i, chunk[i]) for i in take)
            offset += chunk.shape[0]
        head.sort(key=lambda rec: (rec[0], rec[1], rec[2]))
        return np.array([rec[3] for rec in head[:k]])


def grid_scan(l: int, alpha_grid, r_grid, budget: int = 10_000_000) -> ScanDataset:
    """Cartesian scan of the qudit weights; refuses products above ``budget``
    evaluations."""
    alphas = np.ascontiguousarray(alpha_grid, dtype=float)
    rvals = np.ascontiguousarray(r_grid, dtype=float)
    if l < 1:
        raise ValueError("l must be >= 1")
    if np.any(alphas < 0):
        raise ValueError("alpha grid must be nonnegative")
    if np.any((rvals < 0) | (rvals > 1)):
        raise ValueError("reflectivity grid must lie in [0, 1]")
    total = alphas.size * rvals.size**l
    if total > budget:
        raise BudgetExceededError(f"scan size {total} exceeds budget {budget}")
    return ScanDataset(l=l, alphas=alphas, r_values=rvals)


# ---------------------------------------------------------------------------
# multistart local optimization


@dataclass(frozen=True)
class OptimizationProblem:
    """Target weight vector plus search settings.

    ``target`` holds |A_p|^2 values for p = 0..l (nonnegative, summing to
    one); ``target_amplitudes`` optionally carries the complex target for
    fidelity reporting.  ``initial_guesses`` are extra warm starts, each an
    (l+1)-vector (alpha, R_1..R_l).
    """

    l: int
    target: np.ndarray
    restarts: int = 64
    seed: int = 0
    alpha_max: float = 5.0
    target_amplitudes: Optional[np.ndarray] = None
    initial_guesses: tuple = ()
    grid_seeds: int = 8

    def __post_init__(self):
        t = np.ascontiguousarray(self.target, dtype=float)
        if t.size != self.l + 1:
            raise ValueError("target length must be l + 1")
        if np.any(t < -1e-12) or abs(t.sum() - 1.0) > 1e-9:
            raise ValueError("target must be nonnegative and sum to 1")
        t.setflags(write=False)
        object.__setattr__(self, "target", t)
        if self.target_amplitudes is not None:
            a = np.ascontiguousarray(self.target_amplitudes, dtype=np.complex128)
            a.setflags(write=False)
            object.__setattr__(self, "target_amplitudes", a)
        object.__setattr__(
            self, "initial_guesses", tuple(tuple(float(v) for v in g) for g in self.initial_guesses)
        )


@dataclass(frozen=True)
class OptimizationResult:
    """Best parameters plus the per-restart trace.

    ``fidelity_vs_target`` is maximized over the free phase-space rotation
    angle (reported as ``rotation_angle``); ``fidelity_fixed_frame`` is the
    raw overlap with no rotation applied.
    """

    alpha: float
    reflectivities: tuple
    objective: float
    weights: np.ndarray
    success_probability: float
    fidelity_vs_target: Optional[float] = None
    rotation_angle: Optional[float] = None
    fidelity_fixed_frame: Optional[float] = None
    trace: tuple = field(default=(), repr=False)

    @property
    def config(self) -> CascadeConfig:
        return CascadeConfig(self.alpha, self.reflectivities)


def _evaluate(x: np.ndarray, l: int) -> tuple[np.ndarray, float, np.ndarray]:
    """(weights, success probability, amplitudes) at a parameter vector."""
    alpha = float(x[0])
    refl = tuple(float(r) for r in np.clip(x[1:], 0.0, 1.0))
    if alpha > 0.0 and math.prod(refl) > 0.0:
        q = closed_form_qudit(CascadeConfig(alpha, refl))
        return q.weights(), q.success_probability, q.amplitudes
    w, sp = _weights_via_oracle(alpha, refl, l)
    amps = np.sqrt(w).astype(np.complex128)
    return w, sp, amps


def optimize(problem: OptimizationProblem) -> OptimizationResult:
    """Multistart bounded Nelder-Mead minimization of the weight mismatch.

    Start points: caller-provided warm starts, the best grid-scan cells,
    then seeded uniform draws up to ``restarts`` total.  The returned
    optimum is the best objective; exact ties prefer higher success
    probability, then a smaller reflectivity sum.  Deterministic for fixed
    seed.
    """
    l, target = problem.l, problem.target
    rng = np.random.default_rng(problem.seed)
    starts = [np.asarray(g, dtype=float) for g in problem.initial_guesses]
    if problem.grid_seeds > 0 and len(starts) < problem.restarts:
        n_alpha = 10 if l <= 4 else 8
        n_r = 10 if l <= 4 else 8
        scan = grid_scan(
            l,
            np.linspace(0.25, problem.alpha_max * 0.95, n_alpha),
            np.linspace(0.05, 0.95, n_r),
        )
        for row in scan.best(target, k=problem.grid_seeds):
            starts.append(row[: l + 1].copy())
    while len(starts) < problem.restarts:
        starts.append(
            np.concatenate(
                [
                    rng.uniform(0.05 * problem.alpha_max, problem.alpha_max, 1),
                    rng.uniform(0.02, 0.98, l),
                ]
            )
        )
    starts = starts[: max(problem.restarts, len(problem.initial_guesses))]

    bounds = [(0.0, problem.alpha_max)] + [(0.0, 1.0)] * l
    records = []
    for idx, x0 in enumerate(starts):
        res = minimize(
            _objective_vec,
            np.asarray(x0, dtype=float),
            args=(target,),
            method="Nelder-Mead",
            bounds=bounds,
            options=dict(xatol=1e-11, fatol=1e-15, maxiter=3000 * (l + 1), maxfev=3000 * (l + 1)),
        )
        x = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
        weights, sp, amps = _evaluate(x, l)
        obj = float(np.sum((weights - target) ** 2)) if sp > 0.0 else PENALTY
        records.append((obj, sp, x, weights, amps, idx))

    def sort_key(rec):
        obj, sp, x, _, _, idx = rec
        bucket = 0.0 if obj <= 1e-9 else obj
        return (bucket, -sp, float(np.sum(x[1:])), idx)

    records.sort(key=sort_key)
    best_obj, best_sp, best_x, best_w, best_amps, _ = records[0]

    fid = angle = fid_fixed = None
    if problem.target_amplitudes is not None:
        b = problem.target_amplitudes
        fid_fixed = float(abs(np.vdot(b, best_amps)) ** 2)
        fid, angle = rotation_maximized_fidelity(b, best_amps)

    trace = tuple(
        (int(idx), float(obj), float(sp), tuple(float(v) for v in x))
        for obj, sp, x, _, _, idx in records
    )
    return OptimizationResult(
        alpha=float(best_x[0]),
        reflectivities=tuple(float(r) for r in best_x[1:]),
        objective=float(best_obj),
        weights=best_w,
        success_probability=float(best_sp),
        fidelity_vs_target=fid,
        rotation_angle=angle,
        fidelity_fixed_frame=fid_fixed,
        trace=trace,
    )
