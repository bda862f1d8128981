"""Constructors for the target states the cascade is tuned to produce.

Covers displaced Fock states, the linear-superposition-of-coherent-states
(LSCS) family (even/odd cats g=2, three-headed cats g=3, compass states
g=4), finite number-state superpositions, ON states and weak cubic phase
states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .fock import FockVector, apply_displacement, coherent_state, default_cutoff, fock_state


def lscs_normalization(g: int, h: int, gamma: complex) -> float:
    """Closed-form normalization of the g-component cat with phase index h:
    [g * sum_s exp(-i 2 pi s h / g) exp(-|gamma|^2 (1 - exp(i 2 pi s / g)))]^(-1/2).
    """
    s = np.arange(g)
    total = np.sum(np.exp(-2j * np.pi * s * h / g) * np.exp(-abs(gamma) ** 2 * (1 - np.exp(2j * np.pi * s / g))))
    val = g * float(np.real(total))
    if val <= 0.0:
        raise ValueError("vanishing norm; state undefined at these parameters")
    return 1.0 / math.sqrt(val)


def lscs_state(g: int, h: int, gamma: complex, cutoff: int) -> FockVector:
    """Normalized sum_r exp(-i 2 pi r h / g) |gamma exp(i 2 pi r / g)>.

    Fock support sits exactly on n = h (mod g); g = 1 reduces to the
    coherent state, and the gamma -> 0 limit of (g, h) is |h>.
    """
    if g < 1 or not 0 <= h <= g - 1:
        raise ValueError(f"need g >= 1 and 0 <= h < g, got ({g}, {h})")
    if gamma == 0:
        return fock_state(h, cutoff)
    base = coherent_state(gamma, cutoff).amps
    amps = np.where(np.arange(cutoff + 1) % g == h % g, base, 0.0)
    norm = np.linalg.norm(amps)
    if norm < 1e-150:
        raise ValueError("cat support lost to truncation; increase cutoff")
    return FockVector(amps / norm)


def fsns_state(coefficients, cutoff: int) -> FockVector:
    """Finite number-state superposition sum_p B_p |p> embedded at the
    bottom of the truncated space."""
    b = np.asarray(coefficients, dtype=np.complex128)
    if b.ndim != 1 or b.size == 0:
        raise ValueError("coefficients must be a nonempty 1-d sequence")
    if b.size > cutoff + 1:
        raise ValueError(f"{b.size} coefficients do not fit below cutoff {cutoff}")
    norm = np.linalg.norm(b)
    if norm == 0:
        raise ValueError("zero coefficient vector")
    amps = np.zeros(cutoff + 1, np.complex128)
    amps[: b.size] = b / norm
    return FockVector(amps)


def on_state(a: complex, big_n: int, cutoff: int) -> FockVector:
    """(|0> + a |N>) / sqrt(1 + |a|^2)."""
    if big_n < 1 or big_n > cutoff:
        raise ValueError(f"need 1 <= N <= cutoff, got N={big_n}")
    amps = np.zeros(cutoff + 1, np.complex128)
    amps[0] = 1.0
    amps[big_n] = a
    return FockVector(amps / math.sqrt(1.0 + abs(a) ** 2))


def cubic_phase_state(a: complex, cutoff: int) -> FockVector:
    """(|0> + i a sqrt(3/2) |1> + i a |3>) / sqrt(1 + 5 |a|^2 / 2)."""
    if cutoff < 3:
        raise ValueError("cutoff must be >= 3")
    amps = np.zeros(cutoff + 1, np.complex128)
    amps[0] = 1.0
    amps[1] = 1j * a * math.sqrt(1.5)
    amps[3] = 1j * a
    return FockVector(amps / math.sqrt(1.0 + 2.5 * abs(a) ** 2))


def displaced_fock_target(n: int, beta: complex, cutoff: int) -> FockVector:
    """D(beta)|n>."""
    return apply_displacement(fock_state(n, cutoff), beta)


def optimal_squeezing_superposition(n: int, seed: int = 0, restarts: int = 40):
    """Real (n+1)-component superposition minimizing the X-quadrature
    variance, found by seeded multistart simplex search.

    Returns (coefficients, variance).  Orders 1 and 2 reproduce the known
    optima 0.3750 and 0.2753.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p = np.arange(n + 1)
    sq = np.sqrt(p[1:])
    sq2 = np.sqrt(p[2:] * (p[2:] - 1.0)) if n >= 2 else None

    def var_x(b):
        b = b / np.linalg.norm(b)
        mean_a = float(np.sum(b[:-1] * b[1:] * sq))
        mean_a2 = float(np.sum(b[:-2] * b[2:] * sq2)) if n >= 2 else 0.0
        mean_n = float(np.sum(b * b * p))
        return 0.5 + mean_n + mean_a2 - 2.0 * mean_a**2

    rng = np.random.default_rng(seed)
    best_b, best_v = None, np.inf
    for _ in range(restarts):
        res = minimize(
            var_x,
            rng.normal(size=n + 1),
            method="Nelder-Mead",
            options=dict(xatol=1e-13, fatol=1e-15, maxiter=40000, maxfev=40000),
        )
        if res.fun < best_v:
            best_v, best_b = float(res.fun), res.x / np.linalg.norm(res.x)
    if best_b[0] < 0:
        best_b = -best_b
    return best_b, best_v


_KINDS = ("fock", "lscs", "fsns", "on", "cps")


@dataclass(frozen=True)
class TargetSpec:
    """Tagged description of a target state.

    kind / parameters:
      fock: n, displacement (optional, defaults to 0)
      lscs: g, h, gamma
      fsns: coefficients
      on:   a, n
      cps:  a
    """

    kind: str
    n: Optional[int] = None
    displacement: complex = 0.0
    g: Optional[int] = None
    h: Optional[int] = None
    gamma: complex = 0.0
    a: complex = 0.0
    coefficients: Optional[tuple] = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "fock" and (self.n is None or self.n < 0):
            raise ValueError("fock target needs n >= 0")
        if self.kind == "lscs" and (self.g is None or self.h is None):
            raise ValueError("lscs target needs g and h")
        if self.kind == "on" and (self.n is None or self.n < 1):
            raise ValueError("on target needs n >= 1")
        if self.kind == "fsns":
            if not self.coefficients:
                raise ValueError("fsns target needs coefficients")
            object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))

    def build(self, cutoff: int | None = None) -> FockVector:
        """The target as a truncated Fock vector."""
        cut = cutoff if cutoff is not None else self.default_cutoff()
        if self.kind == "fock":
            return displaced_fock_target(self.n, self.displacement, cut)
        if self.kind == "lscs":
            return lscs_state(self.g, self.h, self.gamma, cut)
        if self.kind == "fsns":
            return fsns_state(np.array(self.coefficients), cut)
        if self.kind == "on":
            return on_state(self.a, self.n, cut)
        return cubic_phase_state(self.a, cut)

    def default_cutoff(self) -> int:
        if self.kind == "fock":
            return max(default_cutoff(self.displacement), self.n + 8)
        if self.kind == "lscs":
            return default_cutoff(self.gamma)
        if self.kind == "fsns":
            return max(32, len(self.coefficients) + 8)
        if self.kind == "on":
            return max(32, self.n + 8)
        return 32

    def qudit_amplitudes(self, l: int) -> np.ndarray:
        """First l+1 Fock amplitudes of the (unit-norm) target, in the
        undisplaced qudit frame.  Not renormalized, so a target with
        support above l yields a vector of norm < 1."""
        if self.kind == "fock":
            if self.n > l:
                raise ValueError(f"fock target n={self.n} exceeds qudit dimension l={l}")
            amps = np.zeros(l + 1, np.complex128)
            amps[self.n] = 1.0
            return amps
        cut = max(self.default_cutoff(), l)
        return self.build(cut).amps[: l + 1].copy()

    def objective_weights(self, l: int) -> np.ndarray:
        """Target photon-number weights |B_p|^2 for the optimizer,
        renormalized over p = 0..l."""
        amps = self.qudit_amplitudes(l)
        w = np.abs(amps) ** 2
        total = w.sum()
        if total < 1e-12:
            raise ValueError("target has no weight below the qudit dimension")
        return w / total

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "fock":
            out["n"] = self.n
            if self.displacement != 0:
                out["displacement"] = _c2s(self.displacement)
        elif self.kind == "lscs":
            out.update(g=self.g, h=self.h, gamma=_c2s(self.gamma))
        elif self.kind == "fsns":
            out["coefficients"] = [_c2s(c) for c in self.coefficients]
        elif self.kind == "on":
            out.update(a=_c2s(self.a), n=self.n)
        else:
            out["a"] = _c2s(self.a)
        if self.label:
            out["label"] = self.label
        return out

    @staticmethod
    def from_dict(data: dict) -> "TargetSpec":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind not in _KINDS:
            raise ValueError(f"target kind must be one of {_KINDS}, got {kind!r}")
        label = data.pop("label", "")
        conv = {
            "fock": lambda d: dict(n=int(d.pop("n")), displacement=_s2c(d.pop("displacement", 0))),
            "lscs": lambda d: dict(g=int(d.pop("g")), h=int(d.pop("h")), gamma=_s2c(d.pop("gamma"))),
            "fsns": lambda d: dict(coefficients=tuple(_s2c(c) for c in d.pop("coefficients"))),
            "on": lambda d: dict(a=_s2c(d.pop("a")), n=int(d.pop("n"))),
            "cps": lambda d: dict(a=_s2c(d.pop("a"))),
        }
        kwargs = conv[kind](data)
        if data:
            raise ValueError(f"unknown target keys: {sorted(data)}")
        return TargetSpec(kind=kind, label=label, **kwargs)


def _c2s(z: complex):
    z = complex(z)
    return repr(z.real) if z.imag == 0 else [repr(z.real), repr(z.imag)]


def _s2c(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))
