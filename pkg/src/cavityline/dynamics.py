"""Exact atom-field evolution in the interaction picture.

The Hamiltonian ``(delta/2 + chi n) sigma_z + g (sigma_+ a + sigma_- a^dag)``
conserves the excitation number, so it splits into 2x2 blocks on
``{|n, e>, |n+1, g>}``.  Each block is propagated in closed form.

Times are in units of 1/g when g = 1.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .photon_stats import PhotonDistribution


class StarkValidityWarning(UserWarning):
    """The effective Stark Hamiltonian is only trusted for |chi| < 1."""


class AtomInit(enum.Enum):
    EXCITED = "excited"
    GROUND = "ground"


@dataclass(frozen=True)
class ModelParams:
    """Detuning, Stark strength and coupling, all angular frequencies."""

    delta: float = 0.0
    chi: float = 0.0
    g: float = 1.0

    def __post_init__(self):
        if not self.g > 0.0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if abs(self.chi) >= 1.0:
            warnings.warn(
                f"|chi| = {abs(self.chi)} is outside the validity range |chi| < 1",
                StarkValidityWarning,
                stacklevel=3,
            )


def _bracket(params: ModelParams, n):
    return params.delta + params.chi * (2 * np.asarray(n) + 1)


def rabi_freq(params: ModelParams, n):
    """Generalized Rabi frequency of sector ``n`` (scalar or array).

    beta_n = sqrt([delta + chi (2n+1)]^2 + 4 g^2 (n+1)).
    """
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("sector index must be >= 0")
    b = np.sqrt(_bracket(params, n) ** 2 + 4.0 * params.g**2 * (n + 1))
    return float(b) if b.ndim == 0 else b


@dataclass(frozen=True)
class SectorPropagator:
    """U_n(t) = global_phase * [[m11, m12], [m12, conj(m11)]]."""

    n: int
    beta_n: float
    m11: complex
    m12: complex
    global_phase: complex

    @property
    def m21(self) -> complex:
        return self.m12

    @property
    def m22(self) -> complex:
        return self.m11.conjugate()

    def matrix(self) -> np.ndarray:
        return self.global_phase * np.array(
            [[self.m11, self.m12], [self.m21, self.m22]], dtype=complex
        )


def _propagator_arrays(params: ModelParams, n: np.ndarray, t: float):
    beta = np.asarray(rabi_freq(params, n), dtype=float)
    s = np.sin(beta * t / 2.0)
    m11 = np.cos(beta * t / 2.0) - 1j * _bracket(params, n) / beta * s
    m12 = -1j * 2.0 * params.g * np.sqrt(n + 1.0) / beta * s
    phase = np.exp(0.5j * params.chi * t)
    return beta, m11, m12, phase


def sector_propagator(params: ModelParams, n: int, t: float) -> SectorPropagator:
    if n < 0:
        raise ValueError("sector index must be >= 0")
    if not math.isfinite(t):
        raise ValueError("time must be finite")
    beta, m11, m12, phase = _propagator_arrays(params, np.asarray(n), t)
    return SectorPropagator(int(n), float(beta), complex(m11), complex(m12), complex(phase))


@dataclass(frozen=True)
class JointState:
    """Amplitudes C_n of |n, e> and D_n of |n+1, g>, n = 0..n_max."""

    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        d = np.asarray(self.d, dtype=complex)
        if c.shape != d.shape or c.ndim != 1:
            raise ValueError("c and d must be 1-D arrays of equal length")
        c.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def n_max(self) -> int:
        return self.c.size - 1

    def norm(self) -> float:
        return math.fsum(np.abs(self.c) ** 2) + math.fsum(np.abs(self.d) ** 2)

    def vector(self) -> np.ndarray:
        """Interleaved amplitudes in the order |0,e>, |1,g>, |1,e>, |2,g>, ..."""
        v = np.empty(2 * self.c.size, dtype=complex)
        v[0::2] = self.c
        v[1::2] = self.d
        return v

    @classmethod
    def from_vector(cls, v) -> "JointState":
        v = np.asarray(v, dtype=complex)
        return cls(v[0::2].copy(), v[1::2].copy())


def state_from(
    dist: PhotonDistribution,
    atom: AtomInit,
    phases: Optional[Sequence[float]] = None,
    renormalize: bool = True,
) -> JointState:
    """Product state of an atom in ``atom`` and a field with statistics ``dist``.

    Amplitudes are sqrt(P) times e^{i theta_n}; missing phases default to 0.
    For a ground-state atom the ladder holds D_n = sqrt(P_{n+1}), so the vacuum
    weight P_0 is dropped.  With ``renormalize`` the remaining weight is scaled
    back to one; otherwise the raw amplitudes are kept.

    Raises:
        ValueError: if the ground ladder is empty and renormalization was asked for.
    """
    atom = AtomInit(atom)
    size = dist.n_max + 1
    theta = np.zeros(size)
    if phases is not None:
        phases = np.asarray(phases, dtype=float)[:size]
        theta[: phases.size] = phases
    rot = np.exp(1j * theta)
    c = np.zeros(size, dtype=complex)
    d = np.zeros(size, dtype=complex)
    if atom is AtomInit.EXCITED:
        c[:] = np.sqrt(dist.probs) * rot
    else:
        d[:-1] = np.sqrt(dist.probs[1:]) * rot[:-1]
    state = JointState(c, d)
    if renormalize:
        weight = state.norm()
        if weight == 0.0:
            raise ValueError(
                "field has no weight on the ground ladder |n+1, g>; "
                "a ground-state atom with a vacuum field does not evolve"
            )
        state = JointState(c / math.sqrt(weight), d / math.sqrt(weight))
    return state


def ground_weight(dist: PhotonDistribution) -> float:
    """Weight sum_{n>=1} P_n that a ground-state atom sees on the ladder."""
    return math.fsum(dist.probs[1:])


def evolve(initial: JointState, params: ModelParams, t: float) -> JointState:
    """Propagate every sector by its closed-form 2x2 propagator."""
    n = np.arange(initial.c.size)
    _, m11, m12, phase = _propagator_arrays(params, n, t)
    c = phase * (m11 * initial.c + m12 * initial.d)
    d = phase * (m12 * initial.c + np.conj(m11) * initial.d)
    return JointState(c, d)


def inversion(state: JointState) -> float:
    """<sigma_z> = sum_n |C_n|^2 - |D_n|^2."""
    return math.fsum(np.abs(state.c) ** 2) - math.fsum(np.abs(state.d) ** 2)


def _closed_form(weights: np.ndarray, params: ModelParams, t):
    n = np.arange(weights.size)
    a2 = _bracket(params, n) ** 2
    beta = np.asarray(rabi_freq(params, n), dtype=float)
    t = np.asarray(t, dtype=float)
    osc = 4.0 * params.g**2 * (n + 1) * np.cos(np.multiply.outer(t, beta))
    w = ((a2 + osc) / beta**2) @ weights
    return float(w) if w.ndim == 0 else w


def inversion_excited(dist: PhotonDistribution, params: ModelParams, t):
    """W(t) for an initially excited atom, for scalar or array ``t``.

    W(t) = sum_n P_n {[delta + (2n+1) chi]^2 + 4 g^2 (n+1) cos(beta_n t)} / beta_n^2
    """
    return _closed_form(dist.probs, params, t)


def inversion_ground(dist: PhotonDistribution, params: ModelParams, t):
    """W(t) for an initially ground-state atom.

    Uses the raw ladder weights P_{n+1}; the vacuum term P_0 does not appear
    and the result is not renormalized (see :func:`state_from`).
    """
    weights = dist.probs[1:]
    if weights.size == 0:
        t = np.asarray(t, dtype=float)
        return 0.0 if t.ndim == 0 else np.zeros(t.shape)
    w = _closed_form(weights, params, t)
    return -w
