"""Brute-force reference propagator.

The Hamiltonian is assembled from truncated ladder operators and Pauli
matrices on the full field (x) atom space and then restricted to the
``{|n, e>, |n+1, g>}`` ladder.  Nothing here uses the closed-form sector
solution, the Rabi-frequency formula or the inversion formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import JointState, ModelParams


class StepFailure(RuntimeError):
    """The adaptive integrator could not reach the requested tolerance."""


@dataclass(frozen=True)
class TruncatedHamiltonian:
    """Real symmetric H in the basis |0,e>, |1,g>, |1,e>, |2,g>, ..., |n_max+1,g>."""

    matrix: np.ndarray
    n_max: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def block(self, n: int) -> np.ndarray:
        return self.matrix[2 * n : 2 * n + 2, 2 * n : 2 * n + 2]

    def blocks(self) -> np.ndarray:
        """All sector blocks stacked into shape (n_max+1, 2, 2)."""
        idx = np.arange(self.n_max + 1)
        out = np.empty((idx.size, 2, 2))
        out[:, 0, 0] = self.matrix[2 * idx, 2 * idx]
        out[:, 0, 1] = self.matrix[2 * idx, 2 * idx + 1]
        out[:, 1, 0] = self.matrix[2 * idx + 1, 2 * idx]
        out[:, 1, 1] = self.matrix[2 * idx + 1, 2 * idx + 1]
        return out

    def max_offblock(self) -> float:
        """Largest |entry| that couples different sectors (zero for a valid H)."""
        mask = np.ones_like(self.matrix, dtype=bool)
        for n in range(self.n_max + 1):
            mask[2 * n : 2 * n + 2, 2 * n : 2 * n + 2] = False
        return float(np.abs(self.matrix[mask]).max(initial=0.0))

    def sector_gaps(self) -> np.ndarray:
        """Eigenvalue splitting of each sector block."""
        ev = np.linalg.eigvalsh(self.blocks())
        return ev[:, 1] - ev[:, 0]


def build_hamiltonian(params: ModelParams, n_max: int) -> TruncatedHamiltonian:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    levels = n_max + 2
    a = np.diag(np.sqrt(np.arange(1.0, levels)), 1)
    num = np.diag(np.arange(float(levels)))
    # atom basis (|e>, |g>)
    sz = np.diag([1.0, -1.0])
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    sm = sp.T
    eye_f = np.eye(levels)
    h_full = np.kron(params.delta / 2.0 * eye_f + params.chi * num, sz) + params.g * (
        np.kron(a, sp) + np.kron(a.T, sm)
    )
    # full index of |k, atom> is 2k + (0 for e, 1 for g)
    ladder = []
    for n in range(n_max + 1):
        ladder += [2 * n, 2 * (n + 1) + 1]
    ladder = np.array(ladder)
    h = h_full[np.ix_(ladder, ladder)]
    return TruncatedHamiltonian(h, n_max)


def _check_size(state0: JointState, ham: TruncatedHamiltonian):
    if state0.n_max != ham.n_max:
        raise ValueError(f"state has n_max={state0.n_max}, Hamiltonian has {ham.n_max}")


def _eigen_propagate(ham: TruncatedHamiltonian, state0: JointState, times: np.ndarray):
    """Amplitudes at each time, shape (len(times), n_max+1, 2)."""
    vals, vecs = np.linalg.eigh(ham.blocks())
    psi0 = np.stack([state0.c, state0.d], axis=-1)
    coeff = np.einsum("nji,nj->ni", vecs, psi0)
    phases = np.exp(-1j * np.multiply.outer(times, vals))
    return np.einsum("nij,tnj->tni", vecs, phases * coeff)


def propagate_numeric(
    state0: JointState,
    params: ModelParams,
    t: float,
    method: str = "eigen",
    rtol: float = 1e-12,
    atol: float = 1e-12,
) -> JointState:
    """Solve i dpsi/dt = H psi from 0 to ``t``.

    ``method="eigen"`` diagonalizes each sector block of the numerical H;
    ``method="rk_adaptive"`` integrates the full truncated system with DOP853.
    """
    ham = build_hamiltonian(params, state0.n_max)
    _check_size(state0, ham)
    if t == 0.0:
        return JointState(state0.c.copy(), state0.d.copy())
    if method == "eigen":
        amps = _eigen_propagate(ham, state0, np.array([t]))[0]
        return JointState(amps[:, 0], amps[:, 1])
    if method == "rk_adaptive":
        h = ham.matrix.astype(complex)
        sol = solve_ivp(
            lambda _, y: -1j * (h @ y),
            (0.0, t),
            state0.vector(),
            method="DOP853",
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise StepFailure(sol.message)
        return JointState.from_vector(sol.y[:, -1])
    raise ValueError(f"unknown method {method!r}")


def inversion_numeric(state0: JointState, params: ModelParams, times) -> np.ndarray:
    """<sigma_z> on eigen-propagated states at each of ``times``."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    ham = build_hamiltonian(params, state0.n_max)
    amps = _eigen_propagate(ham, state0, times.ravel())
    pop = np.abs(amps) ** 2
    w = pop[..., 0].sum(axis=1) - pop[..., 1].sum(axis=1)
    return w.reshape(times.shape)
