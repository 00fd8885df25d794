"""Time-averaged inversion as a function of detuning.

The long-time average of cos(beta_n t) vanishes, which leaves closed forms
for the line shape; no numerical time averaging happens here.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import parallel
from .dynamics import AtomInit, JointState
from .photon_stats import (
    DEFAULT_TRUNCATION,
    EPS_NORM,
    DegenerateCat,
    FieldSpec,
    PhotonDistribution,
    TruncationPolicy,
    distribution,
)


class ComplexAmplitudes(ValueError):
    """The general line-shape formula is only established for real amplitudes."""


def _ratio_sq(weights: np.ndarray, chi: float, g: float, delta):
    """sum_n weights[n] * [(delta + (2n+1) chi) / beta_n]^2 for scalar or array delta."""
    if not g > 0.0:
        raise ValueError("coupling g must be positive")
    n = np.arange(weights.size)
    delta = np.asarray(delta, dtype=float)
    a = np.add.outer(delta, chi * (2 * n + 1))
    beta2 = a**2 + 4.0 * g**2 * (n + 1)
    out = (a**2 / beta2) @ weights
    return float(out) if out.ndim == 0 else out


def avg_inversion_excited(dist: PhotonDistribution, chi: float, g: float, delta):
    """Line shape for an initially excited atom; lies in [0, 1]."""
    return _ratio_sq(dist.probs, chi, g, delta)


def avg_inversion_ground(dist: PhotonDistribution, chi: float, g: float, delta):
    """Line shape for an initially ground-state atom; lies in [-1, 0].

    Weights are the raw P_{n+1}, so the large-|delta| limit is -(1 - P_0).
    """
    weights = dist.probs[1:]
    if weights.size == 0:
        delta = np.asarray(delta, dtype=float)
        return 0.0 if delta.ndim == 0 else np.zeros(delta.shape)
    return -_ratio_sq(weights, chi, g, delta)


def avg_inversion_general(state0: JointState, chi: float, g: float, delta):
    """Line shape for a joint state with both C_n and D_n populated.

    Only valid for real amplitudes; the cross term C_n D_n comes from the
    long-time average of the interference between the two sector components.
    """
    if np.any(state0.c.imag != 0.0) or np.any(state0.d.imag != 0.0):
        raise ComplexAmplitudes("initial amplitudes must be real")
    if not g > 0.0:
        raise ValueError("coupling g must be positive")
    c = state0.c.real
    d = state0.d.real
    n = np.arange(c.size)
    delta = np.asarray(delta, dtype=float)
    a = np.add.outer(delta, chi * (2 * n + 1))
    beta2 = a**2 + 4.0 * g**2 * (n + 1)
    diag = (a**2 / beta2) @ (c**2 - d**2)
    cross = (4.0 * g * np.sqrt(n + 1.0) * a / beta2) @ (c * d)
    out = diag + cross
    return float(out) if out.ndim == 0 else out


def avg_inversion(dist: PhotonDistribution, atom: AtomInit, chi: float, g: float, delta):
    if AtomInit(atom) is AtomInit.EXCITED:
        return avg_inversion_excited(dist, chi, g, delta)
    return avg_inversion_ground(dist, chi, g, delta)


def _check_grid(grid, name: str) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError(f"{name} grid must be strictly increasing")
    return grid


def _format(x: float) -> str:
    return repr(float(x))


def _write_meta(buf: io.StringIO, meta: dict):
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")


@dataclass(frozen=True)
class LineShape:
    deltas: np.ndarray
    values: np.ndarray
    atom_init: AtomInit
    field: FieldSpec
    chi: float
    g: float
    n_max: int = 0
    tail_bound: float = 0.0

    def to_csv(self, meta: Optional[dict] = None) -> str:
        buf = io.StringIO()
        _write_meta(
            buf,
            {
                "field": self.field,
                "atom": self.atom_init.value,
                "chi": _format(self.chi),
                "g": _format(self.g),
                "n_max": self.n_max,
                "tail_bound": _format(self.tail_bound),
                **(meta or {}),
            },
        )
        buf.write("delta,value\n")
        for x, y in zip(self.deltas, self.values):
            buf.write(f"{_format(x)},{_format(y)}\n")
        return buf.getvalue()


def sweep(
    field: FieldSpec,
    atom_init: AtomInit,
    chi: float,
    g: float,
    delta_grid: Sequence[float],
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
) -> LineShape:
    """Line shape of one field state over a detuning grid."""
    deltas = _check_grid(delta_grid, "delta")
    atom_init = AtomInit(atom_init)
    dist = distribution(field, trunc)
    values = np.atleast_1d(avg_inversion(dist, atom_init, chi, g, deltas))
    return LineShape(deltas, values, atom_init, field, chi, g, dist.n_max, dist.tail_bound)


def coherent_surface(
    nbars: Sequence[float],
    atom_init: AtomInit,
    chi: float,
    g: float,
    delta_grid: Sequence[float],
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Line shapes of coherent fields, one row per mean photon number."""
    nbars = np.asarray(nbars, dtype=float)
    if nbars.ndim != 1 or nbars.size == 0 or np.any(nbars < 0.0):
        raise ValueError("nbar grid must be a non-empty sequence of values >= 0")
    deltas = _check_grid(delta_grid, "delta")

    def row(nbar):
        return sweep(FieldSpec.coherent(math.sqrt(nbar)), atom_init, chi, g, deltas, trunc).values

    with ThreadPoolExecutor(max_workers=parallel.max_workers()) as pool:
        return np.vstack(list(pool.map(row, nbars)))


def odd_cat_alpha_floor(eps_norm: float = EPS_NORM) -> float:
    """Smallest |alpha| whose odd cat has N^2 >= eps_norm."""
    # N^2 = 2(1 - exp(-2 alpha^2)) = eps  =>  alpha^2 = -log1p(-eps/2)/2
    return math.sqrt(-math.log1p(-eps_norm / 2.0) / 2.0)


@dataclass(frozen=True)
class DiscriminationMap:
    """diff[i, j] = line shape of the even cat minus the odd cat at (alphas[i], deltas[j]).

    Rows whose odd cat is degenerate hold NaN and are flagged in ``missing``.
    """

    deltas: np.ndarray
    alphas: np.ndarray
    diff: np.ndarray
    atom_init: AtomInit
    chi: float
    g: float
    alpha_floor: float
    missing: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __post_init__(self):
        if self.diff.shape != (self.alphas.size, self.deltas.size):
            raise ValueError("diff grid does not match the axis lengths")

    def peak_contrast(self) -> np.ndarray:
        """max over delta of |diff|, one value per alpha (NaN where missing)."""
        out = np.full(self.alphas.size, np.nan)
        ok = ~self.missing
        if ok.any():
            out[ok] = np.abs(self.diff[ok]).max(axis=1)
        return out

    def to_csv(self, meta: Optional[dict] = None) -> str:
        buf = io.StringIO()
        _write_meta(
            buf,
            {
                "atom": self.atom_init.value,
                "chi": _format(self.chi),
                "g": _format(self.g),
                "alpha_floor": _format(self.alpha_floor),
                "missing_alphas": ",".join(_format(a) for a in self.alphas[self.missing])
                or "none",
                **(meta or {}),
            },
        )
        buf.write("alpha,delta,diff\n")
        for i, alpha in enumerate(self.alphas):
            for j, delta in enumerate(self.deltas):
                buf.write(f"{_format(alpha)},{_format(delta)},{_format(self.diff[i, j])}\n")
        return buf.getvalue()


def discrimination_map(
    alphas: Sequence[float],
    atom_init: AtomInit,
    chi: float,
    g: float,
    delta_grid: Sequence[float],
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
    strict: bool = True,
) -> DiscriminationMap:
    """Even-minus-odd cat line-shape difference over an (alpha, delta) grid.

    With ``strict`` a degenerate odd cat raises :class:`DegenerateCat`;
    otherwise the row is filled with NaN and marked missing.
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim != 1 or alphas.size == 0:
        raise ValueError("alpha grid must be a non-empty 1-D sequence")
    deltas = _check_grid(delta_grid, "delta")
    atom_init = AtomInit(atom_init)

    def row(alpha):
        try:
            even = distribution(FieldSpec.cat(alpha, 0.0), trunc)
            odd = distribution(FieldSpec.cat(alpha, math.pi), trunc)
        except DegenerateCat:
            if strict:
                raise
            return None
        return avg_inversion(even, atom_init, chi, g, deltas) - avg_inversion(
            odd, atom_init, chi, g, deltas
        )

    with ThreadPoolExecutor(max_workers=parallel.max_workers()) as pool:
        rows = list(pool.map(row, alphas))
    missing = np.array([r is None for r in rows], dtype=bool)
    diff = np.vstack(
        [np.full(deltas.size, np.nan) if r is None else np.atleast_1d(r) for r in rows]
    )
    return DiscriminationMap(deltas, alphas, diff, atom_init, chi, g, odd_cat_alpha_floor(), missing)
