"""Photon-number distributions for Fock, coherent and Schrodinger-cat fields.

Every distribution is a finite array ``probs[0..n_max]`` together with a
rigorous upper bound on the probability mass discarded past ``n_max``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

EPS_NORM = 1e-9
EPS_TAIL = 1e-12
MAX_MEAN_PHOTONS = 700.0


class DegenerateCat(ValueError):
    """Raised when a cat superposition is (numerically) the null vector."""


class FieldKind(enum.Enum):
    FOCK = "fock"
    COHERENT = "coherent"
    CAT = "cat"


@dataclass(frozen=True)
class FieldSpec:
    """Initial state of the cavity mode.

    Build with :meth:`fock`, :meth:`coherent`, :meth:`cat` or :meth:`parse`.
    ``str(spec)`` gives back a string that :meth:`parse` accepts.
    """

    kind: FieldKind
    n0: int = 0
    alpha: complex = 0j
    phi: float = 0.0

    def __post_init__(self):
        if self.kind is FieldKind.FOCK and self.n0 < 0:
            raise ValueError(f"Fock photon number must be >= 0, got {self.n0}")
        if self.kind is FieldKind.CAT:
            n2 = cat_norm(self.alpha, self.phi) ** 2
            if n2 < EPS_NORM:
                raise DegenerateCat(
                    f"cat state with alpha={self.alpha}, phi={self.phi} has "
                    f"N^2={n2:.3e} < {EPS_NORM:g}"
                )

    @classmethod
    def fock(cls, n0: int) -> "FieldSpec":
        return cls(FieldKind.FOCK, n0=int(n0))

    @classmethod
    def coherent(cls, alpha: complex) -> "FieldSpec":
        return cls(FieldKind.COHERENT, alpha=complex(alpha))

    @classmethod
    def cat(cls, alpha: complex, phi: float) -> "FieldSpec":
        return cls(FieldKind.CAT, alpha=complex(alpha), phi=float(phi))

    @property
    def nbar(self) -> float:
        """|alpha|^2, or n0 for a Fock state."""
        if self.kind is FieldKind.FOCK:
            return float(self.n0)
        return abs(self.alpha) ** 2

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``fock:<n>``, ``coherent:<re>[,<im>]`` or ``cat:<re>[,<im>]:<phi>``.

        ``phi`` is a float in radians or one of ``pi``, ``-pi``, ``pi/2``.
        """
        parts = text.strip().split(":")
        kind = parts[0].lower()
        try:
            if kind == "fock" and len(parts) == 2:
                n0 = int(parts[1])
                return cls.fock(n0)
            if kind == "coherent" and len(parts) == 2:
                return cls.coherent(_parse_complex(parts[1]))
            if kind == "cat" and len(parts) == 3:
                return cls.cat(_parse_complex(parts[1]), _parse_phase(parts[2]))
        except DegenerateCat:
            raise
        except ValueError as exc:
            raise ValueError(f"bad field spec {text!r}: {exc}") from None
        raise ValueError(
            f"bad field spec {text!r}; expected fock:<n>, coherent:<re>[,<im>] "
            "or cat:<re>[,<im>]:<phi>"
        )

    def __str__(self) -> str:
        if self.kind is FieldKind.FOCK:
            return f"fock:{self.n0}"
        amp = _format_complex(self.alpha)
        if self.kind is FieldKind.COHERENT:
            return f"coherent:{amp}"
        return f"cat:{amp}:{_format_phase(self.phi)}"


def _parse_complex(text: str) -> complex:
    pieces = text.split(",")
    if len(pieces) == 1:
        return complex(float(pieces[0]), 0.0)
    if len(pieces) == 2:
        return complex(float(pieces[0]), float(pieces[1]))
    raise ValueError(f"amplitude {text!r} must be <re> or <re>,<im>")


_PHASE_RE = re.compile(r"^(-?)(\d*\.?\d*)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def _parse_phase(text: str) -> float:
    s = text.strip().lower()
    m = _PHASE_RE.match(s)
    if m:
        sign = -1.0 if m.group(1) else 1.0
        factor = float(m.group(2)) if m.group(2) else 1.0
        divisor = float(m.group(3)) if m.group(3) else 1.0
        return sign * factor * math.pi / divisor
    return float(s)


def _format_complex(z: complex) -> str:
    if z.imag == 0.0:
        return repr(z.real)
    return f"{z.real!r},{z.imag!r}"


def _format_phase(phi: float) -> str:
    if phi == math.pi:
        return "pi"
    if phi == -math.pi:
        return "-pi"
    return repr(phi)


@dataclass(frozen=True)
class TruncationPolicy:
    """How far the infinite photon-number sums are carried.

    ``n_max`` starts at ``max(min_n_max, ceil(nbar + sigmas*sqrt(nbar + 1)))``
    and grows until the bound on the discarded tail is below ``eps_tail``.
    """

    eps_tail: float = EPS_TAIL
    min_n_max: int = 32
    sigmas: float = 12.0

    def __post_init__(self):
        if not self.eps_tail > 0.0:
            raise ValueError("eps_tail must be positive")

    def initial_n_max(self, nbar: float) -> int:
        return max(self.min_n_max, math.ceil(nbar + self.sigmas * math.sqrt(nbar + 1.0)))


DEFAULT_TRUNCATION = TruncationPolicy()


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number distribution.

    Attributes:
        probs: P_n for n = 0..n_max.
        tail_bound: upper bound on the mass at n > n_max.
        mean_n: exact mean photon number of the untruncated state.
    """

    probs: np.ndarray
    tail_bound: float = 0.0
    mean_n: float = field(default=0.0)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-D sequence")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("every probability must lie in [0, 1]")
        total = math.fsum(p)
        if total > 1.0 + 1e-12 or total + self.tail_bound < 1.0 - 1e-12:
            raise ValueError(
                f"probabilities sum to {total!r} with tail bound {self.tail_bound!r}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def __len__(self) -> int:
        return self.probs.size

    @classmethod
    def from_probs(cls, probs) -> "PhotonDistribution":
        """Wrap an explicit, already-normalized probability vector."""
        p = np.asarray(probs, dtype=float)
        mean = math.fsum(np.arange(p.size) * p)
        return cls(p, tail_bound=0.0, mean_n=mean)


def cat_norm(alpha: complex, phi: float) -> float:
    """Normalization constant N = sqrt(2[1 + exp(-2|alpha|^2) cos(phi)]) of a cat state."""
    nbar = abs(alpha) ** 2
    c = math.cos(phi)
    # 1 + e^{-2 nbar} c, written so phi = pi and small alpha keep full precision
    inner = (1.0 + c) + c * math.expm1(-2.0 * nbar)
    return math.sqrt(2.0 * max(inner, 0.0))


def _poisson(nbar: float, n_max: int) -> np.ndarray:
    # running recurrence, never n! or Gamma directly
    p = np.empty(n_max + 1)
    p[0] = math.exp(-nbar)
    for n in range(n_max):
        p[n + 1] = p[n] * nbar / (n + 1)
    return p


def _poisson_tail_bound(last: float, nbar: float, n_max: int) -> float:
    """Bound sum_{k > n_max} of Poisson(nbar) given P_{n_max} = ``last``.

    Consecutive ratios past n_max are at most r = nbar/(n_max + 2) once
    n_max + 2 > nbar, so the tail is below a geometric series.
    """
    first = last * nbar / (n_max + 1)
    r = nbar / (n_max + 2)
    if r >= 1.0:
        return math.inf
    return first / (1.0 - r)


def _truncated_poisson(nbar: float, scale: float, trunc: TruncationPolicy):
    if nbar > MAX_MEAN_PHOTONS:
        raise ValueError(f"mean photon number {nbar} exceeds supported {MAX_MEAN_PHOTONS}")
    n_max = trunc.initial_n_max(nbar)
    while True:
        p = _poisson(nbar, n_max)
        tail = scale * _poisson_tail_bound(p[-1], nbar, n_max)
        if tail <= trunc.eps_tail:
            return p, tail
        n_max = int(n_max * 1.25) + 1


def fock_distribution(n0: int) -> PhotonDistribution:
    probs = np.zeros(n0 + 1)
    probs[n0] = 1.0
    return PhotonDistribution(probs, tail_bound=0.0, mean_n=float(n0))


def coherent_distribution(
    alpha: complex, trunc: TruncationPolicy = DEFAULT_TRUNCATION
) -> PhotonDistribution:
    """Poisson distribution with mean |alpha|^2."""
    nbar = abs(alpha) ** 2
    probs, tail = _truncated_poisson(nbar, 1.0, trunc)
    return PhotonDistribution(probs, tail_bound=tail, mean_n=nbar)


def cat_distribution(
    alpha: complex, phi: float, trunc: TruncationPolicy = DEFAULT_TRUNCATION
) -> PhotonDistribution:
    """Photon statistics of (|alpha> + e^{i phi}|-alpha>)/N.

    P_n = (2/N^2) e^{-|alpha|^2} |alpha|^{2n}/n! [1 + (-1)^n cos(phi)].

    Raises:
        DegenerateCat: if N^2 < EPS_NORM.
    """
    norm2 = cat_norm(alpha, phi) ** 2
    if norm2 < EPS_NORM:
        raise DegenerateCat(
            f"cat state with alpha={alpha}, phi={phi} has N^2={norm2:.3e} < {EPS_NORM:g}"
        )
    nbar = abs(alpha) ** 2
    c = math.cos(phi)
    weight = 2.0 / norm2
    # the parity factor never exceeds 1 + |cos phi|
    poisson, tail = _truncated_poisson(nbar, weight * (1.0 + abs(c)), trunc)
    parity = np.ones(poisson.size)
    parity[1::2] = -1.0
    probs = weight * poisson * (1.0 + parity * c)
    mean = nbar * (2.0 - norm2 / 2.0) / (norm2 / 2.0)
    return PhotonDistribution(np.clip(probs, 0.0, 1.0), tail_bound=tail, mean_n=mean)


def distribution(
    spec: FieldSpec, trunc: TruncationPolicy = DEFAULT_TRUNCATION
) -> PhotonDistribution:
    """Dispatch on ``spec.kind``."""
    if spec.kind is FieldKind.FOCK:
        return fock_distribution(spec.n0)
    if spec.kind is FieldKind.COHERENT:
        return coherent_distribution(spec.alpha, trunc)
    return cat_distribution(spec.alpha, spec.phi, trunc)
