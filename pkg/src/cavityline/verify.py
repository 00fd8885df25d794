"""Closed-form vs. brute-force equivalence checks."""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Iterator, Sequence
from unittest import mock

import numpy as np

from . import dynamics
from .dynamics import AtomInit, ModelParams, state_from
from .oracle import build_hamiltonian, inversion_numeric, propagate_numeric
from .photon_stats import FieldSpec, distribution

DEFAULT_DELTAS = (0.0, 1.0, 5.0)
DEFAULT_CHIS = (0.0, 0.25, 0.5)
DEFAULT_FIELDS = ("fock:0", "fock:3", "coherent:2", "cat:2:0", "cat:2:pi")

TOL_INVERSION = 1e-8
TOL_GAP = 1e-10
TOL_AMPLITUDE = 1e-8
TOL_VACUUM_RABI = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_dev: float
    tol: float
    cases: int

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.max_dev <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:<22} max|dev| = {self.max_dev:.3e}  "
            f"(tol {self.tol:.0e}, {self.cases} cases)"
        )


def closed_inversion(dist, params: ModelParams, atom: AtomInit, times):
    if atom is AtomInit.EXCITED:
        return dynamics.inversion_excited(dist, params, times)
    return dynamics.inversion_ground(dist, params, times)


def check_inversion(deltas, chis, fields, g, times) -> CheckResult:
    """Closed-form W(t) against eigen-propagated ladder states.

    Ground-atom states keep the raw sqrt(P_{n+1}) amplitudes so both sides
    carry the same 1 - P_0 weight.
    """
    worst, cases = 0.0, 0
    for delta in deltas:
        for chi in chis:
            params = ModelParams(delta, chi, g)
            for spec in fields:
                dist = distribution(spec)
                for atom in AtomInit:
                    state = state_from(dist, atom, renormalize=False)
                    w_closed = closed_inversion(dist, params, atom, times)
                    w_oracle = inversion_numeric(state, params, times)
                    worst = max(worst, float(np.max(np.abs(w_closed - w_oracle))))
                    cases += 1
    return CheckResult("oracle inversion", worst, TOL_INVERSION, cases)


def check_rabi_gaps(deltas, chis, g, n_max: int = 200) -> CheckResult:
    worst, cases = 0.0, 0
    for delta in deltas:
        for chi in chis:
            params = ModelParams(delta, chi, g)
            gaps = build_hamiltonian(params, n_max).sector_gaps()
            beta = dynamics.rabi_freq(params, np.arange(n_max + 1))
            worst = max(worst, float(np.max(np.abs(gaps - beta))))
            cases += 1
    return CheckResult("rabi gap", worst, TOL_GAP, cases)


def check_amplitudes(deltas, chis, fields, g, times, seed: int = 7) -> CheckResult:
    """Full complex amplitudes (global phase included) under random initial phases."""
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for delta in deltas:
        for chi in chis:
            params = ModelParams(delta, chi, g)
            for spec in fields:
                dist = distribution(spec)
                phases = rng.uniform(0.0, 2.0 * math.pi, dist.n_max + 1)
                state = state_from(dist, AtomInit.EXCITED, phases=phases)
                for t in times:
                    closed = dynamics.evolve(state, params, t).vector()
                    numeric = propagate_numeric(state, params, t).vector()
                    worst = max(worst, float(np.max(np.abs(closed - numeric))))
                    cases += 1
    return CheckResult("oracle amplitudes", worst, TOL_AMPLITUDE, cases)


def check_vacuum_rabi(times) -> CheckResult:
    dist = distribution(FieldSpec.fock(0))
    w = dynamics.inversion_excited(dist, ModelParams(0.0, 0.0, 1.0), times)
    dev = float(np.max(np.abs(w - np.cos(2.0 * np.asarray(times)))))
    return CheckResult("vacuum rabi", dev, TOL_VACUUM_RABI, len(times))


def run_verification(
    deltas: Sequence[float] = DEFAULT_DELTAS,
    chis: Sequence[float] = DEFAULT_CHIS,
    fields: Sequence[str] = DEFAULT_FIELDS,
    g: float = 1.0,
    t_max: float = 50.0,
    t_samples: int = 200,
) -> list[CheckResult]:
    if not deltas or not chis or not fields or t_samples < 1:
        raise ValueError("verification grid is empty")
    specs = [FieldSpec.parse(f) if isinstance(f, str) else f for f in fields]
    times = np.linspace(0.0, t_max, t_samples)
    amp_times = times[:: max(1, t_samples // 5)]
    return [
        check_inversion(deltas, chis, specs, g, times),
        check_rabi_gaps(deltas, chis, g),
        check_amplitudes(deltas, chis, specs, g, amp_times),
        check_vacuum_rabi(times),
    ]


@contextlib.contextmanager
def corrupted_rabi(rel_error: float = 1e-6) -> Iterator[None]:
    """Scale the closed-form Rabi frequency by (1 + rel_error); fault injection only."""
    honest = dynamics.rabi_freq

    def bad(params, n):
        return honest(params, n) * (1.0 + rel_error)

    with mock.patch.object(dynamics, "rabi_freq", bad):
        yield
