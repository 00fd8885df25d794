"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) and then
asserts at the pinned tolerance.
"""

import math
import time

import numpy as np
import pytest

from cavityline.analysis import envelope, first_revival_time, running_average
from cavityline.dynamics import AtomInit, ModelParams, inversion_excited, inversion_ground
from cavityline.lineshape import (
    avg_inversion,
    avg_inversion_excited,
    avg_inversion_ground,
    discrimination_map,
)
from cavityline.photon_stats import FieldSpec, cat_distribution, coherent_distribution, distribution
from cavityline.verify import (
    DEFAULT_CHIS,
    DEFAULT_DELTAS,
    DEFAULT_FIELDS,
    check_inversion,
    check_rabi_gaps,
    check_vacuum_rabi,
)

pytestmark = pytest.mark.acceptance

DELTA_GRID = np.linspace(-20.0, 20.0, 801)
# exactly mirrored copy of the positive half, for bit-level symmetry checks
POS_DELTAS = np.linspace(0.0, 20.0, 401)


def test_oracle_equivalence(criterion):
    fields = [FieldSpec.parse(f) for f in DEFAULT_FIELDS]
    times = np.linspace(0.0, 50.0, 200)
    start = time.perf_counter()
    result = check_inversion(DEFAULT_DELTAS, DEFAULT_CHIS, fields, 1.0, times)
    elapsed = time.perf_counter() - start
    ok = result.cases == 90 and result.max_dev <= 1e-8 and elapsed <= 30.0
    criterion(
        "oracle equivalence |W_closed - W_oracle| <= 1e-8, <= 30 s",
        ok,
        f"max dev {result.max_dev:.2e} over {result.cases} cases, {elapsed:.2f} s",
    )
    assert result.cases == 90
    assert result.max_dev <= 1e-8
    assert elapsed <= 30.0


def test_rabi_frequency_validation(criterion):
    result = check_rabi_gaps(DEFAULT_DELTAS, DEFAULT_CHIS, 1.0, n_max=200)
    criterion(
        "sector eigenvalue gap == beta_n within 1e-10 for n <= 200",
        result.passed,
        f"max dev {result.max_dev:.2e}",
    )
    assert result.max_dev <= 1e-10


def test_vacuum_rabi(criterion):
    result = check_vacuum_rabi(np.linspace(0.0, 50.0, 5001))
    criterion("vacuum Rabi W(t) = cos(2t) within 1e-12", result.passed, f"max dev {result.max_dev:.2e}")
    assert result.max_dev <= 1e-12


def test_collapse_revival_and_stark_shortening(criterion):
    t = np.linspace(0.0, 50.0, 5001)
    dist = coherent_distribution(4.0)

    # (a) chi = 0: envelope of |W| collapses below 0.1, then revives above 0.3
    w0 = inversion_excited(dist, ModelParams(1.0, 0.0, 1.0), t)
    env = envelope(t, w0, width=2.0)
    below = np.flatnonzero(env < 0.1)
    collapse_at = t[below[0]] if below.size else math.inf
    later = np.flatnonzero((env > 0.3) & (t > collapse_at))
    revival_at = t[later[0]] if later.size else math.inf
    ok_a = below.size > 0 and later.size > 0
    criterion(
        "chi=0: collapse (envelope < 0.1) then revival (> 0.3)",
        ok_a,
        f"collapse from t={collapse_at:.2f}, revival from t={revival_at:.2f}, peak {env.max():.2f}",
    )

    # (b) the Stark term brings the first revival forward
    peaks = {}
    for chi in (0.0, 0.5):
        w = inversion_excited(dist, ModelParams(1.0, chi, 1.0), t)
        mean = avg_inversion_excited(dist, chi, 1.0, 1.0)
        peaks[chi] = first_revival_time(t, w, mean=mean)
    ok_b = peaks[0.0] is not None and peaks[0.5] is not None and peaks[0.5] < peaks[0.0]
    criterion(
        "first revival earlier at chi=0.5 than chi=0",
        ok_b,
        f"t_rev(chi=0)={peaks[0.0]}, t_rev(chi=0.5)={peaks[0.5]}",
    )
    assert ok_a
    assert ok_b


def test_lineshape_properties(criterion):
    nbars = np.linspace(0.0, 20.0, 41)
    worst_sym = 0.0
    lo_e, hi_e, lo_g, hi_g = math.inf, -math.inf, math.inf, -math.inf
    zero_at_resonance = True
    for nbar in nbars:
        dist = coherent_distribution(math.sqrt(nbar))
        for avg in (avg_inversion_excited, avg_inversion_ground):
            plus = avg(dist, 0.0, 1.0, POS_DELTAS)
            minus = avg(dist, 0.0, 1.0, -POS_DELTAS)
            worst_sym = max(worst_sym, float(np.max(np.abs(plus - minus))))
        for chi in (0.0, 0.25, 0.5):
            we = avg_inversion_excited(dist, chi, 1.0, DELTA_GRID)
            wg = avg_inversion_ground(dist, chi, 1.0, DELTA_GRID)
            lo_e, hi_e = min(lo_e, we.min()), max(hi_e, we.max())
            lo_g, hi_g = min(lo_g, wg.min()), max(hi_g, wg.max())
        zero_at_resonance &= avg_inversion_excited(dist, 0.0, 1.0, 0.0) == 0.0
    ok_sym = worst_sym <= 1e-12
    ok_bounds = lo_e >= 0.0 and hi_e <= 1.0 and lo_g >= -1.0 and hi_g <= 0.0
    criterion("line shape chi=0 symmetry within 1e-12", ok_sym, f"max |W(d) - W(-d)| = {worst_sym:.1e}")
    criterion(
        "line shape bounds W_e in [0,1], W_g in [-1,0]",
        ok_bounds,
        f"W_e in [{lo_e:.3g}, {hi_e:.3g}], W_g in [{lo_g:.3g}, {hi_g:.3g}]",
    )
    criterion("W_e(delta=0, chi=0) == 0 exactly", zero_at_resonance)
    assert ok_sym and ok_bounds and zero_at_resonance


def test_ground_surface_peak(criterion):
    # At chi = 0 the ground line shape is exactly 0 at delta = 0 for every nbar,
    # so the central peak is measured against the curve at the grid edge.
    nbars = np.linspace(0.0, 20.0, 401)
    heights, centre = [], []
    for nbar in nbars:
        dist = coherent_distribution(math.sqrt(nbar))
        w = avg_inversion_ground(dist, 0.0, 1.0, np.array([0.0, 20.0]))
        centre.append(w[0])
        heights.append(w[0] - w[1])
    best = float(nbars[int(np.argmax(heights))])
    ok = 3.0 <= best <= 5.0 and all(c == 0.0 for c in centre)
    criterion(
        "ground-surface central peak height maximal for nbar in [3, 5]",
        ok,
        f"argmax nbar = {best:.2f}, height {max(heights):.4f}",
    )
    assert ok


def test_discrimination_decay(criterion):
    alphas = np.sqrt([1.0, 4.0, 9.0])
    dmap = discrimination_map(alphas, AtomInit.EXCITED, 0.5, 1.0, DELTA_GRID)
    contrast = dmap.peak_contrast()
    ok = bool(contrast[0] > contrast[1] > contrast[2])
    criterion(
        "max_delta |W_even - W_odd| strictly decreasing over nbar = 1, 4, 9",
        ok,
        ", ".join(f"{c:.3e}" for c in contrast),
    )
    assert ok


def test_ground_beats_excited_discrimination(criterion):
    excited = discrimination_map([1.0], AtomInit.EXCITED, 0.5, 1.0, DELTA_GRID).peak_contrast()[0]
    ground = discrimination_map([1.0], AtomInit.GROUND, 0.5, 1.0, DELTA_GRID).peak_contrast()[0]
    ok = ground > excited
    criterion(
        "alpha=1 discrimination: ground-start contrast > excited-start",
        ok,
        f"ground {ground:.4f} vs excited {excited:.4f}",
    )
    assert ok


def test_parity_exactness(criterion):
    alphas = np.concatenate([np.linspace(0.01, 5.0, 100), [1e-4, 10.0, 20.0]])
    bad = 0
    for a in alphas:
        bad += int(np.count_nonzero(cat_distribution(a, 0.0).probs[1::2]))
        bad += int(np.count_nonzero(cat_distribution(a, math.pi).probs[0::2]))
    criterion("cat parity: forbidden-parity probabilities exactly zero", bad == 0, f"{alphas.size} alphas")
    assert bad == 0


def _chunked_inversion(dist, atom, params, t, chunk=100_000):
    closed = inversion_excited if atom is AtomInit.EXCITED else inversion_ground
    return np.concatenate([closed(dist, params, t[i : i + chunk]) for i in range(0, t.size, chunk)])


def test_time_average_consistency(criterion):
    rng = np.random.default_rng(2024)
    dt = 0.01
    t = np.arange(0.0, 2e4 + dt / 2, dt)
    lines, ok = [], True
    for k in range(5):
        alpha = rng.uniform(0.3, 2.0)
        spec = FieldSpec.coherent(alpha) if k % 2 == 0 else FieldSpec.cat(alpha, rng.choice([0.0, math.pi]))
        delta, chi = rng.uniform(-3.0, 3.0), rng.uniform(0.0, 0.5)
        atom = AtomInit.EXCITED if k % 2 == 0 else AtomInit.GROUND
        dist = distribution(spec)
        avg = running_average(t, _chunked_inversion(dist, atom, ModelParams(delta, chi, 1.0), t))
        target = avg_inversion(dist, atom, chi, 1.0, delta)

        def window_error(T):
            # worst deviation of the running average over [T, 2T]; the error at a
            # single T oscillates like sin(beta T)/(beta T)
            i0, i1 = int(round(T / dt)), int(round(2 * T / dt))
            return float(np.max(np.abs(avg[i0 : i1 + 1] - target)))

        at_1e4 = abs(avg[int(round(1e4 / dt))] - target)
        e3, e4 = window_error(1e3), window_error(1e4)
        ratio = e3 / e4
        case_ok = at_1e4 <= 5e-3 and e4 <= 5e-3 and 5.0 <= ratio <= 20.0
        ok &= case_ok
        lines.append(f"{spec} {atom.value}: err(1e4)={at_1e4:.1e} ratio={ratio:.1f}")
    criterion(
        "time-average -> closed form within 5e-3 at T=1e4, error ratio 1e3/1e4 in [5, 20]",
        ok,
        "; ".join(lines),
    )
    assert ok
