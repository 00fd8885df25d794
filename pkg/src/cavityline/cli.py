"""Command-line front end: ``cavityline {dynamics,lineshape,discriminate,verify}``.

Exit codes: 0 ok, 1 a verification check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import os
import shlex
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    AtomInit,
    ModelParams,
    evolve,
    ground_weight,
    inversion,
    inversion_excited,
    inversion_ground,
    state_from,
)
from .lineshape import _format, coherent_surface, discrimination_map, sweep
from .photon_stats import DEFAULT_TRUNCATION, FieldSpec, TruncationPolicy, distribution
from .verify import corrupted_rabi, run_verification

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _range(text: str) -> np.ndarray:
    """``a:b:n`` -> n points from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range {text!r} must look like a:b:n")
    if n < 1:
        raise argparse.ArgumentTypeError(f"range {text!r} needs at least one point")
    if n > 1 and not b > a:
        raise argparse.ArgumentTypeError(f"range {text!r} must be increasing (a < b)")
    return np.linspace(a, b, n)


def _float_list(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers")


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not x > 0.0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return x


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if n < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be >= 0")
    return n


def _range_str(grid: np.ndarray) -> str:
    return f"{_format(grid[0])}:{_format(grid[-1])}:{grid.size}"


RANGE_FLAGS = ("--delta-range", "--alpha-range", "--nbar-range")


def _join_range_values(argv: list[str]) -> list[str]:
    """Turn ``--delta-range -20:20:801`` into ``--delta-range=-20:20:801``.

    argparse would otherwise read the leading minus as a new option.
    """
    out: list[str] = []
    it = iter(argv)
    for token in it:
        if token in RANGE_FLAGS:
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def _common(p: argparse.ArgumentParser, *, field: str | None, chi: float, atoms: list[str], atom: str):
    p.add_argument("--field", type=_field, default=None if field is None else _field(field),
                   help="fock:<n>, coherent:<re>[,<im>] or cat:<re>[,<im>]:<phi>"
                   + (f" (default {field})" if field else ""))
    p.add_argument("--atom", choices=atoms, default=atom, help=f"initial atomic state (default {atom})")
    p.add_argument("--chi", type=float, default=chi, help=f"Stark strength (default {chi})")
    p.add_argument("--coupling", type=_positive, default=1.0, help="coupling g (default 1)")
    p.add_argument("--trunc-tail", type=_positive, default=DEFAULT_TRUNCATION.eps_tail,
                   help="bound on discarded photon-number tail (default 1e-12)")
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityline",
        description="Jaynes-Cummings dynamics with an AC Stark term and line-shape analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dynamics", help="atomic inversion W(t)")
    _common(p, field="coherent:4", chi=0.0, atoms=["excited", "ground", "both"], atom="excited")
    p.add_argument("--delta", type=float, default=1.0, help="detuning (default 1)")
    p.add_argument("--t-max", type=_positive, default=50.0, help="final time in 1/g (default 50)")
    p.add_argument("--t-samples", type=_count, default=5001, help="number of time samples (default 5001)")
    p.add_argument("--phases", type=_float_list, default=None,
                   help="comma-separated initial phases theta_n; propagates amplitudes sector by sector")

    p = sub.add_parser("lineshape", help="time-averaged inversion vs detuning")
    _common(p, field=None, chi=0.0, atoms=["excited", "ground"], atom="excited")
    p.add_argument("--delta-range", type=_range, default=_range("-20:20:801"),
                   help="detuning grid a:b:n (default -20:20:801)")
    p.add_argument("--nbar-range", type=_range, default=_range("0:20:81"),
                   help="coherent mean photon numbers a:b:n for a surface when --field is absent "
                   "(default 0:20:81)")

    p = sub.add_parser("discriminate", help="even-minus-odd cat line-shape difference")
    _common(p, field=None, chi=0.5, atoms=["excited", "ground", "both"], atom="both")
    p.add_argument("--delta-range", type=_range, default=_range("-20:20:801"),
                   help="detuning grid a:b:n (default -20:20:801)")
    p.add_argument("--alpha-range", type=_range, default=_range("0.05:2:40"),
                   help="cat amplitudes a:b:n (default 0.05:2:40)")

    p = sub.add_parser("verify", help="closed form vs brute-force propagator")
    p.add_argument("--deltas", type=_float_list, default=None, help="comma list (default 0,1,5)")
    p.add_argument("--chis", type=_float_list, default=None, help="comma list (default 0,0.25,0.5)")
    p.add_argument("--fields", default=None,
                   help="semicolon-separated field specs (default fock:0;fock:3;coherent:2;cat:2:0;cat:2:pi)")
    p.add_argument("--coupling", type=_positive, default=1.0)
    p.add_argument("--t-max", type=_positive, default=50.0)
    p.add_argument("--t-samples", type=_count, default=200)
    p.add_argument("--inject-fault", choices=["beta"], default=None, help=argparse.SUPPRESS)
    return parser


def write_atomically(path: str, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename; '-' means stdout."""
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _trunc(args) -> TruncationPolicy:
    return TruncationPolicy(eps_tail=args.trunc_tail)


def _provenance(argv_like: list[str]) -> dict:
    return {"command": "cavityline " + shlex.join(argv_like), "version": __version__}


def cmd_dynamics(args) -> int:
    if args.t_samples < 1:
        raise UsageError("--t-samples must be at least 1")
    params = ModelParams(args.delta, args.chi, args.coupling)
    dist = distribution(args.field, _trunc(args))
    times = np.linspace(0.0, args.t_max, args.t_samples)
    atoms = list(AtomInit) if args.atom == "both" else [AtomInit(args.atom)]

    columns = []
    for atom in atoms:
        if args.phases is not None:
            state = state_from(dist, atom, phases=args.phases, renormalize=False)
            columns.append(np.array([inversion(evolve(state, params, t)) for t in times]))
        elif atom is AtomInit.EXCITED:
            columns.append(np.atleast_1d(inversion_excited(dist, params, times)))
        else:
            columns.append(np.atleast_1d(inversion_ground(dist, params, times)))

    argv = ["dynamics", "--field", str(args.field), "--atom", args.atom,
            "--delta", _format(args.delta), "--chi", _format(args.chi),
            "--coupling", _format(args.coupling), "--t-max", _format(args.t_max),
            "--t-samples", str(args.t_samples), "--trunc-tail", _format(args.trunc_tail)]
    if args.phases is not None:
        argv += ["--phases", ",".join(_format(x) for x in args.phases)]
    meta = {
        **_provenance(argv),
        "field": args.field,
        "delta": _format(args.delta),
        "chi": _format(args.chi),
        "g": _format(args.coupling),
        "n_max": dist.n_max,
        "tail_bound": _format(dist.tail_bound),
    }
    if AtomInit.GROUND in atoms and dist.probs[0] > 0.0:
        w = ground_weight(dist)
        meta["note"] = (
            f"ground-atom W(t) uses the raw weights P_(n+1) (total 1-P_0 = {_format(w)}); "
            f"a renormalized ground-ladder state gives W/(1-P_0)"
        )
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    names = ["W"] if len(atoms) == 1 else [f"W_{a.value}" for a in atoms]
    buf.write(",".join(["t"] + names) + "\n")
    for i, t in enumerate(times):
        buf.write(",".join([_format(t)] + [_format(col[i]) for col in columns]) + "\n")
    write_atomically(args.out, buf.getvalue())
    return EXIT_OK


def cmd_lineshape(args) -> int:
    atom = AtomInit(args.atom)
    deltas = args.delta_range
    trunc = _trunc(args)
    base = ["lineshape", "--atom", args.atom, "--chi", _format(args.chi),
            "--coupling", _format(args.coupling), "--delta-range=" + _range_str(deltas),
            "--trunc-tail", _format(args.trunc_tail)]
    if args.field is not None:
        shape = sweep(args.field, atom, args.chi, args.coupling, deltas, trunc)
        text = shape.to_csv(_provenance(base + ["--field", str(args.field)]))
    else:
        nbars = args.nbar_range
        surface = coherent_surface(nbars, atom, args.chi, args.coupling, deltas, trunc)
        buf = io.StringIO()
        meta = {
            **_provenance(base + ["--nbar-range=" + _range_str(nbars)]),
            "field": "coherent, alpha = sqrt(nbar)",
            "atom": atom.value,
            "chi": _format(args.chi),
            "g": _format(args.coupling),
        }
        for k, v in meta.items():
            buf.write(f"# {k}: {v}\n")
        buf.write("nbar,delta,value\n")
        for i, nbar in enumerate(nbars):
            for j, delta in enumerate(deltas):
                buf.write(f"{_format(nbar)},{_format(delta)},{_format(surface[i, j])}\n")
        text = buf.getvalue()
    write_atomically(args.out, text)
    return EXIT_OK


def _suffixed(path: str, atom: AtomInit) -> str:
    if path == "-":
        return path
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{atom.value}{p.suffix or '.csv'}"))


def cmd_discriminate(args) -> int:
    atoms = list(AtomInit) if args.atom == "both" else [AtomInit(args.atom)]
    trunc = _trunc(args)
    for atom in atoms:
        dmap = discrimination_map(
            args.alpha_range, atom, args.chi, args.coupling, args.delta_range, trunc, strict=False
        )
        for alpha in dmap.alphas[dmap.missing]:
            print(f"warning: odd cat degenerate at alpha={_format(alpha)}; row reported as nan",
                  file=sys.stderr)
        argv = ["discriminate", "--atom", atom.value, "--chi", _format(args.chi),
                "--coupling", _format(args.coupling),
                "--alpha-range=" + _range_str(args.alpha_range),
                "--delta-range=" + _range_str(args.delta_range),
                "--trunc-tail", _format(args.trunc_tail)]
        out = args.out if len(atoms) == 1 else _suffixed(args.out, atom)
        write_atomically(out, dmap.to_csv(_provenance(argv)))
    return EXIT_OK


def cmd_verify(args) -> int:
    deltas = [0.0, 1.0, 5.0] if args.deltas is None else args.deltas
    chis = [0.0, 0.25, 0.5] if args.chis is None else args.chis
    if args.fields is None:
        fields = ["fock:0", "fock:3", "coherent:2", "cat:2:0", "cat:2:pi"]
    else:
        fields = [f for f in args.fields.split(";") if f.strip()]
    if not deltas or not chis or not fields or args.t_samples < 1:
        raise UsageError("verification grid is empty")
    try:
        specs = [FieldSpec.parse(f) for f in fields]
    except ValueError as exc:
        raise UsageError(f"--fields: {exc}")

    if args.inject_fault == "beta":
        with corrupted_rabi():
            results = run_verification(deltas, chis, specs, args.coupling, args.t_max, args.t_samples)
    else:
        results = run_verification(deltas, chis, specs, args.coupling, args.t_max, args.t_samples)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "dynamics": cmd_dynamics,
    "lineshape": cmd_lineshape,
    "discriminate": cmd_discriminate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_range_values(list(argv)))
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"cavityline {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
