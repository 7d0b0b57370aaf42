"""Command-line entry point: ``ddicool <subcommand> [--config FILE] [overrides]``.

Exit codes: 0 success, 2 scenario error, 3 solver error (degenerate steady
state), 4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from .geometry import MIN_SPACING, coupling_matrices, find_magic_spacings
from .experiments.runner import (
    HEXAGON_SUBSETS,
    run_detuning_diagram,
    run_hexagon_suite,
    run_isosceles_sweep,
    run_scenario,
    run_spacing_sweep,
)
from .experiments.scenario import (
    Scenario,
    ScenarioError,
    SweepRecord,
    format_number,
    load_scenario,
    render_records,
    write_records,
)

log = logging.getLogger("ddicool")

EXIT_OK, EXIT_SCENARIO, EXIT_SOLVER, EXIT_INVARIANT = 0, 2, 3, 4


def _spacing(text: str):
    return text if text == "magic" else float(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario YAML file")
    p.add_argument("--gamma", type=float, help="Gamma in units of nu")
    p.add_argument("--delta", type=float, help="Delta in units of nu")
    p.add_argument("--eta-omega", type=float, dest="eta_omega", help="target drive eta*Omega / nu")
    p.add_argument("--nc", type=int, dest="n_cut", help="phonon cutoff")
    p.add_argument("--spacing", type=_spacing, help="spacing in wavelengths, or 'magic'")
    p.add_argument("--theta", type=float, help="dipole angle from the x axis (rad)")
    p.add_argument("--out", dest="output", help="output file (default: stdout)")
    p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddicool", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("couplings", help="print shift and decay matrices of a geometry")
    _add_common(p)
    p = sub.add_parser("magic", help="list magic spacings at the given theta")
    _add_common(p)
    p.add_argument("--s-min", type=float, default=MIN_SPACING)
    p.add_argument("--s-max", type=float, default=1.0)
    p = sub.add_parser("steady", help="solve one configuration")
    _add_common(p)
    p = sub.add_parser("sweep-spacing", help="ratio vs spacing for a line or triangle")
    _add_common(p)
    p.add_argument("--kind", choices=("line", "triangle"))
    p.add_argument("--s-min", type=float, default=0.05)
    p.add_argument("--s-max", type=float, default=1.0)
    p.add_argument("--points", type=int)
    p = sub.add_parser("sweep-detuning", help="two-atom ratio over spacing and detuning")
    _add_common(p)
    p.add_argument("--s-min", type=float, default=0.1)
    p.add_argument("--s-max", type=float, default=1.0)
    p.add_argument("--offset-min", type=float, default=-1.5, help="lower (Delta+nu)/Gamma")
    p.add_argument("--offset-max", type=float, default=1.0, help="upper (Delta+nu)/Gamma")
    p.add_argument("--points", type=int, nargs=2, default=(100, 100), metavar=("NS", "ND"))
    p = sub.add_parser("sweep-angle", help="ratio vs isosceles apex angle")
    _add_common(p)
    p.add_argument("--points", type=int, default=90)
    p = sub.add_parser("hexagon", help="target at hexagon center, spectators on vertices")
    _add_common(p)
    p.add_argument("--vertices", action="append",
                   help="occupied vertices like 0,2,4 (repeatable; default: all distinct 3- and 4-subsets)")
    return parser


def _scenario(args) -> Scenario:
    scn = load_scenario(args.config) if args.config else Scenario()
    return scn.with_overrides(
        gamma=args.gamma, delta=args.delta, eta_omega=args.eta_omega, n_cut=args.n_cut,
        spacing=args.spacing, theta=args.theta, output=args.output, jobs=args.jobs,
    )


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(record: SweepRecord, scn: Scenario) -> int:
    if scn.output:
        write_records(record, scn.output)
        log.info("wrote %d rows to %s", len(record.rows), scn.output)
    else:
        sys.stdout.write(render_records(record))
    errors = [r["error"] for r in record.rows if r.get("error")]
    if any("InvariantViolation" in e or "residual" in e or "eigenvalue" in e for e in errors):
        return EXIT_INVARIANT
    if any("DegenerateSteadyState" in e for e in errors):
        return EXIT_SOLVER
    if any("ValueError" in e for e in errors):
        return EXIT_SCENARIO
    return EXIT_OK


def _jobs(scn: Scenario, args) -> int | None:
    return args.jobs if args.jobs is not None else (scn.jobs if args.config else None)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scn = _scenario(args)
        cmd = args.command
        if cmd == "couplings":
            config = scn.geometry.build(scn.spacing, scn.theta)
            c = coupling_matrices(config, scn.gamma)
            lines = ["# shifts / Gamma"]
            lines += [",".join(format_number(x) for x in row) for row in c.shifts / c.gamma]
            lines += ["# decays / Gamma"]
            lines += [",".join(format_number(x) for x in row) for row in c.decays / c.gamma]
            _emit("\n".join(lines) + "\n", scn.output)
            return EXIT_OK
        if cmd == "magic":
            roots = find_magic_spacings(scn.theta, (args.s_min, args.s_max))
            _emit("".join(format_number(r) + "\n" for r in roots), scn.output)
            return EXIT_OK
        if scn.sweep and cmd != "hexagon":
            return _finish(run_scenario(scn, cmd, _jobs(scn, args)), scn)
        if cmd == "steady":
            return _finish(run_scenario(scn, "steady state", 1), scn)
        if cmd == "sweep-spacing":
            kind = args.kind or (scn.geometry.kind if scn.geometry.kind in ("line", "triangle") else "line")
            rec = run_spacing_sweep(kind, (args.s_min, args.s_max), args.points,
                                    n_atoms=scn.geometry.atoms if kind == "line" else 3,
                                    base=scn, jobs=_jobs(scn, args))
            return _finish(rec, scn)
        if cmd == "sweep-detuning":
            rec = run_detuning_diagram((args.s_min, args.s_max), (args.offset_min, args.offset_max),
                                       tuple(args.points), base=scn, jobs=_jobs(scn, args))
            return _finish(rec, scn)
        if cmd == "sweep-angle":
            rec = run_isosceles_sweep((math.pi / args.points, math.pi), args.points,
                                      side=scn.spacing, base=scn, jobs=_jobs(scn, args))
            return _finish(rec, scn)
        if cmd == "hexagon":
            if args.vertices:
                subsets = [tuple(int(v) for v in s.replace("-", ",").split(",")) for s in args.vertices]
            elif scn.geometry.kind == "hexagon" and args.config:
                subsets = [scn.geometry.vertices]
            else:
                subsets = list(HEXAGON_SUBSETS)
            rec = run_hexagon_suite(subsets, side=scn.spacing, base=scn, jobs=_jobs(scn, args))
            return _finish(rec, scn)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
