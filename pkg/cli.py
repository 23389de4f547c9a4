#!/usr/bin/env python3
"""
cli.py: Command-line front end

    cli.py geodesics --n 2 --a 19.74
    cli.py homology --n 2 --k 1,0 --side morse
    cli.py cz --shear --n 2
    cli.py perturb --k 1
    cli.py flow --chi 0.25 --range -20,20
    cli.py paper --only appendix

Reports go to stdout (JSON by default), status lines to stderr.
Exit codes: 0 success, 1 failed check or rejected input, 2 usage error.
"""

import sys
import time
from fractions import Fraction

import numpy as np

import config
import flows
import geodesics
import homology
import paper
import symplectic_index as cz
from constants import FOUR_PI_SQ, TWO_PI
from errors import DomainError, TorusError
from journal import catch_error, log_run, say
from reports import to_csv, to_json, write_text
from torus_core import FlatTorus, FreeHamiltonian, LatticeVector

# flags whose values may start with '-' (comma lists such as -20,20)
VALUE_FLAGS = ("--range", "--tol", "--kernel-tol", "--quadratic", "--exp-path",
               "--k", "--a", "--q0", "--chi", "--v0")


# === ARGUMENTS ===

def build_parser():
    import argparse
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON file with default flag values')
    common.add_argument('--json', dest='json_path', help='also write the JSON report here')
    common.add_argument('--csv', dest='csv_path', help='also write a CSV table here')
    common.add_argument('--format', choices=config.FORMATS, help='stdout format (default json)')
    common.add_argument('--tol', type=float, help='algebraic tolerance for residuals, closure and degeneracy')
    common.add_argument('--kernel-tol', type=float, help='relative tolerance for ker(Ψ − I) and crossing forms')

    parser = argparse.ArgumentParser(description="Loop spaces of flat tori: geodesics, homology, indices, flows")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('geodesics', parents=[common], help='critical components below an action level')
    p.add_argument('--n', type=int)
    p.add_argument('--a', type=float)

    p = sub.add_parser('homology', parents=[common], help='Morse, Floer or sublevel homology table')
    p.add_argument('--n', type=int)
    p.add_argument('--k', help='winding vector, e.g. 1,0')
    p.add_argument('--side', choices=['morse', 'floer', 'singular'], default='morse')
    p.add_argument('--check-all', action='store_true', help='fail unless all three sides agree')

    p = sub.add_parser('cz', parents=[common], help='Conley–Zehnder indices')
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument('--shear', action='store_true', help='generalized index of the free flow')
    kind.add_argument('--tilted', action='store_true', help='shear pushed off the Maslov cycle')
    kind.add_argument('--rotation', action='store_true', help='crossings of exp(−2πtJ₀)')
    kind.add_argument('--perturbed', choices=['-', '+'], help='linearized pendulum flow Φ∓')
    kind.add_argument('--quadratic', metavar='S', help='ν(S) − n; diagonal "a,b" or rows "a,b;c,d"')
    kind.add_argument('--exp-path', metavar='S', help='crossing sum of exp(−tJ₀S)')
    p.add_argument('--n', type=int)
    p.add_argument('--grid', type=int)

    p = sub.add_parser('perturb', parents=[common], help='pendulum perturbation of one component')
    p.add_argument('--k', help='nonzero winding')
    p.add_argument('--q0', type=float)
    p.add_argument('--samples', type=int)

    p = sub.add_parser('flow', parents=[common], help='χ trajectories, Hamiltonian orbits, cylinders')
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument('--chi', type=float, help='χ(0) of a connecting-orbit trajectory')
    kind.add_argument('--orbit', action='store_true', help='free Hamiltonian orbit over one period')
    kind.add_argument('--cylinder', action='store_true', help='parabolic cylinder from kt + q0 + χ0')
    p.add_argument('--range', default='-20,20', help='s window for --chi')
    p.add_argument('--n', type=int)
    p.add_argument('--k', help='winding (vector for --orbit)')
    p.add_argument('--v0', help='initial covector for --orbit, default (2π)²k')
    p.add_argument('--q0', type=float)
    p.add_argument('--chi0', type=float, default=0.25)
    p.add_argument('--wiggle', type=float, default=0.0, help='amplitude of a sin 2πt term in w0')
    p.add_argument('--method', choices=flows.STEPPERS, default='ifrk4')
    p.add_argument('--chi-steps', type=int)
    p.add_argument('--orbit-steps', type=int)
    p.add_argument('--t-points', type=int)
    p.add_argument('--s-max', type=float)
    p.add_argument('--s-step', type=float)

    p = sub.add_parser('paper', parents=[common], help='recompute every anchored value')
    p.add_argument('--only', choices=paper.GROUPS)
    p.add_argument('--workers', type=int)
    return parser


def glue_negative_values(argv):
    """'--range -20,20' -> '--range=-20,20' so argparse does not read a flag"""
    out, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == '-' \
                and argv[i + 1][1:2] in tuple('0123456789.'):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def parse_matrix(text: str) -> np.ndarray:
    """'a,b' -> diag(a, b); 'a,b;c,d' -> [[a, b], [c, d]]"""
    try:
        rows = [[float(x) for x in row.split(',')] for row in text.split(';')]
    except ValueError:
        raise DomainError(f"cannot read a matrix from {text!r}")
    if len(rows) == 1:
        return np.diag(rows[0])
    if any(len(row) != len(rows) for row in rows):
        raise DomainError(f"matrix {text!r} is not square")
    return np.array(rows)


def parse_pair(text: str):
    try:
        lo, hi = (float(x) for x in text.split(','))
    except ValueError:
        raise DomainError(f"expected two numbers 'a,b', got {text!r}")
    return lo, hi


def parse_winding(text: str) -> LatticeVector:
    try:
        return LatticeVector.parse(text)
    except ValueError:
        raise DomainError(f"winding must be integers separated by commas, got {text!r}")


def scalar_winding(text) -> int:
    k = parse_winding(str(text))
    if k.dim != 1:
        raise DomainError(f"this command takes a single integer winding, got {text!r}")
    return k.entries[0]


# === COMMANDS ===

@catch_error
def cmd_geodesics(cfg, args):
    torus = FlatTorus(cfg.n)
    rows = geodesics.component_table(torus, cfg.a)
    say("GEODESICS", f"{len(rows)} components with 2π²|k|² ≤ {cfg.a:.12g}")
    header = [f"k{j + 1}" for j in range(cfg.n)] + ["energy", "morse_index", "nullity"]
    table = [row["k"] + [row["energy"], row["morse_index"], row["nullity"]] for row in rows]
    report = {"n": cfg.n, "a": cfg.a, "components": rows}
    return report, (header, table), 0


@catch_error
def cmd_homology(cfg, args):
    torus = FlatTorus(cfg.n)
    k = parse_winding(cfg.k)
    if k.dim != cfg.n:
        raise DomainError(f"k = {k} has {k.dim} entries, expected n = {cfg.n}")
    a = homology.action_level(k)
    tables = {
        "morse": lambda: homology.morse_bott_homology(torus, a),
        "floer": lambda: homology.floer_bott_cohomology(torus, a),
        "singular": lambda: homology.sublevel_singular_homology(torus, k),
    }
    table = tables[args.side]()
    report = table.to_dict()
    code = 0
    if args.check_all:
        morse, floer, singular = (tables[s]() for s in ("morse", "floer", "singular"))
        diff = [
            {"degree": i, "morse": morse.group(i).describe(), "floer": floer.group(-i).describe(),
             "singular": singular.group(i).describe()}
            for i in range(cfg.n + 1)
            if not morse.group(i) == floer.group(-i) == singular.group(i)
        ]
        report["check_all"] = "PASS" if not diff else "FAIL"
        if diff:
            report["diff"] = diff
            code = 1
        say("HOMOLOGY", f"three-way check {report['check_all']}")
    say("HOMOLOGY", table.describe())
    rows = [(e["degree"], e["free_rank"], e["torsion"]) for e in report["entries"]]
    return report, (["degree", "free_rank", "torsion"], rows), code


@catch_error
def cmd_cz(cfg, args):
    grid, ktol = cfg.grid, cfg.kernel_tol
    if args.shear:
        n = cfg.n or 1
        report = cz.index_report("shear", n, cz.generalized_cz_shear(n, grid, ktol))
    elif args.tilted:
        report = cz.index_report("tilted", 1, cz.rs_index(cz.tilted_shear(), grid, ktol))
    elif args.rotation:
        n = cfg.n or 1
        path = cz.rotation_path(n)
        crossings = cz.detect_crossings(path, grid, ktol)
        report = {
            "path_kind": "rotation",
            "n": n,
            "crossings": [{"t": c.t, "kernel_dim": c.kernel_dim, "signature": c.form_signature,
                           "boundary": c.boundary} for c in crossings],
        }
    elif args.perturbed:
        path = cz.linearized_flow("perturbed", 1, args.perturbed)
        report = cz.index_report(f"perturbed{args.perturbed}", 1, cz.rs_index(path, grid, ktol))
    elif args.quadratic:
        S = parse_matrix(args.quadratic)
        value = cz.cz_from_quadratic(S, cfg.tol)
        report = cz.index_report("quadratic", len(S) // 2, cz.IndexResult(2 * value, "sz-formula"))
    else:
        S = parse_matrix(args.exp_path)
        result = cz.rs_index(cz.exponential_path(S), grid, ktol)
        report = cz.index_report("exponential", len(S) // 2, result)
    if "value_num" in report:
        report["value"] = str(Fraction(report["value_num"], report["value_den"]))
        say("CZ", f"{report['path_kind']}: {report['value']}")
    rows = [(c["t"], c["kernel_dim"], c["signature"], c["boundary"]) for c in report["crossings"]]
    return report, (["t", "kernel_dim", "signature", "boundary"], rows), 0


@catch_error
def cmd_perturb(cfg, args):
    k = scalar_winding(cfg.k)
    pair = geodesics.perturbed_critical_points(k, cfg.q0, cfg.samples)
    residuals = [geodesics.perturbed_residual(pair.gamma_minus, pair.potential),
                 geodesics.perturbed_residual(pair.gamma_plus, pair.potential)]
    paths = [cz.linearized_flow("perturbed", 1, s) for s in ("-", "+")]
    cz_values = [cz.rs_index(path, cfg.grid, cfg.kernel_tol).numerator // 2 for path in paths]
    count, parity = flows.count_connecting_orbits(k, cfg.q0)
    witten = homology.homology_of_complex(homology.morse_witten_complex_perturbed(k, (count, parity)))
    relation = all(c == -i for c, i in zip(cz_values, pair.indices))
    # second differences carry sample roundoff times N²
    critical = max(residuals) <= cfg.tol * cfg.samples ** 2
    report = {
        "k": k,
        "q0": cfg.q0,
        "actions": list(pair.actions),
        "indices": list(pair.indices),
        "residuals": residuals,
        "cz": cz_values,
        "orbits": {"count": count, "parity": parity},
        "morse_witten": witten.to_dict(),
        "relation": "PASS" if relation else "FAIL",
        "residual_check": "PASS" if critical else "FAIL",
    }
    say("PERTURB", f"k={k}: actions {pair.actions[0]:.12g}, {pair.actions[1]:.12g}; "
                   f"orbits {count} (parity {parity}); relation {report['relation']}")
    rows = [("minus", pair.actions[0], pair.indices[0], cz_values[0], residuals[0]),
            ("plus", pair.actions[1], pair.indices[1], cz_values[1], residuals[1])]
    return report, (["loop", "action", "morse_index", "cz", "residual"], rows), 0 if relation and critical else 1


@catch_error
def cmd_flow(cfg, args):
    if args.chi is not None:
        s_min, s_max = parse_pair(args.range)
        trajectory = flows.integrate_chi(args.chi, s_min, s_max, cfg.chi_steps)
        report = {"kind": "chi", "chi0": args.chi, "range": [s_min, s_max],
                  "limits": list(trajectory.limits),
                  "max_error_vs_closed_form": float(np.max(np.abs(
                      trajectory.chi - flows.chi_closed_form(args.chi, trajectory.s_grid))))}
        say("FLOW", f"limits {trajectory.limits}")
        return report, (["s", "chi"], zip(trajectory.s_grid, trajectory.chi)), 0

    if args.orbit:
        k = parse_winding(cfg.k or "1")
        n = cfg.n or k.dim
        if k.dim != n:
            raise DomainError(f"k = {k} does not match n = {n}")
        v0 = np.array([float(x) for x in args.v0.split(',')]) if args.v0 else FOUR_PI_SQ * k.as_array()
        u0 = np.full(n, cfg.q0)
        orbit = flows.integrate_orbit(FreeHamiltonian(), (u0, v0), cfg.orbit_steps)
        report = {"kind": "orbit", "n": n, "u0": u0, "v0": v0,
                  "winding": orbit.winding, "closure_defect": orbit.closure_defect,
                  "closes": orbit.closure_defect <= cfg.tol,
                  "energy_drift": orbit.energy_drift}
        say("FLOW", f"closure defect {orbit.closure_defect:.3e}")
        rows = [[t] + list(u) + list(v) for t, u, v in zip(orbit.times, orbit.u, orbit.v)]
        header = ["t"] + [f"u{j + 1}" for j in range(n)] + [f"v{j + 1}" for j in range(n)]
        return report, (header, rows), 0

    k = scalar_winding(cfg.k or 1)
    chi0, wiggle, q0 = args.chi0, args.wiggle, cfg.q0
    grid = flows.solve_cylinder(
        k, q0, lambda t: k * t + q0 + chi0 + wiggle * np.sin(TWO_PI * t),
        s_max=cfg.s_max, t_points=cfg.t_points, s_step=cfg.s_step, method=args.method)
    energies = flows.cylinder_energies(grid)
    report = {"kind": "cylinder", "k": k, "q0": q0, "chi0": chi0, "wiggle": wiggle,
              "method": grid.method, "s_max": cfg.s_max, "s_step": cfg.s_step,
              "residual_to_gamma_plus": grid.residual,
              "energy_non_increasing": bool(np.all(np.diff(energies) <= 1e-8))}
    if wiggle == 0.0:
        report["ansatz_deviation"] = flows.ansatz_deviation(grid, chi0)
    say("FLOW", f"cylinder residual {grid.residual:.3e}")
    code = 0 if report["energy_non_increasing"] else 1
    return report, (["s", "energy"], zip(grid.s_grid, energies)), code


@catch_error
def cmd_paper(cfg, args):
    results = paper.run_anchors(args.only, cfg.workers)
    failed = [r["id"] for r in results if r["status"] != "PASS"]
    for r in results:
        say(r["status"], f"{r['group']:9s} {r['id']}")
    report = {"anchors": results, "passed": len(results) - len(failed), "failed": failed}
    rows = [(r["id"], r["group"], r["status"]) for r in results]
    return report, (["id", "group", "status"], rows), 1 if failed else 0


COMMANDS = {
    "geodesics": cmd_geodesics,
    "homology": cmd_homology,
    "cz": cmd_cz,
    "perturb": cmd_perturb,
    "flow": cmd_flow,
    "paper": cmd_paper,
}


# === MAIN ===

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(glue_negative_values(list(sys.argv[1:] if argv is None else argv)))
    flags = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    try:
        cfg = config.resolve(args.command, flags, args.config)
    except (DomainError, OSError, ValueError) as e:
        parser.error(str(e))

    start = time.perf_counter()
    try:
        report, (header, rows), code = COMMANDS[args.command](cfg, args)
    except TorusError as e:
        say("ERROR", str(e))
        log_run(args.command, _loggable(flags), 1, time.perf_counter() - start)
        return 1

    rows = list(rows)
    if cfg.json_path:
        write_text(cfg.json_path, to_json(report))
    if cfg.csv_path:
        write_text(cfg.csv_path, to_csv(header, rows))
    sys.stdout.write(to_csv(header, rows) if cfg.format == "csv" else to_json(report))
    log_run(args.command, _loggable(flags), code, time.perf_counter() - start)
    return code


def _loggable(flags: dict) -> dict:
    return {key: value for key, value in flags.items() if value not in (None, False)}


if __name__ == "__main__":
    sys.exit(main())
