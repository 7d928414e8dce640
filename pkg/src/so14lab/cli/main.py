"""``so14lab`` command line: verification suites, spectra and spectrum comparisons.

Exit codes: 0 when every case passes, 1 when a case fails, 2 for usage or
configuration errors, 3 for numeric errors (a solver or discretization
lost a property it must have).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ..spectral import compare_spectra
from ..spectral.discrete import nr_phase
from . import families
from . import report as rp
from .config import FORMATS, ConfigError, build_config
from .suites import SUITES, TOLERANCES, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("common options")
    g.add_argument("--config", metavar="PATH", help="YAML run configuration")
    g.add_argument("--out", metavar="DIR", help="output directory (config output.path)")
    g.add_argument("--format", choices=FORMATS, help="extra export format (config output.format)")
    g.add_argument("--seed", type=int, metavar="U64", help="seed for randomized test packets")
    g.add_argument("--grid-n", type=int, metavar="INT", help="nodes of the configured grid")
    g.add_argument("--R", type=float, metavar="FLOAT", help="de Sitter radius")
    g.add_argument("--jobs", type=int, metavar="INT", help="worker threads for case groups")
    g.add_argument("--allow-loose-tolerances", action="store_true", default=None,
                   help="accept tolerance overrides above the defaults")
    g.add_argument("--no-plots", action="store_true", help="skip PNG figures")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="so14lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite and write its report")
    v.add_argument("suite", choices=SUITES + ("all",))
    _common(v)

    s = sub.add_parser("spectrum", help="eigenvalues and eigenfunction samples of one operator")
    s.add_argument("--form", required=True, choices=sorted(families.FAMILIES))
    s.add_argument("--l", type=int, default=0, help="partial wave")
    s.add_argument("--lambda", dest="lambdas", type=float, action="append", metavar="LAM",
                   help="eigenvalue to export (repeatable; default: config lambda_grid)")
    _common(s)

    c = sub.add_parser("compare", help="spectrum differences between two operator families")
    c.add_argument("family_a", choices=sorted(families.FAMILIES))
    c.add_argument("family_b", choices=sorted(families.FAMILIES))
    c.add_argument("--l", type=int, default=0)
    c.add_argument("--sizes", type=int, nargs="+", metavar="N",
                   help="grid sizes for a refinement table (default: grid.n)")
    c.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"),
                   help="eigenvalue window for the windowed statistics")
    _common(c)
    return p


def _config(args):
    flags = {"seed": args.seed, "grid.n": args.grid_n, "R": args.R, "jobs": args.jobs,
             "output.path": args.out, "output.format": args.format,
             "allow_loose_tolerances": args.allow_loose_tolerances}
    return build_config(args.config, flags=flags, known_tolerances=TOLERANCES)


def _write_plots(out_dir, plots, with_figures: bool) -> list:
    written = []
    for plot in plots:
        path = os.path.join(out_dir, f"{plot.name}.csv")
        rp.atomic_write(path, rp.csv_text(plot.columns))
        written.append(path)
        if with_figures:
            from .plots import render

            png = os.path.join(out_dir, f"{plot.name}.png")
            rp.atomic_write(png, render(plot))
            written.append(png)
    return written


def cmd_verify(args, cfg) -> int:
    report = run_suite(args.suite, cfg)
    out_dir = cfg.output["path"]
    data = report.to_dict()
    rp.atomic_write(os.path.join(out_dir, f"report_{args.suite}.json"), rp.dumps(data))
    if cfg.output["format"] == "csv":
        rp.atomic_write(os.path.join(out_dir, f"cases_{args.suite}.csv"), rp.cases_csv(report))
    _write_plots(out_dir, report.plots, not args.no_plots)
    for c in report.cases:
        res = "" if c.residual is None else f" residual={c.residual:.3e}"
        val = "" if c.value is None or isinstance(c.value, list) else f" value={c.value}"
        print(f"{'PASS' if c.passed else 'FAIL'} {c.id}{res}{val}")
    n_fail = data["summary"]["failed"]
    print(f"{args.suite}: {len(report.cases) - n_fail}/{len(report.cases)} cases pass")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _lambdas(args, cfg):
    if args.lambdas:
        return list(args.lambdas)
    lg = cfg.lambda_grid
    return np.linspace(lg["min"], lg["max"], int(lg["n"])).tolist()


def cmd_spectrum(args, cfg) -> int:
    p = cfg.params
    V = cfg.potential()
    gr = cfg.grid
    grid = families.make_grid(args.form, gr["r_min"], gr["r_max"], int(gr["n"]))
    disc = families.build(args.form, p, grid, args.l, V)
    ev = np.linalg.eigvalsh(disc.matrix)
    d = np.diff(ev)
    # the finite-difference dilation spectrum is uniform near zero and
    # compresses towards the band edges; spacing is summarized on the central 10%
    centre = slice(int(0.45 * d.size), int(np.ceil(0.55 * d.size)))
    efs, plots = [], [rp.PlotData(f"spectrum_{args.form}",
                                  {"index": np.arange(ev.size), "eigenvalue": ev},
                                  f"sorted eigenvalues, {args.form}", "index", ("eigenvalue",))]
    x = grid.nodes
    for j, lam in enumerate(_lambdas(args, cfg)):
        psi, source = families.eigenfunction(args.form, lam, p, grid, args.l, V, disc)
        cols = {"r": x, "re_psi": psi.real, "im_psi": psi.imag,
                "density_r2": np.abs(psi) ** 2 * x**2}
        efs.append({"lambda": lam, "source": source, **cols})
        plots.append(rp.PlotData(f"eigenfunction_{args.form}_{j}", cols,
                                 f"{args.form} eigenfunction, lambda = {lam:g}", "r",
                                 ("re_psi", "im_psi"), logx=True))
    data = {"schema_version": rp.SCHEMA_VERSION, "form": args.form,
            "description": families.FAMILIES[args.form][2], "l": args.l,
            "grid": {"kind": grid.spacing_kind, "r_min": float(x[0]), "r_max": float(x[-1]),
                     "n": grid.n},
            "eigenvalues": ev,
            "spacing": {"min": d.min(), "max": d.max(), "centre_mean": d[centre].mean(),
                        "centre_max_deviation": np.max(np.abs(d[centre] - d[centre].mean())),
                        "centre_fraction": 0.1},
            "eigenfunctions": efs, "seed": cfg.seed,
            "environment": rp.environment(cfg.data)}
    out_dir = cfg.output["path"]
    if cfg.output["format"] == "json":
        rp.atomic_write(os.path.join(out_dir, f"spectrum_{args.form}.json"), rp.dumps(data))
    _write_plots(out_dir, plots, not args.no_plots)
    print(f"{args.form}: {ev.size} eigenvalues in [{ev[0]:.6g}, {ev[-1]:.6g}]; "
          f"{len(efs)} eigenfunctions exported to {out_dir}")
    return EXIT_PASS


def conjugation_residual(a: families.Discretized, b: families.Discretized, params):
    """``||P A P^dagger - B||_F / ||B||_F`` for the known diagonal conjugations, else ``None``."""
    names = {a.name, b.name}
    if a.name == b.name:
        P = np.ones(a.grid.n)
    elif names == {"m0", "m_nr"}:
        P = np.exp(1j * nr_phase(a.grid.nodes, params))
        if a.name == "m_nr":
            P = P.conj()
    else:
        return None
    conj = P[:, None] * a.matrix * P.conj()[None, :]
    return float(np.linalg.norm(conj - b.matrix) / np.linalg.norm(b.matrix))


def cmd_compare(args, cfg) -> int:
    fa, fb = args.family_a, args.family_b
    if families.FAMILIES[fa][0] != families.FAMILIES[fb][0]:
        raise UsageError(f"mismatched grids: {fa!r} uses a {families.FAMILIES[fa][0]} grid and "
                         f"{fb!r} a {families.FAMILIES[fb][0]} grid")
    p, V, gr = cfg.params, cfg.potential(), cfg.grid
    sizes = args.sizes or [int(gr["n"])]
    if any(n < 16 for n in sizes):
        raise UsageError("--sizes: every grid needs at least 16 nodes")
    window = tuple(args.window) if args.window else None
    rows, plots = [], []
    for n in sizes:
        grid = families.make_grid(fa, gr["r_min"], gr["r_max"], n)
        A = families.build(fa, p, grid, args.l, V)
        B = families.build(fb, p, grid, args.l, V)
        ea, eb = np.linalg.eigvalsh(A.matrix), np.linalg.eigvalsh(B.matrix)
        st = compare_spectra(ea, eb, window)
        rows.append({"n": n, "max_abs": st.max_abs, "window_max_abs": st.window_max_abs,
                     "counting_distance": st.counting_distance, "window": list(st.window),
                     "conjugation_residual": conjugation_residual(A, B, p)})
        plots.append(rp.PlotData(f"compare_{fa}_{fb}_n{n}",
                                 {"index": np.arange(n), fa + "_a": ea, fb + "_b": eb},
                                 f"sorted eigenvalues, n = {n}", "index", (fa + "_a", fb + "_b")))
    data = {"schema_version": rp.SCHEMA_VERSION, "family_a": fa, "family_b": fb, "l": args.l,
            "refinement": rows, "seed": cfg.seed, "environment": rp.environment(cfg.data)}
    out_dir = cfg.output["path"]
    rp.atomic_write(os.path.join(out_dir, f"compare_{fa}_vs_{fb}.json"), rp.dumps(data))
    if cfg.output["format"] == "csv":
        cols = {k: [r[k] for r in rows] for k in ("n", "max_abs", "window_max_abs",
                                                   "counting_distance")}
        rp.atomic_write(os.path.join(out_dir, f"compare_{fa}_vs_{fb}.csv"), rp.csv_text(cols))
    _write_plots(out_dir, plots, not args.no_plots)
    for r in rows:
        cr = r["conjugation_residual"]
        print(f"n={r['n']}: max|dev|={r['max_abs']:.3e} window={r['window_max_abs']:.3e} "
              f"counting={r['counting_distance']:.3e}"
              + ("" if cr is None else f" conjugation={cr:.3e}"))
    return EXIT_PASS


COMMANDS = {"verify": cmd_verify, "spectrum": cmd_spectrum, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, UsageError, families.FamilyError) as exc:
        print(f"so14lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"so14lab: numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
