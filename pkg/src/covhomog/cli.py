"""Command-line driver.

Usage examples::

    covhomog boxm --data builtin:iris
    covhomog boxm --data mydata.csv --group Species --output boxm.svg
    covhomog levene --data builtin:iris --center median --format json
    covhomog pca --data builtin:iris --components 3,4 --output pc34.svg

Exit status is 0 on success, 2 for usage errors and 1 for data or numerical
errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import covstats, geometry, mlm, render
from .data import load_data
from .errors import CovHomogError

PLOT_COMMANDS = {"boxm", "eigstats", "scree", "ellipses", "pca"}
COMMANDS = ("boxm", "eigstats", "scree", "ellipses", "pca", "manova", "levene")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _probability(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return v


def _components(text):
    try:
        parts = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers: {text!r}") from None
    if len(parts) != 2 or min(parts) < 1 or parts[0] == parts[1]:
        raise argparse.ArgumentTypeError("expected two distinct 1-based component numbers")
    return tuple(parts)


def _center(text):
    if text in ("median", "mean", "trimmed"):
        return text
    if text.startswith("trimmed:"):
        try:
            float(text.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad trimming fraction in {text!r}") from None
        return text
    raise argparse.ArgumentTypeError("center must be median, mean, trimmed or trimmed:<fraction>")


def build_parser():
    parser = _Parser(prog="covhomog",
                     description="Tests and plots for equality of covariance matrices.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    helps = {
        "boxm": "Box's M test with log-determinant intervals",
        "eigstats": "eigenvalue size statistics per group and pooled",
        "scree": "log eigenvalues by dimension per group and pooled",
        "ellipses": "pairwise data ellipses (centered by default)",
        "pca": "group covariance ellipses in principal-component space",
        "manova": "one-way MANOVA tests",
        "levene": "multivariate Levene-type test (MANOVA of absolute deviations)",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        p.add_argument("--data", required=True,
                       help="builtin:<iris|skulls|wine> or a CSV file path")
        p.add_argument("--group", help="group column (defaults to the builtin dataset's own)")
        p.add_argument("--vars", help="comma-separated variable subset")
        formats = ["text", "json", "svg"] if name in PLOT_COMMANDS else ["text", "json"]
        p.add_argument("--format", choices=formats, default="text",
                       help="report format on standard output; svg writes only the figure")
        if name in PLOT_COMMANDS:
            p.add_argument("--output", help="write the SVG figure to this path")
        if name == "boxm":
            p.add_argument("--ci-level", type=_probability, default=0.95,
                           help="coverage of log-determinant intervals (default 0.95)")
        if name in ("ellipses", "pca"):
            p.add_argument("--coverage", type=_probability, default=geometry.DEFAULT_COVERAGE,
                           help="normal coverage of each data ellipse (default 0.68)")
            p.add_argument("--uncentered", action="store_true",
                           help="place ellipses at group means instead of the origin")
        if name == "pca":
            p.add_argument("--components", type=_components, default=(1, 2),
                           help="two 1-based component numbers, e.g. 3,4 (default 1,2)")
        if name == "scree":
            p.add_argument("--split", type=int, help="split panels after this dimension")
        if name == "levene":
            p.add_argument("--center", type=_center, default="median",
                           help="median (default), mean, trimmed or trimmed:<fraction>")
    return parser


def _render(args, compute):
    """Dispatch to a subcommand; returns (report_text, svg_or_None)."""
    variables = [v.strip() for v in args.vars.split(",")] if args.vars else None
    d = load_data(args.data, args.group, variables)
    cmd = args.command
    fmt = args.format
    svg = None
    if cmd == "boxm":
        res = covstats.box_m(covstats.summarize(d), args.ci_level)
        out = res.to_json() + "\n" if fmt == "json" else res.to_text()
        if compute:
            svg = render.render_logdet_dotplot(res)
    elif cmd == "eigstats":
        stats = covstats.eig_stats(covstats.summarize(d))
        out = covstats.eig_stats_to_json(stats) + "\n" if fmt == "json" else covstats.eig_stats_to_text(stats)
        if compute:
            svg = render.render_eigstats_grid(stats)
    elif cmd == "scree":
        series = covstats.scree_data(covstats.summarize(d))
        out = covstats.scree_to_json(series) + "\n" if fmt == "json" else covstats.scree_to_text(series)
        if compute:
            svg = render.render_scree(series, panel_split=args.split)
    elif cmd in ("ellipses", "pca"):
        if cmd == "pca":
            proj = geometry.pca(d)
            comps = tuple(c - 1 for c in args.components)
            if max(comps) >= d.n_vars:
                raise UsageError(f"--components must not exceed {d.n_vars}")
            cs = geometry.group_cov_in_component_space(d, proj, comps)
            report = {
                "variance_proportions": [float(v) for v in proj.variance_proportions],
                "loadings": [[float(v) for v in row] for row in proj.loadings],
                "variables": list(d.variable_names),
                "components": list(args.components),
            }
        else:
            cs = covstats.summarize(d)
            report = {"variables": list(d.variable_names)}
        panels = geometry.pairwise_ellipses(cs, args.coverage, centered=not args.uncentered)
        report["coverage"] = args.coverage
        report["radius"] = geometry.coverage_radius(args.coverage)
        report["covariances"] = [
            {"label": gr.name, "n": gr.n, "mean": [float(v) for v in gr.mean],
             "cov": [[float(v) for v in row] for row in gr.cov]} for gr in cs.groups
        ] + [{"label": covstats.POOLED, "cov": [[float(v) for v in row] for row in cs.pooled]}]
        out = json.dumps(report, indent=2) + "\n" if fmt == "json" else _geometry_text(report)
        if compute:
            svg = render.render_ellipse_matrix(panels)
    elif cmd == "manova":
        res = mlm.manova(d)
        out = res.to_json() + "\n" if fmt == "json" else res.to_text()
    else:
        res = mlm.levene_test(d, args.center)
        out = res.to_json() + "\n" if fmt == "json" else res.to_text()
    return out, svg


def _geometry_text(report):
    from .report import fmt_number

    lines = []
    if "variance_proportions" in report:
        props = report["variance_proportions"]
        lines.append("variance proportions: " + " ".join(fmt_number(v) for v in props))
        lines.append("components shown: " + ",".join(str(c) for c in report["components"]))
    lines.append(f"coverage {fmt_number(report['coverage'])}  radius {fmt_number(report['radius'])}")
    for entry in report["covariances"]:
        flat = " ".join(fmt_number(v) for row in entry["cov"] for v in row)
        lines.append(f"{entry['label']}: {flat}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None):
    """Execute the CLI; returns the exit status instead of exiting."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    output = getattr(args, "output", None)
    if args.format == "svg" and not output:
        print(f"covhomog {args.command}: error: --format svg requires --output", file=stderr)
        return 2
    try:
        report, svg = _render(args, compute=bool(output))
    except UsageError as exc:
        print(f"covhomog {args.command}: error: {exc}", file=stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"covhomog {args.command}: error: no such file: {exc}", file=stderr)
        return 2
    except CovHomogError as exc:
        print(f"covhomog {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    if args.format != "svg":
        stdout.write(report)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
