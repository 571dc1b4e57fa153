"""Figure rendering for path-comparison and convergence CSV files.

Two figure kinds are supported.  A paths figure overlays the sample
trajectories of the four schemes over time, with horizontal guide lines
at the domain boundaries.  A convergence figure shows strong errors
against the step size on log-log axes, one series per noise intensity,
together with dashed reference lines of slopes 1/2 and 1 anchored at
the coarsest-dt datum.

The renderers are read-only over their inputs and deterministic: the
same CSV produces byte-identical output (image metadata that would
embed timestamps is suppressed).
"""

import argparse
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PATH_COLUMNS = ["t", "ls", "em", "sem", "te"]
CONVERGENCE_COLUMNS = ["lambda", "dt", "error", "stderr", "samples"]

# PNG metadata written by matplotlib; pinning it keeps reruns byte-identical.
_PNG_METADATA = {"Software": "sdeplots"}


class SchemaError(ValueError):
    """Raised when a CSV file does not match the expected schema."""


def _read_rows(csv_path, expected_columns):
    try:
        with open(csv_path, newline="") as handle:
            reader = csv.reader(handle)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise SchemaError(f"cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{csv_path}: file is empty")
    header = [name.strip() for name in rows[0]]
    if header != expected_columns:
        raise SchemaError(
            f"{csv_path}: expected columns {','.join(expected_columns)}, "
            f"found {','.join(header)}"
        )
    if len(rows) < 2:
        raise SchemaError(f"{csv_path}: no data rows")
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(expected_columns):
            raise SchemaError(
                f"{csv_path}: line {i} has {len(row)} fields, "
                f"expected {len(expected_columns)}"
            )
        try:
            data.append([float(field) for field in row])
        except ValueError as exc:
            raise SchemaError(f"{csv_path}: line {i}: {exc}") from exc
    return np.asarray(data)


def read_paths_csv(csv_path):
    """Load a path-comparison CSV into a dict of column arrays."""
    data = _read_rows(csv_path, PATH_COLUMNS)
    columns = {name: data[:, j] for j, name in enumerate(PATH_COLUMNS)}
    if np.any(np.diff(columns["t"]) <= 0.0):
        raise SchemaError(f"{csv_path}: column t must be strictly increasing")
    return columns


def read_convergence_csv(csv_path):
    """Load a convergence CSV into a list of (lambda, dt, error, stderr) groups.

    Rows are grouped by the lambda column, preserving first-appearance
    order.  Within each group the rows are sorted by decreasing dt.
    """
    data = _read_rows(csv_path, CONVERGENCE_COLUMNS)
    if np.any(data[:, 1] <= 0.0) or np.any(data[:, 2] <= 0.0):
        raise SchemaError(f"{csv_path}: dt and error must be positive")
    groups = []
    for lam in dict.fromkeys(data[:, 0]):
        block = data[data[:, 0] == lam]
        block = block[np.argsort(-block[:, 1])]
        groups.append((lam, block[:, 1], block[:, 2], block[:, 3]))
    return groups


def _domain_bounds(csv_path, lower, upper):
    if lower is not None and upper is not None:
        return float(lower), float(upper)
    stem = os.path.basename(csv_path)
    if "allen" in stem:
        return -1.0, 1.0
    return 0.0, 1.0


def render_paths(csv_path, out_path, title=None, lower=None, upper=None):
    """Plot one trajectory per scheme with boundary guide lines.

    The domain boundaries are taken from the lower/upper arguments when
    both are given, otherwise inferred from the file name ((-1, 1) for
    Allen-Cahn data, (0, 1) otherwise).  Returns the figure.
    """
    columns = read_paths_csv(csv_path)
    lo, hi = _domain_bounds(csv_path, lower, upper)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    t = columns["t"]
    styles = {
        "ls": dict(color="C0", linewidth=1.8),
        "em": dict(color="C1", linewidth=1.2, alpha=0.9),
        "sem": dict(color="C2", linewidth=1.2, alpha=0.9),
        "te": dict(color="C3", linewidth=1.2, alpha=0.9),
    }
    for scheme in ("em", "sem", "te", "ls"):
        line, = ax.plot(t, columns[scheme], label=scheme.upper(),
                        **styles[scheme])
        line.set_gid(f"series-{scheme}")
    for bound in (lo, hi):
        guide = ax.axhline(bound, color="0.3", linestyle="--", linewidth=0.9)
        guide.set_gid(f"boundary-{bound:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata=_PNG_METADATA)
    return fig


def render_convergence(csv_path, out_path, title=None):
    """Plot strong errors against dt on log-log axes.

    Draws one error-bar series per noise intensity and two dashed
    reference lines with slopes 1/2 and 1, both anchored at the error
    of the coarsest dt in the first series.  Returns the figure.
    """
    groups = read_convergence_csv(csv_path)

    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    all_dt = np.concatenate([dt for _, dt, _, _ in groups])
    for k, (lam, dt, error, stderr) in enumerate(groups):
        container = ax.errorbar(dt, error, yerr=stderr, marker="o",
                                capsize=3, color=f"C{k}",
                                label=f"$\\lambda = {lam:g}$")
        container.lines[0].set_gid(f"series-{lam:g}")

    # Anchor both reference lines at the coarsest-dt datum of the first
    # series so the data sits next to them rather than on top.
    dt0 = groups[0][1][0]
    e0 = groups[0][2][0]
    dt_span = np.array([all_dt.max(), all_dt.min()])
    for slope, style in ((0.5, ":"), (1.0, "--")):
        ref, = ax.plot(dt_span, e0 * (dt_span / dt0) ** slope,
                       linestyle=style, color="0.4", linewidth=1.0,
                       label=f"slope {slope:g}")
        ref.set_gid(f"reference-{slope:g}")

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("$\\Delta t$")
    ax.set_ylabel("strong error")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata=_PNG_METADATA)
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a figure from an experiment CSV file.")
    parser.add_argument("kind", choices=["paths", "convergence"],
                        help="figure kind")
    parser.add_argument("csv", help="input CSV file")
    parser.add_argument("out", help="output image file")
    parser.add_argument("--title", default=None, help="figure title")
    parser.add_argument("--lower", type=float, default=None,
                        help="lower domain boundary (paths figures)")
    parser.add_argument("--upper", type=float, default=None,
                        help="upper domain boundary (paths figures)")
    args = parser.parse_args(argv)

    try:
        if args.kind == "paths":
            fig = render_paths(args.csv, args.out, title=args.title,
                               lower=args.lower, upper=args.upper)
        else:
            fig = render_convergence(args.csv, args.out, title=args.title)
        plt.close(fig)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
