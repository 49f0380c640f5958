"""CSV emission helpers: paper-style display formatting plus
full-precision companion files."""

import csv
from pathlib import Path

__all__ = ["format_prob", "format_sig", "format_pct", "format_time",
           "format_float", "write_csv", "write_table"]

MISSING = "--"


def format_prob(x) -> str:
    """Probabilities to 4 decimals, scientific below 1e-4 (nonzero)."""
    if x is None or x != x:
        return MISSING
    if x != 0.0 and abs(x) < 1e-4:
        return f"{x:.3e}"
    return f"{x:.4f}"


def format_sig(x, digits: int = 4) -> str:
    """Significant-digit rendering, e.g. 0.006654 and 1.748e-46."""
    if x is None or x != x:
        return MISSING
    return f"{x:.{digits}g}"


def format_pct(x) -> str:
    """Rate as a percentage with one decimal."""
    if x is None or x != x:
        return MISSING
    return f"{100.0 * x:.1f}"


def format_time(x) -> str:
    if x is None or x != x:
        return MISSING
    return f"{x:.1f}"


def format_float(x, digits: int = 4) -> str:
    if x is None or x != x:
        return MISSING
    return f"{x:.{digits}f}"


def _full_repr(x) -> str:
    if x is None or (isinstance(x, float) and x != x):
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_table(outdir, name, header, display_rows,
                full_header=None, full_rows=None) -> tuple[Path, Path]:
    """Write ``name.csv`` (display formatting) and ``name_full.csv``
    (full float precision, possibly with extra columns)."""
    outdir = Path(outdir)
    display_path = write_csv(outdir / f"{name}.csv", header, display_rows)
    if full_rows is None:
        full_rows = display_rows
        full_header = header
    rendered = [[_full_repr(v) for v in row] for row in full_rows]
    full_path = write_csv(outdir / f"{name}_full.csv",
                          full_header or header, rendered)
    return display_path, full_path
