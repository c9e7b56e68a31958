"""CSV, SVG and JSON-lines serialisation.

Floats go through ``repr``, the shortest string that parses back to the same
double, so CSV round trips are bit-exact.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

__all__ = ["read_csv", "format_csv", "write_csv", "format_svg", "write_svg", "append_jsonl"]


def read_csv(path) -> np.ndarray:
    """Parse a one- or two-column CSV; ``#`` lines and blank lines are skipped.

    Returns an ``(n, columns)`` float array.

    Raises:
        ValueError: no data, ragged rows or unparsable numbers.
    """
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: cannot parse {line!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: rows have different numbers of columns")
    return np.array(rows, dtype=np.float64)


def format_csv(data, header: str | None = None) -> str:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    lines = [f"# {header}"] if header else []
    lines += [",".join(repr(float(v)) for v in row) for row in data]
    return "\n".join(lines) + "\n"


def write_csv(path, data, header: str | None = None) -> Path:
    path = Path(path)
    path.write_text(format_csv(data, header), encoding="utf-8")
    return path


def format_svg(points, *, closed: bool = False, stroke: str = "black", stroke_width: float | None = None) -> str:
    """One ``<path>`` through the 2-D points, with a 5% margin around the data.

    The y axis is flipped so the picture has the usual orientation.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("SVG export needs 2-D points; use the CSV output for 1-D data")
    if len(pts) == 0:
        raise ValueError("no points to export")
    x, y = pts[:, 0], -pts[:, 1]
    xmin, xmax, ymin, ymax = x.min(), x.max(), y.min(), y.max()
    w = (xmax - xmin) or 1.0
    h = (ymax - ymin) or 1.0
    mx, my = 0.05 * w, 0.05 * h
    vb = (xmin - mx, ymin - my, w + 2 * mx, h + 2 * my)
    sw = stroke_width if stroke_width is not None else 0.002 * max(vb[2], vb[3])
    cmds = [f"{'M' if i == 0 else 'L'}{a:.6f},{b:.6f}" for i, (a, b) in enumerate(zip(x, y))]
    if closed:
        cmds.append("Z")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{vb[0]:.6f} {vb[1]:.6f} {vb[2]:.6f} {vb[3]:.6f}">\n'
        f'  <path d="{" ".join(cmds)}" fill="none" stroke="{stroke}" stroke-width="{sw:.6f}"/>\n'
        "</svg>\n"
    )


def write_svg(path, points, **kw) -> Path:
    path = Path(path)
    path.write_text(format_svg(points, **kw), encoding="utf-8")
    return path


def append_jsonl(path, line: str) -> Path:
    """Append one JSON record; existing records are never rewritten."""
    path = Path(path)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line.rstrip("\n") + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    return path
