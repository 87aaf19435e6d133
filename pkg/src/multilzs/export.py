"""CSV and portable-graymap export of patterns, transforms and tables.

CSV files start with ``#`` header lines (provenance, axes, units) and then
hold one row per amplitude sample, first column the amplitude in rad/ns.
"""
from __future__ import annotations

import re

import numpy as np

from .model import PatternGrid, rad_per_ns_to_mhz
from .spectral import FtMap

FMT = "%.9g"


def _fmt_list(values):
    return ", ".join(FMT % v for v in values)


def _write_rows(path, header, first_col, table):
    """``table`` is (row, column); rows are written with ``first_col`` in front."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n" if line else "#\n")
        for x, row in zip(first_col, table):
            fh.write(",".join([FMT % x] + [FMT % v for v in row]) + "\n")


def _read(path):
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition(":")
                if sep:
                    meta.setdefault(key.strip(), value.strip())
                continue
            if line.strip():
                rows.append([float(x) for x in line.split(",")])
    return meta, np.array(rows, dtype=float)


def _parse_list(text):
    return np.array([float(x) for x in text.split(",")])


def pattern_header(grid: PatternGrid, extra=()):
    a = grid.a_axis
    lines = ["kind: pattern", f"engine: {grid.meta.get('engine', 'unknown')}"]
    for key in sorted(k for k in grid.meta if k != "engine"):
        lines.append(f"{key}: {_meta_value(grid.meta[key])}")
    lines += list(extra)
    lines += [
        f"rows: {a.size} drive amplitudes, first column in rad/ns "
        f"({FMT % rad_per_ns_to_mhz(a[0])} .. {FMT % rad_per_ns_to_mhz(a[-1])} MHz)",
        "columns: return probability at each pulse width of t_axis_ns",
        f"t_axis_ns: {_fmt_list(grid.t_axis)}",
    ]
    return lines


def _meta_value(value):
    if isinstance(value, bool):
        return "on" if value else "off"
    return str(value)


def export_pattern(grid: PatternGrid, path, extra_header=()):
    _write_rows(path, pattern_header(grid, extra_header), grid.a_axis, grid.values)


def read_pattern(path) -> PatternGrid:
    meta, rows = _read(path)
    if "t_axis_ns" not in meta or rows.ndim != 2:
        raise ValueError(f"{path}: not a pattern file")
    t_axis = _parse_list(meta.pop("t_axis_ns"))
    if rows.shape[1] != t_axis.size + 1:
        raise ValueError(f"{path}: row length does not match t_axis_ns")
    return PatternGrid(np.clip(rows[:, 1:], 0.0, 1.0), t_axis, rows[:, 0], meta)


def export_ftmap(fmap: FtMap, path, extra_header=()):
    lines = ["kind: ft", f"window: {fmap.meta.get('window', 'none')}"]
    for key in sorted(k for k in fmap.meta if k != "window"):
        lines.append(f"source {key}: {_meta_value(fmap.meta[key])}")
    lines += list(extra_header)
    lines += [
        "rows: drive amplitude in rad/ns, then DFT magnitude per bin (row mean removed)",
        f"k_axis_rad_per_ns: {_fmt_list(fmap.k_axis)}",
    ]
    _write_rows(path, lines, fmap.a_axis, fmap.magnitudes.T)


def read_ftmap(path) -> FtMap:
    meta, rows = _read(path)
    if "k_axis_rad_per_ns" not in meta:
        raise ValueError(f"{path}: not an FT file")
    k_axis = _parse_list(meta.pop("k_axis_rad_per_ns"))
    return FtMap(rows[:, 1:].T.copy(), k_axis, rows[:, 0].copy(), meta)


def export_table(path, header, columns, names):
    """Plain column table; ``columns`` are equal-length 1-D arrays."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("# columns: " + ", ".join(names) + "\n")
        for row in data:
            fh.write(",".join(FMT % v for v in row) + "\n")


def to_gray(values) -> np.ndarray:
    """Min-max scale to 8 bits; a constant array maps to mid gray."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if hi - lo <= 0.0:
        return np.full(v.shape, 128, dtype=np.uint8)
    return np.rint((v - lo) / (hi - lo) * 255.0).astype(np.uint8)


def export_pgm(values, path):
    """Binary graymap; the last row of ``values`` is the top image row."""
    img = to_gray(values)[::-1]
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    # exactly one whitespace byte follows maxval; pixels may look like spaces
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if m is None:
        raise ValueError(f"{path}: not a binary graymap")
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit graymaps are supported")
    return np.frombuffer(data, dtype=np.uint8, count=w * h, offset=m.end()).reshape(h, w)[::-1]
