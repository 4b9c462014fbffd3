"""Deterministic CSV, JSON and SVG output."""

import csv
import io
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCAN_HEADER = ("epsilon", "R_left", "R_right", "T", "defect", "singular")


def _num(x):
    # 15 significant digits; inf/nan come out literally
    return "{:.14e}".format(float(x))


def scan_csv_text(table):
    buf = io.StringIO()
    buf.write(",".join(SCAN_HEADER) + "\n")
    for eps, R_l, R_r, T, d, sing in table.rows():
        buf.write(",".join([_num(eps), _num(R_l), _num(R_r), _num(T), _num(d), "1" if sing else "0"]) + "\n")
    return buf.getvalue()


def _write_text(path, text):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_scan_csv(table, path):
    _write_text(path, scan_csv_text(table))


def read_scan_csv(path):
    """Parse a scan CSV back into a dict of numpy columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != SCAN_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(SCAN_HEADER))
    out = {name: data[:, i] for i, name in enumerate(SCAN_HEADER)}
    out["singular"] = out["singular"].astype(bool)
    return out


def features_json_text(points):
    return json.dumps([p.to_dict() for p in points], indent=2) + "\n"


def write_features_json(points, path):
    _write_text(path, features_json_text(points))


def write_rows_csv(header, rows, path=None):
    """Generic numeric table; returns the text and writes it if ``path``."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(x if isinstance(x, str) else _num(x) for x in row) + "\n")
    text = buf.getvalue()
    if path:
        _write_text(path, text)
    return text


def _positive(y):
    y = np.asarray(y, dtype=float)
    return np.where(np.isfinite(y) & (y > 0), y, np.nan)


def emit_svg(table, path, title="", series=("R_left", "R_right", "T"), marks=()):
    """Log-scale line plot of scan columns; identical input gives identical bytes."""
    styles = {
        "R_left": dict(color="black", lw=1.0, label="R left"),
        "R_right": dict(color="0.55", lw=1.0, label="R right"),
        "T": dict(color="black", lw=1.0, ls="--", label="T"),
        "R_left+T": dict(color="black", lw=1.0, label="R left + T"),
    }
    with plt.rc_context({"svg.hashsalt": "ptscatter", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for name in series:
            y = table.defect + 1.0 if name == "R_left+T" else getattr(table, name)
            ax.plot(table.epsilon, _positive(y), **styles[name])
        for e in marks:
            ax.axvline(e, color="0.8", lw=0.6, zorder=0)
        ax.set_yscale("log")
        ax.set_xlabel("energy")
        ax.set_ylabel("coefficient")
        if title:
            ax.set_title(title)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)


def emit_curve_svg(x, y, path, xlabel, ylabel, title=""):
    """Linear plot of a real curve (used for potential profiles)."""
    with plt.rc_context({"svg.hashsalt": "ptscatter", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        ax.plot(x, y, color="black", lw=1.0)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
