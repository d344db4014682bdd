"""Report emission: JSON, delimited tables, and figures.

Every artifact is byte-deterministic for a fixed input: JSON is canonical,
CSV rows come out in the order given, and the PNG writer strips the software
tag that would otherwise embed a version string.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .serialize import canonical_json


def write_json(path, data: dict):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(canonical_json(data))


def write_csv(path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _save(fig, path):
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def render_solution(path, xs, values, *, plus_boundary=None, title=""):
    """Plot the optimizer on its grid, with the support boundary marked."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if len(xs) > 40:
        ax.plot(xs, values, lw=1.2)
    else:
        ax.stem(xs, values, basefmt=" ")
    ax.axhline(0.0, color="0.6", lw=0.8)
    if plus_boundary is not None:
        ax.axvline(plus_boundary, color="tab:red", lw=0.8, ls="--")
    ax.set_xlabel("grid point")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_sweep(path, parameter, xs, values, gaps=None):
    """Parameter sweep: extremal value per parameter, gap alongside."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(xs, values, marker="o", lw=1.2, label="extremal value")
    ax.set_xlabel(parameter)
    ax.set_ylabel("extremal value")
    if gaps is not None:
        twin = ax.twinx()
        twin.plot(xs, gaps, marker=".", lw=0.8, color="tab:red",
                  label="duality gap")
        twin.set_ylabel("duality gap")
        twin.ticklabel_format(axis="y", style="sci", scilimits=(0, 0))
    ax.legend(loc="upper left")
    fig.tight_layout()
    _save(fig, path)


def render_epsilon(path, levels, values, limit=None):
    """Relaxation study: value against the relaxation parameter."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(levels, values, marker="o", lw=1.2)
    if limit is not None:
        ax.axhline(limit, color="tab:red", lw=0.8, ls="--", label="limit")
        ax.legend(loc="best")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("relaxation")
    ax.set_ylabel("relaxed value")
    fig.tight_layout()
    _save(fig, path)
