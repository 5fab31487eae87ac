"""Delimited experiment outputs and their companion figures.

CSV schemas:
  trace:      ``slot,sum_pq,max_vq,delivered,arrivals`` (cumulative counts)
  packets:    ``id,arrival_slot,delivered_slot,delay`` (blank when pending)
  saturation: ``lambda,mean_delay,throughput,stable`` after ``#`` comments

Figures are rendered with the Agg backend next to the delimited output.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

from .simulate import SaturationRow, Trace


def trace_csv_text(trace: Trace) -> str:
    lines = ["slot,sum_pq,max_vq,delivered,arrivals"]
    for idx in range(len(trace.sum_pq)):
        lines.append(
            f"{idx + 1},{trace.sum_pq[idx]},{trace.max_vq[idx]!r},"
            f"{trace.delivered[idx]},{trace.arrivals[idx]}"
        )
    return "\n".join(lines) + "\n"


def packets_csv_text(trace: Trace) -> str:
    lines = ["id,arrival_slot,delivered_slot,delay"]
    for p in trace.packets:
        if p.delivered_slot is None:
            lines.append(f"{p.id},{p.arrival_slot},,")
        else:
            lines.append(f"{p.id},{p.arrival_slot},{p.delivered_slot},{p.delay}")
    return "\n".join(lines) + "\n"


def saturation_csv_text(rows: Sequence[SaturationRow], comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append("lambda,mean_delay,throughput,stable")
    for r in rows:
        stable = "true" if r.stable else "false"
        lines.append(f"{r.lam!r},{r.mean_delay!r},{r.throughput!r},{stable}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_trace_figure(trace: Trace, path) -> Path:
    """Two panels: total pending copies and largest virtual queue over time."""
    plt = _pyplot()
    slots = range(1, len(trace.sum_pq) + 1)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax0.plot(slots, trace.sum_pq, lw=0.8, color="tab:blue")
    ax0.set_ylabel("pending copies")
    ax0.grid(alpha=0.3)
    ax1.plot(slots, trace.max_vq, lw=0.8, color="tab:orange")
    ax1.set_ylabel("max virtual queue")
    ax1.set_xlabel("slot")
    ax1.grid(alpha=0.3)
    cfg = trace.config
    ax0.set_title(
        f"rate {cfg.lam}, horizon {cfg.horizon}, p_on {cfg.p_on}, seed {cfg.seed}"
    )
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figure(rows: Sequence[SaturationRow], path, capacity: float | None = None) -> Path:
    """Mean broadcast delay against arrival rate, unstable points crossed out."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    stable = [(r.lam, r.mean_delay) for r in rows if r.stable and not math.isnan(r.mean_delay)]
    unstable = [(r.lam, r.mean_delay) for r in rows if not r.stable and not math.isnan(r.mean_delay)]
    if stable:
        ax.plot(*zip(*stable), "o-", color="tab:blue", label="stable")
    if unstable:
        ax.plot(*zip(*unstable), "x", color="tab:red", label="unstable")
    if capacity is not None:
        ax.axvline(capacity, ls="--", color="gray", label=f"capacity {capacity:.4g}")
    ax.set_xlabel("arrival rate (packets/slot)")
    ax.set_ylabel("mean broadcast delay (slots)")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
