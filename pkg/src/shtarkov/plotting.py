"""Figure for a sweep: one band per method, log-scaled length axis."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {"single-letter": "tab:blue", "bgg09": "tab:red", "closed-form": "tab:green"}


def plot_sweep(rows, path, title: str = "") -> None:
    """``rows`` are ``(n, lower_bits, upper_bits, method, truncation_bits)``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    methods = []
    for r in rows:
        if r[3] not in methods:
            methods.append(r[3])
    for m in methods:
        pts = sorted((r[0], r[1], r[2]) for r in rows if r[3] == m)
        ns = [p[0] for p in pts]
        color = _STYLE.get(m)
        ax.plot(ns, [p[2] for p in pts], "-o", ms=3, color=color, label=f"{m} upper")
        if any(p[1] > 0 for p in pts):
            ax.plot(ns, [p[1] for p in pts], "--", color=color, label=f"{m} lower")
            ax.fill_between(ns, [p[1] for p in pts], [p[2] for p in pts], color=color, alpha=0.12)
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("redundancy (bits)")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    # fixed metadata keeps the file stable across runs
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
