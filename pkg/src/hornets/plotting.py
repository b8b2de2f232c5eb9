"""Figure output for scenario runs (matplotlib, non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_choice_probabilities(rows, path, threshold=None, title=None):
    """Plot prA0/prA1 over steps and mark the steps where agent 0's
    structure changes.  ``rows`` are (step, prA0, prA1, flag) tuples."""
    steps = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(steps, [float(r[1]) for r in rows], label="Pr(a0)", drawstyle="steps-post")
    ax.plot(steps, [float(r[2]) for r in rows], label="Pr(a1)", drawstyle="steps-post")
    if threshold is not None:
        ax.axhline(float(threshold), color="grey", linestyle=":", linewidth=1,
                   label="adaptation threshold")
    prev = rows[0][3] if rows else None
    for step, _, _, flag in rows:
        if flag != prev:
            ax.axvline(step, color="red", linestyle="--", linewidth=1)
            ax.annotate(flag, (step, 0.02), rotation=90, fontsize=8, color="red")
            prev = flag
    ax.set_xlabel("step")
    ax.set_ylabel("choice probability")
    ax.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
