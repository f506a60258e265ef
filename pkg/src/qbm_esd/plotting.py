"""Matplotlib figures written next to the CSV reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no timestamp, so identical data gives identical SVG bytes
plt.rcParams["svg.hashsalt"] = "qbm-esd"
_METADATA = {"svg": {"Date": None}, "pdf": {"CreationDate": None}, "png": {}}


def _save(fig, path):
    ext = str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, metadata=_METADATA.get(ext, {}), bbox_inches="tight")
    plt.close(fig)


def duan_figure(gamma_t, curves, path, title=None, markers=None):
    """Duan left-hand side against ``gamma t`` with the 0.5 threshold dotted.

    ``curves`` maps legend labels to arrays; ``markers`` optionally maps the
    same labels to crossing times drawn as vertical ticks.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in curves.items():
        (line,) = ax.plot(gamma_t, values, lw=1.5, label=label)
        if markers and markers.get(label) is not None:
            ax.axvline(markers[label], color=line.get_color(), lw=0.8, ls="--")
    ax.axhline(0.5, color="k", lw=1.0, ls=":", label="separability threshold")
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"$\sqrt{(g-c)(g+c')}$")
    ax.set_xlim(gamma_t[0], gamma_t[-1])
    ax.set_ylim(bottom=0.0)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    _save(fig, path)


def sweep_figure(param, esd, key, path):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(param, esd, "o-", ms=3, lw=1.2)
    ax.set_xlabel(key)
    ax.set_ylabel(r"ESD time $\gamma t$")
    _save(fig, path)
