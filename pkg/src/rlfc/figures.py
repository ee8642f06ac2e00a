"""Static report figures rendered to PNG with CSV companions.

Every figure writes its underlying numbers next to the image so the plots
can be regenerated or re-cut without rerunning the heavy parts.
"""

from __future__ import annotations

import csv
import os
from typing import List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import analytics, sim

__all__ = [
    "decoding_probability_figure",
    "expected_excess_figure",
    "multicast_figure",
    "render_all",
]

_STYLE = {
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _write_csv(path: str, columns: Sequence[str], rows: List[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def decoding_probability_figure(
    out_dir: str,
    ks: Sequence[int] = (5, 10),
    gammas: Sequence[int] = (1, 2, 3),
    delta_max: int = 8,
) -> Tuple[str, str]:
    """Probability of having decoded after k + delta arrivals, per gamma."""
    columns = ("k", "scheme", "gamma", "delta", "received", "pmf", "cdf")
    rows = []
    for k in ks:
        base = analytics.baseline_traditional(k, delta_max=delta_max)
        for d in range(delta_max + 1):
            rows.append(
                {
                    "k": k,
                    "scheme": sim.SCHEME_TRADITIONAL,
                    "gamma": None,
                    "delta": d,
                    "received": k + d,
                    "pmf": base.pmf[d],
                    "cdf": base.cdf[d],
                }
            )
        for gamma in gammas:
            dist = analytics.excess_distribution(
                analytics.ModelParams(k, gamma=gamma, delta_max=delta_max)
            )
            for d in range(delta_max + 1):
                rows.append(
                    {
                        "k": k,
                        "scheme": sim.SCHEME_GAMMA,
                        "gamma": gamma,
                        "delta": d,
                        "received": k + d,
                        "pmf": dist.pmf[d],
                        "cdf": dist.cdf[d],
                    }
                )
    csv_path = os.path.join(out_dir, "decoding_probability.csv")
    png_path = os.path.join(out_dir, "decoding_probability.png")
    _write_csv(csv_path, columns, rows)

    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, len(ks), figsize=(5.0 * len(ks), 3.8), sharey=True)
        for ax, k in zip(axes, ks):
            deltas = list(range(delta_max + 1))
            base = [r["cdf"] for r in rows if r["k"] == k and r["gamma"] is None]
            ax.plot(deltas, base, "k--", marker="s", label="unconstrained")
            for gamma in gammas:
                ys = [r["cdf"] for r in rows if r["k"] == k and r["gamma"] == gamma]
                ax.plot(deltas, ys, marker="o", label=f"gamma={gamma}")
            ax.set_title(f"k = {k}")
            ax.set_xlabel("excess codewords received")
            ax.set_ylim(0.0, 1.02)
        axes[0].set_ylabel("P(decoded)")
        axes[0].legend(loc="lower right", fontsize=9)
        fig.tight_layout()
        fig.savefig(png_path)
        plt.close(fig)
    return csv_path, png_path


def expected_excess_figure(
    out_dir: str,
    ks: Sequence[int] = tuple(range(2, 21)),
    gammas: Sequence[int] = (1, 2, 3),
) -> Tuple[str, str]:
    """Expected excess codewords vs k, with and without the ack assist."""
    columns = ("k", "scheme", "gamma", "blockack", "expected_excess")
    rows = []
    for k in ks:
        base = analytics.baseline_traditional(k)
        rows.append(
            {
                "k": k,
                "scheme": sim.SCHEME_TRADITIONAL,
                "gamma": None,
                "blockack": False,
                "expected_excess": base.expected_excess,
            }
        )
        for gamma in gammas:
            for blockack in (False, True):
                dist = analytics.excess_distribution(
                    analytics.ModelParams(k, gamma=gamma, blockack=blockack)
                )
                rows.append(
                    {
                        "k": k,
                        "scheme": sim.SCHEME_BLOCKACK if blockack else sim.SCHEME_GAMMA,
                        "gamma": gamma,
                        "blockack": blockack,
                        "expected_excess": dist.expected_excess,
                    }
                )
    csv_path = os.path.join(out_dir, "expected_excess.csv")
    png_path = os.path.join(out_dir, "expected_excess.png")
    _write_csv(csv_path, columns, rows)

    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.8), sharey=True)
        for ax, blockack in zip(axes, (False, True)):
            if not blockack:
                ys = [r["expected_excess"] for r in rows if r["gamma"] is None]
                ax.plot(list(ks), ys, "k--", marker="s", label="unconstrained")
            for gamma in gammas:
                ys = [
                    r["expected_excess"]
                    for r in rows
                    if r["gamma"] == gamma and r["blockack"] is blockack
                ]
                ax.plot(list(ks), ys, marker="o", label=f"gamma={gamma}")
            ax.set_title("with ack assist" if blockack else "constrained only")
            ax.set_xlabel("generation size k")
            ax.legend(fontsize=9)
        axes[0].set_ylabel("expected excess codewords")
        fig.tight_layout()
        fig.savefig(png_path)
        plt.close(fig)
    return csv_path, png_path


def multicast_figure(
    out_dir: str,
    ks: Sequence[int] = tuple(range(2, 11)),
    probs: Sequence[float] = (0.05, 0.2),
    gammas: Sequence[int] = (1, 3),
    receivers: int = 10,
    runs: int = 500,
    seed: int = 0,
    jobs: int = 1,
) -> Tuple[str, str]:
    """Simulated mean transmissions to satisfy every multicast receiver."""
    columns = (
        "p",
        "receivers",
        "k",
        "scheme",
        "gamma",
        "runs",
        "seed",
        "mean_tx",
        "ci95",
    )
    rows = []
    for p in probs:
        for k in ks:
            variants = [(sim.SCHEME_TRADITIONAL, 0)]
            variants += [(sim.SCHEME_GAMMA, g) for g in gammas]
            for scheme, gamma in variants:
                cfg = sim.ChannelConfig(
                    k=k,
                    scheme=scheme,
                    gamma=gamma,
                    p=p,
                    receivers=receivers,
                    payload_len=8,
                    seed=seed,
                )
                report = sim.monte_carlo(cfg, runs, jobs=jobs)
                rows.append(
                    {
                        "p": p,
                        "receivers": receivers,
                        "k": k,
                        "scheme": scheme,
                        "gamma": gamma if scheme != sim.SCHEME_TRADITIONAL else None,
                        "runs": runs,
                        "seed": seed,
                        "mean_tx": report.mean_transmissions,
                        "ci95": report.ci95_halfwidth,
                    }
                )
    csv_path = os.path.join(out_dir, "multicast_transmissions.csv")
    png_path = os.path.join(out_dir, "multicast_transmissions.png")
    _write_csv(csv_path, columns, rows)

    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, len(probs), figsize=(5.0 * len(probs), 3.8))
        for ax, p in zip(axes, probs):
            sel = [r for r in rows if r["p"] == p]
            series = [("unconstrained", None)] + [(f"gamma={g}", g) for g in gammas]
            for label, gamma in series:
                pts = [r for r in sel if r["gamma"] == gamma]
                style = "k--s" if gamma is None else "-o"
                ax.errorbar(
                    [r["k"] for r in pts],
                    [r["mean_tx"] for r in pts],
                    yerr=[r["ci95"] for r in pts],
                    fmt=style,
                    capsize=2,
                    label=label,
                )
            ax.set_title(f"erasure p = {p}, {receivers} receivers")
            ax.set_xlabel("generation size k")
        axes[0].set_ylabel("mean transmissions")
        axes[0].legend(fontsize=9)
        fig.tight_layout()
        fig.savefig(png_path)
        plt.close(fig)
    return csv_path, png_path


def render_all(
    out_dir: str,
    runs: int = 500,
    seed: int = 0,
    receivers: int = 10,
    jobs: int = 1,
) -> List[str]:
    """Render every figure into out_dir; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written: List[str] = []
    written += decoding_probability_figure(out_dir)
    written += expected_excess_figure(out_dir)
    written += multicast_figure(
        out_dir, receivers=receivers, runs=runs, seed=seed, jobs=jobs
    )
    return written
