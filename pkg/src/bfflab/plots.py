"""Figure rendering for the CLI report paths.

Every figure is derived from an already-sorted report, uses the Agg
backend, and is written with a fixed name into the requested directory, so
repeated invocations produce the same files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _finish(fig, directory: str | Path, name: str) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def majorization_figure(report, directory: str | Path) -> Path:
    """Measured value length against the inferred polynomial per sample."""
    rows = sorted(report.samples)
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        xs = range(len(rows))
        ax.plot(xs, [b for (b, _) in rows], label="inferred bound", color="tab:blue")
        ax.plot(xs, [v for (_, v) in rows], label="|value|", color="tab:orange")
        bad = [(i, v) for i, (b, v) in enumerate(rows) if v > b]
        if bad:
            ax.scatter(*zip(*bad), color="red", label="violations")
    ax.set_xlabel("sample (sorted by bound)")
    ax.set_ylabel("bits")
    ax.set_title(f"majorization check: {report.checked} samples")
    ax.legend(loc="best")
    return _finish(fig, directory, "bound_check.png")


def time_bound_figure(report, directory: str | Path) -> Path:
    """Unit-cost running time against the polynomial bound per sample."""
    rows = sorted(report.samples)
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(rows))
    ax.plot(xs, [b for (_, _, b) in rows], label="time bound", color="tab:blue")
    ax.plot(xs, [t for (_, t, _) in rows], label="unit-cost time", color="tab:orange")
    ax.set_xlabel("sample (sorted by input)")
    ax.set_ylabel("steps")
    ax.set_title(f"time-bound check: {report.checked} runs")
    ax.legend(loc="best")
    return _finish(fig, directory, "otm_check.png")


def pbrpl_figure(report, directory: str | Path) -> Path:
    """Violation counts per side condition of the validated scheme."""
    labels = ["value bound", "stabilization", "locality"]
    counts = [
        len(report.value_bound_violations),
        len(report.stabilization_violations),
        len(report.locality_violations),
    ]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(labels, counts, color=["tab:blue", "tab:orange", "tab:green"])
    ax.set_ylabel("violations")
    ax.set_title(f"scheme validation: {report.checked_cases} cases")
    return _finish(fig, directory, "pbrpl_validate.png")


def witness_figure(report, directory: str | Path) -> Path:
    """Both sides of the equivalence over the checked range of u."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.axvline(report.rhs_max, color="tab:orange", label="largest witnessed u")
    ax.axvline(
        (1 << report.polynomial_value) - 1,
        color="tab:blue",
        linestyle="--",
        label="2^P - 1",
    )
    bad = [u for (u, _, _) in report.disagreements]
    if bad:
        ax.scatter(bad, [1] * len(bad), color="red", label="disagreements")
    ax.set_xlabel("u")
    ax.set_yticks([])
    ax.set_title(f"witness check: {report.checked} values of u")
    ax.legend(loc="best")
    return _finish(fig, directory, "witness_check.png")
