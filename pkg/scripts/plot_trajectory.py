"""Plot a trajectory CSV written by ``safestab simulate``.

    python scripts/plot_trajectory.py trajectory.csv [more.csv ...] --out traj.png

Needs matplotlib, which is not a package dependency.
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from safestab.csvio import read_trajectory_csv  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description="plot safestab trajectory CSVs")
    ap.add_argument("csv", nargs="+")
    ap.add_argument("--out", default="trajectory.png")
    args = ap.parse_args(argv)

    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for path in args.csv:
        header, data = read_trajectory_csv(Path(path).read_text())
        col = {name: data[:, k] for k, name in enumerate(header)}
        label = Path(path).stem
        axes[0, 0].plot(col["x1"], col["x2"], label=label)
        axes[0, 1].plot(col["t"], col["h"], label=label)
        axes[1, 0].plot(col["t"], col["u"], label=label)
        axes[1, 1].step(col["t"], col["mode"], where="post", label=label)
    axes[0, 0].set(xlabel="x1", ylabel="x2", title="phase plane")
    axes[0, 1].axhline(0.0, color="k", lw=0.8)
    axes[0, 1].set(xlabel="t", ylabel="h", title="barrier value")
    axes[1, 0].set(xlabel="t", ylabel="u", title="input")
    axes[1, 1].set(xlabel="t", ylabel="mode", title="compatibility mode", yticks=[0, 1])
    for ax in axes.flat:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
