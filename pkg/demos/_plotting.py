"""Optional matplotlib helper for the demo scripts."""

from pathlib import Path

OUT = Path(__file__).with_name("output")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # plots are optional
    plt = None


def save(fig, name):
    OUT.mkdir(exist_ok=True)
    fig.savefig(OUT / name, dpi=120, bbox_inches="tight")
    plt.close(fig)
    print(f"saved {OUT / name}")
