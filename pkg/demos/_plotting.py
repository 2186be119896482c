"""Optional figure output shared by the demo scripts."""

from pathlib import Path


def pyplot():
    """Return matplotlib.pyplot with a file backend, or None when matplotlib is missing."""
    try:
        import matplotlib
    except ImportError:
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save(fig, name):
    path = Path(__file__).with_name(name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")
