"""Vector-graphics rendering of BER curves and SNR surfaces.

Output is SVG with deterministic bytes for a fixed input: the hash salt is
pinned and date metadata stripped, so golden-file comparisons are stable.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analysis import SnrSurface  # noqa: E402

_MARKERS = ("o", "s", "v", "^", "d", "x", "+", "*")


def _deterministic_rc():
    return matplotlib.rc_context({"svg.hashsalt": "dstcsim"})


def _save(fig, path):
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)


def plot_ber_curves(points, path) -> None:
    """Render BER-vs-P/N0 curves, one line per (scheme, tau) pair."""
    if not points:
        raise ValueError("no BER points to plot")
    groups = {}
    for p in points:
        groups.setdefault((p.scheme, p.tau), []).append(p)
    with _deterministic_rc():
        fig, ax = plt.subplots(figsize=(7.0, 5.2))
        for i, ((scheme, tau), pts) in enumerate(sorted(groups.items())):
            pts = sorted(pts, key=lambda p: p.p_over_n0_db)
            ax.semilogy(
                [p.p_over_n0_db for p in pts],
                [max(p.ber, 1e-12) for p in pts],
                marker=_MARKERS[i % len(_MARKERS)],
                label=f"{scheme}, tau={tau:g} Ts",
            )
        ax.set_xlabel("P/N0 (dB)")
        ax.set_ylabel("BER")
        ax.set_ylim(1e-5, 1e-0)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        _save(fig, path)


def plot_snr_surface(surface: SnrSurface, path) -> None:
    """Render the SNR surface as a per-tau family of lines over n."""
    if surface.gamma_db.size == 0:
        raise ValueError("empty SNR surface")
    with _deterministic_rc():
        fig, ax = plt.subplots(figsize=(7.0, 5.2))
        idx = range(surface.n_subcarriers)
        for i, tau in enumerate(surface.taus):
            # thin the family for readability: every 4th delay plus endpoints
            if i % 4 and tau not in (0.0, 0.5, 1.0):
                continue
            ax.plot(idx, surface.gamma_db[i], label=f"tau={tau:g} Ts")
        ax.set_xlabel("subcarrier n")
        ax.set_ylabel("received SNR (dB)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8, ncol=2)
        _save(fig, path)


def emit_plot(data, path) -> None:
    """Dispatch on the payload type: BER point list or SnrSurface."""
    if isinstance(data, SnrSurface):
        plot_snr_surface(data, path)
    else:
        plot_ber_curves(list(data), path)
