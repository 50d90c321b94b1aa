import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trichomp.recurrence import FTable


def plot_table(table: FTable, show_mex_cells=True, ax=None, **kwargs):
    """Plot f(q, r) as an image, q downwards and r to the right

    Args:
        table: the table to draw
        show_mex_cells: overlay the mex cells as dots
        ax: axes to draw into, the current axes by default

    Returns:
        An AxesImage object
    """
    ax = ax or plt.gca()
    values, flags = table.to_dense()
    upper = np.triu(np.ones_like(flags), k=1)
    image = ax.imshow(np.ma.masked_array(values, mask=upper), **kwargs)
    if show_mex_cells:
        qs, rs = np.nonzero(flags)
        ax.scatter(rs, qs, s=2, c="white")
    ax.set_xlabel("r")
    ax.set_ylabel("q")
    return image


def plot_partition(table: FTable, ax=None):
    """Mark every 1 <= n <= n_max as a diagonal value (row 0) or a row-start (row 1)

    Returns:
        An AxesImage object
    """
    ax = ax or plt.gca()
    n_max = table.n_max
    strips = np.zeros((2, n_max + 1), dtype=bool)
    diagonal = table.diagonal()
    strips[0, diagonal[diagonal <= n_max]] = True
    strips[1, np.flatnonzero(table.row_starts() >= 0)] = True
    image = ax.imshow(
        strips[:, 1:], aspect="auto", interpolation="nearest", extent=(0.5, n_max + 0.5, 1.5, -0.5)
    )
    ax.set_yticks([0, 1], labels=["D", "S"])
    ax.set_xlabel("n")
    return image


def save_plots(table: FTable, out_path):
    """Table and partition side by side, written to `out_path`"""
    fig, (left, right) = plt.subplots(2, 1, figsize=(8, 10), gridspec_kw={"height_ratios": [5, 1]})
    try:
        plot_table(table, ax=left)
        plot_partition(table, ax=right)
        fig.savefig(out_path)
    finally:
        plt.close(fig)
