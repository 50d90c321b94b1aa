import os

import matplotlib.pyplot as plt
import numpy as np
import pytest

from trichomp.plot import plot_partition, plot_table, save_plots
from trichomp.recurrence import build_reference

N_MAX = 12


@pytest.fixture
def table():
    return build_reference(N_MAX)


@pytest.fixture
def png_path():
    path = "test_plot.png"
    yield path
    if os.path.exists(path):
        os.remove(path)


def test_plot_table(table):
    fig, ax = plt.subplots()
    image = plot_table(table, ax=ax)
    data = image.get_array()
    assert data.shape == (N_MAX + 1, N_MAX + 1)
    assert data.mask[0, 1] and not data.mask[1, 0]
    assert data[2, 1] == 2
    plt.close(fig)


def test_plot_partition(table):
    fig, ax = plt.subplots()
    strips = np.asarray(plot_partition(table, ax=ax).get_array())
    # every n is in exactly one of the two strips
    np.testing.assert_array_equal(strips.sum(axis=0), np.ones(N_MAX))
    assert strips[0, 0] and strips[1, 1]
    plt.close(fig)


def test_save_plots(table, png_path):
    save_plots(table, png_path)
    assert os.path.getsize(png_path) > 0
