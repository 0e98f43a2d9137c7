"""Shared fixtures: reference systems and random-system generators."""

from __future__ import annotations

import numpy as np
import pytest

import torus_filippov as tf


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)


@pytest.fixture
def xz_system():
    """Exterior field (z, 0, 0): the xz tangency family with gamma = 5."""
    return tf.inelastic_system([[0, 0, 1], [0, 0, 0], [0, 0, 0]], 0.5)


@pytest.fixture
def eq3_system():
    """The worked sliding example: a12 = -4, a21 = 4, a13 = 1, b21 = -1."""
    return tf.inelastic_system([[0, -4, 1], [4, 0, 0], [0, 0, 0]], -1.0)


@pytest.fixture
def spiral_system():
    """Contracting spiral outside, identity interior; omega = 2."""
    return tf.inelastic_system([[-1, -4, 0], [4, -1, 0], [0, 0, -1]], 0.0)


def random_torus_points(rng, n, torus=tf.CANONICAL):
    u = rng.uniform(0.0, 2.0 * np.pi, n)
    v = rng.uniform(0.0, 2.0 * np.pi, n)
    return tf.torus_point(u, v, torus)


def random_inelastic(rng, scale=3.0, omega=None):
    a = rng.uniform(-scale, scale, (3, 3))
    if omega is None:
        b21 = rng.uniform(-scale, scale)
    else:
        b21 = 2.0 * omega - a[1, 0]
    return tf.inelastic_system(a, b21)
