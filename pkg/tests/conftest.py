import numpy as np
import pytest

from splintersect.bezier import BezierCurve, RationalBezierPatch
from splintersect.intersect import ParametricLine


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_patch(rng, degree=3, z_amp=0.3, jitter=0.05, rational=False):
    """Height-field style patch: perturbed (x, y) grid with bounded z noise.

    Graph-like by construction, so a steep segment crosses it exactly once
    and never tangentially; that makes these the workhorse for oracle
    comparisons.
    """
    g = np.linspace(0.0, 1.0, degree + 1)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    pts = np.empty((degree + 1, degree + 1, 3))
    pts[..., 0] = xx + rng.uniform(-jitter, jitter, xx.shape)
    pts[..., 1] = yy + rng.uniform(-jitter, jitter, yy.shape)
    pts[..., 2] = rng.uniform(0.0, z_amp, xx.shape)
    w = rng.uniform(0.8, 1.25, xx.shape) if rational else np.ones(xx.shape)
    return RationalBezierPatch((degree, degree), pts, w)


def random_segment(rng, steep=True, z_amp=0.3):
    x0, y0, x1, y1 = rng.uniform(0.25, 0.75, 4)
    if steep:
        return ParametricLine.through([x0, y0, -0.4], [x1, y1, z_amp + 0.4])
    return ParametricLine.through([x0, y0, -0.25 * z_amp], [x1, y1, 1.2 * z_amp])


def random_curve(rng, degree=3, scale=1.0, rational=False):
    pts = rng.uniform(-scale, scale, size=(degree + 1, 3))
    w = rng.uniform(0.8, 1.25, degree + 1) if rational else np.ones(degree + 1)
    return BezierCurve(degree, pts, w)


def decasteljau_point(homogeneous_net, t1, t2):
    """Independent de Casteljau evaluation oracle on the homogeneous net."""

    def reduce(points, t):
        points = np.array(points, dtype=float)
        while len(points) > 1:
            points = (1.0 - t) * points[:-1] + t * points[1:]
        return points[0]

    cols = np.array([reduce(homogeneous_net[:, j], t1) for j in range(homogeneous_net.shape[1])])
    f = reduce(cols, t2)
    return f[:3] / f[3]
