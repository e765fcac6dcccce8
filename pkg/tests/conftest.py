"""Shared fixtures and random-field factories for the test suite."""

import math

import numpy as np
import pytest

from killingforms import ad
from killingforms.chart import Chart, ChartPoint, cone_chart, sample_points, t11_chart
from killingforms.exterior import DiffForm
from killingforms.metric import cone_metric, t11_metric


@pytest.fixture(scope="session")
def base_chart():
    return t11_chart()


@pytest.fixture(scope="session")
def cone_chart_fx(base_chart):
    return cone_chart(base_chart)


@pytest.fixture(scope="session")
def g_base(base_chart):
    return t11_metric(base_chart)


@pytest.fixture(scope="session")
def g_cone(g_base):
    return cone_metric(g_base)


@pytest.fixture(scope="session")
def base_points(base_chart):
    return sample_points(base_chart, 50, 42)


@pytest.fixture(scope="session")
def cone_points(g_cone):
    return sample_points(g_cone.chart, 50, 43)


def random_scalar_fn(rng, dim):
    """A smooth random scalar built from sin/cos/polynomials of coordinates."""
    n_terms = rng.integers(1, 4)
    terms = []
    for _ in range(n_terms):
        kind = rng.integers(0, 3)
        i = int(rng.integers(0, dim))
        freq = float(rng.integers(1, 3))
        amp = float(rng.uniform(-1.0, 1.0))
        shift = float(rng.uniform(0, 2 * math.pi))
        power = int(rng.integers(1, 3))
        terms.append((kind, i, freq, amp, shift, power))

    def fn(coords):
        total = 0.0
        for kind, i, freq, amp, shift, power in terms:
            if kind == 0:
                total = total + amp * ad.sin(freq * coords[i] + shift)
            elif kind == 1:
                total = total + amp * ad.cos(freq * coords[i] + shift)
            else:
                total = total + amp * coords[i] ** power
        return total

    return fn


def random_form(chart, degree, rng, n_components=3):
    """A random degree-p form with smooth sparse components."""
    keys = []
    import itertools
    all_keys = list(itertools.combinations(range(chart.dim), degree))
    picks = rng.choice(len(all_keys), size=min(n_components, len(all_keys)),
                       replace=False)
    fns = {all_keys[int(k)]: random_scalar_fn(rng, chart.dim) for k in picks}

    def coeffs(coords):
        return {k: f(coords) for k, f in fns.items()}

    return DiffForm(chart, degree, coeffs, label="random")


def max_component_diff(a, b, points):
    worst = 0.0
    for p in points:
        ca, cb = a.at(p), b.at(p)
        for k in set(ca) | set(cb):
            worst = max(worst, abs(ca.get(k, 0.0) - cb.get(k, 0.0)))
    return worst


def max_component(a, points):
    worst = 0.0
    for p in points:
        vals = a.at(p)
        if vals:
            worst = max(worst, max(abs(v) for v in vals.values()))
    return worst
