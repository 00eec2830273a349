import numpy as np
import pytest

from toeplitz_precond import corpus
from toeplitz_precond.errors import UsageError

PI = np.pi
X = np.array([-3.0, -2.5, -1.7, -1.0, -0.3, 0.2, 0.7, 1.4, 2.2, 3.1])


def tent(x, a, top):
    # odd, rises with slope 1 on [-a, a], falls linearly to 0 at +-top
    if abs(x) <= a:
        return x
    return np.sign(x) * a * (top - abs(x)) / (top - a)


def h3_hand(x):
    s = 2 * PI - 3
    if x < -PI + 0.5:
        return x + PI
    if x < -0.5:
        return -(x + 1) / s
    if x < 0.5:
        return x / s
    if x < PI - 0.5:
        return -(x - 1) / s
    return x - PI


HAND = {
    "f1": lambda x: x * x + 1 + 1j * tent(x, PI / 2, PI),
    "f2": lambda x: x * x + 1j * x**3,
    "f3": lambda x: x * x + 1j * x,
    "f4": lambda x: x * x - 1 + 1j * tent(x, 0.5, 1.0),
    "f5": lambda x: (x * x - 1) ** 2 + 1j * x * (x * x - 4),
    "f7": lambda x: x * x - 1 + 1j * x**3,
    "f8": lambda x: 1 + np.cos(2 * x) + np.cos(3 * x) - 1j * (2 * np.sin(x) + np.sin(2 * x) + np.sin(3 * x)),
    "f9": lambda x: (x * x - 1) ** 2 + 1j * x * (x * x - 1),
    "f10": lambda x: x * x - 1 + 1j * h3_hand(x),
    "f11": lambda x: x * x * np.sin(x) ** 2 + 1 + 1j * x * x * np.sin(x),
    "f12": lambda x: x * x + 1 + 1j * tent(x, PI / 2, PI),
    "f13": lambda x: x * x + 1 + 1j * x,
    "f14": lambda x: x * x * (x * x - 1) ** 2 + 1j * h3_hand(x),
    "h1": lambda x: 1 + 1j * tent(x, PI / 2, PI),
    "h2": lambda x: 1 + 1j * tent(x, 0.5, 1.0),
    "h3": lambda x: 1 + 1j * h3_hand(x),
}
HAND["gcar"] = HAND["f8"]


def test_every_entry_has_a_hand_formula():
    assert set(HAND) == set(corpus.CORPUS)


@pytest.mark.parametrize("name", sorted(HAND))
def test_symbol_matches_hand_evaluation(name):
    got = corpus.get(name).symbol(X)
    want = np.array([HAND[name](x) for x in X])
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_tents_are_odd():
    x = np.linspace(0, PI, 50)
    for h in (corpus.h1, corpus.h2, corpus.h3):
        np.testing.assert_allclose(h(-x[1:-1]), -h(x[1:-1]), atol=1e-15)


@pytest.mark.parametrize("name", [n for n, e in corpus.CORPUS.items() if not e.roots.is_empty])
def test_declared_roots_are_zeros(name):
    e = corpus.get(name)
    roots = [(0.0, *e.roots.zero_root)] if e.roots.zero_root else []
    roots += list(e.roots.nonzero_roots)
    for x, m1, m2 in roots:
        v = e.symbol(np.array([x, -x]))
        if m1:
            assert np.abs(v.real).max() <= 1e-12
        if m2:
            assert np.abs(v.imag).max() <= 1e-12


def test_lookup_is_case_insensitive():
    assert corpus.get("F2") is corpus.get("f2")
    with pytest.raises(UsageError):
        corpus.get("f6")


def test_toeplitz_cache_returns_same_object():
    assert corpus.toeplitz("f3", 32) is corpus.toeplitz("F3", 32)


@pytest.mark.parametrize("name", ["f2", "f3", "f4", "f5", "f9", "f10", "f14"])
def test_elimination_leaves_positive_real_part(name):
    g = corpus.elimination_poly(corpus.get(name))
    r = corpus.ratio_samples(name, g, 20_001)
    assert r.real.min() > 0


def test_quotient_fills_removable_points():
    g = corpus.elimination_poly(corpus.get("f3"))
    q = corpus.quotient(corpus.get("f3").symbol, g)
    v = q(np.array([0.0, 1e-3]))
    assert np.all(np.isfinite(v)) and abs(v[0] - v[1]) < 1e-2


def test_band_kinds():
    g = corpus.elimination_poly(corpus.get("f3"))
    np.testing.assert_array_equal(corpus.band_poly("f3", "band").band_coeffs(), g.band_coeffs())
    p = corpus.band_poly("f3", "remez", 4, 4)
    assert p.degree == corpus.band_poly("f3", "band").degree + 4
    with pytest.raises(UsageError):
        corpus.band_poly("f3", "spline")
    with pytest.raises(UsageError):
        corpus.preconditioner("f3", 16, "spline")


def test_approximation_bounds_f2():
    m, eps = corpus.approximation_bounds("f2", 6, 6)
    assert 0.9 < m < 1.1 and 0 < eps < 0.1
    # the cluster interval [1 - M eps, 1 + M eps] used by the singular-value tables
    assert 1 - m * eps == pytest.approx(0.931, abs=2e-3)


def test_ratio_rectangle_contains_ratio():
    p = corpus.band_poly("f1", "remez", 8, 6)
    lo, hi, hh = corpus.ratio_rectangle("f1", p)
    r = corpus.ratio_samples("f1", p, 1001)
    assert lo < r.real.min() and r.real.max() < hi and np.abs(r.imag).max() < hh
