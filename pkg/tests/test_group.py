import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import complex_arrays, function_pairs, functions, groups
from twisted_lab import _kernels
from twisted_lab.group import (
    BudgetExceeded,
    GroupFunction,
    SpectrumFunction,
    cantor_group,
    character,
    constant,
    convolve,
    fourier_forward,
    fourier_inverse,
    from_json,
    is_dissociate,
    make_group,
    norm,
    point_indicator,
    rademacher,
    spectral_indicator,
    spectral_norm,
    translate,
    translation_multiplier,
)
from twisted_lab.oracles import naive_convolve, naive_forward, naive_inverse


def test_group_sizes():
    assert make_group([2, 2]).size == 4
    trivial = make_group([])
    assert trivial.size == 1 and trivial.rank == 0
    assert cantor_group(20).size == 1_048_576


def test_group_rejects_bad_orders():
    with pytest.raises(ValueError):
        make_group([3, 0])
    with pytest.raises(OverflowError):
        make_group([2**40, 2**40])


def test_budget_env(monkeypatch):
    monkeypatch.setenv("TWISTED_LAB_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        make_group([11, 11])
    assert make_group([10, 10]).size == 100


def test_index_is_little_endian():
    g = make_group([3, 4])
    assert g.coords(1) == (1, 0)
    assert g.coords(3) == (0, 1)
    assert g.index((2, 3)) == 2 + 3 * 3


def test_character_values_match_definition():
    g = make_group([3, 4, 2])
    for a in range(g.size):
        vals = g.character_values(a)
        for x in range(g.size):
            assert vals[x] == pytest.approx(g.character_at(a, x), abs=1e-12)


def test_walsh_characters_on_cantor_group():
    g = cantor_group(3)
    x = g.element_from_signs([-1, 1, -1])
    # w_{1,2}(x) = x(1) x(2)
    assert g.character_at(g.walsh([1, 2]), x) == pytest.approx(-1)
    assert g.character_at(g.walsh([1, 3]), x) == pytest.approx(1)
    assert rademacher(g, 2).values[x] == pytest.approx(1)


def test_forward_examples():
    g1 = cantor_group(1)
    assert fourier_forward(rademacher(g1, 1)).allclose(spectral_indicator(g1, 1))
    for g in (cantor_group(3), make_group([5, 3])):
        assert fourier_forward(constant(g)).allclose(spectral_indicator(g, 0))
    g2 = cantor_group(2)
    assert np.allclose(fourier_forward(point_indicator(g2, 0)).values, 0.25)


def test_inverse_examples():
    g = cantor_group(2)
    assert fourier_inverse(spectral_indicator(g, 0)).allclose(constant(g))
    assert fourier_inverse(spectral_indicator(g, g.walsh([1]))).allclose(rademacher(g, 1))


@given(functions())
def test_forward_matches_naive(f):
    fast, ref = fourier_forward(f).values, naive_forward(f).values
    scale = max(np.max(np.abs(ref)), 1e-300)
    assert np.max(np.abs(fast - ref)) <= 1e-10 * scale


@given(groups(), st.data())
def test_inverse_matches_naive_and_round_trips(g, data):
    c = SpectrumFunction(g, data.draw(complex_arrays(g.size)))
    fast, ref = fourier_inverse(c).values, naive_inverse(c).values
    scale = max(np.max(np.abs(ref)), 1e-300)
    assert np.max(np.abs(fast - ref)) <= 1e-10 * scale
    back = fourier_forward(fourier_inverse(c)).values
    assert np.max(np.abs(back - c.values)) <= 1e-10 * max(np.max(np.abs(c.values)), 1e-300)


@given(functions())
def test_parseval(f):
    assert abs(norm(f, 2) - spectral_norm(fourier_forward(f), 2)) <= 1e-10 * max(norm(f, 2), 1e-300)


@given(function_pairs())
def test_convolution_matches_naive_and_theorem(pair):
    f, g = pair
    h = convolve(f, g)
    assert np.max(np.abs(h.values - naive_convolve(f, g).values), initial=0) <= 1e-10 * max(norm(f, 2) * norm(g, 2), 1e-300)
    lhs = fourier_forward(h).values
    rhs = fourier_forward(f).values * fourier_forward(g).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * norm(f, 2) * norm(g, 2) + 1e-300


def test_convolution_theorem_at_4096():
    rng = np.random.default_rng(3)
    for orders in ([2] * 12, [4096], [16, 256], [8, 9, 7, 8]):
        g = make_group(orders)
        f = GroupFunction(g, rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size))
        h = GroupFunction(g, rng.standard_normal(g.size))
        lhs = fourier_forward(convolve(f, h)).values
        rhs = fourier_forward(f).values * fourier_forward(h).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * norm(f, 2) * norm(h, 2)


@given(function_pairs())
def test_young_l1(pair):
    f, g = pair
    assert norm(convolve(f, g), 1) <= norm(f, 1) * norm(g, 1) + 1e-10


def test_convolution_examples():
    g = make_group([3, 5])
    for a in range(g.size):
        chi = character(g, a)
        assert convolve(chi, chi).allclose(chi)
    d2 = cantor_group(2)
    assert convolve(rademacher(d2, 1), rademacher(d2, 2)).allclose(GroupFunction(d2, np.zeros(4)))
    f = GroupFunction(g, np.arange(g.size) + 1j)
    assert convolve(f, constant(g)).allclose(constant(g, fourier_forward(f).values[0]))


def test_convolution_group_mismatch():
    with pytest.raises(ValueError):
        convolve(constant(cantor_group(2)), constant(make_group([4])))


@given(functions(), st.data())
def test_translation_spectrum_identity(f, data):
    g = f.group
    y = data.draw(st.integers(min_value=0, max_value=g.size - 1))
    lhs = fourier_forward(translate(f, y)).values
    # oracle: gamma(y) evaluated directly, conjugated
    mult = np.array([np.conj(g.character_at(a, y)) for a in range(g.size)])
    assert np.max(np.abs(lhs - mult * fourier_forward(f).values)) <= 1e-12 * max(1.0, norm(f, 2))
    assert np.allclose(translation_multiplier(g, y), mult, atol=1e-12)


@given(functions(), st.data())
def test_translation_is_an_action(f, data):
    g = f.group
    y = data.draw(st.integers(min_value=0, max_value=g.size - 1))
    z = data.draw(st.integers(min_value=0, max_value=g.size - 1))
    assert translate(f, 0).allclose(f, 0.0)
    assert translate(translate(f, y), z).allclose(translate(f, g.add(y, z)), 0.0)
    # direct definition f_y(x) = f(x - y)
    x = data.draw(st.integers(min_value=0, max_value=g.size - 1))
    assert translate(f, y).values[x] == f.values[g.add(x, g.neg(y))]


def test_translation_example_on_delta2():
    g = cantor_group(2)
    y = g.element_from_signs([-1, 1])
    r1 = rademacher(g, 1)
    assert translate(r1, y).allclose(-r1, 0.0)


def test_norm_examples():
    for g in (cantor_group(3), make_group([6, 5])):
        for p in (1, 1.5, 2, 3, math.inf):
            assert norm(constant(g), p) == pytest.approx(1, abs=1e-15)
    d2 = cantor_group(2)
    for p in (1, 2, 4, math.inf):
        assert norm(rademacher(d2, 1), p) == pytest.approx(1, abs=1e-15)
    assert norm(rademacher(d2, 1) + rademacher(d2, 2), 1) == pytest.approx(1)


def test_norm_rejects_small_exponent():
    with pytest.raises(ValueError):
        norm(constant(cantor_group(1)), 0.5)
    with pytest.raises(ValueError):
        spectral_norm(spectral_indicator(cantor_group(1), 0), 0.9)


@given(functions(), st.floats(min_value=1, max_value=8))
def test_norm_monotone_in_p(f, p):
    assert norm(f, 1) <= norm(f, p) * (1 + 1e-12) + 1e-300
    assert norm(f, p) <= norm(f, math.inf) * (1 + 1e-12) + 1e-300


def test_is_dissociate_examples():
    d3 = cantor_group(3)
    assert is_dissociate([d3.walsh([k]) for k in (1, 2, 3)], d3)
    assert not is_dissociate([d3.walsh([1]), d3.walsh([2]), d3.walsh([1, 2])], d3)
    z5 = make_group([5])
    assert not is_dissociate([1, 2], z5)
    assert not is_dissociate([0, 1], z5)
    with pytest.raises(ValueError):
        is_dissociate([1, 1], z5)
    with pytest.raises(ValueError):
        is_dissociate(list(range(1, 18)), make_group([2**17]))


def _dissociate_bruteforce(sigma, g):
    import itertools

    if 0 in sigma:
        return False
    for exps in itertools.product((0, 1, -1, 2, -2), repeat=len(sigma)):
        total = 0
        powers = []
        for s, e in zip(sigma, exps):
            cs = g.coords(s)
            pw = g.index(tuple((e * c) % m for c, m in zip(cs, g.orders)))
            powers.append(pw)
            total = g.add(total, pw)
        if total == 0 and any(pw != 0 for pw in powers):
            return False
    return True


@given(st.sampled_from([[5], [7], [9], [2, 2, 2], [4, 3], [2, 4], [3, 3]]), st.data())
def test_is_dissociate_matches_bruteforce(orders, data):
    g = make_group(orders)
    k = data.draw(st.integers(min_value=1, max_value=min(4, g.size)))
    sigma = data.draw(st.lists(st.integers(0, g.size - 1), min_size=k, max_size=k, unique=True))
    assert is_dissociate(sigma, g) == _dissociate_bruteforce(sigma, g)


def test_lacunary_set_is_dissociate():
    n = 8
    g = make_group([2 * 3**n + 1])
    assert is_dissociate([3**j for j in range(n)], g)


def test_json_round_trip():
    g = make_group([3, 2])
    f = GroupFunction(g, np.arange(6) * (1 - 0.5j))
    back = from_json(f.to_json())
    assert isinstance(back, GroupFunction) and back.allclose(f, 0.0)
    c = fourier_forward(f)
    back = from_json(c.to_json())
    assert isinstance(back, SpectrumFunction) and back.allclose(c, 0.0)
    with pytest.raises(ValueError):
        from_json({"orders": [2], "side": "group"})
    with pytest.raises(ValueError):
        from_json({"orders": [2], "side": "other", "values": [[0, 0], [0, 0]]})


def test_values_are_immutable():
    f = constant(cantor_group(2))
    with pytest.raises(ValueError):
        f.values[0] = 3


def test_mixing_sides_is_rejected():
    g = cantor_group(1)
    with pytest.raises(TypeError):
        constant(g) + spectral_indicator(g, 0)


@pytest.mark.parametrize("orders", [[2] * 9, [512], [8, 9, 5], [3, 131], [2, 2, 7]])
def test_backends_agree(orders):
    g = make_group(orders)
    rng = np.random.default_rng(0)
    f = GroupFunction(g, rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size))
    with _kernels.use_backend("numba"):
        a = fourier_forward(f).values
        ai = fourier_inverse(fourier_forward(f)).values
    with _kernels.use_backend("numpy"):
        b = fourier_forward(f).values
        bi = fourier_inverse(fourier_forward(f)).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))
    assert np.max(np.abs(ai - bi)) <= 1e-12 * np.max(np.abs(bi))


def test_bluestein_path_for_large_prime():
    rng = np.random.default_rng(1)
    for m in (131, 1193, 39367):
        x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        with _kernels.use_backend("numba"):
            a = _kernels.dft(x, (m,), -1)
        assert np.max(np.abs(a - np.fft.fft(x))) <= 1e-10 * np.max(np.abs(a))


def test_backend_selection_errors():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")
    before = _kernels.get_backend()
    with _kernels.use_backend("numpy"):
        assert _kernels.get_backend() == "numpy"
    assert _kernels.get_backend() == before


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        _kernels.fwht(np.ones(6))
