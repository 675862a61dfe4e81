import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twisted_lab import cantor as C
from twisted_lab import centralizer as K
from twisted_lab import sampling as S
from twisted_lab.group import (
    GroupFunction,
    cantor_group,
    constant,
    fourier_forward,
    make_group,
    norm,
    point_indicator,
    rademacher,
    translate,
)
from twisted_lab.oracles import naive_forward

CFG = K.CentralizerConfig()


@st.composite
def subcubes(draw, max_n=8, max_a=4):
    n = draw(st.integers(1, max_n))
    a = draw(st.lists(st.integers(1, n), max_size=min(n, max_a), unique=True))
    eps = draw(st.lists(st.sampled_from([1, -1]), min_size=len(a), max_size=len(a)))
    return C.subcube(n, a, eps)


def test_subcube_validation():
    with pytest.raises(ValueError):
        C.subcube(3, [4], [1])
    with pytest.raises(ValueError):
        C.subcube(3, [1, 1], [1, 1])
    with pytest.raises(ValueError):
        C.subcube(3, [1], [2])
    with pytest.raises(ValueError):
        C.subcube(3, [1, 2], [1])
    with pytest.raises(ValueError):
        C.SubcubeSpec(make_group([4]), (1,), (1,))


def test_subcube_inputs_are_sorted():
    cube = C.subcube(5, [4, 2], [-1, 1])
    assert cube.a == (2, 4) and cube.epsilon == (1, -1)
    assert cube.sign(4) == -1


@given(subcubes())
def test_subcube_measure_and_spectrum(cube):
    ind = C.subcube_indicator(cube)
    assert ind.integral() == pytest.approx(cube.measure)
    assert cube.measure == 2.0 ** -len(cube.a)
    # closed form against the O(n^2) transform
    assert np.max(np.abs(C.subcube_spectrum(cube).values - naive_forward(ind).values)) <= 1e-15


@given(subcubes())
def test_subcube_membership_by_signs(cube):
    g = cube.group
    inside = cube.membership()
    for x in range(g.size):
        signs = [1 - 2 * ((x >> (k - 1)) & 1) for k in range(1, g.rank + 1)]
        assert inside[x] == all(signs[k - 1] == e for k, e in zip(cube.a, cube.epsilon))


def test_subcube_indicator_examples():
    assert C.subcube_indicator(C.subcube(3, [], [])).allclose(constant(cantor_group(3)))
    cube = C.subcube(2, [1], [1])
    c = C.subcube_spectrum(cube).values
    assert np.allclose(c, [0.5, 0.5, 0, 0])
    g = cube.group
    assert C.subcube_indicator(cube).allclose((constant(g) + rademacher(g, 1)) / 2)
    full = C.subcube(4, [1, 2, 3, 4], [1, -1, -1, 1])
    assert np.allclose(np.abs(C.subcube_spectrum(full).values), 2.0**-4)
    assert C.subcube_indicator(full).allclose(point_indicator(full.group, full.sign_bits))


def test_embedding_structure():
    spec = C.embedding(6, [2, 5], [1, -1])
    assert spec.s == (1, 3, 4, 6)
    assert spec.source == cantor_group(4)
    assert spec.target == cantor_group(6)
    assert spec.weight((2, 5)) == -0.25 and spec.weight(()) == 0.25


def test_embed_examples():
    spec = C.embedding(2, [1], [1])
    src = spec.source
    assert C.embed(spec, constant(src)).allclose(C.subcube_indicator(spec.cube))
    g = spec.target
    expected = (constant(g) + rademacher(g, 1)) * rademacher(g, 2) / 2
    assert C.embed(spec, rademacher(src, 1)).allclose(expected)
    with pytest.raises(ValueError):
        C.embed(spec, constant(cantor_group(2)))


def _embedding_draw(data):
    cube = data.draw(subcubes(max_n=7))
    return C.EmbeddingSpec(cube)


@given(st.data())
def test_embed_is_multiplicative_and_maps_rademachers(data):
    spec = _embedding_draw(data)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f, h = S.random_function(spec.source, rng), S.random_function(spec.source, rng)
    assert C.embed(spec, f * h).allclose(C.embed(spec, f) * C.embed(spec, h), 1e-12)
    ind = C.subcube_indicator(spec.cube)
    for n, sn in enumerate(spec.s, start=1):
        assert C.embed(spec, rademacher(spec.source, n)).allclose(ind * rademacher(spec.target, sn), 0.0)


@given(st.data(), st.sampled_from([1, 1.5, 2, 3, math.inf]))
def test_embed_norm_scaling(data, p):
    spec = _embedding_draw(data)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = S.random_function(spec.source, rng)
    factor = 1.0 if math.isinf(p) else 2 ** (-len(spec.cube.a) / p)
    assert norm(C.embed(spec, f), p) == pytest.approx(factor * norm(f, p), rel=1e-12, abs=1e-15)


def test_eb_examples():
    spec = C.embedding(5, [1, 4], [-1, 1])
    src = spec.source
    for d in range(src.size):
        w_d = GroupFunction(src, src.character_values(d))
        out = C.eb_operator(spec, (), w_d)
        expected = GroupFunction(spec.target, spec.target.character_values(int(spec.s_of(d))))
        assert out.allclose(expected * 0.25, 1e-12)
    with pytest.raises(ValueError):
        C.eb_operator(spec, (2,), constant(src))


@given(st.data())
def test_eb_sum_and_commutation(data):
    spec = _embedding_draw(data)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = S.random_function(spec.source, rng)
    parts = [C.eb_operator(spec, b, f) for b in C.subsets(spec.cube.a)]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    assert total.allclose(C.embed(spec, f), 1e-12)
    mf = K.mho(CFG, f)
    for b, part in zip(C.subsets(spec.cube.a), parts):
        assert norm(K.mho(CFG, part) - C.eb_operator(spec, b, mf), 2) <= 1e-12


def test_eb_maps_walsh_to_shifted_walsh():
    spec = C.embedding(4, [2, 3], [1, -1])
    src = spec.source
    for d in range(src.size):
        w_d = GroupFunction(src, src.character_values(d))
        for b in C.subsets(spec.cube.a):
            out = fourier_forward(C.eb_operator(spec, b, w_d)).values
            target = C._mask(b) ^ int(spec.s_of(d))
            assert out[target] == pytest.approx(spec.weight(b))
            assert np.count_nonzero(np.abs(out) > 1e-12) == 1


def test_copies_examples():
    spec = C.embedding(6, [3], [-1])
    src = spec.source
    assert np.allclose(K.mho(CFG, constant(src)).values, 0)
    assert C.copies_defect(spec, K.IDENTITY, constant(src)) == pytest.approx(math.log(2) / 2 / math.sqrt(2), abs=1e-14)
    d = C.copies_defect(spec, K.IDENTITY, rademacher(src, 1))
    # E r1 = 1_cube * r_{s(1)}, whose spectrum has two coefficients of modulus 1/2
    assert d == pytest.approx(math.log(2) / 2 / math.sqrt(2), abs=1e-14)
    rep = C.copies_report(spec, K.IDENTITY, [constant(src), rademacher(src, 2)])
    assert rep["pass"] and rep["bound"] == pytest.approx(37 * 8 / math.e)
    with pytest.raises(ValueError):
        C.copies_report(spec, K.IDENTITY, [])
    with pytest.raises(ValueError):
        C.copies_defect(spec, K.IDENTITY, GroupFunction(src, np.zeros(src.size)))


@given(st.data())
def test_localization_three_way(data):
    cube = data.draw(subcubes(max_n=8))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = GroupFunction(cube.group, S.complex_gaussian(rng, cube.group.size))
    localized = C.localization_conditions(f * C.subcube_indicator(cube), cube)
    assert localized == (True, True, True)
    generic = C.localization_conditions(f, cube)
    assert len(set(generic)) == 1
    assert generic[0] == (not cube.a)


def test_localization_group_mismatch():
    cube = C.subcube(3, [1], [1])
    with pytest.raises(ValueError):
        C.localization_conditions(constant(cantor_group(4)), cube)


@given(st.data())
def test_mho_support_stability(data):
    cube = data.draw(subcubes(max_n=8))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = S.random_function(cube.group, rng) * C.subcube_indicator(cube)
    out = K.mho(CFG, f).values
    assert np.all(np.abs(out[~cube.membership()]) <= 1e-12)


@given(st.data())
def test_translation_conjugation(data):
    n = data.draw(st.integers(1, 7))
    a = data.draw(st.lists(st.integers(1, n), min_size=1, max_size=min(n, 4), unique=True))
    eps = data.draw(st.lists(st.sampled_from([1, -1]), min_size=len(a), max_size=len(a)))
    eta = data.draw(st.lists(st.sampled_from([1, -1]), min_size=len(a), max_size=len(a)))
    c_eps, c_eta = C.subcube(n, a, eps), C.subcube(n, a, eta)
    y = C.conjugating_point(c_eps, c_eta)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = S.random_function(c_eta.group, rng) * C.subcube_indicator(c_eta)
    # f_y lives on the eps cube
    assert np.all(translate(f, y).values[~c_eps.membership()] == 0)
    lhs = translate(K.mho(CFG, translate(f, y)), y)
    assert np.max(np.abs(lhs.values - K.mho(CFG, f).values)) <= 1e-12


def test_conjugating_point_signs():
    c_eps, c_eta = C.subcube(4, [1, 3], [1, -1]), C.subcube(4, [1, 3], [-1, -1])
    y = C.conjugating_point(c_eps, c_eta)
    assert y == c_eps.group.element_from_signs([-1, 1, 1, 1])
    with pytest.raises(ValueError):
        C.conjugating_point(c_eps, C.subcube(4, [1], [1]))


def _walk_reference(n):
    # distribution of X_N built by repeated convolution of {-1, +1}
    dist = {0: Fraction(1)}
    for _ in range(n):
        nxt = {}
        for x, p in dist.items():
            for step in (-1, 1):
                nxt[x + step] = nxt.get(x + step, 0) + p / 2
        dist = nxt
    return float(sum(abs(x) * p for x, p in dist.items()))


def test_walk_examples():
    assert C.walk_mean(2)[0] == 1.0
    assert C.walk_mean(4)[0] == 1.5
    for n in (1, 3, 7, 30):
        assert C.walk_mean(n)[0] == pytest.approx(_walk_reference(n), rel=1e-15)
    with pytest.raises(ValueError):
        C.walk_mean(0)


def test_walk_ratio_tends_to_one():
    ratios = [C.walk_mean(n)[1] for n in (64, 128, 256, 1024, 4096, 10_000)]
    assert all(abs(r - 1) < 0.01 for r in ratios)
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))


def test_khintchine_examples():
    for p in (1, 2, 3.5, math.inf):
        assert C.khintchine_ratio([1, 0, 0], p) == pytest.approx(1, abs=1e-15)
        assert C.khintchine_ratio([0, -2.5], p) == pytest.approx(1, abs=1e-15)
    assert C.khintchine_ratio([1, 1], 1) == pytest.approx(2**-0.5, abs=1e-12)
    assert C.khintchine_ratio([3, 4], 2) == pytest.approx(1, abs=1e-15)
    with pytest.raises(ValueError):
        C.khintchine_ratio([0, 0], 1)
    with pytest.raises(ValueError):
        C.khintchine_ratio([], 1)


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=10).filter(lambda v: any(abs(x) > 1e-6 for x in v)))
def test_khintchine_l1_bounds(a):
    r = C.khintchine_ratio(a, 1)
    assert 2**-0.5 - 1e-12 <= r <= 1 + 1e-12
