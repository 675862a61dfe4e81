"""Named invariant checks run by ``twisted-lab suite``.

Every check takes a seeded generator and returns ``(passed, detail)`` where
``detail`` is a small JSON-ready dict of measured quantities. Sizes are kept
small so the whole manifest runs in well under a minute.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import blocks as B
from . import cantor as C
from . import centralizer as K
from . import riesz as R
from . import sampling as S
from . import twisted as T
from .group import (
    GroupFunction,
    SpectrumFunction,
    cantor_group,
    character,
    constant,
    convolve,
    fourier_forward,
    fourier_inverse,
    make_group,
    norm,
    spectral_norm,
    translate,
    translation_multiplier,
)
from .oracles import naive_forward

EXACT = 1e-12
TRANSFORM = 1e-10

Check = Callable[[np.random.Generator], tuple[bool, dict]]
MANIFEST: dict[str, Check] = {}

GROUPS = ([2] * 6, [64], [4, 9, 5], [3, 2, 2])
PROFILES = (K.IDENTITY, K.LOG1P, K.parse_profile("pow:0.5"))


def check(name: str):
    def register(fn: Check) -> Check:
        if name in MANIFEST:
            raise ValueError(f"duplicate check {name}")
        MANIFEST[name] = fn
        return fn

    return register


def _groups():
    return [make_group(o) for o in GROUPS]


def _gauss(g, rng) -> GroupFunction:
    return GroupFunction(g, S.complex_gaussian(rng, g.size))


# ---------------------------------------------------------------------------
# group core


@check("fourier_parseval")
def _(rng):
    worst = 0.0
    for g in _groups():
        for _ in range(20):
            f = S.random_function(g, rng)
            worst = max(worst, abs(norm(f, 2) - spectral_norm(fourier_forward(f), 2)) / max(norm(f, 2), 1e-300))
    return worst <= TRANSFORM, {"max_rel_error": worst}


@check("fourier_matches_naive_dft")
def _(rng):
    worst = 0.0
    for g in _groups():
        for _ in range(5):
            f = _gauss(g, rng)
            ref = naive_forward(f)
            worst = max(worst, float(np.max(np.abs(fourier_forward(f).values - ref.values)) / np.max(np.abs(ref.values))))
    return worst <= TRANSFORM, {"max_rel_error": worst}


@check("fourier_round_trip")
def _(rng):
    worst = 0.0
    for g in _groups():
        f = _gauss(g, rng)
        worst = max(worst, float(np.max(np.abs(fourier_inverse(fourier_forward(f)).values - f.values))))
    return worst <= TRANSFORM, {"max_error": worst}


@check("convolution_theorem")
def _(rng):
    worst = 0.0
    for g in _groups():
        f, h = _gauss(g, rng), _gauss(g, rng)
        lhs = fourier_forward(convolve(f, h)).values
        rhs = fourier_forward(f).values * fourier_forward(h).values
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / (norm(f, 2) * norm(h, 2)))
    return worst <= TRANSFORM, {"max_scaled_error": worst}


@check("young_l1")
def _(rng):
    worst = -math.inf
    for g in _groups():
        for _ in range(10):
            f, h = S.random_function(g, rng), S.random_function(g, rng)
            worst = max(worst, norm(convolve(f, h), 1) - norm(f, 1) * norm(h, 1))
    return worst <= TRANSFORM, {"max_excess": worst}


@check("translation_spectrum_identity")
def _(rng):
    worst = 0.0
    for g in _groups():
        for _ in range(10):
            f, y = _gauss(g, rng), int(rng.integers(g.size))
            lhs = fourier_forward(translate(f, y)).values
            rhs = translation_multiplier(g, y) * fourier_forward(f).values
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= EXACT, {"max_error": worst}


# ---------------------------------------------------------------------------
# Kalton-Peck maps


def _random_spectrum(g, rng) -> SpectrumFunction:
    return S.random_spectrum(g, rng)


@check("kp_unitary_invariance")
def _(rng):
    worst = 0.0
    for g in _groups():
        for prof in PROFILES:
            c = _random_spectrum(g, rng)
            u = np.exp(2j * np.pi * rng.random(g.size))
            lhs = K.kp_map(prof, 2, SpectrumFunction(g, u * c.values)).values
            rhs = u * K.kp_map(prof, 2, c).values
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= EXACT, {"max_error": worst}


@check("kp_permutation_invariance")
def _(rng):
    worst = 0.0
    for g in _groups():
        for prof in PROFILES:
            c = _random_spectrum(g, rng)
            perm = rng.permutation(g.size)
            lhs = K.kp_map(prof, 2, SpectrumFunction(g, c.values[perm])).values
            rhs = K.kp_map(prof, 2, c).values[perm]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= EXACT, {"max_error": worst}


@check("kp_support_preservation")
def _(rng):
    ok = True
    for g in _groups():
        for _ in range(10):
            c = S.random_spectrum(g, rng, "sparse")
            out = K.kp_map(K.IDENTITY, 2, c)
            ok &= set(out.support()) <= set(c.support())
    return bool(ok), {}


@check("kp_rearrangement_commutation")
def _(rng):
    worst = 0.0
    small, big = cantor_group(4), cantor_group(7)
    for _ in range(20):
        c = _random_spectrum(small, rng)
        sigma = rng.choice(big.size, size=small.size, replace=False)
        lhs = K.kp_map(K.IDENTITY, 2, K.rearrange(c, sigma, big)).values
        rhs = K.rearrange(K.kp_map(K.IDENTITY, 2, c), sigma, big).values
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= EXACT, {"max_error": worst}


@check("mho_translation_commutation")
def _(rng):
    worst = 0.0
    cfg = K.CentralizerConfig()
    for g in _groups():
        for _ in range(10):
            f, y = S.random_function(g, rng), int(rng.integers(g.size))
            worst = max(worst, float(np.max(np.abs(K.mho(cfg, translate(f, y)).values - translate(K.mho(cfg, f), y).values))))
    return worst <= EXACT, {"max_error": worst}


@check("mho_character_commutation")
def _(rng):
    worst = 0.0
    cfg = K.CentralizerConfig()
    for g in _groups():
        for _ in range(10):
            f, chi = S.random_function(g, rng), character(g, int(rng.integers(g.size)))
            worst = max(worst, float(np.max(np.abs(K.mho(cfg, chi * f).values - (chi * K.mho(cfg, f)).values))))
    return worst <= EXACT, {"max_error": worst}


@check("kp_quasilinear_constant")
def _(rng):
    seed = int(rng.integers(2**31))
    worst = {}
    ok = True
    for prof in PROFILES:
        m = K.kp_normed(prof)
        d = max(K.defect_quasilinear(m, S.spectrum_pair(g), 100, seed) for g in _groups())
        worst[prof.name] = d
        ok &= d <= prof.quasilinear_bound + 1e-9
    return bool(ok), {"max_defect": worst, "bound_id": K.IDENTITY.quasilinear_bound}


@check("mho_l1_centralizer_constant")
def _(rng):
    seed = int(rng.integers(2**31))
    worst = {}
    ok = True
    for prof in PROFILES:
        for p, q in ((2, 2), (math.inf, 1)):
            cfg = K.CentralizerConfig(prof, p=p, q=q)
            d = max(K.max_defect_l1(cfg, S.l1_pair(g), 50, seed) for g in _groups())
            worst[f"{prof.name},p={p},q={q}"] = d
            ok &= d <= prof.centralizer_bound + 1e-9
    return bool(ok), {"max_defect": worst}


@check("pointwise_l1_centralizer_constant")
def _(rng):
    worst = 0.0
    for g in _groups():
        draw = S.l1_pair(g)
        for _ in range(50):
            a, f = draw(rng)
            worst = max(worst, K.defect_l1_pointwise(K.IDENTITY, 2, a, f))
    return worst <= K.IDENTITY.centralizer_bound + 1e-9, {"max_defect": worst}


@check("lipschitz_profile_spot_check")
def _(rng):
    ok = True
    for prof in PROFILES + (K.ZERO,):
        s, t = rng.uniform(-20, 20, 2000), rng.uniform(-20, 20, 2000)
        ok &= bool(np.all(np.abs(prof(s) - prof(t)) <= prof.lipschitz_constant * np.abs(s - t) + 1e-9))
        ok &= float(prof(0.0)) == 0.0
    return bool(ok), {}


@check("sidon_map_restriction")
def _(rng):
    g = cantor_group(5)
    sigma = [1 << j for j in range(5)]
    cfg = K.CentralizerConfig()
    worst = 0.0
    for _ in range(10):
        f = S.random_function(g, rng)
        out = fourier_forward(K.mho_sidon(cfg, sigma, f)).values
        mask = np.zeros(g.size, dtype=bool)
        mask[sigma] = True
        worst = max(worst, float(np.max(np.abs(out[~mask]), initial=0.0)))
    return worst <= EXACT, {"max_off_sigma": worst}


# ---------------------------------------------------------------------------
# twisted sums


@check("twisted_quasi_triangle")
def _(rng):
    worst = 0.0
    for prof in PROFILES:
        cfg = K.CentralizerConfig(prof)
        for g in _groups():
            for _ in range(10):
                p1 = T.TwistedPair(S.random_function(g, rng), S.random_function(g, rng), cfg)
                p2 = T.TwistedPair(S.random_function(g, rng), S.random_function(g, rng), cfg)
                denom = T.twisted_quasinorm(p1) + T.twisted_quasinorm(p2)
                worst = max(worst, T.twisted_quasinorm(p1 + p2) / denom)
    bound = 1 + K.IDENTITY.quasilinear_bound
    return worst <= bound, {"max_ratio": worst, "bound": bound}


@check("twisted_module_action")
def _(rng):
    worst = -math.inf
    for g in _groups():
        cfg = K.CentralizerConfig()
        for _ in range(20):
            a = S.random_function(g, rng)
            pair = T.TwistedPair(S.random_function(g, rng), S.random_function(g, rng), cfg)
            lhs = T.twisted_quasinorm(T.act(a, pair))
            rhs = (1 + K.IDENTITY.centralizer_bound) * norm(a, 1) * T.twisted_quasinorm(pair)
            worst = max(worst, lhs - rhs)
    return worst <= 1e-9, {"max_excess": worst}


@check("twisted_embedding_isometric")
def _(rng):
    worst = 0.0
    for g in _groups():
        cfg = K.CentralizerConfig()
        y = S.random_function(g, rng)
        worst = max(worst, abs(T.twisted_quasinorm(T.embed_y(y, cfg)) - norm(y, cfg.q)))
        f = S.random_function(g, rng)
        worst = max(worst, abs(T.twisted_quasinorm(T.lift(f, cfg)) - norm(f, cfg.p)))
    return worst <= EXACT, {"max_error": worst}


@check("delta_lower_monotone")
def _(rng):
    cfg = K.CentralizerConfig(K.IDENTITY, p=math.inf, q=1)
    g = cantor_group(5)
    ws = [S.random_function(g, rng) for _ in range(6)]
    vals = [T.delta_lower(cfg, ws[: i + 1]) for i in range(len(ws))]
    return all(b >= a for a, b in zip(vals, vals[1:])), {"values": vals}


@check("block_decomposition_defect")
def _(rng):
    g = cantor_group(6)
    cfg = K.CentralizerConfig()
    worst = -math.inf
    for _ in range(20):
        f = S.random_function(g, rng)
        a = sorted(rng.choice(np.arange(1, 7), size=int(rng.integers(0, 4)), replace=False).tolist())
        worst = max(worst, T.block_defect(cfg, a, f) - T.block_defect_bound(cfg, a, f))
    return worst <= 1e-9, {"max_excess": worst}


# ---------------------------------------------------------------------------
# Riesz products


@check("riesz_spectrum_closed_form")
def _(rng):
    worst = 0.0
    for case, ns in ((R.DDAGGER, range(1, 11)), (R.DAGGER, range(1, 6))):
        for n in ns:
            spec = R.make_spec(case, n)
            diff = fourier_forward(R.riesz_product(spec)).values - R.closed_form_spectrum(spec).values
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst <= EXACT, {"max_error": worst}


@check("riesz_part_norms")
def _(rng):
    worst = -math.inf
    for case, ns in ((R.DDAGGER, range(1, 11)), (R.DAGGER, range(1, 6))):
        for n in ns:
            spec = R.make_spec(case, n)
            parts = R.length_decompose(R.riesz_product(spec), spec).parts
            for k, part in enumerate(parts):
                if case == R.DDAGGER:
                    target = (spec.alpha * math.sqrt(n)) ** -k * math.sqrt(math.comb(n, k))
                    worst = max(worst, abs(norm(part, 2) - target))
                else:
                    cap = spec.alpha**-k * (1 / (2**k * math.factorial(k))) ** 0.5
                    worst = max(worst, norm(part, 2) - cap)
    return worst <= EXACT, {"max_excess": worst}


@check("riesz_norm_chain")
def _(rng):
    ok = True
    for n in range(1, 13):
        spec = R.rademacher_spec(n)
        f = R.riesz_product(spec)
        a = spec.alpha
        chain = [1.0, norm(f, math.inf), norm(f, 2), (1 + 1 / (a * a * n)) ** (n / 2), math.exp(1 / (2 * a * a))]
        ok &= all(x <= y + EXACT for x, y in zip(chain, chain[1:]))
    for n in range(1, 6):
        spec = R.lacunary_spec(n)
        f = R.riesz_product(spec)
        a = spec.alpha
        ok &= 1 - EXACT <= norm(f, 2) <= (1 + 1 / (2 * a * a * n)) ** (n / 2) + EXACT
        ok &= norm(f, 2) <= norm(f, math.inf) + EXACT
        ok &= norm(f, math.inf) <= math.exp(1 / (2 * a * a)) + EXACT
    return bool(ok), {}


@check("riesz_part_parity")
def _(rng):
    worst = 0.0
    for spec in (R.rademacher_spec(8), R.lacunary_spec(4)):
        for k, part in enumerate(R.length_decompose(R.riesz_product(spec), spec).parts):
            off = part.values.imag if k % 2 == 0 else part.values.real
            worst = max(worst, float(np.max(np.abs(off))))
    return worst <= EXACT, {"max_error": worst}


@check("riesz_diagonal_action")
def _(rng):
    worst = 0.0
    for n in range(1, 11):
        spec = R.rademacher_spec(n)
        f = R.riesz_product(spec)
        fhat = fourier_forward(f).values
        out = fourier_forward(K.mho(K.CentralizerConfig(), f)).values
        lengths = R.length_table(spec)
        scale = norm(f, 2)
        expected = fhat * np.log(scale * (spec.alpha * math.sqrt(n)) ** lengths)
        worst = max(worst, float(np.max(np.abs(out - expected))))
    return worst <= TRANSFORM, {"max_error": worst}


@check("witness_growth_identity")
def _(rng):
    report = R.witness(K.IDENTITY, 2.0, range(1, 13))
    return report.passed and report.increasing_from(2), {"mho_l1": [r.mho_l1 for r in report.rows]}


# ---------------------------------------------------------------------------
# Cantor group


@check("localization_equivalence")
def _(rng):
    agree = True
    localized = 0
    for _ in range(60):
        n = int(rng.integers(2, 8))
        size = int(rng.integers(1, min(n, 4) + 1))
        a = sorted(rng.choice(np.arange(1, n + 1), size=size, replace=False).tolist())
        eps = [int(s) for s in rng.choice([-1, 1], size=size)]
        cube = C.subcube(n, a, eps)
        f = S.random_function(cube.group, rng, "gaussian")
        if rng.random() < 0.5:
            f = f * C.subcube_indicator(cube)
        conds = C.localization_conditions(f, cube)
        localized += conds[0]
        agree &= len(set(conds)) == 1
    return bool(agree), {"localized": int(localized)}


@check("mho_support_stability")
def _(rng):
    ok = True
    cfg = K.CentralizerConfig()
    for _ in range(20):
        cube = C.subcube(6, [1, 4], [int(s) for s in rng.choice([-1, 1], size=2)])
        f = S.random_function(cube.group, rng) * C.subcube_indicator(cube)
        out = K.mho(cfg, f)
        ok &= bool(np.all(np.abs(out.values[~cube.membership()]) <= EXACT))
    return bool(ok), {}


@check("subcube_translation_conjugation")
def _(rng):
    worst = 0.0
    cfg = K.CentralizerConfig()
    for _ in range(20):
        eps = [int(s) for s in rng.choice([-1, 1], size=2)]
        eta = [int(s) for s in rng.choice([-1, 1], size=2)]
        c_eps, c_eta = C.subcube(6, [2, 5], eps), C.subcube(6, [2, 5], eta)
        y = C.conjugating_point(c_eps, c_eta)
        f = S.random_function(c_eta.group, rng) * C.subcube_indicator(c_eta)
        lhs = translate(K.mho(cfg, translate(f, y)), y)
        worst = max(worst, float(np.max(np.abs(lhs.values - K.mho(cfg, f).values))))
    return worst <= EXACT, {"max_error": worst}


@check("embedding_eb_sum_and_commutation")
def _(rng):
    spec = C.embedding(7, [2, 6], [1, -1])
    cfg = K.CentralizerConfig()
    sum_err, comm_err = 0.0, 0.0
    for _ in range(10):
        f = S.random_function(spec.source, rng)
        total = sum((C.eb_operator(spec, b, f) for b in C.subsets(spec.cube.a)[1:]), C.eb_operator(spec, (), f))
        sum_err = max(sum_err, float(np.max(np.abs(total.values - C.embed(spec, f).values))))
        for b in C.subsets(spec.cube.a):
            lhs = K.mho(cfg, C.eb_operator(spec, b, f))
            rhs = C.eb_operator(spec, b, K.mho(cfg, f))
            comm_err = max(comm_err, norm(lhs - rhs, 2))
    return max(sum_err, comm_err) <= EXACT, {"sum_error": sum_err, "commutation_error": comm_err}


@check("embedding_norm_scaling")
def _(rng):
    spec = C.embedding(6, [1, 3, 4], [1, 1, -1])
    worst = 0.0
    for _ in range(10):
        f = S.random_function(spec.source, rng)
        ef = C.embed(spec, f)
        for p in (1, 2, 3):
            worst = max(worst, abs(norm(ef, p) - 2 ** (-3 / p) * norm(f, p)))
        worst = max(worst, abs(norm(ef, math.inf) - norm(f, math.inf)))
    return worst <= EXACT, {"max_error": worst}


@check("copies_defect_bound")
def _(rng):
    spec = C.embedding(8, [1, 3], [1, -1])
    samples = [S.random_function(spec.source, rng) for _ in range(30)]
    report = C.copies_report(spec, K.IDENTITY, samples)
    return report["pass"], {"max_defect": report["max_defect"], "bound": report["bound"]}


@check("walk_mean_asymptotics")
def _(rng):
    exact = [C.walk_mean(2)[0], C.walk_mean(4)[0]]
    ratios = [C.walk_mean(n)[1] for n in (64, 256, 1024)]
    ok = exact == [1.0, 1.5] and all(abs(r - 1) < 0.01 for r in ratios)
    ok &= all(r2 >= r1 for r1, r2 in zip(ratios, ratios[1:]))
    return bool(ok), {"exact": exact, "ratios": ratios}


@check("khintchine_l1_constant")
def _(rng):
    lo = 2**-0.5
    ok = abs(C.khintchine_ratio([1, 1], 1) - lo) <= EXACT
    worst_lo, worst_hi = math.inf, -math.inf
    for _ in range(100):
        a = rng.standard_normal(int(rng.integers(1, 11)))
        if not a.any():
            continue
        r = C.khintchine_ratio(a, 1)
        worst_lo, worst_hi = min(worst_lo, r), max(worst_hi, r)
    ok &= worst_lo >= lo - EXACT and worst_hi <= 1 + EXACT
    return bool(ok), {"min_ratio": worst_lo, "max_ratio": worst_hi}


# ---------------------------------------------------------------------------
# blocks


def _small_block_spec() -> B.BlockSpec:
    return B.BlockSpec((0.5, 0.25, 0.125), (3, 5, 7), K.IDENTITY)


@check("block_map_locality_and_homogeneity")
def _(rng):
    spec = _small_block_spec()
    x = B.random_block_vector(spec, rng)
    y = B.random_block_vector(spec, rng)
    mixed = B.BlockVector((x.blocks[0], y.blocks[1], x.blocks[2]))
    fx, fm = B.block_map(spec, x), B.block_map(spec, mixed)
    local = fx.blocks[0].allclose(fm.blocks[0], 0.0) and fx.blocks[2].allclose(fm.blocks[2], 0.0)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    hom = max(float(np.max(np.abs(a.values - lam * b.values))) for a, b in zip(B.block_map(spec, x * lam).blocks, fx.blocks))
    return bool(local and hom <= EXACT), {"homogeneity_error": hom}


@check("block_quasilinear_constant")
def _(rng):
    spec = _small_block_spec()
    d = B.block_quasilinear_defect(spec, 50, int(rng.integers(2**31)))
    return d <= spec.quasilinear_bound + 1e-9, {"max_defect": d, "bound": spec.quasilinear_bound}


@check("block_growth_default_schedule")
def _(rng):
    report = B.default_growth_report(K.IDENTITY, trials=20, seed=int(rng.integers(2**31)))
    return report.passed, {"delta_lower": [r.delta_lower_k for r in report.feasible], "feasible_blocks": len(report.feasible)}


def run_suite(seed: int = 0, only: list[str] | None = None) -> dict:
    names = list(MANIFEST) if only is None else only
    results = []
    for i, name in enumerate(names):
        if name not in MANIFEST:
            raise KeyError(f"unknown check {name!r}")
        rng = np.random.default_rng([seed, i])
        try:
            passed, detail = MANIFEST[name](rng)
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append({"name": name, "passed": bool(passed), "detail": _jsonable(detail)})
    return {"seed": seed, "passed": all(r["passed"] for r in results), "checks": results}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
