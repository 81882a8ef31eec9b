import random
from fractions import Fraction

import pytest

from conefourier.scalars import ScalarContext, scalar_eq
from conefourier.padic import psi_eval, vp
from conefourier.schwartz import SchwartzFunction, Atom, mat_identity
from conefourier.quadratic import dot_space, space_V2, fourier, mul_psi_q
from conefourier.padic import QuadraticCharacter


@pytest.fixture(params=[3, 5])
def ctx(request):
    return ScalarContext(request.param, depth=8)


def random_table(ctx, d, rng, n_atoms=3, m=1, k=1):
    """Sparse plain coset table with small-integer values."""
    p = ctx.p
    entries = {}
    for _ in range(n_atoms):
        rep = tuple(Fraction(rng.randrange(p ** (m + k)), p ** m) for _ in range(d))
        entries[rep] = rng.choice([1, -1, 2, -2])
    return SchwartzFunction.from_table(ctx, d, entries, k)


def probe_points(ctx, d, rng, f, count=8):
    p = ctx.p
    pts = [a.center for _, a in f.atoms]
    for _ in range(count):
        pts.append(tuple(Fraction(rng.randrange(p ** 3), p) for _ in range(d)))
    return pts


def test_indicator_integrate(ctx):
    f = SchwartzFunction.indicator_ball(ctx, 3, level=0)
    assert scalar_eq(f.integrate(), ctx.one())
    g = SchwartzFunction.indicator_ball(ctx, 1, level=1)
    assert scalar_eq(g.integrate(), ctx.rat(Fraction(1, ctx.p)))


def test_integrate_linear(ctx):
    rng = random.Random(7)
    f = random_table(ctx, 2, rng)
    g = random_table(ctx, 2, rng)
    lhs = (f.scale(3) + g.scale(-2)).integrate()
    rhs = f.integrate() * 3 - g.integrate() * 2
    assert scalar_eq(lhs, rhs)


def test_translate_below_level_is_invisible(ctx):
    rng = random.Random(1)
    f = random_table(ctx, 2, rng, k=1)
    g = f.translate((Fraction(ctx.p ** 2), Fraction(0)))
    for pt in probe_points(ctx, 2, rng, f):
        assert scalar_eq(f.evaluate(pt), g.evaluate(pt))


def test_act_linear_identity_and_dilation(ctx):
    rng = random.Random(3)
    f = random_table(ctx, 2, rng)
    g = f.act_linear(mat_identity(2))
    for pt in probe_points(ctx, 2, rng, f):
        assert scalar_eq(f.evaluate(pt), g.evaluate(pt))
    # dilation by p of 1_{Z^2} is 1_{p^{-1}Z^2}
    ball = SchwartzFunction.indicator_ball(ctx, 2, 0)
    A = [[Fraction(ctx.p), 0], [0, Fraction(ctx.p)]]
    dil = ball.act_linear(A)
    assert scalar_eq(dil.evaluate((Fraction(1, ctx.p), Fraction(0))), ctx.one())
    assert dil.evaluate((Fraction(1, ctx.p ** 2), Fraction(0))).is_zero()


def test_slice(ctx):
    rng = random.Random(5)
    f = random_table(ctx, 3, rng)
    s = Fraction(1, ctx.p)
    g = f.slice_coords({0: s})
    for _ in range(6):
        pt = (Fraction(rng.randrange(ctx.p ** 3), ctx.p), Fraction(rng.randrange(ctx.p ** 2)))
        assert scalar_eq(g.evaluate(pt), f.evaluate((s,) + pt))


def test_fourier_self_dual_ball(ctx):
    space = dot_space(2)
    ball = SchwartzFunction.indicator_ball(ctx, 2, 0)
    fb = fourier(ball, space)
    rng = random.Random(11)
    for pt in probe_points(ctx, 2, rng, ball):
        assert scalar_eq(fb.evaluate(pt), ball.evaluate(pt))


def test_fourier_scaling_rule(ctx):
    # d = 1, f = 1_{p^k Z}: F f = p^{-k} 1_{p^{-k} Z}
    p = ctx.p
    space = dot_space(1)
    f = SchwartzFunction.indicator_ball(ctx, 1, 2)
    g = fourier(f, space)
    assert scalar_eq(g.evaluate((Fraction(1, p ** 2),)), ctx.rat(Fraction(1, p ** 2)))
    assert g.evaluate((Fraction(1, p ** 3),)).is_zero()


@pytest.mark.parametrize("disc", ["split", "unram", "ram-p"])
def test_fourier_involution_pointwise(ctx, disc):
    chi = QuadraticCharacter(disc, ctx.p)
    space = space_V2(3, chi.kappa, disc)
    rng = random.Random(13)
    f = random_table(ctx, 4, rng, n_atoms=3, m=1, k=1)
    ff = fourier(fourier(f, space), space)
    for pt in probe_points(ctx, 4, rng, f):
        neg = tuple(-x for x in pt)
        assert scalar_eq(ff.evaluate(pt), f.evaluate(neg))


def test_fourier_plancherel(ctx):
    chi = QuadraticCharacter("unram", ctx.p)
    space = space_V2(3, chi.kappa, "unram")
    rng = random.Random(17)
    f = random_table(ctx, 4, rng, n_atoms=2)
    g = random_table(ctx, 4, rng, n_atoms=2)
    lhs = f.mul_pointwise(g.conjugate()).integrate()
    ff, fg = fourier(f, space), fourier(g, space)
    rhs = ff.mul_pointwise(fg.conjugate()).integrate()
    assert scalar_eq(lhs, rhs)


def test_fourier_exchanges_translation_modulation(ctx):
    space = dot_space(2)
    rng = random.Random(19)
    f = random_table(ctx, 2, rng)
    u0 = (Fraction(1, ctx.p), Fraction(2))
    lhs = fourier(f.translate(u0), space)
    # F(f_{u0})(v) = psi(-<u0, v>) F(f)(v) with <,> the pairing
    ff = fourier(f, space)
    bu0 = space.gram_vec(u0)
    rhs = ff.mul_psi_linear(tuple(-x for x in bu0))
    for pt in probe_points(ctx, 2, rng, ff):
        assert scalar_eq(lhs.evaluate(pt), rhs.evaluate(pt))


def test_mul_psi_q_refines(ctx):
    chi = QuadraticCharacter("split", ctx.p)
    space = space_V2(3, chi.kappa, "split")
    f = SchwartzFunction.indicator_ball(ctx, 4, 0)
    b = Fraction(1, ctx.p ** 2)
    g = mul_psi_q(f, b, space)
    rng = random.Random(23)
    for _ in range(10):
        pt = tuple(Fraction(rng.randrange(ctx.p ** 2)) for _ in range(4))
        want = f.evaluate(pt) * psi_eval(ctx, b * space.q(pt))
        assert scalar_eq(g.evaluate(pt), want)


def test_materialize_roundtrip(ctx):
    rng = random.Random(29)
    f = random_table(ctx, 2, rng, n_atoms=2, m=0, k=1)
    table, m, k = f.materialize()
    g = SchwartzFunction.from_table(ctx, 2, table, k)
    for pt in probe_points(ctx, 2, rng, f):
        assert scalar_eq(f.evaluate(pt), g.evaluate(pt))
