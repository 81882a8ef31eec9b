from fractions import Fraction

import pytest

from conefourier.scalars import ScalarContext, DepthExceeded, scalar_eq


@pytest.fixture(params=[3, 5])
def ctx(request):
    return ScalarContext(request.param, depth=6)


def test_root_defining_property(ctx):
    i = ctx.root_of_unity(4, 1)
    assert scalar_eq(i * i, ctx.rat(-1))


def test_root_identity(ctx):
    assert scalar_eq(ctx.root_of_unity(ctx.p, 0), ctx.one())


def test_root_homomorphism(ctx):
    p = ctx.p
    for a, b in [(1, 1), (2, p - 1), (3, 4)]:
        lhs = ctx.root_of_unity(p, a) * ctx.root_of_unity(p, b)
        assert scalar_eq(lhs, ctx.root_of_unity(p, a + b))


def test_distinct_roots_differ(ctx):
    z1 = ctx.root_of_unity(ctx.p, 1)
    z2 = ctx.root_of_unity(ctx.p, 2)
    assert not scalar_eq(z1, z2)


def test_full_pth_root_sum_vanishes(ctx):
    total = ctx.zero()
    for k in range(ctx.p):
        total = total + ctx.root_of_unity(ctx.p, k)
    assert total.is_zero()
    # same at depth 2
    total = ctx.zero()
    for k in range(ctx.p ** 2):
        total = total + ctx.root_of_unity(ctx.p ** 2, k)
    assert total.is_zero()


def test_conjugation_inverts_roots(ctx):
    for order in (4, ctx.p, ctx.p ** 2, 4 * ctx.p):
        z = ctx.root_of_unity(order, 1)
        assert scalar_eq(z.conjugate(), ctx.root_of_unity(order, -1))
        assert scalar_eq(z * z.conjugate(), ctx.one())
    assert scalar_eq(ctx.rat(Fraction(3, 7)).conjugate(), ctx.rat(Fraction(3, 7)))


def test_conjugation_ring_automorphism(ctx):
    a = ctx.root_of_unity(ctx.p, 1) + ctx.rat(2)
    b = ctx.root_of_unity(4 * ctx.p, 3) - ctx.rat(Fraction(1, 2))
    assert scalar_eq((a * b).conjugate(), a.conjugate() * b.conjugate())
    assert scalar_eq(a.conjugate().conjugate(), a)


def test_order_must_divide_N():
    ctx = ScalarContext(3, depth=2)
    with pytest.raises(DepthExceeded):
        ctx.root_of_unity(5, 1)
    with pytest.raises(DepthExceeded):
        ctx.root_of_unity(3 ** 3, 1)


def test_float_backend_tolerance():
    ctx = ScalarContext(3, depth=4, backend="float", tol=1e-9)
    x = ctx.rat(Fraction(1, 3))
    y = x + ctx.rat(Fraction(1, 10 ** 12))
    assert scalar_eq(x, y)
    assert not scalar_eq(x, x + ctx.rat(1))


def test_exact_float_agree_numerically():
    ex = ScalarContext(5, depth=3)
    fl = ScalarContext(5, depth=3, backend="float")
    a = ex.root_of_unity(25, 7) * Fraction(3, 4) + ex.root_of_unity(4, 1)
    b = fl.root_of_unity(25, 7) * Fraction(3, 4) + fl.root_of_unity(4, 1)
    assert abs(a.as_complex() - b.as_complex()) < 1e-12
