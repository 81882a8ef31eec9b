"""The mixed model on F^x x V2: Weil action, Pi(r1), Pi(r2), and the closed
formula for Pi(r), whose agreement with Phi is the main verification target.

Tensor functions f' (x) f'' are kept as lists of pairs; f' support excludes
0, so every s-integral in the Pi(r) formula is a finite sum of coset terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar
from .padic import psi_eval, vp, VINF
from .schwartz import SchwartzFunction, mat_identity
from .quadratic import fourier, mul_psi_q
from .levelsets import delta, psi_q_transform
from .cone import ConePoint, ConeTestFunction, chart_point, _canon
from .radon import radon_hat


@dataclass
class MixedFunction:
    """Finite sum of tensors f' (x) f'' on F^x x V2."""
    terms: list[tuple[SchwartzFunction, SchwartzFunction]]

    def check(self, sess):
        for fp, fpp in self.terms:
            if fp.d != 1 or fpp.d != sess.V2.dim:
                raise ValueError("tensor term dimensions")
            if fp.ball_avoidance_radius() is None:
                raise ValueError("f' support must exclude 0")
        return self

    def evaluate(self, y, v) -> Scalar:
        sess_zero = None
        total = None
        for fp, fpp in self.terms:
            val = fp.evaluate((Fraction(y),)) * fpp.evaluate(v)
            total = val if total is None else total + val
        return total


def alpha_map(sess, y, v) -> ConePoint:
    """alpha(y, v) = (y, v, -q(v)/y) as a cone point with frame."""
    y = Fraction(y)
    if y == 0:
        raise ZeroDivisionError("alpha needs y != 0")
    v = tuple(Fraction(x) for x in v)
    return chart_point(sess, y, tuple(x / y for x in v))


def alpha_pullback(sess, f: ConeTestFunction):
    """The chart pullback: (y, v) -> f(alpha(y, v))."""
    def ev(y, v):
        return f.evaluate(alpha_map(sess, y, v))
    return ev


def mixed_to_cone(sess, f: MixedFunction) -> ConeTestFunction:
    """An ambient S_c(C_0) carrier restricting to f on the chart."""
    p = sess.p
    amb = None
    for fp, fpp in f.terms:
        y_hi = max(vp(a.center[0], p) for _, a in fp.atoms)
        qmin = VINF
        for _, a in fpp.atoms:
            qm = 0
            for b in sess.V2.blocks:
                if b[0] == "hyp":
                    qm = min(qm, min(vp(a.center[b[1]], p), a.levels[b[1]]) +
                             min(vp(a.center[b[2]], p), a.levels[b[2]]))
                else:
                    qm = min(qm, vp(b[1], p) +
                             2 * min(vp(a.center[b[2]], p), a.levels[b[2]]))
            qmin = min(qmin, qm)
        z_lev = 0 if qmin >= VINF else min(qmin - y_hi, 0)
        # ambient(y, z, v) = f'(y) 1_{p^{z_lev} Z}(z) f''(v)
        for cp, ap in fp.atoms:
            for cpp, app in fpp.atoms:
                center = (ap.center[0], Fraction(0)) + app.center
                levels = (ap.levels[0], z_lev) + app.levels
                mod = None
                if ap.mod is not None or app.mod is not None:
                    m1 = ap.mod if ap.mod is not None else (Fraction(0),)
                    m2 = app.mod if app.mod is not None else \
                        tuple(Fraction(0) for _ in range(fpp.d))
                    mod = (m1[0], Fraction(0)) + m2
                from .schwartz import Atom
                piece = SchwartzFunction(sess.ctx, sess.V1.dim,
                                         [(cp * cpp, Atom(center, levels, mod))])
                amb = piece if amb is None else amb + piece
    if amb is None:
        raise ValueError("empty mixed function")
    return ConeTestFunction(sess, amb)


# ---------------------------------------------------------------------------
# Weil representation action on S_c(V2)


def weil_action(sess, element, f: SchwartzFunction) -> SchwartzFunction:
    """omega_{psi,q}(element) f for the generator tags of the parabolic."""
    ctx = sess.ctx
    V2 = sess.V2
    n = sess.config.n
    kind = element[0]
    if kind == "n":       # n(b): psi(b q(v)) f(v)
        return mul_psi_q(f, element[1], V2)
    if kind == "t":       # t(y): chi_K(y)|y|^{n-1} f(y v)
        y = Fraction(element[1])
        A = [[y if i == j else Fraction(0) for j in range(V2.dim)]
             for i in range(V2.dim)]
        pref = ctx.rat(Fraction(sess.chi.sign(y)) *
                       Fraction(sess.p) ** (-vp(y, sess.p) * (n - 1)))
        return f.act_linear(A, prefactor=pref)
    if kind == "w0":      # gamma * Fourier against the V2 pairing
        return fourier(f, V2).scale(sess.gamma)
    if kind == "h":       # h in O(V2): f(v h)
        H = element[1]
        if not V2.is_isometry(H):
            raise ValueError("h is not an isometry of V2")
        return f.act_linear(H)
    if kind == "l_e":     # l(e (x) u): psi(-<u, v>) f(v)
        freq = V2.gram_vec(element[1])
        return f.mul_psi_linear(tuple(-x for x in freq))
    if kind == "l_e1":    # l(e1 (x) u): f(v + u)
        return f.translate(element[1])
    if kind == "z":       # center: psi(z) f
        return f.scale(psi_eval(ctx, element[1]))
    raise ValueError(f"unknown generator {kind!r}")


# ---------------------------------------------------------------------------
# Pi(r1), Pi(r2)


def _y_cosets(sess, fp: SchwartzFunction, extra_level=0):
    """Multiplicative cosets of the F^x support of a 1-dim table."""
    p = sess.p
    raw = []
    lam_max = 1
    for _, a in fp.atoms:
        c, K = a.center[0], a.levels[0]
        lam = K
        if a.mod is not None and a.mod[0]:
            lam = max(lam, -vp(a.mod[0], p))
        if vp(c, p) >= lam:
            raise ValueError("f' support touches 0")
        lam += extra_level
        raw.append((c, lam))
        lam_max = max(lam_max, lam)
    out = {}
    for c, lam in raw:
        step = Fraction(p) ** lam
        for r in range(p ** (lam_max - lam)):
            cc = c + r * step
            out[_canon(p, cc, lam_max)] = (cc, lam_max)
    return list(out.values())


def pi_r1(sess, f: MixedFunction) -> MixedFunction:
    """Pi(r1) f (y, v) = gamma chi_K(-y)|y|^{n-1} int f(-y, -y u) psi(<u,v>) du."""
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    out = []
    for fp, fpp in f.terms:
        vmax = max(0, max(vp(a.center[0], p) for _, a in fp.atoms))
        extra = fpp.level_exponent() + fpp.support_exponent() + vmax + 1
        for (c, lam) in _y_cosets(sess, fp, extra_level=extra):
            # output supported on y in (-c, lam), where -y lies in (c, lam)
            val = fp.evaluate((c,))
            if val.is_zero():
                continue
            pref = Fraction(sess.chi.sign(c)) * \
                Fraction(p) ** (-vp(c, p) * (n - 1))
            from .schwartz import Atom
            ind = SchwartzFunction(ctx, 1, [(ctx.one(),
                                             Atom((-c,), (lam,), None))])
            A = [[c if i == j else Fraction(0) for j in range(fpp.d)]
                 for i in range(fpp.d)]
            dil = fpp.act_linear(A)          # u -> f''(c u) = f''(-y u)
            gg = fourier(dil, sess.V2).scale(sess.gamma * val * pref)
            out.append((ind, gg))
    return MixedFunction(out)


def pi_r2(sess, f: ConeTestFunction) -> ConeTestFunction:
    """r2 swaps e1 and e1*: coordinate swap on the ambient carrier."""
    d = sess.V1.dim
    P = mat_identity(d)
    P[0][0] = P[1][1] = Fraction(0)
    P[0][1] = P[1][0] = Fraction(1)
    return ConeTestFunction(sess, f.ambient.act_linear(P))


# ---------------------------------------------------------------------------
# Pi(r) closed formula


def pi_r(sess, f: MixedFunction, pt: ConePoint) -> Scalar:
    """Pi(r)(f)(w~) for w~ = (y, w, -q(w)/y) on the chart; zero otherwise.

    The s-integral collapses per coset: int_{s in C} delta(-1/s)(g) d^x s
    equals p^{-v(c)} times the pushforward integral of g over the image
    coset of q, by the Gelfand-Leray Fubini identity.
    """
    from .levelsets import ball_pushforward_integral
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    vec = pt.vec
    y = vec[0]
    if y == 0:
        return ctx.zero()
    w = vec[2:]
    assert vec[1] == -sess.V2.q(w) / y
    chi = sess.chi
    total = ctx.zero()
    for fp, fpp in f.terms:
        m_w = max((-vp(x, p) for x in w if x != 0), default=0)
        kpp = fpp.level_exponent()
        for (c0, lam0) in _y_cosets(sess, fp):
            # rescale the f'(s y)-support cosets to s; refine only for the
            # translate stability (the s-integral itself is exact per coset)
            c = c0 / y
            lam = lam0 - vp(y, p)
            vs = vp(c, p)
            need = max(lam, kpp + m_w, vs + 1)
            step = Fraction(p) ** lam
            reps = [c + r * step for r in range(p ** (need - lam))] \
                if need > lam else [c]
            for cs in reps:
                val = fp.evaluate((cs * y,))
                if val.is_zero():
                    continue
                g = fourier(fpp.translate(tuple(cs * x for x in w)), sess.V2)
                vsc = vp(cs, p)
                push = ball_pushforward_integral(
                    sess, sess.V2, g, -1 / cs, need - 2 * vsc)
                wgt = Fraction(chi.sign(-cs)) * \
                    Fraction(p) ** (-vsc * (n - 2)) * Fraction(p) ** (-vsc)
                total = total + val * push * wgt
    return total


# ---------------------------------------------------------------------------
# the T2 identity (Lemma route to Phi2)


def t2_identity_check(sess, f: MixedFunction, x, pt: ConePoint):
    """lhs = double integral of f against psi(-q(v)x/t); rhs = R-hat(f)(x w~).

    Returns (lhs, rhs); the containing suite asserts equality.
    """
    ctx, p = sess.ctx, sess.p
    vec = pt.vec
    y = vec[0]
    w = vec[2:]
    x = Fraction(x)
    total = ctx.zero()
    for fp, fpp in f.terms:
        m_w = max((-vp(xx, p) for xx in w if xx != 0), default=0)
        kpp = fpp.level_exponent()
        for (c0, lam0) in _y_cosets(sess, fp):
            c = c0 / y
            lam = lam0 - vp(y, p)
            vt = vp(c, p)
            T0 = _t2_q_threshold(sess, fpp, m_w)
            need = max(lam, kpp + m_w, T0 - vp(x, p) + 2 * vt + 1, vt + 1)
            step = Fraction(p) ** lam
            reps = [c + r * step for r in range(p ** (need - lam))] \
                if need > lam else [c]
            for cs in reps:
                val = fp.evaluate((cs * y,))
                if val.is_zero():
                    continue
                g = fpp.translate(tuple(cs * xx for xx in w))
                inner = psi_q_transform(sess, sess.V2, g, -x / cs)
                wgt = Fraction(p) ** (vp(cs, p) - need)
                total = total + val * inner * wgt
    carrier = mixed_to_cone(sess, f)
    rhs = radon_hat(sess, carrier, x, pt)
    return total, rhs


def _t2_q_threshold(sess, fpp, m_w) -> int:
    from .levelsets import _q_triviality_threshold
    return _q_triviality_threshold(sess.V2, fpp) + 2 * m_w + 2
