"""The isotropic cone C in V1, its invariant measure, and the Q-action.

V1 coordinates are (e1, e1*, V2...).  Catalog points are chart points
x0 * (1, -q(v0), v0) carried together with an integral isometry frame G
(an Eichler transvection) with G e1 = primitive ray point and G e1* the
dual frame vector, so Radon slices reduce to the standard frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar
from .padic import vp
from .schwartz import SchwartzFunction, mat_identity, mat_mul
from .levelsets import delta
from .quadratic import QuadraticSpace


@dataclass(frozen=True)
class ConePoint:
    vec: tuple[Fraction, ...]
    frame: tuple[tuple[Fraction, ...], ...]   # G with G e1 = vec / scale
    scale: Fraction                            # vec = scale * (G e1)

    def ray_key(self):
        return self.frame

    def scaled(self, a) -> "ConePoint":
        a = Fraction(a)
        return ConePoint(tuple(a * x for x in self.vec), self.frame, self.scale * a)


def eichler_frame(sess, v0) -> tuple[tuple[Fraction, ...], ...]:
    """The isometry fixing e1* with e1 -> e1 + v0 - q(v0) e1*, as a matrix."""
    V1, V2 = sess.V1, sess.V2
    d = V1.dim
    v0 = tuple(Fraction(x) for x in v0)
    cols = []
    # column of e1
    cols.append((Fraction(1), -V2.q(v0)) + v0)
    # column of e1*
    cols.append((Fraction(0), Fraction(1)) + tuple(Fraction(0) for _ in v0))
    # columns of V2 basis vectors u: u - <u, v0> e1*
    bv0 = V2.gram_vec(v0)
    for j in range(V2.dim):
        col = [Fraction(0), -bv0[j]]
        col += [Fraction(1) if i == j else Fraction(0) for i in range(V2.dim)]
        cols.append(tuple(col))
    # transpose columns into a matrix acting on column vectors
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def chart_point(sess, y, v0) -> ConePoint:
    """The cone point alpha(y, y*v0) = y * (1, -q(v0), v0) with its frame.

    v0 must be integral: catalog rays have integral slope (generic points
    are reached as scalings and integral-isometry images of these), which
    keeps the Eichler frame compatible with the coset calculus.
    """
    y = Fraction(y)
    if y == 0:
        raise ZeroDivisionError("chart needs y != 0")
    v0 = tuple(Fraction(x) for x in v0)
    if any(vp(x, sess.p) < 0 for x in v0 if x != 0):
        raise ValueError("catalog rays need an integral slope v0")
    G = eichler_frame(sess, v0)
    vec = (y, -sess.V2.q(v0) * y) + tuple(y * x for x in v0)
    pt = ConePoint(vec, G, y)
    assert sess.V1.q(pt.vec) == 0
    return pt


def transform_point(sess, pt: ConePoint, a=1, h=None) -> ConePoint:
    """a * (h pt) with h an isometry matrix of V1 (column action)."""
    a = Fraction(a)
    if h is None:
        return pt.scaled(a)
    from .schwartz import mat_vec
    vec = tuple(a * x for x in mat_vec(h, list(pt.vec)))
    G = mat_mul(h, [list(r) for r in pt.frame])
    G = tuple(tuple(r) for r in G)
    return ConePoint(vec, G, pt.scale * a)


def point_with_frame(sess, vec) -> ConePoint:
    """A ConePoint for an arbitrary isotropic vector whose primitive
    representative has a unit coordinate in some hyperbolic pair (always
    true off the split class; split-only exceptions are not catalog points).
    """
    p = sess.p
    vec = tuple(Fraction(x) for x in vec)
    if sess.V1.q(vec) != 0 or all(x == 0 for x in vec):
        raise ValueError("not a point of C_0")
    vmin = min(vp(x, p) for x in vec if x != 0)
    x0 = Fraction(p) ** vmin
    prim = tuple(x / x0 for x in vec)
    d = sess.V1.dim
    pairs = [(b[1], b[2]) for b in sess.V1.blocks if b[0] == "hyp"]
    unit_pos = None
    for (i, j) in pairs:
        for pos in (i, j):
            if prim[pos] != 0 and vp(prim[pos], p) == 0:
                unit_pos = (i, j, pos)
                break
        if unit_pos:
            break
    if unit_pos is None:
        raise ValueError("no unit hyperbolic coordinate; ray not in catalog")
    i, j, pos = unit_pos
    # move the pair (i, j) to slots (0, 1) with the unit coordinate at 0
    src = (pos, j if pos == i else i)
    order = [src[0], src[1]] + [k for k in range(d) if k not in src]
    # Pi maps coordinate order[m] -> m; as a matrix acting on columns:
    Pi = [[Fraction(1) if order[m] == k else Fraction(0) for k in range(d)]
          for m in range(d)]
    from .schwartz import mat_vec, mat_inv
    u_vec = tuple(mat_vec(Pi, list(prim)))
    y = u_vec[0]
    v0 = tuple(u_vec[m] / y for m in range(2, d))
    E = eichler_frame(sess, v0)
    G = mat_mul(mat_inv(Pi), [list(r) for r in E])
    G = tuple(tuple(r) for r in G)
    pt = ConePoint(vec, G, x0 * y)
    # frame sanity: G e1 = vec / scale and G is an isometry
    col0 = tuple(G[m][0] for m in range(d))
    assert all(c * pt.scale == x for c, x in zip(col0, vec))
    return pt


def cone_catalog(sess, count=None, include_scaled=True) -> list[ConePoint]:
    """Standard catalog: hyperbolic-pair rays, generic isotropic points with
    unit coordinates, and p-scaled versions, covering both unit classes."""
    p = sess.p
    u0 = sess.chi.u0
    d2 = sess.V2.dim
    zero = tuple(Fraction(0) for _ in range(d2))

    def e(i, c=1):
        return tuple(Fraction(c) if j == i else Fraction(0) for j in range(d2))

    v0s = [zero, e(0), e(1), e(0, u0), e(d2 - 2),
           tuple(Fraction(1) for _ in range(d2)),
           tuple(Fraction([1, 1, 0, 1][j % 4]) for j in range(d2))]
    scales = [Fraction(1), Fraction(u0), Fraction(p), Fraction(1, p)] \
        if include_scaled else [Fraction(1)]
    pts = []
    seen = set()
    for y in scales:
        for v0 in v0s:
            pt = chart_point(sess, y, v0)
            if pt.vec not in seen:
                seen.add(pt.vec)
                pts.append(pt)
    if count is not None:
        pts = pts[:count]
    return pts


class ConeTestFunction:
    """An element of S_c(C_0) carried by an ambient Schwartz table on V1."""

    def __init__(self, sess, ambient: SchwartzFunction):
        if ambient.d != sess.V1.dim:
            raise ValueError("ambient dimension mismatch")
        r = ambient.ball_avoidance_radius()
        if r is None:
            raise ValueError("support touches 0: not an S_c(C_0) carrier")
        self.sess = sess
        self.ambient = ambient
        self.zero_gap = r

    def scale(self, s) -> "ConeTestFunction":
        return ConeTestFunction(self.sess, self.ambient.scale(s))

    def __add__(self, other):
        return ConeTestFunction(self.sess, self.ambient + other.ambient)

    def evaluate(self, pt) -> Scalar:
        vec = pt.vec if isinstance(pt, ConePoint) else tuple(pt)
        return self.ambient.evaluate(vec)


def cone_integral(sess, f: ConeTestFunction) -> Scalar:
    """I_C(f) = int_C f omega with omega = delta_{V1}(0)."""
    return delta(sess, sess.V1, 0, f.ambient).value


def q_action(sess, f: ConeTestFunction, a=1, h=None, n_vec=None) -> ConeTestFunction:
    """The Q-action: (a,h) f(w) = chi_K(a)|a|^{n-1} f(a w h);
    n f(w) = psi(-<n, w>) f(w) for n in N given as a vector of V1."""
    amb = f.ambient
    sess_n = sess.config.n
    if n_vec is not None:
        freq = sess.V1.gram_vec(n_vec)
        amb = amb.mul_psi_linear(tuple(-x for x in freq))
        return ConeTestFunction(sess, amb)
    a = Fraction(a)
    d = sess.V1.dim
    if h is not None and not sess.V1.is_isometry(h):
        raise ValueError("h is not an isometry of V1")
    A = [[Fraction(0)] * d for _ in range(d)]
    H = h if h is not None else mat_identity(d)
    for i in range(d):
        for j in range(d):
            A[i][j] = a * Fraction(H[i][j])
    pref = sess.ctx.rat(Fraction(sess.chi.sign(a)) *
                        Fraction(sess.p) ** (-vp(a, sess.p) * (sess_n - 1)))
    return ConeTestFunction(sess, amb.act_linear(A, prefactor=pref))


def mellin_p_chi(sess, f: ConeTestFunction, chi_label_or_none, s_exp: int,
                 pt: ConePoint) -> Scalar:
    """p_chi(f)(w) = int_{GL1} (a . f)(w) chi(a) d^x a, a finite shell sum.

    chi is the character data chi_aux(a)|a|^{s_exp}; the GL1-action weight
    chi_K(a)|a|^{n-1} is included.
    """
    from .padic import QuadraticCharacter
    ctx, p = sess.ctx, sess.p
    chi_aux = None if chi_label_or_none is None else \
        QuadraticCharacter(chi_label_or_none, p)
    n = sess.config.n
    total = ctx.zero()
    for (c_s, lam) in _ray_cosets(sess, f.ambient, pt.vec):
        val = f.ambient.evaluate(tuple(c_s * x for x in pt.vec))
        if val.is_zero():
            continue
        # int over the a-coset of chi_K(a) chi_aux(a) |a|^{n-1+s} d^x a
        sign = sess.chi.sign(c_s)
        if chi_aux is not None:
            sign *= chi_aux.sign(c_s)
        E = (n - 1) + s_exp
        va = vp(c_s, p)
        if lam - va < 1:
            raise ValueError("ray coset too coarse for character integration")
        wgt = Fraction(sign) * Fraction(p) ** (-va * E) * Fraction(p) ** (va - lam)
        total = total + val * wgt
    return total


def _ray_cosets(sess, ambient: SchwartzFunction, vec, extra_level=0):
    """Multiplicative cosets (c, lam) of s with s*vec meeting supp(ambient),
    refined so the ambient value is constant per coset."""
    p = sess.p
    out = {}
    for _, atom in ambient.atoms:
        c_s, lam = None, None
        ok = True
        # intersect the per-coordinate conditions s * vec_i in (a_i, K_i)
        for x, a_i, K_i in zip(vec, atom.center, atom.levels):
            if x == 0:
                if vp(a_i, p) < K_i:
                    ok = False
                    break
                continue
            ci, ki = a_i / x, K_i - vp(x, p)
            if c_s is None:
                c_s, lam = ci, ki
            else:
                from .padic import coset_intersect
                got = coset_intersect(p, c_s, lam, ci, ki)
                if got is None:
                    ok = False
                    break
                c_s, lam = got
        if not ok or c_s is None:
            continue
        # refine for modulation resolution along the ray
        if atom.mod is not None:
            depth = 0
            for m, x in zip(atom.mod, vec):
                if m and x:
                    depth = max(depth, -vp(m * x, p))
            lam = max(lam, depth)
        if vp(c_s, p) >= lam:
            # the coset contains 0; s = 0 is not in GL1, refine one level in
            # and keep the punctured shells handled by deeper cosets
            continue
        out.setdefault((c_s, lam + extra_level), None)
    # split coarser cosets so they are pairwise disjoint
    cosets = list(out)
    if not cosets:
        return []
    lam_max = max(l for _, l in cosets)
    final = {}
    for c, l in cosets:
        if l == lam_max:
            final[_canon(p, c, lam_max)] = (c, lam_max)
        else:
            step = Fraction(p) ** l
            for r in range(p ** (lam_max - l)):
                cc = c + r * step
                final[_canon(p, cc, lam_max)] = (cc, lam_max)
    return list(final.values())


def _canon(p, c, lam):
    """Canonical representative of the coset c + p^lam Z as a dict key."""
    c = Fraction(c)
    den = c.denominator
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    m = p ** (lam + e)
    if m <= 1:
        return (Fraction(0), lam)
    num = c.numerator * pow(den % m, -1, m)
    return (Fraction(num % m, p ** e), lam)


# ---------------------------------------------------------------------------
# germs


@dataclass
class GermData:
    const: Scalar
    homog_at_ref: Scalar       # h(w_ref) on the reference point
    ref: ConePoint
    valid_exponent: int

    def reconstruct(self, sess, j: int) -> Scalar:
        """Value at p^j * ref predicted by const + homogeneous law."""
        p, n = sess.p, sess.config.n
        sgn = sess.chi.sign(Fraction(p) ** j) if j else 1
        scale = Fraction(sgn) * Fraction(p) ** (j * (n - 2))
        return self.const + self.homog_at_ref * scale


class GermExtractionError(RuntimeError):
    pass


def germ_at_zero(sess, evaluate, ref: ConePoint, start_exponent: int = 1,
                 max_exponent: int = 12) -> GermData:
    """Solve value(p^j w) = c0 + chi_K(p^j) p^{j(n-2)} h(w) on two shells and
    certify on a third; evaluate is ConePoint -> Scalar."""
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    sgn = sess.chi.eps_p
    for J in range(start_exponent, max_exponent - 2):
        A = [evaluate(ref.scaled(Fraction(p) ** (J + i))) for i in range(3)]
        lamJ = Fraction(sgn ** (J % 2)) * Fraction(p) ** (J * (n - 2))
        lam1 = Fraction(sgn ** ((J + 1) % 2)) * Fraction(p) ** ((J + 1) * (n - 2))
        lam2 = Fraction(sgn ** ((J + 2) % 2)) * Fraction(p) ** ((J + 2) * (n - 2))
        # solve A0 = c + lamJ h, A1 = c + lam1 h
        h = (A[0] - A[1]) / (lamJ - lam1)
        c0 = A[0] - h * lamJ
        if ctx.eq(A[2], c0 + h * lam2):
            # h at the reference shell point itself: h(p^J w) rescaled back
            return GermData(c0, h, ref, J)
    raise GermExtractionError("no germ of shape const + chi|.|^{2-n} found")
