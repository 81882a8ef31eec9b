"""Arithmetic in F = Q_p and exact one-dimensional character integrals.

Field elements are exact rationals (any element the engine ever builds is
one); valuation and unit-residue accessors give the (v, unit mod p^k) view.
The integration engine evaluates integrals of psi(A t + B/t) over cosets by
recursive Taylor splitting with Gauss-integral leaves, all in the exact
cyclotomic backend.  Everything downstream (level sets, Radon, Phi) reduces
to these primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Scalar, ScalarContext, DepthExceeded

VINF = 10 ** 9  # valuation of zero


class NonIntegrable(ValueError):
    """A shell sum whose homogeneous tail diverges."""


class PrecisionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# valuations and residues


def vp_int(n: int, p: int) -> int:
    if n == 0:
        return VINF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        return VINF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    """x / p^{v(x)}, a unit; x must be nonzero."""
    x = Fraction(x)
    v = vp(x, p)
    return x / Fraction(p) ** v


def unit_residue(x, p: int, k: int) -> int:
    """The unit part of x mod p^k (x nonzero, k >= 1)."""
    u = unit_part(x, p)
    m = p ** k
    return (u.numerator % m) * pow(u.denominator % m, -1, m) % m


def legendre(n: int, p: int) -> int:
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


def least_nonsquare_unit(p: int) -> int:
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise AssertionError("p odd prime has a nonsquare unit")


def psi_eval(ctx: ScalarContext, x) -> Scalar:
    """The conductor-zero additive character: trivial on Z_p."""
    x = Fraction(x)
    v = vp(x, ctx.p)
    if v >= 0:
        return ctx.one()
    e = -v
    u = unit_part(x, ctx.p)
    m = ctx.p ** e
    r = (u.numerator % m) * pow(u.denominator % m, -1, m) % m
    return ctx.psi_frac(r, e)


# ---------------------------------------------------------------------------
# quadratic characters via the tame Hilbert symbol (p odd)


DISC_LABELS = ("split", "unram", "ram-p", "ram-up")


class QuadraticCharacter:
    """chi_kappa(x) = (x, kappa)_p for kappa in {1, u, p, up}."""

    def __init__(self, label: str, p: int):
        if label not in DISC_LABELS:
            raise ValueError(f"disc label must be one of {DISC_LABELS}")
        self.label = label
        self.p = p
        u0 = least_nonsquare_unit(p)
        self.u0 = u0
        lm1 = legendre(-1, p)
        if label == "split":
            self.kappa = Fraction(1)
            self.eps_p, self.ram = 1, False
        elif label == "unram":
            self.kappa = Fraction(u0)
            self.eps_p, self.ram = -1, False
        elif label == "ram-p":
            self.kappa = Fraction(p)
            self.eps_p, self.ram = lm1, True
        else:
            self.kappa = Fraction(u0 * p)
            self.eps_p, self.ram = -lm1, True

    def sign(self, x) -> int:
        """chi(x) in {+1,-1}; x must be nonzero."""
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("quadratic character of 0")
        s = self.eps_p ** (vp(x, self.p) % 2)
        if self.ram:
            s *= legendre(unit_residue(x, self.p, 1), self.p)
        return s

    def eval(self, ctx: ScalarContext, x) -> Scalar:
        return ctx.rat(self.sign(x))

    def is_trivial(self) -> bool:
        return self.label == "split"

    def mul_data(self, other: "QuadraticCharacter | None") -> tuple[int, bool]:
        """(eps_p, ram) of the product character."""
        if other is None:
            return self.eps_p, self.ram
        return self.eps_p * other.eps_p, self.ram ^ other.ram

    def __repr__(self):
        return f"chi[{self.label}]"


def hilbert_symbol(a, b, p: int) -> int:
    """Tame formula for (a,b)_p, p odd."""
    a, b = Fraction(a), Fraction(b)
    al, be = vp(a, p), vp(b, p)
    ua, ub = unit_residue(a, p, 1), unit_residue(b, p, 1)
    s = legendre(-1, p) ** ((al * be) % 2)
    s *= legendre(ua, p) ** (be % 2)
    s *= legendre(ub, p) ** (al % 2)
    return s


# ---------------------------------------------------------------------------
# Gauss integrals


def gauss_leg_sum(ctx: ScalarContext) -> Scalar:
    """tau = sum_{r mod p} zeta_p^{r^2}, computed literally once."""
    key = getattr(ctx, "_gauss_leg", None)
    if key is None:
        p = ctx.p
        total = ctx.zero()
        for r in range(p):
            total = total + ctx.psi_frac(r * r, 1)
        ctx._gauss_leg = key = total
    return key


def sqrt_p_scalar(ctx: ScalarContext) -> Scalar:
    """The positive real sqrt(p) inside Q(zeta_{4p})."""
    tau = gauss_leg_sum(ctx)
    if ctx.p % 4 == 1:
        return tau                      # tau = sqrt(p)
    return tau * ctx.root_of_unity(4, 3)   # tau = i sqrt(p)


def iq_ball(ctx: ScalarContext, a: Fraction) -> Scalar:
    """int_{Z_p} psi(a z^2) dz for v(a) = -e < 0."""
    p = ctx.p
    e = -vp(a, p)
    assert e >= 1
    if e % 2 == 0:
        return ctx.rat(Fraction(1, p ** (e // 2)))
    lg = legendre(unit_residue(a, p, 1), p)
    return gauss_leg_sum(ctx) * Fraction(lg, p ** ((e + 1) // 2))


def i_quad(ctx: ScalarContext, a: Fraction, b: Fraction) -> Scalar:
    """int_{Z_p} psi(a z^2 + b z) dz, exact, p odd."""
    p = ctx.p
    va = vp(a, p)
    if va >= 0:
        return ctx.one() if vp(b, p) >= 0 else ctx.zero()
    if vp(b, p) < va:
        return ctx.zero()
    # complete the square; the shift b/(2a) lies in Z_p
    return psi_eval(ctx, -b * b / (4 * a)) * iq_ball(ctx, a)


def psi_quad_coset_integral(ctx, beta, m, c, k) -> Scalar:
    """int_{c + p^k Z} psi(beta x^2 + m x) dx."""
    p = Fraction(ctx.p)
    scale = p ** (-k)
    pref = psi_eval(ctx, beta * c * c + m * c)
    return pref * i_quad(ctx, beta * p ** (2 * k), (2 * beta * c + m) * p ** k) * scale


def psi_linear_coset_integral(ctx, theta, c, k) -> Scalar:
    """int_{c + p^k Z} psi(theta x) dx."""
    if vp(theta, ctx.p) + k < 0:
        return ctx.zero()
    return psi_eval(ctx, Fraction(theta) * c) * (Fraction(ctx.p) ** (-k))


def coset_intersect(p, c1, k1, c2, k2):
    """Intersection of c1+p^{k1}Z and c2+p^{k2}Z: (c, k) or None."""
    if k1 > k2:
        c1, k1, c2, k2 = c2, k2, c1, k1
    return (c2, k2) if vp(Fraction(c1) - Fraction(c2), p) >= k1 else None


# ---------------------------------------------------------------------------
# the oscillatory engine: integrals of psi(A t + B / t)


def osc_coset_integral(ctx: ScalarContext, A, B, c, k) -> Scalar:
    """int_{c + p^k Z} psi(A t + B/t) dt, exact.

    If B != 0 the coset must avoid 0 (v(c) < k): true at all call sites,
    which decompose shells into unit-class cosets first.
    """
    p = ctx.p
    A, B = Fraction(A), Fraction(B)
    if B == 0:
        return psi_linear_coset_integral(ctx, A, c, k)
    vc = vp(c, p)
    if vc >= k:
        raise ValueError("coset meets 0 with B != 0")
    vB = vp(B, p)
    lin = A - B / (c * c)
    scale = Fraction(1, p ** k) if k >= 0 else Fraction(p ** (-k))
    if vB - 3 * vc + 2 * k >= 0:
        # quadratic and higher Taylor terms of B/t are psi-trivial
        if vp(lin, p) + k < 0:
            return ctx.zero()
        return psi_eval(ctx, A * c + B / c) * scale
    if vB - 4 * vc + 3 * k >= 0:
        # cubic and higher trivial: one Gauss integral
        a2 = (B / c ** 3) * Fraction(p) ** (2 * k)
        b1 = lin * Fraction(p) ** k
        return psi_eval(ctx, A * c + B / c) * i_quad(ctx, a2, b1) * scale
    total = ctx.zero()
    step = Fraction(p) ** k
    for r in range(p):
        total = total + osc_coset_integral(ctx, A, B, c + r * step, k + 1)
    return total


def shell_char_integral(ctx: ScalarContext, w: int, theta, leg_exp: int) -> Scalar:
    """int_{v(t)=w} Leg(unit t)^leg_exp psi(theta t) dt."""
    p = ctx.p
    vt = vp(theta, p)
    if leg_exp % 2 == 0:
        if vt + w >= 0:
            return ctx.rat(Fraction(p - 1, p) * Fraction(p) ** (-w))
        if vt + w == -1:
            return ctx.rat(-Fraction(p) ** (-w) / p)
        return ctx.zero()
    if vt + w == -1:
        lg = legendre(unit_residue(theta, p, 1), p)
        return gauss_leg_sum(ctx) * (Fraction(p) ** (-w - 1) * lg)
    return ctx.zero()


def shell_osc_integral(ctx: ScalarContext, w: int, A, B, leg_exp: int) -> Scalar:
    """int_{v(t)=w} Leg(unit t)^leg_exp psi(A t + B/t) dt."""
    p = ctx.p
    A, B = Fraction(A), Fraction(B)
    if B == 0 or vp(B, p) - w >= 0:
        # B/t trivial on the shell; fold the eventually-trivial part away
        return shell_char_integral(ctx, w, A, leg_exp)
    if A == 0 or vp(A, p) + w >= 0:
        # substitute t -> 1/t (preserves unit Legendre class)
        return Fraction(1, p ** (2 * w)) * shell_char_integral(ctx, -w, B, leg_exp) \
            if w >= 0 else \
            Fraction(p ** (-2 * w)) * shell_char_integral(ctx, -w, B, leg_exp)
    total = ctx.zero()
    pw = Fraction(p) ** w
    for cu in range(1, p):
        part = osc_coset_integral(ctx, A, B, cu * pw, w + 1)
        if leg_exp % 2 and legendre(cu, p) == -1:
            part = -part
        total = total + part
    return total


# ---------------------------------------------------------------------------
# ScalarProfile: finite shell table + homogeneous asymptotic monomials


@dataclass
class Monomial:
    """c * chi(x) |x|^s (chi None = trivial character)."""
    coef: Scalar
    chi: QuadraticCharacter | None
    s: int

    def chi_data(self) -> tuple[int, bool]:
        if self.chi is None:
            return 1, False
        return self.chi.eps_p, self.chi.ram


@dataclass
class ScalarProfile:
    """A function on F: exact table on a shell window, homogeneous beyond.

    table[w] = (L, {u: value}) meaning profile(x) = value whenever v(x) = w
    and unit(x) = u mod p^L (L = 0: one entry keyed 1 covering the shell).
    inner: monomial sum valid for v(x) >= k_in; outer: for v(x) <= k_out.
    """
    ctx: ScalarContext
    table: dict[int, tuple[int, dict[int, Scalar]]] = field(default_factory=dict)
    k_in: int = 0
    inner: list[Monomial] = field(default_factory=list)
    k_out: int = -1
    outer: list[Monomial] = field(default_factory=list)

    def check_window(self):
        for w in range(self.k_out + 1, self.k_in):
            if w not in self.table:
                raise ValueError(f"profile table missing shell {w}")

    def value_at(self, x) -> Scalar:
        """Pointwise evaluation (tests and diagnostics)."""
        ctx, p = self.ctx, self.ctx.p
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("profiles live on F^x")
        w = vp(x, p)
        if w in self.table:
            L, vals = self.table[w]
            u = unit_residue(x, p, L) if L > 0 else 1
            return vals.get(u, ctx.zero())
        mons = self.inner if w >= self.k_in else (self.outer if w <= self.k_out else None)
        if mons is None:
            raise ValueError(f"shell {w} not covered")
        total = ctx.zero()
        for m in mons:
            c = m.coef * Fraction(1, p ** (w * m.s)) if w * m.s >= 0 \
                else m.coef * Fraction(p ** (-w * m.s))
            if m.chi is not None:
                c = c * m.chi.sign(x)
            total = total + c
        return total

    # -- shell entries as additive cosets -------------------------------

    def _entries(self):
        """Yield (w, L, u, value, additive center, additive level)."""
        p = self.ctx.p
        for w in sorted(self.table):
            L, vals = self.table[w]
            if L == 0:
                # full shell: split into the p-1 unit classes
                for u0 in range(1, p):
                    for u, val in vals.items():
                        yield (w, 1, u0, val, Fraction(u0 * p ** w) if w >= 0
                               else Fraction(u0, p ** (-w)), w + 1)
                continue
            pw = Fraction(p) ** w
            for u, val in vals.items():
                yield (w, L, u, val, u * pw, w + L)


def _ram_needs_split(chi_eps_ram, L):
    eps, ram = chi_eps_ram
    return ram and L < 1


def mellin_shell_sum(profile: ScalarProfile, chi: QuadraticCharacter | None,
                     s: int, twist_psi_inverse: bool = False) -> Scalar:
    """int_{F^x} profile(x) chi(x) |x|^s [psi(x^{-1})] d^x x, exact.

    Table shells are finite sums; asymptotic monomials get closed-form
    geometric/Gauss tails.  Raises NonIntegrable when a tail diverges.
    """
    ctx = profile.ctx
    p = ctx.p
    total = ctx.zero()
    # finite table part
    for (w, L, u, val, cen, lev) in profile._entries():
        x_rep = cen
        cf = val
        if chi is not None:
            cf = cf * chi.sign(x_rep)
        cf = cf * _pfrac(p, -w * s)
        if twist_psi_inverse and w >= 1:
            # int over the additive coset of psi(1/x) dx, then d^x = dx/|x|
            wgt = osc_coset_integral(ctx, 0, 1, cen, lev) * _pfrac(p, w)
        else:
            wgt = ctx.rat(_pfrac(p, -L) * Fraction(p - 1, p) if L == 0
                          else _pfrac(p, -L))
        total = total + cf * wgt
    # asymptotic tails
    for mon in profile.inner:
        total = total + _mellin_tail(ctx, mon, chi, s, profile.k_in,
                                     inner=True, twist=twist_psi_inverse)
    for mon in profile.outer:
        total = total + _mellin_tail(ctx, mon, chi, s, profile.k_out,
                                     inner=False, twist=twist_psi_inverse)
    return total


def _pfrac(p: int, e: int) -> Fraction:
    return Fraction(p) ** e


def _mellin_tail(ctx, mon: Monomial, chi, s, k_edge, inner: bool, twist: bool) -> Scalar:
    """Closed form for one homogeneous monomial over a half line of shells."""
    p = ctx.p
    eps_m, ram_m = mon.chi_data()
    eps_c, ram_c = (1, False) if chi is None else (chi.eps_p, chi.ram)
    eps = eps_m * eps_c
    ram = ram_m ^ ram_c
    S = s + mon.s
    if inner:
        # shells w >= k_edge; psi(x^{-1}) nontrivial only on w >= 1
        if twist:
            head = ctx.zero()
            # untwisted head on w in [k_edge, 0], where psi(1/x) = 1
            if k_edge <= 0:
                head = head + _geo_sum(ctx, eps, ram, S, k_edge, 0, p)
            # twisted shells w >= 1: only w = 1 survives (character-sum
            # vanishing beyond the conductor shell)
            if max(k_edge, 1) == 1:
                w = 1
                dx = Fraction(1, p ** (2 * w)) * shell_char_integral(
                    ctx, -w, Fraction(1), 1 if ram else 0)
                head = head + dx * (_pfrac(p, w) * _pfrac(p, -w * S) * eps)
            return mon.coef * head
        if ram:
            return ctx.zero()
        if S <= 0:
            raise NonIntegrable(f"inner tail exponent {S} <= 0")
        return mon.coef * _geo_sum_inf(ctx, eps, S, k_edge, p)
    # outer: shells w <= k_edge
    if S >= 0:
        raise NonIntegrable(f"outer tail exponent {S} >= 0 diverges")
    head = ctx.zero()
    k_untw = min(k_edge, 0)   # psi(1/x) = 1 only on w <= 0
    if not ram:
        # sum_{w <= k_untw} eps^w p^{-wS} (1-1/p); ratio eps p^{S}, |.| < 1
        r = Fraction(eps) * _pfrac(p, S)
        lead = Fraction(eps ** (k_untw % 2)) * _pfrac(p, -k_untw * S)
        head = head + ctx.rat(Fraction(p - 1, p) * lead / (1 - r))
    if k_edge >= 1:
        if twist:
            # only the conductor shell w = 1 survives the psi(1/x) twist
            dx = Fraction(1, p * p) * shell_char_integral(
                ctx, -1, Fraction(1), 1 if ram else 0)
            head = head + dx * (_pfrac(p, 1) * _pfrac(p, -S) * eps)
        elif not ram:
            head = head + _geo_sum(ctx, eps, ram, S, 1, k_edge, p)
    return mon.coef * head


def _geo_sum(ctx, eps, ram, S, w_lo, w_hi, p) -> Scalar:
    """sum_{w=w_lo}^{w_hi} (shell d^x-integral of chi |x|^S), finite range."""
    if ram:
        return ctx.zero()
    acc = Fraction(0)
    for w in range(w_lo, w_hi + 1):
        acc += Fraction(eps ** (w % 2)) * _pfrac(p, -w * S)
    return ctx.rat(acc * Fraction(p - 1, p))


def _geo_sum_inf(ctx, eps, S, w_lo, p) -> Scalar:
    r = Fraction(eps) * _pfrac(p, -S)
    lead = Fraction(eps ** (w_lo % 2)) * _pfrac(p, -w_lo * S)
    return ctx.rat(Fraction(p - 1, p) * lead / (1 - r))


def homog_ball_fourier(ctx: ScalarContext, mon: Monomial, k_in: int, x) -> Scalar:
    """int_{v(t) >= k_in} chi(t)|t|^s psi(x t) dt, exact closed form."""
    p = ctx.p
    eps, ram = mon.chi_data()
    if mon.s < 0:
        raise NonIntegrable(f"ball Fourier of |t|^{mon.s} with s < 0")
    vx = vp(x, p)
    if ram:
        wb = -vx - 1
        if vx == VINF or wb < k_in:
            return ctx.zero()
        lg = legendre(unit_residue(x, p, 1), p)
        coef = _pfrac(p, -wb * mon.s) * Fraction(eps ** (wb % 2)) * \
            _pfrac(p, -wb - 1) * lg
        return mon.coef * gauss_leg_sum(ctx) * coef
    # trivial unit character
    total = Fraction(0)
    w0 = k_in if vx == VINF else max(k_in, -vx)
    # geometric head: shells w >= w0 contribute (1-1/p) p^{-w(s+1)} eps^w
    r = Fraction(eps) * _pfrac(p, -(mon.s + 1))
    lead = Fraction(eps ** (w0 % 2)) * _pfrac(p, -w0 * (mon.s + 1))
    total += Fraction(p - 1, p) * lead / (1 - r)
    wb = -vx - 1 if vx != VINF else None
    if wb is not None and wb >= k_in:
        total += Fraction(eps ** (wb % 2)) * _pfrac(p, -wb * mon.s) * (-_pfrac(p, -wb - 1))
    return mon.coef * ctx.rat(total)


def profile_fourier_dt(profile: ScalarProfile, x) -> Scalar:
    """int_F profile(t) psi(x t) dt for a compactly supported profile."""
    if profile.outer:
        raise ValueError("profile_fourier_dt needs outer-vanishing profiles")
    ctx = profile.ctx
    p = ctx.p
    total = ctx.zero()
    for (w, L, u, val, cen, lev) in profile._entries():
        if vp(x, p) + lev >= 0:
            total = total + val * psi_eval(ctx, Fraction(x) * cen) * _pfrac(p, -lev)
    for mon in profile.inner:
        total = total + homog_ball_fourier(ctx, mon, profile.k_in, x)
    return total


def profile_integral_dt(profile: ScalarProfile) -> Scalar:
    """int_F profile(t) dt (additive measure), compact support + inner tail."""
    return profile_fourier_dt(profile, Fraction(0))
