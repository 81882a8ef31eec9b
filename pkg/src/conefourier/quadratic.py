"""Quadratic spaces V = H^a + K in Witt coordinates.

Blocks are hyperbolic pairs ('hyp', i, j) with q = x_i x_j, or diagonal
coordinates ('diag', d, i) with q = d x_i^2; the rank-2 norm block of K is
diag(1) + diag(-kappa).  The self-dual measure is |det Gram|^{1/2} times
the standard product measure, exact in the scalar field (sqrt p lives in
Q(zeta_{4p})).  The Fourier transform of an atom table is computed in
closed form against the Gram pairing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar, ScalarContext
from .padic import (
    QuadraticCharacter, psi_eval, sqrt_p_scalar, vp,
)
from .schwartz import Atom, SchwartzFunction


@dataclass(frozen=True)
class QuadraticSpace:
    dim: int
    blocks: tuple  # of ('hyp', i, j) and ('diag', Fraction, i)
    disc: str | None = None   # label when the space is H^a + K

    def q(self, v) -> Fraction:
        v = [Fraction(x) for x in v]
        total = Fraction(0)
        for b in self.blocks:
            if b[0] == "hyp":
                total += v[b[1]] * v[b[2]]
            else:
                total += b[1] * v[b[2]] * v[b[2]]
        return total

    def gram_vec(self, v) -> list[Fraction]:
        """B v where B is the Gram of the bilinear form <.,.> = 2q-polarized."""
        v = [Fraction(x) for x in v]
        out = [Fraction(0)] * self.dim
        for b in self.blocks:
            if b[0] == "hyp":
                out[b[1]] = v[b[2]]
                out[b[2]] = v[b[1]]
            else:
                out[b[2]] = 2 * b[1] * v[b[2]]
        return out

    def pairing(self, u, v) -> Fraction:
        bv = self.gram_vec(v)
        return sum((Fraction(x) * y for x, y in zip(u, bv)), Fraction(0))

    def det_valuation(self, p: int) -> int:
        val = 0
        for b in self.blocks:
            if b[0] == "diag":
                val += vp(2 * b[1], p)
        return val

    def measure(self, ctx: ScalarContext) -> Scalar:
        """Self-dual measure constant: |det B|^{1/2} (times faults if any)."""
        e = self.det_valuation(ctx.p)
        if e % 2 == 0:
            base = ctx.rat(Fraction(1, ctx.p ** (e // 2)))
        else:
            base = sqrt_p_scalar(ctx) * Fraction(1, ctx.p ** ((e + 1) // 2))
        fault = getattr(ctx, "fault_measure", None)
        if fault is not None:
            base = base * fault
        return base

    def is_isometry(self, G) -> bool:
        from .schwartz import mat_mul
        n = self.dim
        B = [[Fraction(0)] * n for _ in range(n)]
        for j in range(n):
            col = [Fraction(1 if i == j else 0) for i in range(n)]
            bv = self.gram_vec(col)
            for i in range(n):
                B[i][j] = bv[i]
        Gt = [[Fraction(G[j][i]) for j in range(n)] for i in range(n)]
        return mat_mul(Gt, mat_mul(B, G)) == B


def space_K(kappa: Fraction) -> QuadraticSpace:
    """The rank-2 norm block: q(x, y) = x^2 - kappa y^2."""
    return QuadraticSpace(2, (("diag", Fraction(1), 0), ("diag", -Fraction(kappa), 1)))


def space_V2(n: int, kappa: Fraction, disc: str | None = None) -> QuadraticSpace:
    """V2 = H^{n-2} + K, dim 2n-2."""
    d = 2 * n - 2
    blocks = [("hyp", 2 * i, 2 * i + 1) for i in range(n - 2)]
    blocks += [("diag", Fraction(1), d - 2), ("diag", -Fraction(kappa), d - 1)]
    return QuadraticSpace(d, tuple(blocks), disc)


def space_V1(n: int, kappa: Fraction, disc: str | None = None) -> QuadraticSpace:
    """V1 = H + V2, dim 2n; coordinates (e1, e1*, V2...)."""
    inner = space_V2(n, kappa)
    blocks = [("hyp", 0, 1)]
    for b in inner.blocks:
        if b[0] == "hyp":
            blocks.append(("hyp", b[1] + 2, b[2] + 2))
        else:
            blocks.append(("diag", b[1], b[2] + 2))
    return QuadraticSpace(2 * n, tuple(blocks), disc)


def dot_space(d: int) -> QuadraticSpace:
    """Standard dot-product pairing on F^d (q = sum x_i^2 / 2)."""
    return QuadraticSpace(d, tuple(("diag", Fraction(1, 2), i) for i in range(d)))


# ---------------------------------------------------------------------------
# Fourier transform against a pairing


def fourier(f: SchwartzFunction, space: QuadraticSpace) -> SchwartzFunction:
    """F(f)(v) = mu int f(u) psi(<u, v>) du; exact atom-for-atom."""
    ctx, p, d = f.ctx, f.ctx.p, f.d
    if d != space.dim:
        raise ValueError("dimension mismatch")
    mu = space.measure(ctx)
    out = []
    for coeff, a in f.atoms:
        mod = a.mod if a.mod is not None else (Fraction(0),) * d
        cf = coeff * mu
        phase = Fraction(0)
        center = [Fraction(0)] * d
        levels = [0] * d
        newmod = space.gram_vec(a.center)
        for b in space.blocks:
            if b[0] == "hyp":
                i, j = b[1], b[2]
                # int psi((v_j + mod_i) u_i) du_i over (c_i, K_i), and i <-> j
                phase += mod[i] * a.center[i] + mod[j] * a.center[j]
                center[j] = -mod[i]
                levels[j] = -a.levels[i]
                center[i] = -mod[j]
                levels[i] = -a.levels[j]
            else:
                dcoef, i = b[1], b[2]
                phase += mod[i] * a.center[i]
                center[i] = -mod[i] / (2 * dcoef)
                levels[i] = -a.levels[i] - vp(2 * dcoef, p)
        vol = Fraction(1)
        for k in a.levels:
            vol /= Fraction(p) ** k
        cf = cf * psi_eval(ctx, phase) * vol
        out.append((cf, Atom(tuple(center), tuple(levels), tuple(newmod))))
    return f.copy_with(out)


def mul_psi_q(f: SchwartzFunction, b, space: QuadraticSpace) -> SchwartzFunction:
    """Multiply by psi(b q(v)), refining cosets until the quadratic part
    is constant per coset."""
    ctx, p = f.ctx, f.ctx.p
    b = Fraction(b)
    if b == 0:
        return f
    vb = vp(b, p)
    out = []
    pending = list(f.atoms)
    while pending:
        coeff, a = pending.pop()
        ok = True
        for blk in space.blocks:
            if blk[0] == "hyp":
                if vb + a.levels[blk[1]] + a.levels[blk[2]] < 0:
                    ok = False
                    break
            else:
                if vb + vp(blk[1], p) + 2 * a.levels[blk[2]] < 0:
                    ok = False
                    break
        if not ok:
            K = max(a.levels) + 1
            pending.extend(f._refine_atom(coeff, a, K))
            continue
        # b q(v) = b<c, v> - b q(c) + b q(v - c) with the last term trivial
        grad = space.gram_vec(a.center)
        freq = tuple(b * g for g in grad)
        mod = freq if a.mod is None else tuple(m + x for m, x in zip(a.mod, freq))
        cf = coeff * psi_eval(ctx, -b * space.q(a.center))
        out.append((cf, Atom(a.center, a.levels, mod)))
    return f.copy_with(out)


# ---------------------------------------------------------------------------
# Weil index


FOURTH_ROOTS = (0, 1, 2, 3)


class ProbeFailure(RuntimeError):
    pass


def weil_index(ctx: ScalarContext, kappa_label: str, n_probes: int = 2,
               psi_scale: Fraction | None = None) -> Scalar:
    """gamma(chi_K, psi) from the defining transform identity on probes.

    Evaluates both sides of the identity
        int F_{psi,K}(f)(x) psi(N x) dx = gamma int f(x) psi(-N x) dx
    on indicator probes and returns the unique fourth root of unity
    matching them all.  psi_scale twists psi to psi_t.
    """
    from .levelsets import psi_q_transform

    chi = QuadraticCharacter(kappa_label, ctx.p)
    K = space_K(chi.kappa)
    t = Fraction(1) if psi_scale is None else Fraction(psi_scale)
    probes = [
        SchwartzFunction.indicator_ball(ctx, 2, level=0),
        SchwartzFunction.indicator_ball(ctx, 2, level=1),
        SchwartzFunction.indicator_ball(ctx, 2, level=-1),
        SchwartzFunction.from_table(ctx, 2, {(1, 0): 1, (0, 1): 2}, 1),
        SchwartzFunction.from_table(ctx, 2, {(Fraction(1, ctx.p), 0): 1}, 1),
    ]
    candidates = None
    used = 0
    for f in probes:
        if used >= n_probes and candidates and len(candidates) == 1:
            break
        ft = fourier_psi_t(f, K, t)
        lhs = psi_q_transform(ctx, K, ft, t)
        rhs = psi_q_transform(ctx, K, f, -t)
        if lhs.is_zero() and rhs.is_zero():
            continue
        here = set()
        for e in FOURTH_ROOTS:
            if ctx.eq(lhs, ctx.root_of_unity(4, e) * rhs):
                here.add(e)
        if not here:
            raise ProbeFailure(f"no fourth root matches probe (kappa={kappa_label})")
        candidates = here if candidates is None else candidates & here
        used += 1
    if not candidates:
        raise ProbeFailure(f"probes inconsistent for kappa={kappa_label}")
    e = sorted(candidates)[0]
    return ctx.root_of_unity(4, e)


def fourier_psi_t(f: SchwartzFunction, space: QuadraticSpace, t: Fraction):
    """The psi_t-unitary Fourier transform: |t|^m (F_psi f)(t v), dim = 2m."""
    t = Fraction(t)
    g = fourier(f, space)
    if t == 1:
        return g
    ctx, d = f.ctx, space.dim
    A = [[t if i == j else Fraction(0) for j in range(d)] for i in range(d)]
    m = d // 2
    tnorm = Fraction(ctx.p) ** (-vp(t, ctx.p) * m)   # |t|^m
    return g.act_linear(A).scale(ctx.rat(tnorm))
