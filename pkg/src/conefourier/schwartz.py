"""Schwartz-Bruhat functions on F^d as finite sums of modulated cosets.

An atom is coeff * psi(<mod, v>) * 1[v_i in c_i + p^{K_i} Z_p for all i].
Plain coset tables are atoms with trivial modulation; the Fourier transform
of an atom is again one atom, so transforms stay exact and size-stable.
Tables can always be materialized to canonical (support m, level k) form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar, ScalarContext
from .padic import psi_eval, vp, VINF


@dataclass(frozen=True)
class Atom:
    center: tuple[Fraction, ...]
    levels: tuple[int, ...]
    mod: tuple[Fraction, ...] | None   # None = no modulation


def _norm_center(center, levels, p):
    """Reduce each coordinate mod p^{K_i} to a canonical representative."""
    out = []
    for c, k in zip(center, levels):
        c = Fraction(c)
        if c == 0:
            out.append(c)
            continue
        den = c.denominator
        e = 0
        while den % p == 0:
            den //= p
            e += 1
        m = p ** (k + e)
        if m <= 1:
            # representative mod p^k with k + e <= 0: the coset contains 0
            out.append(Fraction(0) if vp(c, p) >= k else c)
            continue
        num = c.numerator * pow(den, -1, m) % m
        out.append(Fraction(num, p ** e))
    return tuple(out)


class SchwartzFunction:
    """Finite atom sum over F^d.  Immutable by convention."""

    def __init__(self, ctx: ScalarContext, d: int, atoms=None):
        self.ctx = ctx
        self.d = d
        self.atoms: list[tuple[Scalar, Atom]] = []
        if atoms:
            for coeff, atom in atoms:
                self._push(coeff, atom)

    # -- construction ----------------------------------------------------

    def _push(self, coeff: Scalar, atom: Atom):
        if coeff.is_zero():
            return
        ctx, p = self.ctx, self.ctx.p
        center = _norm_center(atom.center, atom.levels, p)
        mod = atom.mod
        if mod is not None:
            if all(vp(m, p) + k >= 0 for m, k in zip(mod, atom.levels)):
                phase = Fraction(0)
                for m, c in zip(mod, center):
                    phase += Fraction(m) * c
                coeff = coeff * psi_eval(ctx, phase)
                mod = None
            else:
                mod = tuple(Fraction(m) for m in mod)
        self.atoms.append((coeff, Atom(center, tuple(atom.levels), mod)))

    @classmethod
    def from_table(cls, ctx, d, entries, level):
        """Plain table: entries is a mapping coset-rep tuple -> scalar-like."""
        f = cls(ctx, d)
        levels = (level,) * d
        for rep, val in entries.items():
            coeff = val if isinstance(val, Scalar) else ctx.rat(val)
            f._push(coeff, Atom(tuple(Fraction(r) for r in rep), levels, None))
        return f

    @classmethod
    def indicator_ball(cls, ctx, d, level=0, center=None):
        c = tuple(Fraction(0) for _ in range(d)) if center is None \
            else tuple(Fraction(x) for x in center)
        return cls(ctx, d, [(ctx.one(), Atom(c, (level,) * d, None))])

    def copy_with(self, atoms):
        return SchwartzFunction(self.ctx, self.d, atoms)

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        assert self.d == other.d
        return self.copy_with(self.atoms + other.atoms)

    def __sub__(self, other):
        return self + other.scale(self.ctx.rat(-1))

    def scale(self, s) -> "SchwartzFunction":
        if not isinstance(s, Scalar):
            s = self.ctx.rat(s)
        return self.copy_with([(c * s, a) for c, a in self.atoms])

    def conjugate(self) -> "SchwartzFunction":
        out = []
        for c, a in self.atoms:
            mod = None if a.mod is None else tuple(-m for m in a.mod)
            out.append((c.conjugate(), Atom(a.center, a.levels, mod)))
        return self.copy_with(out)

    def is_zero_rep(self) -> bool:
        return not self.atoms

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, v) -> Scalar:
        ctx, p = self.ctx, self.ctx.p
        v = tuple(Fraction(x) for x in v)
        total = ctx.zero()
        for coeff, a in self.atoms:
            ok = True
            for x, c, k in zip(v, a.center, a.levels):
                if vp(x - c, p) < k:
                    ok = False
                    break
            if not ok:
                continue
            if a.mod is not None:
                phase = Fraction(0)
                for m, x in zip(a.mod, v):
                    phase += m * x
                coeff = coeff * psi_eval(ctx, phase)
            total = total + coeff
        return total

    def integrate(self) -> Scalar:
        """Integral against the standard product measure (vol Z_p^d = 1)."""
        ctx, p = self.ctx, self.ctx.p
        total = ctx.zero()
        for coeff, a in self.atoms:
            vol = Fraction(1)
            ok = True
            phase = Fraction(0)
            for i, k in enumerate(a.levels):
                m = a.mod[i] if a.mod is not None else Fraction(0)
                if vp(m, p) + k < 0:
                    ok = False
                    break
                phase += m * a.center[i]
                vol /= Fraction(p) ** k
            if ok:
                total = total + coeff * psi_eval(ctx, phase) * vol
        return total

    # -- pointwise operations ------------------------------------------------

    def mul_psi_linear(self, freq) -> "SchwartzFunction":
        """Multiply by psi(<freq, v>)."""
        freq = tuple(Fraction(x) for x in freq)
        out = []
        for c, a in self.atoms:
            m = freq if a.mod is None else tuple(m0 + m1 for m0, m1 in zip(a.mod, freq))
            out.append((c, Atom(a.center, a.levels, m)))
        return self.copy_with(out)

    def translate(self, u0) -> "SchwartzFunction":
        """f(v + u0)."""
        ctx = self.ctx
        u0 = tuple(Fraction(x) for x in u0)
        out = []
        for c, a in self.atoms:
            center = tuple(ci - xi for ci, xi in zip(a.center, u0))
            if a.mod is not None:
                phase = sum((m * x for m, x in zip(a.mod, u0)), Fraction(0))
                c = c * psi_eval(ctx, phase)
            out.append((c, Atom(center, a.levels, a.mod)))
        return self.copy_with(out)

    def mul_pointwise(self, other: "SchwartzFunction") -> "SchwartzFunction":
        assert self.d == other.d
        p = self.ctx.p
        out = []
        for c1, a1 in self.atoms:
            for c2, a2 in other.atoms:
                center, levels = [], []
                ok = True
                for i in range(self.d):
                    ca, ka = a1.center[i], a1.levels[i]
                    cb, kb = a2.center[i], a2.levels[i]
                    if ka > kb:
                        ca, ka, cb, kb = cb, kb, ca, ka
                    if vp(ca - cb, p) < ka:
                        ok = False
                        break
                    center.append(cb)
                    levels.append(kb)
                if not ok:
                    continue
                if a1.mod is None:
                    mod = a2.mod
                elif a2.mod is None:
                    mod = a1.mod
                else:
                    mod = tuple(x + y for x, y in zip(a1.mod, a2.mod))
                out.append((c1 * c2, Atom(tuple(center), tuple(levels), mod)))
        return self.copy_with(out)

    # -- geometry -------------------------------------------------------------

    def _refine_atom(self, coeff, a: Atom, K: int):
        """Split an atom into sub-atoms of uniform level K >= max(levels)."""
        p = self.ctx.p
        ranges = [range(p ** (K - k)) for k in a.levels]
        steps = [Fraction(p) ** k for k in a.levels]
        for digits in itertools.product(*ranges):
            center = tuple(c + r * s for c, r, s in zip(a.center, digits, steps))
            yield coeff, Atom(center, (K,) * self.d, a.mod)

    def act_linear(self, A, b=None, prefactor=None) -> "SchwartzFunction":
        """v -> prefactor * f(A v + b), A an exact invertible matrix.

        Per atom, A^{-1}(coset lattice) must again be a product lattice,
        which holds exactly when the finest per-coordinate levels match the
        covolume; atoms are refined (up to uniform level) only when needed.
        """
        ctx, p, d = self.ctx, self.ctx.p, self.d
        b = tuple(Fraction(0) for _ in range(d)) if b is None \
            else tuple(Fraction(x) for x in b)
        Ainv = mat_inv(A)
        vdet = vp(_det(Ainv), p)
        At = [[Fraction(A[j][i]) for j in range(d)] for i in range(d)]
        out = []
        for coeff, a in self.atoms:
            pieces = [(coeff, a)]
            levels = self._image_levels(Ainv, vdet, a.levels)
            if levels is None:
                K = max(a.levels)
                pieces = list(self._refine_atom(coeff, a, K))
                levels = self._image_levels(Ainv, vdet, (K,) * d)
                if levels is None:
                    raise ValueError(
                        "act_linear: A^{-1} does not map coset lattices to "
                        "product lattices")
            for cf, at in pieces:
                shifted = [Fraction(x) - y for x, y in zip(at.center, b)]
                center = tuple(mat_vec(Ainv, shifted))
                mod = None
                if at.mod is not None:
                    mod = tuple(mat_vec(At, at.mod))
                    phase = sum((m * x for m, x in zip(at.mod, b)), Fraction(0))
                    cf = cf * psi_eval(ctx, phase)
                out.append((cf, Atom(center, levels, mod)))
        g = self.copy_with(out)
        if prefactor is not None:
            g = g.scale(prefactor)
        return g

    def _image_levels(self, Ainv, vdet, levels):
        """Levels of A^{-1}(product lattice) when it is again a product:
        L_i = min_j (K_j + v(M_ij)), valid iff sum L_i = sum K_j + v(det)."""
        p = self.ctx.p
        d = self.d
        out = []
        for i in range(d):
            li = None
            for j in range(d):
                x = Ainv[i][j]
                if x == 0:
                    continue
                cand = levels[j] + vp(x, p)
                li = cand if li is None else min(li, cand)
            if li is None:
                return None
            out.append(li)
        if sum(out) != sum(levels) + vdet:
            return None
        return tuple(out)

    def reflect(self) -> "SchwartzFunction":
        d = self.d
        neg = [[Fraction(-1) if i == j else Fraction(0) for j in range(d)]
               for i in range(d)]
        return self.act_linear(neg)

    def slice_coords(self, fixed: dict[int, Fraction]) -> "SchwartzFunction":
        """Restrict coordinates in `fixed`, returning a function of the rest."""
        ctx, p = self.ctx, self.ctx.p
        keep = [i for i in range(self.d) if i not in fixed]
        out = []
        for coeff, a in self.atoms:
            ok = True
            phase = Fraction(0)
            for i, val in fixed.items():
                if vp(Fraction(val) - a.center[i], p) < a.levels[i]:
                    ok = False
                    break
                if a.mod is not None:
                    phase += a.mod[i] * Fraction(val)
            if not ok:
                continue
            coeff = coeff * psi_eval(ctx, phase)
            center = tuple(a.center[i] for i in keep)
            levels = tuple(a.levels[i] for i in keep)
            mod = None if a.mod is None else tuple(a.mod[i] for i in keep)
            out.append((coeff, Atom(center, levels, mod)))
        return SchwartzFunction(ctx, len(keep), out)

    # -- support data -----------------------------------------------------------

    def support_exponent(self) -> int:
        """m with supp f inside p^{-m} Z_p^d."""
        m = 0
        for _, a in self.atoms:
            for c, k in zip(a.center, a.levels):
                m = max(m, -vp(c, self.ctx.p) if c else 0, -k)
        return m

    def level_exponent(self) -> int:
        """k such that f is constant on cosets of p^k Z_p^d."""
        k = 0
        for _, a in self.atoms:
            k = max(k, *a.levels)
            if a.mod is not None:
                for m in a.mod:
                    if m:
                        k = max(k, -vp(m, self.ctx.p))
        return k

    def ball_avoidance_radius(self):
        """Smallest R with supp f disjoint from p^R Z_p^d, or None."""
        p = self.ctx.p
        R = None
        for _, a in self.atoms:
            best = None
            for c, k in zip(a.center, a.levels):
                v = vp(c, p)
                if v < k:
                    best = v if best is None else min(best, v)
            if best is None:
                return None      # this coset accumulates at 0
            R = best + 1 if R is None else max(R, best + 1)
        return R if R is not None else 0

    def constancy_radius_at_zero(self) -> int:
        """R with f constant (= f(0)) on p^R Z_p^d."""
        p = self.ctx.p
        R = 0
        for _, a in self.atoms:
            touch = all(vp(c, p) >= k for c, k in zip(a.center, a.levels))
            if touch:
                R = max(R, *a.levels)
                if a.mod is not None:
                    for m in a.mod:
                        if m:
                            R = max(R, -vp(m, p))
            else:
                r = self._avoid_radius(a)
                R = max(R, r)
        return R

    def _avoid_radius(self, a: Atom) -> int:
        p = self.ctx.p
        best = None
        for c, k in zip(a.center, a.levels):
            v = vp(c, p)
            if v < k:
                best = v if best is None else min(best, v)
        return 0 if best is None else best + 1

    # -- canonical table ----------------------------------------------------------

    def materialize(self, m: int | None = None, k: int | None = None,
                    cap: int = 2 * 10 ** 6):
        """Canonical dict {rep tuple: Scalar} at support m / level k."""
        p = self.ctx.p
        if m is None:
            m = self.support_exponent()
        if k is None:
            k = self.level_exponent()
        n_cells = (p ** (m + k)) ** self.d
        if n_cells > cap:
            raise MemoryError(f"{n_cells} cells exceed materialization cap")
        table = {}
        grid = [Fraction(j, p ** m) for j in range(p ** (m + k))]
        for rep in itertools.product(grid, repeat=self.d):
            val = self.evaluate(rep)
            if not val.is_zero():
                table[rep] = val
        return table, m, k


# -- small exact matrix helpers ------------------------------------------------


def mat_vec(A, v):
    return [sum((Fraction(A[i][j]) * v[j] for j in range(len(v))), Fraction(0))
            for i in range(len(A))]


def mat_mul(A, B):
    n, m, r = len(A), len(B), len(B[0])
    return [[sum((Fraction(A[i][k]) * Fraction(B[k][j]) for k in range(m)),
                 Fraction(0)) for j in range(r)] for i in range(n)]


def mat_inv(A):
    n = len(A)
    M = [[Fraction(A[i][j]) for j in range(n)] +
         [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def mat_identity(n):
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def _integral_unimodular(U, p: int) -> bool:
    for row in U:
        for x in row:
            if x != 0 and vp(x, p) < 0:
                return False
    det = _det(U)
    return det != 0 and vp(det, p) == 0


def _det(A):
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(col + 1, n):
            if M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det
