"""Coefficient arithmetic over Q(zeta_N), N = 4 p^M, plus a complex fallback.

Exact scalars are sparse dictionaries keyed by (a, b) meaning
zeta_4^a * zeta_{p^M}^b with a in {0,1} and b in [0, phi(p^M)).
Products reduce exponents by zeta_4^2 = -1 and by the p^M-th cyclotomic
relation zeta^{phi + c} = -sum_{i<p-1} zeta^{i p^{M-1} + c}, which lands
back in the basis in one step.  Equality is decidable coefficientwise.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


class BackendMismatch(TypeError):
    pass


class DepthExceeded(ValueError):
    """A psi value at depth beyond the session's character depth M."""


class ScalarContext:
    """Session-wide scalar backend: fixes p, the character depth M, and mode."""

    def __init__(self, p: int, depth: int, backend: str = "exact", tol: float = 1e-9):
        if backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {backend!r}")
        if p < 3 or p % 2 == 0:
            raise ValueError("p must be an odd prime")
        self.p = p
        self.depth = depth            # M: zeta_{p^M} available
        self.backend = backend
        self.tol = tol
        self.pM = p ** depth
        self.D = p ** (depth - 1)     # relation step
        self.phi = self.pM - self.D   # dim of the p-part power basis
        self._expand_cache: dict[int, tuple[tuple[int, int], ...]] = {}
        self._psi_cache: dict[tuple[int, int], "Scalar"] = {}

    # -- constructors -------------------------------------------------

    def zero(self) -> "Scalar":
        if self.backend == "float":
            return Scalar(self, z=0j)
        return Scalar(self, terms={})

    def one(self) -> "Scalar":
        return self.rat(1)

    def rat(self, q) -> "Scalar":
        q = Fraction(q)
        if self.backend == "float":
            return Scalar(self, z=complex(q))
        return Scalar(self, terms={(0, 0): q} if q else {})

    def i(self) -> "Scalar":
        if self.backend == "float":
            return Scalar(self, z=1j)
        return Scalar(self, terms={(1, 0): Fraction(1)})

    def root_of_unity(self, order: int, expo: int) -> "Scalar":
        """zeta_order^expo.  order must divide N = 4 p^M in exact mode."""
        if order <= 0:
            raise ValueError("order must be positive")
        N = 4 * self.pM
        if self.backend == "float":
            return Scalar(self, z=cmath.exp(2j * cmath.pi * (expo % order) / order))
        if N % order != 0:
            raise DepthExceeded(
                f"order {order} does not divide N = 4*{self.p}^{self.depth}")
        E = (expo % order) * (N // order)   # exponent of zeta_N
        # CRT split: zeta_N = zeta_4^s zeta_{p^M}^t with s*p^M + 4t = 1 (mod N)
        a = (E * pow(self.pM, -1, 4)) % 4
        b = (E * pow(4, -1, self.pM)) % self.pM
        sign = Fraction(1)
        if a >= 2:
            sign = -sign
            a -= 2
        terms: dict[tuple[int, int], Fraction] = {}
        for bb, s in self._expand(b):
            key = (a, bb)
            terms[key] = terms.get(key, Fraction(0)) + sign * s
        return Scalar(self, terms={k: v for k, v in terms.items() if v})

    def psi_frac(self, r: int, e: int) -> "Scalar":
        """zeta_{p^e}^r, the value psi(r / p^e).  Cached."""
        if e == 0:
            return self.one()
        if e > self.depth:
            raise DepthExceeded(
                f"psi depth {e} exceeds session character depth M={self.depth}; "
                "raise the depth in the session config")
        r %= self.p ** e
        key = (r, e)
        got = self._psi_cache.get(key)
        if got is None:
            got = self.root_of_unity(self.p ** e, r)
            self._psi_cache[key] = got
        return got

    # -- basis reduction ----------------------------------------------

    def _expand(self, b: int) -> tuple[tuple[int, int], ...]:
        """zeta_{p^M}^b as a signed sum of basis monomials, b in [0, p^M)."""
        got = self._expand_cache.get(b)
        if got is None:
            if b < self.phi:
                got = ((b, 1),)
            else:
                c = b - self.phi
                got = tuple((i * self.D + c, -1) for i in range(self.p - 1))
            self._expand_cache[b] = got
        return got

    # -- predicates ----------------------------------------------------

    def eq(self, x: "Scalar", y: "Scalar") -> bool:
        if x.ctx is not y.ctx:
            raise BackendMismatch("scalars from different sessions")
        if self.backend == "float":
            return abs(x.z - y.z) <= self.tol
        return x.terms == y.terms

    def is_zero(self, x: "Scalar") -> bool:
        if self.backend == "float":
            return abs(x.z) <= self.tol
        return not x.terms


class Scalar:
    """Immutable element of the coefficient field."""

    __slots__ = ("ctx", "terms", "z")

    def __init__(self, ctx: ScalarContext, terms=None, z=None):
        self.ctx = ctx
        self.terms = terms
        self.z = z

    # -- ring ops --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = self.ctx.rat(other)
        if self.ctx.backend == "float":
            return Scalar(self.ctx, z=self.z + other.z)
        if len(self.terms) < len(other.terms):
            self, other = other, self
        terms = dict(self.terms)
        for k, v in other.terms.items():
            w = terms.get(k)
            if w is None:
                terms[k] = v
            else:
                w = w + v
                if w:
                    terms[k] = w
                else:
                    del terms[k]
        return Scalar(self.ctx, terms=terms)

    __radd__ = __add__

    def __neg__(self):
        if self.ctx.backend == "float":
            return Scalar(self.ctx, z=-self.z)
        return Scalar(self.ctx, terms={k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = self.ctx.rat(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        ctx = self.ctx
        if not isinstance(other, Scalar):
            q = Fraction(other)
            if ctx.backend == "float":
                return Scalar(ctx, z=self.z * complex(q))
            if not q:
                return ctx.zero()
            return Scalar(ctx, terms={k: v * q for k, v in self.terms.items()})
        if ctx.backend == "float":
            return Scalar(ctx, z=self.z * other.z)
        out: dict[tuple[int, int], Fraction] = {}
        pM = ctx.pM
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                c = c1 * c2
                a = a1 + a2
                if a >= 2:        # zeta_4^2 = -1
                    a -= 2
                    c = -c
                for bb, s in ctx._expand((b1 + b2) % pM):
                    key = (a, bb)
                    w = out.get(key)
                    if w is None:
                        out[key] = c if s > 0 else -c
                    else:
                        w = w + (c if s > 0 else -c)
                        if w:
                            out[key] = w
                        else:
                            del out[key]
        return Scalar(ctx, terms=out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a rational only; field inverses are never needed."""
        q = Fraction(other)
        if self.ctx.backend == "float":
            return Scalar(self.ctx, z=self.z / complex(q))
        return Scalar(self.ctx, terms={k: v / q for k, v in self.terms.items()})

    def conjugate(self) -> "Scalar":
        ctx = self.ctx
        if ctx.backend == "float":
            return Scalar(ctx, z=self.z.conjugate())
        out: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in self.terms.items():
            cc = -c if a == 1 else c      # conj(i) = -i
            for bb, s in ctx._expand((ctx.pM - b) % ctx.pM):
                key = (a, bb)
                w = out.get(key)
                val = cc if s > 0 else -cc
                if w is None:
                    out[key] = val
                else:
                    w = w + val
                    if w:
                        out[key] = w
                    else:
                        del out[key]
        return Scalar(ctx, terms=out)

    # -- views -------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.ctx.is_zero(self)

    def as_complex(self) -> complex:
        if self.ctx.backend == "float":
            return self.z
        total = 0j
        pM = self.ctx.pM
        for (a, b), c in self.terms.items():
            w = cmath.exp(2j * cmath.pi * b / pM)
            if a:
                w *= 1j
            total += float(c) * w
        return total

    def as_rational(self) -> Fraction:
        """The value, required to be rational (exact backend)."""
        if self.ctx.backend == "float":
            raise BackendMismatch("as_rational needs the exact backend")
        extra = [k for k in self.terms if k != (0, 0)]
        if extra:
            raise ValueError(f"scalar is not rational: extra terms {extra[:3]}")
        return self.terms.get((0, 0), Fraction(0))

    def __repr__(self):
        if self.ctx.backend == "float":
            return f"Scalar({self.z:.6g})"
        if not self.terms:
            return "Scalar(0)"
        bits = []
        for (a, b), c in sorted(self.terms.items())[:6]:
            mon = "" if (a, b) == (0, 0) else ("*i" if (a, b) == (1, 0) else f"*z4^{a}*zp^{b}")
            bits.append(f"{c}{mon}")
        if len(self.terms) > 6:
            bits.append("...")
        return "Scalar(" + " + ".join(bits) + ")"


def scalar_eq(a: Scalar, b: Scalar) -> bool:
    """Backend equality contract: exact coefficientwise / toleranced."""
    return a.ctx.eq(a, b)
