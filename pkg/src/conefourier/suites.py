"""Identity verification suites.

Each suite runs a family of exact identity checks from the verification
plan and emits one record per check: name, anchor tag, inputs digest,
status, the exact/float discrepancy, and stabilization diagnostics.
Suites are deterministic given the session seed.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Scalar
from .padic import vp
from .schwartz import SchwartzFunction
from .quadratic import fourier, space_V2, weil_index
from .levelsets import (
    ball_pushforward_integral, c_psi_q, delta, delta_asymptotics,
    delta_enumerate, h_kernel, psi_q_transform, space_integral,
)
from .cone import (
    ConeTestFunction, chart_point, cone_catalog, cone_integral, point_with_frame,
    q_action, transform_point,
)
from .radon import (
    phi1, phi2, phi_on_ray, phi_value, radon, radon_hat, radon_profile,
    radon_total_mass, r1_moment,
)
from .mixed import (
    MixedFunction, mixed_to_cone, pi_r, pi_r1, pi_r2, t2_identity_check,
)
from .session import Session

SUITE_NAMES = ("fourier", "weil", "levelset", "radon", "phi", "theorem")


@dataclass
class Record:
    suite: str
    identity: str
    anchor: str
    inputs: str
    status: str            # pass | fail | error
    delta: str             # exact term count or float magnitude
    diagnostics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_canonical(self) -> dict:
        return {
            "suite": self.suite, "identity": self.identity,
            "anchor": self.anchor, "inputs": self.inputs,
            "status": self.status, "delta": self.delta,
            "diagnostics": {k: self.diagnostics[k]
                            for k in sorted(self.diagnostics)},
        }


class _Bench:
    """Collects records for one suite run."""

    def __init__(self, sess, suite):
        self.sess = sess
        self.suite = suite
        self.records: list[Record] = []

    def check(self, identity, anchor, lhs, rhs, inputs="", diagnostics=None):
        t0 = time.perf_counter()
        ctx = self.sess.ctx
        try:
            ok = ctx.eq(lhs, rhs)
            if ctx.backend == "float":
                dv = f"{abs(lhs.z - rhs.z):.3e}"
            else:
                diff = lhs - rhs
                dv = "0" if not diff.terms else f"{len(diff.terms)} terms"
            status = "pass" if ok else "fail"
        except Exception as e:          # pragma: no cover - defensive
            status, dv = "error", f"{type(e).__name__}: {e}"
        self.records.append(Record(self.suite, identity, anchor, inputs,
                                   status, dv, diagnostics or {},
                                   time.perf_counter() - t0))
        return status == "pass"

    def predicate(self, identity, anchor, ok, inputs="", diagnostics=None,
                  detail=""):
        self.records.append(Record(self.suite, identity, anchor, inputs,
                                   "pass" if ok else "fail",
                                   detail or ("0" if ok else "violated"),
                                   diagnostics or {}))
        return ok

    def error(self, identity, anchor, exc, inputs=""):
        self.records.append(Record(self.suite, identity, anchor, inputs,
                                   "error", f"{type(exc).__name__}: {exc}"))


def _rng(sess, name):
    key = f"{sess.config.seed}:{name}:{sess.p}:{sess.config.disc}"
    return random.Random(int(hashlib.sha256(key.encode()).hexdigest()[:12], 16))


def _digest(*parts) -> str:
    h = hashlib.sha256("|".join(str(x) for x in parts).encode())
    return h.hexdigest()[:12]


def random_schwartz(sess, d, rng, n_atoms=3, m=1, k=1):
    """Sparse coset tables, values in {+-1, +-2} (exact-friendly)."""
    p = sess.p
    entries = {}
    while len(entries) < n_atoms:
        rep = tuple(Fraction(rng.randrange(p ** (m + k)), p ** m)
                    for _ in range(d))
        entries[rep] = rng.choice([1, -1, 2, -2])
    return SchwartzFunction.from_table(sess.ctx, d, entries, k)


def random_cone_function(sess, rng, n_atoms=2, k=1, shell=0):
    p = sess.p
    d = sess.V1.dim
    entries = {}
    while len(entries) < n_atoms:
        rep = [Fraction(rng.randrange(p ** k)) for _ in range(d)]
        rep[rng.randrange(d)] = Fraction(rng.randrange(1, p)) * \
            Fraction(p) ** shell
        entries[tuple(rep)] = rng.choice([1, -1, 2, -2])
    return ConeTestFunction(sess, SchwartzFunction.from_table(
        sess.ctx, d, entries, k))


def random_mixed(sess, rng, n_terms=1, with_deep_atom=True):
    p = sess.p
    terms = []
    for _ in range(n_terms):
        c = Fraction(rng.randrange(1, p))
        fp = SchwartzFunction.from_table(
            sess.ctx, 1, {(c,): rng.choice([1, 2, -1]),
                          (c + p,): rng.choice([1, -2])}, 2)
        d2 = sess.V2.dim
        entries = {}
        while len(entries) < 2:
            rep = tuple(Fraction(rng.randrange(p)) for _ in range(d2))
            entries[rep] = rng.choice([1, -1, 2])
        if with_deep_atom:
            rep = tuple(Fraction(rng.randrange(p * p), p) for _ in range(d2))
            entries[rep] = rng.choice([1, -1])
        fpp = SchwartzFunction.from_table(sess.ctx, d2, entries, 1)
        terms.append((fp, fpp))
    return MixedFunction(terms).check(sess)


def _isometries_V1(sess):
    from .schwartz import mat_identity
    d = sess.V1.dim
    u0 = sess.chi.u0
    mats = []
    P = mat_identity(d)
    P[0][0] = P[1][1] = Fraction(0)
    P[0][1] = P[1][0] = Fraction(1)
    mats.append(P)
    S = mat_identity(d)
    S[2][2] = Fraction(u0)
    S[3][3] = Fraction(1, u0)
    mats.append(S)
    Q = mat_identity(d)
    Q[0][0] = Q[1][1] = Q[2][2] = Q[3][3] = Fraction(0)
    Q[0][2] = Q[2][0] = Q[1][3] = Q[3][1] = Fraction(1)
    mats.append(Q)
    F = mat_identity(d)
    F[d - 1][d - 1] = Fraction(-1)
    mats.append(F)
    return mats


# ---------------------------------------------------------------------------
# suites


def suite_fourier(sess: Session, n_functions=50) -> list[Record]:
    """F o F = point reflection and Plancherel on F^4 (exact)."""
    b = _Bench(sess, "fourier")
    rng = _rng(sess, "fourier")
    space = sess.V2
    p = sess.p
    for idx in range(n_functions):
        m = rng.choice([0, 1, 2])
        k = rng.choice([1, 2])
        f = random_schwartz(sess, 4, rng, n_atoms=rng.choice([2, 3]), m=m, k=k)
        dig = _digest("fourier", idx, m, k)
        ff = fourier(fourier(f, space), space)
        pts = [a.center for _, a in f.atoms]
        pts.append(tuple(Fraction(rng.randrange(p ** 2), p) for _ in range(4)))
        ok = all(sess.ctx.eq(ff.evaluate(pt), f.evaluate(tuple(-x for x in pt)))
                 for pt in pts)
        b.predicate(f"fourier-involution[{idx}]", "F(psi,U) o F(psi,U) = reflect",
                    ok, inputs=dig)
        g = random_schwartz(sess, 4, rng, n_atoms=2, m=min(m, 1), k=1)
        lhs = f.mul_pointwise(g.conjugate()).integrate()
        rhs = fourier(f, space).mul_pointwise(
            fourier(g, space).conjugate()).integrate()
        b.check(f"plancherel[{idx}]", "self-dual Haar measure", lhs, rhs,
                inputs=dig)
    return b.records


def suite_weil(sess: Session, n_probes=5) -> list[Record]:
    """The Weil index: defining ratio, gamma^4 = 1, split value, psi_t law."""
    b = _Bench(sess, "weil")
    ctx = sess.ctx
    for disc in ("split", "unram", "ram-p", "ram-up"):
        g = weil_index(ctx, disc, n_probes=n_probes)
        g4 = g * g * g * g
        b.check(f"gamma4[{disc}]", "gamma is a fourth root of unity",
                g4, ctx.one(), inputs=disc)
        if disc == "split":
            b.check("gamma-split", "gamma = 1 for split K", g, ctx.one())
        from .padic import QuadraticCharacter
        chi = QuadraticCharacter(disc, sess.p)
        u0 = chi.u0
        for t in (Fraction(u0), Fraction(sess.p), Fraction(u0 * sess.p)):
            gt = weil_index(ctx, disc, psi_scale=t)
            b.check(f"gamma-psi-t[{disc},{t}]",
                    "gamma(chi, psi_t) = chi(t) gamma(chi, psi)",
                    gt, g * chi.sign(t), inputs=f"{disc}:{t}")
        # the identity on U = H^{m-1} + K for random probes
        rng = _rng(sess, f"weil:{disc}")
        U = space_V2(sess.config.n, chi.kappa, disc)
        for idx in range(2):
            f = random_schwartz(sess, U.dim, rng, n_atoms=2, m=0, k=1)
            lhs = psi_q_transform(ctx, U, fourier(f, U), 1)
            rhs = psi_q_transform(ctx, U, f, -1) * g
            b.check(f"weil-U[{disc},{idx}]",
                    "int F(f) psi(q) = gamma int f psi(-q)", lhs, rhs,
                    inputs=_digest("weilU", disc, idx))
            m = U.dim // 2
            for t in (Fraction(sess.p), Fraction(u0)):
                lhs = psi_q_transform(ctx, U, fourier(f, U), t)
                sc = Fraction(sess.p) ** (vp(t, sess.p) * m)
                rhs = psi_q_transform(ctx, U, f, -1 / t) * g * \
                    (sc * chi.sign(t))
                b.check(f"weil-psi-t-U[{disc},{idx},{t}]",
                        "|t|^{-m} gamma chi(t) scaling", lhs, rhs,
                        inputs=_digest("weilUt", disc, idx, t))
    # gamma is probe independent: n_probes >= 5 distinct probes agreed above;
    # record the regression sign for the unramified class
    gu = weil_index(ctx, "unram", n_probes=5)
    b.predicate("gamma-unram-sign", "ratio oracle regression",
                ctx.eq(gu * gu, ctx.one()), detail="gamma^2 = 1")
    return b.records


def suite_levelset(sess: Session, n_fubini=10, n_asym=5, n_hs=3) -> list[Record]:
    """Gelfand-Leray Fubini, delta asymptotics vs c_{psi,q}, H_s pairing."""
    b = _Bench(sess, "levelset")
    ctx, p = sess.ctx, sess.p
    rng = _rng(sess, "levelset")
    # Fubini on the session space and on the split space
    for disc in dict.fromkeys(["split", sess.config.disc]):
        s2 = Session(type(sess.config)(p=p, n=sess.config.n, disc=disc,
                                       backend=sess.config.backend,
                                       tol=sess.config.tol,
                                       depth=sess.config.depth,
                                       seed=sess.config.seed)) \
            if disc != sess.config.disc else sess
        for idx in range(n_fubini // 2 + 1):
            f = random_schwartz(s2, 4, rng, n_atoms=2, m=rng.choice([0, 1]), k=1)
            got = _fubini_grid(s2, s2.V2, f, J=2, L=3, r=2)
            want = space_integral(s2.ctx, s2.V2, f)
            b.check(f"fubini[{disc},{idx}]",
                    "int_F delta(t)(f) dt = int f du", got, want,
                    inputs=_digest("fubini", disc, idx))
    # enumeration oracle agreement (stabilization certificate); the grid is
    # p^{4 j}-sized, so the certified level pair shrinks with p
    f = random_schwartz(sess, 4, rng, n_atoms=2, m=0, k=1)
    j_lo = 3 if p == 3 else 2
    for t in (Fraction(1), Fraction(p)):
        a = delta(sess, sess.V2, t, f)
        o1 = delta_enumerate(ctx, sess.V2, t, f, j=j_lo)
        o2 = delta_enumerate(ctx, sess.V2, t, f, j=j_lo + 1)
        ok = ctx.eq(o1.value, o2.value) and ctx.eq(a.value, o1.value)
        b.predicate(f"enumeration-oracle[{t}]",
                    "closed form vs residue-ring enumeration", ok,
                    diagnostics={"j_star": a.stabilization_level,
                                 "tail": a.tail_method})
    # asymptotics
    cq = c_psi_q(sess)
    for idx in range(n_asym):
        f = random_schwartz(sess, 4, rng, n_atoms=2, m=0, k=1)
        f = f + SchwartzFunction.indicator_ball(ctx, 4, rng.choice([1, 2]))
        try:
            d0, coeff, k0 = delta_asymptotics(sess, sess.V2, f)
            b.check(f"delta-asymptotics[{idx}]",
                    "delta(s) = delta(0) + c chi(s)|s|^{n-2} f(0)",
                    coeff, cq, inputs=_digest("asym", idx),
                    diagnostics={"k0": k0})
        except Exception as e:
            b.error(f"delta-asymptotics[{idx}]", "delta difference equation", e)
    # H_s pairing identity
    for idx in range(n_hs):
        f = random_schwartz(sess, 4, rng, n_atoms=1, m=0, k=1)
        ff = fourier(f, sess.V2)
        s = Fraction(p) ** rng.choice([1, 2])
        lhs = delta(sess, sess.V2, s, ff).value - delta(sess, sess.V2, 0, ff).value
        rhs = _pair_h(sess, f, s)
        b.check(f"h-pairing[{idx}]",
                "delta(s)(Ff) - delta(0)(Ff) = int f H_s", lhs, rhs,
                inputs=_digest("hs", idx, s))
    return b.records


def _fubini_grid(sess, space, f, J, L, r):
    """Grid-plus-tail sum of delta(t)(f) dt over a partition of F.

    Inner ball p^J Z via the closed pushforward; shells w in [-L, J) on a
    unit grid; deeper shells carry no mass (q is bounded on supp f with
    m <= 1, certified by the vanishing of the two next shells)."""
    p = sess.p
    total = ball_pushforward_integral(sess, space, f, Fraction(0), J)
    for w in range(-L, J):
        for u in range(1, p ** r):
            if u % p == 0:
                continue
            t = Fraction(u) * Fraction(p) ** w
            total = total + delta(sess, space, t, f).value * \
                Fraction(p) ** (-w - r)
    for w in (-L - 1, -L - 2):
        if not delta(sess, space, Fraction(p) ** w, f).value.is_zero():
            raise RuntimeError("fubini grid missed outer mass")
    return total


def _pair_h(sess, f, s):
    import itertools
    ctx, p = sess.ctx, sess.p
    m = f.support_exponent()
    L = f.level_exponent() + 2 * m + 2
    total = ctx.zero()
    side = p ** (m + L)
    vol = Fraction(1, p ** L) ** 4
    for rep in itertools.product(range(side), repeat=4):
        u = tuple(Fraction(x, p ** m) for x in rep)
        fv = f.evaluate(u)
        if fv.is_zero():
            continue
        total = total + fv * h_kernel(sess, sess.V2, s, u)
    return total * vol * sess.V2.measure(ctx)


def suite_radon(sess: Session, n_points=5, n_isoms=3) -> list[Record]:
    """Radon homogeneity, total mass, equivariance; R-hat germ and decay."""
    b = _Bench(sess, "radon")
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    rng = _rng(sess, "radon")
    f = random_cone_function(sess, rng, n_atoms=2, k=1)
    pts = cone_catalog(sess, count=n_points)
    ic = cone_integral(sess, f)
    u0 = sess.chi.u0
    for i, pt in enumerate(pts):
        for x in (Fraction(p), Fraction(u0)):
            t = Fraction(1)
            lhs = radon(sess, f, x * t, pt.scaled(x))
            rhs = radon(sess, f, t, pt) * Fraction(p) ** vp(x, p)
            b.check(f"radon-homogeneity[{i},{x}]",
                    "R(xt)(f)(xw) = |x|^{-1} R(t)(f)(w)", lhs, rhs,
                    inputs=_digest("rh", i, x))
        b.check(f"radon-total-mass[{i}]",
                "int_F R(t)(f)(w) dt = I_C(f)",
                radon_total_mass(sess, f, pt), ic, inputs=_digest("rm", i))
    pt = pts[1]
    isoms = _isometries_V1(sess)[:n_isoms]
    for i, H in enumerate(isoms):
        for a in (Fraction(1), Fraction(p)):
            lhs = radon(sess, f, Fraction(1), transform_point(sess, pt, a, H)) \
                * sess.chi.eval(ctx, a) * Fraction(p) ** (-vp(a, p) * (n - 1))
            rhs = radon(sess, q_action(sess, f, a=1 / a, h=H), Fraction(1), pt)
            b.predicate(f"radon-equivariance[{i},{a}]",
                        "(a,g) R(t) = R(t) (a^{-1},g)", ctx.eq(lhs, rhs),
                        inputs=_digest("req", i, a))
    # R-hat: germ and decay statistic
    from .radon import _ray_data
    for i, pt in enumerate(pts[:3]):
        rd = _ray_data(sess, f, pt)
        j_germ = max(1, -rd.k_lo, rd.k_in)
        ok = True
        for j in (j_germ, j_germ + 1):
            ok = ok and ctx.eq(radon_hat(sess, f, Fraction(p) ** j, pt), ic)
        b.predicate(f"hat-germ[{i}]", "[R-hat(f)]_0 = I_C(f)", ok,
                    diagnostics={"germ_exponent": j_germ})
        stats = []
        for j in range(0, 11):
            x = Fraction(1, p ** j)
            v = radon_hat(sess, f, x, pt)
            stats.append(abs(v.as_complex()) * float(p) ** (j * (n - 1)))
        bounded = max(stats) < float("inf") and \
            abs(stats[-1] - stats[-2]) < 1e-6 * max(1.0, stats[-1])
        b.predicate(f"hat-decay[{i}]",
                    "R-hat(f)(xw)|x|^{n-1} bounded as |x| -> infty", bounded,
                    diagnostics={"max_stat": max(stats),
                                 "decay_curve": [round(s, 6) for s in stats]})
    # cross-path: profile asymptote coefficient = c_{psi,q} R_1
    prof = radon_profile(sess, f, pts[1])
    mono = [m_ for m_ in prof.inner if m_.s > 0]
    r1 = r1_moment(sess, f, pts[1])
    want = c_psi_q(sess) * r1
    got = mono[0].coef if mono else ctx.zero()
    shells = {}
    for w in sorted(prof.table):
        _, vals = prof.table[w]
        shells[str(w)] = round(abs(next(iter(vals.values())).as_complex()), 6)
    b.check("radon-asymptote-coefficient",
            "R(t) = R(0) + c_{psi,q} chi(t)|t|^{n-2} R_1", got, want,
            diagnostics={"profile_shells": shells,
                         "k_in": prof.k_in, "k_out": prof.k_out})
    return b.records


def suite_phi(sess: Session, n_points=4, n_unitarity=10) -> list[Record]:
    """Phi = Phi1 + Phi2, homogeneity, germs, equivariance, B map, unitarity."""
    b = _Bench(sess, "phi")
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    rng = _rng(sess, "phi")
    f = random_cone_function(sess, rng, n_atoms=2, k=1)
    pts = cone_catalog(sess, count=n_points)
    ic = cone_integral(sess, f)
    cq = sess.c_psi_q_value()
    for i, pt in enumerate(pts):
        tot = phi_value(sess, f, pt, "phi")
        p1 = phi_value(sess, f, pt, "phi1")
        p2 = phi_value(sess, f, pt, "phi2")
        b.check(f"phi-decomposition[{i}]", "Phi = Phi1 + Phi2",
                tot, p1 + p2, inputs=_digest("phid", i))
    pt = pts[1]
    for a in (Fraction(p), Fraction(sess.chi.u0)):
        lhs = phi_value(sess, f, pt.scaled(a), "phi1")
        sc = Fraction(sess.chi.sign(a)) * Fraction(p) ** (vp(a, p) * (n - 2))
        b.check(f"phi1-homogeneity[{a}]",
                "Phi1(f)(aw) = chi_K(a)|a|^{2-n} Phi1(f)(w)",
                lhs, phi_value(sess, f, pt, "phi1") * sc)
    germ2 = phi2(sess, f).germ(pt)
    b.check("phi2-germ", "[Phi2(f)]_0 = c_{psi,q} I_C(f)",
            germ2.const, cq * ic,
            diagnostics={"valid_exponent": germ2.valid_exponent})
    b.predicate("phi2-germ-flat", "Phi2 image locally constant",
                germ2.homog_at_ref.is_zero())
    for i, H in enumerate(_isometries_V1(sess)[:2]):
        a = Fraction(sess.chi.u0)
        lhs = phi_value(sess, f, transform_point(sess, pt, a, H), "phi") * \
            sess.chi.eval(ctx, a) * Fraction(p) ** (-vp(a, p) * (n - 1))
        rhs = phi_value(sess, q_action(sess, f, a=1 / a, h=H), pt, "phi")
        b.check(f"phi-equivariance[{i}]", "(a,g) Phi = Phi (a^{-1},g)",
                lhs, rhs)
    # jacquet B: the constant component transforms by chi_K |.|^{n-1}
    a = Fraction(p)
    g = q_action(sess, f, a=a)
    fac = Fraction(sess.chi.sign(a)) * Fraction(p) ** (vp(a, p) * (n - 1))
    b.check("jacquet-B-const-equivariance",
            "M acts on the C component by chi_K|.|^{n-1}",
            cq * cone_integral(sess, g) * fac, cq * ic)
    hom = phi1(sess, f).germ(pt)
    b.check("jacquet-B-homog-purity",
            "Phi1 germ has no constant part", hom.const, ctx.zero())
    jv = hom.valid_exponent + 3
    b.check("jacquet-B-homog-consistency",
            "homog component matches direct Phi1 evaluation",
            hom.reconstruct(sess, jv), phi_on_ray(sess, f, pt, jv, "phi1"))
    # unitarity probe
    for idx in range(n_unitarity):
        f1 = random_cone_function(sess, rng, n_atoms=1, k=1)
        g1 = random_cone_function(sess, rng, n_atoms=1, k=1)
        try:
            lhs = phi_inner_product(sess, f1, g1)
            rhs = cone_integral(
                sess, ConeTestFunction(
                    sess, f1.ambient.mul_pointwise(g1.ambient.conjugate())))
            b.check(f"unitarity[{idx}]", "<Phi f, Phi g> = <f, g>",
                    lhs, rhs, inputs=_digest("unit", idx))
        except Exception as e:
            b.error(f"unitarity[{idx}]", "Pi(r) is a unitary involution", e)
    return b.records


def suite_theorem(sess: Session, n_functions=5, n_points=20,
                  n_t2=10) -> list[Record]:
    """Lemma T2-to-Phi2 and the main theorem Pi(r) = Phi on S_c."""
    b = _Bench(sess, "theorem")
    ctx, p = sess.ctx, sess.p
    rng = _rng(sess, "theorem")
    pts = _chart_catalog(sess, n_points)
    # T2 identity
    for idx in range(n_t2):
        f = random_mixed(sess, rng, with_deep_atom=(idx % 3 == 0))
        pt = pts[idx % len(pts)]
        x = Fraction(rng.choice([1, p, sess.chi.u0])) * \
            Fraction(p) ** rng.choice([-1, 0, 1])
        try:
            lhs, rhs = t2_identity_check(sess, f, x, pt)
            b.check(f"t2-identity[{idx}]",
                    "double integral equals R-hat(f)(x w)", lhs, rhs,
                    inputs=_digest("t2", idx, x))
        except Exception as e:
            b.error(f"t2-identity[{idx}]", "T2 lemma", e)
    # involutions
    f = random_mixed(sess, rng)
    ff = pi_r1(sess, pi_r1(sess, f))
    ok = True
    for _ in range(6):
        y = Fraction(rng.randrange(1, p * p))
        if y % p == 0:
            y += 1
        v = tuple(Fraction(rng.randrange(p * p), p) for _ in range(sess.V2.dim))
        ok = ok and ctx.eq(ff.evaluate(y, v), f.evaluate(y, v))
    b.predicate("pi-r1-involution", "r_1 is an involution", ok)
    fc = random_cone_function(sess, rng)
    gc = pi_r2(sess, pi_r2(sess, fc))
    ok = all(ctx.eq(gc.evaluate(q_), fc.evaluate(q_))
             for q_ in cone_catalog(sess, count=4))
    b.predicate("pi-r2-involution", "r_2 is an involution", ok)
    # main theorem
    for fidx in range(n_functions):
        f = random_mixed(sess, rng, with_deep_atom=(fidx % 2 == 0))
        carrier = mixed_to_cone(sess, f)
        for pidx, pt in enumerate(pts):
            try:
                lhs = pi_r(sess, f, pt)
                rhs = phi_value(sess, carrier, pt, "phi")
                b.check(f"pi-r-equals-phi[{fidx},{pidx}]",
                        "Pi(r) restricted to S_c equals Phi", lhs, rhs,
                        inputs=_digest("main", fidx, pidx))
            except Exception as e:
                b.error(f"pi-r-equals-phi[{fidx},{pidx}]", "main theorem", e)
    return b.records


def _chart_catalog(sess, count):
    p = sess.p
    u0 = sess.chi.u0
    d2 = sess.V2.dim
    pts = []
    vs = [tuple(Fraction(0) for _ in range(d2))]
    vs += [tuple(Fraction(1 if i == j else 0) for j in range(d2))
           for i in range(d2)]
    vs += [tuple(Fraction(1) for _ in range(d2)),
           tuple(Fraction([1, 2, 0, 1][j % 4]) for j in range(d2)),
           tuple(Fraction([0, 1, 1, 2][j % 4]) for j in range(d2))]
    ys = [Fraction(1), Fraction(u0), Fraction(p), Fraction(1, p), Fraction(-1)]
    seen = set()
    for y in ys:
        for v in vs:
            pt = chart_point(sess, y, v)
            if pt.vec in seen:
                continue
            seen.add(pt.vec)
            pts.append(pt)
            if len(pts) >= count:
                return pts
    return pts


# ---------------------------------------------------------------------------
# the Phi-side inner product (germ-aware shell summation over the cone)


def _primitive_cells(sess):
    """Level-1 cone cells with exact isotropic representatives and their
    omega-volumes; cached per session."""
    cache = sess._caches.get("prim_cells")
    if cache is not None:
        return cache
    import itertools
    ctx, p = sess.ctx, sess.p
    d = sess.V1.dim
    frames_cells = []
    for c in itertools.product(range(p), repeat=d):
        if all(x == 0 for x in c):
            continue
        vec = tuple(Fraction(x) for x in c)
        if vp(sess.V1.q(vec), p) < 1:
            continue
        # Hensel-correct the partner of a unit hyperbolic coordinate so the
        # representative is exactly isotropic and stays in the cell
        pairs = [(b[1], b[2]) for b in sess.V1.blocks if b[0] == "hyp"]
        fixed = None
        for (i, j) in pairs:
            for pos, other in ((i, j), (j, i)):
                if vec[pos] % p != 0:
                    corr = list(vec)
                    corr[other] = vec[other] - sess.V1.q(vec) / vec[pos]
                    fixed = tuple(corr)
                    break
            if fixed:
                break
        if fixed is None:
            continue        # no unit hyperbolic coordinate (split-only case)
        assert sess.V1.q(fixed) == 0
        pt = point_with_frame(sess, fixed)
        ball = SchwartzFunction.from_table(ctx, d, {vec: 1}, 1)
        w_cell = delta(sess, sess.V1, 0, ball).value
        if w_cell.is_zero():
            continue
        frames_cells.append((pt, w_cell))
    sess._caches["prim_cells"] = frames_cells
    return frames_cells


def phi_inner_product(sess, f: ConeTestFunction, g: ConeTestFunction,
                      j_hi_extra: int = 0) -> Scalar:
    """<Phi f, Phi g> = int_C Phi f conj(Phi g) omega by shell summation:
    primitive cells x scales, with a closed germ tail and a certified
    vanishing outer region."""
    ctx, p, n = sess.ctx, sess.p, sess.config.n
    cells = _primitive_cells(sess)
    from .radon import ConeEvaluator
    F = ConeEvaluator(sess, f, "phi")
    G = ConeEvaluator(sess, g, "phi")
    ref = cells[0][0]
    gf = F.germ(ref)
    gg = G.germ(ref)
    J = max(gf.valid_exponent, gg.valid_exponent) + j_hi_extra
    total = ctx.zero()
    sgn = sess.chi.eps_p
    dm2 = 2 * n - 2                     # omega scaling exponent
    # middle shells downward until Phi f Phi g vanishes on two whole shells
    j = J
    zero_run = 0
    while zero_run < 2 and j > J - 30:
        j -= 1
        shell_total = ctx.zero()
        nonzero = False
        for (pt, w_cell) in cells:
            a = phi_on_ray(sess, f, pt, j)
            if a.is_zero():
                continue
            bb = phi_on_ray(sess, g, pt, j).conjugate()
            if bb.is_zero():
                continue
            nonzero = True
            shell_total = shell_total + a * bb * \
                (w_cell * Fraction(p) ** (-j * dm2))
        total = total + shell_total
        zero_run = 0 if nonzero else zero_run + 1
    # germ tail over shells j >= J: per cell, Phi = c + h with the exact
    # homogeneity law, so the scale sums are geometric
    for (pt, w_cell) in cells:
        hf = (phi_on_ray(sess, f, pt, J) - gf.const) * _inv_scale(sess, J)
        hg = (phi_on_ray(sess, g, pt, J) - gg.const) * _inv_scale(sess, J)
        cf, cg = gf.const, gg.const.conjugate()
        hgc = hg.conjugate()
        # sum_{j >= J} p^{-j dm2} [cf + hf s(j)][cg- + hg- s(j)], s(j) = sgn^j p^{j(n-2)}
        r0 = _geo(ctx, Fraction(1, p ** dm2), J)
        r1 = _geo_signed(ctx, sgn, Fraction(p) ** (n - 2 - dm2), J, p)
        r2 = _geo(ctx, Fraction(p) ** (2 * (n - 2) - dm2), J)
        piece = cf * cg * r0 + (cf * hgc + hf * cg) * r1 + hf * hgc * r2
        total = total + w_cell * piece
    return total


def _inv_scale(sess, j):
    """1 / (chi_K(p^j) p^{j(n-2)})."""
    n, p = sess.config.n, sess.p
    sgn = sess.chi.eps_p ** (j % 2)
    return Fraction(sgn) * Fraction(p) ** (-j * (n - 2))


def _geo(ctx, ratio: Fraction, start: int) -> Scalar:
    """sum_{j >= start} ratio^j for |ratio| < 1."""
    return ctx.rat(ratio ** start / (1 - ratio))


def _geo_signed(ctx, sgn: int, ratio: Fraction, start: int, p: int) -> Scalar:
    r = Fraction(sgn) * ratio
    return ctx.rat(r ** start / (1 - r))


# ---------------------------------------------------------------------------
# orchestration


def suite_fault(sess: Session) -> list[Record]:
    """Corrupt each constant in a fresh session; a targeted identity must
    then fail (guards against vacuous passes)."""
    b = _Bench(sess, "fault")
    from .session import Session as S, SessionConfig as SC

    def fresh():
        return S(SC(p=sess.p, n=sess.config.n, disc=sess.config.disc,
                    backend=sess.config.backend, tol=sess.config.tol,
                    depth=sess.config.depth, seed=sess.config.seed))

    # gamma: the delta tail and c_{psi,q} shift, breaking the asymptotics
    s = fresh()
    s.inject_fault("gamma")
    rng = _rng(s, "fault-gamma")
    f = SchwartzFunction.indicator_ball(s.ctx, 4, 0)
    try:
        d0, coeff, _ = delta_asymptotics(s, s.V2, f)
        broke = not s.ctx.eq(coeff, c_psi_q(fresh()))
    except Exception:
        broke = True
    b.predicate("fault-gamma", "corrupting gamma breaks a suite", broke)
    # c_psi_q: the radon profile asymptote cross-check must fail
    s = fresh()
    s.inject_fault("c_psi_q")
    f = random_cone_function(s, _rng(s, "fault-cq"), n_atoms=1, k=1)
    pt = cone_catalog(s, count=2)[1]
    try:
        prof = radon_profile(s, f, pt)
        mono = [m_ for m_ in prof.inner if m_.s > 0]
        got = mono[0].coef if mono else s.ctx.zero()
        want = c_psi_q(s) * r1_moment(s, f, pt)
        broke = not s.ctx.eq(got, want)
        if (want - got).is_zero() and want.is_zero():
            broke = False   # degenerate probe; try the asymptotics instead
    except Exception:
        broke = True
    if not broke:
        try:
            fb = SchwartzFunction.indicator_ball(s.ctx, 4, 0)
            _, coeff, _ = delta_asymptotics(s, s.V2, fb)
            broke = not s.ctx.eq(coeff, c_psi_q(s))
        except Exception:
            broke = True
    b.predicate("fault-c-psi-q", "corrupting c_{psi,q} breaks a suite", broke)
    # measure: F o F = reflect fails under a rescaled self-dual measure
    s = fresh()
    s.inject_fault("measure")
    g = SchwartzFunction.indicator_ball(s.ctx, 4, 0)
    ff = fourier(fourier(g, s.V2), s.V2)
    z = tuple(Fraction(0) for _ in range(4))
    broke = not s.ctx.eq(ff.evaluate(z), g.evaluate(z))
    b.predicate("fault-measure", "corrupting the measure breaks a suite", broke)
    return b.records


SUITE_RUNNERS = {
    "fourier": suite_fourier,
    "weil": suite_weil,
    "levelset": suite_levelset,
    "radon": suite_radon,
    "phi": suite_phi,
    "theorem": suite_theorem,
    "fault": suite_fault,
}


def run_suite(name: str, sess: Session, quick: bool = False):
    """Run one named suite (or 'all'); returns (records, seconds-by-suite)."""
    names = list(SUITE_RUNNERS) if name == "all" else [name]
    for nm in names:
        if nm not in SUITE_RUNNERS:
            raise ValueError(f"unknown suite {nm!r}; choose from "
                             f"{sorted(SUITE_RUNNERS)} or 'all'")
    records = []
    seconds = {}
    for nm in names:
        t0 = time.perf_counter()
        kw = {}
        if quick:
            kw = {
                "fourier": {"n_functions": 6},
                "weil": {"n_probes": 3},
                "levelset": {"n_fubini": 2, "n_asym": 2, "n_hs": 1},
                "radon": {"n_points": 3, "n_isoms": 2},
                "phi": {"n_points": 2, "n_unitarity": 2},
                "theorem": {"n_functions": 2, "n_points": 6, "n_t2": 3},
                "fault": {},
            }[nm]
        records.extend(SUITE_RUNNERS[nm](sess, **kw))
        seconds[nm] = time.perf_counter() - t0
    return records, seconds
