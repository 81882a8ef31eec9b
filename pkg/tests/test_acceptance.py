"""Acceptance criteria, one test per criterion, at the stated scales.

Desk scale: p in {3, 5}, n = 3 (dim V2 = 4, dim V1 = 6), sparse random
tables with support/level exponents <= 2 and values in {+-1, +-2}.  Every
check is exact (EXACT backend) unless the criterion itself allows a float
tolerance.  One pass/fail line is printed per criterion.
"""

import time
from fractions import Fraction

import pytest

from conefourier.session import Session, SessionConfig
from conefourier.suites import (
    run_suite, suite_fault, suite_fourier, suite_levelset, suite_phi,
    suite_radon, suite_theorem, suite_weil, _rng, _pair_h, random_schwartz,
    random_cone_function, random_mixed, phi_inner_product,
)
from conefourier.levelsets import c_psi_q, delta, delta_asymptotics
from conefourier.quadratic import fourier
from conefourier.schwartz import SchwartzFunction
from conefourier.cone import ConeTestFunction, cone_integral
from conefourier.scalars import scalar_eq


def _sess(p, disc, **kw):
    return Session(SessionConfig(p=p, disc=disc, **kw))


def _gate(name, records, t0, budget_s):
    bad = [r for r in records if r.status != "pass"]
    took = time.time() - t0
    status = "PASS" if not bad and took <= budget_s else "FAIL"
    print(f"{status} {name}: {len(records) - len(bad)}/{len(records)} checks, "
          f"{took:.1f}s (budget {budget_s}s)")
    for r in bad[:6]:
        print(f"      {r.status}: {r.identity} [{r.anchor}] delta={r.delta}")
    assert not bad, f"{name}: {len(bad)} failing checks"
    assert took <= budget_s, f"{name}: exceeded time budget"


def test_criterion_1_fourier_calculus():
    """F o F(f)(v) = f(-v) and Plancherel, 50 random functions per (p, pairing)."""
    t0 = time.time()
    records = []
    for p in (3, 5):
        for disc in ("split", "unram"):
            records += suite_fourier(_sess(p, disc), n_functions=50)
    _gate("criterion-1 (Fourier calculus)", records, t0, 60)


def test_criterion_2_weil_identity():
    """Weil ratio stable over >= 5 probes per kappa; gamma^4 = 1; split gamma
    = 1; psi_t scaling for t in {p, u, pu}."""
    t0 = time.time()
    records = []
    for p in (3, 5):
        records += suite_weil(_sess(p, "split"), n_probes=5)
    _gate("criterion-2 (Weil identity)", records, t0, 60)


def test_criterion_3_gelfand_leray_fubini():
    """Grid-plus-tail sum of delta(t)(f) reproduces the integral, 10 random f
    on the split and unramified dim-4 spaces."""
    t0 = time.time()
    records = []
    for p in (3, 5):
        records += suite_levelset(_sess(p, "unram"), n_fubini=10,
                                  n_asym=0, n_hs=0)
    _gate("criterion-3 (Gelfand-Leray Fubini)", records, t0, 300)


def test_criterion_4_delta_asymptotics():
    """delta difference equation with independently computed c_{psi,q}, 5
    random f per kappa; plus the H_s pairing identity on 3 random f."""
    t0 = time.time()
    records = []
    for disc in ("split", "unram", "ram-p", "ram-up"):
        records += suite_levelset(_sess(3, disc), n_fubini=0, n_asym=5,
                                  n_hs=3 if disc == "unram" else 0)
        records += suite_levelset(_sess(5, disc), n_fubini=0, n_asym=5,
                                  n_hs=0)
    _gate("criterion-4 (delta asymptotics + H_s)", records, t0, 600)


def test_criterion_5_6_radon_and_hat():
    """Radon homogeneity, total mass, equivariance over catalog points;
    R-hat germ [R-hat(f)]_0 = I_C(f) and the decay statistic."""
    t0 = time.time()
    records = []
    records += suite_radon(_sess(3, "unram"), n_points=5, n_isoms=3)
    records += suite_radon(_sess(5, "split"), n_points=5, n_isoms=3)
    _gate("criterion-5/6 (Radon + normalized Radon)", records, t0, 1500)


def test_criterion_7_phi_structure():
    """Phi = Phi1 + Phi2 pointwise; Phi1 homogeneity; Phi2 germ; Phi and
    jacquet-B equivariance; all exact."""
    t0 = time.time()
    records = []
    records += [r for r in suite_phi(_sess(3, "split"), n_points=4,
                                     n_unitarity=0)]
    records += [r for r in suite_phi(_sess(3, "unram"), n_points=4,
                                     n_unitarity=0)]
    records += [r for r in suite_phi(_sess(5, "split"), n_points=3,
                                     n_unitarity=0)]
    _gate("criterion-7 (Phi structure)", records, t0, 900)


def test_criterion_8_t2_lemma():
    """The T2 double integral equals R-hat(f)(x w) on >= 10 random triples."""
    t0 = time.time()
    records = []
    for disc in ("split", "unram"):
        recs = suite_theorem(_sess(3, disc), n_functions=0, n_points=6,
                             n_t2=5)
        records += [r for r in recs if r.identity.startswith("t2")]
    _gate("criterion-8 (Lemma T2 -> Phi2)", records, t0, 900)


def test_criterion_9_main_theorem():
    """Pi(r)(f)(w) = Phi(f)(w) for >= 5 tensor functions x >= 20 chart
    points, per (p, kappa) in {3,5} x {split, unram}; exact."""
    all_bad = []
    total = 0
    for p in (3, 5):
        for disc in ("split", "unram"):
            t0 = time.time()
            recs = suite_theorem(_sess(p, disc), n_functions=5, n_points=20,
                                 n_t2=0)
            recs = [r for r in recs if r.identity.startswith("pi-r-equals-phi")]
            total += len(recs)
            bad = [r for r in recs if r.status != "pass"]
            took = time.time() - t0
            print(f"{'PASS' if not bad else 'FAIL'} criterion-9 "
                  f"(Pi(r) = Phi) at (p={p}, {disc}): "
                  f"{len(recs) - len(bad)}/{len(recs)} points, {took:.0f}s "
                  f"(budget 1800s)")
            assert took <= 1800, f"criterion-9 (p={p},{disc}) over budget"
            all_bad += bad
    assert total >= 4 * 100
    assert not all_bad, f"criterion-9: {len(all_bad)} failing points"


def test_criterion_10_unitarity_probe():
    """<Phi f, Phi g> = <f, g> for 10 random pairs (exact here, which is
    within the allowed float 1e-7)."""
    t0 = time.time()
    sess = _sess(3, "unram")
    rng = _rng(sess, "acceptance-unitarity")
    bad = 0
    for idx in range(10):
        f = random_cone_function(sess, rng, n_atoms=1, k=1)
        g = random_cone_function(sess, rng, n_atoms=1, k=1)
        lhs = phi_inner_product(sess, f, g)
        rhs = cone_integral(sess, ConeTestFunction(
            sess, f.ambient.mul_pointwise(g.ambient.conjugate())))
        if not scalar_eq(lhs, rhs):
            bad += 1
    took = time.time() - t0
    print(f"{'PASS' if not bad else 'FAIL'} criterion-10 (unitarity probe): "
          f"{10 - bad}/10 pairs, {took:.0f}s (budget 900s)")
    assert bad == 0 and took <= 900


def test_criterion_11_fault_injection():
    """Corrupting any single constant (gamma, c_{psi,q}, measure) makes at
    least one suite fail."""
    t0 = time.time()
    records = suite_fault(_sess(3, "unram"))
    _gate("criterion-11 (fault injection)", records, t0, 300)
