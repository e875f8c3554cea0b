"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the lines alone; under pytest
they are printed in the terminal summary.
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus
from workbench import checker
from workbench.algebra import enumerate_basis
from workbench.cli import run_command, serialize_report
from workbench.compat import (compat_check, form_nondeg_check, key_identity_check, nondeg_check,
                              poisson_round_trip, symplectic_round_trip, tangent_complex_M)
from workbench.graded import Generator
from workbench.mc import TruncatedMCProblem, lift_step, obstruction
from workbench.polyvectors import mc_defect, pol_basis, schouten
from workbench.samples import random_pair
from workbench.stacky import (LieSpecError, _kernel, chevalley_eilenberg, degree_bound_holds,
                              shifted_poisson_bg)

HERE = Path(__file__).parent
DOCS = HERE / "documents"
GOLDEN = HERE / "golden"
RESULTS = {}

CANONICAL = [
    ("cotangent", "mc-check"),
    ("cotangent_minus1", "symplectic-to-poisson"),
    ("plane", "compat-check"),
    ("obstruction", "obstruction"),
    ("sl2", "casimir"),
    ("sl2_line", "ce-build"),
]


def record(k, title, ok, detail=""):
    RESULTS[k] = (ok, title, detail)
    return ok


def sign(k):
    return -1 if k % 2 else 1


# ---------------------------------------------------------------------------
# 1

def _random_homogeneous(ring, rng, cache, K=3):
    w = rng.randint(0, 3)
    key = (ring.shift, w)
    if key not in cache:
        cache[key] = enumerate_basis(ring, "pv", w, None, K)
    B = cache[key]
    d = ring.mono_info(rng.choice(B))[2]
    same = [m for m in B if ring.mono_info(m)[2] == d]
    e = ring.zero()
    for m in rng.sample(same, min(3, len(same))):
        e = e + ring.monomial_element(m, rng.choice([-2, -1, 1, 2, 3]))
    return e


def criterion_1(samples=200):
    spec = corpus.mixed4(K=3)
    rng = random.Random(2024)
    cache, failures = {}, []
    for i in range(samples):
        n = (-1, 0, 1, 2)[i % 4]
        r = spec.ring(n)
        a, b, c = (_random_homogeneous(r, rng, cache) for _ in range(3))
        pa, pb = a.parity(), b.parity()
        sa, sb = (pa + n + 1) % 2, (pb + n + 1) % 2
        checks = {
            "commutativity": a * b == (b * a).scale(sign(pa * pb)),
            "oracle": schouten(a, b) == checker.oracle_bracket(a, b),
            "antisymmetry": schouten(a, b) == -schouten(b, a).scale(sign(sa * sb)),
            "biderivation": schouten(a, b * c) == schouten(a, b) * c + (b * schouten(a, c)).scale(sign(sa * pb)),
            "jacobi": schouten(a, schouten(b, c)) == schouten(schouten(a, b), c)
            + schouten(b, schouten(a, c)).scale(sign(sa * sb)),
        }
        failures += [(i, k) for k, v in checks.items() if not v]
    return record(1, "bracket signs and oracle agreement", not failures,
                  f"{samples} samples, failures {failures[:3]}")


# ---------------------------------------------------------------------------
# 2

def criterion_2(samples=100, W=5):
    specs = [
        (corpus.spec_from([Generator("x"), Generator("y"), Generator("u", 1, 0, 2)], {"u": "x*y"}), (-1, 0, 1)),
        (corpus.spec_from([Generator("x"), Generator("xi", 1)], {"xi": "x"}), (-1, 0, 1)),
        (corpus.mixed4(K=2), (-1, 0, 1)),
    ]
    done, seed, failures, non_mc = 0, 0, [], 0
    while done < samples:
        spec, shifts = specs[seed % len(specs)]
        n = shifts[(seed // len(specs)) % len(shifts)]
        omega, pi = random_pair(spec, n, W, seed)
        seed += 1
        if not omega or not pi:
            continue
        non_mc += bool(mc_defect(spec, pi, W))
        reps = key_identity_check(spec, omega, pi, W)
        if not all(r.exact for r in reps):
            failures.append(seed - 1)
        done += 1
    return record(2, "both contraction identities", not failures and non_mc > 0,
                  f"{done} pairs ({non_mc} not MC), failures {failures[:5]}")


# ---------------------------------------------------------------------------
# 3

def _obstruction_case(spec, n, pi, level, W):
    prob = TruncatedMCProblem(spec, n, pi, level, W)
    ob = obstruction(prob)
    res = lift_step(prob)
    rhs = {m: -c for m, c in ob.representative.terms.items()}
    bound = max([2] + [abs(c) for c in rhs.values()])
    lat = checker.lattice_solvable(ob.images, rhs, bound=int(bound) + 1, denominator=2) is not None
    lifted_ok = (not res.ok) or checker.verify_mc(spec, res.pi, level + 1)
    return ob.vanishes, res.ok, lat, lifted_ok, bool(ob.representative)


def cotangent_family(count=20, seed=7):
    """Seeded lifts over Q[x, xi] across the four shifts, levels 3 and 4."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = (-1, 0, 1, 2)[i % 4]
        spec = corpus.cotangent(n, K=2)
        r = spec.ring(n)
        pi = r.zero()
        for m in pol_basis(spec, r, 2, n + 2, max_coeff_weight=2):
            pi = pi + r.monomial_element(m, rng.randint(-2, 2))
        level = 3
        if n == -1 and i % 8 == 0:
            for m in pol_basis(spec, r, 3, n + 2, max_coeff_weight=2):
                pi = pi + r.monomial_element(m, rng.randint(-2, 2))
            level = 4
        out.append((spec, n, pi, level, level + 1))
    return out


def rich_family(count=24, seed=11):
    """Q[x, y, z, u] with |u| = 1 and delta u = g: zero, exact and non-exact classes all occur."""
    rng = random.Random(seed)
    out = []
    choices = [None, "x", "x + y", "y + z", "x - z"]
    for i in range(count):
        g = choices[i % len(choices)]
        gens = [Generator("x"), Generator("y"), Generator("z"), Generator("u", 1, 0, 1)]
        spec = corpus.spec_from(gens, {} if g is None else {"u": g})
        r = spec.ring(0)
        dh = spec.delta_hat(r)
        B2 = pol_basis(spec, r, 2, 2, max_coeff_weight=1)
        K2 = _kernel(r, B2, [schouten(dh, r.monomial_element(m)).weight_part(2) for m in B2])
        pi = r.zero()
        for k in rng.sample(K2, min(3, len(K2))):
            pi = pi + k.scale(rng.choice([-1, 1, 2]))
        out.append((spec, 0, pi, 3, 4))
    return out


def criterion_3():
    rows = []
    for fam in (cotangent_family(), rich_family()):
        for spec, n, pi, level, W in fam:
            rows.append(_obstruction_case(spec, n, pi, level, W))
    agree = all(v == ok == lat and lifted for v, ok, lat, lifted, _ in rows)
    kinds = {(v, nz) for v, _, _, _, nz in rows}
    return record(3, "lift succeeds iff obstruction vanishes", agree and len(rows) >= 20,
                  f"{len(rows)} instances, (vanishes, nonzero) kinds seen {sorted(kinds)}")


# ---------------------------------------------------------------------------
# 4

def criterion_4(W=4):
    done, failures = 0, []
    for label, spec, omega, pi in corpus.compatible_corpus(W):
        res = compat_check(spec, omega, pi, W)
        if not res.compatible or not checker.verify_compat(spec, omega, pi, res.certificate.h, W):
            failures.append((label, "compat"))
            continue
        if not nondeg_check(spec, pi).nondegenerate:
            continue
        cert = form_nondeg_check(spec, omega)
        if not (cert.nondegenerate and checker.verify_inverse(cert.matrix, cert.inverse)):
            failures.append((label, "form"))
        done += 1
    return record(4, "nondegeneracy transfers to omega", done > 0 and not failures,
                  f"{done} pairs, failures {failures}")


# ---------------------------------------------------------------------------
# 5

def round_trip_cases():
    cases = []
    for n in (-1, 0, 1, 2):
        s = corpus.cotangent(n)
        om, pi = corpus.canonical_pair(s, n)
        cases.append((f"cotangent n={n}", s, om, pi))
    s = corpus.plane()
    cases.append(("plane", s, *corpus.canonical_pair(s, 0, "x", "y")))
    return cases


def criterion_5(W=4):
    failures, count = [], 0
    for label, spec, omega, pi in round_trip_cases():
        rt = poisson_round_trip(spec, pi, W)
        h = rt.gauge.homotopy
        if not (rt.ok and checker.verify_gauge(spec, h.path, h.lam, rt.start, rt.back, W)):
            failures.append((label, "poisson"))
        rt = symplectic_round_trip(spec, omega, W)
        if not (rt.ok and checker.verify_form_gauge(spec, rt.start, rt.back, rt.gauge.beta, W)):
            failures.append((label, "symplectic"))
        count += 1
    return record(5, "conversion round trips up to verified gauge", not failures,
                  f"{count} examples, failures {failures}")


# ---------------------------------------------------------------------------
# 6

def _ad_invariant(g, T):
    m = g.dim
    full = lambda a, b: T.get((min(a, b), max(a, b)))
    for i in range(m):
        for a in range(m):
            for b in range(m):
                s = Fraction(0)
                for p in range(m):
                    t = full(p, b)
                    if t is not None:
                        s += g.c[i][p][a] * t.terms.get(t.ring.unit_mono(), 0)
                    t = full(a, p)
                    if t is not None:
                        s += g.c[i][p][b] * t.terms.get(t.ring.unit_mono(), 0)
                if s:
                    return False
    return True


def criterion_6():
    notes, ok = [], True
    r = shifted_poisson_bg(corpus.POINT, corpus.sl2(), 2)
    ok &= r.dimension == 1 and r.mc_dimension == 1 and bool(r.agree) and all(_ad_invariant(corpus.sl2(), T)
                                                                               for T in r.tensors)
    notes.append(f"sl2 dim {r.dimension}/{r.mc_dimension}")
    for m in (1, 2, 3):
        g = corpus.abelian(m)
        ra = shifted_poisson_bg(corpus.POINT, g, 2)
        ok &= ra.dimension == m * (m + 1) // 2 and ra.mc_dimension == ra.dimension and bool(ra.agree)
        notes.append(f"abelian {m}: {ra.dimension}")
    for g in (corpus.sl2(), corpus.abelian(2)):
        ok &= degree_bound_holds(chevalley_eilenberg(corpus.POINT, g), 2, 4)
    return record(6, "quadratic Casimirs as 2-shifted Poisson structures", ok, ", ".join(notes))


# ---------------------------------------------------------------------------
# 7

def criterion_7():
    failures, count = [], 0
    for label, spec, omega, pi in corpus.compatible_corpus():
        if not nondeg_check(spec, pi).nondegenerate:
            continue
        for p in (2, 3, 4):
            rep = tangent_complex_M(spec, omega.form_part(2), pi.weight_part(2), p)
            if rep.acyclic is not True or not rep.square_zero:
                failures.append((label, p))
        count += 1
    return record(7, "cone of the projection from M is acyclic per piece", count > 0 and not failures,
                  f"{count} pairs x p in 2..4, failures {failures}")


# ---------------------------------------------------------------------------
# 8

def _ce_ok(A):
    ring = A.ring(0)
    pt, dl = A.differential(ring, "partial"), A.differential(ring, "delta")
    for g in A.generators:
        x = ring.x(g.name)
        if pt(pt(x)) or pt(dl(x)) + dl(pt(x)):
            return False
    return True


def criterion_8():
    ok = True
    for Y, g in (corpus.sl2_on_line(), corpus.affine_on_line()):
        ok &= _ce_ok(chevalley_eilenberg(Y, g))
    bad = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -3}, ("e", "f"): {"h": 1}}
    located = None
    try:
        from workbench.stacky import LieAlgebraSpec
        LieAlgebraSpec.from_brackets(["e", "f", "h"], bad)
    except LieSpecError as e:
        located = e.location
    ok &= located is not None
    return record(8, "CE differentials square to zero; bad Jacobi rejected", ok, f"diagnostic at {located}")


# ---------------------------------------------------------------------------
# 9

def strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


def canonical_bytes(name, verb):
    text = (DOCS / f"{name}.wb").read_text()
    report, _ = run_command(text, verb)
    return serialize_report(strip_timing(report)).encode()


def criterion_9():
    mismatches = []
    for name, verb in CANONICAL:
        first, second = canonical_bytes(name, verb), canonical_bytes(name, verb)
        golden = (GOLDEN / f"{name}.json").read_bytes()
        if not (first == second == golden):
            mismatches.append(name)
    return record(9, "golden reports are byte-identical", not mismatches,
                  f"{len(CANONICAL)} documents, mismatches {mismatches}")


# ---------------------------------------------------------------------------

CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9]


@pytest.mark.parametrize("k", range(1, 10))
def test_criterion(k):
    assert CRITERIA[k - 1](), RESULTS[k][2]


def summary_lines():
    out = []
    for k in sorted(RESULTS):
        ok, title, detail = RESULTS[k]
        out.append(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {title} ({detail})")
    return out


if __name__ == "__main__":
    for crit in CRITERIA:
        try:
            crit()
        except Exception as e:   # report and keep going
            k = CRITERIA.index(crit) + 1
            record(k, crit.__name__, False, f"{type(e).__name__}: {e}")
    print("\n".join(summary_lines()))
