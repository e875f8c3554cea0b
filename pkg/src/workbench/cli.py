"""Command-line driver: ``workbench <verb> --input FILE``.

Every verb resolves its inputs from the document, runs the computation,
re-verifies each certificate with the independent checker and prints one
report.  Exit codes: 0 success, 1 negative mathematical answer, 2 input
error, 3 basis cap exceeded, 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional

from . import checker
from .algebra import GradedAlgebraSpec, SpecError
from .compat import (_h_basis, _solve_window, compat_check, form_nondeg_check, key_identity_check, mu,
                     nondeg_check, poisson_round_trip, poisson_to_symplectic, symplectic_round_trip,
                     symplectic_to_poisson, tangent_complex_M, PieceComplex)
from .document import (DocumentError, WorkbenchDocument, format_coeff, format_element, format_monomial,
                       parse_document, parse_expression)
from .graded import Element, GradedError, Ring
from .linalg import BasisCapExceeded, basis_cap
from .mc import PreconditionError, TruncatedMCProblem, gauge_equivalent, graded_piece_complex, lift_to, obstruction
from .polyvectors import defect_by_weight, mc_defect, schouten, sigma
from .samples import random_pair
from .stacky import LieAlgebraSpec, chevalley_eilenberg, shifted_poisson_bg

SCHEMA_VERSION = 1
VERBS = ("bracket", "mc-check", "obstruction", "lift", "gauge", "mu", "sigma", "key-identity", "compat-check",
         "nondeg", "poisson-to-symplectic", "symplectic-to-poisson", "ce-build", "casimir", "cohomology")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAP, EXIT_VERIFY = 0, 1, 2, 3, 4


class InputError(GradedError):
    def __init__(self, msg: str, code: str = "missing-input"):
        super().__init__(msg)
        self.code = code


class VerificationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# context

class Context:
    """Resolved document: algebra, optional Lie data and its CE model, problem ring, parameters."""

    def __init__(self, text: str, truncation: Optional[int] = None, max_poly_weight: Optional[int] = None,
                 seed: int = 0):
        self.seed = seed
        self.spec: Optional[GradedAlgebraSpec] = None
        self.lie: Optional[LieAlgebraSpec] = None
        self.ce: Optional[GradedAlgebraSpec] = None
        self._K = max_poly_weight
        self.doc: WorkbenchDocument = parse_document(text, self._ring_hook)
        self.W = truncation if truncation is not None else self.doc.truncation
        self.n = self.doc.shift

    def _ring_hook(self, doc: WorkbenchDocument) -> Ring:
        K = self._K if self._K is not None else doc.max_poly_weight
        self.spec = GradedAlgebraSpec(doc.generators, dict(doc.delta), dict(doc.partial), K)
        if doc.lie is not None:
            ring0 = self.spec.ring(0)
            action: Dict[int, Dict[str, Element]] = {}
            for (e, gname), src in doc.lie.action.items():
                action.setdefault(doc.lie.basis.index(e), {})[gname] = parse_expression(ring0, src)
            self.lie = LieAlgebraSpec.from_brackets(doc.lie.basis, doc.lie.brackets, action)
            self.lie.validate(self.spec)
            self.ce = chevalley_eilenberg(self.spec, self.lie)
        if doc.model == "ce":
            if self.ce is None:
                raise InputError("model ce needs a lie section", "spec-invalid")
            return self.ce.ring(doc.shift)
        return self.spec.ring(doc.shift)

    @property
    def K(self) -> int:
        return self.spec.max_poly_weight

    @property
    def model(self) -> GradedAlgebraSpec:
        return self.ce if self.doc.model == "ce" else self.spec

    @property
    def ring(self) -> Ring:
        return self.model.ring(self.n)

    def has(self, key: str) -> bool:
        return key in self.doc.args or key in self.doc.elements

    def elem(self, key: str) -> Element:
        env = {k: v.element for k, v in self.doc.elements.items()}
        if key in self.doc.args:
            return parse_expression(self.ring, self.doc.args[key], env)
        if key in env:
            return env[key]
        raise InputError(f"verb {self.doc.verb or ''} needs input {key!r}".replace("  ", " "))

    def int_arg(self, key: str, default: Optional[int] = None) -> int:
        if key not in self.doc.args:
            if default is None:
                raise InputError(f"missing integer input {key!r}")
            return default
        try:
            return int(self.doc.args[key])
        except ValueError:
            raise InputError(f"input {key!r} must be an integer", "parse-error") from None

    def flag(self, key: str, default: bool) -> bool:
        v = self.doc.args.get(key)
        return default if v is None else v.strip().lower() in ("yes", "true", "1")


# ---------------------------------------------------------------------------
# serialization helpers

def fmt(e: Optional[Element]) -> Optional[str]:
    return None if e is None else format_element(e)


def fmt_functional(ring: Ring, y: Dict) -> List[List[str]]:
    out = []
    for k, c in y.items():
        tag = ""
        if isinstance(k, tuple) and len(k) == 2 and isinstance(k[1], tuple):
            tag, k = f"{k[0]}:", k[1]
        mono = format_monomial(ring, k) or "1"
        out.append([tag + mono, format_coeff(Fraction(c))])
    return sorted(out)


def fmt_matrix(M) -> Optional[List[List[str]]]:
    return None if M is None else [[format_element(e) for e in row] for row in M]


def _require(checks: Dict[str, bool]) -> Dict[str, bool]:
    bad = [k for k, v in checks.items() if not v]
    if bad:
        raise VerificationError("certificate failed independent verification: " + ", ".join(bad))
    return checks


# ---------------------------------------------------------------------------
# verbs: each returns (inputs, result, negative, checks)

def v_bracket(ctx: Context):
    a, b = ctx.elem("a"), ctx.elem("b")
    out = schouten(a, b)
    checks = {"bracket": out == checker.oracle_bracket(a, b)}
    return {"a": fmt(a), "b": fmt(b)}, {"bracket": fmt(out)}, False, checks


def v_mc_check(ctx: Context):
    pi = ctx.elem("pi")
    k = mc_defect(ctx.model, pi, ctx.W)
    checks = {"kappa": k == checker.kappa(ctx.model, pi, ctx.W)}
    res = {"kappa": fmt(k), "byWeight": {str(w): fmt(e) for w, e in defect_by_weight(k).items()},
           "maurerCartan": not k}
    return {"pi": fmt(pi)}, res, bool(k), checks


def v_obstruction(ctx: Context):
    pi = ctx.elem("pi")
    level = ctx.int_arg("level", 3)
    prob = TruncatedMCProblem(ctx.model, ctx.n, pi, level, ctx.W)
    ob = obstruction(prob)
    lift = pi.truncate(level)
    checks = {"representative": ob.representative == checker.kappa(ctx.model, lift, level + 1).weight_part(level)}
    res = {"level": level, "representative": fmt(ob.representative), "vanishes": ob.vanishes,
           "isCocycle": ob.is_cocycle, "basisSize": len(ob.basis)}
    if ob.vanishes:
        res["correction"] = fmt(ob.correction)
        checks["correction"] = checker.verify_obstruction_correction(ctx.model, pi, level, ob.correction)
    else:
        res["functional"] = fmt_functional(ctx.ring, ob.certificate)
        checks["functional"] = checker.verify_functional(ob.certificate, ob.images, ob.representative.terms)
    return {"pi": fmt(pi), "level": level}, res, not ob.vanishes, checks


def v_lift(ctx: Context):
    pi = ctx.elem("pi")
    level = ctx.int_arg("level", 3)
    r = lift_to(TruncatedMCProblem(ctx.model, ctx.n, pi, level, ctx.W))
    res = {"lifted": r.ok}
    checks = {}
    if r.ok:
        res["pi"] = fmt(r.pi)
        checks["maurerCartan"] = checker.verify_mc(ctx.model, r.pi, ctx.W)
    else:
        ob = r.obstruction
        res["blockedAt"] = ob.level
        res["obstruction"] = fmt(ob.representative)
        res["functional"] = fmt_functional(ctx.ring, ob.certificate)
        checks["functional"] = checker.verify_functional(ob.certificate, ob.images, ob.representative.terms)
    return {"pi": fmt(pi), "level": level}, res, not r.ok, checks


def _gauge_payload(g) -> Dict:
    res = {"found": g.found}
    if g.found:
        res["lambda"] = fmt(g.lam)
        res["path"] = [fmt(c) for c in g.homotopy.path]
    else:
        res["failingWeight"] = g.failing_weight
    return res


def _gauge_checks(ctx: Context, g, pi0: Element, pi1: Element) -> Dict[str, bool]:
    if not g.found:
        return {}
    return {"gauge": checker.verify_gauge(ctx.model, g.homotopy.path, g.homotopy.lam, pi0, pi1, ctx.W)}


def v_gauge(ctx: Context):
    pi, pi2 = ctx.elem("pi"), ctx.elem("pi2")
    g = gauge_equivalent(ctx.model, ctx.n, pi, pi2, ctx.W)
    return ({"pi": fmt(pi), "pi2": fmt(pi2)}, _gauge_payload(g), not g.found,
            _gauge_checks(ctx, g, pi.truncate(ctx.W), pi2.truncate(ctx.W)))


def v_mu(ctx: Context):
    omega, pi = ctx.elem("omega"), ctx.elem("pi")
    out = mu(omega, pi, ctx.W)
    return ({"omega": fmt(omega), "pi": fmt(pi)}, {"mu": fmt(out)}, False,
            {"mu": out == checker.contract(omega, pi, ctx.W)})


def v_sigma(ctx: Context):
    pi = ctx.elem("pi")
    out = sigma(pi, ctx.W).direction
    return {"pi": fmt(pi)}, {"sigma": fmt(out)}, False, {"sigma": out == checker.euler(checker.truncate(pi, ctx.W))}


def v_key_identity(ctx: Context):
    if ctx.has("omega") and ctx.has("pi"):
        omega, pi = ctx.elem("omega"), ctx.elem("pi")
        source = "document"
    else:
        omega, pi = random_pair(ctx.model, ctx.n, ctx.W, ctx.seed)
        source = f"seed {ctx.seed}"
    reps = key_identity_check(ctx.model, omega, pi, ctx.W)
    res = {"source": source}
    for r in reps:
        res[r.name] = {"exact": r.exact, "lhs": fmt(r.lhs)}
    return {"omega": fmt(omega), "pi": fmt(pi)}, res, not all(r.exact for r in reps), {}


def v_compat_check(ctx: Context):
    omega, pi = ctx.elem("omega"), ctx.elem("pi")
    r = compat_check(ctx.model, omega, pi, ctx.W)
    res = {"compatible": r.compatible, "residual": fmt(r.residual)}
    checks = {}
    if r.compatible:
        res["h"] = fmt(r.certificate.h)
        checks["compatibility"] = checker.verify_compat(ctx.model, omega, pi, r.certificate.h, ctx.W)
    else:
        ring = pi.ring
        K = _solve_window(ctx.model, r.residual, pi)
        basis = _h_basis(ctx.model, ring, ctx.n, ctx.W, K)
        dh = checker.delta_hat(ctx.model, ring) + pi
        cols = [checker.truncate(checker.oracle_bracket(dh, ring.monomial_element(m)), ctx.W).terms for m in basis]
        res["functional"] = fmt_functional(ring, r.functional)
        checks["functional"] = checker.verify_functional(r.functional, cols, r.residual.terms)
    return {"omega": fmt(omega), "pi": fmt(pi)}, res, not r.compatible, checks


def v_nondeg(ctx: Context):
    if ctx.has("pi"):
        x = ctx.elem("pi")
        cert = nondeg_check(ctx.model, x)
        inputs = {"pi": fmt(x)}
    else:
        x = ctx.elem("omega")
        cert = form_nondeg_check(ctx.model, x)
        inputs = {"omega": fmt(x)}
    res = {"status": cert.status, "method": cert.method, "matrix": fmt_matrix(cert.matrix),
           "inverse": fmt_matrix(cert.inverse)}
    if cert.pieces:
        res["pieces"] = {str(q): {str(d): v for d, v in sorted(h.items())} for q, h in sorted(cert.pieces.items())}
    checks = {}
    if cert.inverse is not None and cert.matrix:
        checks["inverse"] = checker.verify_inverse(cert.matrix, cert.inverse)
    return inputs, res, not cert.nondegenerate, checks


def v_poisson_to_symplectic(ctx: Context):
    pi = ctx.elem("pi")
    W = ctx.W
    if ctx.flag("round-trip", True):
        rt = poisson_round_trip(ctx.model, pi, W)
        fwd, bwd = rt.forward, rt.backward
    else:
        fwd, bwd, rt = poisson_to_symplectic(ctx.model, pi, W), None, None
    res = {"omega": fmt(fwd.omega), "h": fmt(fwd.certificate.h)}
    checks = {"compatibility": checker.verify_compat(ctx.model, fwd.omega, fwd.pi, fwd.certificate.h, W)}
    negative = False
    if rt is not None:
        res["roundTrip"] = {"pi": fmt(bwd.pi), "h": fmt(bwd.certificate.h), **_gauge_payload(rt.gauge)}
        checks["roundTripCompatibility"] = checker.verify_compat(ctx.model, bwd.omega, bwd.pi, bwd.certificate.h, W)
        checks.update(_gauge_checks(ctx, rt.gauge, rt.start, rt.back))
        negative = not rt.ok
    return {"pi": fmt(pi)}, res, negative, checks


def v_symplectic_to_poisson(ctx: Context):
    omega = ctx.elem("omega")
    W = ctx.W
    if ctx.flag("round-trip", True):
        rt = symplectic_round_trip(ctx.model, omega, W)
        fwd, bwd = rt.forward, rt.backward
    else:
        fwd, bwd, rt = symplectic_to_poisson(ctx.model, omega, W), None, None
    res = {"pi": fmt(fwd.pi), "h": fmt(fwd.certificate.h)}
    checks = {"compatibility": checker.verify_compat(ctx.model, fwd.omega, fwd.pi, fwd.certificate.h, W),
              "maurerCartan": checker.verify_mc(ctx.model, fwd.pi, W)}
    negative = False
    if rt is not None:
        res["roundTrip"] = {"omega": fmt(bwd.omega), "h": fmt(bwd.certificate.h), "found": rt.gauge.found,
                            "beta": fmt(rt.gauge.beta)}
        checks["roundTripCompatibility"] = checker.verify_compat(ctx.model, bwd.omega, bwd.pi, bwd.certificate.h, W)
        if rt.ok:
            checks["formGauge"] = checker.verify_form_gauge(ctx.model, rt.start, rt.back, rt.gauge.beta, W)
        negative = not rt.ok
    return {"omega": fmt(omega)}, res, negative, checks


def _need_lie(ctx: Context):
    if ctx.lie is None:
        raise InputError("this verb needs a lie section")


def v_ce_build(ctx: Context):
    _need_lie(ctx)
    A = ctx.ce
    ring = A.ring(0)
    pt, dl = A.differential(ring, "partial"), A.differential(ring, "delta")
    sq, mixed = True, True
    for g in A.generators:
        x = ring.x(g.name)
        sq = sq and not pt(pt(x))
        mixed = mixed and not (pt(dl(x)) + dl(pt(x)))
    res = {"generators": [{"name": g.name, "chain": g.chain, "cochain": g.cochain, "weight": g.weight}
                          for g in A.generators],
           "partial": {g.name: fmt(A.partial.get(g.name, ring.zero())) for g in A.generators},
           "delta": {g.name: fmt(A.delta[g.name]) for g in A.generators if g.name in A.delta},
           "cochainBound": A.cochain_bound, "partialSquaredZero": sq, "anticommute": mixed}
    return {"lie": ctx.lie.basis}, res, False, _require({"partialSquaredZero": sq, "anticommute": mixed})


def v_casimir(ctx: Context):
    _need_lie(ctx)
    r = shifted_poisson_bg(ctx.spec, ctx.lie, 2, 3)
    res = {"dimension": r.dimension, "basis": [fmt(b) for b in r.basis], "mcDimension": r.mc_dimension,
           "agree": r.agree}
    checks = {}
    if r.basis:
        ring = r.basis[0].ring
        dh = checker.delta_hat(ctx.ce, ring)
        checks["cocycle"] = all(not checker.oracle_bracket(dh, b) for b in r.basis)
    if r.agree is not None:
        checks["routesAgree"] = r.agree
    return {"lie": ctx.lie.basis}, res, False, checks


def v_cohomology(ctx: Context):
    p = ctx.int_arg("p", 2)
    kind = ctx.doc.args.get("complex", "gr").strip()
    if kind == "M":
        omega, pi = ctx.elem("omega"), ctx.elem("pi")
        rep = tangent_complex_M(ctx.model, omega.form_part(2), pi.weight_part(2), p)
        res = {"complex": "M", "p": p, "acyclic": rep.acyclic,
               "pieces": {str(q): {str(d): v for d, v in sorted(h.items())} for q, h in sorted(rep.pieces.items())}}
        return ({"omega": fmt(omega), "pi": fmt(pi), "p": p}, res, rep.acyclic is not True,
                _require({"squareZero": rep.square_zero}))
    if kind != "gr":
        raise InputError("complex must be gr or M", "parse-error")
    gp = graded_piece_complex(ctx.model, ctx.n, p, max_coeff_weight=ctx.K)
    pc = PieceComplex(gp.bases, gp.images)
    ranks = pc.ranks()
    mid = ctx.n + 2
    coh = len(gp.bases[mid]) - ranks.get(mid, 0) - ranks.get(mid - 1, 0)
    res = {"complex": "gr", "p": p, "dims": {str(d): v for d, v in sorted(gp.dims().items())},
           "ranks": {str(d): v for d, v in sorted(ranks.items())}, "cohomology": {str(mid): coh}}
    return {"p": p}, res, False, _require({"squareZero": gp.squares_to_zero(ctx.ring, ctx.model)})


HANDLERS = {
    "bracket": v_bracket, "mc-check": v_mc_check, "obstruction": v_obstruction, "lift": v_lift,
    "gauge": v_gauge, "mu": v_mu, "sigma": v_sigma, "key-identity": v_key_identity,
    "compat-check": v_compat_check, "nondeg": v_nondeg, "poisson-to-symplectic": v_poisson_to_symplectic,
    "symplectic-to-poisson": v_symplectic_to_poisson, "ce-build": v_ce_build, "casimir": v_casimir,
    "cohomology": v_cohomology,
}


# ---------------------------------------------------------------------------
# reports

def run_command(text: str, verb: str, truncation: Optional[int] = None, max_poly_weight: Optional[int] = None,
                seed: int = 0):
    """Run one verb on document text; returns (report dict, exit code)."""
    t0 = time.perf_counter()
    report = {"schemaVersion": SCHEMA_VERSION, "verb": verb}
    try:
        if verb not in HANDLERS:
            raise InputError(f"unknown verb {verb!r}", "unknown-verb")
        ctx = Context(text, truncation, max_poly_weight, seed)
        if ctx.doc.verb is None:
            ctx.doc.verb = verb
        inputs, result, negative, checks = HANDLERS[verb](ctx)
        _require(checks)
        report.update({
            "status": "negative" if negative else "ok",
            "parameters": {"shift": ctx.n, "truncation": ctx.W, "maxPolyWeight": ctx.K, "seed": seed,
                           "basisCap": basis_cap(), "model": ctx.doc.model},
            "inputs": inputs,
            "result": result,
            "verification": {k: bool(v) for k, v in checks.items()},
            "warnings": list(ctx.doc.warnings),
        })
        code = EXIT_NEGATIVE if negative else EXIT_OK
    except BasisCapExceeded as e:
        report.update({"status": "error", "error": {"code": "basis-cap", "message": str(e)}})
        code = EXIT_CAP
    except VerificationError as e:
        report.update({"status": "error", "error": {"code": "verification-failed", "message": str(e)}})
        code = EXIT_VERIFY
    except DocumentError as e:
        report.update({"status": "error", "error": {"code": e.code, "message": e.msg, "line": e.line,
                                                    "column": e.col, "token": e.token}})
        code = EXIT_INPUT
    except SpecError as e:
        loc = e.location
        err = {"code": "spec-invalid" if type(e).__name__ == "SpecError" else "lie-invalid", "message": str(e)}
        if loc is not None:
            err["location"] = list(loc) if isinstance(loc, tuple) else loc
        report.update({"status": "error", "error": err})
        code = EXIT_INPUT
    except PreconditionError as e:
        report.update({"status": "error", "error": {"code": "precondition", "message": str(e)}})
        code = EXIT_INPUT
    except InputError as e:
        report.update({"status": "error", "error": {"code": e.code, "message": str(e)}})
        code = EXIT_INPUT
    except GradedError as e:
        report.update({"status": "error", "error": {"code": "invalid-input", "message": str(e)}})
        code = EXIT_INPUT
    report["exitCode"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return report, code


def serialize_report(report: Dict, fmt_name: str = "json") -> str:
    if fmt_name == "json":
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    lines: List[str] = []

    def walk(prefix: str, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else str(k), v[k])
        elif isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            if isinstance(v, list):
                v = ", ".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{prefix}: {v}")

    walk("", report)
    return "\n".join(lines) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="workbench", description="Exact shifted Poisson / symplectic workbench")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--input", required=True, help="workbench document")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--truncation", type=int, default=None, help="truncation weight W")
    ap.add_argument("--max-poly-weight", type=int, default=None, help="coefficient polyweight bound K")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        report = {"schemaVersion": SCHEMA_VERSION, "verb": args.verb, "status": "error",
                  "error": {"code": "io-error", "message": str(e)}, "exitCode": EXIT_INPUT}
        sys.stdout.write(serialize_report(report, args.format))
        return EXIT_INPUT
    report, code = run_command(text, args.verb, args.truncation, args.max_poly_weight, args.seed)
    sys.stdout.write(serialize_report(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
