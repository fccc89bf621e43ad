# backend/api/commands.py
"""
Command layer shared by the CLI and the HTTP service.
Each command loads its inputs, runs the engines and fills a RunReport whose
verification ledger backs every reported number.
"""

import logging
import random
import re
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from backend.api.affine import (
    PrincipalCover,
    contract_unit_cocycle,
    cover_witness,
    prime_ideals,
    is_prime,
    random_unit_cochain,
    unordered_coboundary,
)
from backend.api.cech import StructureSheafPn, build_cech, h0_global, vanishing_bound
from backend.api.errors import GuardExceededError, InputError, SemicechError
from backend.api.laurent import LaurentPoly
from backend.api.pm_complex import check_chain_identity, compute_cohomology
from backend.api.projective import (
    ProjectiveSpace,
    classify_cocycle,
    coboundary_witness,
    picard_group,
    random_structure_cocycle,
    structure_complex,
    tensor_cocycles,
    twisting_cocycle,
    vanishing_witness,
)
from backend.api.semimodule import (
    check_hom_tensor_adjunction,
    find_isomorphism,
    golan_tensor_collapse,
    regular_module,
    tensor_product,
)
from backend.api.semiring_core import BuiltinSemiring, boolean_table, builtin
from backend.api.settings import override, settings
from backend.models.documents import PrimesDocument, TensorDocument
from backend.models.report import RunReport, RunStatus
from backend.storage.loaders import (
    compute_digest,
    load_affine,
    load_cocycle,
    load_complex,
    load_cover_sheaf,
    load_module,
    load_semiring,
    validate,
)

logger = logging.getLogger(__name__)

PICARD_RANGE = range(-3, 4)


def _poly(p: LaurentPoly) -> str:
    return repr(p)


def _key(t) -> str:
    return ",".join(str(i) for i in t)


_DEGREE_RANGE = re.compile(r"^\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?$")


def parse_degree_range(text: Optional[str]) -> Optional[Tuple[int, int]]:
    """'k' or 'lo..hi' as an inclusive (lo, hi); None when no range was asked for"""
    if text is None:
        return None
    match = _DEGREE_RANGE.match(text)
    if match is None:
        raise InputError(f"degree range {text!r} is not of the form k or lo..hi")
    lo = int(match.group(1))
    hi = lo if match.group(2) is None else int(match.group(2))
    if lo > hi:
        raise InputError(f"degree range {text!r} is empty")
    return lo, hi


class CommandRunner:
    """Runs one command end to end and returns a finalized RunReport"""

    def run(self, command: str, payload: Mapping[str, Any], body: Callable[[RunReport], None], **overrides) -> RunReport:
        report = RunReport(command=command, inputs_digest=compute_digest(payload))
        try:
            with override(**overrides):
                body(report)
        except (InputError, GuardExceededError) as e:
            logger.info("%s rejected its input: %s", command, e.message)
            report.status = RunStatus.ERROR
            report.error = e.to_dict()
        except SemicechError as e:
            logger.info("%s failed: %s", command, e.message)
            report.error = e.to_dict()
            report.check(type(e).__name__, False, e.message)
        return report.finalize()

    # cohomology

    def cohomology(
        self,
        doc: Optional[Mapping[str, Any]] = None,
        n: Optional[int] = None,
        semiring: str = "qmax",
        samples: int = 25,
        seed: Optional[int] = None,
        bound: Optional[int] = None,
        degree: Optional[str] = None,
    ) -> RunReport:
        payload = {"doc": doc, "n": n, "semiring": semiring, "samples": samples, "seed": seed, "degree": degree}

        def body(report: RunReport) -> None:
            degrees = parse_degree_range(degree)
            if doc is not None and "modules" in doc:
                self._finite_complex_cohomology(report, doc, degrees)
            elif doc is not None:
                self._cover_cohomology(report, doc, degrees)
            elif n is not None:
                self._projective_cohomology(report, n, builtin(semiring), samples, seed, degrees)
            else:
                raise InputError("give a complex or cover document, or --n for projective space")

        return self.run("cohomology", payload, body, witness_guard=bound, random_seed=seed)

    def _finite_complex_cohomology(self, report: RunReport, doc: Mapping[str, Any], degrees: Optional[Tuple[int, int]] = None) -> None:
        C = load_complex(doc)
        lo, hi = degrees or (C.low, C.high)
        if lo < C.low or hi > C.high:
            raise InputError(f"degrees {lo}..{hi} are outside the complex's {C.low}..{C.high}")
        report.results["complex"] = C.name
        for k in range(C.low, C.high - 1):
            result = check_chain_identity(C, k)
            if not report.check(f"chain_identity_degree_{k}", result.holds, f"{result.tested} elements"):
                report.results["counterexample"] = {"degree": k, "element": repr(result.counterexample)}
                return
        table = {}
        for k in range(lo, hi + 1):
            H = compute_cohomology(C, k)
            table[str(k)] = {"size": H.module.size, "cocycles": len(H.cocycles), "classes": [list(c) for c in H.congruence.classes()]}
            report.check(f"rho_is_congruence_degree_{k}", True, f"{H.module.size} classes")
        report.results["cohomology"] = table

    def _cover_cohomology(self, report: RunReport, doc: Mapping[str, Any], degrees: Optional[Tuple[int, int]] = None) -> None:
        cover, F = load_cover_sheaf(doc)
        lo, hi = degrees or (0, cover.size)
        if lo < 0:
            raise InputError(f"Cech degrees start at 0, got {lo}")
        C = build_cech(cover, F, max_degree=hi)
        for k in range(C.low, C.high - 1):
            result = check_chain_identity(C, k)
            if not report.check(f"chain_identity_degree_{k}", result.holds, f"{result.tested} elements"):
                report.results["counterexample"] = {"degree": k, "element": repr(result.counterexample)}
                return
        table = {}
        for k in range(lo, hi + 1):
            H = compute_cohomology(C, k)
            table[str(k)] = {"size": H.module.size, "cocycles": len(H.cocycles)}
            report.check(f"rho_is_congruence_degree_{k}", True, f"{H.module.size} classes")
        report.results["cohomology"] = table
        h0 = h0_global(cover, F)
        for name, passed in h0.checks.items():
            report.check(f"h0_{name}", passed)
        report.check("vanishing_at_cover_size", vanishing_bound(cover, F, cover.size), f"degree {cover.size}")

    def _projective_cohomology(
        self, report: RunReport, n: int, ring, samples: int, seed: Optional[int], degrees: Optional[Tuple[int, int]] = None
    ) -> None:
        lo, hi = degrees or (0, n + 1)
        if lo < 0:
            raise InputError(f"Cech degrees start at 0, got {lo}")
        X = ProjectiveSpace(n, ring)
        rng = random.Random(settings.random_seed if seed is None else seed)
        if lo == 0:
            h0 = h0_global(X.cover, StructureSheafPn(n, ring))
            report.results["H0"] = {"global_sections": ring.name, "glued_families": h0.cocycle_count}
            for name, passed in h0.checks.items():
                report.check(f"h0_{name}", passed)
        for p in range(max(lo, 1), min(hi, n) + 1):
            verified = 0
            for _ in range(samples):
                t = random_structure_cocycle(X, p, rng)
                if vanishing_witness(X, p, t).verified:
                    verified += 1
            report.results[f"H{p}"] = {"value": 0, "witnessed_cocycles": verified}
            report.check(f"h{p}_vanishing_witnesses", verified == samples, f"{verified}/{samples} cocycles")
        if hi <= n:
            return
        C = structure_complex(X, max(n, hi - 1))
        for p in range(max(lo, n + 1), hi + 1):
            report.results[f"H{p}"] = {"value": 0, "tuples": len(C.tuples[p])}
            report.check(f"h{p}_empty_product", not C.tuples[p])

    # picard

    def picard(
        self,
        n: Optional[int] = None,
        semiring: str = "qmax",
        cocycle: Optional[Mapping[str, Any]] = None,
        seed: Optional[int] = None,
    ) -> RunReport:
        payload = {"n": n, "semiring": semiring, "cocycle": cocycle, "seed": seed}

        def body(report: RunReport) -> None:
            ring = builtin(semiring)
            if cocycle is not None:
                f = load_cocycle(cocycle, ring)
                if n is not None and n != f.space.n:
                    raise InputError(f"--n {n} disagrees with the cocycle document (n = {f.space.n})")
                X = f.space
                picard_group(X)
                c = classify_cocycle(X, f)
                normal = c.normalized(X)
                witness = coboundary_witness(X, f, normal)
                report.results.update(
                    n=X.n,
                    degree=c.degree,
                    q={_key(k): ring.format(v) for k, v in sorted(c.q.items())},
                    normalized=normal.to_dict(),
                )
                report.check("cocycle_law", f.cocycle_violation() is None)
                report.check("equivalent_to_normal_form", witness.verified, "f * d+u * d-v = f0 * d+v * d-u")
                return
            if n is None:
                raise InputError("picard needs --n or a cocycle document")
            X = ProjectiveSpace(n, ring)
            pic = picard_group(X)
            rows = []
            for m in PICARD_RANGE:
                rows.append({"m": m, "class": pic.class_of(twisting_cocycle(X, m))})
            report.results.update(n=n, table=rows)
            report.check("class_of_twisting_is_m", all(r["class"] == r["m"] for r in rows), f"m in {PICARD_RANGE.start}..{PICARD_RANGE.stop - 1}")
            additive = all(
                pic.class_of(tensor_cocycles(twisting_cocycle(X, a), twisting_cocycle(X, b))) == a + b
                for a in PICARD_RANGE for b in PICARD_RANGE
            )
            report.check("tensor_is_additive", additive)
            rng = random.Random(settings.random_seed if seed is None else seed)
            report.check("random_cocycles_additive", pic.verify_homomorphism(rng))

        return self.run("picard", payload, body)

    # affine

    def affine(self, verb: str, doc: Mapping[str, Any], seed: Optional[int] = None, bound: Optional[int] = None) -> RunReport:
        payload = {"verb": verb, "doc": doc, "seed": seed, "bound": bound}
        handlers = {"primes": self._primes, "cover": self._cover, "contract": self._contract}

        def body(report: RunReport) -> None:
            if verb not in handlers:
                raise InputError(f"unknown affine verb {verb!r}; expected one of {sorted(handlers)}")
            handlers[verb](report, doc, seed)

        return self.run(f"affine {verb}", payload, body, prime_guard=bound, cover_search_bound=bound)

    def _primes(self, report: RunReport, doc: Mapping[str, Any], seed) -> None:
        S = load_semiring(validate(PrimesDocument, doc).semiring)
        if isinstance(S, BuiltinSemiring):
            if S.name != builtin("boolean").name:
                raise InputError(f"{S.name} is infinite; prime enumeration needs a finite table")
            S = boolean_table()
        primes = prime_ideals(S)
        report.results["primes"] = [p.to_dict() for p in primes]
        report.check("each_ideal_is_prime", all(is_prime(S, sorted(p.elements)) for p in primes), f"{len(primes)} primes")

    def _cover(self, report: RunReport, doc: Mapping[str, Any], seed) -> None:
        A, fs, _ = load_affine(doc)
        w = cover_witness(A, fs)
        report.results.update(localization=A.describe(), status=w.status, index=w.index, reason=w.reason)
        if w.found:
            total = LaurentPoly.zero(A.ring, A.nvars)
            for h, f in zip(w.h, fs):
                total = total + h * f
            report.results["h"] = [_poly(h) for h in w.h]
            report.check("sum_h_f_is_one", total == A.one())
        else:
            report.check("decision_is_definite", w.status == "none", w.reason)

    def _contract(self, report: RunReport, doc: Mapping[str, Any], seed) -> None:
        A, fs, cochain = load_affine(doc)
        degree = int(doc.get("degree", 1))
        cover = PrincipalCover(A, tuple(fs))
        if cochain is None:
            rng = random.Random(settings.random_seed if seed is None else seed)
            w = random_unit_cochain(cover, degree - 1, rng)
            cochain = unordered_coboundary(cover, w, degree - 1)
            report.results["generated"] = True
        contraction = contract_unit_cocycle(cover, cochain, degree)
        report.results.update(
            chart=contraction.chart,
            degree=degree,
            x={_key(t): _poly(v) for t, v in sorted(contraction.x.items())},
        )
        report.check("unit_chart_certified", contraction.certificate.verified, _poly(contraction.certificate.inverse))
        report.check("dx_equals_y", contraction.verified)

    # tensor

    def tensor(self, verb: str, doc: Mapping[str, Any], bound: Optional[int] = None) -> RunReport:
        payload = {"verb": verb, "doc": doc, "bound": bound}

        def body(report: RunReport) -> None:
            tdoc = validate(TensorDocument, doc)
            if verb == "golan":
                self._golan(report, tdoc)
            elif verb == "pr":
                self._pr(report, tdoc)
            else:
                raise InputError(f"unknown tensor verb {verb!r}; expected golan or pr")

        return self.run(f"tensor {verb}", payload, body, tensor_guard=bound, hom_guard=bound)

    def _golan(self, report: RunReport, tdoc: TensorDocument) -> None:
        if tdoc.builtin is not None:
            ring = builtin(tdoc.builtin)
            collapse = golan_tensor_collapse(ring)
            report.results.update(source=collapse.source, trivial=collapse.trivial, rule=collapse.rule)
            if collapse.trivial:
                rng = random.Random(settings.random_seed)
                pairs = [(ring.random_value(rng, 5), ring.random_value(rng, 5)) for _ in range(20)]
                ok = all(collapse.witness(a, b) is not None for a, b in pairs)
                report.check("cancellation_witnesses", ok, "c = a + b on 20 sampled pairs")
            else:
                report.check("cancellative", not ring.is_idempotent())
            return
        if not tdoc.modules:
            raise InputError("golan needs a module or a builtin tag")
        ring = load_semiring(tdoc.ring)
        M = load_module(tdoc.modules[0], ring)
        collapse = golan_tensor_collapse(M)
        report.results.update(source=collapse.source, trivial=collapse.trivial, size=collapse.size)
        report.check("cancellation_congruence_closed", True, f"{collapse.congruence.class_count} classes")

    def _pr(self, report: RunReport, tdoc: TensorDocument) -> None:
        if len(tdoc.modules) < 2:
            raise InputError("pr needs two modules, plus an optional third for the adjunction check")
        ring = load_semiring(tdoc.ring)
        M, N = (load_module(m, ring) for m in tdoc.modules[:2])
        T = tensor_product(M, N)
        report.results.update(size=T.module.size, generators=len(T.generators))
        report.check("tensor_built", T.module.size >= 1, f"{T.module.size} elements")
        R = regular_module(ring)
        if R.size <= settings.isomorphism_guard:
            report.check("unit_law_R_tensor_M", find_isomorphism(tensor_product(R, M).module, M) is not None)
        if len(tdoc.modules) > 2:
            P = load_module(tdoc.modules[2], ring)
            adj = check_hom_tensor_adjunction(M, N, P)
            report.results["adjunction"] = {"left": adj.left_size, "right": adj.right_size}
            report.check("hom_tensor_adjunction", adj.holds)

    # check complex

    def check_complex(self, doc: Mapping[str, Any], samples: Optional[int] = None) -> RunReport:
        def body(report: RunReport) -> None:
            C = load_complex(doc)
            degrees: Dict[str, Any] = {}
            for k in range(C.low, C.high - 1):
                result = check_chain_identity(C, k, samples)
                degrees[str(k)] = {"holds": result.holds, "tested": result.tested, "exhaustive": result.exhaustive}
                report.check(f"chain_identity_degree_{k}", result.holds, repr(result.counterexample) if not result.holds else "")
            if not degrees:
                report.check("chain_identity", True, "fewer than three degrees; nothing to compose")
            report.results["degrees"] = degrees

        return self.run("check complex", {"doc": doc, "samples": samples}, body)


command_runner = CommandRunner()
