"""Acceptance harness: the gates this package must pass.

Each criterion_* function runs one gate end to end and returns a
CriterionResult; run_all chains them (the query-budget gate consumes the
solver sweep's measurements).  The same runners back both the pytest
acceptance suite and the CLI selftest, so there is exactly one definition
of "passing".

Solver gates always compare against the brute-force reference route,
never against the solver's own bookkeeping.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as _field

import numpy as np

from . import hsp_modular, hsp_vector, reference
from .algebra import (
    Lattice,
    dual_lattice,
    lattice_canonicalize,
    lattice_coset_rep,
    lattice_elements,
    lattice_member,
    lattice_size,
    lattices_equal,
)
from .blackbox import make_hidden_instance, sdp_table
from .hsp_vector import ZmGroupSpec, make_vec_instance, vec_table
from .qsim import AbelianOracle, sample_annihilator, sample_statevector
from .sdp_group import (
    Element,
    GroupSpec,
    classify,
    compose,
    elements,
    enumerate_alphas,
    enumerate_subgroups,
    iso_map,
    modular_group_spec,
    power_closed_form,
    subgroup_elements,
    subgroup_properties,
)

PRIMES_13 = (2, 3, 5, 7, 11, 13)

MODULAR_GRID = ((3, 2), (3, 3), (5, 2), (7, 2), (2, 3), (2, 4))
MODULAR_GRID_QUICK = ((3, 2), (2, 3))
VECTOR_GRID = ((3, 2, 1), (3, 2, 2), (5, 2, 1), (2, 3, 1), (3, 3, 1))
VECTOR_GRID_QUICK = ((3, 2, 1), (2, 3, 1))
SEEDS = (7, 11, 13)
ENCODINGS = (
    ("unique", 1, "zero"),
    ("salted", 4, "zero"),
    ("salted", 4, "operands"),
    ("salted", 4, "fresh"),
)
GENERATOR_POLICIES = ("canonical", "scrambled")
STATEVECTOR_DOMAIN_BOUND = 2**20

# query budget: classical evaluations per solve must stay below
# BUDGET_CONSTANT * p^2 * r^3 * max(1, log2 p)^2.  Pinned from the first
# verified full sweep (1944 runs): worst observed ratio 0.289 at (p,r)=(2,4),
# i.e. 1185 evaluations against a budget of 4096.  The ~3.5x headroom covers
# the up-to-4x evaluation growth of a worst-case three-round abelian solve.
BUDGET_CONSTANT = 16

MAX_REPORTED_FAILURES = 12


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: str
    failures: list[str] = _field(default_factory=list)
    metrics: dict = _field(default_factory=dict)

    def summary(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        line = f"[{mark}] {self.name}: {self.details}"
        for f in self.failures[:MAX_REPORTED_FAILURES]:
            line += f"\n       - {f}"
        if len(self.failures) > MAX_REPORTED_FAILURES:
            line += f"\n       ... {len(self.failures) - MAX_REPORTED_FAILURES} more"
        return line


def _mk(name: str, failures: list[str], details: str, metrics: dict) -> CriterionResult:
    return CriterionResult(
        name=name,
        passed=not failures,
        details=details,
        failures=failures,
        metrics=metrics,
    )


def query_budget(p: int, r: int) -> int:
    return int(BUDGET_CONSTANT * p * p * r**3 * max(1.0, math.log2(p)) ** 2)


def _pick_backend(p: int, r: int) -> str:
    # the largest internal oracle domain is (p^{r-1})^2
    return "statevector" if (p ** (r - 1)) ** 2 <= STATEVECTOR_DOMAIN_BOUND else "annihilator"


def criterion_solver_modular(quick: bool = False) -> CriterionResult:
    """Full solver sweep over the rank-one grid against brute force."""
    t0 = time.monotonic()
    grid = MODULAR_GRID_QUICK if quick else MODULAR_GRID
    encodings = (ENCODINGS[0], ENCODINGS[3]) if quick else ENCODINGS
    seeds = (7,) if quick else SEEDS
    failures: list[str] = []
    runs = 0
    per_grid: dict[tuple[int, int], dict] = {}

    for p, r in grid:
        spec = modular_group_spec(p, r)
        table = sdp_table(spec)
        backend = _pick_backend(p, r)
        cell = {"classical": [], "superposed": []}
        per_grid[(p, r)] = cell
        for di, desc in enumerate(enumerate_subgroups(spec)):
            truth = frozenset(subgroup_elements(spec, desc))
            for ei, (mode, salts, salt_policy) in enumerate(encodings):
                for gi, gpol in enumerate(GENERATOR_POLICIES):
                    for seed in seeds:
                        inst, handles = make_hidden_instance(
                            table,
                            truth,
                            mode=mode,
                            salts=salts,
                            salt_policy=salt_policy,
                            generator_policy=gpol,
                            seed=seed,
                        )
                        rng = np.random.default_rng([seed, p, r, di, ei, gi])
                        out = hsp_modular.solve(inst, handles, rng=rng, backend=backend)
                        bf = reference.brute_force_hidden_subgroup(
                            table, inst.label_of_element
                        )
                        runs += 1
                        q = out.report["queries"]
                        cell["classical"].append(q["mul"] + q["inv"] + q["eq"] + q["f"])
                        cell["superposed"].append(q["superposed_calls"])
                        if frozenset(out.subgroup) != bf or bf != inst.truth_elements():
                            failures.append(
                                f"(p={p},r={r}) {desc.label()} enc={mode}/{salt_policy} "
                                f"gen={gpol} seed={seed}: got order {len(out.subgroup)}, "
                                f"want {len(truth)}"
                            )
    elapsed = time.monotonic() - t0
    metrics = {
        "runs": runs,
        "elapsed_s": round(elapsed, 2),
        "per_grid": {
            f"{p},{r}": {
                "max_classical": max(cell["classical"]),
                "mean_superposed": float(np.mean(cell["superposed"])),
                "group_order": p ** (r + 1),
            }
            for (p, r), cell in per_grid.items()
        },
    }
    return _mk(
        "solver sweep, rank-one groups",
        failures,
        f"{runs} solves across {len(grid)} groups, {len(failures)} mismatches, "
        f"{elapsed:.1f}s",
        metrics,
    )


def criterion_solver_vector(quick: bool = False) -> CriterionResult:
    """Full solver sweep over the vector grid against brute force."""
    t0 = time.monotonic()
    grid = VECTOR_GRID_QUICK if quick else VECTOR_GRID
    failures: list[str] = []
    runs = 0
    for p, r, m in grid:
        spec = ZmGroupSpec(p, r, m)
        table = vec_table(spec)
        subs = reference.enumerate_all_subgroups(table)
        for si, sub in enumerate(subs):
            vin = make_vec_instance(spec, sub, generator_policy="canonical", seed=7)
            rng = np.random.default_rng([7, p, r, m, si])
            out = hsp_vector.solve(vin, rng)
            bf = reference.brute_force_hidden_subgroup(
                table, vin.instance.label_of_element
            )
            runs += 1
            if frozenset(out.subgroup) != bf or bf != vin.instance.truth_elements():
                failures.append(
                    f"(p={p},r={r},m={m}) |H|={len(sub)}: got order {len(out.subgroup)}"
                )
    elapsed = time.monotonic() - t0
    return _mk(
        "solver sweep, vector groups",
        failures,
        f"{runs} solves across {len(grid)} groups, {len(failures)} mismatches, "
        f"{elapsed:.1f}s",
        {"runs": runs, "elapsed_s": round(elapsed, 2)},
    )


def criterion_alpha_enumeration() -> CriterionResult:
    """Cardinalities and exact sets of the valid twist parameters."""
    t0 = time.monotonic()
    failures: list[str] = []
    checked = 0
    for p in PRIMES_13:
        for q in PRIMES_13:
            for r in range(1, 5):
                got = enumerate_alphas(p, q, r)
                if q == p:
                    if r == 1:
                        want = 0
                    elif p == 2:
                        want = 1 if r == 2 else 3
                    else:
                        want = p - 1
                else:
                    want = q - 1 if (p - 1) % q == 0 else 0
                checked += 1
                if len(got) != want:
                    failures.append(f"(p={p},q={q},r={r}): {len(got)} values, want {want}")
                    continue
                if q == p and p % 2 == 1 and r >= 2:
                    exact = {t * p ** (r - 1) + 1 for t in range(1, p)}
                    if got != exact:
                        failures.append(f"(p={p},q={p},r={r}): set {sorted(got)} != {sorted(exact)}")
    if enumerate_alphas(2, 2, 3) != {3, 5, 7}:
        failures.append(f"(2,2,3): {sorted(enumerate_alphas(2, 2, 3))} != [3, 5, 7]")
    if enumerate_alphas(2, 2, 2) != {3}:
        failures.append(f"(2,2,2): {sorted(enumerate_alphas(2, 2, 2))} != [3]")
    elapsed = time.monotonic() - t0
    return _mk(
        "twist parameter enumeration",
        failures,
        f"{checked} (p,q,r) cells, zero tolerance, {elapsed:.1f}s",
        {"cells": checked, "elapsed_s": round(elapsed, 2)},
    )


def _expected_class(p: int, q: int, r: int, alpha: int) -> int:
    modulus = p**r
    if alpha % modulus == 1:
        return 5
    if q != p:
        return 1
    if alpha % modulus == modulus - 1:
        return 2
    if p == 2 and alpha % modulus == 2 ** (r - 1) - 1:
        return 3
    return 4


def criterion_classification_iso(quick: bool = False) -> CriterionResult:
    """Class table and isomorphism maps, exhaustively per family."""
    t0 = time.monotonic()
    bound = 60 if quick else 500
    failures: list[str] = []
    pairs_checked = 0
    classes_checked = 0

    def prime_list(n: int) -> list[int]:
        return [k for k in range(2, n + 1) if all(k % d for d in range(2, int(k**0.5) + 1))]

    for q in prime_list(bound // 2):
        for p in prime_list(bound // q):
            r = 1
            while p**r * q <= bound:
                alphas = sorted(enumerate_alphas(p, q, r))
                by_class: dict[int, list[int]] = {}
                for a in alphas:
                    spec = GroupSpec(p, q, r, a)
                    cls = classify(spec)
                    classes_checked += 1
                    if cls != _expected_class(p, q, r, a):
                        failures.append(
                            f"classify({p},{q},{r},alpha={a}) = {cls}, "
                            f"want {_expected_class(p, q, r, a)}"
                        )
                    by_class.setdefault(cls, []).append(a)
                for cls, members in by_class.items():
                    for a1 in members:
                        for a2 in members:
                            src = GroupSpec(p, q, r, a1)
                            dst = GroupSpec(p, q, r, a2)
                            els = elements(src)
                            images = [iso_map(src, dst, e) for e in els]
                            pairs_checked += 1
                            if len(set(images)) != len(els):
                                failures.append(
                                    f"iso_map({p},{q},{r}) alpha {a1}->{a2}: not a bijection"
                                )
                                continue
                            phi = dict(zip(els, images))
                            ok = all(
                                phi[compose(src, e1, e2)] == compose(dst, phi[e1], phi[e2])
                                for e1 in els
                                for e2 in els
                            )
                            if not ok:
                                failures.append(
                                    f"iso_map({p},{q},{r}) alpha {a1}->{a2}: not a homomorphism"
                                )
                r += 1
    elapsed = time.monotonic() - t0
    return _mk(
        "classification and isomorphism maps",
        failures,
        f"{classes_checked} class labels, {pairs_checked} exhaustive map checks, "
        f"{elapsed:.1f}s",
        {
            "classes_checked": classes_checked,
            "pairs_checked": pairs_checked,
            "elapsed_s": round(elapsed, 2),
        },
    )


def criterion_subgroup_structure() -> CriterionResult:
    """Structured subgroup enumeration vs generic closure enumeration."""
    t0 = time.monotonic()
    failures: list[str] = []
    for p, r in ((3, 2), (2, 3), (3, 3), (5, 2)):
        spec = modular_group_spec(p, r)
        descs = enumerate_subgroups(spec)
        want_count = 2 * (r + 1) + r * (p - 1)
        if len(descs) != want_count:
            failures.append(f"(p={p},r={r}): {len(descs)} descriptors, want {want_count}")
        structured = {frozenset(subgroup_elements(spec, d)) for d in descs}
        if len(structured) != len(descs):
            failures.append(f"(p={p},r={r}): descriptor element sets collide")
        generic = set(reference.enumerate_all_subgroups(sdp_table(spec)))
        if structured != generic:
            failures.append(
                f"(p={p},r={r}): structured enumeration has {len(structured)} sets, "
                f"generic closure has {len(generic)}, symmetric difference "
                f"{len(structured ^ generic)}"
            )
        non_normal = {
            d.label() for d in descs if not subgroup_properties(spec, d).normal
        }
        want_nn = {f"cyclicxy:{t},{r - 1}" for t in range(1, p)} | {f"xpowery:{r}"}
        if non_normal != want_nn:
            failures.append(
                f"(p={p},r={r}): non-normal set {sorted(non_normal)} != {sorted(want_nn)}"
            )
        for d in descs:
            props = subgroup_properties(spec, d)
            if props.order < spec.order and not props.abelian:
                failures.append(f"(p={p},r={r}) {d.label()}: proper subgroup not abelian")
    elapsed = time.monotonic() - t0
    return _mk(
        "subgroup structure",
        failures,
        f"count formula, generic cross-check and normality on 4 groups, {elapsed:.1f}s",
        {"elapsed_s": round(elapsed, 2)},
    )


def criterion_power_closed_form(quick: bool = False) -> CriterionResult:
    """Closed-form exponentiation vs literal iterated composition."""
    t0 = time.monotonic()
    failures: list[str] = []
    exhaustive = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)) + (
        () if quick else ((2, 5), (2, 6), (3, 4))
    )
    total = 0
    for p, r in exhaustive:
        spec = modular_group_spec(p, r)
        order = spec.order
        for e in elements(spec):
            acc = Element(0, 0)
            for c in range(order + 1):
                total += 1
                if power_closed_form(spec, e, c) != acc:
                    failures.append(f"(p={p},r={r}) {e}^{c}")
                    break
                acc = compose(spec, acc, e)
    rng = np.random.default_rng(20260822)
    random_fixtures = () if quick else ((7, 2), (5, 3), (13, 2), (3, 5))
    for p, r in random_fixtures:
        spec = modular_group_spec(p, r)
        els = elements(spec)
        order = spec.order
        draws: dict[Element, list[int]] = {}
        for _ in range(10_000):
            e = els[int(rng.integers(0, len(els)))]
            draws.setdefault(e, []).append(int(rng.integers(0, order + 1)))
        for e, cs in draws.items():
            cs = sorted(set(cs))
            acc = Element(0, 0)
            k = 0
            for c in range(cs[-1] + 1):
                if k < len(cs) and c == cs[k]:
                    total += 1
                    if power_closed_form(spec, e, c) != acc:
                        failures.append(f"(p={p},r={r}) {e}^{c}")
                    k += 1
                acc = compose(spec, acc, e)
    elapsed = time.monotonic() - t0
    return _mk(
        "closed-form power law",
        failures,
        f"{total} (element, exponent) cases, zero tolerance, {elapsed:.1f}s",
        {"cases": total, "elapsed_s": round(elapsed, 2)},
    )


BACKEND_FIXTURES = (
    ((3, 3), ((1, 1),)),
    ((9, 9), ((2, 8),)),
    ((9, 3), ((3, 1),)),
    ((4, 2), ((2, 1),)),
)


def criterion_backend_equivalence(quick: bool = False) -> CriterionResult:
    """Statevector sampling vs exact annihilator sampling."""
    t0 = time.monotonic()
    failures: list[str] = []
    n_samples = 10_000
    fixtures = BACKEND_FIXTURES[:2] if quick else BACKEND_FIXTURES
    tvs = {}
    for moduli, gens in fixtures:
        L = lattice_canonicalize(Lattice(moduli, gens))
        oracle = AbelianOracle.from_function(moduli, lambda pt, L=L: lattice_coset_rep(L, pt))
        rng1 = np.random.default_rng([1, *moduli])
        rng2 = np.random.default_rng([2, *moduli])
        sv = sample_statevector(oracle, rng1, n_samples)
        an = sample_annihilator(L, rng2, n_samples)
        dual = dual_lattice(L)
        bad = [s for s in sv if not lattice_member(dual, s)]
        if bad:
            failures.append(f"{moduli} {gens}: {len(bad)} statevector samples outside the dual")
        support = lattice_elements(dual)
        c1 = {pt: 0 for pt in support}
        c2 = {pt: 0 for pt in support}
        for s in sv:
            c1[s] += 1
        for s in an:
            c2[s] += 1
        tv = 0.5 * sum(abs(c1[pt] - c2[pt]) for pt in support) / n_samples
        tvs[str(moduli)] = round(tv, 4)
        if tv > 0.05:
            failures.append(f"{moduli} {gens}: TV distance {tv:.4f} > 0.05")
    elapsed = time.monotonic() - t0
    return _mk(
        "sampler backend equivalence",
        failures,
        f"{len(fixtures)} fixtures at {n_samples} samples, {elapsed:.1f}s",
        {"tv": tvs, "elapsed_s": round(elapsed, 2)},
    )


def criterion_lattice_laws(quick: bool = False) -> CriterionResult:
    """Double dual, size product and enumeration cross-checks."""
    t0 = time.monotonic()
    failures: list[str] = []
    rng = np.random.default_rng(420)
    pool = (3, 9, 27, 2, 4, 8, 5, 25)
    n_lattices = 200 if quick else 1000
    for i in range(n_lattices):
        k = int(rng.integers(1, 4))
        moduli = tuple(int(pool[j]) for j in rng.integers(0, len(pool), size=k))
        n_gens = int(rng.integers(0, k + 2))
        gens = tuple(
            tuple(int(rng.integers(0, n)) for n in moduli) for _ in range(n_gens)
        )
        L = lattice_canonicalize(Lattice(moduli, gens))
        D = dual_lattice(L)
        if not lattices_equal(dual_lattice(D), L):
            failures.append(f"#{i} {moduli} {gens}: (L*)* != L")
        total = math.prod(moduli)
        if lattice_size(L) * lattice_size(D) != total:
            failures.append(f"#{i} {moduli} {gens}: |L|*|L*| != {total}")
        small = L if lattice_size(L) <= lattice_size(D) else D
        if len(lattice_elements(small)) != lattice_size(small):
            failures.append(f"#{i} {moduli} {gens}: enumeration disagrees with size")
    elapsed = time.monotonic() - t0
    return _mk(
        "lattice duality laws",
        failures,
        f"{n_lattices} random lattices, zero tolerance, {elapsed:.1f}s",
        {"lattices": n_lattices, "elapsed_s": round(elapsed, 2)},
    )


def criterion_query_budget(
    sweep: CriterionResult | None = None, quick: bool = False
) -> CriterionResult:
    """Classical query budget (gating) and superposed scaling fit (informational)."""
    if sweep is None or "per_grid" not in sweep.metrics:
        sweep = criterion_solver_modular(quick=quick)
    t0 = time.monotonic()
    failures: list[str] = []
    xs, ys = [], []
    budgets = {}
    for key, cell in sweep.metrics["per_grid"].items():
        p, r = (int(v) for v in key.split(","))
        budget = query_budget(p, r)
        budgets[key] = {
            "max_classical": cell["max_classical"],
            "budget": budget,
            "mean_superposed": round(cell["mean_superposed"], 1),
        }
        if cell["max_classical"] > budget:
            failures.append(
                f"(p={p},r={r}): max classical queries {cell['max_classical']} "
                f"over budget {budget}"
            )
        xs.append(math.log2(cell["group_order"]))
        ys.append(cell["mean_superposed"])
    exponent = None
    if len(xs) >= 2 and min(ys) > 0:
        exponent = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    elapsed = time.monotonic() - t0
    details = f"budget constant {BUDGET_CONSTANT}; "
    details += f"superposed fit exponent {exponent:.2f} (informational, threshold 3.5)" if exponent is not None else "fit skipped"
    return _mk(
        "query budget",
        failures,
        details + f", {elapsed:.1f}s",
        {
            "budget_constant": BUDGET_CONSTANT,
            "per_grid": budgets,
            "superposed_fit_exponent": exponent,
            "elapsed_s": round(elapsed, 2),
        },
    )


def run_all(quick: bool = False) -> list[CriterionResult]:
    sweep = criterion_solver_modular(quick=quick)
    out = [
        sweep,
        criterion_solver_vector(quick=quick),
        criterion_alpha_enumeration(),
        criterion_classification_iso(quick=quick),
        criterion_subgroup_structure(),
        criterion_power_closed_form(quick=quick),
        criterion_backend_equivalence(quick=quick),
        criterion_lattice_laws(quick=quick),
        criterion_query_budget(sweep=sweep),
    ]
    return out
