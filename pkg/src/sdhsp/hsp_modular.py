"""Hidden subgroup solver for the modular maximal-cyclic groups.

Target family: non-abelian semidirect products of Z_{p^r} by Z_p whose twist
is multiplication by p^{r-1} + 1, with r >= 2 and (p, r) != (2, 2).  The
solver touches the group only through opaque handles: it may multiply,
invert and compare encodings, and evaluate the hiding function pointwise or
over a superposed grid of products.

Every hidden subgroup H is caught by at least one of three reductions, each
an exact pullback along a homomorphism from a small abelian grid, so the
abelian lattice solver applies verbatim:

  quotient    G modulo the central subgroup <x^p> is Z_p x Z_p; runs when
              f(X^p) = f(e), i.e. when x^p lies in H.
  inner       H sits inside the index-p abelian subgroup generated by X^p
              and a corrected second generator Y' = X^{-shift} Y; runs when
              the correction's p-th power lies in H.  The shift comes from
              a preliminary abelian solve over the p-th powers of both
              special generators.
  involution  p = 2 only: an order-8 abelian subgroup generated by
              X^{2^{r-2}} and an involution built from Y' catches the
              subgroups that meet <x> trivially.

Candidates from every branch that ran are filtered by f-membership before
the closure is taken, so a branch can never add a foreign element; with
confident abelian solves the closure equals H exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Lattice, lattice_is_full
from .blackbox import (
    BlackBox,
    HiddenInstance,
    OpaqueHandle,
    oracle_identity,
    oracle_pow,
)
from .qsim import AbelianOracle, AbelianSolveResult, abelian_hsp_solve
from .sdp_group import Element, GroupSpec, SubgroupDesc, subgroup_elements


@dataclass(frozen=True)
class SpecialPair:
    """Generator pair normalized for the solver.

    ``x`` has maximal order p^r, ``y`` does not commute with it.  Both are
    opaque handles; ``identity`` is the encoded neutral element.
    """

    x: OpaqueHandle
    y: OpaqueHandle
    identity: OpaqueHandle


@dataclass(frozen=True)
class ShiftResult:
    """Outcome of the preliminary abelian solve over (X^p, Y^p).

    ``lattice`` is the recovered relation lattice over
    Z_{p^{r-1}} x Z_{p^{r-1}}.  ``shift`` is the exponent l tying the two
    p-th powers together modulo H; it is None when the lattice is full
    (no information, the quotient reduction necessarily applies).
    ``shift_mod_p`` would hold a low-precision residue if only a mod-p
    relation were extractable; over prime-power moduli the canonical basis
    always yields the full-precision value, so it stays None.
    """

    lattice: Lattice
    shift: int | None
    shift_mod_p: int | None
    confident: bool


@dataclass
class BranchReport:
    name: str
    ran: bool
    confident: bool | None = None
    samples_used: int = 0
    lattice_gens: tuple = ()
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "ran": self.ran,
            "confident": self.confident,
            "samples_used": self.samples_used,
            "lattice_gens": [list(g) for g in self.lattice_gens],
            "note": self.note,
        }


@dataclass(frozen=True)
class SolveOutcome:
    desc: SubgroupDesc
    generator_handles: tuple[OpaqueHandle, ...]
    generators: tuple[Element, ...]
    subgroup: tuple[Element, ...]
    confident: bool
    report: dict = field(hash=False)


def _require_solver_group(spec) -> None:
    if not isinstance(spec, GroupSpec) or not spec.is_modular:
        raise ValueError("the solver requires the modular maximal-cyclic presentation")
    if spec.p == 2 and spec.r == 2:
        raise ValueError(
            "p = r = 2 is excluded: that group is dihedral, outside this solver's class"
        )


def find_special_pair(bb: BlackBox, gen_handles) -> SpecialPair:
    """Normalize an arbitrary generating set to (maximal-order X, partner Y).

    Scans for a generator whose p^{r-1} power is not the identity; such an
    element has order exactly p^r and every generating set of the group
    contains one.  The partner is any other generator that fails to commute
    with it; one must exist or the generators would span an abelian group.
    """
    spec = bb.table.spec
    _require_solver_group(spec)
    p, r = spec.p, spec.r
    handles = list(gen_handles)
    if not handles:
        raise ValueError("not a valid generating set: empty")
    e = oracle_identity(bb, handles[0])

    x = None
    for h in handles:
        if not bb.oracle_eq(oracle_pow(bb, h, p ** (r - 1), e), e):
            x = h
            break
    if x is None:
        raise ValueError("not a valid generating set: no element of maximal order")
    if not bb.oracle_eq(oracle_pow(bb, x, p**r, e), e):
        raise ValueError("not a valid generating set: element order exceeds the group exponent")

    for h in handles:
        if bb.oracle_eq(bb.oracle_mul(x, h), bb.oracle_mul(h, x)):
            continue
        return SpecialPair(x=x, y=h, identity=e)
    raise ValueError(
        "not a valid generating set: all generators commute with the maximal-order element"
    )


def find_shift(
    inst: HiddenInstance,
    pair: SpecialPair,
    rng: np.random.Generator,
    delta: float = 0.01,
    backend: str = "statevector",
) -> tuple[ShiftResult, AbelianSolveResult]:
    """Relate the p-th powers of the special pair through the hiding function.

    Both X^p and Y^p are central powers of x, so
    F(u, v) = f((X^p)^u (Y^p)^v) is an exact homomorphism pullback over
    Z_{p^{r-1}} x Z_{p^{r-1}} and its periodicity lattice is a congruence
    a u + a' v = 0 (mod p^{i-1}) with a invertible.  Any basis of a proper
    such lattice contains a row whose second coordinate is a unit, giving
    shift = -u * v^{-1}.  A full lattice carries no information and leaves
    the shift absent.
    """
    bb = inst.blackbox
    spec = bb.table.spec
    p, r = spec.p, spec.r
    n1 = p ** (r - 1)
    e = pair.identity
    xp = oracle_pow(bb, pair.x, p, e)
    yp = oracle_pow(bb, pair.y, p, e)
    oracle = AbelianOracle.from_handles((n1, n1), inst, e, (xp, yp))
    res = abelian_hsp_solve(oracle, rng, delta=delta, backend=backend)
    lat = res.lattice
    if lattice_is_full(lat):
        return ShiftResult(lat, None, None, res.confident), res
    for u, v in lat.gens:
        if v % p != 0:
            shift = (-u * pow(v, -1, n1)) % n1
            return ShiftResult(lat, shift, None, res.confident), res
    # unreachable for this group family (the congruence has unit coefficients)
    return ShiftResult(lat, None, None, res.confident), res


def shifted_generator(bb: BlackBox, pair: SpecialPair, shift: int | None) -> OpaqueHandle:
    """Y' = X^{-shift} Y, the corrected second generator.

    Its y-part is always a unit, and its p-th power is a power of x whose
    exponent vanishes to the same p-adic depth as H's intersection with
    <x> (one level short for p = 2 at the deepest level, which is what the
    involution branch is for).
    """
    if shift is None:
        raise ValueError("no shift available: the quotient reduction covers this instance")
    e = pair.identity
    return bb.oracle_mul(oracle_pow(bb, pair.x, -shift, e), pair.y)


def find_involution_partner(
    bb: BlackBox, pair: SpecialPair, yprime: OpaqueHandle
) -> OpaqueHandle | None:
    """p = 2 only: an involution of the form (X^{2^{r-2}})^{-k} Y'.

    Searches k in 0..3 for a W with W^2 = e.  When the hidden subgroup
    meets <x> trivially such a W exists and <X^{2^{r-2}}, W> is an abelian
    group of order 8 containing every candidate subgroup.
    """
    spec = bb.table.spec
    p, r = spec.p, spec.r
    if p != 2:
        raise ValueError("the involution construction applies only to p = 2")
    e = pair.identity
    x4 = oracle_pow(bb, pair.x, 2 ** (r - 2), e)
    for k in range(4):
        w = bb.oracle_mul(oracle_pow(bb, x4, -k, e), yprime)
        if bb.oracle_eq(bb.oracle_mul(w, w), e):
            return w
    return None


def _lift(bb: BlackBox, e, gens, point) -> OpaqueHandle:
    acc = e
    for h, c in zip(gens, point, strict=True):
        acc = bb.oracle_mul(acc, oracle_pow(bb, h, int(c), e))
    return acc


def _run_branch(
    name: str,
    inst: HiddenInstance,
    e: OpaqueHandle,
    moduli: tuple[int, ...],
    gens: tuple[OpaqueHandle, ...],
    extras: tuple[OpaqueHandle, ...],
    rng: np.random.Generator,
    delta: float,
    backend: str,
) -> tuple[list[OpaqueHandle], BranchReport]:
    bb = inst.blackbox
    oracle = AbelianOracle.from_handles(moduli, inst, e, gens)
    res = abelian_hsp_solve(oracle, rng, delta=delta, backend=backend)
    cands = [_lift(bb, e, gens, g) for g in res.lattice.gens]
    cands.extend(extras)
    report = BranchReport(
        name=name,
        ran=True,
        confident=res.confident,
        samples_used=res.samples_used,
        lattice_gens=res.lattice.gens,
    )
    return cands, report


def solve(
    inst: HiddenInstance,
    gen_handles,
    rng: np.random.Generator | None = None,
    delta: float = 0.01,
    backend: str = "statevector",
) -> SolveOutcome:
    """Recover the hidden subgroup of a modular maximal-cyclic group.

    Returns surviving generator handles, their post-hoc revealed
    coordinates, the full subgroup closure, and a JSON-friendly report.
    ``confident`` is True when every abelian solve that contributed was
    verified; the output is then exact.  Candidates are always filtered
    by f-membership, so even a low-confidence result never contains an
    element outside H.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError("delta must be in (0, 0.5]")
    if rng is None:
        rng = np.random.default_rng(0)
    bb = inst.blackbox
    spec = bb.table.spec
    _require_solver_group(spec)
    p, r = spec.p, spec.r

    pair = find_special_pair(bb, gen_handles)
    e = pair.identity
    f0 = inst.f(e)
    xp = oracle_pow(bb, pair.x, p, e)

    shift_res, shift_solve = find_shift(inst, pair, rng, delta=delta, backend=backend)
    branches: list[BranchReport] = []
    candidates: list[OpaqueHandle] = []
    confident = shift_res.confident

    # quotient reduction: valid exactly when x^p lies in H
    if inst.f(xp) == f0:
        cands, rep = _run_branch(
            "quotient", inst, e, (p, p), (pair.x, pair.y), (xp,), rng, delta, backend
        )
        candidates.extend(cands)
        confident = confident and rep.confident
        branches.append(rep)
    else:
        branches.append(BranchReport("quotient", False, note="x^p lies outside the hidden subgroup"))

    if shift_res.shift is not None:
        yprime = shifted_generator(bb, pair, shift_res.shift)
        ypp = oracle_pow(bb, yprime, p, e)
        if inst.f(ypp) == f0:
            cands, rep = _run_branch(
                "inner",
                inst,
                e,
                (p ** (r - 1), p),
                (xp, yprime),
                (ypp,),
                rng,
                delta,
                backend,
            )
            candidates.extend(cands)
            confident = confident and rep.confident
            branches.append(rep)
        else:
            branches.append(
                BranchReport("inner", False, note="corrected generator's p-th power is outside H")
            )
            if p == 2:
                w = find_involution_partner(bb, pair, yprime)
                if w is None:
                    branches.append(BranchReport("involution", False, note="no involution found"))
                else:
                    x4 = oracle_pow(bb, pair.x, 2 ** (r - 2), e)
                    cands, rep = _run_branch(
                        "involution", inst, e, (4, 2), (x4, w), (), rng, delta, backend
                    )
                    candidates.extend(cands)
                    confident = confident and rep.confident
                    branches.append(rep)
    else:
        branches.append(BranchReport("inner", False, note="shift unavailable (full relation lattice)"))

    survivors = [h for h in candidates if inst.f(h) == f0]
    # drop the identity from the reported generator list; keep handles aligned
    gens_out: list[Element] = []
    handles_out: list[OpaqueHandle] = []
    seen: set[Element] = set()
    for h in survivors:
        g = bb.reveal(h)
        if g == Element(0, 0) or g in seen:
            continue
        seen.add(g)
        gens_out.append(g)
        handles_out.append(h)
    desc = SubgroupDesc.from_generators(sorted(seen))
    subgroup = tuple(subgroup_elements(spec, desc))

    report = {
        "group": {"p": p, "q": spec.q, "r": r, "alpha": spec.alpha},
        "backend": backend,
        "delta": delta,
        "shift": {
            "value": shift_res.shift,
            "lattice_gens": [list(g) for g in shift_res.lattice.gens],
            "confident": shift_res.confident,
            "samples_used": shift_solve.samples_used,
        },
        "branches": [b.as_dict() for b in branches],
        "candidates_kept": len(survivors),
        "confident": confident,
        "queries": inst.query_stats(),
    }
    return SolveOutcome(
        desc=desc,
        generator_handles=tuple(handles_out),
        generators=tuple(gens_out),
        subgroup=subgroup,
        confident=confident,
        report=report,
    )
