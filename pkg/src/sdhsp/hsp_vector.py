"""Hidden subgroup solver for vector semidirect products.

Target family: G = Z_{p^r}^m x| Z_p where the generator of the Z_p factor
acts on every coordinate as multiplication by p^{r-1} + 1, with r >= 2,
m >= 1 and (p, r) != (2, 2).  Unlike the rank-one solver, no case analysis
is needed: the whole group reduces at once.

The reduction map pi sends abelian coordinates (u_1..u_m, v) to the element
g'_1^{u_1} ... g'_m^{u_m} Y^v, where the g'_i form a minimal generating set
of the abelian part A recovered from the input handles, and Y is the given
generator of the complement with Y^p = e.  pi is a coordinate bijection but
not a homomorphism; the twist contributes a factor that is always a power
of an element of H whenever the operands map into H, so F = f o pi is
exactly lattice-periodic and the abelian solver applies.  Pulling the
recovered lattice back through pi and closing under multiplication yields
H itself.

Unique encoding is required: the minimal-generating-set step compares raw
encoding bytes to detect relations, which is only meaningful when equal
elements have equal encodings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _cartesian

import numpy as np

from .algebra import (
    Lattice,
    _lattice_basis,
    lattice_is_full,
    lattice_sample,
    lattice_size,
    smith_normal_form,
)
from .blackbox import (
    BlackBox,
    GroupTable,
    HiddenInstance,
    OpaqueHandle,
    make_hidden_instance,
    oracle_identity,
    oracle_pow,
)
from .qsim import AbelianOracle, AbelianSolveResult, abelian_hsp_solve
from .sdp_group import is_prime


@dataclass(frozen=True, order=True)
class VecElement:
    """(a, b) with a an m-vector of exponents mod p^r and b mod p."""

    a: tuple[int, ...]
    b: int


@dataclass(frozen=True)
class ZmGroupSpec:
    """Parameters of Z_{p^r}^m x| Z_p with the fixed near-identity twist."""

    p: int
    r: int
    m: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.r < 2:
            raise ValueError("r must be at least 2")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.p == 2 and self.r == 2:
            raise ValueError(
                "p = r = 2 is excluded: the twist collapses to a dihedral action"
            )

    @property
    def modulus(self) -> int:
        return self.p**self.r

    @property
    def alpha(self) -> int:
        return self.p ** (self.r - 1) + 1

    @property
    def order(self) -> int:
        return self.p ** (self.r * self.m + 1)


@lru_cache(maxsize=None)
def _alpha_pows(alpha: int, p: int, modulus: int) -> tuple[int, ...]:
    out = [1]
    for _ in range(p - 1):
        out.append(out[-1] * alpha % modulus)
    return tuple(out)


def vec_identity(G: ZmGroupSpec) -> VecElement:
    return VecElement((0,) * G.m, 0)


def vec_check(G: ZmGroupSpec, e: VecElement) -> None:
    if len(e.a) != G.m:
        raise ValueError(f"vector width {len(e.a)} does not match m = {G.m}")
    if not all(0 <= ai < G.modulus for ai in e.a) or not 0 <= e.b < G.p:
        raise ValueError(f"{e} out of range for the group")


def vec_compose(G: ZmGroupSpec, e1: VecElement, e2: VecElement) -> VecElement:
    # (a1, b1)(a2, b2) = (a1 + alpha^{b1} a2, b1 + b2)
    n = G.modulus
    s = _alpha_pows(G.alpha, G.p, n)[e1.b]
    return VecElement(
        tuple((a1 + s * a2) % n for a1, a2 in zip(e1.a, e2.a)),
        (e1.b + e2.b) % G.p,
    )


def vec_invert(G: ZmGroupSpec, e: VecElement) -> VecElement:
    n = G.modulus
    s = _alpha_pows(G.alpha, G.p, n)[(-e.b) % G.p]
    return VecElement(tuple((-s * ai) % n for ai in e.a), (-e.b) % G.p)


def vec_power(G: ZmGroupSpec, e: VecElement, c: int) -> VecElement:
    if c < 0:
        return vec_power(G, vec_invert(G, e), -c)
    acc = vec_identity(G)
    base = e
    while c:
        if c & 1:
            acc = vec_compose(G, acc, base)
        base = vec_compose(G, base, base)
        c >>= 1
    return acc


def vec_elements(G: ZmGroupSpec) -> list[VecElement]:
    n = G.modulus
    out = []
    for coords in _cartesian(*(range(n) for _ in range(G.m))):
        for b in range(G.p):
            out.append(VecElement(coords, b))
    return out


def vec_subgroup_elements(G: ZmGroupSpec, gens) -> tuple[VecElement, ...]:
    """Closure of a generator list, sorted."""
    seen = {vec_identity(G)}
    frontier = [vec_identity(G)]
    gens = list(gens)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                w = vec_compose(G, h, g)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return tuple(sorted(seen))


def vec_table(G: ZmGroupSpec) -> GroupTable:
    std = tuple(
        VecElement(tuple(1 if j == i else 0 for j in range(G.m)), 0) for i in range(G.m)
    ) + (VecElement((0,) * G.m, 1),)
    return GroupTable(
        name=f"vec({G.p}^{G.r})^{G.m}:{G.p}",
        spec=G,
        elements=tuple(vec_elements(G)),
        identity=vec_identity(G),
        mul=lambda g, h: vec_compose(G, g, h),
        inv=lambda g: vec_invert(G, g),
        standard_generators=std,
    )


@dataclass(frozen=True)
class VecInstance:
    """A hiding instance plus typed generator handles.

    ``a_handles`` encode generators of the abelian part A = Z_{p^r}^m x {0};
    ``y_handle`` encodes a generator of {0} x Z_p.  The split is part of the
    input promise; without it the solver could not aim its reductions.
    """

    instance: HiddenInstance
    a_handles: tuple[OpaqueHandle, ...]
    y_handle: OpaqueHandle

    @property
    def blackbox(self) -> BlackBox:
        return self.instance.blackbox

    @property
    def spec(self) -> ZmGroupSpec:
        return self.blackbox.table.spec


def make_vec_instance(
    spec: ZmGroupSpec,
    subgroup,
    mode: str = "unique",
    generator_policy: str = "canonical",
    seed: int = 0,
) -> VecInstance:
    """Build a hiding instance with the typed generator split.

    'canonical' hands out the coordinate vectors x_1..x_m and y.
    'scrambled' draws random generating vectors for A and a random
    generator of the complement.  Unique encoding is mandatory.
    """
    if mode != "unique":
        raise ValueError("the vector-group solver requires unique encoding")
    table = vec_table(spec)
    inst, handles = make_hidden_instance(
        table, subgroup, mode=mode, generator_policy="canonical", seed=seed
    )
    bb = inst.blackbox
    if generator_policy == "canonical":
        return VecInstance(inst, tuple(handles[: spec.m]), handles[spec.m])
    if generator_policy != "scrambled":
        raise ValueError(f"unknown generator policy {generator_policy!r}")

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5C12A]))
    n, m = spec.modulus, spec.m
    for _ in range(500):
        k = m + int(rng.integers(0, 2))
        rows = tuple(
            tuple(int(rng.integers(0, n)) for _ in range(m)) for _ in range(k)
        )
        if lattice_is_full(Lattice((n,) * m, rows)):
            break
    else:
        raise RuntimeError("failed to draw a random generating set")
    a_handles = tuple(bb.encode(VecElement(row, 0), 0) for row in rows)
    y_elem = VecElement((0,) * m, int(rng.integers(1, spec.p)))
    return VecInstance(inst, a_handles, bb.encode(y_elem, 0))


@dataclass(frozen=True)
class ReductionMap:
    """Coordinate bijection (u_1..u_m, v) -> g'_1^{u_1} ... g'_m^{u_m} Y^v."""

    moduli: tuple[int, ...]
    gen_handles: tuple[OpaqueHandle, ...]  # the g'_i, each of order p^r
    y_handle: OpaqueHandle
    identity: OpaqueHandle

    def lift(self, bb: BlackBox, coords) -> OpaqueHandle:
        """Handle of the element at the given abelian coordinates."""
        if len(coords) != len(self.moduli):
            raise ValueError("coordinate width does not match the reduction domain")
        acc = self.identity
        for h, c in zip(self.gen_handles + (self.y_handle,), coords):
            acc = bb.oracle_mul(acc, oracle_pow(bb, h, int(c), self.identity))
        return acc


def minimal_generating_set(
    vin: VecInstance,
    rng: np.random.Generator,
    delta: float = 0.01,
    backend: str = "statevector",
) -> tuple[ReductionMap, dict]:
    """Distill the A-generator handles into m independent order-p^r generators.

    The relation lattice R = {u : a_1^{u_1} ... a_s^{u_s} = e} is itself a
    hidden-lattice problem whose oracle values are raw encoding bytes, so
    the abelian solver recovers it without touching the hiding function.
    A Smith decomposition of R then rebases the handles: the quotient
    Z^s / R must come out as m cyclic factors of order p^r exactly, or the
    inputs were not a generating set of A.
    """
    inst, bb = vin.instance, vin.blackbox
    spec = vin.spec
    n, m = spec.modulus, spec.m
    s = len(vin.a_handles)
    e = oracle_identity(bb, vin.y_handle)

    oracle = AbelianOracle.from_products(
        (n,) * s, bb, e, vin.a_handles, charge=lambda: inst.charge(0, 1)
    )
    res = abelian_hsp_solve(oracle, rng, delta=delta, backend=backend)

    basis = _lattice_basis(res.lattice)  # rows span the relation lattice
    cols = [list(col) for col in zip(*basis)]
    snf = smith_normal_form(cols, s)
    expect = sorted([1] * (s - m) + [n] * m)
    if sorted(snf.d) != expect:
        raise ValueError(
            "the abelian generator handles do not present a free module of "
            f"rank {m} over Z_{n}"
        )
    gens = []
    for i, d in enumerate(snf.d):
        if d != n:
            continue
        coeffs = [snf.uinv[j][i] for j in range(s)]
        acc = e
        for h, c in zip(vin.a_handles, coeffs):
            acc = bb.oracle_mul(acc, oracle_pow(bb, h, int(c) % n, e))
        gens.append(acc)
    rmap = ReductionMap(
        moduli=(n,) * m + (spec.p,),
        gen_handles=tuple(gens),
        y_handle=vin.y_handle,
        identity=e,
    )
    report = {
        "relation_lattice_gens": [list(g) for g in res.lattice.gens],
        "confident": res.confident,
        "samples_used": res.samples_used,
        "input_generators": s,
    }
    return rmap, report


def reduce_and_solve(
    vin: VecInstance,
    rmap: ReductionMap,
    rng: np.random.Generator,
    delta: float = 0.01,
    backend: str = "statevector",
) -> tuple[AbelianSolveResult, AbelianOracle]:
    """Solve the abelian problem F = f o pi over Z_{p^r}^m x Z_p."""
    oracle = AbelianOracle.from_handles(
        rmap.moduli,
        vin.instance,
        rmap.identity,
        rmap.gen_handles + (rmap.y_handle,),
    )
    return abelian_hsp_solve(oracle, rng, delta=delta, backend=backend), oracle


def pullback_generators(
    vin: VecInstance,
    rmap: ReductionMap,
    lat: Lattice,
    rng: np.random.Generator,
    count: int | None = None,
    max_rounds: int = 8,
) -> tuple[list[OpaqueHandle], bool]:
    """Map lattice points back through pi and keep what lands in H.

    Starts from the canonical basis, adds uniform lattice samples, filters
    by f, and closes under multiplication until the closure size matches
    the lattice size (pi is a bijection, so |H| = |L|).  Returns the
    surviving handles and whether the size check succeeded; failure means
    the lattice itself was wrong.
    """
    inst, bb = vin.instance, vin.blackbox
    target = lattice_size(lat)
    if count is None:
        count = len(lat.gens) + 4
    f0 = inst.f(rmap.identity)

    pool: list[OpaqueHandle] = []
    points = list(lat.gens)
    for _ in range(max_rounds):
        points.extend(lattice_sample(lat, rng) for _ in range(count))
        for pt in points:
            h = rmap.lift(bb, pt)
            if inst.f(h) == f0:
                pool.append(h)
        points = []
        # byte-keyed closure; valid because encoding is unique
        seen = {rmap.identity.data: rmap.identity}
        frontier = [rmap.identity]
        for h in pool:
            if h.data not in seen:
                seen[h.data] = h
                frontier.append(h)
        while frontier and len(seen) <= target:
            cur = frontier.pop()
            for h in pool:
                w = bb.oracle_mul(cur, h)
                if w.data not in seen:
                    seen[w.data] = w
                    frontier.append(w)
        if len(seen) == target:
            return list(seen.values()), True
        if len(seen) > target:
            break  # closure escaped the lattice size: the lattice is wrong
    return pool, False


@dataclass(frozen=True)
class VecSolveOutcome:
    generator_handles: tuple[OpaqueHandle, ...]
    generators: tuple[VecElement, ...]
    subgroup: tuple[VecElement, ...]
    confident: bool
    report: dict = field(hash=False)


def solve(
    vin: VecInstance,
    rng: np.random.Generator | None = None,
    delta: float = 0.01,
    backend: str = "statevector",
) -> VecSolveOutcome:
    """Recover the hidden subgroup of Z_{p^r}^m x| Z_p.

    Pipeline: rebase the abelian generators, solve the single reduced
    abelian instance, pull the lattice back through the reduction map.
    ``confident`` requires every stage to have verified its output; the
    result is then exact.  All returned elements pass the f-membership
    filter regardless.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError("delta must be in (0, 0.5]")
    if rng is None:
        rng = np.random.default_rng(0)
    bb = vin.blackbox
    if bb.salts != 1:
        raise ValueError("the vector-group solver requires unique encoding")
    spec = vin.spec

    # input-promise smoke check: the abelian handles must commute
    for i, h1 in enumerate(vin.a_handles):
        for h2 in vin.a_handles[i + 1 :]:
            if not bb.oracle_eq(bb.oracle_mul(h1, h2), bb.oracle_mul(h2, h1)):
                raise ValueError("the abelian generator handles do not commute")

    rmap, mgs_report = minimal_generating_set(vin, rng, delta=delta, backend=backend)
    res, _oracle = reduce_and_solve(vin, rmap, rng, delta=delta, backend=backend)
    handles, pulled_ok = pullback_generators(vin, rmap, res.lattice, rng)

    gens_out: list[VecElement] = []
    handles_out: list[OpaqueHandle] = []
    seen: set[VecElement] = set()
    for h in handles:
        g = bb.reveal(h)
        if g == vec_identity(spec) or g in seen:
            continue
        seen.add(g)
        gens_out.append(g)
        handles_out.append(h)
    subgroup = vec_subgroup_elements(spec, gens_out)

    confident = bool(mgs_report["confident"] and res.confident and pulled_ok)
    report = {
        "group": {"p": spec.p, "r": spec.r, "m": spec.m},
        "backend": backend,
        "delta": delta,
        "minimal_generating_set": mgs_report,
        "reduced_lattice_gens": [list(g) for g in res.lattice.gens],
        "reduced_confident": res.confident,
        "reduced_samples_used": res.samples_used,
        "pullback_ok": pulled_ok,
        "confident": confident,
        "queries": vin.instance.query_stats(),
    }
    return VecSolveOutcome(
        generator_handles=tuple(handles_out),
        generators=tuple(gens_out),
        subgroup=subgroup,
        confident=confident,
        report=report,
    )
