"""Exact lattice algebra over products of residue rings.

A ``Lattice`` describes a subgroup of Z_{n_1} x ... x Z_{n_k} by generator
rows.  All computations lift to the integers, with the moduli appended as
extra relation rows, so canonical forms, membership tests, duals and sizes
are exact (no floating point, no overflow: Python integers).

The dual ``L*`` of a lattice L is the annihilator under the pairing
    <c, h> = sum_j c_j * h_j * (N / n_j)  mod N,      N = lcm(n_1..n_k),
i.e. the set of characters of the ambient group that are trivial on L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

# Desk-scale guards.  Moduli above MAX_MODULUS are refused outright; element
# enumeration refuses groups larger than ENUM_BOUND.
MAX_MODULUS = 2**63
ENUM_BOUND = 10**6


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) = s*a + t*b, g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk scale)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def multiplicative_order(a: int, n: int) -> int:
    """Least d >= 1 with a^d = 1 (mod n).

    Raises ValueError if gcd(a, n) != 1 ("not a unit") or n < 2.
    """
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    a %= n
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    phi = 1
    for p, e in _factorize(n).items():
        phi *= (p - 1) * p ** (e - 1)
    # Start from the group order and peel off prime factors while possible.
    d = phi
    for p in _factorize(phi):
        while d % p == 0 and pow(a, d // p, n) == 1:
            d //= p
    return d


# ---------------------------------------------------------------------------
# Lattices over Z_{n_1} x ... x Z_{n_k}


@dataclass(frozen=True)
class Lattice:
    """Subgroup of Z_{n_1} x ... x Z_{n_k} given by generator rows.

    Rows are stored reduced mod the moduli.  Construction does not
    canonicalize; use :func:`lattice_canonicalize` for a normal form whose
    row set is identical iff the subgroups are equal.
    """

    moduli: tuple[int, ...]
    gens: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        mods = tuple(int(n) for n in self.moduli)
        if not mods:
            raise ValueError("at least one modulus is required")
        for n in mods:
            if n < 1:
                raise ValueError(f"modulus must be >= 1, got {n}")
            if n > MAX_MODULUS:
                raise ValueError(f"modulus {n} exceeds the desk-scale bound")
        rows = []
        for row in self.gens:
            if len(row) != len(mods):
                raise ValueError(
                    f"generator row width {len(row)} does not match {len(mods)} moduli"
                )
            rows.append(tuple(int(x) % n for x, n in zip(row, mods)))
        object.__setattr__(self, "moduli", mods)
        object.__setattr__(self, "gens", tuple(rows))


def _echelon(rows: Iterable[Sequence[int]], width: int) -> list[list[int]]:
    """Hermite-style row echelon form of an integer row span.

    Pivots positive, entries above each pivot reduced into [0, pivot).
    Rows come back ordered by pivot column.
    """
    mat = [list(map(int, r)) for r in rows if any(r)]
    out: list[list[int]] = []
    for col in range(width):
        pivot = None
        rest: list[list[int]] = []
        for r in mat:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = _xgcd(pivot[col], r[col])
            pa, ra = pivot[col] // g, r[col] // g
            combined = [s * x + t * y for x, y in zip(pivot, r)]
            reduced = [pa * y - ra * x for x, y in zip(pivot, r)]
            pivot = combined
            if any(reduced):
                rest.append(reduced)
        if pivot is not None:
            if pivot[col] < 0:
                pivot = [-x for x in pivot]
            out.append(pivot)
        mat = rest
    for i in range(len(out)):
        c = next(j for j, x in enumerate(out[i]) if x)
        for above in range(i):
            q = out[above][c] // out[i][c]
            if q:
                out[above] = [x - q * y for x, y in zip(out[above], out[i])]
    return out


def _lattice_basis(L: Lattice) -> list[list[int]]:
    """Square upper-triangular integer basis of the lift of L.

    The lift is the preimage of L in Z^k; it contains diag(moduli), so the
    echelon form has exactly one pivot per column: basis[i][i] > 0.
    """
    k = len(L.moduli)
    rows = [list(r) for r in L.gens]
    for j, n in enumerate(L.moduli):
        row = [0] * k
        row[j] = n
        rows.append(row)
    basis = _echelon(rows, k)
    assert len(basis) == k
    return basis


def lattice_canonicalize(L: Lattice) -> Lattice:
    """Canonical form: equal subgroups yield identical row sets."""
    basis = _lattice_basis(L)
    rows = []
    for row in basis:
        reduced = tuple(x % n for x, n in zip(row, L.moduli))
        if any(reduced):
            rows.append(reduced)
    return Lattice(L.moduli, tuple(sorted(rows)))


def lattices_equal(L1: Lattice, L2: Lattice) -> bool:
    if L1.moduli != L2.moduli:
        raise ValueError("lattices live over different moduli")
    return lattice_canonicalize(L1).gens == lattice_canonicalize(L2).gens


def lattice_member(L: Lattice, v: Sequence[int]) -> bool:
    """True iff v (reduced mod the moduli) lies in L."""
    k = len(L.moduli)
    if len(v) != k:
        raise ValueError(f"vector width {len(v)} does not match {k} moduli")
    basis = _lattice_basis(L)
    w = [int(x) % n for x, n in zip(v, L.moduli)]
    for i in range(k):
        d = basis[i][i]
        if w[i] % d:
            return False
        q = w[i] // d
        if q:
            w = [x - q * y for x, y in zip(w, basis[i])]
    return not any(w)


def lattice_size(L: Lattice) -> int:
    """Number of elements of L, via the basis determinant."""
    basis = _lattice_basis(L)
    det = 1
    for i in range(len(basis)):
        det *= basis[i][i]
    total = 1
    for n in L.moduli:
        total *= n
    return total // det


def lattice_is_full(L: Lattice) -> bool:
    total = 1
    for n in L.moduli:
        total *= n
    return lattice_size(L) == total


def full_lattice(moduli: Sequence[int]) -> Lattice:
    k = len(moduli)
    rows = []
    for j in range(k):
        row = [0] * k
        row[j] = 1
        rows.append(tuple(row))
    return lattice_canonicalize(Lattice(tuple(moduli), tuple(rows)))


def trivial_lattice(moduli: Sequence[int]) -> Lattice:
    return Lattice(tuple(moduli), ())


def lattice_coset_rep(L: Lattice, v: Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of v + L (reduction against the basis)."""
    k = len(L.moduli)
    basis = _lattice_basis(L)
    w = [int(x) % n for x, n in zip(v, L.moduli)]
    for i in range(k):
        q = w[i] // basis[i][i]
        if q:
            w = [x - q * y for x, y in zip(w, basis[i])]
    return tuple(x % n for x, n in zip(w, L.moduli))


def lattice_elements(L: Lattice) -> list[tuple[int, ...]]:
    """All elements of L by closure (guarded by ENUM_BOUND)."""
    size = lattice_size(L)
    if size > ENUM_BOUND:
        raise ValueError(f"lattice with {size} elements exceeds the enumeration bound")
    mods = L.moduli
    zero = tuple(0 for _ in mods)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in L.gens:
                w = tuple((a + b) % n for a, b, n in zip(v, g, mods))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)


def lattice_sample(L: Lattice, rng) -> tuple[int, ...]:
    """Uniform random element of L.

    Draws each generator exponent uniformly mod N = lcm(moduli); the map
    (z_1..z_t) -> sum z_i g_i is a homomorphism from Z_N^t onto L, and the
    image of a uniform distribution under a surjective homomorphism of
    finite groups is uniform.
    """
    mods = L.moduli
    if not L.gens:
        return tuple(0 for _ in mods)
    N = math.lcm(*mods)
    out = [0] * len(mods)
    for g in L.gens:
        z = int(rng.integers(0, N))
        for j in range(len(mods)):
            out[j] = (out[j] + z * g[j]) % mods[j]
    return tuple(out)


def dual_lattice(L: Lattice) -> Lattice:
    """Annihilator lattice L* = {c : <c, h> = 0 mod N for all h in L}.

    Satisfies (L*)* = L and |L| * |L*| = prod(moduli).
    """
    mods = L.moduli
    k = len(mods)
    N = math.lcm(*mods)
    weights = [N // n for n in mods]
    rows = [[h[j] * weights[j] for j in range(k)] for h in L.gens]
    if not rows:
        return full_lattice(mods)
    snf = smith_normal_form(rows, k)
    gens = []
    for i in range(k):
        d = snf.d[i] if i < len(snf.d) else 0
        scale = N // math.gcd(d, N)
        gens.append(tuple(scale * snf.v[j][i] % mods[j] for j in range(k)))
    return lattice_canonicalize(Lattice(mods, tuple(gens)))


def solve_kernel(samples: Iterable[Sequence[int]], moduli: Sequence[int]) -> Lattice:
    """Joint kernel of sampled characters: {h : <c, h> = 0 for all samples c}.

    The pairing is symmetric, so this is the dual of the lattice the samples
    generate.  No samples means no constraints: the full lattice.
    """
    mods = tuple(moduli)
    return dual_lattice(Lattice(mods, tuple(tuple(s) for s in samples)))


# ---------------------------------------------------------------------------
# Smith normal form over Z, with transforms


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == diag(d) with U, V unimodular; uinv, vinv their inverses.

    d is nonnegative with d[i] | d[i+1] (zeros last).
    """

    d: tuple[int, ...]
    u: tuple[tuple[int, ...], ...]
    uinv: tuple[tuple[int, ...], ...]
    v: tuple[tuple[int, ...], ...]
    vinv: tuple[tuple[int, ...], ...]


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(rows: Sequence[Sequence[int]], width: int) -> SmithDecomposition:
    m, k = len(rows), width
    A = [list(map(int, r)) for r in rows]
    for r in A:
        if len(r) != k:
            raise ValueError("ragged matrix")
    U, Uinv = _eye(m), _eye(m)
    V, Vinv = _eye(k), _eye(k)

    def row_swap(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def row_add(i: int, j: int, c: int) -> None:
        # row i += c * row j
        A[i] = [x + c * y for x, y in zip(A[i], A[j])]
        U[i] = [x + c * y for x, y in zip(U[i], U[j])]
        for r in Uinv:
            r[j] -= c * r[i]

    def row_neg(i: int) -> None:
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def col_swap(i: int, j: int) -> None:
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def col_add(i: int, j: int, c: int) -> None:
        # col i += c * col j
        for r in A:
            r[i] += c * r[j]
        for r in V:
            r[i] += c * r[j]
        Vinv[j] = [x - c * y for x, y in zip(Vinv[j], Vinv[i])]

    rank = min(m, k)

    def diagonalize() -> None:
        for t in range(rank):
            # smallest-magnitude nonzero pivot in the trailing block
            best = None
            for i in range(t, m):
                for j in range(t, k):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return
            if best[0] != t:
                row_swap(t, best[0])
            if best[1] != t:
                col_swap(t, best[1])
            while True:
                dirty = False
                for i in range(t + 1, m):
                    if A[i][t]:
                        q = A[i][t] // A[t][t]
                        if q:
                            row_add(i, t, -q)
                        if A[i][t]:
                            row_swap(i, t)
                            dirty = True
                for j in range(t + 1, k):
                    if A[t][j]:
                        q = A[t][j] // A[t][t]
                        if q:
                            col_add(j, t, -q)
                        if A[t][j]:
                            col_swap(j, t)
                            dirty = True
                if not dirty:
                    break
            if A[t][t] < 0:
                row_neg(t)

    while True:
        diagonalize()
        # enforce zeros-last and the divisibility chain
        violation = False
        for i in range(rank - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a == 0 and b != 0:
                row_swap(i, i + 1)
                col_swap(i, i + 1)
                violation = True
                break
            if a != 0 and b % a != 0:
                col_add(i, i + 1, 1)
                violation = True
                break
        if not violation:
            break

    d = tuple(A[i][i] for i in range(rank))
    to_t = lambda M: tuple(tuple(r) for r in M)
    return SmithDecomposition(d, to_t(U), to_t(Uinv), to_t(V), to_t(Vinv))
