"""Semidirect products Z_{p^r} x| Z_q and their concrete arithmetic.

A group is fixed by (p, q, r, alpha) where alpha = phi(1)(1) determines the
twisting automorphism: written multiplicatively with x generating Z_{p^r}
and y generating Z_q, the defining relation is  y x = x^alpha y,  and alpha
must satisfy alpha^q = 1 (mod p^r).  Elements are pairs (a, b) standing for
x^a y^b, with

    (a1, b1) * (a2, b2) = (a1 + a2 * alpha^b1 mod p^r, b1 + b2 mod q).

For q = p and alpha = p^(r-1) + 1 the group is the modular maximal-cyclic
group of order p^(r+1); those are the groups the hidden-subgroup solver in
``hsp_modular`` targets, and their full subgroup taxonomy lives here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .algebra import multiplicative_order


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


@dataclass(frozen=True, order=True)
class Element:
    """x^a y^b as the pair (a, b)."""

    a: int
    b: int


IDENTITY = Element(0, 0)


@dataclass(frozen=True)
class GroupSpec:
    """Parameters (p, q, r, alpha) of Z_{p^r} x| Z_q.

    Validated on construction: p, q prime, r >= 1, 0 <= alpha < p^r,
    gcd(alpha, p) = 1 and alpha^q = 1 (mod p^r).  Since q is prime this
    forces alpha to have multiplicative order exactly q, or alpha = 1
    (the direct product).
    """

    p: int
    q: int
    r: int
    alpha: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if not is_prime(self.q):
            raise ValueError(f"q = {self.q} is not prime")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        m = self.p**self.r
        if not 0 <= self.alpha < m:
            raise ValueError(f"alpha = {self.alpha} out of range for modulus {m}")
        if self.alpha % self.p == 0:
            raise ValueError(f"alpha = {self.alpha} is not a unit mod {m}")
        if pow(self.alpha, self.q, m) != 1:
            raise ValueError(
                f"alpha = {self.alpha} does not satisfy alpha^q = 1 mod {m}"
            )

    @property
    def modulus(self) -> int:
        return self.p**self.r

    @property
    def order(self) -> int:
        return self.p**self.r * self.q

    @property
    def is_modular(self) -> bool:
        """True for the modular maximal-cyclic parameterization."""
        return (
            self.q == self.p
            and self.r >= 2
            and self.alpha == self.p ** (self.r - 1) + 1
        )


def modular_group_spec(p: int, r: int) -> GroupSpec:
    """The modular maximal-cyclic group: q = p, alpha = p^(r-1) + 1."""
    if r < 2:
        raise ValueError("the modular maximal-cyclic family needs r >= 2")
    return GroupSpec(p=p, q=p, r=r, alpha=p ** (r - 1) + 1)


@lru_cache(maxsize=None)
def _alpha_powers(alpha: int, q: int, modulus: int) -> tuple[int, ...]:
    out = [1]
    for _ in range(q - 1):
        out.append(out[-1] * alpha % modulus)
    return tuple(out)


def check_element(G: GroupSpec, e: Element) -> None:
    if not (0 <= e.a < G.modulus and 0 <= e.b < G.q):
        raise ValueError(f"element {e} out of range for this group")


def compose(G: GroupSpec, e1: Element, e2: Element) -> Element:
    check_element(G, e1)
    check_element(G, e2)
    pw = _alpha_powers(G.alpha, G.q, G.modulus)
    return Element((e1.a + e2.a * pw[e1.b]) % G.modulus, (e1.b + e2.b) % G.q)


def invert(G: GroupSpec, e: Element) -> Element:
    check_element(G, e)
    pw = _alpha_powers(G.alpha, G.q, G.modulus)
    b_inv = (-e.b) % G.q
    return Element((-e.a * pw[b_inv]) % G.modulus, b_inv)


def power(G: GroupSpec, e: Element, c: int) -> Element:
    """e^c by square-and-multiply; negative c goes through the inverse."""
    if c < 0:
        return power(G, invert(G, e), -c)
    acc = IDENTITY
    base = e
    while c:
        if c & 1:
            acc = compose(G, acc, base)
        base = compose(G, base, base)
        c >>= 1
    return acc


def power_closed_form(G: GroupSpec, e: Element, c: int) -> Element:
    """(x^a y^b)^c = x^(a(c + C(c,2) b p^(r-1))) y^(bc), modular groups only.

    C(c,2) = c(c-1)/2.  Valid for c >= 0.
    """
    if not G.is_modular:
        raise ValueError("closed-form powering requires the modular parameterization")
    if c < 0:
        raise ValueError("closed form is stated for c >= 0")
    check_element(G, e)
    half = c * (c - 1) // 2
    exp = e.a * (c + half * e.b * G.p ** (G.r - 1))
    return Element(exp % G.modulus, (e.b * c) % G.q)


def element_order(G: GroupSpec, e: Element) -> int:
    check_element(G, e)
    acc = e
    n = 1
    while acc != IDENTITY:
        acc = compose(G, acc, e)
        n += 1
        if n > G.order:
            raise AssertionError("order search exceeded the group order")
    return n


def conjugate(G: GroupSpec, g: Element, h: Element) -> Element:
    """g h g^-1."""
    return compose(G, compose(G, g, h), invert(G, g))


def elements(G: GroupSpec) -> list[Element]:
    return [Element(a, b) for a in range(G.modulus) for b in range(G.q)]


def enumerate_alphas(p: int, q: int, r: int) -> set[int]:
    """All alpha != 1 of multiplicative order exactly q mod p^r.

    Straight search over the units; the classification layer asserts the
    case counts against this set, not the other way around.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if not is_prime(q):
        raise ValueError(f"q = {q} is not prime")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    m = p**r
    out = set()
    for a in range(2, m):
        if a % p == 0:
            continue
        if multiplicative_order(a, m) == q:
            out.add(a)
    return out


# Classification labels for Z_{p^r} x| Z_q with alpha of order q (or 1):
#   1  q-hedral            (q | p-1)
#   2  dihedral            (p = q = 2, alpha = 2^r - 1)
#   3  quasi-dihedral      (p = q = 2, r > 2, alpha = 2^(r-1) - 1)
#   4  modular             (q = p, alpha = p^(r-1) + 1; for p = 2 only r > 2)
#   5  direct product      (alpha = 1)
CLASS_NAMES = {
    1: "q-hedral",
    2: "dihedral",
    3: "quasi-dihedral",
    4: "modular-maximal-cyclic",
    5: "direct-product",
}


def classify(G: GroupSpec) -> int:
    if G.alpha == 1:
        return 5
    if G.q != G.p:
        # alpha of order q exists with q != p only when q | p - 1
        return 1
    if G.p != 2:
        return 4
    # p = q = 2: the three (or one) possible twists
    if G.alpha == 2**G.r - 1:
        return 2
    if G.alpha == 2 ** (G.r - 1) - 1:
        return 3
    if G.alpha == 2 ** (G.r - 1) + 1:
        return 4
    raise AssertionError("unreachable: alpha validated to have order q")


def iso_map(G_src: GroupSpec, G_dst: GroupSpec, e: Element) -> Element:
    """Image of e under the isomorphism G_src -> G_dst, (a, b) -> (a, b*i')
    where alpha_dst = alpha_src^i and i' = i^-1 mod q.

    Raises ValueError when the two specs are not in the same family.
    """
    if (G_src.p, G_src.q, G_src.r) != (G_dst.p, G_dst.q, G_dst.r):
        raise ValueError("isomorphism requires matching (p, q, r)")
    check_element(G_src, e)
    m = G_src.modulus
    exponent = None
    for i in range(1, G_src.q):
        if pow(G_src.alpha, i, m) == G_dst.alpha:
            exponent = i
            break
    if G_src.alpha == 1 and G_dst.alpha == 1:
        exponent = 1
    if exponent is None:
        raise ValueError("specs are not in the same isomorphism family")
    i_inv = pow(exponent, -1, G_src.q)
    return Element(e.a, e.b * i_inv % G_src.q)


# ---------------------------------------------------------------------------
# Subgroups of the modular maximal-cyclic groups


@dataclass(frozen=True)
class SubgroupDesc:
    """Structural or generator-list description of a subgroup.

    kind 'xpower'    <x^(p^i)>            field i, 0 <= i <= r
    kind 'xpowery'   <x^(p^i), y>         field i, 0 <= i <= r
    kind 'cyclicxy'  <x^(t p^j) y>        fields t, j, 0 <= j < r, 1 <= t < p
    kind 'generators' arbitrary generator list in ``gens``
    """

    kind: str
    i: int | None = None
    t: int | None = None
    j: int | None = None
    gens: tuple[Element, ...] | None = None

    @staticmethod
    def xpower(i: int) -> "SubgroupDesc":
        return SubgroupDesc(kind="xpower", i=i)

    @staticmethod
    def xpowery(i: int) -> "SubgroupDesc":
        return SubgroupDesc(kind="xpowery", i=i)

    @staticmethod
    def cyclicxy(t: int, j: int) -> "SubgroupDesc":
        return SubgroupDesc(kind="cyclicxy", t=t, j=j)

    @staticmethod
    def from_generators(gens) -> "SubgroupDesc":
        return SubgroupDesc(kind="generators", gens=tuple(gens))

    def label(self) -> str:
        if self.kind == "xpower":
            return f"xpower:{self.i}"
        if self.kind == "xpowery":
            return f"xpowery:{self.i}"
        if self.kind == "cyclicxy":
            return f"cyclicxy:{self.t},{self.j}"
        return "gens:" + ",".join(f"({g.a},{g.b})" for g in self.gens)


def subgroup_generators(G: GroupSpec, S: SubgroupDesc) -> list[Element]:
    if S.kind == "generators":
        for g in S.gens:
            check_element(G, g)
        return list(S.gens)
    if not G.is_modular:
        raise ValueError("structural subgroup tags require the modular parameterization")
    p, r = G.p, G.r
    if S.kind == "xpower":
        if not 0 <= S.i <= r:
            raise ValueError(f"xpower index {S.i} out of range")
        return [Element(p**S.i % G.modulus, 0)]
    if S.kind == "xpowery":
        if not 0 <= S.i <= r:
            raise ValueError(f"xpowery index {S.i} out of range")
        return [Element(p**S.i % G.modulus, 0), Element(0, 1)]
    if S.kind == "cyclicxy":
        if not (0 <= S.j < r and 1 <= S.t < p):
            raise ValueError(f"cyclicxy parameters ({S.t},{S.j}) out of range")
        return [Element(S.t * p**S.j, 1)]
    raise ValueError(f"unknown subgroup kind {S.kind!r}")


def subgroup_elements(G: GroupSpec, S: SubgroupDesc) -> list[Element]:
    """Element list by closure of the defining generators."""
    gens = subgroup_generators(G, S)
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                w = compose(G, h, g)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)


def enumerate_subgroups(G: GroupSpec) -> list[SubgroupDesc]:
    """The complete subgroup list of the modular group of order p^(r+1).

    Count: 2(r+1) + r(p-1).  Not valid for (p, r) = (2, 2), where extra
    subgroups outside this taxonomy exist (that group is dihedral).
    """
    if not G.is_modular:
        raise ValueError("subgroup taxonomy requires the modular parameterization")
    if (G.p, G.r) == (2, 2):
        raise ValueError("(p, r) = (2, 2) is outside the modular taxonomy")
    out = [SubgroupDesc.xpower(i) for i in range(G.r + 1)]
    out += [SubgroupDesc.xpowery(i) for i in range(G.r + 1)]
    out += [
        SubgroupDesc.cyclicxy(t, j)
        for j in range(G.r)
        for t in range(1, G.p)
    ]
    return out


@dataclass(frozen=True)
class SubgroupProperties:
    order: int
    abelian: bool
    normal: bool


def subgroup_properties(G: GroupSpec, S: SubgroupDesc) -> SubgroupProperties:
    """Order, commutativity and normality, decided by direct enumeration."""
    elems = subgroup_elements(G, S)
    elem_set = set(elems)
    abelian = True
    for i, g in enumerate(elems):
        for h in elems[i + 1 :]:
            if compose(G, g, h) != compose(G, h, g):
                abelian = False
                break
        if not abelian:
            break
    gens = subgroup_generators(G, S)
    normal = True
    for g in elements(G):
        for s in gens:
            if conjugate(G, g, s) not in elem_set:
                normal = False
                break
        if not normal:
            break
    return SubgroupProperties(order=len(elems), abelian=abelian, normal=normal)


def coset_id(G: GroupSpec, subgroup: list[Element], e: Element) -> Element:
    """Lexicographically least element of the left coset e * S."""
    check_element(G, e)
    return min(compose(G, e, s) for s in subgroup)
