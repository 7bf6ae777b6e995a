"""Binary quadratic forms: reduction, class numbers, Heegner forms, CM data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arith import (
    DomainError,
    Residue,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    power_residue,
    primitive_root,
)


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c)

    def as_tuple(self):
        return (self.a, self.b, self.c)


@dataclass
class ClassGroupData:
    disc: int
    class_number: int
    representatives: list[QuadForm]
    character_orders: list[int] = field(default_factory=list)
    imprimitive: list[QuadForm] = field(default_factory=list)
    cycles: list[list[QuadForm]] = field(default_factory=list)


# ---------------------------------------------------------------- definite


def _normalize(a, b, c):
    # move b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce_definite(f: QuadForm) -> QuadForm:
    """Unique reduced representative of a positive definite form."""
    if f.disc >= 0 or f.a <= 0:
        raise DomainError(f"{f} is not positive definite")
    a, b, c = _normalize(f.a, f.b, f.c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return QuadForm(a, b, c)


def reduced_forms_definite(disc: int) -> list[QuadForm]:
    """All reduced forms of a negative discriminant, primitive or not."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise DomainError(f"bad negative discriminant {disc}")
    out = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            out.append(QuadForm(a, b, c))
    return out


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition of two primitive forms of the same discriminant.

    The result is not reduced.
    """
    D = f.disc
    if g.disc != D:
        raise DomainError("forms have different discriminants")
    a1, b1, c1 = f.as_tuple()
    a2, b2, c2 = g.as_tuple()
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return QuadForm(a3, b3, c3)


def _xgcd(a, b):
    """(g, u, v) with u*a + v*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qq = a // b
        a, b = b, a - qq * b
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def principal_form(disc: int) -> QuadForm:
    k = disc % 2
    return QuadForm(1, k, (k - disc) // 4)


def class_order(f: QuadForm) -> int:
    e = reduce_definite(principal_form(f.disc))
    g = reduce_definite(f)
    cur, k = g, 1
    while cur != e:
        cur = reduce_definite(compose(cur, g))
        k += 1
    return k


def class_number_definite(disc: int) -> ClassGroupData:
    forms = reduced_forms_definite(disc)
    prim = [f for f in forms if f.is_primitive]
    orders = sorted(class_order(f) for f in prim)
    return ClassGroupData(
        disc=disc,
        class_number=len(prim),
        representatives=prim,
        character_orders=orders,
        imprimitive=[f for f in forms if not f.is_primitive],
    )


def cyclic_class_exponents(disc: int) -> tuple[QuadForm, dict[QuadForm, int]]:
    """Generator g and discrete logs e with C = g^e for a cyclic class group.

    Raises ``NotImplementedError`` for non-cyclic groups.
    """
    data = class_number_definite(disc)
    h = data.class_number
    gen = next((f for f in data.representatives if class_order(f) == h), None)
    if gen is None:
        raise NotImplementedError(f"class group of {disc} is not cyclic")
    logs = {}
    cur = reduce_definite(principal_form(disc))
    for e in range(h):
        logs[cur] = e
        cur = reduce_definite(compose(cur, gen))
    return gen, logs


def automorph_count(disc: int) -> int:
    return {-3: 6, -4: 4}.get(disc, 2)


@dataclass
class HeegnerReport:
    q: int
    distinct_classes: int
    expected: int
    primitive_indices: list[int]
    imprimitive_indices: list[int]
    criterion_holds: bool
    criterion_failures: list[tuple[int, int]]
    full_class_number: int

    @property
    def passed(self) -> bool:
        ok_imprim = len(self.imprimitive_indices) == (2 if self.q % 4 == 1 else 0)
        return self.distinct_classes == self.expected and self.criterion_holds and ok_imprim


def heegner_forms(q: int) -> list[QuadForm]:
    return [QuadForm(q * q, 2 * q * a, a * a + 1) for a in range(q)]


def heegner_point_count(q: int, check_criterion: bool = True) -> HeegnerReport:
    """Classes met by the forms (q^2, 2qa, a^2 + 1), a mod q.

    ``distinct_classes`` counts classes of primitive forms. The pairwise
    criterion (equivalent iff a1*a2 = -1 or a1 = a2 mod q) is checked on the
    primitive forms; for q = 1 mod 4 the two forms with a^2 = -1 are not
    primitive and are only reported.
    """
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise DomainError("q must be an odd prime")
    forms = heegner_forms(q)
    red = [reduce_definite(f) for f in forms]
    prim = [a for a in range(q) if forms[a].is_primitive]
    imprim = [a for a in range(q) if not forms[a].is_primitive]
    distinct = len({red[a] for a in prim})
    failures = []
    if check_criterion:
        for i, a1 in enumerate(prim):
            for a2 in prim[i:]:
                predicted = a1 == a2 or (a1 * a2 + 1) % q == 0
                if (red[a1] == red[a2]) != predicted:
                    failures.append((a1, a2))
    expected = (q + 1) // 2 if q % 4 == 3 else (q - 1) // 2
    full = class_number_definite(-4 * q * q).class_number
    return HeegnerReport(q, distinct, expected, prim, imprim, not failures, failures, full)


# -------------------------------------------------------------- indefinite


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_reduced_indefinite(f: QuadForm) -> bool:
    D = f.disc
    b, a2 = f.b, 2 * abs(f.a)
    if not (0 < b and b * b < D):
        return False
    if D >= (a2 + b) ** 2:  # need sqrt(D) - b < 2|a|
        return False
    t = a2 - b  # need 2|a| - b < sqrt(D)
    return t <= 0 or t * t < D


def reduced_forms_indefinite(D: int) -> list[QuadForm]:
    if D <= 0 or D % 4 not in (0, 1):
        raise DomainError(f"bad positive discriminant {D}")
    if _is_square(D):
        raise DomainError(f"{D} is a square")
    out = []
    r = math.isqrt(D)
    for b in range(1, r + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4  # a*c, negative
        for a_abs in range(1, -ac + 1):
            if ac % a_abs:
                continue
            for a in (a_abs, -a_abs):
                f = QuadForm(a, b, ac // a)
                if is_reduced_indefinite(f):
                    out.append(f)
    return sorted(set(out))


def rho(f: QuadForm) -> QuadForm:
    """Reduction operator: (a, b, c) -> (c, b', .) with b' = -b mod 2c."""
    D = f.disc
    c = f.c
    m = 2 * abs(c)
    r = math.isqrt(D)
    # largest b' = -b (mod 2|c|) with b' < sqrt(D)
    top = r if r * r < D else r - 1
    bp = top - ((top + f.b) % m)
    return QuadForm(c, bp, (bp * bp - D) // (4 * c))


def indefinite_class_number(D: int) -> ClassGroupData:
    """Narrow form class number of a positive non-square discriminant.

    Reduced forms are partitioned into rho-cycles; each cycle of primitive
    forms is one proper equivalence class.
    """
    forms = reduced_forms_indefinite(D)
    seen = set()
    cycles = []
    for f in forms:
        if f in seen or not f.is_primitive:
            continue
        cyc = []
        g = f
        while g not in seen:
            seen.add(g)
            cyc.append(g)
            g = rho(g)
        cycles.append(cyc)
    return ClassGroupData(
        disc=D,
        class_number=len(cycles),
        representatives=[c[0] for c in cycles],
        imprimitive=[f for f in forms if not f.is_primitive],
        cycles=cycles,
    )


def norm_minus_one_unit(D: int, bound: int = 10**6):
    """A solution of x^2 - D y^2 = -4 with 0 < y <= bound, or None."""
    for y in range(1, bound + 1):
        t = D * y * y - 4
        if _is_square(t):
            return math.isqrt(t), y
    return None


def represents(f: QuadForm, n: int, bound: int):
    """Search |x|, |y| <= bound for f(x, y) = n.

    Returns (True, (x, y)) or (False, None); False only means the search
    box was exhausted, not that n is provably not represented.
    """
    a, b, c = f.as_tuple()
    D = f.disc
    for y in range(-bound, bound + 1):
        if a == 0:
            if b * y != 0 and (n - c * y * y) % (b * y) == 0:
                x = (n - c * y * y) // (b * y)
                if abs(x) <= bound:
                    return True, (x, y)
            elif b * y == 0 and c * y * y == n:
                return True, (0, y)
            continue
        disc = D * y * y + 4 * a * n
        if disc < 0 or not _is_square(disc):
            continue
        r = math.isqrt(disc)
        for num in (-b * y + r, -b * y - r):
            if num % (2 * a) == 0:
                x = num // (2 * a)
                if abs(x) <= bound and f(x, y) == n:
                    return True, (x, y)
    return False, None


# ---------------------------------------------------------------- CM audit

CM_FIELD_DISC = 229
CM_SPLIT_PRIMES = (37, 53)


def cm_construction_audit(bound: int = 100) -> list[dict]:
    """Recheck every numerical claim behind the CM test vector.

    One entry per claim: {claim, location, result, witness}. A failed
    claim is reported with result False, never dropped.
    """
    D = CM_FIELD_DISC
    entries = []

    def add(claim, where, result, witness):
        entries.append({"claim": claim, "location": where,
                        "result": bool(result), "witness": witness})

    add("229 is a prime fundamental discriminant, 229 = 1 mod 4",
        "choice of the real quadratic field K",
        is_prime(D) and D % 4 == 1 and is_fundamental_discriminant(D),
        {"prime": is_prime(D), "mod4": D % 4, "fundamental": is_fundamental_discriminant(D)})

    cg = indefinite_class_number(D)
    unit = norm_minus_one_unit(D)
    add("K = Q(sqrt 229) has class number 3 (order-3 class character exists)",
        "class number of K",
        cg.class_number == 3 and unit is not None,
        {"narrow_class_number": cg.class_number,
         "cycles": [[f.as_tuple() for f in c] for c in cg.cycles],
         "norm_minus_one_solution": unit})

    g = primitive_root(D)
    # psi(g^k) = i^k; psi^2 must be the Legendre symbol
    psi_sq_ok = all(
        (1 if (k % 2 == 0) else -1) == kronecker(pow(g, k, D), D) for k in range(D - 1)
    )
    add("an order-4 character psi mod 229 exists and psi^2 is the Legendre symbol",
        "choice of the quartic twist psi",
        (D - 1) % 4 == 0 and kronecker(g, D) == -1 and psi_sq_ok,
        {"generator": g, "psi(g)": "i", "legendre(g|229)": kronecker(g, D),
         "checked_all_residues": psi_sq_ok})

    split = {p: kronecker(D, p) for p in CM_SPLIT_PRIMES}
    add("37 and 53 split in K", "choice of auxiliary primes q1, q2",
        all(v == 1 for v in split.values()), {str(p): v for p, v in split.items()})

    pf = QuadForm(1, 1, (1 - D) // 4)
    wit = {}
    ok = True
    for p in CM_SPLIT_PRIMES:
        found, xy = represents(pf, p, bound)
        sign = 1
        if not found:
            found, xy = represents(pf, -p, bound)
            sign = -1
        ok = ok and found
        wit[str(p)] = {"form": pf.as_tuple(), "value": sign * p, "xy": xy}
    add("primes above 37 and 53 are principal", "choice of auxiliary primes q1, q2", ok, wit)

    res = {p: pow(p, (D - 1) // 4, D) for p in CM_SPLIT_PRIMES}
    add("37 and 53 are 4th power residues mod 229", "triviality of psi at q1, q2",
        all(power_residue(Residue(p, D), 4) for p in CM_SPLIT_PRIMES),
        {f"{p}^57 mod 229": v for p, v in res.items()})
    return entries
