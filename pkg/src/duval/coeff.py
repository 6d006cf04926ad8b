"""Exact coefficient rings.

Four kinds are supported:

* prime fields F_p and their extensions F_{p^d},
* Galois rings GR(p^A, d) = (Z/p^A)[a]/(m(a)), the truncated Witt vectors
  of F_{p^d},
* arbitrary-precision rationals,
* number fields Q[w]/(m(w)) with deg m <= 3 (enough for Q(12^(1/3))).

Ring objects hold the structure; element data is plain immutable Python
data (int, tuple of ints, Fraction, tuple of Fractions) so that the
polynomial layer can treat coefficients as opaque dict values.
"""

from fractions import Fraction
from math import gcd

try:  # gmpy2's rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    QQ = Fraction

from .errors import (
    FieldTooLarge,
    NoRootInResidueField,
    NotAUnit,
    NotPrime,
    ReducibleModulus,
    RootOrderDividesP,
)

EXHAUSTIVE_ROOT_BOUND = 10 ** 6


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _int_nth_root(n, k):
    """Exact k-th root of non-negative integer n, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    lo, hi = 0, 1
    while hi ** k < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def _poly_mod_mul(u, v, modulus, q):
    """Multiply coefficient vectors mod (modulus, q); modulus is monic."""
    d = len(modulus) - 1
    prod = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    prod[i + j] = (prod[i + j] + a * b) % q
    for i in range(len(prod) - 1, d - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(d):
                prod[i - d + j] = (prod[i - d + j] - c * modulus[j]) % q
    return tuple(c % q for c in prod[:d])


class FiniteCoeff:
    """F_{p^d} when witt_precision == 1, otherwise GR(p^A, d).

    Elements are ints in [0, p^A) when d == 1 and tuples of such ints
    (coefficients of powers of the generator `a`) when d > 1.  Equality
    is representational equality of the canonical data.
    """

    kind = "finite"

    def __init__(self, p, witt_precision=1, degree=1, modulus=None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if witt_precision < 1:
            raise ValueError("witt_precision must be >= 1")
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.p = p
        self.witt_precision = witt_precision
        self.degree = degree
        self.q = p ** witt_precision
        if degree > 1:
            if modulus is None:
                modulus = lift_modulus(find_irreducible(p, degree), self.q)
            modulus = tuple(int(c) % self.q for c in modulus)
            if len(modulus) != degree + 1 or modulus[-1] != 1:
                raise ReducibleModulus("modulus must be monic of the stated degree")
            red = tuple(c % p for c in modulus)
            if not _is_irreducible(red, p):
                raise ReducibleModulus(
                    f"modulus reduces mod {p} to a reducible polynomial"
                )
            self.modulus = modulus
        else:
            self.modulus = None

    # -- structure ----------------------------------------------------

    @property
    def is_field(self):
        return self.witt_precision == 1

    @property
    def residue_char(self):
        return self.p

    def residue_ring(self):
        if self.is_field:
            return self
        mod = None
        if self.degree > 1:
            mod = tuple(c % self.p for c in self.modulus)
        return FiniteCoeff(self.p, 1, self.degree, mod)

    def residue(self, a):
        if self.degree == 1:
            return a % self.p
        return tuple(c % self.p for c in a)

    def lift(self, r):
        """Canonical digit lift from the residue field (entries in [0, p))."""
        return r

    def size(self):
        return self.q ** self.degree

    def __eq__(self, other):
        return (
            isinstance(other, FiniteCoeff)
            and (self.p, self.witt_precision, self.degree, self.modulus)
            == (other.p, other.witt_precision, other.degree, other.modulus)
        )

    def __hash__(self):
        return hash(("finite", self.p, self.witt_precision, self.degree, self.modulus))

    def __repr__(self):
        if self.is_field:
            return f"GF({self.p}^{self.degree})" if self.degree > 1 else f"GF({self.p})"
        base = f"GR({self.p}^{self.witt_precision}"
        return base + (f",{self.degree})" if self.degree > 1 else ")")

    # -- elements ------------------------------------------------------

    @property
    def zero(self):
        return 0 if self.degree == 1 else (0,) * self.degree

    @property
    def one(self):
        return 1 if self.degree == 1 else (1,) + (0,) * (self.degree - 1)

    def generator(self):
        if self.degree == 1:
            raise ValueError("prime ring has no extension generator")
        return (0, 1) + (0,) * (self.degree - 2)

    def from_int(self, n):
        n %= self.q
        return n if self.degree == 1 else (n,) + (0,) * (self.degree - 1)

    def is_zero(self, a):
        return a == 0 if self.degree == 1 else not any(a)

    def is_unit(self, a):
        if self.degree == 1:
            return a % self.p != 0
        return any(c % self.p for c in a)

    def add(self, a, b):
        if self.degree == 1:
            return (a + b) % self.q
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b):
        if self.degree == 1:
            return (a - b) % self.q
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def neg(self, a):
        if self.degree == 1:
            return (-a) % self.q
        q = self.q
        return tuple((-x) % q for x in a)

    def mul(self, a, b):
        if self.degree == 1:
            return (a * b) % self.q
        return _poly_mod_mul(a, b, self.modulus, self.q)

    def pow(self, a, n):
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def invert(self, a):
        if not self.is_unit(a):
            raise NotAUnit(f"{a!r} is not a unit in {self!r}")
        if self.degree == 1:
            return pow(a, -1, self.q)
        if self.is_field:
            return self._field_invert(a)
        # Hensel: lift the residue-field inverse through p, 2p, 4p, ...
        res = self.residue_ring()
        x = res.invert(self.residue(a))
        prec = 1
        while prec < self.witt_precision:
            two_ax = self.sub(self.from_int(2), self.mul(a, x))
            x = self.mul(x, two_ax)
            prec *= 2
        return x

    def _field_invert(self, a):
        # extended Euclid on coefficient vectors over F_p
        p = self.p
        r0 = list(self.modulus)
        r1 = list(a)
        s0, s1 = [0], [1]

        def deg(poly):
            for i in range(len(poly) - 1, -1, -1):
                if poly[i] % p:
                    return i
            return -1

        while deg(r1) > 0:
            d0, d1 = deg(r0), deg(r1)
            inv_lead = pow(r1[d1], -1, p)
            quot = {}
            r0w = r0[:]
            while d0 >= d1:
                c = (r0w[d0] * inv_lead) % p
                if c:
                    quot[d0 - d1] = c
                    for j in range(d1 + 1):
                        r0w[d0 - d1 + j] = (r0w[d0 - d1 + j] - c * r1[j]) % p
                d0 = deg(r0w)
            snew = list(s0) + [0] * (len(s1) + max(quot, default=0) + 1 - len(s0))
            for e, c in quot.items():
                for j, cc in enumerate(s1):
                    snew[e + j] = (snew[e + j] - c * cc) % p
            r0, r1, s0, s1 = r1, r0w, s1, snew
        d1 = deg(r1)
        if d1 != 0:
            raise NotAUnit(f"{a!r} is not a unit in {self!r}")
        c = pow(r1[0], -1, p)
        out = [0] * self.degree
        for j, cc in enumerate(s1):
            if j < self.degree:
                out[j] = (cc * c) % p
        return tuple(out)

    def elements(self):
        if self.degree == 1:
            yield from range(self.q)
            return
        idx = [0] * self.degree
        while True:
            yield tuple(idx)
            i = 0
            while i < self.degree:
                idx[i] += 1
                if idx[i] < self.q:
                    break
                idx[i] = 0
                i += 1
            else:
                return

    # -- roots ----------------------------------------------------------

    def kth_root(self, a, k):
        """Canonical k-th root of a unit; Hensel-lifted in Galois rings.

        Tie-breaking: if the residue of ``a`` is 1 the root with residue 1
        is returned, otherwise the root whose residue has the smallest
        canonical representative.
        """
        if k < 1:
            raise ValueError("k must be positive")
        if not self.is_unit(a):
            raise NotAUnit("k-th roots are only taken of units")
        if self.p > 0 and k % self.p == 0:
            raise RootOrderDividesP(f"gcd({k}, p) != 1")
        if a == self.one:
            return self.one
        res_ring = self.residue_ring()
        r = res_ring._field_kth_root(self.residue(a), k)
        if self.is_field:
            return r
        # Newton: x -> x - (x^k - a) / (k x^(k-1)), doubling precision
        x = self.lift(r)
        kk = self.from_int(k)
        prec = 1
        while prec < self.witt_precision:
            xk1 = self.pow(x, k - 1)
            fx = self.sub(self.mul(xk1, x), a)
            x = self.sub(x, self.mul(fx, self.invert(self.mul(kk, xk1))))
            prec *= 2
        return x

    def _field_kth_root(self, a, k):
        assert self.is_field
        if a == self.one:
            return self.one
        if self.size() > EXHAUSTIVE_ROOT_BOUND:
            if k == 2 and self.degree == 1:
                return self._tonelli_shanks(a)
            raise FieldTooLarge(
                f"exhaustive {k}-th root search refused for field of size {self.size()}"
            )
        roots = [c for c in self.elements() if self.pow(c, k) == a]
        if not roots:
            raise NoRootInResidueField(
                f"no {k}-th root of {a!r} in {self!r}",
                extension_degree=self.root_extension_degree(a, k),
            )
        return min(roots, key=self._sort_key)

    def _sort_key(self, a):
        return (a,) if self.degree == 1 else a

    def _tonelli_shanks(self, a):
        p = self.p
        if pow(a, (p - 1) // 2, p) != 1:
            raise NoRootInResidueField(
                f"no square root of {a} in GF({p})", extension_degree=2
            )
        if p % 4 == 3:
            r = pow(a, (p + 1) // 4, p)
            return min(r, p - r)
        s, e = p - 1, 0
        while s % 2 == 0:
            s //= 2
            e += 1
        n = 2
        while pow(n, (p - 1) // 2, p) != p - 1:
            n += 1
        x = pow(a, (s + 1) // 2, p)
        b = pow(a, s, p)
        g = pow(n, s, p)
        r = e
        while True:
            t, m = b, 0
            while t != 1:
                t = (t * t) % p
                m += 1
            if m == 0:
                return min(x, p - x)
            gs = pow(g, 2 ** (r - m - 1), p)
            x = (x * gs) % p
            b = (b * gs * gs) % p
            g = (gs * gs) % p
            r = m

    def root_extension_degree(self, a, k):
        """Smallest e such that a has a k-th root in F_{q^e}; a lives here."""
        assert self.is_field
        q = self.size()
        order = self._mult_order(a)
        for e in range(1, 2 * k + 13):
            qe = q ** e - 1
            if (qe // gcd(k, qe)) % order == 0:
                return e
        raise NoRootInResidueField(f"no small extension holds a {k}-th root")

    def _mult_order(self, a):
        q1 = self.size() - 1
        order = q1
        f = 2
        n = q1
        factors = []
        while f * f <= n:
            if n % f == 0:
                factors.append(f)
                while n % f == 0:
                    n //= f
            f += 1
        if n > 1:
            factors.append(n)
        for f in factors:
            while order % f == 0 and self.pow(a, order // f) == self.one:
                order //= f
        return order

    # -- canonical digits (used by the p -> Q rewrite) -------------------

    def digit_split(self, a):
        """Write a = digit + p * carry with digit entries in [0, p)."""
        p = self.p
        if self.degree == 1:
            return a % p, a // p
        digit = tuple(c % p for c in a)
        carry = tuple(c // p for c in a)
        return digit, carry

    def is_digit(self, a):
        p = self.p
        if self.degree == 1:
            return 0 <= a < p
        return all(0 <= c < p for c in a)

    # -- printing / parsing support --------------------------------------

    def coeff_components(self, a):
        """Nonzero (generator_power, prime-ring value) pairs of an element."""
        if self.degree == 1:
            return [(0, a)] if a else []
        return [(j, c) for j, c in enumerate(a) if c]

    def component_to_str(self, c):
        return str(c)

    def from_component_literal(self, text):
        if "/" in text:
            raise NotAUnit("fractional literals are not elements of a finite ring")
        return self.from_int(int(text))

    def gen_power(self, j):
        if j == 0:
            return self.one
        return self.pow(self.generator(), j)

    def descriptor(self):
        d = {"kind": "prime_field" if self.is_field else "galois_ring", "p": self.p}
        if not self.is_field:
            d["witt_precision"] = self.witt_precision
        if self.degree > 1:
            d["residue_degree"] = self.degree
            d["modulus"] = list(self.modulus)
        return d


def _is_irreducible(coeffs, p):
    """Trial-factorization irreducibility over F_p, desk scale only."""
    d = len(coeffs) - 1
    if d == 1:
        return True
    if p ** (d // 2 + 1) > 10 ** 5:
        raise FieldTooLarge("irreducibility check beyond desk scale")
    # no roots
    for r in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * r + c) % p
        if acc == 0:
            return False
    if d <= 3:
        return True
    # trial division by monic polynomials of degree 2 .. d//2
    for deg in range(2, d // 2 + 1):
        for idx in range(p ** deg):
            div = []
            n = idx
            for _ in range(deg):
                div.append(n % p)
                n //= p
            div.append(1)
            if _poly_divides(div, coeffs, p):
                return False
    return True


def _poly_divides(div, poly, p):
    rem = list(poly)
    dd = len(div) - 1
    while len(rem) - 1 >= dd:
        lead = rem[-1] % p
        if lead:
            shift = len(rem) - 1 - dd
            for j in range(dd + 1):
                rem[shift + j] = (rem[shift + j] - lead * div[j]) % p
        rem.pop()
    return not any(c % p for c in rem)


def find_irreducible(p, d):
    """Deterministic smallest monic irreducible of degree d over F_p."""
    for idx in range(p ** d):
        coeffs = []
        n = idx
        for _ in range(d):
            coeffs.append(n % p)
            n //= p
        coeffs.append(1)
        if coeffs[0] == 0:
            continue
        if _is_irreducible(tuple(coeffs), p):
            return tuple(coeffs)
    raise NotPrime(f"no irreducible of degree {d} over F_{p}")  # unreachable


def lift_modulus(field_modulus, q):
    """Lift an F_p modulus to Z/q with the same digit coefficients."""
    return tuple(int(c) % q for c in field_modulus)


class RationalCoeff:
    """The field Q; elements are fractions.Fraction in lowest terms."""

    kind = "rationals"
    is_field = True
    residue_char = 0
    degree = 1

    zero = QQ(0)
    one = QQ(1)

    def from_int(self, n):
        return QQ(n)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, n):
        return a ** n

    def invert(self, a):
        if a == 0:
            raise NotAUnit("0 is not a unit")
        return 1 / a

    def residue(self, a):
        return a

    def kth_root(self, a, k):
        if a == 0:
            raise NotAUnit("k-th roots are only taken of units")
        num = _int_nth_root(abs(a.numerator), k)
        den = _int_nth_root(a.denominator, k)
        if num is None or den is None or (a < 0 and k % 2 == 0):
            raise NoRootInResidueField(
                f"{a} has no exact {k}-th root in Q", extension_degree=k
            )
        root = QQ(num, den)
        if a < 0:
            root = -root
        return root

    def __eq__(self, other):
        return isinstance(other, RationalCoeff)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "QQ"

    def coeff_components(self, a):
        return [(0, a)] if a else []

    def component_to_str(self, c):
        return str(c)  # Fraction prints as num/den

    def from_component_literal(self, text):
        return QQ(text)

    def descriptor(self):
        return {"kind": "rationals", "p": 0}


class NumberFieldCoeff:
    """Q[w]/(m(w)) with m monic irreducible of degree <= 3.

    Elements are tuples of deg(m) Fractions.  The only instance the rest
    of the package needs is Q[w]/(w^3 - 12), where 12*w represents the
    real cube root of 2^8 * 3^4.
    """

    kind = "number_field"
    is_field = True
    residue_char = 0

    def __init__(self, modulus):
        modulus = tuple(QQ(c) for c in modulus)
        if len(modulus) < 3 or len(modulus) > 4 or modulus[-1] != 1:
            raise ReducibleModulus("modulus must be monic of degree 2 or 3")
        d = len(modulus) - 1
        # deg 2 or 3: irreducible over Q iff there is no rational root
        if _rational_roots(modulus):
            raise ReducibleModulus("modulus has a rational root")
        self.modulus = modulus
        self.degree = d
        self.zero = (QQ(0),) * d
        self.one = (QQ(1),) + (QQ(0),) * (d - 1)

    def generator(self):
        return (QQ(0), QQ(1)) + (QQ(0),) * (self.degree - 2)

    def from_int(self, n):
        return (QQ(n),) + (QQ(0),) * (self.degree - 1)

    def from_rational(self, a):
        return (QQ(a),) + (QQ(0),) * (self.degree - 1)

    def is_zero(self, a):
        return not any(a)

    def is_unit(self, a):
        return any(a)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        d = self.degree
        prod = [QQ(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        for i in range(len(prod) - 1, d - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(d):
                    prod[i - d + j] -= c * self.modulus[j]
        return tuple(prod[:d])

    def pow(self, a, n):
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def invert(self, a):
        if not self.is_unit(a):
            raise NotAUnit("0 is not a unit")
        # extended Euclid over Q[t]
        r0 = [QQ(c) for c in self.modulus]
        r1 = list(a)
        s0, s1 = [QQ(0)], [QQ(1)]

        def deg(poly):
            for i in range(len(poly) - 1, -1, -1):
                if poly[i]:
                    return i
            return -1

        while deg(r1) > 0:
            d0, d1 = deg(r0), deg(r1)
            r0w = list(r0)
            quot = {}
            while d0 >= d1:
                c = r0w[d0] / r1[d1]
                quot[d0 - d1] = c
                for j in range(d1 + 1):
                    r0w[d0 - d1 + j] -= c * r1[j]
                d0 = deg(r0w)
            snew = list(s0) + [QQ(0)] * (
                len(s1) + max(quot, default=0) + 1 - len(s0)
            )
            for e, c in quot.items():
                for j, cc in enumerate(s1):
                    snew[e + j] -= c * cc
            r0, r1, s0, s1 = r1, r0w, s1, snew
        c = 1 / r1[deg(r1)]
        out = [QQ(0)] * self.degree
        for j, cc in enumerate(s1):
            if j < self.degree:
                out[j] = cc * c
        return tuple(out)

    def residue(self, a):
        return a

    def kth_root(self, a, k):
        """Roots of rational elements and of rational multiples of powers
        of the generator; that covers every root this package extracts."""
        if not self.is_unit(a):
            raise NotAUnit("k-th roots are only taken of units")
        nonzero = [j for j, c in enumerate(a) if c]
        if len(nonzero) == 1:
            j = nonzero[0]
            # candidate roots c * w^i with (c*w^i)^k = a
            for i in range(self.degree):
                wik = self.pow(self.generator(), i * k) if i else self.one
                probe = [jj for jj, c in enumerate(wik) if c]
                if len(probe) == 1 and probe[0] == j:
                    ratio = a[j] / wik[j]
                    try:
                        c = RationalCoeff().kth_root(ratio, k)
                    except NoRootInResidueField:
                        continue
                    root = [QQ(0)] * self.degree
                    root[i] = c
                    return tuple(root)
        raise NoRootInResidueField(
            f"no {k}-th root of {a} found in this number field", extension_degree=k
        )

    def __eq__(self, other):
        return isinstance(other, NumberFieldCoeff) and self.modulus == other.modulus

    def __hash__(self):
        return hash(("number_field", self.modulus))

    def __repr__(self):
        return f"QQ[w]/{self.modulus}"

    def coeff_components(self, a):
        return [(j, c) for j, c in enumerate(a) if c]

    def component_to_str(self, c):
        return str(c)

    def from_component_literal(self, text):
        return self.from_rational(QQ(text))

    def gen_power(self, j):
        return self.pow(self.generator(), j) if j else self.one

    def descriptor(self):
        return {
            "kind": "number_field",
            "p": 0,
            "modulus": [str(c) for c in self.modulus],
        }


def _rational_roots(modulus):
    """Rational roots of a monic polynomial with rational coefficients."""
    from functools import reduce

    denlcm = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in modulus))
    ints = [int(c * denlcm) for c in modulus]
    lead, const = ints[-1], ints[0]
    if const == 0:
        return [QQ(0)]
    roots = []
    for pnum in _divisors(abs(const)):
        for pden in _divisors(abs(lead)):
            for sign in (1, -1):
                cand = QQ(sign * pnum, pden)
                acc = QQ(0)
                for c in reversed(modulus):
                    acc = acc * cand + c
                if acc == 0:
                    roots.append(cand)
    return roots


def _divisors(n):
    out = []
    f = 1
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            if f != n // f:
                out.append(n // f)
        f += 1
    return sorted(out)


def cubic12_field():
    """The fixed E8 coefficient field Q[w]/(w^3 - 12)."""
    return NumberFieldCoeff((-12, 0, 0, 1))


def ring_make(kind, p=None, witt_precision=None, degree=None, modulus=None):
    """Build a coefficient ring descriptor from config-level data."""
    if kind == "prime_field":
        return FiniteCoeff(p, 1, degree or 1, modulus)
    if kind == "galois_ring":
        return FiniteCoeff(p, witt_precision or 1, degree or 1, modulus)
    if kind == "rationals":
        return RationalCoeff()
    if kind == "number_field":
        if modulus is None:
            return cubic12_field()
        return NumberFieldCoeff(modulus)
    raise ValueError(f"unknown ring kind {kind!r}")
