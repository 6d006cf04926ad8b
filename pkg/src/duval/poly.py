"""Sparse exact multivariate polynomials over any coeff ring.

Terms are stored as a dict mapping exponent tuples to nonzero canonical
coefficients.  Printing iterates in descending graded-reverse-lex order,
so str() is deterministic and parse(str(P)) == P.

The text grammar: terms joined by `+`/`-`; a term is an optional numeric
literal and `*`-separated factors `var` or `var^k`.  Numeric literals are
interpreted in the coefficient ring; `num/den` literals are accepted for
rational coefficients.  The names `a` (residue-field generator) and `w`
(number-field generator) are reserved coefficient atoms, not variables.
"""

import re

from .errors import AmbientMismatch, ParseError, UnknownVariable

RESERVED_NAMES = ("a", "w")


def _grevlex_key(m):
    total = 0
    for e in m:
        total += e
    return (total,) + tuple(-e for e in reversed(m))


class PolyRing:
    """A variable list over a coefficient ring."""

    def __init__(self, coeff, variables):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        for v in variables:
            if v in RESERVED_NAMES:
                raise ValueError(f"variable name {v!r} is reserved")
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise ValueError(f"bad variable name {v!r}")
        self.coeff = coeff
        self.variables = variables
        self.nvars = len(variables)
        self._index = {v: i for i, v in enumerate(variables)}
        # fast path for F_p / Z-p^A coefficients stored as plain ints
        self.int_modulus = getattr(coeff, "q", None) if getattr(coeff, "degree", 0) == 1 else None

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.coeff == other.coeff
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.coeff, self.variables))

    def __repr__(self):
        return f"PolyRing({self.coeff!r}, {list(self.variables)})"

    def poly(self, terms):
        clean = {m: c for m, c in terms.items() if not self.coeff.is_zero(c)}
        return Poly(self, clean)

    @property
    def zero(self):
        return Poly(self, {})

    @property
    def one(self):
        return Poly(self, {(0,) * self.nvars: self.coeff.one})

    def from_const(self, c):
        return self.poly({(0,) * self.nvars: c})

    def from_int(self, n):
        return self.from_const(self.coeff.from_int(n))

    def var(self, name):
        i = self._index.get(name)
        if i is None:
            raise UnknownVariable(f"unknown variable {name!r}")
        m = [0] * self.nvars
        m[i] = 1
        return self.poly({tuple(m): self.coeff.one})

    def monomial(self, exps, c=None):
        return self.poly({tuple(exps): self.coeff.one if c is None else c})

    def extend(self, new_variables):
        """Ring with extra variables appended (ambient extension)."""
        return PolyRing(self.coeff, self.variables + tuple(new_variables))

    def embed(self, p):
        """Re-home a poly from a ring whose variables are a prefix of ours."""
        if p.ring == self:
            return p
        if p.ring.coeff != self.coeff or p.ring.variables != self.variables[: p.ring.nvars]:
            raise AmbientMismatch("cannot embed between unrelated ambients")
        pad = self.nvars - p.ring.nvars
        return Poly(self, {m + (0,) * pad: c for m, c in p.terms.items()})

    def parse(self, text):
        return _parse(self, text)


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- basic queries ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def order(self):
        """Minimal total degree of a term; None for the zero polynomial."""
        if not self.terms:
            return None
        return min(sum(m) for m in self.terms)

    def total_degree(self):
        if not self.terms:
            return None
        return max(sum(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.coeff.zero)

    def graded_part(self, k):
        return Poly(self.ring, {m: c for m, c in self.terms.items() if sum(m) == k})

    def truncated(self, maxdeg):
        return Poly(self.ring, {m: c for m, c in self.terms.items() if sum(m) < maxdeg})

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.ring.coeff.zero)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise AmbientMismatch(f"{self.ring!r} vs {other.ring!r}")

    def __add__(self, other):
        self._check(other)
        coeff = self.ring.coeff
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = coeff.add(prev, c)
                if coeff.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
        return Poly(self.ring, out)

    def __sub__(self, other):
        self._check(other)
        coeff = self.ring.coeff
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = coeff.neg(c)
            else:
                s = coeff.sub(prev, c)
                if coeff.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
        return Poly(self.ring, out)

    def __neg__(self):
        coeff = self.ring.coeff
        return Poly(self.ring, {m: coeff.neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        return self.mul_truncated(other, None)

    def mul_truncated(self, other, maxdeg):
        """Product, dropping every term of total degree >= maxdeg."""
        self._check(other)
        ring = self.ring
        t1, t2 = self.terms, other.terms
        if not t1 or not t2:
            return ring.zero
        if len(t1) > len(t2):
            t1, t2 = t2, t1
        big = None if maxdeg is None else maxdeg
        q = ring.int_modulus
        out = {}
        get = out.get
        zadd = int.__add__
        if q is not None:
            if len(t1) == 1:
                (m1, c1), = t1.items()
                d1 = sum(m1)
                if big is not None and d1 >= big:
                    return ring.zero
                for m2, c2 in t2.items():
                    if big is not None and d1 + sum(m2) >= big:
                        continue
                    out[tuple(map(zadd, m1, m2))] = c1 * c2
                out = {m: v % q for m, v in out.items()}
                return Poly(ring, {m: v for m, v in out.items() if v})
            a = sorted(((sum(m), m, c) for m, c in t1.items()))
            b = sorted(((sum(m), m, c) for m, c in t2.items()))
            for d1, m1, c1 in a:
                if big is not None and d1 >= big:
                    break
                for d2, m2, c2 in b:
                    if big is not None and d1 + d2 >= big:
                        break
                    m = tuple(map(zadd, m1, m2))
                    v = get(m)
                    out[m] = c1 * c2 if v is None else v + c1 * c2
            out = {m: v % q for m, v in out.items()}
            return Poly(ring, {m: v for m, v in out.items() if v})
        coeff = ring.coeff
        mul = coeff.mul
        add = coeff.add
        a = sorted(((sum(m), m, c) for m, c in t1.items()))
        b = sorted(((sum(m), m, c) for m, c in t2.items()))
        for d1, m1, c1 in a:
            if big is not None and d1 >= big:
                break
            for d2, m2, c2 in b:
                if big is not None and d1 + d2 >= big:
                    break
                m = tuple(map(zadd, m1, m2))
                c = mul(c1, c2)
                prev = get(m)
                out[m] = c if prev is None else add(prev, c)
        return Poly(ring, {m: c for m, c in out.items() if not coeff.is_zero(c)})

    def scale(self, c):
        coeff = self.ring.coeff
        if coeff.is_zero(c):
            return self.ring.zero
        out = {}
        for m, v in self.terms.items():
            p = coeff.mul(v, c)
            if not coeff.is_zero(p):
                out[m] = p
        return Poly(self.ring, out)

    def __pow__(self, n):
        return self.pow_truncated(n, None)

    def pow_truncated(self, n, maxdeg):
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one
        base = self if maxdeg is None else self.truncated(maxdeg)
        while n:
            if n & 1:
                result = result.mul_truncated(base, maxdeg)
            n >>= 1
            if n:
                base = base.mul_truncated(base, maxdeg)
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    __hash__ = None

    # -- substitution ------------------------------------------------------

    def substitute(self, assignment, maxdeg=None):
        """Apply a ring homomorphism sending each variable to a polynomial.

        ``assignment`` maps variable names to polynomials which must all
        live in one common target ambient; unmapped variables must exist
        in the target under the same name.
        """
        return substitute_all([self], assignment, maxdeg=maxdeg, ring=self.ring)[0]

    def derivative(self, varname):
        i = self.ring._index.get(varname)
        if i is None:
            raise UnknownVariable(f"unknown variable {varname!r}")
        coeff = self.ring.coeff
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                nc = coeff.mul(c, coeff.from_int(e))
                if not coeff.is_zero(nc):
                    nm = m[:i] + (e - 1,) + m[i + 1 :]
                    prev = out.get(nm)
                    out[nm] = nc if prev is None else coeff.add(prev, nc)
        return Poly(self.ring, {m: c for m, c in out.items() if not coeff.is_zero(c)})

    def evaluate(self, values):
        """Full evaluation at a point given as {varname: coeff element}."""
        coeff = self.ring.coeff
        point = [values[v] for v in self.ring.variables]
        total = coeff.zero
        for m, c in self.terms.items():
            term = c
            for i, e in enumerate(m):
                if e:
                    term = coeff.mul(term, coeff.pow(point[i], e))
            total = coeff.add(total, term)
        return total

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending grevlex order."""
        return sorted(self.terms.items(), key=lambda mc: _grevlex_key(mc[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        coeff = self.ring.coeff
        gen_name = "w" if coeff.kind == "number_field" else "a"
        chunks = []
        for m, c in self.sorted_terms():
            for j, comp in sorted(coeff.coeff_components(c), reverse=True):
                sign = "+"
                if comp < 0:
                    sign, comp = "-", -comp
                factors = []
                if j:
                    factors.append(gen_name if j == 1 else f"{gen_name}^{j}")
                for name, e in zip(self.ring.variables, m):
                    if e:
                        factors.append(name if e == 1 else f"{name}^{e}")
                lit = coeff.component_to_str(comp)
                if not factors:
                    body = lit
                elif lit == "1":
                    body = "*".join(factors)
                else:
                    body = lit + "*" + "*".join(factors)
                chunks.append((sign, body))
        first_sign, first_body = chunks[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in chunks[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def substitute_all(polys, assignment, maxdeg=None, ring=None):
    """Substitute one assignment into several polynomials of a common
    ring, sharing the image power cache across all of them."""
    if ring is None:
        ring = polys[0].ring
    target = None
    for img in assignment.values():
        if target is None:
            target = img.ring
        elif img.ring != target:
            raise AmbientMismatch("substitution images live in different ambients")
    if target is None:
        target = ring
    images = []
    for v in ring.variables:
        if v in assignment:
            images.append(assignment[v])
        else:
            images.append(target.var(v))
    power_cache = [{} for _ in images]

    def img_power(i, e):
        cache = power_cache[i]
        got = cache.get(e)
        if got is not None:
            return got
        if e == 0:
            r = target.one
        elif e == 1:
            r = images[i]
        else:
            half = img_power(i, e // 2)
            r = half.mul_truncated(half, maxdeg)
            if e & 1:
                r = r.mul_truncated(images[i], maxdeg)
        cache[e] = r
        return r

    out = []
    for p in polys:
        if p.ring != ring:
            raise AmbientMismatch("polynomials live in different ambients")
        total = target.zero
        for m, c in p.terms.items():
            part = target.from_const(c)
            for i, e in enumerate(m):
                if e:
                    part = part.mul_truncated(img_power(i, e), maxdeg)
            total = total + part
        out.append(total)
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^]))"
)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        if m.lastgroup is None:
            break
        out.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _parse(ring, text):
    tokens = _tokenize(text)
    idx = 0

    def peek():
        return tokens[idx]

    def advance():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    coeff = ring.coeff
    gen_name = "w" if coeff.kind == "number_field" else "a"

    def parse_factor():
        kind, value, pos = advance()
        if kind == "num":
            try:
                return ring.from_const(coeff.from_component_literal(value))
            except Exception as exc:
                raise ParseError(f"bad numeric literal {value!r}: {exc}", position=pos)
        if kind != "name":
            raise ParseError(f"expected variable or number, got {value!r}", position=pos)
        exp = 1
        if peek()[0] == "op" and peek()[1] == "^":
            advance()
            k2, v2, p2 = advance()
            if k2 != "num" or "/" in v2:
                raise ParseError("exponent must be a positive integer", position=p2)
            exp = int(v2)
            if exp <= 0:
                raise ParseError("exponent must be a positive integer", position=p2)
        if value == gen_name and hasattr(coeff, "gen_power"):
            try:
                return ring.from_const(coeff.gen_power(exp))
            except Exception as exc:
                raise ParseError(f"cannot use generator {value!r}: {exc}", position=pos)
        if value in RESERVED_NAMES:
            raise UnknownVariable(
                f"{value!r} is reserved and not meaningful over {coeff!r}", position=pos
            )
        if value not in ring._index:
            raise UnknownVariable(f"unknown variable {value!r}", position=pos)
        base = ring.var(value)
        return base ** exp

    def parse_term():
        p = parse_factor()
        while peek()[0] == "op" and peek()[1] == "*":
            advance()
            p = p * parse_factor()
        return p

    total = ring.zero
    sign = 1
    kind, value, pos = peek()
    if kind == "op" and value in "+-":
        advance()
        sign = -1 if value == "-" else 1
    if peek()[0] == "end":
        raise ParseError("empty polynomial", position=pos)
    while True:
        term = parse_term()
        total = total - term if sign == -1 else total + term
        kind, value, pos = peek()
        if kind == "end":
            return total
        if kind == "op" and value in "+-":
            advance()
            sign = -1 if value == "-" else 1
            continue
        raise ParseError(f"expected '+' or '-', got {value!r}", position=pos)
