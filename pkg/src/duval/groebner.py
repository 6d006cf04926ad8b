"""Buchberger-based ideal engine over field coefficients.

Provides reduced Groebner bases (Gebauer-Moller pair elimination, normal
selection strategy), normal forms, ideal membership and equality,
elimination, saturation by the auxiliary-variable method, radical
membership, and vector-space dimension of zero-dimensional quotients.

Used as the verification oracle for the cyclic-cover and symbolic-power
claims; quotient rings are modeled by adjoining the defining equation to
every ideal.
"""

from .coeff import QQ
from functools import reduce as _reduce
from math import gcd

from .errors import AmbientMismatch, NonFieldCoefficients, NotZeroDimensional
from .poly import Poly, PolyRing


class MonomialOrder:
    """Total order on monomials: grevlex, lex, or an elimination block."""

    def __init__(self, kind, elim_count=0):
        if kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown order kind {kind!r}")
        if kind == "block" and elim_count < 1:
            raise ValueError("block order needs elim_count >= 1")
        self.kind = kind
        self.elim_count = elim_count if kind == "block" else 0

    def key(self, m):
        if self.kind == "lex":
            return m
        if self.kind == "grevlex":
            return (sum(m),) + tuple(-e for e in reversed(m))
        k = self.elim_count
        head, tail = m[:k], m[k:]
        return (
            (sum(head),)
            + tuple(-e for e in reversed(head))
            + (sum(tail),)
            + tuple(-e for e in reversed(tail))
        )

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and (self.kind, self.elim_count) == (other.kind, other.elim_count)
        )

    def __hash__(self):
        return hash((self.kind, self.elim_count))

    def __repr__(self):
        if self.kind == "block":
            return f"block({self.elim_count})"
        return self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


class IdealBasis:
    """A generator list with a monomial order; is_groebner marks reduced bases."""

    def __init__(self, ring, order, generators, is_groebner=False):
        self.ring = ring
        self.order = order
        self.generators = list(generators)
        self.is_groebner = is_groebner

    def __repr__(self):
        flag = "GB" if self.is_groebner else "gens"
        return f"IdealBasis({flag}: {[str(g) for g in self.generators]})"


def _monomial_div(m1, m2):
    """m1 / m2 as an exponent tuple, or None when m2 does not divide m1."""
    out = []
    for a, b in zip(m1, m2):
        if a < b:
            return None
        out.append(a - b)
    return tuple(out)


def _monomial_lcm(m1, m2):
    return tuple(a if a > b else b for a, b in zip(m1, m2))


def _monomial_mul(m1, m2):
    return tuple(a + b for a, b in zip(m1, m2))


def leading_monomial(p, order):
    return max(p.terms, key=order.key)


def _primitive(p):
    """Scale a char-0 polynomial to integer coefficients with content 1."""
    coeff = p.ring.coeff
    if coeff.kind not in ("rationals", "number_field"):
        return p
    comps = []
    for c in p.terms.values():
        if coeff.kind == "rationals":
            comps.append(c)
        else:
            comps.extend(c)
    dens = [x.denominator for x in comps if x]
    nums = [abs(x.numerator) for x in comps if x]
    if not nums:
        return p
    lcm = _reduce(lambda a, b: a * b // gcd(a, b), dens, 1)
    content = _reduce(gcd, nums)
    scale = QQ(lcm, content)
    if scale == 1:
        return p
    if coeff.kind == "rationals":
        return p.scale(scale)
    return p.scale(coeff.from_rational(scale))


def normal_form(p, basis, order):
    """Fully reduced normal form of p modulo a list of polynomials."""
    if not basis:
        return p
    ring = p.ring
    coeff = ring.coeff
    key = order.key
    prepared = []
    for g in basis:
        if g.is_zero():
            continue
        lm = leading_monomial(g, order)
        lc_inv = coeff.invert(g.terms[lm])
        rest = [(m, c) for m, c in g.terms.items() if m != lm]
        prepared.append((lm, lc_inv, rest))
    work = dict(p.terms)
    out = {}
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        if coeff.is_zero(c):
            continue
        hit = None
        for lm, lc_inv, rest in prepared:
            shift = _monomial_div(m, lm)
            if shift is not None:
                hit = (shift, lc_inv, rest)
                break
        if hit is None:
            out[m] = c
            continue
        shift, lc_inv, rest = hit
        factor = coeff.mul(c, lc_inv)
        for m2, c2 in rest:
            mm = _monomial_mul(m2, shift)
            prev = work.get(mm)
            delta = coeff.mul(factor, c2)
            if prev is None:
                work[mm] = coeff.neg(delta)
            else:
                s = coeff.sub(prev, delta)
                if coeff.is_zero(s):
                    del work[mm]
                else:
                    work[mm] = s
    return Poly(ring, out)


def s_polynomial(f, g, order):
    ring = f.ring
    coeff = ring.coeff
    lmf, lmg = leading_monomial(f, order), leading_monomial(g, order)
    lcm = _monomial_lcm(lmf, lmg)
    mf = _monomial_div(lcm, lmf)
    mg = _monomial_div(lcm, lmg)
    cf = coeff.invert(f.terms[lmf])
    cg = coeff.invert(g.terms[lmg])
    sf = Poly(ring, {_monomial_mul(m, mf): coeff.mul(c, cf) for m, c in f.terms.items()})
    sg = Poly(ring, {_monomial_mul(m, mg): coeff.mul(c, cg) for m, c in g.terms.items()})
    return sf - sg


def groebner_basis(gens, order=GREVLEX, ring=None):
    """Reduced Groebner basis; deterministic for a fixed order."""
    gens = [g for g in gens if not g.is_zero()]
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    if not ring.coeff.is_field:
        raise NonFieldCoefficients(f"{ring.coeff!r} is not a field")
    for g in gens:
        if g.ring != ring:
            raise AmbientMismatch("generators live in different ambients")
    if not gens:
        return IdealBasis(ring, order, [], is_groebner=True)

    # interreduce the input
    work = list(gens)
    while True:
        new = []
        for i, p in enumerate(work):
            r = normal_form(p, work[:i] + new, order)
            if not r.is_zero():
                new.append(_primitive(r))
        if len(new) == len(work):
            work = new
            break
        work = new
    basis = []
    lms = []
    active = set()
    pairs = set()

    def update(h):
        # Gebauer-Moller update of the pair set (Becker-Weispfenning, p. 230)
        nonlocal pairs, active
        hlm = leading_monomial(h, order)
        ih = len(basis)
        basis.append(h)
        lms.append(hlm)

        candidates = set(active)
        chosen = []
        while candidates:
            ig = min(candidates)
            candidates.discard(ig)
            lcm_hg = _monomial_lcm(hlm, lms[ig])
            disjoint = _monomial_mul(hlm, lms[ig]) == lcm_hg
            if disjoint or not (
                any(
                    _monomial_div(lcm_hg, _monomial_lcm(hlm, lms[ip])) is not None
                    for ip in candidates
                )
                or any(
                    _monomial_div(lcm_hg, _monomial_lcm(hlm, lms[ip])) is not None
                    for ip, _ in chosen
                )
            ):
                chosen.append((ig, disjoint))
        new_pairs = {(ig, ih) for ig, disjoint in chosen if not disjoint}

        kept = set()
        for (i, j) in pairs:
            lcm_ij = _monomial_lcm(lms[i], lms[j])
            if (
                _monomial_div(lcm_ij, hlm) is None
                or _monomial_lcm(lms[i], hlm) == lcm_ij
                or _monomial_lcm(lms[j], hlm) == lcm_ij
            ):
                kept.add((i, j))
        pairs = kept | new_pairs
        active = {ig for ig in active if _monomial_div(lms[ig], hlm) is None}
        active.add(ih)

    for g in sorted(work, key=lambda p: order.key(leading_monomial(p, order))):
        update(g)

    while pairs:
        i, j = min(pairs, key=lambda ij: order.key(_monomial_lcm(lms[ij[0]], lms[ij[1]])))
        pairs.discard((i, j))
        h = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if not h.is_zero():
            update(_primitive(h))

    # reduce: drop redundant leads, fully reduce tails, make monic
    coeff = ring.coeff
    order_of = sorted(range(len(basis)), key=lambda i: order.key(lms[i]))
    minimal = []
    minimal_lms = []
    for i in order_of:
        if any(_monomial_div(lms[i], lm) is not None for lm in minimal_lms):
            continue
        minimal.append(basis[i])
        minimal_lms.append(lms[i])
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = normal_form(g, others, order)
        if r.is_zero():
            continue
        lc = r.terms[leading_monomial(r, order)]
        reduced.append(r.scale(coeff.invert(lc)))
    reduced.sort(key=lambda p: order.key(leading_monomial(p, order)), reverse=True)
    return IdealBasis(ring, order, reduced, is_groebner=True)


def _as_groebner(ideal, order=None):
    if isinstance(ideal, IdealBasis):
        if ideal.is_groebner and (order is None or ideal.order == order):
            return ideal
        return groebner_basis(ideal.generators, order or ideal.order, ideal.ring)
    return groebner_basis(list(ideal), order or GREVLEX)


def membership(p, ideal):
    gb = _as_groebner(ideal)
    return normal_form(p, gb.generators, gb.order).is_zero()


def ideal_equal(i1, i2):
    g1 = _as_groebner(i1)
    g2 = _as_groebner(i2)
    return all(membership(g, g2) for g in g1.generators) and all(
        membership(g, g1) for g in g2.generators
    )


def is_unit_ideal(ideal):
    gb = _as_groebner(ideal)
    return len(gb.generators) == 1 and gb.generators[0].total_degree() == 0


def _with_aux_var(ring):
    name = "t_"
    while name in ring.variables:
        name += "_"
    return PolyRing(ring.coeff, (name,) + ring.variables), name


def _lift_to_aux(p, aux_ring):
    return Poly(aux_ring, {(0,) + m: c for m, c in p.terms.items()})


def _drop_aux(p, ring):
    return Poly(ring, {m[1:]: c for m, c in p.terms.items()})


def eliminate(ideal, count):
    """Generators of the ideal intersected with the subring that omits
    the first `count` variables."""
    gb = _as_groebner(ideal, MonomialOrder("block", count))
    kept = [g for g in gb.generators if all(sum(m[:count]) == 0 for m in g.terms)]
    return IdealBasis(gb.ring, GREVLEX, kept)


def saturate_by_poly(ideal, g):
    """I : g^infinity via Rabinowitsch's auxiliary variable."""
    base = _as_groebner(ideal)
    ring = base.ring
    aux, _ = _with_aux_var(ring)
    t = aux.var(aux.variables[0])
    gens = [_lift_to_aux(p, aux) for p in base.generators]
    gens.append(aux.one - t * _lift_to_aux(g, aux))
    elim = eliminate(IdealBasis(aux, GREVLEX, gens), 1)
    return groebner_basis([_drop_aux(p, ring) for p in elim.generators], GREVLEX, ring)


def intersect(i1, i2):
    """Ideal intersection via t*I + (1-t)*J, eliminating t."""
    a = _as_groebner(i1)
    b = _as_groebner(i2)
    ring = a.ring
    aux, _ = _with_aux_var(ring)
    t = aux.var(aux.variables[0])
    one_minus_t = aux.one - t
    gens = [t * _lift_to_aux(p, aux) for p in a.generators]
    gens += [one_minus_t * _lift_to_aux(p, aux) for p in b.generators]
    elim = eliminate(IdealBasis(aux, GREVLEX, gens), 1)
    return groebner_basis([_drop_aux(p, ring) for p in elim.generators], GREVLEX, ring)


def saturate(ideal, j_gens):
    """I : J^infinity, intersecting the single-generator saturations."""
    if isinstance(j_gens, IdealBasis):
        j_gens = j_gens.generators
    j_gens = list(j_gens)
    base = _as_groebner(ideal)
    if not j_gens:
        return base
    result = None
    for g in j_gens:
        if g.total_degree() == 0 and not g.is_zero():
            sat = base  # saturating by a unit changes nothing
        else:
            sat = saturate_by_poly(base, g)
        result = sat if result is None else intersect(result, sat)
    return _as_groebner(result)


def radical_membership(p, ideal):
    """p in sqrt(I), by 1 in I + (1 - t*p)."""
    base = _as_groebner(ideal)
    ring = base.ring
    aux, _ = _with_aux_var(ring)
    t = aux.var(aux.variables[0])
    gens = [_lift_to_aux(q, aux) for q in base.generators]
    gens.append(aux.one - t * _lift_to_aux(p, aux))
    return is_unit_ideal(groebner_basis(gens, GREVLEX, aux))


def quotient_by_poly(ideal, g):
    """The colon ideal I : (g), computed as intersect(I, (g)) / g."""
    inter = intersect(ideal, IdealBasis(_as_groebner(ideal).ring, GREVLEX, [g]))
    quot = [exact_div(p, g) for p in inter.generators]
    return groebner_basis(quot, GREVLEX, _as_groebner(ideal).ring)


def exact_div(p, g):
    """Quotient of an exact polynomial division; raises if not exact."""
    ring = p.ring
    coeff = ring.coeff
    order = GREVLEX
    lm = leading_monomial(g, order)
    lc_inv = coeff.invert(g.terms[lm])
    work = dict(p.terms)
    quot = {}
    while work:
        m = max(work, key=order.key)
        c = work.pop(m)
        shift = _monomial_div(m, lm)
        if shift is None:
            raise ValueError("division is not exact")
        factor = coeff.mul(c, lc_inv)
        quot[shift] = factor
        for m2, c2 in g.terms.items():
            mm = _monomial_mul(m2, shift)
            prev = work.get(mm, coeff.zero)
            s = coeff.sub(prev, coeff.mul(factor, c2))
            if coeff.is_zero(s):
                work.pop(mm, None)
            else:
                work[mm] = s
    return Poly(ring, quot)


def dim0_dimension(ideal):
    """Vector-space dimension of the quotient by a zero-dimensional ideal."""
    gb = _as_groebner(ideal, GREVLEX)
    ring = gb.ring
    if is_unit_ideal(gb):
        return 0
    lts = [leading_monomial(g, gb.order) for g in gb.generators]
    bounds = []
    for i in range(ring.nvars):
        pure = [m[i] for m in lts if sum(m) == m[i]]
        if not pure:
            raise NotZeroDimensional(
                f"no pure power of {ring.variables[i]} in the leading-term ideal"
            )
        bounds.append(min(pure))
    size = 1
    for b in bounds:
        size *= b
        if size > 10 ** 7:
            raise NotZeroDimensional("standard-monomial box too large")
    count = 0
    idx = [0] * ring.nvars
    while True:
        m = tuple(idx)
        if not any(_monomial_div(m, lt) is not None for lt in lts):
            count += 1
        i = 0
        while i < ring.nvars:
            idx[i] += 1
            if idx[i] < bounds[i]:
                break
            idx[i] = 0
            i += 1
        else:
            return count
