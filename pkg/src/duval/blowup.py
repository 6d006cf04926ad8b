"""Quadratic transforms in affine charts.

Chart transforms substitute v -> v*w for every variable v other than the
chart variable w and divide out w^multiplicity; the back-substitution
identity input(subs) == w^mult * strict holds exactly at the polynomial
level.  The non-normality witness implements the two rejection patterns
the classifier needs: f = x^2 + g with g of order >= 4 (witnessed in the
y-chart, where the strict transform lies in (x, y)^2), and the terminal
x^2 + y^3 + ... shape whose z-chart transform reduces to the first
pattern.
"""

from dataclasses import dataclass, field

from .coeff import FiniteCoeff
from .errors import ZeroInput
from .groebner import groebner_basis, membership
from .poly import Poly, PolyRing


def _as_poly(f):
    if isinstance(f, Poly):
        return f
    return f.poly  # Jet


def multiplicity(f):
    """Multiplicity at the origin; for hypersurfaces this is the order."""
    p = _as_poly(f)
    if p.is_zero():
        raise ZeroInput("multiplicity of the zero polynomial")
    return p.order()


@dataclass
class ChartTransform:
    chart: str
    multiplicity: int
    original: Poly
    strict: Poly

    def back_substitution_holds(self):
        ring = self.original.ring
        w = ring.var(self.chart)
        subs = {v: ring.var(v) * w for v in ring.variables if v != self.chart}
        lhs = self.original.substitute(subs)
        rhs = (w ** self.multiplicity) * self.strict
        return lhs == rhs


def strict_transform(f, chart):
    """Blow up the origin and take the proper preimage in one chart."""
    p = _as_poly(f)
    if p.is_zero():
        raise ZeroInput("strict transform of the zero polynomial")
    ring = p.ring
    i = ring.variables.index(chart)
    m = p.order()
    out = {}
    coeff = ring.coeff
    for mono, c in p.terms.items():
        total = sum(mono)
        new = list(mono)
        new[i] = total - m
        key = tuple(new)
        prev = out.get(key)
        out[key] = c if prev is None else coeff.add(prev, c)
    return ChartTransform(chart, m, p, Poly(ring, {m_: c for m_, c in out.items()
                                                   if not coeff.is_zero(c)}))


@dataclass
class NonNormalityWitness:
    """A chain of chart transforms ending in a strict transform that lies
    in the square of a height-one prime (x, w)."""

    steps: list
    prime_vars: tuple
    membership_checked: bool = field(default=False)

    @property
    def final(self):
        return self.steps[-1].strict

    def describe(self):
        return {
            "charts": [s.chart for s in self.steps],
            "prime": list(self.prime_vars),
            "final_strict_transform": str(self.final),
        }

    def verify(self):
        """Recompute the chain and the Q^2 membership from scratch."""
        current = self.steps[0].original
        for s in self.steps:
            redo = strict_transform(current, s.chart)
            if redo.strict != s.strict or not redo.back_substitution_holds():
                return False
            current = redo.strict
        return _in_prime_square(current, self.prime_vars)


def _in_prime_square(p, prime_vars):
    """p in (v1, v2)^2, checked monomially and by Groebner membership."""
    ring = p.ring
    idx = [ring.variables.index(v) for v in prime_vars]
    if any(m[idx[0]] + m[idx[1]] < 2 for m in p.terms):
        return False
    coeff = ring.coeff
    if isinstance(coeff, FiniteCoeff) and not coeff.is_field:
        res = coeff.residue_ring()
        res_ring = PolyRing(res, ring.variables)
        q = Poly(
            res_ring,
            {
                m: rc
                for m, c in p.terms.items()
                if not res.is_zero(rc := coeff.residue(c))
            },
        )
        ring2, p2 = res_ring, q
    else:
        ring2, p2 = ring, p
    v1, v2 = (ring2.var(v) for v in prime_vars)
    gens = [v1 * v1, v1 * v2, v2 * v2]
    return membership(p2, groebner_basis(gens, ring=ring2))


def _unit_coeff(ring, p, mono):
    c = p.terms.get(mono)
    if c is None:
        return False
    coeff = ring.coeff
    if isinstance(coeff, FiniteCoeff):
        return coeff.is_unit(c)
    return not coeff.is_zero(c)


def codim1_nonnormality_witness(f):
    """Witness that the blowup of S/(f) is not regular in codimension 1.

    Recognizes f with degree-2 part a unit times x^2 and no degree-3
    part (g of order 4), and the x^2 + unit*y^3 + ... shape whose
    z-chart transform has that form; returns None otherwise.
    """
    p = _as_poly(f)
    if p.is_zero() or p.order() != 2:
        return None
    ring = p.ring
    if len(ring.variables) != 3:
        return None
    x, y, z = ring.variables
    quad = p.graded_part(2)
    if set(quad.terms) != {(2, 0, 0)} or not _unit_coeff(ring, quad, (2, 0, 0)):
        return None
    cubic = p.graded_part(3)
    if cubic.is_zero():
        step = strict_transform(p, y)
        w = NonNormalityWitness([step], (x, y))
        w.membership_checked = _in_prime_square(step.strict, (x, y))
        return w if w.membership_checked else None
    if set(cubic.terms) == {(0, 3, 0)} and _unit_coeff(ring, cubic, (0, 3, 0)):
        first = strict_transform(p, z)
        inner = first.strict
        if inner.order() == 2 and inner.graded_part(2).terms.keys() == {(2, 0, 0)} and \
                inner.graded_part(3).is_zero():
            second = strict_transform(inner, y)
            w = NonNormalityWitness([first, second], (x, y))
            w.membership_checked = _in_prime_square(second.strict, (x, y))
            return w if w.membership_checked else None
    return None
