"""Classification of isolated double points into ADE normal forms.

Given a jet f of order 2 in a 3-variable presentation, the engine
produces a certificate: a unit u and a coordinate change c with
apply_change(u*f, c) literally equal to the target normal form mod m^N.
The certificate invariant is maintained in one-shot form (the change is
a single raw substitution applied once), so verify_certificate is a
single re-computation independent of the classification path.

Normal forms reached:

    x^2 + y^2 + z^(n+1)   A_n
    x^2 + y^2*z + z^(n-1) D_n
    x^2 + y^3 + z^4       E6
    x^2 + y^3 + y*z^3     E7
    x^2 + y^3 + z^5       E8

Inputs that fall outside the list are rejected with a machine-checkable
blowup witness (status not_rdp) or, when the deciding coefficient sits
above the precision, reported as precision_exceeded with a lower bound.
"""

from dataclasses import dataclass, field

from .blowup import codim1_nonnormality_witness
from .coeff import FiniteCoeff
from .errors import (
    CubicNeedsExtension,
    NoRootInResidueField,
    OrderNotTwo,
    SmallResidueCharacteristic,
)
from .localring import ChangeSequence, CoordinateChange, Jet, diagonalize_quadratic_part
from .poly import Poly


@dataclass(frozen=True)
class SingularityType:
    family: str
    n: int

    def __post_init__(self):
        ok = (
            (self.family == "A" and self.n >= 1)
            or (self.family == "D" and self.n >= 4)
            or (self.family == "E" and self.n in (6, 7, 8))
        )
        if not ok:
            raise ValueError(f"no ADE type {self.family}{self.n}")

    def __str__(self):
        return f"{self.family}{self.n}"


def normal_form_poly(ring, t):
    """The literal Theorem-B polynomial for a type, as a raw polynomial."""
    R = ring.poly_ring
    x, y, z = (R.var(v) for v in ring.variables)
    if t.family == "A":
        return x * x + y * y + z ** (t.n + 1)
    if t.family == "D":
        return x * x + y * y * z + z ** (t.n - 1)
    if t.n == 6:
        return x * x + y ** 3 + z ** 4
    if t.n == 7:
        return x * x + y ** 3 + y * z ** 3
    return x * x + y ** 3 + z ** 5


@dataclass
class Certificate:
    unit: Jet
    change: CoordinateChange
    normal_form: Jet
    precision: int


@dataclass
class ClassifyOutcome:
    status: str  # "determined" | "not_rdp" | "precision_exceeded"
    type: SingularityType | None = None
    certificate: Certificate | None = None
    witness: object | None = None
    bound: dict | None = None
    caveats: tuple = ()


class _Tracker:
    """Maintains unit, steps and g with g == apply_change(unit*f, change).

    The unit is a constant jet, so it commutes exactly with substitution
    and canonicalization in both modes, and the change is the recorded
    sequence of elementary steps; the certificate equation is verified by
    folding the same sequence.
    """

    def __init__(self, f):
        self.ring = f.ring
        self.f = f
        self.g = f
        self.unit_jet = f.ring.one
        self.steps = []

    def apply(self, images):
        step = CoordinateChange(self.ring, images)
        self.steps.append(step)
        self.g = step.apply(self.g)

    def mult_unit(self, w):
        if w.poly.total_degree() != 0:
            raise ValueError("certificate units are accumulated as constants")
        if not w.is_unit():
            raise ValueError("certificate units must be units")
        self.unit_jet = self.unit_jet * w
        self.g = self.g * w

    def final_change(self):
        return ChangeSequence(self.ring, self.steps)

    def certificate(self, claimed_type):
        nf = normal_form_poly(self.ring, claimed_type).truncated(self.ring.precision)
        if self.g.poly != nf:
            raise ArithmeticError(
                f"normalization ended at {self.g} instead of {claimed_type}"
            )
        return Certificate(self.unit_jet, self.final_change(), self.g, self.ring.precision)


def _determined(tr, t, caveats=()):
    return ClassifyOutcome(
        "determined", type=t, certificate=tr.certificate(t), caveats=tuple(caveats)
    )


# ---------------------------------------------------------------------------
# bucket helpers: jets live in 3 variables (x, y, z) = indices (0, 1, 2)


def _jet_from(tr, terms):
    return Jet(tr.ring, Poly(tr.ring.poly_ring, dict(terms)))


def _one_plus(tr, terms):
    one = tr.ring.poly_ring.one
    return Jet(tr.ring, Poly(tr.ring.poly_ring, dict(terms)) + one)


def _scale_image(tr, var, s):
    """Image var * s for a unit jet s."""
    return tr.ring.poly_ring.var(var).mul_truncated(s.poly, tr.ring.precision)


def _shift_image(tr, var, delta_poly):
    """Image var - delta."""
    return tr.ring.poly_ring.var(var) - delta_poly


def _half(tr):
    return tr.ring.coeff.invert(tr.ring.coeff.from_int(2))


def _integral_unit_fix(tr, c0, mult_exp, scale_exps):
    """Normalize a unit constant by u^a multiplication and per-variable
    u^b scalings with integer exponents; exact, needs no roots."""
    coeff = tr.ring.coeff
    R = tr.ring.poly_ring

    def power(e):
        return coeff.pow(c0, e) if e >= 0 else coeff.invert(coeff.pow(c0, -e))

    if mult_exp:
        tr.mult_unit(tr.ring.jet(R.from_const(power(mult_exp))))
    images = {}
    for var, e in scale_exps.items():
        if e:
            images[var] = R.var(var).scale(power(e))
    if images:
        tr.apply(images)


def _scale_z_to_constant(tr, delta, k):
    """Apply z -> s(z) z with s(0) = 1 so that the z-only coefficient jet
    delta of z^k becomes its own constant exactly; solved as a univariate
    fixpoint, no roots of the residue field needed."""
    ring = tr.ring
    R = ring.poly_ring
    N = ring.precision
    coeff = ring.coeff
    d0 = delta.constant_term()
    target_inv = coeff.invert(d0)
    zvar = R.var("z")
    s = R.one
    for _ in range(N + 2):
        cs = {"z": s.mul_truncated(zvar, N)}
        value = delta.substitute(cs, maxdeg=N).mul_truncated(
            s.pow_truncated(k, N), N
        ).scale(target_inv)
        err = value - R.one
        if err.is_zero():
            break
        u = _poly_root_one_plus(ring, value, k)
        if u is None:
            raise ArithmeticError("univariate rescale did not converge")
        s = s.mul_truncated(u, N)
    else:
        raise ArithmeticError("univariate rescale did not converge")
    if s != R.one:
        tr.apply({"z": s.mul_truncated(zvar, N)})
        return True
    return False


def _poly_root_one_plus(ring, p, k):
    """(1/p)^(1/k) for a raw polynomial p with constant term 1."""
    R = ring.poly_ring
    N = ring.precision
    coeff = ring.coeff
    kinv = coeff.invert(coeff.from_int(k))
    r = R.one
    for _ in range(N.bit_length() + 4):
        e = R.one - p.mul_truncated(r.pow_truncated(k, N), N)
        if e.is_zero():
            return r
        r = r + r.mul_truncated(e, N).scale(kinv)
    return None


# ---------------------------------------------------------------------------
# rank 3: type A1 (square absorption and the xyz cross term)


def _flow_rank3(tr):
    N = tr.ring.precision
    for _ in range(8 * N + 40):
        g = tr.g
        one = tr.ring.poly_ring.one
        U, V, W, Gx, Gy = {}, {}, {}, {}, {}
        for m, c in g.poly.terms.items():
            a, b, cz = m
            if a >= 2:
                U[(a - 2, b, cz)] = c
            elif a == 1:
                Gx[(0, b, cz)] = c
            elif b >= 2:
                V[(0, b - 2, cz)] = c
            elif b == 1:
                Gy[(0, 0, cz)] = c
            else:
                W[(0, 0, cz - 2)] = c
        if Gx or Gy:
            images = {}
            half = _half(tr)
            if Gx:
                gamma = Poly(tr.ring.poly_ring, Gx).scale(half)
                images["x"] = _shift_image(tr, "x", gamma)
            if Gy:
                gamma = Poly(tr.ring.poly_ring, Gy).scale(half)
                images["y"] = _shift_image(tr, "y", gamma)
            tr.apply(images)
            continue
        images = {}
        for bucket, var in ((U, "x"), (V, "y"), (W, "z")):
            bpoly = Poly(tr.ring.poly_ring, bucket)
            if bpoly != one:
                s = Jet(tr.ring, tr.ring.canonicalize(bpoly)).kth_root(2).invert()
                images[var] = _scale_image(tr, var, s)
        if images:
            tr.apply(images)
            continue
        return _determined(tr, SingularityType("A", 1))
    raise ArithmeticError("rank-3 normalization did not converge")


# ---------------------------------------------------------------------------
# rank 2: the A_n completing-squares loop


def _flow_rank2(tr):
    ring = tr.ring
    N = ring.precision
    one = ring.poly_ring.one
    for _ in range(10 * N + 40):
        g = tr.g
        U, V, Gx, Gy, Z = {}, {}, {}, {}, {}
        for m, c in g.poly.terms.items():
            a, b, cz = m
            if a >= 2:
                U[(a - 2, b, cz)] = c
            elif a == 1:
                Gx[(0, b, cz)] = c
            elif b >= 2:
                V[(0, b - 2, cz)] = c
            elif b == 1:
                Gy[(0, 0, cz)] = c
            else:
                Z[m] = c
        if Gx or Gy:
            images = {}
            half = _half(tr)
            if Gx:
                images["x"] = _shift_image(tr, "x", Poly(ring.poly_ring, Gx).scale(half))
            if Gy:
                images["y"] = _shift_image(tr, "y", Poly(ring.poly_ring, Gy).scale(half))
            tr.apply(images)
            continue
        images = {}
        for bucket, var in ((U, "x"), (V, "y")):
            bpoly = Poly(ring.poly_ring, bucket)
            if bpoly != one:
                s = Jet(ring, ring.canonicalize(bpoly)).kth_root(2).invert()
                images[var] = _scale_image(tr, var, s)
        if images:
            tr.apply(images)
            continue
        if not Z:
            return ClassifyOutcome(
                "precision_exceeded", bound={"family": "A", "n_at_least": N - 1}
            )
        k0 = min(m[2] for m in Z)
        delta = Poly(ring.poly_ring, {(0, 0, k - k0): c for (_, _, k), c in Z.items()})
        if delta == one:
            return _determined(tr, SingularityType("A", k0 - 1))
        coeff = ring.coeff
        d0 = delta.constant_term()
        if delta != ring.poly_ring.from_const(d0):
            _scale_z_to_constant(tr, delta, k0)
            continue
        if k0 % 2 == 1:
            # odd k0: u^(k0-1) * f with x, y shrunk by u^((k0-1)/2) and z by u
            # normalizes the leading z-coefficient without any square root
            _integral_unit_fix(
                tr, d0, k0 - 1,
                {"x": -(k0 - 1) // 2, "y": -(k0 - 1) // 2, "z": -1},
            )
            continue
        tr.mult_unit(tr.ring.jet(ring.poly_ring.from_const(coeff.invert(d0))))
    raise ArithmeticError("A-branch normalization did not converge")


# ---------------------------------------------------------------------------
# rank 1: cubic case split, then D or E


def _cubic_roots(field, b, c, d):
    """Roots with multiplicity of the monic t^3 + b t^2 + c t + d over a field.

    Returns (roots, split) where roots is a list of (root, multiplicity).
    """
    coeffs = [d, c, b, field.one]

    def eval_at(poly, t):
        acc = field.zero
        for cc in reversed(poly):
            acc = field.add(field.mul(acc, t), cc)
        return acc

    if field.residue_char == 0:
        candidates = _rational_candidates(field, coeffs)
    else:
        candidates = list(field.elements())
    found = {}
    order = []
    work = coeffs
    for r in candidates:
        while len(work) > 1 and field.is_zero(eval_at(work, r)):
            work = _synthetic_divide(field, work, r)
            if r not in found:
                order.append(r)
            found[r] = found.get(r, 0) + 1
        if len(work) == 1:
            break
    roots = [(r, found[r]) for r in order]
    split = sum(found.values()) == 3
    return roots, split


def _synthetic_divide(field, coeffs, r):
    """coeffs / (t - r) assuming r is a root; low-degree-first vectors."""
    n = len(coeffs) - 1
    out = [field.zero] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = field.add(coeffs[i], field.mul(carry, r))
    return out


def _rational_candidates(field, coeffs):
    """Rational root candidates of a monic cubic over Q or a number field."""
    from .coeff import QQ as Fraction

    number_field = field.kind == "number_field"
    rationals = []
    for c in coeffs:
        if number_field:
            comp = field.coeff_components(c)
            if any(j != 0 for j, _ in comp):
                return []  # irrational coefficients: no candidate search
            rationals.append(comp[0][1] if comp else Fraction(0))
        else:
            rationals.append(c)
    denlcm = 1
    for q in rationals:
        denlcm = denlcm * q.denominator // _gcd(denlcm, q.denominator)
    ints = [int(q * denlcm) for q in rationals]
    const, lead = ints[0], ints[-1]
    cands = {Fraction(0)}
    for pn in _divisors(abs(const)):
        for pd in _divisors(abs(lead)):
            cands.add(Fraction(pn, pd))
            cands.add(Fraction(-pn, pd))
    ordered = sorted(cands)
    if number_field:
        return [field.from_rational(q) for q in ordered]
    return ordered


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    if n == 0:
        return []
    out = []
    f = 1
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            if f != n // f:
                out.append(n // f)
        f += 1
    return sorted(out)


def _splitting_degree(field, nroots_found):
    if field.residue_char == 0:
        return None
    return {0: 3, 1: 2, 2: 1, 3: 1}[min(nroots_found, 3)]


def _field_has_i(field):
    try:
        field.kth_root(field.neg(field.one), 2)
        return True
    except NoRootInResidueField:
        return False


def _lcm(a, b):
    return a * b // _gcd(a, b)


def _flow_cubic(tr):
    ring = tr.ring
    p = ring.residue_char
    if p != 0 and p <= 3:
        raise SmallResidueCharacteristic(
            "the cubic branch needs residue characteristic > 3"
        )
    N = ring.precision
    res = ring.residue_field()
    coeff = ring.coeff
    names = ring.variables

    for _round in range(60):
        # eliminate x from the tail
        for _ in range(6 * N):
            g = tr.g
            U, Gx = {}, {}
            for m, c in g.poly.terms.items():
                a = m[0]
                if a >= 2:
                    U[(a - 2, m[1], m[2])] = c
                elif a == 1:
                    Gx[(0, m[1], m[2])] = c
            if Gx:
                gamma = Poly(ring.poly_ring, Gx).scale(_half(tr))
                tr.apply({"x": _shift_image(tr, "x", gamma)})
                continue
            upoly = Poly(ring.poly_ring, U)
            if upoly != ring.poly_ring.one:
                s = Jet(ring, ring.canonicalize(upoly)).kth_root(2).invert()
                tr.apply({"x": _scale_image(tr, "x", s)})
                continue
            break
        g = tr.g
        tail = Poly(ring.poly_ring, {m: c for m, c in g.poly.terms.items() if m != (2, 0, 0)})
        if tail.is_zero() or tail.order() >= 4:
            w = codim1_nonnormality_witness(g)
            if w is None or not w.verify():
                raise ArithmeticError("rejection witness failed to verify")
            return ClassifyOutcome("not_rdp", witness=w)
        cubic = tail.graded_part(3)
        # cubic coefficients a y^3 + b y^2 z + c y z^2 + d z^3 over the residue field
        def rc(mono):
            v = cubic.terms.get(mono, coeff.zero)
            if isinstance(coeff, FiniteCoeff):
                return coeff.residue(v)
            return v
        ra, rb, rcf, rd = rc((0, 3, 0)), rc((0, 2, 1)), rc((0, 1, 2)), rc((0, 0, 3))

        # literal shapes first
        if res.is_zero(ra) and res.is_zero(rcf) and not res.is_zero(rb):
            if res.is_zero(rd):
                if rb != res.one:
                    # integral rescale: z -> z / b makes the y^2 z unit 1 mod m
                    tr.apply({"z": ring.poly_ring.var("z").scale(res.invert(rb))})
                    continue
                out = _flow_D(tr)
                if out is not None:
                    return out
                continue
            if rb == rd:
                if rb != res.one:
                    # multiply by b^2 and shrink every variable by b: all three
                    # displayed coefficients become 1 mod m, no roots needed
                    w2 = res.mul(rb, rb)
                    inv = res.invert(rb)
                    tr.mult_unit(ring.jet(ring.poly_ring.from_const(w2)))
                    tr.apply(
                        {
                            v: ring.poly_ring.var(v).scale(inv)
                            for v in ring.variables
                        }
                    )
                    continue
                out = _flow_D(tr)
                if out is not None:
                    return out
                continue
            # rescale z to equalize the y^2 z and z^3 coefficients
            try:
                s = res.kth_root(res.mul(rb, res.invert(rd)), 2)
            except NoRootInResidueField as exc:
                raise CubicNeedsExtension(
                    "equalizing the D4 cubic needs a square root",
                    extension_degree=exc.extension_degree,
                ) from exc
            tr.apply({"z": ring.poly_ring.var("z").scale(s)})
            continue
        if res.is_zero(rb) and res.is_zero(rcf) and res.is_zero(rd) and not res.is_zero(ra):
            if ra != res.one:
                # multiply by a^2 and shrink x, y by a: the y^3 unit becomes
                # 1 mod m without extracting a cube root
                inv = res.invert(ra)
                tr.mult_unit(ring.jet(ring.poly_ring.from_const(res.mul(ra, ra))))
                tr.apply(
                    {
                        "x": ring.poly_ring.var("x").scale(inv),
                        "y": ring.poly_ring.var("y").scale(inv),
                    }
                )
                continue
            out = _flow_E(tr)
            if out is not None:
                return out
            continue

        # general position: factor the binary cubic over the residue field
        if res.is_zero(ra) and res.is_zero(rd):
            lines = [(res.one, res.zero), (res.zero, res.one), (rb, rcf)]
            if res.is_zero(rb) or res.is_zero(rcf):
                # yz(by + cz) degenerates to a double line
                if res.is_zero(rb):
                    double, single = (res.zero, res.one), (res.one, res.zero)
                else:
                    double, single = (res.one, res.zero), (res.zero, res.one)
                _apply_two_line_change(tr, double, single)
                continue
            _apply_three_line_change(tr, lines)
            continue
        if res.is_zero(ra):
            tr.apply({"y": ring.poly_ring.var("z"), "z": ring.poly_ring.var("y")})
            continue
        inv_a = res.invert(ra)
        roots, split = _cubic_roots(
            res, res.mul(rb, inv_a), res.mul(rcf, inv_a), res.mul(rd, inv_a)
        )
        if not split:
            raise CubicNeedsExtension(
                "the cubic form does not factor into lines over the residue field",
                extension_degree=_splitting_degree(res, sum(m for _, m in roots)),
            )
        mults = sorted(m for _, m in roots)
        if mults == [3]:
            lam = roots[0][0]
            if not res.is_zero(lam):
                tr.apply(
                    {
                        "y": ring.poly_ring.var("y")
                        + ring.poly_ring.var("z").scale(lam)
                    }
                )
                continue
            out = _flow_E(tr)
            if out is not None:
                return out
            continue
        if mults == [1, 2]:
            double = next(r for r, m in roots if m == 2)
            single = next(r for r, m in roots if m == 1)
            _apply_two_line_change(tr, (res.one, res.neg(double)), (res.one, res.neg(single)))
            continue
        lines = [(res.one, res.neg(r)) for r, _ in roots]
        _apply_three_line_change(tr, lines)
        continue
    raise ArithmeticError("cubic case analysis did not stabilize")


def _apply_two_line_change(tr, double, single):
    """Send the double line to y and the single line to z."""
    res = tr.ring.residue_field()
    mat = [[double[0], double[1]], [single[0], single[1]]]
    inv = _invert2(res, mat)
    _apply_plane_change(tr, inv)


def _apply_three_line_change(tr, lines):
    """Case 1 of the cubic split: distinct lines to y^2 z + z^3 shape."""
    res = tr.ring.residue_field()
    l1, l2, l3 = lines
    det = res.sub(res.mul(l1[0], l2[1]), res.mul(l1[1], l2[0]))
    if res.is_zero(det):
        raise ArithmeticError("line triple is not in general position")
    inv_det = res.invert(det)
    a1 = res.mul(res.sub(res.mul(l3[0], l2[1]), res.mul(l3[1], l2[0])), inv_det)
    a2 = res.mul(res.sub(res.mul(l1[0], l3[1]), res.mul(l1[1], l3[0])), inv_det)
    try:
        i_unit = res.kth_root(res.neg(res.one), 2)
    except NoRootInResidueField as exc:
        raise CubicNeedsExtension(
            "orthogonalizing three distinct lines needs a square root of -1",
            extension_degree=exc.extension_degree,
        ) from exc
    two = res.from_int(2)
    l1p = (res.mul(res.mul(two, a1), l1[0]), res.mul(res.mul(two, a1), l1[1]))
    l2p = (res.mul(res.mul(two, a2), l2[0]), res.mul(res.mul(two, a2), l2[1]))
    inv_2i = res.invert(res.mul(two, i_unit))
    ynew = (
        res.mul(res.sub(l1p[0], l2p[0]), inv_2i),
        res.mul(res.sub(l1p[1], l2p[1]), inv_2i),
    )
    znew = l3
    inv = _invert2(res, [list(ynew), list(znew)])
    _apply_plane_change(tr, inv)


def _invert2(field, mat):
    det = field.sub(field.mul(mat[0][0], mat[1][1]), field.mul(mat[0][1], mat[1][0]))
    inv_det = field.invert(det)
    return [
        [field.mul(mat[1][1], inv_det), field.neg(field.mul(mat[0][1], inv_det))],
        [field.neg(field.mul(mat[1][0], inv_det)), field.mul(mat[0][0], inv_det)],
    ]


def _apply_plane_change(tr, inv):
    """Apply the (y, z)-plane substitution with matrix entries from the
    residue field (their canonical representatives are valid coefficients)."""
    ring = tr.ring
    R = ring.poly_ring
    y, z = R.var("y"), R.var("z")
    images = {
        "y": y.scale(inv[0][0]) + z.scale(inv[0][1]),
        "z": y.scale(inv[1][0]) + z.scale(inv[1][1]),
    }
    coeff = ring.coeff
    images = {v: Poly(R, {m: c for m, c in img.terms.items() if not coeff.is_zero(c)})
              for v, img in images.items()}
    tr.apply(images)


# ---------------------------------------------------------------------------
# D branch


def _flow_D(tr):
    ring = tr.ring
    R = ring.poly_ring
    N = ring.precision
    one = R.one
    for _ in range(12 * N + 60):
        g = tr.g
        cubic = g.poly.graded_part(3)
        if any(m not in ((0, 2, 1), (0, 0, 3)) for m in cubic.terms):
            return None  # shape mutated; re-run the case analysis
        U, Gx, J, A, Y, Z = {}, {}, {}, {}, {}, {}
        for m, c in g.poly.terms.items():
            a, b, cz = m
            if a >= 2:
                U[(a - 2, b, cz)] = c
            elif a == 1:
                Gx[(0, b, cz)] = c
            elif b >= 2 and cz >= 1:
                J[(0, b - 2, cz - 1)] = c
            elif b >= 2:
                A[(0, b, 0)] = c
            elif b == 1:
                Y[(0, 0, cz)] = c
            else:
                Z[m] = c
        if Gx:
            tr.apply({"x": _shift_image(tr, "x", Poly(R, Gx).scale(_half(tr)))})
            continue
        upoly = Poly(R, U)
        if upoly != one:
            s = Jet(ring, ring.canonicalize(upoly)).kth_root(2).invert()
            tr.apply({"x": _scale_image(tr, "x", s)})
            continue
        jpoly = Poly(R, J)
        if jpoly != one:
            s = Jet(ring, ring.canonicalize(jpoly)).kth_root(2).invert()
            tr.apply({"y": _scale_image(tr, "y", s)})
            continue
        if A:
            shift = Poly(R, {(0, b - 2, 0): c for (_, b, _), c in A.items()})
            tr.apply({"z": _shift_image(tr, "z", shift)})
            continue
        if Y:
            if min(cz for (_, _, cz) in Y) < 2:
                return None  # a y*z term at degree 2 cannot occur; bail out
            shift = Poly(
                R, {(0, 0, cz - 1): c for (_, _, cz), c in Y.items()}
            ).scale(_half(tr))
            tr.apply({"y": _shift_image(tr, "y", shift)})
            continue
        if not Z:
            return ClassifyOutcome(
                "precision_exceeded", bound={"family": "D", "n_at_least": N + 1}
            )
        k0 = min(m[2] for m in Z)
        delta = Poly(R, {(0, 0, k - k0): c for (_, _, k), c in Z.items()})
        if delta == one:
            return _determined(tr, SingularityType("D", k0 + 1))
        d0 = delta.constant_term()
        if delta != R.from_const(d0):
            _scale_z_to_constant(tr, delta, k0)
            continue
        tr.mult_unit(tr.ring.jet(R.from_const(ring.coeff.invert(d0))))
    raise ArithmeticError("D-branch normalization did not converge")


# ---------------------------------------------------------------------------
# E branch


def _flow_E(tr):
    ring = tr.ring
    p = ring.residue_char
    if p != 0 and p <= 5:
        raise SmallResidueCharacteristic("the E branch needs residue characteristic > 5")
    R = ring.poly_ring
    N = ring.precision
    one = R.one
    third = ring.coeff.invert(ring.coeff.from_int(3))
    coeff = ring.coeff
    for _ in range(14 * N + 80):
        g = tr.g
        cubic = g.poly.graded_part(3)
        if any(m != (0, 3, 0) for m in cubic.terms):
            return None
        U, Gx, W3, A_low, D1, D2plus, Z = {}, {}, {}, {}, {}, {}, {}
        for m, c in g.poly.terms.items():
            a, b, cz = m
            if a >= 2:
                U[(a - 2, b, cz)] = c
            elif a == 1:
                Gx[(0, b, cz)] = c
            elif b >= 3:
                W3[(0, b - 3, cz)] = c
            elif b == 2 and cz in (1, 2):
                A_low[(0, 0, cz)] = c
            elif b == 2:
                D2plus[(0, b, cz)] = c
            elif b == 1:
                D1[(0, 0, cz)] = c
            else:
                Z[m] = c
        if Gx:
            tr.apply({"x": _shift_image(tr, "x", Poly(R, Gx).scale(_half(tr)))})
            continue
        upoly = Poly(R, U)
        if upoly != one:
            s = Jet(ring, ring.canonicalize(upoly)).kth_root(2).invert()
            tr.apply({"x": _scale_image(tr, "x", s)})
            continue
        wpoly = Poly(R, W3)
        if wpoly != one:
            s = Jet(ring, ring.canonicalize(wpoly)).kth_root(3).invert()
            tr.apply({"y": _scale_image(tr, "y", s)})
            continue
        if A_low:
            if min(cz for (_, _, cz) in A_low) < 1:
                return None
            # complete the cube against y^2 z^c terms with c < 3
            tr.apply({"y": _shift_image(tr, "y", Poly(R, A_low).scale(third))})
            continue
        if D1 and min(cz for (_, _, cz) in D1) < 3:
            return None
        if Z and min(m[2] for m in Z) < 4:
            return None
        zpoly = Poly(R, Z)
        eps0 = zpoly.terms.get((0, 0, 4), coeff.zero)
        del0 = D1.get((0, 0, 3), coeff.zero)
        sig0 = zpoly.terms.get((0, 0, 5), coeff.zero)
        if not coeff.is_zero(eps0):
            out = _finish_E6(tr, D1, D2plus, zpoly)
        elif not coeff.is_zero(del0):
            out = _finish_E7(tr, D1, D2plus, zpoly)
        elif not coeff.is_zero(sig0):
            out = _finish_E8(tr, D1, D2plus, zpoly)
        else:
            if D2plus:
                # fold remaining y^2 z^(>=3) terms away before rejecting
                tr.apply(
                    {
                        "y": _shift_image(
                            tr,
                            "y",
                            Poly(R, {(0, 0, cz): c for (_, _, cz), c in D2plus.items()}).scale(
                                third
                            ),
                        )
                    }
                )
                continue
            w = codim1_nonnormality_witness(tr.g)
            if w is None or not w.verify():
                raise ArithmeticError("terminal rejection witness failed to verify")
            return ClassifyOutcome("not_rdp", witness=w)
        if out is not None:
            return out
    raise ArithmeticError("E-branch normalization did not converge")


def _finish_E6(tr, D1, D2plus, zpoly):
    """One E6 move: normalize the z^4 coefficient, clear y^2 z^(>=3) by
    completing the cube, then complete the tesseract."""
    ring = tr.ring
    R = ring.poly_ring
    third = ring.coeff.invert(ring.coeff.from_int(3))
    zq = Poly(R, {(0, 0, k - 4): c for (_, _, k), c in zpoly.terms.items()})
    eps0 = zq.constant_term()
    if zq != R.from_const(eps0):
        _scale_z_to_constant(tr, zq, 4)
        return None
    if eps0 != ring.coeff.one:
        tr.mult_unit(tr.ring.jet(R.from_const(ring.coeff.invert(eps0))))
        return None
    if D2plus:
        tr.apply(
            {
                "y": _shift_image(
                    tr,
                    "y",
                    Poly(R, {(0, 0, cz): c for (_, _, cz), c in D2plus.items()}).scale(third),
                )
            }
        )
        return None
    if D1:
        quarter = ring.coeff.invert(ring.coeff.from_int(4))
        t = Poly(R, {(0, 1, k - 3): c for (_, _, k), c in D1.items()}).scale(quarter)
        tr.apply({"z": _shift_image(tr, "z", t)})
        return None
    return _determined(tr, SingularityType("E", 6))


def _finish_E7(tr, D1, D2plus, zpoly):
    """One E7 move: fold every y^(>=1) z^(>=3) term into the y z^3
    coefficient jet, rescale z by its cube root, then absorb the pure
    z-tail by shifting y."""
    ring = tr.ring
    R = ring.poly_ring
    u1_terms = {(0, 0, k - 3): c for (_, _, k), c in D1.items()}
    for (_, b, k), c in D2plus.items():
        u1_terms[(0, b - 1, k - 3)] = c
    u1 = Poly(R, u1_terms)
    coeff = ring.coeff
    d0 = u1.constant_term()
    if d0 != coeff.one:
        _integral_unit_fix(tr, d0, 12, {"x": -6, "y": -4, "z": -3})
        return None
    if u1 != R.one:
        s = Jet(ring, ring.canonicalize(u1)).kth_root(3).invert()
        tr.apply({"z": _scale_image(tr, "z", s)})
        return None
    if not zpoly.is_zero():
        shift = Poly(R, {(0, 0, k - 3): c for (_, _, k), c in zpoly.terms.items()})
        tr.apply({"y": _shift_image(tr, "y", shift)})
        return None
    return _determined(tr, SingularityType("E", 7), caveats=("completion",))


def _finish_E8(tr, D1, D2plus, zpoly):
    """One E8 move: normalize the z^5 coefficient, clear y^2 z^(>=3)
    terms, then complete the quintic against y z^(>=4)."""
    ring = tr.ring
    R = ring.poly_ring
    third = ring.coeff.invert(ring.coeff.from_int(3))
    zq = Poly(R, {(0, 0, k - 5): c for (_, _, k), c in zpoly.terms.items()})
    coeff = ring.coeff
    d0 = zq.constant_term()
    if zq != R.from_const(d0):
        _scale_z_to_constant(tr, zq, 5)
        return None
    if d0 != coeff.one:
        _integral_unit_fix(tr, d0, 24, {"x": -12, "y": -8, "z": -5})
        return None
    if D2plus:
        tr.apply(
            {
                "y": _shift_image(
                    tr,
                    "y",
                    Poly(R, {(0, 0, cz): c for (_, _, cz), c in D2plus.items()}).scale(third),
                )
            }
        )
        return None
    if D1:
        fifth = ring.coeff.invert(ring.coeff.from_int(5))
        t = Poly(R, {(0, 1, k - 4): c for (_, _, k), c in D1.items()}).scale(fifth)
        tr.apply({"z": _shift_image(tr, "z", t)})
        return None
    return _determined(tr, SingularityType("E", 8))


# ---------------------------------------------------------------------------
# entry points


def classify(f):
    """Decide the ADE type of a jet of order 2, with certificate."""
    ring = f.ring
    if len(ring.variables) != 3:
        raise ValueError("classification needs a 3-variable presentation")
    if ring.residue_char == 2:
        raise SmallResidueCharacteristic("classification needs residue characteristic != 2")
    if f.order() != 2:
        raise OrderNotTwo(f"order {f.order()}, expected 2")
    tr = _Tracker(f)
    rank = diagonalize_quadratic_part(f, stepper=tr)[0]
    if rank == 3:
        return _flow_rank3(tr)
    if rank == 2:
        return _flow_rank2(tr)
    return _flow_cubic(tr)


def verify_certificate(f, outcome):
    """Recompute apply_change(unit * f, change) and compare, term by term."""
    if outcome.status != "determined" or outcome.certificate is None:
        return False
    cert = outcome.certificate
    if not cert.unit.is_unit():
        return False
    transformed = cert.change.apply(cert.unit * f)
    if transformed != cert.normal_form:
        return False
    target = normal_form_poly(f.ring, outcome.type).truncated(f.ring.precision)
    return cert.normal_form.poly == target
