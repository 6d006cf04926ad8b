"""Truncated local-ring arithmetic.

A presentation is k[[x,y,z]] mod m^N (equicharacteristic, k a field) or
W(k)[[x,y,z]]/(p - Q(x,y,z)) mod m^N (mixed characteristic, coefficients
in a Galois ring).  Elements are jets: polynomials of total degree < N in
canonical rewritten form.  In mixed mode the canonical form has all
coefficient digits in [0, p); every p-divisible coefficient is rewritten
through p*m -> Q*m, which strictly raises degree and so terminates.

Coordinate changes hold raw polynomial images (zero constant term,
invertible linear part over the residue field).  Composition and
inversion are exact truncated polynomial operations; canonicalization
happens once, when a change is applied to a jet.  In mixed mode a chain
of canonicalized applications can differ from the one-shot application
of the composite (the rewrite does not commute with substitutions that
move Q), so certificate-producing code keeps its invariants in one-shot
form.
"""

from .coeff import FiniteCoeff
from .errors import (
    AmbientMismatch,
    NoRootInResidueField,
    NoSquareRoot,
    NotAUnit,
    PrecisionUnderflow,
    OrderNotTwo,
    SingularLinearPart,
    SmallResidueCharacteristic,
)
from .poly import Poly, PolyRing, substitute_all

DEFAULT_PRECISION = 24


class LocalRing:
    """A truncated local-ring presentation."""

    def __init__(self, coeff, variables=("x", "y", "z"), precision=DEFAULT_PRECISION,
                 rewrite=None):
        if precision < 4:
            raise PrecisionUnderflow(f"precision {precision} < 4")
        if len(variables) not in (2, 3):
            raise ValueError("presentations have two or three variables")
        self.coeff = coeff
        self.precision = precision
        self.poly_ring = PolyRing(coeff, variables)
        self.variables = self.poly_ring.variables
        if rewrite is not None:
            if isinstance(rewrite, str):
                rewrite = self.poly_ring.parse(rewrite)
            if not isinstance(coeff, FiniteCoeff) or coeff.is_field:
                raise ValueError("mixed mode needs Galois-ring coefficients")
            ordq = rewrite.order()
            if ordq is None or ordq < 1:
                raise ValueError("rewrite polynomial must have zero constant term")
            need = -(-precision // ordq)  # ceil(N / order(Q))
            if coeff.witt_precision < need:
                raise PrecisionUnderflow(
                    f"Witt precision {coeff.witt_precision} < ceil(N/ord Q) = {need}"
                )
        else:
            if not coeff.is_field:
                raise ValueError("equicharacteristic mode needs field coefficients")
        self.rewrite = rewrite

    @property
    def is_mixed(self):
        return self.rewrite is not None

    @property
    def residue_char(self):
        return self.coeff.residue_char

    def residue_field(self):
        if isinstance(self.coeff, FiniteCoeff):
            return self.coeff.residue_ring()
        return self.coeff

    def __eq__(self, other):
        return (
            isinstance(other, LocalRing)
            and self.coeff == other.coeff
            and self.variables == other.variables
            and self.precision == other.precision
            and self.rewrite == other.rewrite
        )

    def __hash__(self):
        return hash((self.coeff, self.variables, self.precision))

    def __repr__(self):
        mode = f" / (p - {self.rewrite})" if self.is_mixed else ""
        return f"LocalRing({self.coeff!r}[[{','.join(self.variables)}]]{mode}, N={self.precision})"

    # -- canonical form ---------------------------------------------------

    def canonicalize(self, p):
        """Truncate at m^N and, in mixed mode, rewrite p-divisible digits."""
        N = self.precision
        if self.rewrite is None:
            return p.truncated(N)
        coeff = self.coeff
        qterms = list(self.rewrite.terms.items())
        layers = {}
        for m, c in p.terms.items():
            d = sum(m)
            if d < N:
                layer = layers.setdefault(d, {})
                prev = layer.get(m)
                layer[m] = c if prev is None else coeff.add(prev, c)
        out = {}
        for d in range(N):
            layer = layers.get(d)
            if not layer:
                continue
            for m, c in layer.items():
                digit, carry = coeff.digit_split(c)
                if not coeff.is_zero(digit):
                    out[m] = digit
                if coeff.is_zero(carry):
                    continue
                for mq, cq in qterms:
                    mm = tuple(a + b for a, b in zip(m, mq))
                    dd = d + sum(mq)
                    if dd >= N:
                        continue
                    target = layers.setdefault(dd, {})
                    add = coeff.mul(carry, cq)
                    prev = target.get(mm)
                    target[mm] = add if prev is None else coeff.add(prev, add)
        return Poly(self.poly_ring, out)

    # -- jet constructors ---------------------------------------------------

    def jet(self, value):
        if isinstance(value, Jet):
            if value.ring != self:
                raise AmbientMismatch("jet from another presentation")
            return value
        if isinstance(value, str):
            value = self.poly_ring.parse(value)
        if isinstance(value, int):
            value = self.poly_ring.from_int(value)
        if not isinstance(value, Poly) or value.ring != self.poly_ring:
            raise AmbientMismatch("value does not live in this presentation")
        return Jet(self, self.canonicalize(value))

    parse = jet

    @property
    def zero(self):
        return Jet(self, self.poly_ring.zero)

    @property
    def one(self):
        return self.jet(self.poly_ring.one)

    def var(self, name):
        return self.jet(self.poly_ring.var(name))

    def uniformizer(self):
        """The image of p as a jet (mixed mode only)."""
        if not self.is_mixed:
            raise ValueError("p is a unit or zero in equicharacteristic mode")
        return self.jet(self.poly_ring.from_int(self.coeff.p))

    # -- residue reduction ---------------------------------------------------

    def reduce_mod_p(self, j):
        """The image of a jet in S/pS, when that quotient is regular.

        Requires order(Q mod p) == 1; the linear variable of Q-bar is
        eliminated and the result lives in a 2-variable equicharacteristic
        presentation over the residue field.
        """
        if not self.is_mixed:
            raise ValueError("reduce_mod_p only applies to mixed presentations")
        res = self.residue_field()
        res_ring = PolyRing(res, self.variables)
        qbar = Poly(
            res_ring,
            {
                m: res_c
                for m, c in self.rewrite.terms.items()
                if not res.is_zero(res_c := self.coeff.residue(c))
            },
        )
        if qbar.order() != 1:
            raise ValueError("S/pS is regular only when Q mod p has order 1")
        lin = None
        for i, v in enumerate(self.variables):
            unit = [0] * len(self.variables)
            unit[i] = 1
            c = qbar.terms.get(tuple(unit))
            if c is not None and res.is_unit(c):
                lin = (i, v, c)
                break
        if lin is None:
            raise ValueError("Q mod p has no unit linear coefficient")
        i, vname, c = lin
        unit_m = [0] * len(self.variables)
        unit_m[i] = 1
        rest = Poly(res_ring, {m: cc for m, cc in qbar.terms.items() if m != tuple(unit_m)})
        neg_inv = res.neg(res.invert(c))
        solved = res_ring.zero
        for _ in range(self.precision + 1):
            nxt = rest.substitute({vname: solved}, maxdeg=self.precision).scale(neg_inv)
            if nxt == solved:
                break
            solved = nxt
        keep = tuple(v for v in self.variables if v != vname)
        target = LocalRing(res, keep, self.precision)
        image = Poly(
            res_ring,
            {
                m: rc
                for m, c in j.poly.terms.items()
                if not res.is_zero(rc := self.coeff.residue(c))
            },
        )
        image = image.substitute({vname: solved}, maxdeg=self.precision)
        dropped = Poly(
            target.poly_ring,
            {
                tuple(e for e, v in zip(m, self.variables) if v != vname): c
                for m, c in image.terms.items()
            },
        )
        return target, target.jet(dropped)


class Jet:
    """An element of a truncated local ring, in canonical form."""

    __slots__ = ("ring", "poly")

    def __init__(self, ring, poly):
        self.ring = ring
        self.poly = poly

    def _check(self, other):
        if self.ring != other.ring:
            raise AmbientMismatch("jets from different presentations")

    def __add__(self, other):
        self._check(other)
        return Jet(self.ring, self.poly + other.poly)

    def __sub__(self, other):
        self._check(other)
        return Jet(self.ring, self.poly - other.poly)

    def __neg__(self):
        return Jet(self.ring, -self.poly)

    def __mul__(self, other):
        self._check(other)
        raw = self.poly.mul_truncated(other.poly, self.ring.precision)
        return Jet(self.ring, self.ring.canonicalize(raw))

    def scale(self, c):
        return Jet(self.ring, self.ring.canonicalize(self.poly.scale(c)))

    def __pow__(self, n):
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, Jet) and self.ring == other.ring and self.poly == other.poly

    __hash__ = None

    def __str__(self):
        return str(self.poly)

    __repr__ = __str__

    def is_zero(self):
        return self.poly.is_zero()

    def order(self):
        return self.poly.order()

    def constant(self):
        return self.poly.constant_term()

    def is_unit(self):
        c = self.constant()
        coeff = self.ring.coeff
        if isinstance(coeff, FiniteCoeff):
            return coeff.is_unit(c)
        return not coeff.is_zero(c)

    def graded_part(self, k):
        return Jet(self.ring, self.poly.graded_part(k))

    def invert(self):
        """Newton inversion of a unit jet, with truncation doubling."""
        if not self.is_unit():
            raise NotAUnit(f"jet {self} has non-unit constant term")
        ring = self.ring
        N = ring.precision
        raw = _series_invert(ring, self.poly)
        if raw is None:
            raise ArithmeticError("unit inversion did not converge")
        return Jet(ring, ring.canonicalize(raw))

    def kth_root(self, k):
        """Hensel/Newton k-th root of a unit jet, constant per coeff tie-breaking.

        Uses the inverse-free iteration r -> r(1 + e/k) with e = 1 - f r^k,
        which converges quadratically to f^(-1/k); the root is f * r^(k-1).
        """
        if not self.is_unit():
            raise NotAUnit(f"jet {self} has non-unit constant term")
        ring = self.ring
        coeff = ring.coeff
        if isinstance(coeff, FiniteCoeff):
            res_field = ring.residue_field()
            r0 = res_field.kth_root(coeff.residue(self.constant()), k)
        else:
            r0 = coeff.kth_root(self.constant(), k)
        kinv = coeff.invert(coeff.from_int(k))
        N = ring.precision
        R = ring.poly_ring
        one = R.one
        f = self.poly
        r = R.from_const(coeff.invert(r0))
        prec = 2
        guard = 0
        while True:
            e = one - f.mul_truncated(r.pow_truncated(k, prec), prec)
            if e.is_zero():
                if prec >= N:
                    break
                prec = min(2 * prec, N)
                continue
            r = r + r.mul_truncated(e, prec).scale(kinv)
            guard += 1
            if guard > 4 * (N.bit_length() + 4):
                raise ArithmeticError("k-th root iteration did not converge")
        root = f.mul_truncated(r.pow_truncated(k - 1, N), N)
        return Jet(ring, ring.canonicalize(root))

    def substituted(self, change):
        return change.apply(self)


class CoordinateChange:
    """A substitution x_i -> image polynomial, zero constant term,
    invertible linear part over the residue field."""

    def __init__(self, ring, images):
        self.ring = ring
        fixed = {}
        for v in ring.variables:
            img = images.get(v)
            if img is None:
                img = ring.poly_ring.var(v)
            elif isinstance(img, Jet):
                img = img.poly
            elif isinstance(img, str):
                img = ring.poly_ring.parse(img)
            img = img.truncated(ring.precision)
            if img.order() is not None and img.order() < 1:
                raise SingularLinearPart(f"image of {v} has a constant term")
            fixed[v] = img
        self.images = fixed
        if self._residue_det_zero():
            raise SingularLinearPart("linear part is singular over the residue field")

    def _linear_matrix(self):
        res = self.ring.residue_field()
        coeff = self.ring.coeff
        n = len(self.ring.variables)
        mat = []
        for v in self.ring.variables:
            row = []
            img = self.images[v]
            for j in range(n):
                m = [0] * n
                m[j] = 1
                c = img.terms.get(tuple(m))
                if c is None:
                    row.append(res.zero)
                elif isinstance(coeff, FiniteCoeff):
                    row.append(coeff.residue(c))
                else:
                    row.append(c)
            mat.append(row)
        return mat, res

    def _residue_det_zero(self):
        mat, res = self._linear_matrix()
        n = len(mat)
        mat = [row[:] for row in mat]
        for col in range(n):
            piv = None
            for r in range(col, n):
                if not res.is_zero(mat[r][col]):
                    piv = r
                    break
            if piv is None:
                return True
            mat[col], mat[piv] = mat[piv], mat[col]
            inv = res.invert(mat[col][col])
            for r in range(col + 1, n):
                f = res.mul(mat[r][col], inv)
                if not res.is_zero(f):
                    mat[r] = [res.sub(a, res.mul(f, b)) for a, b in zip(mat[r], mat[col])]
        return False

    @classmethod
    def identity(cls, ring):
        return cls(ring, {})

    def is_identity(self):
        return all(self.images[v] == self.ring.poly_ring.var(v) for v in self.ring.variables)

    def apply(self, j):
        """Substitute into a jet and canonicalize once."""
        if isinstance(j, Jet):
            if j.ring != self.ring:
                raise AmbientMismatch("jet from another presentation")
            raw = j.poly.substitute(self.images, maxdeg=self.ring.precision)
            return Jet(self.ring, self.ring.canonicalize(raw))
        raw = j.substitute(self.images, maxdeg=self.ring.precision)
        return Jet(self.ring, self.ring.canonicalize(raw))

    def apply_raw(self, p):
        """Truncated polynomial substitution without canonicalization."""
        return p.substitute(self.images, maxdeg=self.ring.precision)

    def compose(self, then):
        """The change with apply(j, result) == apply(apply(j, self), then)
        at the raw polynomial level."""
        if then.ring != self.ring:
            raise AmbientMismatch("changes from different presentations")
        order = list(self.ring.variables)
        substituted = substitute_all(
            [self.images[v] for v in order], then.images, maxdeg=self.ring.precision
        )
        return CoordinateChange(self.ring, dict(zip(order, substituted)))

    def _linear_inverse(self):
        """Exact inverse when every image is linear: invert the matrix."""
        ring = self.ring
        n = len(ring.variables)
        coeff = ring.coeff
        raw = []
        for v in ring.variables:
            img = self.images[v]
            if any(sum(m) != 1 for m in img.terms):
                return None
            row = []
            for j in range(n):
                mono = tuple(1 if i == j else 0 for i in range(n))
                row.append(img.terms.get(mono, coeff.zero))
            raw.append(row)
        try:
            lift = _invert_matrix(raw, coeff)
        except SingularLinearPart:
            return None
        images = {}
        for j, v in enumerate(ring.variables):
            terms = {}
            for i in range(n):
                c = lift[j][i]
                if not coeff.is_zero(c):
                    mono = tuple(1 if k == i else 0 for k in range(n))
                    terms[mono] = c
            images[v] = Poly(ring.poly_ring, terms)
        return CoordinateChange(ring, images)

    def _newton_single_inverse(self, v):
        """Quadratic-convergence inverse when only one variable moves."""
        ring = self.ring
        R = ring.poly_ring
        coeff = ring.coeff
        N = ring.precision
        F = self.images[v]
        vi = ring.variables.index(v)
        mono = tuple(1 if i == vi else 0 for i in range(len(ring.variables)))
        a_v = F.terms.get(mono, coeff.zero)
        if not coeff.is_unit(a_v):
            return None
        # linear start: tau = (v - linear-off-part) / a_v
        lin_rest = Poly(
            R, {m: c for m, c in F.terms.items() if sum(m) == 1 and m != mono}
        )
        tau = (R.var(v) - lin_rest).scale(coeff.invert(a_v))
        dF = F.derivative(v)
        for _ in range(N.bit_length() + 5):
            sub = {v: tau}
            err = F.substitute(sub, maxdeg=N) - R.var(v)
            if err.is_zero():
                return CoordinateChange(ring, {v: tau})
            dtau = dF.substitute(sub, maxdeg=N)
            inv = _series_invert(ring, dtau)
            if inv is None:
                return None
            tau = (tau - err.mul_truncated(inv, N)).truncated(N)
        return None

    def _shortcut_inverse(self):
        """Exact inverses for one-variable shears v -> v - P and scalings
        v -> v * s whose data does not involve v; None when not applicable."""
        ring = self.ring
        moved = [v for v in ring.variables if self.images[v] != ring.poly_ring.var(v)]
        if len(moved) != 1:
            return None
        v = moved[0]
        vi = ring.variables.index(v)
        img = self.images[v]
        var = ring.poly_ring.var(v)
        shift = var - img
        if all(m[vi] == 0 for m in shift.terms):
            return CoordinateChange(ring, {v: var + shift})
        # v * s with s free of v?
        if all(m[vi] >= 1 for m in img.terms):
            s_terms = {}
            for m, c in img.terms.items():
                if m[vi] != 1:
                    return None
                s_terms[m[:vi] + (0,) + m[vi + 1 :]] = c
            s = Poly(ring.poly_ring, s_terms)
            inv_poly = _series_invert(ring, s)
            if inv_poly is None:
                return None
            return CoordinateChange(
                ring, {v: var.mul_truncated(inv_poly, ring.precision)}
            )
        return None

    def inverse(self):
        """Compositional inverse mod m^N."""
        quick = self._linear_inverse()
        if quick is not None:
            return quick
        quick = self._shortcut_inverse()
        if quick is not None:
            return quick
        ring = self.ring
        moved = [v for v in ring.variables if self.images[v] != ring.poly_ring.var(v)]
        if len(moved) == 1:
            quick = self._newton_single_inverse(moved[0])
            if quick is not None:
                return quick
        return self._newton_full_inverse()

    def _newton_full_inverse(self):
        """Multivariate Newton with truncation doubling: given F, solve
        F o tau = id by tau -= J(tau)^{-1} (F o tau - id), working mod
        m^(2^k) so early rounds stay cheap."""
        ring = self.ring
        R = ring.poly_ring
        coeff = ring.coeff
        names = ring.variables
        n = len(names)
        N = ring.precision

        raw = []
        for v in names:
            img = self.images[v]
            row = []
            for j in range(n):
                mono = tuple(1 if i == j else 0 for i in range(n))
                row.append(img.terms.get(mono, coeff.zero))
            raw.append(row)
        lift = _invert_matrix(raw, coeff)
        tau = {}
        for j, v in enumerate(names):
            terms = {}
            for i in range(n):
                c = lift[j][i]
                if not coeff.is_zero(c):
                    mono = tuple(1 if k == i else 0 for k in range(n))
                    terms[mono] = c
            tau[v] = Poly(R, terms)

        F = [self.images[v] for v in names]
        jac = [[F[i].derivative(names[j]) for j in range(n)] for i in range(n)]
        flat = F + [jac[i][j] for i in range(n) for j in range(n)]
        prec = 2
        for _ in range(N.bit_length() + 4):
            prec = min(2 * prec, N)
            evaluated = substitute_all(flat, tau, maxdeg=prec)
            errs = [evaluated[i] - R.var(names[i]) for i in range(n)]
            if all(e.is_zero() for e in errs):
                if prec >= N:
                    return CoordinateChange(ring, tau)
                continue
            jval = [
                [evaluated[n + i * n + j] for j in range(n)] for i in range(n)
            ]
            delta = _solve_series_system(ring, jval, errs, prec)
            if delta is None:
                break
            for j, v in enumerate(names):
                tau[v] = (tau[v] - delta[j]).truncated(N)
        raise ArithmeticError("coordinate-change inversion did not converge")

    def __eq__(self, other):
        return (
            isinstance(other, CoordinateChange)
            and self.ring == other.ring
            and self.images == other.images
        )

    def __repr__(self):
        body = ", ".join(f"{v} -> {img}" for v, img in self.images.items())
        return f"CoordinateChange({body})"


class ChangeSequence:
    """A composite coordinate change kept as its list of elementary steps.

    Applying the sequence folds the steps left to right, canonicalizing
    after each one.  In equicharacteristic mode this agrees with applying
    the fully composed substitution (truncation commutes with
    substitution); in mixed mode the folded form is the normative one and
    materialize() is only for presentation.
    """

    def __init__(self, ring, steps):
        self.ring = ring
        self.steps = list(steps)
        self._materialized = None

    @classmethod
    def identity(cls, ring):
        return cls(ring, [])

    def apply(self, j):
        for step in self.steps:
            j = step.apply(j)
        return j

    def apply_raw(self, p):
        for step in self.steps:
            p = step.apply_raw(p)
        return p

    def is_identity(self):
        return all(step.is_identity() for step in self.steps)

    def materialize(self):
        if self._materialized is None:
            total = CoordinateChange.identity(self.ring)
            for step in self.steps:
                total = total.compose(step)
            self._materialized = total
        return self._materialized

    @property
    def images(self):
        return self.materialize().images

    def step_images(self):
        return [
            {v: str(img) for v, img in step.images.items() if not _is_var(step, v)}
            for step in self.steps
        ]

    def __repr__(self):
        return f"ChangeSequence({len(self.steps)} steps)"


def _is_var(step, v):
    return step.images[v] == step.ring.poly_ring.var(v)


def _series_invert(ring, s, maxdeg=None):
    """Raw truncated power-series inverse over the coefficient ring
    (no p -> Q rewriting); None when the constant term is not a unit."""
    coeff = ring.coeff
    c0 = s.constant_term()
    if not coeff.is_unit(c0):
        return None
    N = ring.precision if maxdeg is None else maxdeg
    one = ring.poly_ring.one
    two = ring.poly_ring.from_int(2)
    t = ring.poly_ring.from_const(coeff.invert(c0))
    prec = 2
    for _ in range(3 * (N.bit_length() + 4)):
        st = s.mul_truncated(t, prec)
        if st == one:
            if prec >= N:
                return t
            prec = min(2 * prec, N)
            continue
        t = t.mul_truncated(two - st, prec)
    return None


def _solve_series_system(ring, mat, rhs, maxdeg):
    """Solve mat * delta = rhs over truncated power series by Gaussian
    elimination with unit pivots; entries are raw polynomials."""
    coeff = ring.coeff
    n = len(mat)
    rows = [list(mat[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if coeff.is_unit(rows[r][col].constant_term()):
                piv = r
                break
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = _series_invert(ring, rows[col][col], maxdeg)
        if inv is None:
            return None
        rows[col] = [e.mul_truncated(inv, maxdeg) for e in rows[col]]
        for r in range(n):
            if r != col and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [
                    a - f.mul_truncated(b, maxdeg)
                    for a, b in zip(rows[r], rows[col])
                ]
    return [rows[i][n] for i in range(n)]


def _invert_matrix(mat, field):
    """Inverse of a matrix over a field or local coefficient ring,
    pivoting on units."""
    n = len(mat)
    aug = [row[:] + [field.one if i == j else field.zero for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if field.is_unit(aug[r][col]):
                piv = r
                break
        if piv is None:
            raise SingularLinearPart("linear part is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = field.invert(aug[col][col])
        aug[col] = [field.mul(inv, a) for a in aug[col]]
        for r in range(n):
            if r != col and not field.is_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [field.sub(a, field.mul(f, b)) for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class ChainStepper:
    """Accumulates elementary changes applied to one jet as a sequence."""

    def __init__(self, start):
        self.ring = start.ring
        self.start = start
        self.steps = []
        self.g = start

    def apply(self, images):
        step = CoordinateChange(self.ring, images)
        self.steps.append(step)
        self.g = step.apply(self.g)

    def final_change(self):
        return ChangeSequence(self.ring, self.steps)


def diagonalize_quadratic_part(f, stepper=None):
    """Bring the degree-2 part of a jet to x^2, x^2+y^2 or x^2+y^2+z^2.

    Returns (rank, change, transformed jet).  The rank is the rank of the
    quadratic form over the residue field; unit coefficients are absorbed
    through square roots of their constant digits.
    """
    ring = f.ring
    if ring.residue_char == 2:
        raise SmallResidueCharacteristic("quadratic diagonalization needs p != 2")
    if f.order() != 2:
        raise OrderNotTwo(f"jet has order {f.order()}, expected 2")
    coeff = ring.coeff
    n = len(ring.variables)
    half = coeff.invert(coeff.from_int(2))

    if stepper is None:
        stepper = ChainStepper(f)

    def quad_matrix(j):
        mat = [[coeff.zero] * n for _ in range(n)]
        for m, c in j.poly.graded_part(2).terms.items():
            idx = [i for i, e in enumerate(m) for _ in range(e)]
            i1, i2 = idx[0], idx[1]
            if i1 == i2:
                mat[i1][i1] = c
            else:
                h = coeff.mul(c, half)
                mat[i1][i2] = h
                mat[i2][i1] = h
        return mat

    def unit(c):
        if isinstance(coeff, FiniteCoeff):
            return coeff.is_unit(c)
        return not coeff.is_zero(c)

    def step(images):
        stepper.apply(images)

    names = ring.variables
    done = []
    while True:
        mat = quad_matrix(stepper.g)
        remaining = [i for i in range(n) if i not in done]
        piv = next((i for i in remaining if unit(mat[i][i])), None)
        if piv is None:
            pair = next(
                ((i, j) for i in remaining for j in remaining if i < j and unit(mat[i][j])),
                None,
            )
            if pair is None:
                break
            i, j = pair
            step({names[i]: ring.poly_ring.var(names[i]) + ring.poly_ring.var(names[j])})
            continue
        a_inv = coeff.invert(mat[piv][piv])
        image = ring.poly_ring.var(names[piv])
        shear = False
        for j in range(n):
            if j != piv and not coeff.is_zero(mat[piv][j]):
                factor = coeff.neg(coeff.mul(mat[piv][j], a_inv))
                image = image + ring.poly_ring.var(names[j]).scale(factor)
                shear = True
        if shear:
            step({names[piv]: image})
        done.append(piv)

    rank = len(done)
    # move the pivot variables to the front in presentation order
    order = done + [i for i in range(n) if i not in done]
    if order != list(range(n)):
        perm_images = {names[order[k]]: ring.poly_ring.var(names[k]) for k in range(n)}
        step(perm_images)
    # absorb the unit diagonal digits
    mat = quad_matrix(stepper.g)
    images = {}
    for k in range(rank):
        u = mat[k][k]
        try:
            root = coeff.kth_root(coeff.invert(u), 2)
        except NoRootInResidueField as exc:
            raise NoSquareRoot(
                f"cannot absorb the square coefficient {u!r}",
                extension_degree=exc.extension_degree,
            ) from exc
        if root != coeff.one:
            images[names[k]] = ring.poly_ring.var(names[k]).scale(root)
    if images:
        step(images)
    return rank, stepper.final_change(), stepper.g
