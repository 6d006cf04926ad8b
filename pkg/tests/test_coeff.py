import pytest
from hypothesis import given, settings, strategies as st

from duval.coeff import (
    QQ,
    FiniteCoeff,
    NumberFieldCoeff,
    RationalCoeff,
    cubic12_field,
    find_irreducible,
    ring_make,
)
from duval.errors import (
    NoRootInResidueField,
    NotAUnit,
    NotPrime,
    ReducibleModulus,
    RootOrderDividesP,
)


def test_ring_make_prime_field():
    F7 = ring_make("prime_field", p=7)
    assert F7.is_field and F7.size() == 7


def test_ring_make_rejects_composite():
    with pytest.raises(NotPrime):
        ring_make("prime_field", p=6)


def test_galois_ring_with_modulus():
    # t^2 + 6t + 3 is irreducible over F_7 (no roots), so GR(7^4, 2) exists
    ring = ring_make("galois_ring", p=7, witt_precision=4, degree=2, modulus=(3, 6, 1))
    assert ring.size() == 2401 ** 2
    for r in range(7):
        assert (r * r + 6 * r + 3) % 7 != 0


def test_reducible_modulus_rejected():
    with pytest.raises(ReducibleModulus):
        FiniteCoeff(7, 1, 2, modulus=(6, 0, 1))  # t^2 - 1 = (t-1)(t+1)


def test_number_field_cubic12():
    NF = ring_make("number_field")
    w = NF.generator()
    # 12 * w represents the real cube root of 2^8 * 3^4: (12 w)^3 = 20736
    c = NF.mul(NF.from_int(12), w)
    cube = NF.mul(NF.mul(c, c), c)
    assert cube == NF.from_int(2 ** 8 * 3 ** 4)


def test_invert_examples():
    F7 = FiniteCoeff(7)
    assert F7.invert(3) == 5
    Z49 = FiniteCoeff(7, 2)
    assert Z49.invert(3) == 33 and (3 * 33) % 49 == 1
    with pytest.raises(NotAUnit):
        Z49.invert(7)


def test_kth_root_examples():
    F7 = FiniteCoeff(7)
    assert F7.kth_root(F7.one, 5) == F7.one
    # 3^2 = 9 = 2: canonical choice is the smaller root 3
    assert F7.kth_root(2, 2) == 3
    # residue of 8 in Z/49 is 1, and the tie-breaking prefers the root with
    # residue 1; its Hensel lift is 36 (36^3 = 46656 = 8 mod 49)
    Z49 = FiniteCoeff(7, 2)
    root = Z49.kth_root(8, 3)
    assert root == 36
    assert pow(root, 3, 49) == 8
    roots = sorted(c for c in range(49) if pow(c, 3, 49) == 8)
    assert roots == [2, 11, 36] and 36 % 7 == 1


def test_kth_root_order_divides_p():
    Z49 = FiniteCoeff(7, 2)
    with pytest.raises(RootOrderDividesP):
        Z49.kth_root(8, 7)


def test_root_extension_degree_report():
    F7 = FiniteCoeff(7)
    with pytest.raises(NoRootInResidueField) as exc:
        F7.kth_root(3, 2)  # 3 is not a quadratic residue mod 7
    assert exc.value.extension_degree == 2
    F49 = FiniteCoeff(7, 1, 2)
    r = F49.kth_root(F49.from_int(3), 2)
    assert F49.mul(r, r) == F49.from_int(3)


def test_rational_roots():
    R = RationalCoeff()
    assert R.kth_root(QQ(4, 9), 2) == QQ(2, 3)
    with pytest.raises(NoRootInResidueField):
        R.kth_root(QQ(2), 2)


def test_number_field_root_of_144():
    NF = cubic12_field()
    w2 = NF.pow(NF.generator(), 2)
    root = NF.kth_root(NF.from_int(144), 3)
    assert root == w2  # (w^2)^3 = 144


def test_find_irreducible_deterministic():
    assert find_irreducible(7, 2) == find_irreducible(7, 2)
    m = find_irreducible(13, 2)
    F = FiniteCoeff(13, 1, 2, m)
    assert F.size() == 169


@given(st.integers(1, 48))
def test_invert_involution_z49(n):
    Z49 = FiniteCoeff(7, 2)
    if not Z49.is_unit(n):
        return
    a = n % 49
    inv = Z49.invert(a)
    assert Z49.mul(a, inv) == Z49.one
    assert Z49.invert(inv) == a


@settings(max_examples=60)
@given(st.integers(0, 168), st.integers(0, 168))
def test_residue_map_is_homomorphism(i, j):
    GR = FiniteCoeff(13, 3, 2)
    F = GR.residue_ring()
    a = (i % 13 ** 3, (i * 7 + 1) % 13 ** 3)
    b = (j % 13 ** 3, (j * 5 + 2) % 13 ** 3)
    assert GR.residue(GR.add(a, b)) == F.add(GR.residue(a), GR.residue(b))
    assert GR.residue(GR.mul(a, b)) == F.mul(GR.residue(a), GR.residue(b))


def test_digit_split_roundtrip():
    GR = FiniteCoeff(7, 3)
    for a in (0, 1, 6, 7, 48, 342, 100):
        digit, carry = GR.digit_split(a % 343)
        assert (digit + 7 * carry) % 343 == a % 343
        assert GR.is_digit(digit)


def test_kth_root_exact_at_full_witt_precision():
    GR = FiniteCoeff(11, 4)
    for u in (4, 9, 5, 14641 - 1):
        if not GR.is_unit(u):
            continue
        try:
            r = GR.kth_root(u, 3)
        except NoRootInResidueField:
            continue
        assert GR.pow(r, 3) == u % 11 ** 4


def test_canonicalization_idempotent():
    GR = FiniteCoeff(7, 2, 2, modulus=(3, 6, 1))
    a = (50, 13)
    b = tuple(c % 49 for c in a)
    assert GR.add(a, GR.zero) == tuple(c % 49 for c in a)
    assert GR.add(b, GR.zero) == b


def test_descriptor_roundtrip():
    ring = FiniteCoeff(7, 4, 2, modulus=(3, 6, 1))
    d = ring.descriptor()
    again = ring_make(
        d["kind"],
        p=d["p"],
        witt_precision=d.get("witt_precision"),
        degree=d.get("residue_degree"),
        modulus=d.get("modulus"),
    )
    assert again == ring
