import json
import math
import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hstorus.lattice import (
    E1,
    E2,
    F1,
    F2,
    GRAM,
    RANK,
    LatticeClass,
    asd_admissible,
    gram_determinant,
    intersect,
    rank_of,
    signature,
    smith_normal_form,
)

from conftest import random_class

coords_st = st.tuples(*[st.integers(-9, 9)] * RANK)


def brute_force_snf_2x2(m):
    """Invariant factors of a 2x2 integer matrix from minor gcds."""
    a, b = m[0]
    c, d = m[1]
    d1 = math.gcd(math.gcd(a, b), math.gcd(c, d))
    det = abs(a * d - b * c)
    if det == 0:
        return (d1,) if d1 else ()
    return (d1, det // d1)


class TestGram:
    def test_symmetric(self):
        for i in range(RANK):
            for j in range(RANK):
                assert GRAM[i][j] == GRAM[j][i]

    def test_unimodular(self):
        assert gram_determinant() == -1

    def test_even(self):
        assert all(GRAM[i][i] % 2 == 0 for i in range(RANK))

    def test_signature_3_19(self):
        assert signature() == (3, 19)


class TestIntersect:
    def test_u_block(self):
        assert intersect(E1, F1) == 1
        assert intersect(E1, E1) == 0

    def test_hyperbolic_root(self):
        # (e1 - f1)^T G (e1 - f1) = 0 - 1 - 1 + 0 = -2
        assert intersect(E1 - F1, E1 - F1) == -2

    def test_zero_class(self, rng):
        zero = LatticeClass.zero()
        for _ in range(10):
            assert intersect(zero, random_class(rng)) == 0

    @settings(max_examples=200)
    @given(coords_st, coords_st)
    def test_symmetric_and_even(self, a, b):
        x, y = LatticeClass(a), LatticeClass(b)
        assert intersect(x, y) == intersect(y, x)
        assert intersect(x, x) % 2 == 0

    @settings(max_examples=100)
    @given(coords_st, coords_st, coords_st, st.integers(-5, 5))
    def test_bilinear(self, a, b, c, n):
        x, y, z = LatticeClass(a), LatticeClass(b), LatticeClass(c)
        assert intersect(x + n * y, z) == intersect(x, z) + n * intersect(y, z)

    def test_thousand_random_pairs(self, rng):
        for _ in range(1000):
            a, b = random_class(rng), random_class(rng)
            assert intersect(a, b) == intersect(b, a)
            assert intersect(a, a) % 2 == 0


class TestAsdAdmissible:
    def test_negative_root(self):
        assert asd_admissible(E1 - F1) == 1

    def test_zero_class(self):
        assert asd_admissible(LatticeClass.zero()) == 0

    def test_positive_excluded(self):
        assert asd_admissible(E1 + F1) is None

    def test_nonzero_isotropic_excluded(self):
        # nonzero class of square zero has no nonzero anti-self-dual representative
        assert asd_admissible(E1) is None

    @settings(max_examples=200)
    @given(coords_st)
    def test_characterization(self, a):
        x = LatticeClass(a)
        q = intersect(x, x)
        k = asd_admissible(x)
        if q > 0 or (q == 0 and not x.is_zero()):
            assert k is None
        else:
            assert k == -q // 2


class TestSmithNormalForm:
    def test_diag_2_3(self):
        assert smith_normal_form([[2, 0], [0, 3]]).factors == (1, 6)

    def test_identity(self):
        assert smith_normal_form([[1, 0], [0, 1]]).factors == (1, 1)

    def test_zero(self):
        res = smith_normal_form([[0, 0], [0, 0]])
        assert res.factors == ()
        assert res.rank == 0

    def test_divisibility_chain(self, rng):
        for _ in range(50):
            rows = rng.randint(1, 3)
            cols = rng.randint(1, 6)
            m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
            factors = smith_normal_form(m).factors
            for a, b in zip(factors, factors[1:]):
                assert b % a == 0

    def test_against_minor_gcds_2x2(self, rng):
        for _ in range(200):
            m = [[rng.randint(-9, 9) for _ in range(2)] for _ in range(2)]
            assert smith_normal_form(m).factors == brute_force_snf_2x2(m)

    def test_product_is_gcd_of_maximal_minors(self, rng):
        # 2 x n: product of factors = gcd of absolute 2x2 minors (rank 2 case)
        for _ in range(100):
            n = rng.randint(2, 6)
            m = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(2)]
            res = smith_normal_form(m)
            minors = [
                abs(m[0][i] * m[1][j] - m[0][j] * m[1][i])
                for i, j in product(range(n), repeat=2)
                if i < j
            ]
            g = math.gcd(*minors) if minors else 0
            if res.rank == 2:
                assert res.factors[0] * res.factors[1] == g

    def test_rank_deficient(self):
        assert smith_normal_form([[2, 4], [1, 2]]).factors == (1,)

    def test_rank_of(self):
        assert rank_of([[1, 0], [0, 0]]) == 1
        assert rank_of([]) == 0


class TestSerialization:
    def test_roundtrip(self, rng):
        x = random_class(rng)
        assert LatticeClass.from_json(json.loads(x.dumps())) == x

    def test_length_check(self):
        with pytest.raises(ValueError):
            LatticeClass((1, 2, 3))

    def test_scale_rational_rejects_fractional(self):
        from fractions import Fraction

        with pytest.raises(ValueError, match="coordinate 0"):
            E1.scale_rational(Fraction(1, 2))
