import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hstorus.lattice import RANK, LatticeClass
from hstorus.moduli import MukaiVector, bundle_mukai, hym_exists, mukai_pairing, tangent_mukai

coords_st = st.tuples(*[st.integers(-5, 5)] * RANK)
vector_st = st.builds(
    MukaiVector,
    st.integers(-10, 10),
    st.builds(LatticeClass, coords_st),
    st.integers(-10, 10),
)


def test_tangent_vector():
    v = tangent_mukai()
    assert (v.v0, v.v2) == (3, -21)
    assert v.v1.is_zero()
    assert mukai_pairing(v, v) == 126


def test_bundle_vectors():
    assert bundle_mukai(22, 22) == MukaiVector(22, LatticeClass.zero(), 0)
    assert bundle_mukai(1, 24) == MukaiVector(1, LatticeClass.zero(), -23)
    assert bundle_mukai(3, 24) == tangent_mukai()


def test_bundle_rejects_bad_rank():
    with pytest.raises(ValueError):
        bundle_mukai(0, 5)


def test_diagonal_formula():
    # (r, 0, r - c2) pairs with itself to -2 r (r - c2)
    for r in range(1, 10):
        for c2 in range(-5, 10):
            v = bundle_mukai(r, c2)
            assert mukai_pairing(v, v) == -2 * r * (r - c2)


def test_pairing_zero_vector():
    z = MukaiVector(0, LatticeClass.zero(), 0)
    assert mukai_pairing(z, z) == 0


def test_hym_examples():
    assert hym_exists(tangent_mukai())
    assert hym_exists(bundle_mukai(22, 22))
    assert not hym_exists(MukaiVector(23, LatticeClass.zero(), 1))


def test_hym_rejects_nonpositive_rank():
    with pytest.raises(ValueError):
        hym_exists(MukaiVector(0, LatticeClass.zero(), 0))


def test_rank_bound_equivalence_exhaustive():
    for r in range(1, 51):
        for c2 in range(0, 51):
            assert hym_exists(bundle_mukai(r, c2)) == (r <= c2)


@settings(max_examples=150)
@given(vector_st, vector_st)
def test_pairing_symmetric(v, w):
    assert mukai_pairing(v, w) == mukai_pairing(w, v)


@settings(max_examples=150)
@given(vector_st, vector_st, vector_st, st.integers(-4, 4))
def test_pairing_bilinear(u, v, w, n):
    scaled = MukaiVector(v.v0 + n * w.v0, v.v1 + n * w.v1, v.v2 + n * w.v2)
    assert mukai_pairing(u, scaled) == mukai_pairing(u, v) + n * mukai_pairing(u, w)


@settings(max_examples=50)
@given(vector_st)
def test_self_pairing_even(v):
    assert mukai_pairing(v, v) % 2 == 0


def test_json_roundtrip():
    v = tangent_mukai()
    assert MukaiVector.from_json(json.loads(v.dumps())) == v
