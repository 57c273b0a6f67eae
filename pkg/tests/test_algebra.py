"""Structure constant algebras: validation, rank test, isomorphism witness."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matsplit.algebra import (
    AlgebraElement,
    StructureConstants,
    build_isomorphism,
    find_identity,
    ideal_rank,
    matrix_units_table,
    multiply,
    reduced_trace_gram,
    trace_gram,
    validate,
    witness_residual,
)
from matsplit.errors import InputError, NoIdentityError
from matsplit.exactnum import QQ, ExactMatrix
from matsplit.fixtures import quaternion_table
from matsplit.splitter import generate_instance


@pytest.fixture(scope="module")
def m2():
    return matrix_units_table(2)


@pytest.fixture(scope="module")
def m3():
    return matrix_units_table(3)


def unit(table, j):
    v = [table.field.zero()] * table.m
    v[j] = table.field.one()
    return AlgebraElement(table, v)


class TestValidate:
    def test_standard_table_valid(self, m2):
        assert validate(m2) == []

    def test_perturbed_gamma_reports_the_pair(self, m2):
        gamma = [[[x for x in row] for row in plane] for plane in m2.gamma]
        gamma[0][1][0] = gamma[0][1][0] + 1
        bad = StructureConstants(QQ, gamma)
        violations = validate(bad)
        assert violations
        assert any("a_0" in v or "a_1" in v for v in violations)

    def test_split_quaternions_valid(self):
        assert validate(quaternion_table(1, 1)) == []

    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4),
        st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4),
        st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4),
    )
    def test_associativity_by_direct_expansion(self, xs, ys, zs):
        # independent oracle for the validity of the split quaternion table
        t = quaternion_table(1, 1)
        x, y, z = (AlgebraElement(t, [Fraction(v) for v in c]) for c in (xs, ys, zs))
        assert ((x * y) * z).coords == (x * (y * z)).coords

    def test_non_square_dimension_flagged(self):
        t = StructureConstants(QQ, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
        assert any("perfect square" in v for v in validate(t))


class TestMultiply:
    def test_matrix_unit_products(self, m2):
        e12, e21, e11 = unit(m2, 1), unit(m2, 2), unit(m2, 0)
        assert multiply(e12, e21).coords == e11.coords
        assert multiply(e12, e12).is_zero()

    def test_identity_acts_trivially(self, m2):
        e = find_identity(m2)
        x = AlgebraElement(m2, [1, 2, 3, 4])
        assert multiply(e, x).coords == x.coords
        assert multiply(x, e).coords == x.coords

    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.integers(-3, 3), min_size=4, max_size=4),
        st.lists(st.integers(-3, 3), min_size=4, max_size=4),
        st.lists(st.integers(-3, 3), min_size=4, max_size=4),
    )
    def test_bilinearity(self, xs, ys, zs):
        t = matrix_units_table(2)
        x, y, z = (AlgebraElement(t, [Fraction(v) for v in c]) for c in (xs, ys, zs))
        assert ((x + y) * z).coords == (x * z + y * z).coords
        assert (z * (x + y)).coords == (z * x + z * y).coords


class TestIdentity:
    def test_standard_identity(self, m2):
        assert find_identity(m2).coords == (1, 0, 0, 1)

    def test_quaternion_identity(self):
        t = quaternion_table(-1, -1)
        assert find_identity(t).coords == (1, 0, 0, 0)

    def test_scrambled_identity_satisfies_the_law(self):
        inst = generate_instance(2, QQ, 8, seed=5)
        e = find_identity(inst.table)
        for j in range(4):
            b = unit(inst.table, j)
            assert multiply(e, b).coords == b.coords
            assert multiply(b, e).coords == b.coords

    def test_no_identity_reported(self):
        # the 1-dim algebra with a*a = 0 has no unit
        t = StructureConstants(QQ, [[[0]]])
        with pytest.raises(NoIdentityError):
            find_identity(t)


class TestRegularRepresentation:
    def test_left_regular_of_identity(self, m2):
        e = find_identity(m2)
        assert m2.left_regular(e.coords) == ExactMatrix.identity(QQ, 4)

    def test_left_regular_rank(self, m2):
        # E11 kills half the algebra from the left
        assert m2.left_regular(unit(m2, 0).coords).rank() == 2

    def test_left_regular_zero(self, m2):
        assert m2.left_regular([0, 0, 0, 0]).is_zero()


class TestIdealRank:
    def test_examples(self, m2):
        assert ideal_rank(find_identity(m2)) == 2
        assert ideal_rank(unit(m2, 0)) == 1
        assert ideal_rank(AlgebraElement(m2, [0, 0, 0, 0])) == 0

    def test_rank_matches_hidden_matrix_rank(self):
        # oracle: the generator records the isomorphism to matrix units
        inst = generate_instance(2, QQ, 10, seed=42)
        rng_elements = [
            [1, 0, 0, 0],
            [1, 2, 0, -1],
            [0, 1, 1, 0],
            [2, -1, 3, 1],
        ]
        for coords in rng_elements:
            el = AlgebraElement(inst.table, [Fraction(c) for c in coords])
            assert ideal_rank(el) == inst.hidden_matrix(el.coords).rank()

    def test_rank_invariant_under_base_change(self, m2):
        inst = generate_instance(2, QQ, 10, seed=9)
        # the identity has rank n in any presentation
        assert ideal_rank(find_identity(inst.table)) == 2


class TestBuildIsomorphism:
    def test_matrix_units_witness(self, m2):
        w = build_isomorphism(m2, unit(m2, 0))
        assert witness_residual(m2, w) == 0
        assert len(w.left_ideal_basis) == 2

    def test_requires_rank_one(self, m2):
        with pytest.raises(InputError):
            build_isomorphism(m2, find_identity(m2))

    def test_scrambled_m2_witness(self):
        inst = generate_instance(2, QQ, 10, seed=42)
        # search a small box for a rank one element exactly
        el = _find_rank_one(inst.table)
        w = build_isomorphism(inst.table, el)
        assert witness_residual(inst.table, w) == 0

    def test_scrambled_m3_witness(self):
        inst = generate_instance(3, QQ, 6, seed=4)
        el = _find_rank_one(inst.table)
        w = build_isomorphism(inst.table, el)
        assert witness_residual(inst.table, w) == 0
        assert w.images[0].rows == 3


def _find_rank_one(table):
    """Brute force rank-one search over small coordinate boxes (test oracle)."""
    from itertools import product

    for radius in (1, 2, 3):
        for coords in product(range(-radius, radius + 1), repeat=table.m):
            if not any(coords):
                continue
            el = AlgebraElement(table, [Fraction(c) for c in coords])
            if ideal_rank(el) == 1:
                return el
    raise AssertionError("no rank one element in the search box")


class TestTraceGram:
    def test_matrix_units_gram_is_a_scaled_permutation(self, m2):
        basis = [unit(m2, j) for j in range(4)]
        g = trace_gram(m2, basis)
        # Tr L(E_ab E_cd) = n [b=c][a=d]
        nonzero = sum(1 for i in range(4) for j in range(4) if g.entries[i][j] != 0)
        assert nonzero == 4
        assert abs(g.det()) == 16
        assert abs(reduced_trace_gram(m2, basis).det()) == 1

    def test_bilinearity_under_scaling(self, m2):
        basis = [unit(m2, j) for j in range(4)]
        scaled = [b.scaled(2) for b in basis]
        g1 = trace_gram(m2, basis)
        g2 = trace_gram(m2, scaled)
        assert g2 == g1.scaled(4)

    def test_one_dimensional_algebra(self):
        t = StructureConstants(QQ, [[[1]]])
        g = trace_gram(t, [AlgebraElement(t, [1])])
        assert g.entries == ((Fraction(1),),)
