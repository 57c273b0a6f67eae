"""End-to-end splitting pipelines and the instance generator."""

import math

import pytest

from matsplit.algebra import (
    AlgebraElement,
    find_identity,
    ideal_rank,
    matrix_units_table,
    witness_residual,
)
from matsplit.errors import InputError, PromiseViolation
from matsplit.exactnum import QQ, ExactMatrix, Field
from matsplit.fixtures import gaussian_lambda_order, quaternion_table
from matsplit.lattice import hermite_gamma
from matsplit.splitter import (
    SplitConfig,
    dynamic_bound_update,
    generate_instance,
    instance_from_base_change,
    split_imag_quad,
    split_over_Q,
)


class TestSplitOverQ:
    def test_standard_m2_finds_a_unit_dyad(self):
        t = matrix_units_table(2)
        res = split_over_Q(t, SplitConfig(seed=1))
        assert ideal_rank(res.rank_one_element) == 1
        assert abs(res.stats.found_norm - 1.0) < 1e-9
        assert witness_residual(t, res.witness) == 0

    def test_scrambled_m2_seed_42(self):
        inst = generate_instance(2, QQ, 10, seed=42)
        res = split_over_Q(inst.table, SplitConfig(seed=42))
        assert witness_residual(inst.table, res.witness) == 0
        assert inst.hidden_matrix(res.rank_one_element.coords).rank() == 1

    def test_scrambled_m3(self):
        inst = generate_instance(3, QQ, 10, seed=2)
        res = split_over_Q(inst.table, SplitConfig(seed=2))
        assert witness_residual(inst.table, res.witness) == 0
        assert res.stats.found_norm <= hermite_gamma(3)[0] + 1e-6
        assert inst.hidden_matrix(res.rank_one_element.coords).rank() == 1

    def test_norm_bound_invariant(self):
        for seed in (1, 2, 3):
            inst = generate_instance(2, QQ, 10, seed=seed)
            res = split_over_Q(inst.table, SplitConfig(seed=seed))
            assert res.stats.norm_bound_satisfied

    def test_determinism(self):
        inst = generate_instance(2, QQ, 10, seed=6)
        r1 = split_over_Q(inst.table, SplitConfig(seed=6))
        r2 = split_over_Q(inst.table, SplitConfig(seed=6))
        assert r1.rank_one_element.coords == r2.rank_one_element.coords
        assert r1.stats.nodes_visited == r2.stats.nodes_visited

    def test_rejects_non_square_dimension(self):
        from matsplit.algebra import StructureConstants

        t = StructureConstants(QQ, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
        with pytest.raises(InputError):
            split_over_Q(t)

    def test_rejects_quadratic_field_input(self):
        t = matrix_units_table(2, Field(1))
        with pytest.raises(InputError):
            split_over_Q(t)

    def test_division_quaternions_violate_the_promise(self):
        with pytest.raises(PromiseViolation):
            split_over_Q(quaternion_table(-1, -1), SplitConfig(seed=1))


class TestBoxEngine:
    def test_engines_agree_on_the_found_norm(self):
        inst = generate_instance(2, QQ, 10, seed=3)
        ordered = split_over_Q(inst.table, SplitConfig(seed=3))
        box_off = split_over_Q(inst.table, SplitConfig(seed=3, engine="box"))
        box_on = split_over_Q(
            inst.table, SplitConfig(seed=3, engine="box", dynamic_pruning=True)
        )
        assert abs(box_off.stats.found_norm - box_on.stats.found_norm) < 1e-9
        assert abs(box_off.stats.found_norm - ordered.stats.found_norm) < 1e-9

    def test_dynamic_pruning_never_visits_more(self):
        inst = generate_instance(2, QQ, 10, seed=8)
        off = split_over_Q(inst.table, SplitConfig(seed=8, engine="box"))
        on = split_over_Q(
            inst.table, SplitConfig(seed=8, engine="box", dynamic_pruning=True)
        )
        assert on.stats.nodes_visited <= off.stats.nodes_visited
        assert on.stats.nodes_visited < on.stats.box_nodes_cm_flat

    def test_flat_cm_box_is_astronomical(self):
        from matsplit.lattice import c_m

        inst = generate_instance(2, QQ, 10, seed=4)
        res = split_over_Q(inst.table, SplitConfig(seed=4, engine="box"))
        assert res.stats.box_nodes_cm_flat == (2 * int(c_m(4)) + 1) ** 4
        assert res.stats.nodes_visited < res.stats.box_nodes_cm_flat


class TestDynamicBoundUpdate:
    def test_rank_one_unit_norm(self):
        assert dynamic_bound_update(math.inf, 1.0, 1) == 1.0

    def test_rank_two_sqrt_two(self):
        # gamma_2^2 / sqrt(2) * sqrt(2) = 4/3
        assert abs(dynamic_bound_update(math.inf, math.sqrt(2), 2) - 4 / 3) < 1e-12

    def test_smaller_current_wins(self):
        assert dynamic_bound_update(0.5, 10.0, 1) == 0.5


class TestSplitImagQuad:
    @pytest.mark.parametrize("d,name", [(1, "gauss"), (3, "eisenstein")])
    def test_standard_table(self, d, name):
        t = matrix_units_table(2, Field(d))
        res = split_imag_quad(t, SplitConfig(seed=2))
        assert ideal_rank(res.rank_one_element) == 1
        assert witness_residual(t, res.witness) == 0
        assert abs(res.stats.found_norm - 1.0) < 1e-9

    @pytest.mark.parametrize("name", ["gauss", "eisenstein"])
    def test_scrambled(self, name):
        inst = generate_instance(2, name, 5, seed=13)
        res = split_imag_quad(inst.table, SplitConfig(seed=13))
        assert witness_residual(inst.table, res.witness) == 0
        assert inst.hidden_matrix(res.rank_one_element.coords).rank() == 1

    def test_gaussian_fixture_order(self):
        o = gaussian_lambda_order()
        res = split_imag_quad(o.table, SplitConfig(seed=1), order=o)
        assert witness_residual(o.table, res.witness) == 0
        assert abs(res.stats.found_norm - math.sqrt(2)) < 1e-9

    def test_rejects_wrong_field(self):
        with pytest.raises(InputError):
            split_imag_quad(matrix_units_table(2, QQ))
        with pytest.raises(InputError):
            split_imag_quad(matrix_units_table(2, Field(5)))


class TestGenerateInstance:
    def test_height_zero_is_the_standard_table(self):
        inst = generate_instance(2, QQ, 0, seed=9)
        assert inst.table.gamma == matrix_units_table(2).gamma
        assert inst.base_change == ExactMatrix.identity(QQ, 4)

    def test_seeded_instance_is_valid(self):
        inst = generate_instance(2, QQ, 10, seed=42)
        assert inst.table.validate() == []

    def test_hidden_map_is_a_homomorphism(self):
        inst = generate_instance(2, QQ, 10, seed=21)
        t = inst.table
        x = AlgebraElement(t, [1, -2, 0, 3])
        y = AlgebraElement(t, [2, 1, 1, 0])
        lhs = inst.hidden_matrix((x * y).coords)
        rhs = inst.hidden_matrix(x.coords) @ inst.hidden_matrix(y.coords)
        assert lhs == rhs
        e = find_identity(t)
        assert inst.hidden_matrix(e.coords) == ExactMatrix.identity(QQ, 2)

    def test_height_bound_respected(self):
        for seed in range(5):
            inst = generate_instance(2, QQ, 7, seed=seed)
            for row in inst.base_change.entries:
                for x in row:
                    assert abs(x) <= 7

    def test_identity_change_helper(self):
        t = matrix_units_table(2)
        rows = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        inst = instance_from_base_change(t, rows, QQ)
        assert inst.table.gamma == t.gamma

    def test_quadratic_field_instances(self):
        for name, d in (("gauss", 1), ("eisenstein", 3)):
            inst = generate_instance(2, name, 4, seed=2)
            assert inst.field == Field(d)
            assert inst.table.validate() == []
