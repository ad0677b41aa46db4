import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from posemetrics import Assignment, CostMatrix, brute_force_min_cost, solve_min_cost


class TestCostMatrix:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="finite"):
            CostMatrix(np.array([[0.0, np.nan]]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            CostMatrix(np.array([[-0.1]]))

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ValueError, match="2-dimensional"):
            CostMatrix(np.zeros(3))

    def test_values_read_only(self):
        cm = CostMatrix(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            cm.values[0, 0] = 1.0


class TestAssignment:
    def test_duplicate_rows_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            Assignment(((0, 0), (0, 1)), 0.0)


class TestSolveMinCost:
    def test_empty_matrix(self):
        res = solve_min_cost(np.zeros((0, 5)))
        assert res.pairs == () and res.total_cost == 0.0

    def test_identity_structure(self):
        c = np.ones((3, 3)) - np.eye(3)
        res = solve_min_cost(c)
        assert res.pairs == ((0, 0), (1, 1), (2, 2))
        assert res.total_cost == 0.0

    def test_single_cell(self):
        res = solve_min_cost(np.array([[0.3]]))
        assert res.pairs == ((0, 0),) and res.total_cost == pytest.approx(0.3)

    def test_rectangular_wide(self):
        c = np.array([[5.0, 1.0, 9.0], [4.0, 7.0, 2.0]])
        res = solve_min_cost(c)
        assert res.pairs == ((0, 1), (1, 2))
        assert res.total_cost == pytest.approx(3.0)

    def test_rectangular_tall(self):
        c = np.array([[5.0, 1.0, 9.0], [4.0, 7.0, 2.0]]).T  # 3x2
        res = solve_min_cost(c)
        assert res.pairs == ((1, 0), (2, 1))
        assert res.total_cost == pytest.approx(3.0)

    def test_lexicographic_ties_all_equal(self):
        res = solve_min_cost(np.ones((3, 5)))
        assert res.pairs == ((0, 0), (1, 1), (2, 2))

    def test_lexicographic_ties_tall_all_equal(self):
        # rows outnumber cols: the lex-smallest optimum uses the first rows
        res = solve_min_cost(np.full((4, 2), 0.25))
        assert res.pairs == ((0, 0), (1, 1))

    def test_200_random_matrices_match_brute_force(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            m = int(rng.integers(1, 8))
            n = int(rng.integers(1, 8))
            c = rng.uniform(size=(m, n))
            fast = solve_min_cost(c)
            brute = brute_force_min_cost(c)
            assert abs(fast.total_cost - brute.total_cost) < 1e-9
            assert fast.pairs == brute.pairs  # unique optimum almost surely

    def test_quantized_ties_are_lex_minimal(self):
        # coarse-valued matrices force massive ties; the canonical pair
        # list must equal the brute-force lex-smallest optimum exactly
        rng = np.random.default_rng(99)
        for _ in range(120):
            m = int(rng.integers(1, 6))
            n = int(rng.integers(1, 6))
            c = rng.integers(0, 3, size=(m, n)) / 2.0
            fast = solve_min_cost(c)
            brute = brute_force_min_cost(c)
            assert fast.total_cost == pytest.approx(brute.total_cost, abs=1e-12)
            assert fast.pairs == brute.pairs

    @pytest.mark.parametrize("shape", [(7, 3), (3, 7), (6, 6), (8, 2), (2, 8)])
    def test_quantized_ties_rectangular_stress(self, shape):
        # tall matrices exercise the row-skipping branch of the greedy
        # canonicalization: which rows stay unmatched is itself a tie
        rng = np.random.default_rng(1000 + shape[0] * 10 + shape[1])
        for _ in range(60):
            c = rng.integers(0, 2, size=shape).astype(float)
            fast = solve_min_cost(c)
            brute = brute_force_min_cost(c)
            assert fast.total_cost == pytest.approx(brute.total_cost, abs=1e-12)
            assert fast.pairs == brute.pairs

    def test_large_tie_heavy_matrix_stays_fast_and_optimal(self):
        rng = np.random.default_rng(2)
        c = rng.integers(0, 4, size=(60, 45)) / 4.0
        res = solve_min_cost(c)
        rows, cols = linear_sum_assignment(c)
        assert res.total_cost == pytest.approx(float(c[rows, cols].sum()), abs=1e-9)
        # canonical output is stable across repeated solves
        assert solve_min_cost(c).pairs == res.pairs

    def test_scipy_cross_check_large(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            c = rng.uniform(size=(40, 55))
            res = solve_min_cost(c)
            rows, cols = linear_sum_assignment(c)
            assert res.total_cost == pytest.approx(float(c[rows, cols].sum()), abs=1e-9)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(13)
        c = rng.uniform(size=(6, 6))
        base = solve_min_cost(c)
        scaled = solve_min_cost(2.0 * c)
        assert scaled.pairs == base.pairs
        assert scaled.total_cost == pytest.approx(2.0 * base.total_cost, rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(21)
        c = rng.uniform(size=(5, 7))
        base = solve_min_cost(c)
        rp = rng.permutation(5)
        cp = rng.permutation(7)
        permuted = solve_min_cost(c[np.ix_(rp, cp)])
        assert permuted.total_cost == pytest.approx(base.total_cost, abs=1e-12)
        # continuous entries: the optimum is unique, so pairs map through
        inv_r = {int(orig): new for new, orig in enumerate(rp)}
        inv_c = {int(orig): new for new, orig in enumerate(cp)}
        expected = tuple(sorted((inv_r[r], inv_c[col]) for r, col in base.pairs))
        assert permuted.pairs == expected

    def test_not_worse_than_random_assignments(self):
        rng = np.random.default_rng(31)
        c = rng.uniform(size=(6, 6))
        best = solve_min_cost(c).total_cost
        for _ in range(50):
            perm = rng.permutation(6)
            sampled = float(sum(c[i, perm[i]] for i in range(6)))
            assert best <= sampled + 1e-12


class TestBruteForce:
    def test_single_entry(self):
        res = brute_force_min_cost(np.array([[0.3]]))
        assert res.total_cost == pytest.approx(0.3)

    def test_two_by_two(self):
        res = brute_force_min_cost(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert res.total_cost == 0.0
        assert res.pairs == ((0, 0), (1, 1))

    def test_refuses_large(self):
        with pytest.raises(ValueError, match="brute force"):
            brute_force_min_cost(np.zeros((10, 3)))


@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.integers(0, 2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_solver_optimality_property(m, n, seed):
    c = np.random.default_rng(seed).uniform(size=(m, n))
    fast = solve_min_cost(c)
    brute = brute_force_min_cost(c)
    assert abs(fast.total_cost - brute.total_cost) < 1e-9
    # cost recomputes from the pair list
    assert fast.total_cost == pytest.approx(
        float(sum(c[r, col] for r, col in fast.pairs)), abs=1e-12
    )
