from src.hecke.core.modular_linalg import (
    as_matrix, homology_length, image_length, is_surjective, kernel_length, mat_mul, rank_mod_p, smith_form, solve,
)


class TestSmithForm:
    """Test Smith normal form over Z/p^k"""

    def test_invariant_factors(self):
        """diag(3, 1) over Z/9 has invariant factors 1, 3"""
        form = smith_form([[3, 0], [0, 1]], 3, 2)
        assert form.valuations == [0, 1]
        assert form.invariant_factors == [1, 3]

    def test_transforms(self):
        """U A V is the diagonal matrix of the form"""
        A = as_matrix([[2, 4], [1, 5]])
        form = smith_form(A, 3, 2)
        D = mat_mul(mat_mul(form.U, A, 9), form.V, 9)
        for t, v in enumerate(form.valuations):
            assert D[t, t] == 3 ** v
        assert D[0, 1] == 0 and D[1, 0] == 0

    def test_lengths(self):
        """Image and kernel lengths add up to the source length"""
        A = [[3, 0], [0, 1]]
        assert image_length(A, 3, 2) == 3
        assert kernel_length(A, 3, 2) == 1
        assert not is_surjective(A, 3, 2)
        assert is_surjective([[1, 0], [0, 2]], 3, 2)

    def test_rank_mod_p(self):
        """Rank over F_p ignores multiples of p"""
        assert rank_mod_p([[3, 0], [0, 1]], 3) == 1
        assert rank_mod_p([[1, 2], [2, 4]], 5) == 1


class TestSolve:
    """Test linear solving over Z/p^k"""

    def test_solvable(self):
        """A solution satisfies the system"""
        A = [[3, 0], [0, 1]]
        x = solve(A, [6, 4], 3, 2)
        assert x is not None
        assert (3 * x[0]) % 9 == 6
        assert x[1] % 9 == 4

    def test_unsolvable(self):
        """3x = 1 has no solution mod 9"""
        assert solve([[3]], [1], 3, 2) is None


class TestHomology:
    """Test homology lengths of short complexes"""

    def test_exact_at_middle(self):
        """Z/9 -3-> Z/9 -3-> Z/9 is exact in the middle"""
        assert homology_length([[3]], [[3]], 1, 3, 2) == 0

    def test_nonzero_homology(self):
        """With zero outgoing map the homology is the cokernel of 3"""
        assert homology_length([[3]], [[0]], 1, 3, 2) == 1
