import random
from fractions import Fraction as F

import numpy as np
import pytest
import sympy

from k3glue import errors
from k3glue.lattice import (
    Hyperplane,
    K3LatticeForm,
    bareiss_determinant,
    f_n_witness,
    gram_matrix,
    hyperplane_rank,
    integer_kernel,
    picard_bound,
    rational_rank,
    signature,
)


@pytest.fixture(scope="module")
def form():
    return gram_matrix()


class TestGramMatrix:
    def test_determinant_unimodular(self, form):
        assert form.determinant in (1, -1)
        assert abs(bareiss_determinant(form.gram)) == 1

    def test_signature(self, form):
        assert form.signature == (3, 19)

    def test_evenness_on_random_vectors(self, form):
        rnd = random.Random(0)
        for _ in range(1000):
            x = [rnd.randrange(-5, 6) for _ in range(22)]
            assert form.pair(x, x) % 2 == 0

    def test_symmetric(self, form):
        assert all(
            form.gram[i][j] == form.gram[j][i] for i in range(22) for j in range(22)
        )

    def test_determinant_against_sympy(self, form):
        assert sympy.Matrix(form.gram).det() == form.determinant

    def test_invalid_forms_rejected(self):
        with pytest.raises(errors.PreconditionError):
            K3LatticeForm(gram=[[1, 0], [0, 1]])  # odd diagonal
        with pytest.raises(errors.PreconditionError):
            K3LatticeForm(gram=[[2, 0], [0, 4]])  # |det| != 1


class TestRankMachinery:
    def test_rational_rank_against_sympy(self):
        rnd = random.Random(1)
        for _ in range(40):
            k = rnd.randrange(1, 6)
            rows = [
                [F(rnd.randrange(-6, 7), rnd.randrange(1, 5)) for _ in range(8)]
                for _ in range(k)
            ]
            assert rational_rank(rows) == sympy.Matrix(rows).rank()

    def test_modular_rank_oracle_thousand_trials(self):
        # independent oracle: rank over F_p (random prime) equals the
        # rational rank for integer matrices with entries well below p
        rnd = random.Random(2)
        primes = (10007, 20011, 39989)
        for _ in range(1000):
            k = rnd.randrange(1, 5)
            rows = [[rnd.randrange(-9, 10) for _ in range(10)] for _ in range(k)]
            mine = rational_rank(rows)
            mod = max(
                np.linalg.matrix_rank(np.array(rows, float))
                if False
                else _rank_mod_p(rows, p)
                for p in primes
            )
            assert mine == mod

    def test_integer_kernel_orthogonality(self):
        rows = [[1, 2, 3, 4], [0, 1, 1, 0]]
        for vec in integer_kernel(rows):
            assert all(isinstance(v, int) for v in vec)
            assert all(sum(r * x for r, x in zip(row, vec)) == 0 for row in rows)


def _rank_mod_p(rows, p):
    a = [[v % p for v in row] for row in rows]
    n_rows, n_cols = len(a), len(a[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [(v * inv) % p for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(vi - f * vr) % p for vi, vr in zip(a[i], a[r])]
        r += 1
    return r


class TestHyperplaneRank:
    def test_single_rational_vector(self, form):
        v = [F(1)] + [F(0)] * 21
        V = Hyperplane(span_vectors=[v], form=form)
        assert hyperplane_rank(V) == 21

    def test_two_vectors(self, form):
        V = Hyperplane(
            span_vectors=[[F(1)] + [F(0)] * 21, [F(0), F(1)] + [F(0)] * 20], form=form
        )
        assert hyperplane_rank(V) == 20

    def test_full_span(self, form):
        vs = [[F(1) if i == j else F(0) for j in range(22)] for i in range(22)]
        V = Hyperplane(span_vectors=vs, form=form)
        assert hyperplane_rank(V) == 0

    def test_rank_formula_all_k(self, form):
        rnd = random.Random(3)
        for k in range(1, 23):
            vs = []
            while len(vs) < k:
                v = [F(rnd.randrange(-3, 4)) for _ in range(22)]
                if rational_rank(vs + [v]) == len(vs) + 1:
                    vs.append(v)
            V = Hyperplane(span_vectors=vs, form=form)
            assert hyperplane_rank(V) == 22 - k

    def test_dependent_span_rejected(self, form):
        v = [F(1)] + [F(0)] * 21
        with pytest.raises(errors.PreconditionError):
            Hyperplane(span_vectors=[v, [2 * x for x in v]], form=form)


class TestWitness:
    def test_rational_hyperplane_full_witness(self, form):
        v = [F(1)] + [F(0)] * 21
        V = Hyperplane(span_vectors=[v], form=form)
        rep = f_n_witness(V, 21)
        assert rep.rank == 21
        assert rep.stratum_dimension == 0
        assert rep.contained_in_V and rep.reconstruction_ok

    def test_rank_too_small(self, form):
        V = Hyperplane(
            span_vectors=[[F(1)] + [F(0)] * 21, [F(0), F(1)] + [F(0)] * 20], form=form
        )
        with pytest.raises(errors.RankTooSmall):
            f_n_witness(V, 21)

    def test_single_vector_witness(self, form):
        V = Hyperplane(
            span_vectors=[[F(1)] + [F(0)] * 21, [F(0), F(1)] + [F(0)] * 20], form=form
        )
        rep = f_n_witness(V, 1)
        assert rep.rank == 1 and rep.contained_in_V
        assert rep.stratum_dimension == 20
        m = rep.basis[0]
        rows = V.pairing_rows()
        assert all(sum(F(r) * x for r, x in zip(row, m)) == 0 for row in rows)

    def test_witness_exactness_random(self, form):
        rnd = random.Random(5)
        vs = []
        while len(vs) < 3:
            v = [F(rnd.randrange(-2, 3)) for _ in range(22)]
            if rational_rank(vs + [v]) == len(vs) + 1:
                vs.append(v)
        V = Hyperplane(span_vectors=vs, form=form)
        r = hyperplane_rank(V)
        rep = f_n_witness(V, min(5, r))
        assert rep.reconstruction_ok
        assert all(all(isinstance(c, int) for c in m) for m in rep.basis)


class TestPicardBound:
    def test_eighteen_dimensional_family(self):
        pb = picard_bound(18)
        assert pb.bound == 2
        assert pb.non_kummer_possible

    def test_zero(self):
        pb = picard_bound(0)
        assert pb.bound == 20 and not pb.non_kummer_possible

    def test_range_error(self):
        with pytest.raises(errors.RangeError):
            picard_bound(21)
        with pytest.raises(errors.RangeError):
            picard_bound(-1)

    def test_threshold_boundary(self):
        assert not picard_bound(4).non_kummer_possible  # bound 16 is not < 16
        assert picard_bound(5).non_kummer_possible
