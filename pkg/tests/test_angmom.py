import math

import numpy as np
import pytest

from rydberg_frames.angmom import (
    HalfInt,
    clebsch_gordan,
    coherent_coeffs,
    small_d_matrices,
    wigner_D,
    wigner_small_d,
)

SQ = math.sqrt


class TestHalfInt:
    def test_coercion(self):
        assert HalfInt.of(2).twice == 4
        assert HalfInt.of(4.5).twice == 9
        assert HalfInt.of(HalfInt(3)).twice == 3
        with pytest.raises(ValueError):
            HalfInt.of(0.3)

    def test_repr(self):
        assert repr(HalfInt(4)) == "2"
        assert repr(HalfInt(9)) == "9/2"


class TestClebschGordan:
    def test_n3_stark_column(self):
        # magnitudes 1/sqrt 3, 1/sqrt 2, 1/sqrt 6 for l = 0, 1, 2
        expected = [1 / SQ(3), 1 / SQ(2), 1 / SQ(6)]
        for l, mag in enumerate(expected):
            assert abs(clebsch_gordan(1, 1, l, -1, 1, 0)) == pytest.approx(mag, abs=1e-14)

    def test_selection_rule(self):
        assert clebsch_gordan(2, 2, 3, 1, -1, 1) == 0.0
        assert clebsch_gordan(4.5, 4.5, 2, 0.5, 0.5, 2) == 0.0

    def test_stretched(self):
        assert clebsch_gordan(0.5, 0.5, 1, 0.5, 0.5, 1) == pytest.approx(1.0, abs=1e-15)

    def test_closed_form_maximal_k_column(self):
        # C^{jj l}_{-j j 0} magnitude is (2j)! sqrt(2l+1) / sqrt((2j-l)! (2j+l+1)!)
        for n in (3, 6, 10, 17):
            tj = n - 1
            j = tj / 2
            for l in range(n):
                closed = (
                    math.factorial(tj)
                    * SQ(2 * l + 1)
                    / SQ(math.factorial(tj - l) * math.factorial(tj + l + 1))
                )
                value = clebsch_gordan(j, j, l, -j, j, 0)
                assert abs(value) == pytest.approx(closed, rel=1e-12)

    def test_table_column_n10_printed_truncated(self):
        printed = [0.3162, 0.4954, 0.5222, 0.4534, 0.3365,
                   0.2148, 0.1167, 0.0526, 0.0186, 0.0045]
        for l, ref in enumerate(printed):
            value = abs(clebsch_gordan(4.5, 4.5, l, -4.5, 4.5, 0))
            assert math.floor(value * 1e4) / 1e4 == pytest.approx(ref, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            clebsch_gordan(1, 1, 3, 0, 0, 0)  # triangle
        with pytest.raises(ValueError):
            clebsch_gordan(1, 1, 1, 2, -1, 1)  # |m1| > j1
        with pytest.raises(ValueError):
            clebsch_gordan(1, 1, 1, 0.5, 0.5, 1)  # parity mismatch
        with pytest.raises(ValueError):
            clebsch_gordan(0.5, 1, 0.5, 0.5, 0.5, 1)  # m out of range for l

    @pytest.mark.parametrize("twice_j", [1, 2, 3, 4, 7, 10, 15, 20, 30])
    def test_orthogonality(self, twice_j):
        # rows (m1, m2), columns (l, m): the coupling matrix is orthogonal
        n = twice_j + 1
        j = twice_j / 2
        mat = np.zeros((n * n, n * n))
        col = 0
        for l in range(n):
            for m in range(-l, l + 1):
                for i1 in range(n):
                    m1 = i1 - j
                    m2 = m - m1
                    if abs(m2) > j:
                        continue
                    i2 = int(m2 + j)
                    mat[i1 * n + i2, col] = clebsch_gordan(j, j, l, m1, m2, m)
                col += 1
        gram = mat.T @ mat
        assert np.abs(gram - np.eye(n * n)).max() < 1e-12


def _legendre(l, x):
    p_prev, p = np.ones_like(x), x.copy()
    if l == 0:
        return p_prev
    for k in range(1, l):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


class TestSmallD:
    def test_stretched_element(self):
        for j in (0.5, 1, 2.5, 7):
            for beta in (0.0, 0.4, 1.7, 3.0):
                assert wigner_small_d(j, j, j, beta) == pytest.approx(
                    math.cos(beta / 2) ** int(4 * j / 2), abs=1e-13
                )

    def test_legendre_oracle(self):
        betas = np.linspace(0.05, 3.1, 11)
        for l in (0, 1, 2, 5, 9):
            expected = _legendre(l, np.cos(betas))
            got = np.array([wigner_small_d(l, 0, 0, b) for b in betas])
            assert np.abs(got - expected).max() < 1e-12

    def test_identity_rotation(self):
        for l in (1, 3.5):
            tl = int(2 * l)
            for tm in range(-tl, tl + 1, 2):
                m = tm / 2
                assert wigner_small_d(l, m, m, 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("l", [1, 3.5, 8, 15])
    def test_unitarity_and_composition(self, l):
        rng = np.random.default_rng(int(2 * l))
        b1, b2 = rng.uniform(0.1, 3.0, 2)
        d1 = small_d_matrices(l, [b1])[0]
        d2 = small_d_matrices(l, [b2])[0]
        d12 = small_d_matrices(l, [b1 + b2])[0]
        assert np.abs(d1 @ d1.T - np.eye(d1.shape[0])).max() < 1e-11
        assert np.abs(d1 @ d2 - d12).max() < 1e-11

    @pytest.mark.parametrize("l", [0.5, 2, 4.5, 9])
    def test_stack_matches_scalar_sum(self, l):
        # eigendecomposition route against the independent term-by-term sum
        betas = np.array([0.0, 0.37, 1.29, 2.6, math.pi])
        stack = small_d_matrices(l, betas)
        tl = int(2 * l)
        for bi, beta in enumerate(betas):
            for imp in range(tl + 1):
                for im in range(tl + 1):
                    mp = imp - l
                    m = im - l
                    assert stack[bi, imp, im] == pytest.approx(
                        wigner_small_d(l, mp, m, beta), abs=1e-12
                    )

    def test_projection_out_of_range(self):
        with pytest.raises(ValueError):
            wigner_small_d(1, 2, 0, 0.3)


class TestWignerD:
    def test_identity_is_delta(self):
        for l in (1, 2.5):
            tl = int(2 * l)
            for imp in range(tl + 1):
                for im in range(tl + 1):
                    expected = 1.0 if imp == im else 0.0
                    value = wigner_D(l, imp - l, im - l, (0.0, 0.0, 0.0))
                    assert value == pytest.approx(expected, abs=1e-14)

    def test_row_sum_unitarity(self):
        rng = np.random.default_rng(7)
        for l in (1, 3, 6.5):
            angles = rng.uniform(0.1, 3.0, 3)
            tl = int(2 * l)
            for imp in range(tl + 1):
                total = sum(
                    abs(wigner_D(l, imp - l, im - l, tuple(angles))) ** 2
                    for im in range(tl + 1)
                )
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_binomial_formula_for_top_column(self):
        # D^j_m(theta, phi) = D^(j)(phi, theta, 0)_{m j}
        #                   = binom(2j, j+m)^(1/2) cos^{j+m} sin^{j-m} e^{-i m phi}
        rng = np.random.default_rng(8)
        for j in (0.5, 2, 4.5):
            theta, phi = rng.uniform(0.1, 3.0), rng.uniform(0, 2 * math.pi)
            tj = int(2 * j)
            for im in range(tj + 1):
                m = im - j
                binom = math.comb(tj, im)
                expected = (
                    SQ(binom)
                    * math.cos(theta / 2) ** im
                    * math.sin(theta / 2) ** (tj - im)
                    * np.exp(-1j * m * phi)
                )
                got = wigner_D(j, m, j, (phi, theta, 0.0))
                assert got == pytest.approx(expected, abs=1e-13)


class TestCoherentCoeffs:
    def test_fiducial_at_north_pole(self):
        c = coherent_coeffs(3, 0.0, 0.0)
        expected = np.zeros(7)
        expected[-1] = 1.0
        assert np.allclose(c, expected, atol=1e-15)

    def test_norm_on_grid(self):
        thetas = np.linspace(0, math.pi, 20)
        phis = np.linspace(0, 2 * math.pi, 20, endpoint=False)
        for j in (0.5, 3, 10.5, 25):
            worst = max(
                abs(np.vdot(c, c).real - 1.0)
                for theta in thetas
                for phi in phis
                for c in [coherent_coeffs(j, theta, phi)]
            )
            assert worst < 1e-13

    def test_overlap_law(self):
        rng = np.random.default_rng(9)
        for j in (1, 4.5, 12):
            for _ in range(5):
                t1, t2 = rng.uniform(0, math.pi, 2)
                p1, p2 = rng.uniform(0, 2 * math.pi, 2)
                c1 = coherent_coeffs(j, t1, p1)
                c2 = coherent_coeffs(j, t2, p2)
                u1 = np.array([math.sin(t1) * math.cos(p1), math.sin(t1) * math.sin(p1), math.cos(t1)])
                u2 = np.array([math.sin(t2) * math.cos(p2), math.sin(t2) * math.sin(p2), math.cos(t2)])
                chi = math.acos(max(-1.0, min(1.0, float(u1 @ u2))))
                law = math.cos(chi / 2) ** int(4 * j)
                assert abs(np.vdot(c1, c2)) ** 2 == pytest.approx(law, abs=1e-11)
