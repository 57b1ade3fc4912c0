import unittest
import warnings

import numpy as np
from numpy.testing import assert_allclose

from realrootfinder.modules import polycore
from realrootfinder.modules.utils import make_rng, gaussian, complex_gaussian, match_multisets
from realrootfinder.modules.structures import Polynomial
from realrootfinder.modules.exceptions import ZeroScale, Pole, DegreeDrop, DivisionByZeroPoly


class TestPolyCore(unittest.TestCase):
    def test_eval(self):
        p = Polynomial([1.0, 2.0, 3.0])
        self.assertEqual(polycore.eval(p, 2.0), 17.0)
        assert_allclose(polycore.eval(p, np.array([0.0, 1.0, -1.0])), [1.0, 6.0, 2.0])
        self.assertAlmostEqual(polycore.eval(p, 1j), complex(-2.0, 2.0))

    def test_derivative_and_monic(self):
        p = Polynomial([1.0, 2.0, 3.0])
        self.assertEqual(polycore.derivative(p), Polynomial([2.0, 6.0]))
        self.assertEqual(polycore.derivative(Polynomial([5.0])), Polynomial([0.0]))
        self.assertEqual(polycore.monic(Polynomial([2.0, 4.0])), Polynomial([0.5, 1.0]))
        with self.assertRaises(DivisionByZeroPoly):
            polycore.monic(Polynomial([0.0]))

    def test_from_roots(self):
        p = polycore.from_roots([1.0, 2.0])
        self.assertTrue(p.is_real)
        assert_allclose(p.coeffs, [2.0, -3.0, 1.0])

        # conjugate pairs give real coefficients
        q = polycore.from_roots([1j, -1j])
        self.assertTrue(q.is_real)
        assert_allclose(q.coeffs, [1.0, 0.0, 1.0])

        self.assertFalse(polycore.from_roots([1j]).is_real)

    def test_shift_scale(self):
        for p in self.samples:
            self.assertEqual(polycore.shift_scale(p, 1, 0), p)

        # (2x + 1)^2
        q = polycore.shift_scale(Polynomial([0.0, 0.0, 1.0]), 2.0, 1.0)
        assert_allclose(q.coeffs, [1.0, 4.0, 4.0])

        for p in self.samples:
            q = polycore.shift_scale(p, 0.5, -1.5)
            x = np.array([0.3, -1.1, 2.0])
            assert_allclose(polycore.eval(q, x), polycore.eval(p, 0.5 * x - 1.5), rtol=1e-10)

        with self.assertRaises(ZeroScale):
            polycore.shift_scale(self.samples[0], 0, 1.0)

    def test_reverse(self):
        p = Polynomial([1.0, 2.0, 3.0])
        self.assertEqual(polycore.reverse(p), Polynomial([3.0, 2.0, 1.0]))
        self.assertEqual(polycore.reverse(polycore.reverse(p)), p)
        with self.assertWarns(RuntimeWarning):
            polycore.reverse(Polynomial([0.0, 1.0, 1.0]))

    def test_poly_mul(self):
        small = polycore.poly_mul(Polynomial([1.0, 1.0]), Polynomial([-1.0, 1.0]))
        assert_allclose(small.coeffs, [-1.0, 0.0, 1.0])

        # above the crossover the product goes through the FFT
        rng = make_rng(3)
        a = Polynomial(gaussian(40, rng))
        b = Polynomial(gaussian(50, rng))
        prod = polycore.poly_mul(a, b)
        self.assertTrue(prod.is_real)
        assert_allclose(prod.coeffs, np.convolve(a.coeffs, b.coeffs), atol=1e-10)

        c = Polynomial(complex_gaussian(45, rng))
        assert_allclose(polycore.poly_mul(a, c).coeffs, np.convolve(a.coeffs, c.coeffs), atol=1e-10)

    def test_poly_add(self):
        p = Polynomial([1.0, 2.0])
        q = Polynomial([0.0, 1.0, 1.0])
        assert_allclose(polycore.poly_add(p, q).coeffs, [1.0, 3.0, 1.0])
        assert_allclose(polycore.poly_add(p, q, 2.0, -1.0).coeffs, [2.0, 3.0, -1.0])
        self.assertTrue(polycore.poly_add(p, p, 1.0, -1.0).is_zero)

    def test_poly_divrem(self):
        quot, rem = polycore.poly_divrem(Polynomial([-1.0, 0.0, 1.0]), Polynomial([-1.0, 1.0]))
        assert_allclose(quot.coeffs, [1.0, 1.0])
        self.assertTrue(rem.is_zero)

        quot, rem = polycore.poly_divrem(Polynomial([1.0, 1.0]), Polynomial([0.0, 0.0, 1.0]))
        self.assertTrue(quot.is_zero)
        self.assertEqual(rem, Polynomial([1.0, 1.0]))

        rng = make_rng(5)
        for _ in range(5):
            p = Polynomial(gaussian(12, rng))
            q = Polynomial(np.append(gaussian(6, rng), 1.0))
            quot, rem = polycore.poly_divrem(polycore.poly_mul(p, q), q)
            assert_allclose(quot.coeffs, p.coeffs, atol=1e-9)
            self.assertLessEqual(rem.norm, 1e-10 * polycore.poly_mul(p, q).norm)

        self.assertEqual(polycore.poly_mod(Polynomial([3.0, 0.0, 1.0]), Polynomial([0.0, 1.0])), Polynomial([3.0]))
        with self.assertRaises(DivisionByZeroPoly):
            polycore.poly_divrem(Polynomial([1.0, 1.0]), Polynomial([0.0]))

    def test_dandelin_square(self):
        q = polycore.dandelin_square(polycore.from_roots([1.0, 2.0, 3.0]))
        assert_allclose(q.coeffs, polycore.from_roots([1.0, 4.0, 9.0]).coeffs, atol=1e-10)

        rng = make_rng(7)
        for n in (3, 8, 16):
            roots = complex_gaussian(n, rng)
            q = polycore.dandelin_square(polycore.from_roots(roots, leading=2.5))
            ref = polycore.from_roots(roots**2)
            self.assertEqual(q.degree, n)
            self.assertEqual(q.leading, 1.0)
            self.assertLessEqual(np.max(np.abs(q.coeffs - ref.coeffs)), 1e-9 * max(1.0, ref.norm))

    def test_cayley_scalar(self):
        for x in (-3.0, 0.0, 0.7, 12.0):
            for a in (0.5, 1.0, -2.0):
                y = polycore.cayley_scalar(x, a)
                self.assertAlmostEqual(abs(y), 1.0)
                self.assertAlmostEqual(polycore.cayley_scalar(y, a, "circle_to_line"), x)

        with self.assertRaises(Pole):
            polycore.cayley_scalar(-1j, 1.0)
        with self.assertRaises(Pole):
            polycore.cayley_scalar(1.0, 1.0, "circle_to_line")
        with self.assertRaises(ZeroScale):
            polycore.cayley_scalar(1.0, 0)

    def test_cayley_poly(self):
        roots = np.array([0.5, -2.0, 3.0])
        images = [polycore.cayley_scalar(x, 1.0) for x in roots]
        q = polycore.cayley_poly(polycore.from_roots(roots), 1.0)
        assert_allclose(q.coeffs, polycore.from_roots(images).coeffs, atol=1e-12)

        with self.assertRaises(DegreeDrop):
            polycore.cayley_poly(polycore.from_roots([-1j, 2.0]), 1.0)

    def test_chebyshev(self):
        self.assertEqual(polycore.chebyshev(0), Polynomial([1.0]))
        self.assertEqual(polycore.chebyshev(2), Polynomial([-1.0, 0.0, 2.0]))
        self.assertEqual(polycore.chebyshev(3), Polynomial([0.0, -3.0, 0.0, 4.0]))

        x = np.linspace(-1, 1, 7)
        assert_allclose(polycore.eval(polycore.chebyshev(8), x), np.cos(8 * np.arccos(x)), atol=1e-12)

    def test_root_maps_keep_roots(self):
        rng = make_rng(11)
        for _ in range(10):
            roots = complex_gaussian(6, rng)
            p = polycore.from_roots(roots)
            rev = polycore.reverse(p)
            scale = max(1.0, np.max(np.abs(1 / roots)))
            self.assertLessEqual(match_multisets(np.roots(rev.coeffs[::-1]), 1 / roots), 1e-8 * scale)
            shifted = polycore.shift_scale(p, 1.0, 0.25)
            self.assertLessEqual(match_multisets(np.roots(shifted.coeffs[::-1]), roots - 0.25), 1e-8)

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)
        self.samples = [
            Polynomial([1.0, -2.0, 0.5, 3.0]),
            Polynomial([2.0, 0.0, 0.0, 0.0, 1.0]),
            polycore.from_roots([1.0, 1j, -1j]),
        ]


if __name__ == "__main__":
    unittest.main()
