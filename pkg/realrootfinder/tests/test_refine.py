import unittest
import warnings

import numpy as np
from numpy.testing import assert_allclose

from realrootfinder.modules import refine, polycore, bench
from realrootfinder.modules.frobenius import companion
from realrootfinder.modules.planegeometry import r1_bounds
from realrootfinder.modules.utils import make_rng, gaussian, complex_gaussian, match_multisets
from realrootfinder.modules.structures import Polynomial, Family
from realrootfinder.modules.exceptions import DerivativeVanished, MaxIterExceeded, InputError


class TestRefine(unittest.TestCase):
    def test_root_residuals(self):
        p = Polynomial([-1.0, 0.0, 1.0])
        assert_allclose(refine.root_residuals(p, [1.0, -1.0]), [0.0, 0.0])
        # |p(2)| / (||p|| 2^2)
        assert_allclose(refine.root_residuals(p, 2.0), [3.0 / (np.sqrt(2.0) * 4.0)])
        assert_allclose(refine.root_residuals(p, 0.5), [0.75 / np.sqrt(2.0)])
        self.assertEqual(refine.root_residuals(p, []).size, 0)

    def test_newton(self):
        root, iterations = refine.newton(Polynomial([-2.0, 0.0, 1.0]), 1.0)
        self.assertAlmostEqual(root, np.sqrt(2.0), places=14)
        self.assertLessEqual(iterations, 8)

        root, _ = refine.newton(Polynomial([1.0, 0.0, 1.0]), 0.5 + 0.5j)
        self.assertAlmostEqual(root, 1j, places=12)

        with self.assertRaises(DerivativeVanished):
            refine.newton(Polynomial([-2.0, 0.0, 1.0]), 0.0)
        with self.assertRaises(MaxIterExceeded) as cm:
            refine.newton(Polynomial([1.0, 0.0, 1.0]), 0.5, max_iter=5)
        self.assertIsNotNone(cm.exception.last)

    def test_newton_steps(self):
        path = refine.newton_steps(Polynomial([-2.0, 0.0, 1.0]), 1.0, 3)
        assert_allclose(path[:3], [1.0, 1.5, 17.0 / 12.0])
        self.assertEqual(path.size, 4)
        # quadratic convergence
        errors = np.abs(path - np.sqrt(2.0))
        self.assertLessEqual(errors[3], 2 * errors[2] ** 2)

    def test_one_step(self):
        p = Polynomial([-1.0, 0.0, 1.0])
        report = refine.aberth(p, [2.0, -2.0], max_iter=1)
        assert_allclose(np.sort(report.roots.real), [-14.0 / 13.0, 14.0 / 13.0])
        self.assertEqual(report.iterations, 1)

        report = refine.wdk(p, [2.0, -2.0], max_iter=1)
        assert_allclose(np.sort(report.roots.real), [-1.25, 1.25])

    def test_simultaneous_convergence(self):
        rng = make_rng(30)
        roots = complex_gaussian(12, rng)
        p = polycore.from_roots(roots)
        z0 = 2 * np.exp(1j * (2 * np.pi * np.arange(12) / 12 + 0.371))
        for method in (refine.aberth, refine.wdk):
            report = method(p, z0, max_iter=500)
            self.assertTrue(report.all_converged)
            self.assertLessEqual(match_multisets(report.roots, roots), 1e-8)
            self.assertTrue(np.all(report.residuals <= 1e-12))

        with self.assertRaises(InputError):
            refine.aberth(p, z0[:5])

    def test_oracle_roots(self):
        roots = refine.oracle_roots(polycore.from_roots([3.0, 1.0, 2.0]))
        assert_allclose(roots, [1.0, 2.0, 3.0], atol=1e-12)
        self.assertTrue(np.all(roots.imag == 0))

        roots = refine.oracle_roots(Polynomial([0.0, 0.0, -1.0, 1.0]))
        assert_allclose(roots, [0.0, 0.0, 1.0], atol=1e-12)

        roots = refine.oracle_roots(Polynomial([1.0, 0.0, 1.0]))
        self.assertLessEqual(match_multisets(roots, [1j, -1j]), 1e-12)

        rng = make_rng(31)
        p = Polynomial(gaussian(40, rng))
        found = refine.oracle_roots(p)
        self.assertEqual(found.size, 39)
        self.assertTrue(np.all(refine.root_residuals(p, found) <= 1e-12))

        with self.assertRaises(InputError):
            refine.oracle_roots(Polynomial([0.0]))

    def test_backward_errors(self):
        p = Polynomial([-1.0, 0.0, 1.0])
        assert_allclose(refine.backward_errors(p, [1.0, -1.0]), [0.0, 0.0])
        # |p(2)| / (1 + 2^2)
        assert_allclose(refine.backward_errors(p, 2.0), [0.6])
        assert_allclose(refine.backward_errors(p, 0.5), [0.6])
        self.assertEqual(refine.backward_errors(p, []).size, 0)

    def test_aberth_matches_eigenvalues(self):
        rng = make_rng(32)
        for case in range(50):
            n = 2 + case % 15
            p = Polynomial(np.append(gaussian(n, rng), 1.0))
            upper = r1_bounds(p)[1]
            z0 = upper * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.371))
            report = refine.aberth(p, z0, max_iter=500, tol=1e-14)
            self.assertTrue(report.all_converged, f"case {case}")
            eigs = np.linalg.eigvals(companion(p))
            self.assertLessEqual(match_multisets(report.roots, eigs), 1e-6 * max(1.0, upper), f"case {case}")

    def test_oracle_clusters(self):
        # x^n + (100x - 1)^3: three roots about 0.01 and one negative real root
        for n, (low, high) in ((32, (-1.7, -1.5)), (64, (-1.3, -1.2))):
            roots = refine.oracle_roots(bench.gen_mignotte(n))
            real = np.sort(roots[np.abs(roots.imag) <= 1e-4 * np.maximum(1.0, np.abs(roots))].real)
            self.assertEqual(real.size, 4)
            self.assertTrue(low < real[0] < high)
            assert_allclose(real[1:], 0.01, atol=1e-5)

        # x^64 - (60x - 1)^3: three roots about 1/60 and one real root near 1.222
        roots = refine.oracle_roots(bench.gen_type(Family.TYPE_IV, 64, 60))
        real = np.sort(roots[np.abs(roots.imag) <= 1e-4 * np.maximum(1.0, np.abs(roots))].real)
        self.assertEqual(real.size, 4)
        assert_allclose(real[:3], 1 / 60, atol=1e-5)
        self.assertTrue(1.2 < real[3] < 1.25)

        p = bench.gen_type(Family.TYPE_III, 64, 8)
        self.assertEqual(refine.oracle_roots(p).size, 64)

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)


if __name__ == "__main__":
    unittest.main()
