import unittest
import warnings

import numpy as np
from numpy.testing import assert_allclose

from realrootfinder.modules import polycore, frobenius, planegeometry, refine, modularflow, signiter
from realrootfinder.modules.utils import make_rng, gaussian, complex_gaussian, match_multisets
from realrootfinder.modules.structures import Polynomial, DiscQuery


def _separated(roots, gap) -> bool:
    dist = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(dist, np.inf)
    return bool(np.min(dist) >= gap)


class TestAlgebraProperties(unittest.TestCase):
    def test_frobenius_matches_dense(self):
        rng = make_rng(40)
        for case in range(50):
            p = Polynomial(np.append(gaussian(8, rng), 1.0))
            f = frobenius.element(p, Polynomial(gaussian(8, rng)))
            g = frobenius.element(p, Polynomial(gaussian(8, rng)))
            F, G = frobenius.frob_matrix(f), frobenius.frob_matrix(g)
            prod = frobenius.frob_matrix(frobenius.frob_mul(f, g))
            scale = np.linalg.norm(F) * np.linalg.norm(G)
            self.assertLessEqual(np.linalg.norm(prod - F @ G), 1e-10 * scale, f"case {case}")

            if np.linalg.cond(F) > 1e8:
                continue
            U = frobenius.frob_matrix(frobenius.frob_inv(f))
            size = np.linalg.norm(F) * np.linalg.norm(U)
            self.assertLessEqual(np.linalg.norm(F @ U - np.eye(8)), 1e-8 * size, f"case {case}")

    def test_root_maps(self):
        rng = make_rng(41)
        for case in range(100):
            n = 2 + case % 7
            roots = complex_gaussian(n, rng)
            p = polycore.from_roots(roots)

            squared = polycore.dandelin_square(p)
            ref = polycore.from_roots(roots**2)
            self.assertLessEqual(np.max(np.abs(squared.coeffs - ref.coeffs)), 1e-9 * max(1.0, ref.norm))

            scale = max(1.0, np.max(np.abs(1 / roots)))
            rev = polycore.reverse(p)
            self.assertLessEqual(match_multisets(np.roots(rev.coeffs[::-1]), 1 / roots), 1e-6 * scale)

            real = 2 * gaussian(n, rng)
            if not _separated(real, 1e-2):
                continue
            images = np.array([polycore.cayley_scalar(x, 1.0) for x in real])
            assert_allclose(np.abs(images), 1.0)
            q = polycore.cayley_poly(polycore.from_roots(real), 1.0)
            self.assertLessEqual(match_multisets(np.roots(q.coeffs[::-1]), images), 1e-6, f"case {case}")

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)


class TestGeometryProperties(unittest.TestCase):
    def test_disc_counts(self):
        rng = make_rng(42)
        checked = 0
        for case in range(100):
            n = 2 + case % 9
            roots = 2 * complex_gaussian(n, rng)
            center = complex_gaussian(1, rng)[0]
            radius = rng.uniform(0.3, 2.0)
            dist = np.abs(roots - center)
            # isolation 9^(1/2^3) keeps three squarings well conditioned
            if np.any((dist > radius / 1.35) & (dist < radius * 1.35)):
                continue
            checked += 1
            p = polycore.from_roots(roots)
            expected = int(np.sum(dist < radius))
            self.assertEqual(planegeometry.count_roots_disc(p, DiscQuery(center, radius)), expected, f"case {case}")
            for h in range(4):
                self.assertEqual(planegeometry.count_with_squaring(p, DiscQuery(center, radius, h)), expected)
        self.assertGreaterEqual(checked, 10)

    def test_radius_brackets(self):
        rng = make_rng(43)
        for case in range(100):
            n = 2 + case % 9
            roots = complex_gaussian(n, rng) * np.exp(gaussian(n, rng))
            true = np.sort(np.abs(roots))[::-1]
            k = case % 4
            lower, upper = planegeometry.root_radii_bracket(polycore.from_roots(roots), k)
            self.assertTrue(np.all(lower <= true * (1 + 1e-8)), f"case {case}")
            self.assertTrue(np.all(true <= upper * (1 + 1e-8)), f"case {case}")

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)


class TestIterationProperties(unittest.TestCase):
    def test_newton_quadratic_bound(self):
        rng = make_rng(44)
        for case in range(20):
            n = 3 + case % 8
            x1 = complex_gaussian(1, rng)[0]
            # the other roots keep distance at least 1 from x1
            others = x1 + np.exp(2j * np.pi * rng.uniform(size=n - 1)) * rng.uniform(1.0, 3.0, size=n - 1)
            p = polycore.from_roots(np.append(others, x1))
            e0 = 1 / (10 * n)
            y0 = x1 + e0 * np.exp(2j * np.pi * rng.uniform())
            path = refine.newton_steps(p, y0, 4)
            for k, y in enumerate(path):
                self.assertLessEqual(abs(y - x1), 2 * e0 / 2 ** (2**k) + 1e-10, f"case {case}, step {k}")

    def test_modular_matches_matrix_flow(self):
        rng = make_rng(45)
        compared = 0
        for case in range(20):
            pair = complex_gaussian(2, rng)
            pair = pair.real + 1j * np.sign(pair.imag) * (np.abs(pair.imag) + 0.5)
            roots = np.concatenate((gaussian(3, rng), pair, pair.conj()))
            if not _separated(roots, 0.3):
                continue
            p = polycore.from_roots(roots)
            y = frobenius.variable(p)
            M = frobenius.companion(p)
            values = roots.astype(complex)
            for k in range(1, 5):
                if np.min(np.abs(values)) < 0.1:
                    break
                values = np.array([signiter.mobius_step(x) for x in values])
                y = modularflow.sqrt_mod_step(y)
                M = signiter.sign_step(M)
                scale = max(1.0, np.max(np.abs(values)))
                assert_allclose(frobenius.frob_eval(y, roots), values, atol=1e-7 * scale)
                assert_allclose(frobenius.frob_matrix(y), M, atol=1e-7 * max(1.0, np.linalg.norm(M)))
                compared += 1
        self.assertGreater(compared, 0)

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)


if __name__ == "__main__":
    unittest.main()
