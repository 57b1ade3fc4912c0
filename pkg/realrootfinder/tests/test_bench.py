import math
import unittest
import warnings

import numpy as np
from numpy.testing import assert_allclose

from realrootfinder.modules import bench, polycore
from realrootfinder.modules.bench import Bench
from realrootfinder.modules.structures import Polynomial, SuiteConfig, Family, Algo, Variant, Status, Type3Reading
from realrootfinder.modules.exceptions import InvalidConfig


class TestGenerators(unittest.TestCase):
    def test_gen_mignotte(self):
        self.assertEqual(bench.gen_mignotte(4), Polynomial([-1.0, 300.0, -3e4, 1e6, 1.0]))
        p = bench.gen_mignotte(32)
        self.assertEqual(p.degree, 32)
        self.assertEqual(p.leading, 1.0)
        with self.assertRaises(InvalidConfig):
            bench.gen_mignotte(3)

    def test_gen_type(self):
        p = bench.gen_type(Family.TYPE_I, 6, 2)
        expected = polycore.poly_mul(polycore.chebyshev(2), Polynomial([-1.0, 0.0, 0.0, 0.0, 1.0]))
        self.assertEqual(p, expected)

        p = bench.gen_type(Family.TYPE_II, 5, 2)
        expected = polycore.poly_mul(polycore.chebyshev(2), Polynomial([1.0, 2.0, 3.0, 4.0]))
        self.assertEqual(p, expected)

        p = bench.gen_type(Family.TYPE_III, 5, 2, type3_reading=Type3Reading.REAL)
        self.assertTrue(p.is_real)
        self.assertEqual(p.degree, 5)
        assert_allclose(polycore.eval(p, np.array([-1.0, -0.01, -1e-4])), 0.0, atol=1e-12)
        self.assertFalse(bench.gen_type(Family.TYPE_III, 5, 2).is_real)

        p = bench.gen_type(Family.TYPE_IV, 5, 100)
        assert_allclose(p.coeffs, [1.0, -300.0, 3e4, -1e6, 0.0, 1.0])

        self.assertEqual(bench.gen_type(Family.TYPE_V, 10, 0, seed=5), bench.gen_type(Family.TYPE_V, 10, 0, seed=5))
        self.assertNotEqual(bench.gen_type(Family.TYPE_V, 10, 0, seed=5), bench.gen_type(Family.TYPE_V, 10, 0, seed=6))
        self.assertEqual(bench.gen_type(Family.RANDOM_PRODUCT, 12, 4, seed=(1, 2)).degree, 12)
        self.assertEqual(bench.gen_type(Family.MIGNOTTE, 8, 3), bench.gen_mignotte(8))

        with self.assertRaises(InvalidConfig):
            bench.gen_type(Family.TYPE_I, 4, 6)
        with self.assertRaises(InvalidConfig):
            bench.gen_type("VI", 4, 2)

    def test_gen_matrix(self):
        T = bench.gen_matrix(Family.TRIDIAG, 6, 0, seed=1)
        self.assertEqual(T.shape, (6, 6))
        assert_allclose(np.triu(T, 2), 0.0)
        assert_allclose(np.tril(T, -2), 0.0)

        A = bench.gen_matrix(Family.ROTATED_DIAG, 8, 3, seed=2)
        eigs = np.linalg.eigvals(A)
        self.assertEqual(int(np.sum(np.abs(eigs.imag) < 1e-8)), 3)
        self.assertTrue(np.all(np.abs(eigs.imag[np.abs(eigs.imag) >= 1e-8]) >= 0.1 - 1e-8))

        S = bench.gen_matrix(Family.COMPLEX_SYMMETRIC, 8, 3, seed=2)
        assert_allclose(S, S.T)

        with self.assertRaises(InvalidConfig):
            bench.gen_matrix(Family.TRIDIAG, 4, 5)
        with self.assertRaises(InvalidConfig):
            bench.gen_matrix(Family.TYPE_I, 4, 2)

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)


class TestBench(unittest.TestCase):
    def test_oracle_suite(self):
        suite = SuiteConfig(name="oracle", family=Family.TYPE_I, algo=Algo.ORACLE, n=[12, 8], r=[2, 4], trials=2)
        records = self.bench.run_suite(suite)
        self.assertEqual([(rec.n, rec.r) for rec in records], [(8, 2), (8, 4), (12, 2), (12, 4)])
        for record in records:
            self.assertEqual(record.failures, 0)
            self.assertEqual(record.trials, 2)
            self.assertEqual(record.iteration_mean, 0.0)
            self.assertEqual(record.error_mean, 0.0)
            self.assertEqual(len(record.details), 2)

        again = self.bench.run_suite(suite)
        self.assertEqual([rec.to_row() for rec in again], [rec.to_row() for rec in records])

    def test_matrix_suite(self):
        suite = SuiteConfig(
            name="rotated",
            family=Family.ROTATED_DIAG,
            algo=Algo.SIGN,
            n=[6],
            r=[2],
            trials=2,
            use_r_hint=True,
        )
        (record,) = self.bench.run_suite(suite)
        self.assertEqual(record.failures, 0)
        self.assertLessEqual(record.error_mean, 1e-6)
        self.assertTrue(all(d["expected"] == 2 for d in record.details))

    def test_table_sizes(self):
        suites = [
            SuiteConfig(name="mignotte", family=Family.MIGNOTTE, algo=Algo.SIGN, n=[32], r=[3], trials=1,
                        flow={"scale": "determinantal"}),
            SuiteConfig(name="type_iv", family=Family.TYPE_IV, algo=Algo.HYBRID, n=[64], r=[60], trials=1,
                        use_r_hint=True),
            SuiteConfig(name="type_iii", family=Family.TYPE_III, algo=Algo.STABILIZED, n=[64], r=[8], trials=1),
            SuiteConfig(name="modular_i", family=Family.TYPE_I, algo=Algo.MODULAR, n=[64], r=[8, 12, 16], trials=1,
                        use_r_hint=True),
            SuiteConfig(name="modular_ii", family=Family.TYPE_II, algo=Algo.MODULAR, n=[64], r=[8, 12, 16], trials=1,
                        use_r_hint=True),
        ]
        expected = {"mignotte": 4, "type_iv": 4}
        for suite in suites:
            for record in self.bench.run_suite(suite):
                (detail,) = record.details
                self.assertNotEqual(detail["status"], "rejected", suite.name)
                if suite.name in expected:
                    self.assertEqual(detail["expected"], expected[suite.name])
                if detail["status"] in (Status.OK, Status.SHIFTED):
                    self.assertEqual(detail["found"], detail["expected"], suite.name)
                    self.assertLessEqual(detail["error"], 1e-3, suite.name)

    def test_flow_config(self):
        suite = SuiteConfig(name="s", family=Family.TYPE_IV, algo=Algo.HYBRID, r=[60], flow={"max_iter": 40})
        cfg = self.bench.flow_config(suite)
        self.assertEqual(cfg.variant, Variant.HYBRID)
        self.assertEqual(cfg.max_iter, 40)

        suite = SuiteConfig(name="s", family=Family.TYPE_IV, algo=Algo.HYBRID, r=[60], flow={"variant": "quintic"})
        self.assertEqual(self.bench.flow_config(suite).variant, Variant.QUINTIC)

    def test_aggregate(self):
        suite = SuiteConfig(name="agg", family=Family.TYPE_II, n=[16], r=[4], trials=4, seed=9)
        details = [
            {"status": Status.OK, "iterations": 10, "error": 1e-10},
            {"status": Status.SHIFTED, "iterations": 20, "error": 3e-10},
            {"status": Status.FAILURE, "iterations": None, "error": None},
            {"status": "mismatch", "iterations": 30, "error": None},
        ]
        record = Bench._aggregate(suite, 16, 4, details)
        self.assertEqual(record.failures, 2)
        self.assertEqual(record.mismatches, 1)
        self.assertEqual(record.iteration_mean, 15.0)
        self.assertEqual(record.iteration_std, 5.0)
        self.assertAlmostEqual(record.error_mean, 2e-10)
        self.assertEqual(record.seed, 9)

        record = Bench._aggregate(suite, 16, 4, details[2:])
        self.assertTrue(math.isnan(record.iteration_mean))
        row = record.to_row()
        self.assertEqual(row[5:9], ["", "", "", ""])
        self.assertEqual(row[:5], [Family.TYPE_II, 16, 4, 4, 2])

    def test_suite_validation(self):
        with self.assertRaises(InvalidConfig):
            SuiteConfig(name="bad", family=Family.TRIDIAG, algo=Algo.MODULAR).validate()
        with self.assertRaises(InvalidConfig):
            SuiteConfig(name="bad", family=Family.TYPE_I, n=[8], r=[9]).validate()
        with self.assertRaises(InvalidConfig):
            SuiteConfig.from_dict("bad", {"family": "I", "colour": "red"})
        suite = SuiteConfig.from_dict("ok", {"family": "IV", "n": 64, "r": 100})
        self.assertEqual(suite.n, [64])
        self.assertEqual(suite.r, [100])

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)
        self.bench = Bench()
        self.bench.logger.disabled = True


if __name__ == "__main__":
    unittest.main()
