import os
import shutil
import tempfile
import unittest
import warnings

import numpy as np
from numpy.testing import assert_allclose

from realrootfinder import realrootfinder as rrf
from realrootfinder.modules import polycore
from realrootfinder.modules.structures import Polynomial, SuiteConfig, Algo, Variant, Family
from realrootfinder.modules.exceptions import InvalidConfig, InputError


class TestRealRootFinder(unittest.TestCase):
    def test_solve(self):
        with self.finder() as finder:
            for algo in (Algo.SIGN, Algo.STABILIZED, Algo.HYBRID):
                report = finder.solve(self.p, algo, 1)
                assert_allclose(report.roots, [2.0], atol=1e-8)
            report = finder.solve(self.p, Algo.MODULAR, 1)
            self.assertEqual(report.variant, Variant.MODULAR)
            assert_allclose(report.roots, [2.0], atol=1e-12)

            with self.assertRaises(InvalidConfig):
                finder.solve(self.p, "bisection")

    def test_solve_oracle(self):
        with self.finder() as finder:
            report = finder.solve(polycore.from_roots([3.0, 1.0, 2.0, 1j, -1j]), Algo.ORACLE)
        self.assertEqual(report.iterations, 0)
        assert_allclose(report.roots, [1.0, 2.0, 3.0], atol=1e-10)
        self.assertTrue(np.all(report.residuals <= 1e-13))

    def test_flow_config(self):
        with self.finder() as finder:
            self.assertEqual(finder.flow_config().variant, Variant.STABILIZED)
            self.assertEqual(finder.flow_config(Algo.HYBRID).variant, Variant.HYBRID)
            self.assertEqual(finder.flow_config(Algo.HYBRID, variant=Variant.CUBIC).variant, Variant.CUBIC)
            cfg = finder.flow_config(Algo.SIGN, max_iter=12, alpha=None)
            self.assertEqual(cfg.max_iter, 12)
            self.assertEqual(cfg.alpha, 1e-4)
            self.assertEqual(cfg.variant, Variant.BASIC)

    def test_config_file(self):
        path = os.path.join(self.folder, "config.yaml")
        with open(path, "w") as f:
            f.write("flow:\n  max_iter: 3\nlogging:\n  disable: true\n")
        with rrf.RealRootFinder(storage_path=self.folder, config_path=path) as finder:
            self.assertTrue(finder.disable_logs)
            self.assertTrue(finder.logger.disabled)
            self.assertEqual(finder.flow_config().max_iter, 3)

    def test_real_eigenvalues(self):
        A = np.zeros((4, 4))
        A[:2, :2] = [[0.0, -1.0], [1.0, 0.0]]
        A[2, 2] = 0.5
        A[3, 3] = -3.0
        with self.finder() as finder:
            report = finder.real_eigenvalues(A, Algo.SIGN, 2)
            assert_allclose(report.roots, [-3.0, 0.5], atol=1e-8)
            with self.assertRaises(InvalidConfig):
                finder.real_eigenvalues(A, Algo.HYBRID)

    def test_plane_geometry(self):
        with self.finder() as finder:
            self.assertEqual(finder.count(self.p, 0j, 3.0), 3)
            self.assertEqual(finder.count(self.p, 0j, 1.5, squarings=2), 2)
            lower, upper = finder.radii(self.p, 2)
            self.assertEqual(lower.size, 3)
            self.assertTrue(np.all(lower <= upper))
            lo, hi = finder.proximity(self.p, 2.5)
            self.assertLessEqual(lo, 0.5)
            self.assertGreaterEqual(hi, 0.5)

    def test_bench(self):
        suite = SuiteConfig(name="tiny", family=Family.TYPE_II, algo=Algo.ORACLE, n=[10], r=[2, 4], trials=1)
        with self.finder() as finder:
            records, (csv_path, json_path) = finder.bench(suite, dest=self.folder)
            self.assertEqual(len(records), 2)
            self.assertTrue(os.path.isfile(csv_path))
            self.assertTrue(os.path.isfile(json_path))
            self.assertEqual(os.path.dirname(csv_path), self.folder)

            records, paths = finder.bench(suite, trials=3, seed=4, export=False)
            self.assertIsNone(paths)
            self.assertEqual(records[0].trials, 3)
            self.assertEqual(records[0].seed, 4)

            with self.assertRaises(InvalidConfig):
                finder.load_suite("missing")
            # type_i runs r up to 16
            with self.assertRaises(InvalidConfig):
                finder.bench("type_i", n=[8], export=False)

    def test_bench_is_reproducible(self):
        suite = SuiteConfig(name="repeat", family=Family.ROTATED_DIAG, algo=Algo.SIGN, n=[6], r=[2], trials=2, seed=5)
        contents = []
        with self.finder() as finder:
            for copy in ("first", "second"):
                dest = os.path.join(self.folder, copy)
                _, (csv_path, _) = finder.bench(suite, dest=dest)
                with open(csv_path, "rb") as f:
                    contents.append(f.read())
        self.assertEqual(contents[0], contents[1])
        self.assertTrue(contents[0].startswith(b"family,"))

    def test_verify(self):
        with self.finder() as finder:
            report = finder.solve(self.p, Algo.STABILIZED, 1)
            data = {"polynomial": self.p.to_dict(), **report.to_dict()}
            result = finder.verify(data)
            self.assertTrue(result["ok"])
            self.assertEqual(result["max_deviation"], 0.0)

            data["residuals"] = [1e-3]
            self.assertFalse(finder.verify(data)["ok"])
            data["residuals"] = []
            self.assertEqual(finder.verify(data)["max_deviation"], float("inf"))

    def test_rejects(self):
        with self.finder() as finder:
            with self.assertRaises(InputError):
                finder.solve(Polynomial([1.0, 1.0]), Algo.STABILIZED)
            with self.assertRaises(InvalidConfig):
                finder.count(self.p, 0j, -1.0)

    def finder(self):
        return rrf.RealRootFinder(storage_path=self.folder, disable_logs=True)

    def setUp(self):
        warnings.simplefilter("ignore", category=ResourceWarning)
        self.folder = tempfile.mkdtemp()
        self.p = polycore.from_roots([2.0, 1j, -1j])

    def tearDown(self):
        shutil.rmtree(self.folder, ignore_errors=True)


if __name__ == "__main__":
    unittest.main()
