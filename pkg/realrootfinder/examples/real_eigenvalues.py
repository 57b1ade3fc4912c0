import realrootfinder as rrf
from realrootfinder.modules import bench
from realrootfinder.modules.structures import Family, Algo


# Real eigenvalues of a rotated diagonal matrix with 12 real eigenvalues
if __name__ == "__main__":
    A = bench.gen_matrix(Family.ROTATED_DIAG, 100, 12, seed=1)

    with rrf.RealRootFinder(verbose=True, disable_logs=True) as finder:
        report = finder.real_eigenvalues(A, Algo.SIGN)
        print(report)
        print(f"largest residual {report.residuals.max():.2e}")
