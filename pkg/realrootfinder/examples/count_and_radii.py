import realrootfinder as rrf
from realrootfinder.modules import polycore


# Root counting in discs and root radius brackets
if __name__ == "__main__":
    p = polycore.from_roots([0.5, 3.0, -0.7, 2j, -2j])

    with rrf.RealRootFinder(disable_logs=True) as finder:
        for radius in (0.6, 1.0, 2.5, 10.0):
            print(f"{finder.count(p, 0j, radius)} roots in |x| < {radius}")

        for refine in range(4):
            lower, upper = finder.radii(p, refine)
            print(f"{refine} squarings: " + ", ".join(f"[{lo:.3g}, {hi:.3g}]" for lo, hi in zip(lower, upper)))
