from .realrootfinder import RealRootFinder
