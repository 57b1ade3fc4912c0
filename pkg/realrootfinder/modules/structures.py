import os
import platform
from dataclasses import dataclass, field, fields, asdict
from typing import Optional

import numpy as np
from colorama import init, Fore, Style

from .exceptions import InvalidConfig, DimensionMismatch

init()

# dense complex (or real) n x n storage
ComplexMatrix = np.ndarray


class Variant:
    BASIC = "basic"
    STABILIZED = "stabilized"
    HYBRID = "hybrid"
    CUBIC = "cubic"
    QUINTIC = "quintic"
    MODULAR = "modular"

    @staticmethod
    def all():
        return [Variant.BASIC, Variant.STABILIZED, Variant.HYBRID,
                Variant.CUBIC, Variant.QUINTIC, Variant.MODULAR]


class ShiftPolicy:
    NONE = "none"
    HEURISTIC = "heuristic_s"
    RANDOMIZED = "randomized_s"

    @staticmethod
    def all():
        return [ShiftPolicy.NONE, ShiftPolicy.HEURISTIC, ShiftPolicy.RANDOMIZED]


class Scaling:
    NONE = "none"
    DETERMINANTAL = "determinantal"

    @staticmethod
    def all():
        return [Scaling.NONE, Scaling.DETERMINANTAL]


class Status:
    OK = "ok"
    FAILURE = "failure"
    SHIFTED = "ill_conditioned_shifted"


class Algo:
    SIGN = "sign"
    STABILIZED = "stabilized"
    HYBRID = "hybrid"
    MODULAR = "modular"
    ORACLE = "oracle"

    @staticmethod
    def all():
        return [Algo.SIGN, Algo.STABILIZED, Algo.HYBRID, Algo.MODULAR, Algo.ORACLE]


class Family:
    MIGNOTTE = "mignotte"
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"
    TYPE_IV = "IV"
    TYPE_V = "V"
    RANDOM_PRODUCT = "random_product"
    TRIDIAG = "tridiag"
    ROTATED_DIAG = "rotated_diag"
    COMPLEX_SYMMETRIC = "complex_symmetric"

    @staticmethod
    def polynomials():
        return [Family.MIGNOTTE, Family.TYPE_I, Family.TYPE_II, Family.TYPE_III,
                Family.TYPE_IV, Family.TYPE_V, Family.RANDOM_PRODUCT]

    @staticmethod
    def matrices():
        return [Family.TRIDIAG, Family.ROTATED_DIAG, Family.COMPLEX_SYMMETRIC]


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"({z.real:.6g}{z.imag:+.6g}j)"


@dataclass(eq=False)
class Polynomial:
    """Univariate polynomial, coefficients ascending by degree.

    Exact zeros above the leading term are dropped. Coefficients whose
    imaginary parts are all exactly zero are stored as float64 and the
    polynomial counts as real. The coefficient array is read-only.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise InvalidConfig("Polynomial coefficients must be finite")
        nonzero = np.flatnonzero(c)
        c = c[: nonzero[-1] + 1] if nonzero.size else c[:1]
        if np.all(c.imag == 0):
            c = c.real.copy()
        c.setflags(write=False)
        self.coeffs = c

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __len__(self):
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other, atol=1e-12) -> bool:
        if self.degree != other.degree:
            return False
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol))

    @property
    def colorless_str(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0 and self.degree:
                continue
            power = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(_fmt(c) + ("*" + power if power else ""))
        return " + ".join(terms)

    def __repr__(self):
        return f"{Fore.CYAN}deg {self.degree}{Style.RESET_ALL}: {self.colorless_str}"

    def to_dict(self):
        return {
            "degree": self.degree,
            "coeffs": [[float(np.real(c)), float(np.imag(c))] for c in self.coeffs],
        }


@dataclass
class FrobeniusElement:
    """Residue of degree < n modulo a monic polynomial of degree n."""

    modulus: Polynomial
    residue: Polynomial

    def __post_init__(self):
        if self.modulus.degree < 1:
            raise DimensionMismatch("Modulus must have degree at least 1")
        if not self.residue.is_zero and self.residue.degree >= self.modulus.degree:
            raise DimensionMismatch(
                f"Residue degree {self.residue.degree} is not below modulus degree {self.modulus.degree}"
            )

    @property
    def n(self) -> int:
        return self.modulus.degree

    def vector(self) -> np.ndarray:
        """Residue coefficients padded to length n."""
        v = np.zeros(self.n, dtype=complex)
        v[: len(self.residue)] = self.residue.coeffs
        return v if not (self.residue.is_real and self.modulus.is_real) else v.real.copy()

    @property
    def colorless_str(self):
        return f"{self.residue.colorless_str} mod ({self.modulus.colorless_str})"

    def __repr__(self):
        return f"{self.residue.colorless_str} {Fore.YELLOW}mod{Style.RESET_ALL} ({self.modulus.colorless_str})"


@dataclass
class SubspaceResult:
    U: ComplexMatrix
    r: int
    residual: float
    attempts: int
    basis: Optional[ComplexMatrix] = None  # all r_plus sketch columns
    degenerate: bool = False

    def __repr__(self):
        color = Fore.YELLOW if self.degenerate else Fore.GREEN
        return f"{color}rank {self.r}{Style.RESET_ALL} residual={self.residual:.3e} attempts={self.attempts}"


@dataclass
class SignFlowConfig:
    max_iter: int = 100
    check_period: int = 5
    eps_rank: float = 1e-6
    eps_certificate: float = 1e-4
    alpha: float = 1e-4
    shift_policy: str = ShiftPolicy.RANDOMIZED
    scale: str = Scaling.NONE
    variant: str = Variant.STABILIZED
    im_tol: float = 1e-4
    stable_checks: int = 2
    max_shifts: int = 3
    cayley_transform: bool = False
    oversampling: int = 4
    attempts: int = 4
    tol: float = 1e-6  # agcd acceptance
    refine_tol: float = 1e-14
    refine_iter: int = 50

    def validate(self):
        if self.max_iter < 1:
            raise InvalidConfig(f"max_iter must be at least 1, got {self.max_iter}")
        if self.check_period < 1:
            raise InvalidConfig(f"check_period must be at least 1, got {self.check_period}")
        for name in ("eps_rank", "eps_certificate", "tol"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise InvalidConfig(f"{name} must be in (0, 1), got {value}")
        if self.alpha <= 0:
            raise InvalidConfig(f"alpha must be positive, got {self.alpha}")
        if self.im_tol <= 0 or self.refine_tol <= 0:
            raise InvalidConfig("im_tol and refine_tol must be positive")
        if self.stable_checks < 1 or self.max_shifts < 0 or self.attempts < 1 or self.oversampling < 0:
            raise InvalidConfig("stable_checks, max_shifts, attempts and oversampling are out of range")
        if self.shift_policy not in ShiftPolicy.all():
            raise InvalidConfig(f"Unknown shift policy: {self.shift_policy}")
        if self.scale not in Scaling.all():
            raise InvalidConfig(f"Unknown scaling: {self.scale}")
        if self.variant not in Variant.all():
            raise InvalidConfig(f"Unknown variant: {self.variant}")
        return self

    @classmethod
    def from_dict(cls, d: dict):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"Unknown configuration keys: {sorted(unknown)}")
        return cls(**d).validate()

    def to_dict(self):
        return asdict(self)


@dataclass
class SignFlowReport:
    roots: np.ndarray
    iterations: int
    rank_history: list = field(default_factory=list)  # (iteration, rank)
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    status: str = Status.OK
    variant: str = Variant.BASIC
    shifts: int = 0
    switched_at: Optional[int] = None
    r_plus: Optional[int] = None

    @property
    def r(self) -> int:
        return len(self.roots)

    @property
    def colorless_str(self):
        roots = ", ".join(f"{x:.15g}" for x in np.real(self.roots))
        return f"[{self.variant}] {self.status} after {self.iterations} iterations: {self.r} roots [{roots}]"

    def __repr__(self):
        color = Fore.GREEN if self.status == Status.OK else (
            Fore.YELLOW if self.status == Status.SHIFTED else Fore.RED)
        roots = ", ".join(f"{x:.15g}" for x in np.real(self.roots))
        return f"[{self.variant}] {color+self.status+Style.RESET_ALL} after {self.iterations} iterations: {self.r} roots [{roots}]"

    def to_dict(self):
        return {
            "variant": self.variant,
            "status": self.status,
            "iterations": int(self.iterations),
            "roots": [float(np.real(x)) for x in self.roots],
            "residuals": [float(x) for x in self.residuals],
            "rank_history": [[int(k), int(rank)] for k, rank in self.rank_history],
            "shifts": int(self.shifts),
            "switched_at": self.switched_at,
            "r_plus": self.r_plus,
        }


@dataclass
class AgcdResult:
    g: Polynomial
    d: int
    v: Polynomial
    u: Polynomial
    backward_error: float
    division_error: float = 0.0

    def __repr__(self):
        return f"agcd degree {Fore.CYAN}{self.d}{Style.RESET_ALL}, v = {self.v.colorless_str} (backward error {self.backward_error:.2e})"


@dataclass
class DiscQuery:
    center: complex = 0j
    radius: float = 1.0
    squarings: int = 0

    MAX_SQUARINGS = 6

    def __post_init__(self):
        self.center = complex(self.center)
        if not self.radius > 0:
            raise InvalidConfig(f"Disc radius must be positive, got {self.radius}")
        if not 0 <= self.squarings <= self.MAX_SQUARINGS:
            raise InvalidConfig(
                f"Number of squarings must be in [0, {self.MAX_SQUARINGS}], got {self.squarings}"
            )


@dataclass
class RefineReport:
    roots: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def __repr__(self):
        color = Fore.GREEN if self.all_converged else Fore.RED
        return f"{color}{int(np.sum(self.converged))}/{len(self.roots)} converged{Style.RESET_ALL} in {self.iterations} iterations"


BENCH_HEADER = ["family", "n", "r", "trials", "failures", "iter_mean", "iter_std", "err_mean", "err_std", "seed"]


@dataclass
class BenchRecord:
    family: str
    n: int
    r: int
    trials: int
    failures: int
    iteration_mean: float
    iteration_std: float
    error_mean: float
    error_std: float
    seed: int
    mismatches: int = 0
    details: list = field(default_factory=list)

    def to_row(self) -> list:
        def num(x):
            return "" if x is None or np.isnan(x) else f"{x:.6e}"

        return [self.family, self.n, self.r, self.trials, self.failures,
                num(self.iteration_mean), num(self.iteration_std),
                num(self.error_mean), num(self.error_std), self.seed]

    def to_dict(self, verbose=False):
        d = dict(zip(BENCH_HEADER, self.to_row()))
        d["mismatches"] = self.mismatches
        if verbose:
            d["trials_detail"] = self.details
        return d

    @property
    def colorless_str(self):
        return (f"{self.family} n={self.n} r={self.r}: iter {self.iteration_mean:.2f}+-{self.iteration_std:.2f}, "
                f"err {self.error_mean:.2e}+-{self.error_std:.2e} ({self.failures}/{self.trials} failed)")

    def __repr__(self):
        color = Fore.GREEN if not self.failures else Fore.YELLOW
        return color + self.colorless_str + Style.RESET_ALL


@dataclass
class CliConfig:
    """Validated command-line settings. Flow flags left as None fall back
    to the configuration files."""

    command: str
    algo: str = Algo.STABILIZED
    input: Optional[str] = None
    r: Optional[int] = None
    alpha: Optional[float] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    check_period: Optional[int] = None
    seed: Optional[int] = None
    output: str = "text"
    trials: Optional[int] = None
    suite: Optional[str] = None
    n: list = field(default_factory=list)
    center: complex = 0j
    radius: float = 1.0
    squarings: int = 0
    refine: int = 0
    verbose: bool = False
    config: Optional[str] = None
    dest: Optional[str] = None
    disable_logs: bool = False

    COMMANDS = ("solve", "bench", "count", "radii", "verify")
    OUTPUTS = ("json", "csv", "text")

    def validate(self):
        if self.command not in self.COMMANDS:
            raise InvalidConfig(f"Unknown command: {self.command}")
        if self.algo not in Algo.all():
            raise InvalidConfig(f"Unknown algorithm: {self.algo}")
        if self.output not in self.OUTPUTS:
            raise InvalidConfig(f"Unknown output format: {self.output}")
        if self.command in ("solve", "count", "radii", "verify") and not self.input:
            raise InvalidConfig(f"'{self.command}' needs --input")
        if self.command == "bench" and not self.suite:
            raise InvalidConfig("'bench' needs --suite")
        if self.r is not None and self.r < 0:
            raise InvalidConfig("--r must be non-negative")
        if self.trials is not None and self.trials < 1:
            raise InvalidConfig("--trials must be at least 1")
        if not 0 <= self.refine <= DiscQuery.MAX_SQUARINGS:
            raise InvalidConfig(f"--refine must be in [0, {DiscQuery.MAX_SQUARINGS}]")
        if any(n < 2 for n in self.n):
            raise InvalidConfig("--n values must be at least 2")
        if self.seed is not None and self.seed < 0:
            raise InvalidConfig("--seed must be non-negative")
        DiscQuery(self.center, self.radius, self.squarings)
        SignFlowConfig.from_dict(self.flow_overrides())
        return self

    def flow_overrides(self) -> dict:
        names = ("alpha", "tol", "max_iter", "check_period")
        return {name: getattr(self, name) for name in names if getattr(self, name) is not None}


class Type3Reading:
    IMAGINARY = "imaginary"  # a = i/100
    REAL = "real"  # a = 1/100

    @staticmethod
    def all():
        return [Type3Reading.IMAGINARY, Type3Reading.REAL]


@dataclass
class SuiteConfig:
    """One benchmark grid: a family, an algorithm and the (n, r) pairs to run.

    For Type IV the r values are the parameter a of x^n - (a x - 1)^3.
    """

    name: str
    family: str
    algo: str = Algo.STABILIZED
    n: list = field(default_factory=lambda: [32])
    r: list = field(default_factory=lambda: [8])
    trials: int = 10
    seed: int = 0
    use_r_hint: bool = False
    type3_reading: str = Type3Reading.IMAGINARY
    flow: dict = field(default_factory=dict)

    def validate(self):
        families = Family.polynomials() + Family.matrices()
        if self.family not in families:
            raise InvalidConfig(f"Unknown family '{self.family}', expected one of {families}")
        if self.algo not in Algo.all():
            raise InvalidConfig(f"Unknown algorithm: {self.algo}")
        if self.family in Family.matrices() and self.algo not in (Algo.SIGN, Algo.STABILIZED, Algo.ORACLE):
            raise InvalidConfig(f"Matrix family '{self.family}' runs with sign, stabilized or oracle only")
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")
        if not self.n or any(n < 2 for n in self.n):
            raise InvalidConfig("Every n must be at least 2")
        if self.type3_reading not in Type3Reading.all():
            raise InvalidConfig(f"Unknown Type III reading: {self.type3_reading}")
        if self.family not in (Family.TYPE_IV, Family.MIGNOTTE):
            for n in self.n:
                for r in self.r:
                    if not 0 <= r <= n:
                        raise InvalidConfig(f"r={r} does not fit n={n}")
        SignFlowConfig.from_dict(self.flow)
        return self

    @classmethod
    def from_dict(cls, name, d: dict):
        known = {f.name for f in fields(cls)} - {"name"}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"Unknown keys in suite '{name}': {sorted(unknown)}")
        d = dict(d)
        for key in ("n", "r"):
            if key in d and not isinstance(d[key], list):
                d[key] = [d[key]]
        return cls(name=name, **d).validate()


class DefaultStoragePath:
    WINDOWS = os.path.join(os.environ.get("APPDATA", "C:/"), "Real Root Finder")
    POSIX = os.path.join(os.path.expanduser("~"), ".realrootfinder")

    @staticmethod
    def get_path():
        if platform.system() == "Windows":
            return DefaultStoragePath.WINDOWS
        return DefaultStoragePath.POSIX
