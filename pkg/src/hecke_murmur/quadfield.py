"""The discriminant family, class numbers by two independent methods, and the norm equation x^2 + D y^2 = 4p."""
from __future__ import annotations

import hashlib
import io
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .arith_core import is_prime, is_squarefree, jacobi, kronecker, sieve_mobius, sieve_primes
from .errors import CacheCorruptionError, InvariantViolation

METHODS = ("forms", "dirichlet")
CACHE_FORMAT = "hecke-murmur-class-numbers"
CACHE_VERSION = 1


@dataclass(frozen=True)
class DiscriminantWindow:
    """D ranges over [X, X + Y]. Y = X is allowed so the [1, 2] weight convention fits."""

    X: int
    Y: int

    def __post_init__(self):
        if self.X < 1 or self.Y < 1:
            raise ValueError(f"window needs X, Y >= 1, got X={self.X}, Y={self.Y}")

    @property
    def hi(self) -> int:
        return self.X + self.Y

    @property
    def is_thin(self) -> bool:
        return self.Y < self.X


@dataclass(frozen=True)
class DiscriminantRecord:
    D: int
    h: int
    L1: float
    method: str

    def __post_init__(self):
        if self.D <= 3 or self.D % 4 != 3 or not is_squarefree(self.D):
            raise ValueError(f"D={self.D} is not in the family")
        if self.h < 1:
            raise ValueError(f"class number must be positive, got {self.h}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if abs(self.h - math.sqrt(self.D) / math.pi * self.L1) >= 0.5:
            raise InvariantViolation(f"class number formula inconsistent for D={self.D}")


@dataclass(frozen=True)
class NormSolution:
    D: int
    p: int
    y: int
    x: int


def _check_family_member(D: int) -> None:
    if D <= 3 or D % 4 != 3 or not is_squarefree(D):
        raise ValueError(f"D={D} must be squarefree, congruent to 3 mod 4 and greater than 3")


def enumerate_family(window: DiscriminantWindow) -> np.ndarray:
    """Squarefree D = 3 (mod 4), D > 3, in [X, X + Y], ascending."""
    table = sieve_mobius(window.X, window.hi)
    D = np.arange(window.X, window.hi + 1, dtype=np.int64)
    keep = table.squarefree & (D % 4 == 3) & (D > 3)
    return D[keep]


def class_number_forms(D: int) -> int:
    _check_family_member(D)
    return int(kernels.class_numbers_forms(np.array([D]))[0])


def class_number_dirichlet(D: int) -> tuple[int, float]:
    _check_family_member(D)
    spf = sieve_primes(max(2, (D - 1) // 2)).smallest_prime_factor
    h = int(kernels.class_numbers_dirichlet(np.array([D]), spf)[0])
    if h < 1:
        raise InvariantViolation(f"character sum for D={D} did not give a positive integer")
    return h, math.pi * h / math.sqrt(D)


def class_numbers(Ds, method: str = "dirichlet") -> np.ndarray:
    """Batch class numbers for family members (no membership re-check)."""
    Ds = np.asarray(Ds, dtype=np.int64)
    if Ds.size == 0:
        return np.zeros(0, dtype=np.int64)
    if method == "forms":
        return kernels.class_numbers_forms(Ds)
    if method == "dirichlet":
        spf = sieve_primes(max(2, int(Ds.max() - 1) // 2)).smallest_prime_factor
        h = kernels.class_numbers_dirichlet(Ds, spf)
        if (h < 1).any():
            bad = int(Ds[np.argmax(h < 1)])
            raise InvariantViolation(f"character sum for D={bad} did not give a positive integer")
        return h
    raise ValueError(f"unknown method {method!r}")


def l1_partial_sum(D: int, T: int) -> float:
    """Sum_{n <= T} chi_{-D}(n)/n, added in pairwise order."""
    if T < 1:
        raise ValueError("T must be positive")
    n = np.arange(1, T + 1, dtype=np.int64)
    # for -D a fundamental discriminant = 1 mod 4, chi_{-D}(n) = (n/D) by reciprocity
    chi = kernels.jacobi_many(n, D).astype(np.float64)
    return float(np.add.reduce(chi / n))


def norm_solutions(D: int, p: int) -> list[NormSolution]:
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    out = []
    y = 1
    while D * y * y < 4 * p:
        r = 4 * p - D * y * y
        x = math.isqrt(r)
        if x > 0 and x * x == r:
            out.append(NormSolution(D, p, y, x))
        y += 1
    return out


def nu(D: int, p: int) -> int:
    if kronecker(-D, p) != 1:
        raise ValueError(f"p={p} does not split in Q(sqrt(-{D}))")
    sols = norm_solutions(D, p)
    if len(sols) > 1:
        raise InvariantViolation(f"x^2 + {D} y^2 = 4*{p} has {len(sols)} positive solutions")
    return len(sols)


@dataclass
class FamilyTable:
    """Class-number data for every family member of a window, as parallel arrays."""

    window: DiscriminantWindow
    D: np.ndarray
    h: np.ndarray
    method: str

    @property
    def L1(self) -> np.ndarray:
        return np.pi * self.h / np.sqrt(self.D)

    def __len__(self) -> int:
        return int(self.D.size)

    def records(self) -> list[DiscriminantRecord]:
        L1 = self.L1
        return [DiscriminantRecord(int(d), int(h), float(l), self.method) for d, h, l in zip(self.D, self.h, L1)]

    def h_by_offset(self) -> np.ndarray:
        """h(-D) at index D - X, zero for non-members."""
        out = np.zeros(self.window.Y + 1, dtype=np.int64)
        out[self.D - self.window.X] = self.h
        return out

    def h_of(self, D: int) -> int:
        i = int(np.searchsorted(self.D, D))
        if i < self.D.size and self.D[i] == D:
            return int(self.h[i])
        raise KeyError(D)


class ClassNumberCache:
    """CSV cache of class numbers keyed by D.

    Layout: one header line ``# <format> v<version> methods=<tags> sha256=<digest>``,
    then ``D,h,method`` rows sorted by D. The digest covers every row byte, so a
    truncated or edited file is detected on load. Writes go to a temporary file
    that is atomically renamed over the old cache (single writer, many readers).
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._h: dict[int, tuple[int, str]] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        raw = self.path.read_bytes()
        head, _, body = raw.partition(b"\n")
        fields = dict(tok.split("=", 1) for tok in head.decode("ascii", "replace").split()[3:] if "=" in tok)
        expect = f"# {CACHE_FORMAT} v{CACHE_VERSION}"
        if not head.decode("ascii", "replace").startswith(expect):
            raise CacheCorruptionError(f"{self.path}: bad header")
        if hashlib.sha256(body).hexdigest() != fields.get("sha256"):
            raise CacheCorruptionError(f"{self.path}: checksum mismatch")
        tags = set(fields.get("methods", "").split(",")) - {""}
        for line in body.decode("ascii").splitlines()[1:]:
            d, h, m = line.split(",")
            if m not in tags:
                raise CacheCorruptionError(f"{self.path}: undeclared method tag {m!r}")
            self._h[int(d)] = (int(h), m)

    def __len__(self) -> int:
        return len(self._h)

    def lookup(self, Ds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (h, found-mask); missing entries have h = 0."""
        h = np.zeros(Ds.size, dtype=np.int64)
        found = np.zeros(Ds.size, dtype=bool)
        for i, d in enumerate(Ds.tolist()):
            hit = self._h.get(d)
            if hit is not None:
                h[i] = hit[0]
                found[i] = True
        return h, found

    def update(self, Ds: np.ndarray, hs: np.ndarray, method: str) -> None:
        for d, h in zip(Ds.tolist(), hs.tolist()):
            self._h[d] = (h, method)

    def save(self) -> None:
        buf = io.StringIO()
        buf.write("D,h,method\n")
        for d in sorted(self._h):
            h, m = self._h[d]
            buf.write(f"{d},{h},{m}\n")
        body = buf.getvalue().encode("ascii")
        tags = ",".join(sorted({m for _, m in self._h.values()}))
        head = f"# {CACHE_FORMAT} v{CACHE_VERSION} methods={tags} sha256={hashlib.sha256(body).hexdigest()}\n"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".cache-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(head.encode("ascii") + body)
        os.replace(tmp, self.path)


def family_table(window: DiscriminantWindow, method: str = "dirichlet", cache: ClassNumberCache | None = None) -> FamilyTable:
    D = enumerate_family(window)
    if cache is None:
        return FamilyTable(window, D, class_numbers(D, method), method)
    h, found = cache.lookup(D)
    if not found.all():
        missing = D[~found]
        fresh = class_numbers(missing, method)
        h[~found] = fresh
        cache.update(missing, fresh, method)
        cache.save()
    return FamilyTable(window, D, h, method)


def chi_minus_D(D: int, n: int) -> int:
    """chi_{-D}(n) as a Kronecker symbol."""
    return kronecker(-D, n)


__all__ = [
    "DiscriminantWindow",
    "DiscriminantRecord",
    "NormSolution",
    "FamilyTable",
    "ClassNumberCache",
    "enumerate_family",
    "class_number_forms",
    "class_number_dirichlet",
    "class_numbers",
    "l1_partial_sum",
    "norm_solutions",
    "nu",
    "family_table",
    "chi_minus_D",
]
