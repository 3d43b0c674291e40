"""Entry-wise GUE sampling and principal minors.

Normalisation: the matrix density is proportional to exp(-tr X^2), so
diagonal entries are real N(0, 1/2) and above-diagonal entries are complex
with independent real and imaginary parts each N(0, 1/4).  Under this
scaling the eigenvalues divided by sqrt(2N) follow the standard semicircle
law on [-1, 1].  Below-diagonal entries are set by conjugation, which makes
every sampled matrix exactly Hermitian (bitwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_TASK_SALT = 0x3C79AC492BA7B653


def _mix64(z: int) -> int:
    """SplitMix64 finaliser: a bijective mixer on 64-bit words."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic stream identity for one Monte Carlo task.

    The (master_seed, task_index) pair is mapped injectively onto a 128-bit
    Philox key: each half is the SplitMix64 image of one component, and
    SplitMix64 is bijective, so distinct pairs get distinct keys.  The same
    spec therefore reproduces the same stream on any machine.
    """

    master_seed: int
    task_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if self.task_index < 0:
            raise ValueError("task_index must be nonnegative")

    def philox_key(self) -> int:
        hi = _mix64(self.master_seed)
        lo = _mix64((self.task_index ^ _TASK_SALT) & _MASK64)
        return (hi << 64) | lo

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.philox_key()))


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex Hermitian matrix (the sampled GUE object)."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be a square 2-d array")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def hermiticity_defect(self) -> float:
        """max |A - A^H|, zero by construction for sampled matrices."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


def sample_gue(n: int, seed: SeedSpec) -> HermitianMatrix:
    """Draw one n-by-n GUE matrix for the given seed spec.

    Draw order is fixed (diagonal, then real parts of the upper triangle
    row-by-row, then imaginary parts) so outputs are reproducible.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    rng = seed.generator()
    diag = rng.normal(0.0, np.sqrt(0.5), size=n)
    m = n * (n - 1) // 2
    re = rng.normal(0.0, 0.5, size=m)
    im = rng.normal(0.0, 0.5, size=m)

    a = np.zeros((n, n), dtype=np.complex128)
    a[np.diag_indices(n)] = diag
    iu, ju = np.triu_indices(n, k=1)
    upper = re + 1j * im
    a[iu, ju] = upper
    a[ju, iu] = upper.conj()
    return HermitianMatrix(a)


def principal_minor(m: HermitianMatrix, k: int) -> HermitianMatrix:
    """Top-left k-by-k submatrix; Hermitian structure is inherited."""
    if k < 1 or k > m.n:
        raise ValueError(f"minor size k={k} out of range [1, {m.n}]")
    return HermitianMatrix(m.entries[:k, :k].copy())
