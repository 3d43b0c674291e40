"""Eigenvalues of dense Hermitian matrices.

Two stages: complex Householder reflections reduce the matrix to a real
symmetric tridiagonal (off-diagonals made nonnegative by phase
normalisation), then Sturm-sequence bisection extracts all eigenvalues.
Bisection was chosen over implicit-shift QL because it vectorises cleanly
over all eigenvalues at once; the deflation threshold
|e_i| <= eps * (|d_i| + |d_{i+1}|) is used to split the tridiagonal into
independent blocks first.  Eigenvalues only, no eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sampler import HermitianMatrix

_EPS = np.finfo(np.float64).eps

HERMITICITY_RTOL = 1e-12
BISECTION_CAP = 128


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class ConvergenceError(RuntimeError):
    """Eigensolver exceeded its iteration cap (not expected on well-scaled input)."""


@dataclass(frozen=True)
class Tridiagonal:
    """Real symmetric tridiagonal, unitarily similar to its source matrix."""

    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.float64)
        e = np.asarray(self.offdiag, dtype=np.float64)
        if d.ndim != 1 or e.ndim != 1 or e.size != max(d.size - 1, 0):
            raise ValueError("need len(offdiag) == len(diag) - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of one Hermitian matrix."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


def householder_tridiagonalize(m: HermitianMatrix) -> Tridiagonal:
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Reflectors act directly on the complex Hermitian storage.  The
    subdiagonal produced by each reflector is a complex number alpha;
    replacing it with |alpha| is a diagonal-unitary similarity, so the
    spectrum is unchanged and the off-diagonal comes out nonnegative.
    """
    a = m.entries
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    defect = m.hermiticity_defect()
    if defect > HERMITICITY_RTOL * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds "
            f"{HERMITICITY_RTOL:.0e} * {scale:.3e}"
        )
    n = m.n
    if n == 1:
        return Tridiagonal(np.array([a[0, 0].real]), np.zeros(0))

    w = a.copy()
    offdiag = np.empty(n - 1)
    for k in range(n - 2):
        x = w[k + 1 :, k].copy()
        normx = float(np.linalg.norm(x))
        offdiag[k] = normx
        if normx == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        # alpha = -phase*normx avoids cancellation in v = x - alpha*e1
        v = x
        v[0] += phase * normx
        v /= np.linalg.norm(v)
        sub = w[k + 1 :, k + 1 :]
        p = sub @ v
        tau = np.vdot(v, p)
        u = 2.0 * (p - tau * v)
        sub -= np.outer(u, v.conj())
        sub -= np.outer(v, u.conj())
    offdiag[n - 2] = abs(w[n - 1, n - 2])
    return Tridiagonal(np.diagonal(w).real.copy(), offdiag)


def _negcount(d: np.ndarray, e2: np.ndarray, x: np.ndarray, pivmin: float) -> np.ndarray:
    """Number of eigenvalues of the tridiagonal strictly below each shift in x."""
    q = d[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def _bisect_block(d: np.ndarray, e: np.ndarray) -> np.ndarray:
    """All eigenvalues (ascending) of one unreduced symmetric tridiagonal block."""
    nb = d.size
    if nb == 1:
        return d.copy()
    r = np.zeros(nb)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    gl = float(np.min(d - r))
    gu = float(np.max(d + r))
    spread = max(gu - gl, _EPS * max(abs(gl), abs(gu), 1.0))
    atol = _EPS * spread
    gl -= 2.0 * atol
    gu += 2.0 * atol

    e2 = e * e
    pivmin = max(float(np.max(e2)), 1.0) * np.finfo(np.float64).tiny / _EPS
    lo = np.full(nb, gl)
    hi = np.full(nb, gu)
    ks = np.arange(1, nb + 1)
    for it in range(BISECTION_CAP):
        if np.all(hi - lo <= atol):
            break
        mid = 0.5 * (lo + hi)
        below = _negcount(d, e2, mid, pivmin) >= ks
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    else:
        raise ConvergenceError(
            f"bisection did not reach tolerance within {BISECTION_CAP} iterations"
        )
    return 0.5 * (lo + hi)


def tridiagonal_eigenvalues(t: Tridiagonal) -> Spectrum:
    """All eigenvalues of a real symmetric tridiagonal, ascending."""
    d, e = t.diag, t.offdiag
    n = t.n
    if n == 1:
        return Spectrum(d.copy())
    # split into unreduced blocks at negligible off-diagonals
    negligible = np.abs(e) <= _EPS * (np.abs(d[:-1]) + np.abs(d[1:]))
    cuts = [0] + [i + 1 for i in np.nonzero(negligible)[0]] + [n]
    vals = np.concatenate(
        [_bisect_block(d[a:b], e[a : b - 1]) for a, b in zip(cuts[:-1], cuts[1:])]
    )
    return Spectrum(np.sort(vals))


def hermitian_eigenvalues(m: HermitianMatrix) -> Spectrum:
    """Eigenvalues of a dense Hermitian matrix, ascending."""
    return tridiagonal_eigenvalues(householder_tridiagonalize(m))
