"""Small dense complex linear algebra for the valuation modules.

Eigendecomposition of Hermitian matrices uses a cyclic Jacobi iteration
with complex rotations; dimensions are capped at MAX_DIM.  A single
TolerancePolicy (comparison eps, null threshold) governs every numeric
decision downstream — projector strings are contraction products, so a
fixed null threshold is safe at any string length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (DomainError, NumericError, PreconditionError,
                     StructureError, ValidationError)

MAX_DIM = 16
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class TolerancePolicy:
    eps: float = 1e-9
    null_threshold: float = 1e-9

    def __post_init__(self):
        if not (self.eps > 0 and self.null_threshold > 0):
            raise ValidationError("tolerances must be positive")


DEFAULT_TOL = TolerancePolicy()


def as_matrix(entries, dim: Optional[int] = None, max_dim: int = MAX_DIM) -> np.ndarray:
    """Validate and copy a square complex matrix."""
    a = np.array(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise StructureError(f"expected dimension {dim}, got {a.shape[0]}")
    if a.shape[0] > max_dim:
        raise StructureError(f"dimension {a.shape[0]} exceeds cap {max_dim}")
    if a.shape[0] == 0:
        raise StructureError("empty matrix")
    if not np.all(np.isfinite(a.view(float))):
        raise StructureError("matrix entries must be finite")
    return a


def as_vector(entries, dim: Optional[int] = None) -> np.ndarray:
    v = np.array(entries, dtype=complex).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise StructureError(f"expected a vector of dimension {dim}")
    if not np.all(np.isfinite(v.view(float))):
        raise StructureError("vector entries must be finite")
    return v


def is_hermitian(a: np.ndarray, eps: float) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= eps * max(1.0, float(np.max(np.abs(a)))))


def _jacobi_hermitian(a: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a Hermitian matrix: eigenvalues and a unitary of
    eigenvectors (columns).  Off-diagonal mass is annihilated pairwise with
    phase-adjusted plane rotations."""
    n = a.shape[0]
    w = a.astype(complex).copy()
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    target = 1e-14 * scale * n
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(float(np.sum(np.abs(np.triu(w, 1)) ** 2)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                r = abs(apq)
                if r <= 1e-18 * scale:
                    continue
                phase = apq / r
                diff = (w[q, q] - w[p, p]).real
                if abs(r) < abs(diff) * 1e-36:
                    t = r / diff
                else:
                    theta = diff / (2.0 * r)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # Unitary rotation touching rows/columns p and q only:
                # column p <- c*col_p - s*conj(phase)*col_q
                # column q <- s*phase*col_p + c*col_q
                colp = w[:, p].copy()
                colq = w[:, q].copy()
                w[:, p] = c * colp - s * np.conj(phase) * colq
                w[:, q] = s * phase * colp + c * colq
                rowp = w[p, :].copy()
                rowq = w[q, :].copy()
                w[p, :] = c * rowp - s * phase * rowq
                w[q, :] = s * np.conj(phase) * rowp + c * rowq
                vcolp = v[:, p].copy()
                vcolq = v[:, q].copy()
                v[:, p] = c * vcolp - s * np.conj(phase) * vcolq
                v[:, q] = s * phase * vcolp + c * vcolq
    else:
        raise NumericError("Jacobi iteration did not converge")
    return np.real(np.diag(w)), v


class Subspace:
    """A linear subspace given by an orthonormal column basis (possibly empty)."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL):
        basis = np.asarray(basis, dtype=complex)
        if basis.size == 0:
            basis = basis.reshape(ambient_dim, 0)
        if basis.ndim != 2 or basis.shape[0] != ambient_dim:
            raise StructureError("basis must be ambient_dim x k")
        gram = basis.conj().T @ basis
        if basis.shape[1] and np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e3 * tol.eps:
            raise ValidationError("basis columns are not orthonormal")
        self.ambient_dim = ambient_dim
        self.basis = basis

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector_matrix(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0)))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim))

    @staticmethod
    def span(vectors: Sequence[np.ndarray] | np.ndarray,
             tol: TolerancePolicy = DEFAULT_TOL) -> "Subspace":
        cols = np.column_stack([as_vector(v) for v in vectors]) if len(vectors) else None
        if cols is None:
            raise StructureError("span of nothing has no ambient dimension")
        return Subspace(cols.shape[0], orthonormalize(cols, tol.null_threshold))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient_dim})"


def orthonormalize(columns: np.ndarray, null_threshold: float) -> np.ndarray:
    """Modified Gram-Schmidt with re-orthogonalisation; columns whose
    residual norm falls at or below the null threshold are dropped."""
    columns = np.asarray(columns, dtype=complex)
    if columns.ndim != 2:
        raise StructureError("expected a 2-d column block")
    basis: list[np.ndarray] = []
    for j in range(columns.shape[1]):
        w = columns[:, j].astype(complex).copy()
        for _ in range(2):
            for b in basis:
                w -= b * (b.conj() @ w)
        norm = float(np.linalg.norm(w))
        if norm > null_threshold:
            basis.append(w / norm)
    if not basis:
        return np.zeros((columns.shape[0], 0), dtype=complex)
    return np.column_stack(basis)


def image_subspace(a: np.ndarray, k: Subspace, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """The image of a subspace under a matrix (closure is automatic in
    finite dimension); rank decided at the null threshold."""
    a = np.asarray(a, dtype=complex)
    if a.shape[1] != k.ambient_dim:
        raise StructureError("matrix and subspace dimensions do not match")
    if k.dim == 0:
        return Subspace.zero(a.shape[0])
    return Subspace(a.shape[0], orthonormalize(a @ k.basis, tol.null_threshold))


def in_subspace(v: np.ndarray, k: Subspace, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Membership up to the null threshold; the zero vector is in every subspace."""
    v = as_vector(v, k.ambient_dim)
    residual = v - k.basis @ (k.basis.conj().T @ v)
    return float(np.linalg.norm(residual)) <= tol.null_threshold * max(float(np.linalg.norm(v)), 1.0)


class Projector:
    """An orthogonal projector: Hermitian and idempotent within tolerance."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: TolerancePolicy = DEFAULT_TOL):
        a = as_matrix(matrix)
        if not is_hermitian(a, tol.eps):
            raise ValidationError("projector matrix is not Hermitian")
        if np.max(np.abs(a @ a - a)) > 1e3 * tol.eps * max(1.0, float(np.max(np.abs(a)))):
            raise ValidationError("projector matrix is not idempotent")
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.matrix)))))

    def image(self, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
        return image_subspace(self.matrix, Subspace.full(self.dim), tol)

    def __repr__(self):
        return f"Projector(dim={self.dim}, rank={self.rank()})"


class HermitianOperator:
    """A Hermitian matrix with resolved spectral data.

    ``eigenvalues`` are the distinct eigenvalues in ascending order;
    ``bases[i]`` is an orthonormal basis of the i-th eigenspace and
    ``projectors[i]`` the corresponding spectral projector.
    """

    __slots__ = ("matrix", "eigenvalues", "bases", "projectors")

    def __init__(self, matrix: np.ndarray, eigenvalues: Sequence[float],
                 bases: Sequence[np.ndarray]):
        self.matrix = matrix
        self.eigenvalues = tuple(float(v) for v in eigenvalues)
        self.bases = tuple(np.asarray(b, dtype=complex) for b in bases)
        self.projectors = tuple(b @ b.conj().T for b in self.bases)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectrum(self) -> tuple[tuple[float, np.ndarray], ...]:
        return tuple(zip(self.eigenvalues, self.projectors))

    def eigenspace(self, delta: Iterable[float], tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
        """The span of eigenvectors whose eigenvalue matches the range."""
        delta = [float(d) for d in delta]
        blocks = [b for lam, b in zip(self.eigenvalues, self.bases)
                  if any(abs(lam - d) <= tol.eps for d in delta)]
        if not blocks:
            return Subspace.zero(self.dim)
        return Subspace(self.dim, np.column_stack(blocks))

    def __repr__(self):
        vals = ", ".join(f"{v:g}" for v in self.eigenvalues)
        return f"HermitianOperator(dim={self.dim}, eigenvalues=[{vals}])"


def hermitian_eig(matrix, tol: TolerancePolicy = DEFAULT_TOL,
                  snap_to: Optional[Iterable[float]] = None) -> HermitianOperator:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues within eps of a value in ``snap_to`` are snapped to it
    (and must all snap when the set is given); near-equal eigenvalues are
    merged into a single eigenspace.  Raises ValidationError for
    non-Hermitian input and NumericError if the reconstruction of the
    matrix from the spectral data is off.
    """
    a = as_matrix(matrix)
    scale = max(1.0, float(np.max(np.abs(a))))
    if not is_hermitian(a, tol.eps):
        raise ValidationError("matrix is not Hermitian within tolerance")
    a = (a + a.conj().T) / 2.0
    vals, vecs = _jacobi_hermitian(a, tol.eps)

    if snap_to is not None:
        targets = sorted(set(float(x) for x in snap_to))
        snapped = []
        for lam in vals:
            near = [x for x in targets if abs(lam - float(x)) <= tol.eps * max(1.0, abs(x))]
            if not near:
                raise ValidationError(
                    f"eigenvalue {lam!r} does not snap to the declared value set")
            snapped.append(min(near, key=lambda x: abs(lam - x)))
        vals = np.array(snapped)

    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    cluster_tol = tol.eps * scale if snap_to is None else 0.0
    groups: list[tuple[float, list[int]]] = []
    for i, lam in enumerate(vals):
        if groups and abs(lam - groups[-1][0]) <= max(cluster_tol, 1e-12 * scale):
            groups[-1][1].append(i)
        else:
            groups.append((float(lam), [i]))
    bases = []
    eigenvalues = []
    for lam, idxs in groups:
        block = orthonormalize(vecs[:, idxs], 0.5)
        if block.shape[1] != len(idxs):
            raise NumericError("eigenvector block lost rank")
        bases.append(block)
        eigenvalues.append(float(np.mean([vals[i] for i in idxs])) if snap_to is None else lam)

    op = HermitianOperator(a, eigenvalues, bases)
    recon = sum(lam * p for lam, p in op.spectrum)
    if float(np.max(np.abs(recon - a))) > 10 * tol.eps * scale:
        raise NumericError("spectral reconstruction failed tolerance")
    return op


def spectral_projector(op: HermitianOperator, delta: Iterable[float],
                       tol: TolerancePolicy = DEFAULT_TOL) -> Projector:
    """Sum of eigenprojectors whose eigenvalue lies in the range (empty
    match gives the zero projector)."""
    delta = [float(d) for d in delta]
    total = np.zeros((op.dim, op.dim), dtype=complex)
    for lam, p in op.spectrum:
        if any(abs(lam - d) <= tol.eps for d in delta):
            total = total + p
    return Projector(total, tol)


def apply_function(op: HermitianOperator, f: Union[Callable[[float], float], Mapping[float, float]],
                   tol: TolerancePolicy = DEFAULT_TOL) -> HermitianOperator:
    """The operator obtained by mapping every eigenvalue through f;
    eigenspaces whose images coincide are merged."""
    if isinstance(f, Mapping):
        lookup = {float(k): float(v) for k, v in f.items()}

        def fn(lam: float) -> float:
            for k, v in lookup.items():
                if abs(lam - k) <= tol.eps:
                    return v
            raise DomainError(f"function undefined on eigenvalue {lam!r}")
    else:
        def fn(lam: float) -> float:
            try:
                return float(f(lam))
            except Exception as exc:
                raise DomainError(f"function undefined on eigenvalue {lam!r}") from exc

    mapped = [fn(lam) for lam in op.eigenvalues]
    merged: dict[float, list[np.ndarray]] = {}
    for new_lam, basis in zip(mapped, op.bases):
        key = next((k for k in merged if abs(k - new_lam) <= tol.eps), new_lam)
        merged.setdefault(key, []).append(basis)
    eigenvalues = sorted(merged)
    bases = [np.column_stack(merged[lam]) for lam in eigenvalues]
    matrix = sum(lam * (b @ b.conj().T) for lam, b in zip(eigenvalues, bases))
    return HermitianOperator(np.asarray(matrix), eigenvalues, bases)


def operator_norm(a: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Largest singular value (via the Hermitian square)."""
    a = np.asarray(a, dtype=complex)
    gram = a.conj().T @ a
    gram = (gram + gram.conj().T) / 2.0
    vals, _ = _jacobi_hermitian(gram, tol.eps)
    top = float(np.max(vals))
    return math.sqrt(max(top, 0.0))


class Ray:
    """A ray through a non-null vector; the representative is normalised
    and phase-canonicalised (largest-magnitude component real positive)."""

    __slots__ = ("representative",)

    def __init__(self, vector, tol: TolerancePolicy = DEFAULT_TOL):
        v = as_vector(vector)
        norm = float(np.linalg.norm(v))
        if norm <= tol.null_threshold:
            raise PreconditionError("cannot form the ray of a null vector")
        v = v / norm
        pivot = int(np.argmax(np.abs(v)))
        phase = v[pivot] / abs(v[pivot])
        self.representative = v / phase

    @property
    def dim(self) -> int:
        return self.representative.shape[0]

    def same_ray(self, other: "Ray", tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return ray_equal(self.representative, other.representative, tol)

    def __repr__(self):
        return f"Ray({np.array2string(self.representative, precision=4)})"


class _ZeroRay:
    """The absorbing point adjoined to projective space for annihilated vectors."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "[0]"


ZERO_RAY = _ZeroRay()

RayOrZero = Union[Ray, _ZeroRay]


def ray_equal(psi, phi, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff the two non-null vectors span the same ray, i.e. their
    normalised overlap has modulus at least 1 - eps."""
    psi = as_vector(psi)
    phi = as_vector(phi, psi.shape[0])
    np_, nq = float(np.linalg.norm(psi)), float(np.linalg.norm(phi))
    if np_ <= tol.null_threshold or nq <= tol.null_threshold:
        raise PreconditionError("ray comparison needs non-null vectors")
    return abs(complex(psi.conj() @ phi)) / (np_ * nq) >= 1.0 - tol.eps
