"""Dense complex linear algebra over tensor-product index structure.

All matrices are square numpy arrays of complex128. Multipartite structure
is carried separately as a tuple of subsystem dimensions whose product must
equal the matrix side.
"""

import numpy as np

HERMITICITY_TOL = 1e-10

__all__ = [
    "dims_product",
    "hermitianize",
    "kron",
    "partial_trace",
    "partial_transpose",
    "swap_operator",
    "swap_conjugate",
    "permute_systems",
    "hermitian_eig",
    "psd_project",
    "hs_norm",
    "hs_inner",
    "matrix_log_floor",
]

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def _check_dims(m: np.ndarray, dims) -> tuple:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(
            f"product of dims {dims} is {int(np.prod(dims))}, "
            f"but matrix side is {m.shape[0]}"
        )
    return dims


def dims_product(dims) -> int:
    p = 1
    for d in dims:
        p *= int(d)
    return p


def hermitianize(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return (m + m†)/2; reject inputs whose skew part exceeds tol.

    The tolerance is relative to max(1, ||m||) so that checks stay meaningful
    for matrices far from unit scale.
    """
    m = _as_square(m)
    skew = (m - m.conj().T) / 2
    if hs_norm(skew) > tol * max(1.0, hs_norm(m)):
        raise ValueError(
            f"matrix is not Hermitian: skew norm {hs_norm(skew):.3e} "
            f"exceeds tolerance {tol:.1e}"
        )
    return (m + m.conj().T) / 2


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor on the coarse index."""
    return np.kron(_as_square(a), _as_square(b))


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` is a set of subsystem indices; kept subsystems stay in their
    original relative order.
    """
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")

    if 2 * n > len(_LETTERS):
        raise ValueError("too many subsystems for einsum labels")
    labels = list(_LETTERS[: 2 * n])
    for j in range(n):
        if j not in keep:
            labels[n + j] = labels[j]
    out = [labels[k] for k in keep] + [labels[n + k] for k in keep]
    spec = "".join(labels) + "->" + "".join(out)
    side = dims_product(dims[k] for k in keep)
    return np.einsum(spec, m.reshape(dims + dims)).reshape(side, side)


def partial_transpose(m, dims, which: int) -> np.ndarray:
    """Transpose the indices of a single tensor factor."""
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    which = int(which)
    if which < 0 or which >= n:
        raise ValueError(f"subsystem index {which} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[which], axes[n + which] = axes[n + which], axes[which]
    return t.transpose(axes).reshape(m.shape)


def swap_operator(dims, i: int, j: int) -> np.ndarray:
    """Permutation matrix exchanging tensor factors i and j."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    i, j = int(i), int(j)
    if i < 0 or i >= n or j < 0 or j >= n:
        raise ValueError(f"factor indices ({i}, {j}) out of range for {n} factors")
    if dims[i] != dims[j]:
        raise ValueError(
            f"cannot swap factors of unequal dimension {dims[i]} and {dims[j]}"
        )
    side = dims_product(dims)
    grid = np.arange(side).reshape(dims)
    rows = np.swapaxes(grid, i, j).reshape(-1)
    v = np.zeros((side, side), dtype=complex)
    v[rows, np.arange(side)] = 1.0
    return v


def swap_conjugate(m, dims, i: int, j: int) -> np.ndarray:
    """Conjugation V m V for the swap of factors i and j, without building V."""
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    if dims[i] != dims[j]:
        raise ValueError("cannot swap factors of unequal dimension")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[i], axes[j] = axes[j], axes[i]
    axes[n + i], axes[n + j] = axes[n + j], axes[n + i]
    return t.transpose(axes).reshape(m.shape)


def permute_systems(m, dims, perm) -> np.ndarray:
    """Reorder tensor factors so output factor k is input factor perm[k]."""
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm {perm} is not a permutation of 0..{n - 1}")
    t = m.reshape(dims + dims)
    axes = list(perm) + [n + p for p in perm]
    return t.transpose(axes).reshape(m.shape)


def hermitian_eig(m, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary of column eigenvectors) with
    m = U diag(w) U†. Inputs are hermitized first; skew parts beyond tol
    are an error.
    """
    m = hermitianize(m, tol=tol)
    w, u = np.linalg.eigh(m)
    return w, u


def psd_project(m) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix to a Hermitian input."""
    w, u = hermitian_eig(m)
    wc = np.clip(w, 0.0, None)
    out = (u * wc) @ u.conj().T
    return (out + out.conj().T) / 2


def hs_norm(m) -> float:
    """Frobenius (Hilbert-Schmidt) norm."""
    return float(np.linalg.norm(np.asarray(m)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a† b)."""
    return complex(np.vdot(np.asarray(a), np.asarray(b)))


def matrix_log_floor(m, floor: float) -> np.ndarray:
    """Base-2 matrix logarithm with eigenvalues clamped below at ``floor``.

    The input must be Hermitian PSD; eigenvalues below -1e-9 are an error.
    """
    if floor <= 0:
        raise ValueError("floor must be positive")
    w, u = hermitian_eig(m)
    if w.min() < -1e-9:
        raise ValueError(f"matrix has negative eigenvalue {w.min():.3e}")
    wc = np.maximum(w, floor)
    out = (u * np.log2(wc)) @ u.conj().T
    return (out + out.conj().T) / 2
