"""Exact analytic states and extensions used as generators and solver oracles.

The 3x3 example family lives on A (x) B with A, B three-dimensional. Its
known tripartite extension is naturally written with the extending party
first, i.e. on (B', A, B); builders here permute it to the canonical
A (x) B (x) B' order where the exchange symmetry acts on factors 1 and 2.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .quantum import DensityMatrix, max_entangled_projector

__all__ = [
    "example_state",
    "filtered_state",
    "ExampleFamilyParams",
    "example_extension",
    "rank1_extension_state",
    "generalized_rank1_state",
    "isotropic",
    "isotropic_boundary_fidelity",
    "WernerOperators",
    "werner_operators",
    "boundary_isotropic_extension",
]


def _ket(dims, *indices) -> np.ndarray:
    v = np.zeros(linalg.dims_product(dims), dtype=complex)
    stride = 1
    pos = 0
    for d, i in zip(reversed(dims), reversed(indices)):
        pos += i * stride
        stride *= d
    v[pos] = 1.0
    return v


def _proj(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def example_state(fidelity: float) -> DensityMatrix:
    """Rank-four 3x3 family: F P+ + (1-F)/3 (|01><01| + |20><20| + |21><21|)."""
    f = float(fidelity)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must be in [0, 1], got {f}")
    dims = (3, 3)
    m = f * max_entangled_projector(3)
    for a, b in ((0, 1), (2, 0), (2, 1)):
        m += (1.0 - f) / 3.0 * _proj(_ket(dims, a, b))
    return DensityMatrix(m, dims)


def filtered_state(fidelity: float) -> DensityMatrix:
    """Example state filtered on the first factor so its marginal is I/3.

    The filter is diag(1, 1/sqrt(F), 1/sqrt(2-F)); F = 0 makes it singular.
    """
    f = float(fidelity)
    if not 0.0 < f <= 1.0:
        raise ValueError(f"fidelity must be in (0, 1], got {f}")
    w = np.diag([1.0, 1.0 / np.sqrt(f), 1.0 / np.sqrt(2.0 - f)]).astype(complex)
    op = np.kron(w, np.eye(3))
    m = op @ example_state(f).matrix @ op.conj().T
    m /= m.trace().real
    return DensityMatrix(m, (3, 3))


@dataclass(frozen=True)
class ExampleFamilyParams:
    """Eigenvalue split for the example family's tripartite extension.

    The six eigenvector weights obey two reduction constraints,
    lam0 + lam4 = (1-F)/3 and lam2 + lam5 = (1-2F)/3, and the exchange
    symmetry of the extension forces lam2 = lam4. That leaves one free
    split, expressed here through the pair (lam0, lam2) with
    lam0 + lam2 = (1-F)/3.
    """

    fidelity: float
    lambda_overrides: tuple = None

    def weights(self) -> tuple:
        """Return (lam0, ..., lam5), defaulting to lam2 = (1-2F)/6."""
        f = float(self.fidelity)
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fidelity must be in [0, 1], got {f}")
        lam1 = f / 3.0
        lam3 = (1.0 - 2.0 * f) / 3.0
        if self.lambda_overrides is None:
            lam2 = (1.0 - 2.0 * f) / 6.0
            lam0 = (1.0 - f) / 3.0 - lam2
        else:
            lam0, lam2 = (float(v) for v in self.lambda_overrides)
            if not -1e-12 <= lam0 <= (1.0 - f) / 3.0 + 1e-12:
                raise ValueError(
                    f"lam0={lam0} outside [0, (1-F)/3] = [0, {(1 - f) / 3:.6f}]"
                )
            if not -1e-12 <= lam2 <= (1.0 - 2.0 * f) / 3.0 + 1e-12:
                raise ValueError(
                    f"lam2={lam2} outside [0, (1-2F)/3] = [0, {(1 - 2 * f) / 3:.6f}]"
                )
            if abs(lam0 + lam2 - (1.0 - f) / 3.0) > 1e-12:
                raise ValueError(
                    "lam0 + lam2 must equal (1-F)/3: the exchange symmetry of "
                    "the extension ties the two reduction splits together "
                    f"(got {lam0 + lam2:.6f}, need {(1 - f) / 3:.6f})"
                )
        lam4 = (1.0 - f) / 3.0 - lam0
        lam5 = (1.0 - 2.0 * f) / 3.0 - lam2
        return (lam0, lam1, lam2, lam3, lam4, lam5)


def _extension_vectors() -> tuple:
    """The six eigenvectors on (B', A, B); the second one is unnormalized."""
    dims = (3, 3, 3)
    phi1 = (
        _ket(dims, 0, 0, 1)
        + _ket(dims, 1, 0, 0)
        + _ket(dims, 1, 1, 1)
        + _ket(dims, 1, 2, 2)
        + _ket(dims, 2, 2, 1)
    )
    return (
        _ket(dims, 0, 2, 0),
        phi1,
        _ket(dims, 0, 2, 1),
        _ket(dims, 1, 0, 1),
        _ket(dims, 1, 2, 0),
        _ket(dims, 1, 2, 1),
    )


def example_extension(params: ExampleFamilyParams, validate: bool = True) -> np.ndarray:
    """Tripartite extension of the example state, on canonical A (x) B (x) B'.

    The weight on the unnormalized five-term vector is F/3, which is what
    makes the total trace one and the first-factor reduction reproduce the
    example state. PSD requires F <= 1/2; pass validate=False to build the
    (indefinite) matrix beyond that point.
    """
    lams = params.weights()
    if validate and params.fidelity > 0.5 + 1e-12:
        raise ValueError(
            f"extension is not PSD for F > 1/2 (got F = {params.fidelity})"
        )
    m = np.zeros((27, 27), dtype=complex)
    for lam, vec in zip(lams, _extension_vectors()):
        m += lam * _proj(vec)
    # (B', A, B) -> (A, B, B')
    return linalg.permute_systems(m, (3, 3, 3), (1, 2, 0))


def rank1_extension_state():
    """Pure exchange-symmetric extension whose reduction has fidelity 3/5.

    Returns (extension on canonical A (x) B (x) B', reduction on 3 x 3).
    """
    phi1 = _extension_vectors()[1]
    ext = linalg.permute_systems(_proj(phi1) / 5.0, (3, 3, 3), (1, 2, 0))
    red = linalg.partial_trace(ext, (3, 3, 3), keep={0, 1})
    return ext, DensityMatrix(red, (3, 3))


def generalized_rank1_state(d: int) -> DensityMatrix:
    """d-dimensional family d/(2d-1) P+ + 1/(2d-1) sum_i |i 0><i 0|."""
    d = int(d)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    m = d / (2 * d - 1) * max_entangled_projector(d)
    for i in range(1, d):
        m += 1.0 / (2 * d - 1) * _proj(_ket((d, d), i, 0))
    return DensityMatrix(m, (d, d))


def isotropic(d: int, fidelity: float) -> DensityMatrix:
    """Isotropic state with the given overlap on the maximally entangled state."""
    d = int(d)
    f = float(fidelity)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must be in [0, 1], got {f}")
    p = max_entangled_projector(d)
    m = d**2 / (d**2 - 1) * ((1.0 - f) * np.eye(d * d) / d**2 + (f - 1.0 / d**2) * p)
    return DensityMatrix(m, (d, d))


def isotropic_boundary_fidelity(d: int) -> float:
    """Largest isotropic fidelity that still admits a symmetric extension."""
    d = int(d)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return (d + 1) / (2 * d)


@dataclass(frozen=True)
class WernerOperators:
    """Basis operators of the exchange-invariant commutant on d x d x d."""

    x: np.ndarray
    v: np.ndarray
    s0: np.ndarray
    s1: np.ndarray


def werner_operators(d: int) -> WernerOperators:
    """Build X = |phi><phi| (x) I (phi unnormalized), V = swap(2,3), S0, S1."""
    d = int(d)
    if not 2 <= d <= 6:
        raise ValueError(f"dimension must be in [2, 6], got {d}")
    phi = np.eye(d, dtype=complex).reshape(-1)
    x = np.kron(np.outer(phi, phi.conj()), np.eye(d))
    v = linalg.swap_operator((d, d, d), 1, 2)
    vxv = v @ x @ v
    xv = x @ v
    vx = v @ x
    s0 = (d * (x + vxv) - (xv + vx)) / (d**2 - 1)
    s1 = (d * (xv + vx) - (x + vxv)) / (d**2 - 1)
    return WernerOperators(x=x, v=v, s0=s0, s1=s1)


def boundary_isotropic_extension(d: int) -> np.ndarray:
    """Explicit symmetric extension of the boundary isotropic state.

    Equals (S0 + S1)/(2d): trace one, PSD, invariant under swapping the
    last two factors, and its two-party reduction has fidelity (d+1)/(2d).
    """
    ops = werner_operators(d)
    return (ops.s0 + ops.s1) / (2 * d)
