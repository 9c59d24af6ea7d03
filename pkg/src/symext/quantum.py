"""States, channels, the Choi bridge, and entropic functionals."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg

HERM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
KRAUS_TOL = 1e-9
CHOI_MARGINAL_TOL = 1e-9
LOG_FLOOR = 1e-12
KERNEL_EIG_TOL = 1e-13
SUPPORT_MASS_TOL = 1e-8

__all__ = [
    "DensityMatrix",
    "KrausChannel",
    "ChoiState",
    "max_entangled_projector",
    "choi_from_kraus",
    "kraus_from_choi",
    "apply_channel",
    "depolarizing_channel",
    "von_neumann_entropy",
    "relative_entropy",
    "coherent_information",
    "fidelity_maxent",
    "negativity",
    "embed_square",
    "twirl_isotropic",
]


def _readonly(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.flags.writeable = False
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian PSD trace-one matrix tagged with subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if linalg.dims_product(dims) != m.shape[0]:
            raise ValueError(
                f"dims {dims} product {linalg.dims_product(dims)} does not match "
                f"matrix side {m.shape[0]}"
            )
        skew = linalg.hs_norm((m - m.conj().T) / 2)
        if skew > HERM_TOL * max(1.0, linalg.hs_norm(m)):
            raise ValueError(
                f"not Hermitian: skew norm {skew:.3e} exceeds {HERM_TOL:.1e}"
            )
        m = (m + m.conj().T) / 2
        tr = float(m.trace().real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, off from 1 by {abs(tr - 1.0):.3e}")
        wmin = float(np.linalg.eigvalsh(m).min())
        if wmin < -PSD_TOL:
            raise ValueError(f"minimum eigenvalue {wmin:.3e} below -{PSD_TOL:.1e}")
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "dims", dims)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving channel given by Kraus operators of shape d_out x d_in."""

    d_in: int
    d_out: int
    kraus: tuple

    def __post_init__(self):
        d_in, d_out = int(self.d_in), int(self.d_out)
        if d_in < 1 or d_out < 1:
            raise ValueError("channel dimensions must be positive")
        ops = tuple(_readonly(np.asarray(k, dtype=complex)) for k in self.kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (d_out, d_in):
                raise ValueError(
                    f"Kraus operator shape {k.shape} is not ({d_out}, {d_in})"
                )
        comp = sum(k.conj().T @ k for k in ops)
        res = linalg.hs_norm(comp - np.eye(d_in))
        if res > KRAUS_TOL:
            raise ValueError(
                f"not trace-preserving: ||sum K†K - I|| = {res:.3e} "
                f"exceeds {KRAUS_TOL:.1e}"
            )
        object.__setattr__(self, "d_in", d_in)
        object.__setattr__(self, "d_out", d_out)
        object.__setattr__(self, "kraus", ops)


@dataclass(frozen=True, eq=False)
class ChoiState:
    """Bipartite state on input x output with maximally mixed input marginal."""

    state: DensityMatrix

    def __post_init__(self):
        if len(self.state.dims) != 2:
            raise ValueError(f"Choi state needs two factors, got dims {self.state.dims}")
        d_in = self.state.dims[0]
        marg = linalg.partial_trace(self.state.matrix, self.state.dims, keep={0})
        res = linalg.hs_norm(marg - np.eye(d_in) / d_in)
        if res > CHOI_MARGINAL_TOL:
            raise ValueError(
                f"input marginal differs from I/{d_in}: residual {res:.3e} "
                f"exceeds {CHOI_MARGINAL_TOL:.1e}"
            )

    @property
    def d_in(self) -> int:
        return self.state.dims[0]

    @property
    def d_out(self) -> int:
        return self.state.dims[1]


def max_entangled_projector(d: int) -> np.ndarray:
    """Trace-one projector onto sum_i |ii> / sqrt(d)."""
    phi = np.eye(int(d), dtype=complex).reshape(-1)
    return np.outer(phi, phi.conj()) / d


def choi_from_kraus(ch: KrausChannel) -> ChoiState:
    """Apply the channel to one half of the maximally entangled state."""
    d = ch.d_in
    p = max_entangled_projector(d)
    out = np.zeros((d * ch.d_out, d * ch.d_out), dtype=complex)
    for k in ch.kraus:
        lifted = np.kron(np.eye(d), k)
        out += lifted @ p @ lifted.conj().T
    return ChoiState(DensityMatrix(out, (d, ch.d_out)))


def kraus_from_choi(c: ChoiState) -> KrausChannel:
    """Recover a Kraus representation from a Choi state.

    Eigenpairs of d_in * choi with eigenvalue above 1e-10 each yield one
    Kraus operator; the round trip back to the Choi state is exact to 1e-8.
    """
    d_in, d_out = c.d_in, c.d_out
    w, u = linalg.hermitian_eig(d_in * c.state.matrix)
    ops = []
    for lam, vec in zip(w, u.T):
        if lam > 1e-10:
            ops.append(math.sqrt(lam) * vec.reshape(d_in, d_out).T)
    return KrausChannel(d_in, d_out, tuple(ops))


def apply_channel(ch: KrausChannel, rho: DensityMatrix, which=None) -> DensityMatrix:
    """Apply a channel to a state, or to one tensor factor of it."""
    if which is None:
        if rho.side != ch.d_in:
            raise ValueError(
                f"state side {rho.side} does not match channel input {ch.d_in}"
            )
        out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus)
        dims = rho.dims if ch.d_out == ch.d_in else (ch.d_out,)
        return DensityMatrix(out, dims)

    which = int(which)
    if which < 0 or which >= len(rho.dims):
        raise ValueError(f"factor {which} out of range for dims {rho.dims}")
    if rho.dims[which] != ch.d_in:
        raise ValueError(
            f"factor dimension {rho.dims[which]} does not match channel input {ch.d_in}"
        )
    out_dims = tuple(
        ch.d_out if i == which else d for i, d in enumerate(rho.dims)
    )
    out = np.zeros((linalg.dims_product(out_dims),) * 2, dtype=complex)
    for k in ch.kraus:
        lifted = np.array([[1.0]], dtype=complex)
        for i, d in enumerate(rho.dims):
            lifted = np.kron(lifted, k if i == which else np.eye(d))
        out += lifted @ rho.matrix @ lifted.conj().T
    return DensityMatrix(out, out_dims)


def depolarizing_channel(d: int, p: float) -> KrausChannel:
    """Channel rho -> (1-p) rho + p I/d via the Heisenberg-Weyl basis."""
    d = int(d)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for a in range(d):
        for b in range(d):
            u = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            weight = 1.0 - p + p / d**2 if a == b == 0 else p / d**2
            if weight > 0:
                ops.append(math.sqrt(weight) * u)
    return KrausChannel(d, d, tuple(ops))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -sum lambda log2 lambda in bits."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log2(w)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr[rho log2 rho] - Tr[rho log2 sigma], or +inf on support mismatch.

    The support test projects rho onto sigma's numerical kernel (eigenvalues
    below 1e-13) and flags infinity when that mass exceeds 1e-8.
    """
    if rho.side != sigma.side:
        raise ValueError(
            f"dimension mismatch: {rho.side} vs {sigma.side}"
        )
    w, u = linalg.hermitian_eig(sigma.matrix)
    kernel = u[:, w < KERNEL_EIG_TOL]
    if kernel.size:
        mass = float(
            np.real(np.trace(kernel.conj().T @ rho.matrix @ kernel))
        )
        if mass > SUPPORT_MASS_TOL:
            return math.inf
    wr = np.linalg.eigvalsh(rho.matrix)
    wr = wr[wr > 1e-12]
    tr_rho_log_rho = float(np.sum(wr * np.log2(wr)))
    log_sigma = linalg.matrix_log_floor(sigma.matrix, LOG_FLOOR)
    tr_rho_log_sigma = float(np.real(linalg.hs_inner(rho.matrix, log_sigma)))
    return tr_rho_log_rho - tr_rho_log_sigma


def coherent_information(rho: DensityMatrix) -> float:
    """S(rho_B) - S(rho_AB) for a bipartite state, in bits."""
    if len(rho.dims) != 2:
        raise ValueError(f"state must be bipartite, got dims {rho.dims}")
    rho_b = DensityMatrix(
        linalg.partial_trace(rho.matrix, rho.dims, keep={1}), (rho.dims[1],)
    )
    return von_neumann_entropy(rho_b) - von_neumann_entropy(rho)


def fidelity_maxent(rho: DensityMatrix) -> float:
    """Overlap with the maximally entangled state on equal local dimensions."""
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise ValueError(f"state must live on d x d, got dims {rho.dims}")
    p = max_entangled_projector(rho.dims[0])
    return float(np.real(linalg.hs_inner(p, rho.matrix)))


def negativity(rho: DensityMatrix) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    if len(rho.dims) != 2:
        raise ValueError(f"state must be bipartite, got dims {rho.dims}")
    pt = linalg.partial_transpose(rho.matrix, rho.dims, 1)
    w = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return float(-np.sum(w[w < 0]))


def embed_square(rho: DensityMatrix) -> DensityMatrix:
    """Zero-pad a bipartite state into d x d with d = max local dimension."""
    if len(rho.dims) != 2:
        raise ValueError(f"state must be bipartite, got dims {rho.dims}")
    da, db = rho.dims
    d = max(da, db)
    if da == db:
        return rho
    t = rho.matrix.reshape(da, db, da, db)
    out = np.zeros((d, d, d, d), dtype=complex)
    out[:da, :db, :da, :db] = t
    return DensityMatrix(out.reshape(d * d, d * d), (d, d))


def twirl_isotropic(rho: DensityMatrix) -> DensityMatrix:
    """Average over U (x) U*, in closed form via the preserved fidelity."""
    f = fidelity_maxent(rho)
    d = rho.dims[0]
    p = max_entangled_projector(d)
    out = f * p + (1.0 - f) * (np.eye(d * d) - p) / (d * d - 1)
    return DensityMatrix(out, (d, d))
