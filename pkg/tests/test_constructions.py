import numpy as np
import pytest

from symext import linalg
from symext.constructions import (
    ExampleFamilyParams,
    boundary_isotropic_extension,
    example_extension,
    example_state,
    filtered_state,
    generalized_rank1_state,
    isotropic,
    isotropic_boundary_fidelity,
    rank1_extension_state,
    werner_operators,
)
from symext.extend import FEASIBLE, ExtensionProblem, solve_extension, verify_certificate
from symext.quantum import (
    DensityMatrix,
    fidelity_maxent,
    max_entangled_projector,
    twirl_isotropic,
)


def ket(dims, *idx):
    v = np.zeros(int(np.prod(dims)))
    pos = 0
    for d, i in zip(dims, idx):
        pos = pos * d + i
    v[pos] = 1.0
    return v


def test_example_state_limits():
    flat = example_state(0.0).matrix
    expected = np.zeros((9, 9))
    for a, b in ((0, 1), (2, 0), (2, 1)):
        expected[a * 3 + b, a * 3 + b] = 1 / 3
    assert np.allclose(flat, expected)
    assert np.allclose(example_state(1.0).matrix, max_entangled_projector(3))
    with pytest.raises(ValueError):
        example_state(1.2)


def test_example_state_half_entries_and_spectrum():
    m = example_state(0.5).matrix
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            assert m[i, j] == pytest.approx(1 / 6)
    for i in (1, 6, 7):
        assert m[i, i] == pytest.approx(1 / 6)
    w = np.linalg.eigvalsh(m)
    assert np.allclose(w[:5], 0.0, atol=1e-14)
    assert np.allclose(w[5:], [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-12)


def test_filtered_state_trace_and_entries():
    for f in (0.1, 0.4, 0.7, 1.0):
        fs = filtered_state(f)
        assert fs.matrix.trace().real == pytest.approx(1.0, abs=1e-12)
    fs = filtered_state(1.0)
    assert fs.matrix[4, 4].real == pytest.approx(1 / 3)
    f = 0.4
    fs = filtered_state(f)
    assert fs.matrix[0, 0].real == pytest.approx(f / 3)
    assert fs.matrix[0, 4].real == pytest.approx(np.sqrt(f) / 3)
    assert fs.matrix[0, 8].real == pytest.approx(f / (3 * np.sqrt(2 - f)))
    assert fs.matrix[6, 6].real == pytest.approx((1 - f) / (3 * (2 - f)))


def test_filtered_state_first_marginal_maximally_mixed():
    marg = linalg.partial_trace(filtered_state(0.4).matrix, (3, 3), keep={0})
    assert np.linalg.norm(marg - np.eye(3) / 3) <= 1e-12
    with pytest.raises(ValueError):
        filtered_state(0.0)


def test_family_params_validation():
    with pytest.raises(ValueError, match="lam0"):
        ExampleFamilyParams(0.3, (0.9, 0.01)).weights()
    with pytest.raises(ValueError, match="lam2"):
        ExampleFamilyParams(0.3, (0.2, 0.5)).weights()
    with pytest.raises(ValueError, match="exchange symmetry"):
        ExampleFamilyParams(0.3, (0.1, 0.1)).weights()
    lams = ExampleFamilyParams(0.3).weights()
    assert sum(lams) + 4 * lams[1] == pytest.approx(1.0)  # unnormalized vector
    assert lams[2] == pytest.approx(lams[4], abs=1e-15)


def test_extension_reduces_and_is_swap_invariant():
    rng = np.random.default_rng(42)
    for f in np.linspace(0.0, 0.5, 20):
        splits = [None]
        for _ in range(5):
            lam2 = rng.uniform(0.0, (1 - 2 * f) / 3)
            splits.append(((1 - f) / 3 - lam2, lam2))
        for overrides in splits:
            ext = example_extension(ExampleFamilyParams(f, overrides))
            red = linalg.partial_trace(ext, (3, 3, 3), keep={0, 1})
            assert np.abs(red - example_state(f).matrix).max() <= 1e-12
            swapped = linalg.swap_conjugate(ext, (3, 3, 3), 1, 2)
            assert linalg.hs_norm(ext - swapped) <= 1e-12
            assert abs(ext.trace().real - 1.0) <= 1e-12


def test_extension_psd_range():
    ext = example_extension(ExampleFamilyParams(0.5))
    assert np.linalg.eigvalsh(ext).min() >= -1e-14
    with pytest.raises(ValueError, match="PSD"):
        example_extension(ExampleFamilyParams(0.6))
    unchecked = example_extension(ExampleFamilyParams(0.6), validate=False)
    assert np.linalg.eigvalsh(unchecked).min() < -1e-3


def test_extension_min_eigenvalue_sign_change_at_half():
    def negative(f):
        ext = example_extension(ExampleFamilyParams(f), validate=False)
        return np.linalg.eigvalsh(ext).min() < -1e-12

    lo, hi = 0.4, 0.6
    while hi - lo > 1e-10:
        mid = (lo + hi) / 2
        if negative(mid):
            hi = mid
        else:
            lo = mid
    assert abs((lo + hi) / 2 - 0.5) <= 1e-9


def test_rank1_extension():
    ext, red = rank1_extension_state()
    assert abs(ext.trace().real - 1.0) <= 1e-12
    expected = 0.6 * max_entangled_projector(3)
    expected += 0.2 * np.outer(ket((3, 3), 0, 1), ket((3, 3), 0, 1))
    expected += 0.2 * np.outer(ket((3, 3), 2, 1), ket((3, 3), 2, 1))
    assert np.abs(red.matrix - expected).max() <= 1e-12
    assert fidelity_maxent(red) == pytest.approx(0.6, abs=1e-12)
    assert fidelity_maxent(red) < isotropic_boundary_fidelity(3)
    res = verify_certificate(ext, red)
    assert res.combined <= 1e-12


def test_generalized_rank1_state():
    d2 = generalized_rank1_state(2)
    expected = (2 / 3) * max_entangled_projector(2)
    expected += (1 / 3) * np.outer(ket((2, 2), 1, 0), ket((2, 2), 1, 0))
    assert np.abs(d2.matrix - expected).max() <= 1e-12
    for d in range(2, 7):
        fid = fidelity_maxent(generalized_rank1_state(d))
        assert fid == pytest.approx(d / (2 * d - 1), abs=1e-12)
    with pytest.raises(ValueError):
        generalized_rank1_state(1)


def test_generalized_rank1_state_is_extendible():
    cert = solve_extension(ExtensionProblem(target=generalized_rank1_state(2)))
    assert cert.verdict == FEASIBLE


def test_isotropic_family():
    for d in (2, 3):
        assert np.allclose(isotropic(d, 1 / d**2).matrix, np.eye(d * d) / d**2)
        assert np.allclose(isotropic(d, 1.0).matrix, max_entangled_projector(d))
    w = np.sort(np.linalg.eigvalsh(isotropic(2, 0.75).matrix))
    assert np.allclose(w, [1 / 12, 1 / 12, 1 / 12, 0.75], atol=1e-12)
    with pytest.raises(ValueError):
        isotropic(2, 1.5)
    with pytest.raises(ValueError):
        isotropic(1, 0.5)


def test_boundary_fidelity_values():
    assert isotropic_boundary_fidelity(2) == pytest.approx(0.75)
    assert isotropic_boundary_fidelity(3) == pytest.approx(2 / 3)
    assert isotropic_boundary_fidelity(4) == pytest.approx(0.625)
    assert isotropic_boundary_fidelity(10) == pytest.approx(0.55)
    vals = [isotropic_boundary_fidelity(d) for d in range(2, 30)]
    assert all(a > b > 0.5 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_werner_operator_traces(d):
    ops = werner_operators(d)
    assert ops.x.trace().real == pytest.approx(d**2)
    assert (ops.x @ ops.v).trace().real == pytest.approx(d)
    assert ops.s0.trace().real == pytest.approx(2 * d)
    assert np.linalg.norm(ops.v @ ops.v - np.eye(d**3)) <= 1e-12
    with pytest.raises(ValueError):
        werner_operators(7)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_boundary_isotropic_extension_oracle(d):
    ext = boundary_isotropic_extension(d)
    assert abs(ext.trace().real - 1.0) <= 1e-12
    assert np.linalg.eigvalsh(ext).min() >= -1e-10
    swapped = linalg.swap_conjugate(ext, (d, d, d), 1, 2)
    assert linalg.hs_norm(ext - swapped) <= 1e-12
    red = DensityMatrix(linalg.partial_trace(ext, (d, d, d), keep={0, 1}), (d, d))
    assert fidelity_maxent(red) == pytest.approx(
        isotropic_boundary_fidelity(d), abs=1e-10
    )
    # formula identity: equals (X + VXV + XV + VX) / (2d(d+1))
    ops = werner_operators(d)
    direct = (
        ops.x + ops.v @ ops.x @ ops.v + ops.x @ ops.v + ops.v @ ops.x
    ) / (2 * d * (d + 1))
    assert np.linalg.norm(ext - direct) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_boundary_extension_certifies_twirled_reduction(d):
    ext = boundary_isotropic_extension(d)
    red = DensityMatrix(linalg.partial_trace(ext, (d, d, d), keep={0, 1}), (d, d))
    res = verify_certificate(ext, twirl_isotropic(red))
    assert res.combined <= 1e-10
