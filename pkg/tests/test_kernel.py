import numpy as np
import pytest

from wdvv.kernel import (
    beta_table,
    f_triple_prime,
    f_value,
    finite_difference_tensor,
    reduce_type_a,
    third_tensor,
    three_term_violation,
    type_a_linear_change,
)
from wdvv.model import PrepotentialParams, make_sample_point, preset_params

PRESETS = ("simplest", "type-a-plus", "type-a-minus", "bcd", "bcd-extended", "four-dim")


def _preset(name, n):
    if name == "bcd":
        return preset_params(name, n, eta=0.9)
    if name == "bcd-extended":
        return preset_params(name, n, eta=0.9, gamma=0.7)
    return preset_params(name, n)


def test_f_triple_prime_values():
    assert f_triple_prime("coth", 1.3) == pytest.approx(1.0 / np.tanh(1.3), rel=1e-15)
    assert f_triple_prime("recip", 1.3) == pytest.approx(1.0 / 1.3, rel=1e-15)
    xs = np.array([0.4, 1.0, 2.2])
    for kernel in ("coth", "recip"):
        vals = f_triple_prime(kernel, xs)
        assert vals.shape == xs.shape
        # odd function
        assert np.allclose(f_triple_prime(kernel, -xs), -vals, atol=0.0)
    with pytest.raises(ValueError, match="kernel singularity"):
        f_triple_prime("coth", 0.0)
    with pytest.raises(ValueError, match="kernel singularity"):
        f_triple_prime("recip", np.array([0.5, 0.0]))


def test_f_value_domain():
    for kernel in ("coth", "recip"):
        with pytest.raises(ValueError, match="series domain"):
            f_value(kernel, 0.0)
        with pytest.raises(ValueError, match="series domain"):
            f_value(kernel, -0.3)


def test_f_value_third_derivative_consistency():
    # Richardson-extrapolated central stencil of f recovers f''' to O(h^4);
    # this ties the trilogarithm series in f to the coth closed form
    def d3(kernel, x, h):
        def stencil(hh):
            return (f_value(kernel, x + 2 * hh) - f_value(kernel, x - 2 * hh)
                    - 2 * (f_value(kernel, x + hh) - f_value(kernel, x - hh))) / (2 * hh ** 3)

        return (4.0 * stencil(h) - stencil(2.0 * h)) / 3.0

    for kernel in ("coth", "recip"):
        for x in (0.5, 1.0, 2.0):
            assert abs(d3(kernel, x, 1e-2) - f_triple_prime(kernel, x)) < 2e-6


def test_three_term_violation_constants():
    # k(p-q)k(p-r) + k(q-p)k(q-r) + k(r-p)k(r-q) is 1 for coth, 0 for 1/x
    rng = np.random.default_rng(7)
    count = 0
    while count < 50:
        p, q, r = rng.uniform(-2.5, 2.5, 3)
        if min(abs(p - q), abs(p - r), abs(q - r)) < 1e-2:
            continue
        count += 1
        assert abs(three_term_violation("coth", p, q, r)) < 1e-10
        assert abs(three_term_violation("recip", p, q, r)) < 1e-10


def test_beta_table_entries():
    params = PrepotentialParams(n=4, kernel="coth", alpha_minus=1.0, alpha_plus=0.5,
                                eta=0.8, a=0.3, b=-0.2, c=1.1)
    point = make_sample_point(4, seed=3)
    a = point.array
    table = beta_table(params, point)
    assert np.all(np.diag(table.offdiag) == 0.0)
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            expected = (1.0 / np.tanh(a[i] - a[j]) + 0.5 / np.tanh(a[i] + a[j]) - 0.2)
            assert table.offdiag[i, j] == pytest.approx(expected, rel=1e-14)
    for k in range(4):
        expected = 0.8 / np.tanh(a[k]) + (4 - 4) * (-0.2) + 1.1
        assert table.diag[k] == pytest.approx(expected, rel=1e-14)
    assert np.allclose(table.kk, table.offdiag.sum(axis=1) + table.diag, atol=0.0)


def test_beta_table_eta_shift():
    # the single-index coupling enters diag only, as eta * k(a_k)
    base = PrepotentialParams(n=5, kernel="recip", alpha_minus=1.0, alpha_plus=0.0,
                              eta=0.0, a=0.1, b=0.2, c=0.3)
    shifted = PrepotentialParams(n=5, kernel="recip", alpha_minus=1.0, alpha_plus=0.0,
                                 eta=1.7, a=0.1, b=0.2, c=0.3)
    point = make_sample_point(5, seed=9)
    t0 = beta_table(base, point)
    t1 = beta_table(shifted, point)
    assert np.array_equal(t0.offdiag, t1.offdiag)
    assert np.allclose(t1.diag - t0.diag, 1.7 * f_triple_prime("recip", point.array), atol=1e-15)


def test_third_tensor_structure():
    params = PrepotentialParams(n=4, kernel="coth", alpha_minus=1.0, alpha_plus=0.0,
                                eta=0.6, a=0.7, b=-0.4, c=1.1)
    point = make_sample_point(4, seed=1)
    t = third_tensor(params, point)
    table = beta_table(params, point)
    assert t.n_total == 4
    assert t.entries.shape == (4, 4, 4)
    # fully symmetric
    e = t.entries
    for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        assert np.array_equal(e, e.transpose(perm))
    # three distinct indices see only the symmetric cubic
    assert t[0, 1, 2] == params.a
    assert t[3, 1, 0] == params.a
    # one repeated index adds the pair coupling beta_{mk}
    for k in range(4):
        for m in range(4):
            if k == m:
                continue
            assert t[k, k, m] == pytest.approx(params.a + table.offdiag[m, k], rel=1e-14)
    # fully repeated index adds the row sum K_k
    for k in range(4):
        assert t[k, k, k] == pytest.approx(params.a + table.kk[k], rel=1e-14)


def test_third_tensor_gamma_block():
    params = _preset("bcd-extended", 3)
    point = make_sample_point(params.dim, seed=2)
    t = third_tensor(params, point)
    assert t.n_total == 4
    # the extra-variable slice is exactly gamma * identity
    assert np.array_equal(t.slice(3), 0.7 * np.eye(4))
    base = PrepotentialParams(n=3, kernel=params.kernel, alpha_minus=params.alpha_minus,
                              alpha_plus=params.alpha_plus, eta=params.eta,
                              a=params.a, b=params.b, c=params.c)
    t_base = third_tensor(base, point.array[:3])
    assert np.array_equal(t.entries[:3, :3, :3], t_base.entries)


def test_third_tensor_dimension_check():
    params = _preset("bcd-extended", 3)
    with pytest.raises(ValueError, match="expected 4"):
        third_tensor(params, np.array([1.0, 0.7, 0.4]))


def test_finite_difference_matches_analytic():
    for name in PRESETS:
        params = _preset(name, 3)
        point = make_sample_point(params.dim, margin=0.2, seed=11)
        t = third_tensor(params, point)
        fd = finite_difference_tensor(params, point)
        rel = np.abs(fd.entries - t.entries).max() / (1.0 + np.abs(t.entries).max())
        assert rel < 1e-5, f"{name}: fd mismatch {rel:.3e}"


def test_finite_difference_stencil_legality():
    params = _preset("simplest", 3)
    point = make_sample_point(3, margin=0.1, seed=0)
    # 6 * step must stay within margin/2
    with pytest.raises(ValueError, match="stencil outside safe region"):
        finite_difference_tensor(params, point)
    with pytest.raises(TypeError):
        finite_difference_tensor(params, point.array)
    wide = make_sample_point(3, margin=0.2, seed=0)
    with pytest.raises(ValueError, match="step must be positive"):
        finite_difference_tensor(params, wide, step=0.0)


def test_type_a_linear_change():
    m = type_a_linear_change(3)
    assert m.shape == (4, 4)
    assert abs(np.linalg.det(m)) > 1e-12
    x = np.array([0.3, 0.1, -0.2, 0.5])
    out = m @ x
    assert np.allclose(out[:3], x[:3] - x[3], atol=0.0)
    assert out[3] == pytest.approx(x.sum(), rel=1e-15)


def test_reduce_type_a_matches_preset():
    for n in (2, 3):
        point = make_sample_point(n, seed=4)
        direct = third_tensor(preset_params("type-a-plus", n), point)
        reduced = reduce_type_a(n, point)
        assert np.abs(reduced.entries - direct.entries).max() < 1e-9
        with pytest.raises(ValueError, match="expected"):
            reduce_type_a(n, np.ones(n + 2))
