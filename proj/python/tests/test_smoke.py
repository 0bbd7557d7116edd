import numpy as np
import pytest

import asymptotica as at


def test_version_and_cases():
    assert at.__version__ == "0.1.0"
    assert "example2" in at.verify_cases()


def test_operator_roundtrip():
    op = at.parse_operator("jordan(4)")
    assert op.dim == 4
    x = np.array([0, 1, 0, 0], dtype=complex)
    np.testing.assert_allclose(op.apply(x), [0, 0, 1, 0])
    np.testing.assert_allclose(op.dense(), np.eye(4, k=-1))
    y = np.arange(4) + 1j
    assert abs(np.vdot(op.apply(x), y) - np.vdot(x, op.adjoint_apply(y))) < 1e-14


def test_orbit_half_identity_decays():
    op = at.scale(at.identity(3), 0.5)
    rec = at.orbit(op, np.array([1, 0, 0], dtype=complex), 40)
    assert rec["verdict"] == "decaying"
    assert rec["norms"][10] == 2.0**-10


def test_backward_chain_unitary_is_isometric():
    u = at.diag_unitary(5, 3)
    x = np.ones(5, dtype=complex) / np.sqrt(5)
    chain = at.backward_chain(u, x, 6, "joint")
    assert chain["elements"].shape == (5, 7)
    np.testing.assert_allclose(chain["norm_profile"], 1.0, atol=1e-12)
    assert at.is_in_mt(u, x)["verdict"] == "in-MT"


def test_not_in_range_raises():
    with pytest.raises(at.NotInRangeError):
        at.backward_chain(at.jordan(3), np.array([1, 0, 0], dtype=complex), 1, "joint")


def test_gram_split():
    op = at.direct_sum([at.scale(at.identity(2), 0.5), at.diag_unitary(2, 1)])
    g = at.asymptote_gram(op, 64)
    assert g["kernel_basis"].shape == (4, 2)
    np.testing.assert_allclose(g["average"], np.diag([0, 0, 1, 1]), atol=1e-12)


def test_config_errors_carry_paths():
    with pytest.raises(at.ConfigError, match=r"\$\.bogus"):
        at.run_config('{"schema": 1, "experiment": "orbit", "operator": "identity(2)", "bogus": 0}')


def test_verify_example2():
    rep = at.verify("example2")
    assert rep["passed"]
    assert rep["csv"].startswith("section,origin_id,mode,m,")


def test_run_config_is_deterministic():
    cfg = '{"schema": 1, "experiment": "backward", "operator": "example2(6)", "vectors": [{"random": 4}], "horizon": 5}'
    assert at.run_config(cfg)["csv"] == at.run_config(cfg)["csv"]
