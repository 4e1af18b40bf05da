import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.errors import ConfigError
from coulomb_dirac.potentials import POTENTIAL_SCHEMA, PotentialSpec, norm_plus, positive_part


def test_roundtrip():
    V = PotentialSpec.bump(2.0, 1.0, 3.0, matrix=[[1, 0.5j], [-0.5j, 0.2]])
    W = PotentialSpec.from_dict(V.to_dict())
    jsonschema.validate(V.to_dict(), POTENTIAL_SCHEMA)
    r = np.linspace(0.5, 3.5, 9)
    assert np.allclose(V.matrix(r), W.matrix(r))


def test_bump_peak_and_support():
    V = PotentialSpec.bump(2.0, 0.5, 3.0)
    assert V.matrix(np.array([2.0]))[0, 0, 0] == pytest.approx(3.0)
    assert V.support() == (1.5, 2.5)
    assert np.all(V.matrix(np.array([1.0, 3.0])) == 0)


@pytest.mark.parametrize("bad", [
    {"kind": "scalar_radial", "pieces": [{"type": "bump", "center": 1, "width": 0}]},
    {"kind": "scalar_radial", "pieces": [{"type": "power", "height": 1, "exponent": -1, "r_min": 0}]},
    {"kind": "matrix_radial", "pieces": [{"type": "bump", "center": 1, "width": 1, "matrix": [[0, 1], [0, 0]]}]},
    {"kind": "tensor", "pieces": []},
])
def test_invalid(bad):
    with pytest.raises(ConfigError):
        PotentialSpec.from_dict(bad)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_positive_part_properties(a, d, br, bi):
    m = np.array([[a, br + 1j * bi], [br - 1j * bi, d]])
    pp = positive_part(m)
    assert np.linalg.eigvalsh(pp).min() >= -1e-10
    assert np.linalg.eigvalsh(pp - m).min() >= -1e-10
    assert norm_plus(m) == pytest.approx(max(np.linalg.eigvalsh(m).max(), 0.0), abs=1e-10)


@given(st.floats(0.01, 10))
def test_scaling_is_linear(alpha):
    V = PotentialSpec.bump(2.0, 1.0, 3.0)
    r = np.linspace(1.2, 2.8, 5)
    assert np.allclose(V.scaled(alpha).matrix(r), alpha * V.matrix(r))
