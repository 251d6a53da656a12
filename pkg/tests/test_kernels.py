from pathlib import Path

import sympy as sp

from symvar_lab import _kernels, _symbolic


def test_generated_kernels_are_current(tmp_path):
    out = tmp_path / "kernels.py"
    _symbolic.emit(out)
    committed = Path(_kernels.__file__).read_text()
    assert out.read_text() == committed


def test_offdiagonal_gradient_vanishes():
    for kind in _symbolic.KINDS:
        assert all(sp.simplify(e) == 0 for e in _symbolic.grad_z2_offdiagonal(kind))


def test_compiled_and_generated_ricci_agree():
    args = (1.3, 0.8, -0.2, 0.4, 1.1)
    assert _symbolic.ricci_frame("sphere")(*args) == list(_kernels.ricci_sphere(*args))
