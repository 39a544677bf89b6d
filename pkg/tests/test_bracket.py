import itertools

import pytest
import sympy

from conftest import random_polys
from nambukit.bracket import (
    FROM_G,
    FROM_H,
    LEVI_CIVITA,
    NambuSystem,
    epsilon,
    nambu_bracket,
    noncanonical_bracket,
    poisson_matrices,
)
from nambukit.expr import Polynomial, SpaceError, VariableSpace

ONE = VariableSpace(1)
TWO = VariableSpace(2)


def x(name):
    return Polynomial.symbol(name)


def to_sympy(p):
    return sympy.sympify(str(p).replace("^", "**"), locals={"lambda": sympy.Symbol("lambda")})


def test_levi_civita_table():
    assert len(LEVI_CIVITA) == 6
    for i, j, k in itertools.product(range(3), repeat=3):
        e = epsilon(i, j, k)
        if len({i, j, k}) < 3:
            assert e == 0
        else:
            assert epsilon(j, i, k) == -e
            assert epsilon(i, k, j) == -e


def test_unit_bracket():
    assert nambu_bracket(x("x1_1"), x("x2_1"), x("x3_1"), ONE) == 1
    assert nambu_bracket(x("x2_1"), x("x1_1"), x("x3_1"), ONE) == -1


def test_model_brackets(model):
    sp, H, G = model.space, model.system.H, model.system.G
    assert nambu_bracket(x("x1_1"), H, G, sp) == model.p("(1/m1)*x2_1")
    assert nambu_bracket(x("x2_2"), H, G, sp) == model.p("-m2*w2sq*x1_2 - 2*lambda*x1_1*x1_2")


def test_total_antisymmetry(rng):
    for _ in range(30):
        args = random_polys(rng, TWO, 3)
        base = nambu_bracket(*args, TWO)
        for perm in itertools.permutations(range(3)):
            sign = epsilon(*perm)
            assert nambu_bracket(*(args[i] for i in perm), TWO) == base.scale(sign)


def test_derivation_and_trilinearity(rng):
    for _ in range(30):
        A, B, C, D = random_polys(rng, TWO, 4)
        assert nambu_bracket(A * B, C, D, TWO) == A * nambu_bracket(B, C, D, TWO) + B * nambu_bracket(A, C, D, TWO)
        assert nambu_bracket(A, B.scale(3) + D, C, TWO) == (
            nambu_bracket(A, B, C, TWO).scale(3) + nambu_bracket(A, D, C, TWO)
        )


def test_single_dof_bracket_is_jacobian_determinant(rng):
    xs = sympy.symbols("x1_1 x2_1 x3_1")
    for _ in range(25):
        polys = random_polys(rng, ONE, 3, max_degree=3)
        jac = sympy.Matrix([[sympy.diff(to_sympy(p), v) for v in xs] for p in polys])
        expected = sympy.expand(jac.det(method="berkowitz"))
        got = to_sympy(nambu_bracket(*polys, ONE))
        assert sympy.expand(got - expected) == 0


def test_space_mismatch():
    with pytest.raises(SpaceError):
        nambu_bracket(x("x1_2"), x("x2_1"), x("x3_1"), ONE)
    with pytest.raises(SpaceError):
        NambuSystem(ONE, x("k"), x("x3_1"))


def test_poisson_matrices_from_G(model):
    pms = poisson_matrices(model.system, FROM_G)
    assert pms.source == FROM_G
    expected = [[0, 1, 0], [-1, 0, "-2*x1_1"], [0, "2*x1_1", 0]]
    for i in range(3):
        for j in range(3):
            assert pms.matrices[0][i][j] == model.p(str(expected[i][j]))
    assert pms.entry(2, 2, 3) == model.p("-2*x1_2")


def test_poisson_matrices_from_H(model):
    pms = poisson_matrices(model.system, FROM_H)
    assert pms.entry(1, 1, 2) == model.p("-m1*w1sq/2")
    assert pms.entry(1, 2, 3) == model.p("-lambda*x3_2")
    assert pms.entry(1, 1, 3) == model.p("x2_1/m1")
    assert pms.entry(2, 1, 2) == model.p("-m2*w2sq/2 - lambda*x1_1")
    assert pms.entry(2, 2, 3).is_zero()


def test_poisson_matrix_trivial():
    sys_ = NambuSystem(ONE, x("x1_1"), x("x3_1"))
    J = poisson_matrices(sys_, FROM_G).matrices[0]
    assert [[int(e.constant_term()) for e in row] for row in J] == [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]
    assert all(e.is_constant() for row in J for e in row)


def test_poisson_matrices_antisymmetric(rng):
    for _ in range(10):
        H, G = random_polys(rng, TWO, 2)
        for src in (FROM_G, FROM_H):
            for J in poisson_matrices(NambuSystem(TWO, H, G), src):
                for i in range(3):
                    assert J[i][i].is_zero()
                    for j in range(3):
                        assert J[j][i] == -J[i][j]


def test_noncanonical_examples(model):
    pms = poisson_matrices(model.system, FROM_G)
    assert noncanonical_bracket(x("x2_1"), x("x2_2"), pms).is_zero()
    for v in model.space.variables:
        f = x(v.name)
        assert noncanonical_bracket(f, model.system.H, pms) == nambu_bracket(f, model.system.H, model.system.G, model.space)


def test_noncanonical_equivalence_random(model, rng):
    sys_ = model.system
    names = model.space.variable_names
    pms_g = poisson_matrices(sys_, FROM_G)
    pms_h = poisson_matrices(sys_, FROM_H)
    for _ in range(40):
        A, B = random_polys(rng, model.space, 2, names=names)
        assert noncanonical_bracket(A, A, pms_g).is_zero()
        assert noncanonical_bracket(A, B, pms_g) == -noncanonical_bracket(B, A, pms_g)
        assert noncanonical_bracket(A, B, pms_g) == nambu_bracket(A, B, sys_.G, model.space)
        # H-form: the 2-bracket carries the extra minus of its matrices
        assert noncanonical_bracket(A, B, pms_h) == nambu_bracket(A, sys_.H, B, model.space)
        assert noncanonical_bracket(A, B, pms_h) == -nambu_bracket(A, B, sys_.H, model.space)


def test_unknown_source():
    with pytest.raises(ValueError):
        poisson_matrices(NambuSystem(ONE, x("x1_1"), x("x3_1")), "from_K")

