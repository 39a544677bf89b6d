"""Many-DOF Nambu bracket, per-DOF Poisson matrices and the induced 2-bracket."""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Polynomial, VariableSpace

# (i, j, k, sign) for the six nonzero entries of the 3D alternating symbol,
# 0-based indices.
LEVI_CIVITA = (
    (0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1),
    (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1),
)


def epsilon(i: int, j: int, k: int) -> int:
    """Alternating symbol on 0-based indices."""
    for a, b, c, s in LEVI_CIVITA:
        if (a, b, c) == (i, j, k):
            return s
    return 0


FROM_G = "from_G"
FROM_H = "from_H"


@dataclass(frozen=True)
class NambuSystem:
    space: VariableSpace
    H: Polynomial
    G: Polynomial

    def __post_init__(self):
        self.space.check(self.H, self.G)


@dataclass(frozen=True)
class PoissonMatrixSet:
    """One 3x3 antisymmetric matrix of polynomials per degree of freedom.

    ``matrices[a][i][j]`` is the (i, j) entry for DOF ``a + 1`` (0-based).
    """

    space: VariableSpace
    source: str
    matrices: tuple

    def entry(self, dof: int, i: int, j: int) -> Polynomial:
        """1-based accessor matching the usual J^dof_ij notation."""
        return self.matrices[dof - 1][i - 1][j - 1]

    def __iter__(self):
        return iter(self.matrices)


def gradient(p: Polynomial, space: VariableSpace, dof: int) -> tuple:
    """(d/dx1, d/dx2, d/dx3) of ``p`` for the given 1-based DOF."""
    return tuple(p.diff(v) for v in space.dof_variables(dof))


def _triple(ga, gb, gc) -> Polynomial:
    out = Polynomial.zero()
    for i, j, k, s in LEVI_CIVITA:
        if ga[i] and gb[j] and gc[k]:
            t = ga[i] * gb[j] * gc[k]
            out = out + t if s > 0 else out - t
    return out


def dof_nambu_bracket(A, B, C, space: VariableSpace, dof: int) -> Polynomial:
    """The Jacobian determinant of (A, B, C) in the three variables of one DOF."""
    return _triple(gradient(A, space, dof), gradient(B, space, dof), gradient(C, space, dof))


def nambu_bracket(A: Polynomial, B: Polynomial, C: Polynomial, space: VariableSpace) -> Polynomial:
    """Sum over degrees of freedom of the per-DOF 3D Jacobians of (A, B, C)."""
    space.check(A, B, C)
    out = Polynomial.zero()
    for a in range(1, space.n + 1):
        out = out + dof_nambu_bracket(A, B, C, space, a)
    return out


def poisson_matrices(sys: NambuSystem, source: str = FROM_G) -> PoissonMatrixSet:
    """J^a_ij = eps_ijk dG/dx^a_k (``from_G``) or -eps_ijk dH/dx^a_k (``from_H``)."""
    if source == FROM_G:
        gen, sign = sys.G, 1
    elif source == FROM_H:
        gen, sign = sys.H, -1
    else:
        raise ValueError(f"unknown Poisson matrix source {source!r}")
    mats = []
    for a in range(1, sys.space.n + 1):
        grad = gradient(gen, sys.space, a)
        m = [[Polynomial.zero()] * 3 for _ in range(3)]
        for i, j, k, s in LEVI_CIVITA:
            m[i][j] = grad[k].scale(s * sign)
        mats.append(tuple(tuple(row) for row in m))
    return PoissonMatrixSet(sys.space, source, tuple(mats))


def dof_noncanonical_bracket(A: Polynomial, B: Polynomial, pms: PoissonMatrixSet, dof: int) -> Polynomial:
    """The single-DOF piece J^a_ij dA/dx^a_i dB/dx^a_j."""
    J = pms.matrices[dof - 1]
    ga = gradient(A, pms.space, dof)
    gb = gradient(B, pms.space, dof)
    out = Polynomial.zero()
    for i in range(3):
        if not ga[i]:
            continue
        for j in range(3):
            if J[i][j] and gb[j]:
                out = out + J[i][j] * ga[i] * gb[j]
    return out


def noncanonical_bracket(A: Polynomial, B: Polynomial, pms: PoissonMatrixSet) -> Polynomial:
    pms.space.check(A, B)
    out = Polynomial.zero()
    for a in range(1, pms.space.n + 1):
        out = out + dof_noncanonical_bracket(A, B, pms, a)
    return out
