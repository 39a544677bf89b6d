"""Exact residuals of the fundamental identity and the Jacobi identity.

Residuals are oriented as lhs - rhs with the nested-first term on the left:

    FI:     {{A,B,C},D,E} - {{A,D,E},B,C} - {A,{B,D,E},C} - {A,B,{C,D,E}}
    Jacobi: {{A,B},C} - {{A,C},B} - {A,{B,C}}

Each residual is computed twice: once by literally nesting brackets, and once
through the closed-form epsilon contractions in which every second derivative
of A, B, C has already cancelled.  The two routes share nothing beyond
polynomial differentiation, so their agreement is a meaningful check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bracket import (
    LEVI_CIVITA,
    PoissonMatrixSet,
    dof_noncanonical_bracket,
    gradient,
    nambu_bracket,
    noncanonical_bracket,
)
from .expr import Polynomial, Symbol, VariableSpace, symbol_sort_key


@dataclass(frozen=True)
class ResidualReport:
    residual: Polynomial
    is_zero: bool
    witness: Optional[dict] = field(default=None)

    @classmethod
    def of(cls, residual: Polynomial) -> "ResidualReport":
        if residual.is_zero():
            return cls(residual, True, None)
        return cls(residual, False, find_witness(residual))

    def to_record(self, kind: str, inputs) -> dict:
        return {
            "identity_kind": kind,
            "inputs": [str(p) for p in inputs],
            "residual": str(self.residual),
            "is_zero": self.is_zero,
            "witness": None if self.witness is None else {k: str(v) for k, v in self.witness.items()},
        }


# -- witness search -----------------------------------------------------------

def _witness_values():
    yield Fraction(1)
    yield Fraction(-1)
    yield Fraction(1, 2)
    n = 2
    while True:
        yield Fraction(n)
        n += 1


def _split(p: Polynomial, name: str) -> dict:
    """Coefficients of ``p`` viewed as a Laurent polynomial in ``name``."""
    parts: dict = {}
    for mono, c in p.terms.items():
        e = dict(mono).get(name, 0)
        rest = tuple((s, x) for s, x in mono if s != name)
        parts.setdefault(e, {})[rest] = c
    return {e: Polynomial(t) for e, t in parts.items()}


def _witness(p: Polynomial, names: list) -> dict:
    if not names:
        return {}
    head, rest = names[0], names[1:]
    parts = _split(p, head)
    top = max(parts)
    w = _witness(parts[top], rest)
    univariate = p.substitute(w)
    span = max(parts) - min(parts)
    for v, _ in zip(_witness_values(), range(span + 1)):
        if univariate.evaluate({head: v}) != 0:
            w[head] = v
            return w
    raise AssertionError("no witness in grid; polynomial was zero")  # unreachable


def find_witness(p: Polynomial) -> dict:
    """Deterministic rational point at which a nonzero ``p`` does not vanish.

    Symbols are fixed one at a time: the leading coefficient in the current
    symbol is made nonzero recursively, after which a univariate polynomial of
    exponent span d is nonzero at one of d+1 distinct grid values.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no witness")
    names = sorted(p.symbols(), key=symbol_sort_key)
    w = _witness(p, names)
    return {s: w[s] for s in names}


# -- fundamental identity -----------------------------------------------------

def fi_residual(A, B, C, D, E, space: VariableSpace) -> ResidualReport:
    space.check(A, B, C, D, E)

    def br(x, y, z):
        return nambu_bracket(x, y, z, space)

    residual = (
        br(br(A, B, C), D, E)
        - br(br(A, D, E), B, C)
        - br(A, br(B, D, E), C)
        - br(A, B, br(C, D, E))
    )
    return ResidualReport.of(residual)


def fi_residual_closed_form(A, B, C, D, E, space: VariableSpace) -> Polynomial:
    """Double-sum epsilon contraction for lhs - rhs of the fundamental identity.

    Only first derivatives of A, B, C and mixed second derivatives of D, E
    enter; nested brackets are never formed.
    """
    space.check(A, B, C, D, E)
    n = space.n
    dofs = range(1, n + 1)
    gA = {a: gradient(A, space, a) for a in dofs}
    gB = {a: gradient(B, space, a) for a in dofs}
    gC = {a: gradient(C, space, a) for a in dofs}
    gD = {a: gradient(D, space, a) for a in dofs}
    gE = {a: gradient(E, space, a) for a in dofs}

    # P[b][r] = eps_rjk dD/dx^b_j dE/dx^b_k
    P = {}
    for b in dofs:
        row = [Polynomial.zero()] * 3
        for r, j, k, s in LEVI_CIVITA:
            t = gD[b][j] * gE[b][k]
            row[r] = row[r] + t if s > 0 else row[r] - t
        P[b] = row

    total = Polynomial.zero()
    for a in dofs:
        avars = space.dof_variables(a)
        for b in dofs:
            # Q[i][r] = d/dx^a_i P[b][r]
            Q = [[P[b][r].diff(avars[i]) for r in range(3)] for i in range(3)]
            for i, u, v, s in LEVI_CIVITA:
                for r in range(3):
                    if not Q[i][r]:
                        continue
                    # eps_{i mu nu} eps_{rho j k} dA^a_mu dB^a_nu dC^b_rho
                    t1 = gA[a][u] * gB[a][v] * gC[b][r]
                    # eps_{i nu rho} eps_{mu j k} dA^b_mu dB^a_nu dC^a_rho
                    t2 = gA[b][r] * gB[a][u] * gC[a][v]
                    # eps_{i rho mu} eps_{nu j k} dA^a_mu dB^b_nu dC^a_rho
                    t3 = gA[a][v] * gB[b][r] * gC[a][u]
                    contrib = (t1 + t2 + t3) * Q[i][r]
                    total = total + contrib if s > 0 else total - contrib
    return -total


# -- Jacobi identity ----------------------------------------------------------

def jacobi_residual(A, B, C, pms: PoissonMatrixSet) -> ResidualReport:
    pms.space.check(A, B, C)

    def br(x, y):
        return noncanonical_bracket(x, y, pms)

    residual = br(br(A, B), C) - br(br(A, C), B) - br(A, br(B, C))
    return ResidualReport.of(residual)


def jacobi_dof_term(A, B, C, pms: PoissonMatrixSet, alpha: int, beta: int) -> Polynomial:
    """{{A,B}^a,C}^b - {{A,C}^a,B}^b - {A,{B,C}^a}^b for one ordered DOF pair.

    Summing over all ordered pairs gives the full Jacobi residual; the diagonal
    terms a == b vanish individually.
    """
    def br(x, y, dof):
        return dof_noncanonical_bracket(x, y, pms, dof)

    return (
        br(br(A, B, alpha), C, beta)
        - br(br(A, C, alpha), B, beta)
        - br(A, br(B, C, alpha), beta)
    )


def _pair_half(A, B, C, pms: PoissonMatrixSet, a: int, b: int) -> Polynomial:
    space = pms.space
    Ja = pms.matrices[a - 1]
    Jb = pms.matrices[b - 1]
    bvars = space.dof_variables(b)
    gAa, gBa, gCa = (gradient(X, space, a) for X in (A, B, C))
    gAb, gBb, gCb = (gradient(X, space, b) for X in (A, B, C))
    out = Polynomial.zero()
    for i, j in itertools.product(range(3), repeat=2):
        if not Ja[i][j]:
            continue
        for k in range(3):
            dJ = Ja[i][j].diff(bvars[k])
            if not dJ:
                continue
            for l in range(3):
                if not Jb[k][l]:
                    continue
                bracket = (
                    gAa[i] * gBa[j] * gCb[l]
                    - gAa[i] * gBb[l] * gCa[j]
                    + gAb[l] * gBa[i] * gCa[j]
                )
                if bracket:
                    out = out + dJ * Jb[k][l] * bracket
    return out


def jacobi_pair_residual_closed_form(A, B, C, pms: PoissonMatrixSet, alpha: int, beta: int) -> Polynomial:
    """Closed-form (alpha, beta) + (beta, alpha) contribution to the Jacobi residual.

    Every term carries a derivative of J^alpha along DOF beta (or vice versa),
    so the result vanishes whenever the matrices are free of cross-DOF
    variables.
    """
    if alpha == beta:
        raise ValueError("closed-form pair residual needs two distinct degrees of freedom")
    n = pms.space.n
    if not (1 <= alpha <= n and 1 <= beta <= n):
        raise IndexError("degree-of-freedom index out of range")
    pms.space.check(A, B, C)
    return _pair_half(A, B, C, pms, alpha, beta) + _pair_half(A, B, C, pms, beta, alpha)


def jacobi_residual_closed_form(A, B, C, pms: PoissonMatrixSet) -> Polynomial:
    out = Polynomial.zero()
    for a, b in itertools.combinations(range(1, pms.space.n + 1), 2):
        out = out + jacobi_pair_residual_closed_form(A, B, C, pms, a, b)
    return out


# -- structural conditions ----------------------------------------------------

def check_decoupled(p: Polynomial, space: VariableSpace) -> bool:
    """True iff no monomial of ``p`` mixes variables from two different DOFs."""
    space.check(p)
    for mono in p.terms:
        dofs = {Symbol(s).dof for s, _ in mono if Symbol(s).is_variable}
        if len(dofs) > 1:
            return False
    return True


def check_poisson_condition(pms: PoissonMatrixSet) -> bool:
    """True iff every entry of J^a is free of the variables of every other DOF."""
    for a, J in enumerate(pms.matrices, start=1):
        own = {v.name for v in pms.space.dof_variables(a)}
        for row in J:
            for entry in row:
                if entry.variables() - own:
                    return False
    return True
