"""The semiclassical two-mode coupled oscillator as a Nambu system.

Variables per mode a: x1_a = <q_a>, x2_a = <p_a>, x3_a = <q_a^2>.  The
parameters are the masses ``m1, m2``, squared frequencies ``w1sq, w2sq`` and
the cubic coupling ``lambda``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bracket import FROM_G, FROM_H, NambuSystem, poisson_matrices
from .dynamics import NAMBU, PATHS, divergence, vector_field
from .expr import Polynomial, VariableSpace, parse
from .identity import check_decoupled, check_poisson_condition, fi_residual, jacobi_residual

PARAMETERS = ("m1", "m2", "w1sq", "w2sq", "lambda")

H_TEXT = "x2_1^2/(2*m1) + x2_2^2/(2*m2) + (m1*w1sq/2)*x3_1 + (m2*w2sq/2)*x3_2 + lambda*x1_1*x3_2"
G_TEXT = "x3_1 - x1_1^2 + x3_2 - x1_2^2"

DEFAULT_PARAMS = {
    "m1": Fraction(1), "m2": Fraction(1),
    "w1sq": Fraction(1), "w2sq": Fraction(1),
    "lambda": Fraction(1, 10),
}
# fluctuation x3 - x1^2 = 1/2 in each mode
DEFAULT_INITIAL = (1.0, 0.0, 1.5, 1.0, 0.0, 1.5)

# Semiclassical equations of motion, written out by hand in variable order.
EOM_TEXT = (
    "x2_1/m1",
    "-m1*w1sq*x1_1 - lambda*x3_2",
    "(2/m1)*x1_1*x2_1",
    "x2_2/m2",
    "-m2*w2sq*x1_2 - 2*lambda*x1_1*x1_2",
    "(2/m2)*x1_2*x2_2",
)

J_G_TEXT = (
    (("0", "1", "0"), ("-1", "0", "-2*x1_1"), ("0", "2*x1_1", "0")),
    (("0", "1", "0"), ("-1", "0", "-2*x1_2"), ("0", "2*x1_2", "0")),
)

J_H_TEXT = (
    (("0", "-m1*w1sq/2", "x2_1/m1"),
     ("m1*w1sq/2", "0", "-lambda*x3_2"),
     ("-x2_1/m1", "lambda*x3_2", "0")),
    (("0", "-m2*w2sq/2 - lambda*x1_1", "x2_2/m2"),
     ("m2*w2sq/2 + lambda*x1_1", "0", "0"),
     ("-x2_2/m2", "0", "0")),
)


@dataclass(frozen=True)
class SemiclassicalModel:
    params: tuple
    system: NambuSystem

    @property
    def space(self) -> VariableSpace:
        return self.system.space

    def p(self, text: str) -> Polynomial:
        return parse(text, self.space, {"H": self.system.H, "G": self.system.G})


def build_model() -> SemiclassicalModel:
    space = VariableSpace(2, PARAMETERS)
    system = NambuSystem(space, parse(H_TEXT, space), parse(G_TEXT, space))
    return SemiclassicalModel(space.parameters, system)


@dataclass(frozen=True)
class Fact:
    name: str
    passed: bool
    detail: str


def _matrices_equal(pms, expected_text, model) -> tuple:
    mismatches = []
    for a, (J, E) in enumerate(zip(pms.matrices, expected_text), start=1):
        for i in range(3):
            for j in range(3):
                want = model.p(E[i][j])
                if J[i][j] != want:
                    mismatches.append(f"J{a}[{i + 1}{j + 1}] = {J[i][j]}, expected {want}")
    return not mismatches, "; ".join(mismatches) or "all 18 entries match"


def verify_model(model: SemiclassicalModel | None = None) -> list:
    """Check the six structural facts of the model; failures are entries, not exceptions."""
    model = model or build_model()
    sys_ = model.system
    space = model.space
    facts = []

    expected = [model.p(t) for t in EOM_TEXT]
    bad = []
    for path in PATHS:
        vf = vector_field(sys_, path)
        for v, got, want in zip(space.variable_names, vf.components, expected):
            if got != want:
                bad.append(f"{path}: d{v}/dt = {got}, expected {want}")
    facts.append(Fact("equations of motion", not bad,
                      "; ".join(bad) or f"all 6 components match via {', '.join(PATHS)}"))

    ok, detail = _matrices_equal(poisson_matrices(sys_, FROM_G), J_G_TEXT, model)
    facts.append(Fact("Poisson matrices from G", ok, detail))
    ok, detail = _matrices_equal(poisson_matrices(sys_, FROM_H), J_H_TEXT, model)
    facts.append(Fact("Poisson matrices from H", ok, detail))

    r = fi_residual(model.p("x1_2"), model.p("x2_2"), model.p("x2_1"), sys_.H, sys_.G, space)
    want = model.p("lambda")
    facts.append(Fact("fundamental identity residual (x1_2, x2_2, x2_1; H, G)",
                      r.residual == want, f"residual = {r.residual}, expected {want}"))

    pms_g = poisson_matrices(sys_, FROM_G)
    r = jacobi_residual(model.p("x2_1"), model.p("x2_2"), sys_.H, pms_g)
    facts.append(Fact("Jacobi residual, from_G, (x2_1, x2_2, H)", r.is_zero,
                      f"residual = {r.residual}, condition holds: {check_poisson_condition(pms_g)}"))

    # With the H-form bracket {f, H}_H vanishes identically, so the violating
    # triple uses G, the generator of that representation.
    pms_h = poisson_matrices(sys_, FROM_H)
    r = jacobi_residual(model.p("x2_1"), model.p("x2_2"), sys_.G, pms_h)
    want = model.p("lambda*m1*w1sq*x1_2")
    facts.append(Fact("Jacobi residual, from_H, (x2_1, x2_2, G)", r.residual == want,
                      f"residual = {r.residual}, expected {want}, "
                      f"condition holds: {check_poisson_condition(pms_h)}"))
    return facts


def model_summary(model: SemiclassicalModel | None = None) -> dict:
    """Decoupling verdicts and Liouville divergence for the model."""
    model = model or build_model()
    sys_ = model.system
    return {
        "G_decoupled": check_decoupled(sys_.G, model.space),
        "H_decoupled": check_decoupled(sys_.H, model.space),
        "divergence": divergence(vector_field(sys_, NAMBU)),
    }
