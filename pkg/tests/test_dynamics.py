import io
import math

import numpy as np
import pytest

from conftest import random_polys
from nambukit.bracket import NambuSystem
from nambukit.dynamics import (
    FROM_G,
    FROM_H,
    NAMBU,
    IntegrationError,
    IntegratorConfig,
    VectorField,
    compile_polynomials,
    conservation_drift,
    divergence,
    fluctuation,
    integrate,
    read_trajectory_csv,
    vector_field,
    write_trajectory_csv,
)
from nambukit.expr import Polynomial, VariableSpace, parse
from nambukit.models import DEFAULT_INITIAL, DEFAULT_PARAMS

ONE = VariableSpace(1)
PARAMS = {k: float(v) for k, v in DEFAULT_PARAMS.items()}


def free_params(lam=0.0):
    return {**PARAMS, "lambda": lam}


def test_model_field_components(model):
    vf = vector_field(model.system)
    assert vf.components[2] == model.p("(2/m1)*x1_1*x2_1")
    assert vf.components[3] == model.p("x2_2/m2")


def test_single_dof_closure():
    sys_ = NambuSystem(ONE, parse("x2_1^2/2 + x3_1", ONE), parse("x3_1 - x1_1^2", ONE))
    vf = vector_field(sys_)
    assert vf.components[0] == parse("x2_1", ONE)
    assert vf.components[1] == parse("-2*x1_1", ONE)


def test_three_paths_agree_random(rng):
    sp = VariableSpace(2)
    for _ in range(20):
        H, G = random_polys(rng, sp, 2)
        sys_ = NambuSystem(sp, H, G)
        fields = [vector_field(sys_, p).components for p in (NAMBU, FROM_G, FROM_H)]
        assert fields[0] == fields[1] == fields[2]
        assert divergence(vector_field(sys_)).is_zero()


def test_hamiltonians_are_stationary(rng):
    from nambukit.bracket import nambu_bracket

    sp = VariableSpace(2)
    for _ in range(10):
        H, G = random_polys(rng, sp, 2)
        assert nambu_bracket(H, H, G, sp).is_zero()


def test_divergence_examples(model):
    for path in (NAMBU, FROM_G, FROM_H):
        assert divergence(vector_field(model.system, path)).is_zero()
    x1 = Polynomial.symbol("x1_1")
    hand = VectorField(ONE, (x1, Polynomial.zero(), Polynomial.zero()))
    assert divergence(hand) == 1


def test_unknown_path(model):
    with pytest.raises(ValueError):
        vector_field(model.system, "canonical")


def test_harmonic_limit_matches_cosine(model):
    steps = 6283
    dt = 2 * math.pi / steps
    traj = integrate(vector_field(model.system), (1, 0, 1, 0, 0, 0), IntegratorConfig(dt, steps), free_params())
    assert traj.times[-1] == pytest.approx(2 * math.pi, abs=1e-12)
    assert abs(traj.states[-1, 0] - 1.0) <= 1e-8
    assert abs(traj.states[-1, 1]) <= 1e-8


def test_zero_state_is_fixed_point(model):
    traj = integrate(vector_field(model.system), [0.0] * 6, IntegratorConfig(0.01, 500), free_params(0.7))
    assert not traj.states.any()


def test_integration_is_deterministic(model):
    vf = vector_field(model.system)
    cfg = IntegratorConfig(1e-2, 2000)
    a = integrate(vf, DEFAULT_INITIAL, cfg, PARAMS)
    b = integrate(vf, DEFAULT_INITIAL, cfg, PARAMS)
    assert np.array_equal(a.states, b.states)
    assert a.states.tobytes() == b.states.tobytes()


def test_trajectory_shape_and_channels(model):
    traj = integrate(vector_field(model.system), DEFAULT_INITIAL, IntegratorConfig(1e-2, 10), PARAMS)
    assert traj.states.shape == (11, 6)
    assert np.allclose(np.diff(traj.times), 1e-2)
    assert list(traj.diagnostics) == ["H_drift", "G_drift", "fluct_1", "fluct_2"]
    assert traj.diagnostics["fluct_1"][0] == 0.5


def test_zero_steps(model):
    traj = integrate(vector_field(model.system), DEFAULT_INITIAL, IntegratorConfig(1e-3, 0), PARAMS)
    assert traj.states.shape == (1, 6)


def test_blow_up_reports_step():
    sys_ = NambuSystem(ONE, parse("x2_1^2/2 - x1_1^3", ONE), parse("x3_1", ONE))
    with pytest.raises(IntegrationError) as info:
        integrate(vector_field(sys_), (1, 1, 0), IntegratorConfig(0.05, 10_000), {})
    assert 0 < info.value.step < 10_000


def test_bad_inputs(model):
    vf = vector_field(model.system)
    with pytest.raises(ValueError):
        integrate(vf, (1, 2), IntegratorConfig(1e-3, 1), PARAMS)
    with pytest.raises(KeyError):
        integrate(vf, DEFAULT_INITIAL, IntegratorConfig(1e-3, 1), {"m1": 1.0})
    with pytest.raises(ValueError):
        IntegratorConfig(0.0, 10)
    with pytest.raises(ValueError):
        IntegratorConfig(1e-3, -1)


def test_conservation_drift_quantities(model):
    traj = integrate(vector_field(model.system), DEFAULT_INITIAL, IntegratorConfig(1e-2, 3000), PARAMS)
    assert conservation_drift(traj, model.system.H, PARAMS) < 1e-7
    assert conservation_drift(traj, model.system.G, PARAMS) < 1e-7
    assert conservation_drift(traj, fluctuation(model.space, 2), PARAMS) < 1e-7
    assert conservation_drift(traj, model.p("x1_1"), PARAMS) > 0.5


def _endpoint_error(model, dt, t_end=10.0):
    steps = round(t_end / dt)
    traj = integrate(vector_field(model.system), (1, 0, 1, 0, 0, 0), IntegratorConfig(dt, steps), free_params())
    return abs(traj.states[-1, 0] - math.cos(steps * dt))


def test_rk4_order(model):
    ratio = _endpoint_error(model, 0.1) / _endpoint_error(model, 0.05)
    assert 12 <= ratio <= 20


def _fd_bracket(funcs, state, n, h=1e-5):
    """Sum over DOFs of 3x3 Jacobian determinants from central differences."""
    total = 0.0
    for a in range(n):
        rows = []
        for f in funcs:
            row = []
            for i in range(3):
                idx = 3 * a + i
                up, dn = list(state), list(state)
                up[idx] += h
                dn[idx] -= h
                row.append((f(up) - f(dn)) / (2 * h))
            rows.append(row)
        total += float(np.linalg.det(np.array(rows)))
    return total


def test_finite_difference_oracle(model):
    rng = np.random.default_rng(7)
    params = PARAMS
    Hf = compile_polynomials([model.system.H], model.space, params)
    Gf = compile_polynomials([model.system.G], model.space, params)
    field = compile_polynomials(vector_field(model.system).components, model.space, params)
    for _ in range(5):
        state = rng.uniform(-2, 2, 6).tolist()
        exact = field(state)
        for v in range(6):
            coord = lambda s, v=v: s[v]
            fd = _fd_bracket([coord, lambda s: Hf(s)[0], lambda s: Gf(s)[0]], state, 2)
            assert abs(fd - exact[v]) <= 1e-6 * max(abs(exact[v]), abs(fd), 1.0)


def test_csv_roundtrip(model):
    traj = integrate(vector_field(model.system), DEFAULT_INITIAL, IntegratorConfig(1e-2, 50), PARAMS)
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    first = buf.getvalue().splitlines()[0]
    assert first == "t,x1_1,x2_1,x3_1,x1_2,x2_2,x3_2,H_drift,G_drift,fluct_1,fluct_2"
    buf.seek(0)
    header, table = read_trajectory_csv(buf)
    assert table.shape == (51, 11)
    assert np.array_equal(table[:, 1:7], traj.states)
    assert np.array_equal(table[:, 0], traj.times)
