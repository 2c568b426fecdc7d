import numpy as np
import pytest

from chanwit import channels as chn
from chanwit import closedform as cf
from chanwit.games import Game, binary_discrimination, upper_bound
from chanwit.matcore import basis_vector, projector, random_unitary
from conftest import trine_povm


def attained(ch, game, res):
    return cf.average_payoff(ch, game, res.encoding, res.decoding)


def test_identity_examples():
    assert cf.utility_identity(np.eye(3) / 3, 2).value == pytest.approx(2 / 3, abs=1e-15)
    assert cf.utility_identity(np.diag([0.6, 0.4]), 2).value == pytest.approx(1.0)
    g = np.array([[0.2, 0.5, -1.0], [0.9, 0.1, 0.3]])
    assert cf.utility_identity(g, 3).value == pytest.approx(upper_bound(g))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_identity_strategy_attains(d, rng):
    g = rng.normal(size=(4, 3))
    res = cf.utility_identity(g, d)
    assert attained(chn.identity(d), g, res) == pytest.approx(res.value, abs=1e-12)


def test_unitary_strategy_attains(rng):
    u = random_unitary(3, rng)
    g = rng.normal(size=(4, 4))
    res = cf.utility_unitary(u, g)
    assert res.value == pytest.approx(cf.utility_identity(g, 3).value)
    assert attained(chn.unitary(u), g, res) == pytest.approx(res.value, abs=1e-12)


def test_dephasing_examples(rng):
    g = rng.normal(size=(3, 3))
    ident = cf.utility_identity(g, 2).value
    assert cf.utility_dephasing(0.0, g, 2).value == pytest.approx(ident)
    assert cf.utility_dephasing(1.0, g, 2).value == pytest.approx(ident)
    assert cf.utility_dephasing(0.37, np.diag([0.5, 0.5]), 2).value == pytest.approx(1.0)
    basis = random_unitary(2, rng)
    res = cf.utility_dephasing(0.37, g, 2, basis)
    assert attained(chn.dephasing(0.37, basis=basis), g, res) == pytest.approx(ident, abs=1e-12)


def test_trace_class_examples():
    res = cf.utility_trace_class([[0.6, 0.4], [0.2, 0.8]])
    assert res.value == pytest.approx(1.2) and res.info["answer"] == 1
    assert cf.utility_trace_class(np.diag([0.7, 0.3])).value == pytest.approx(0.7)
    assert cf.utility_trace_class(np.zeros((2, 2))).value == 0.0


def test_erasure_examples(rng):
    g = rng.normal(size=(3, 2))
    assert cf.utility_erasure(1.0, g, 2).value == pytest.approx(cf.utility_identity(g, 2).value)
    assert cf.utility_erasure(0.0, g, 2).value == pytest.approx(cf.utility_trace_class(g).value)
    res = cf.utility_erasure(0.5, np.diag([0.6, 0.4]), 2)
    assert res.value == pytest.approx(0.8)
    assert attained(chn.erasure(0.5, 2), np.diag([0.6, 0.4]), res) == pytest.approx(0.8, abs=1e-12)


def test_qc_trine():
    povm, vecs = trine_povm()
    res = cf.utility_qc(povm, np.eye(3))
    assert res.value == pytest.approx(2.0, abs=1e-9)
    # the optimal states are the trine states themselves
    for x in range(3):
        assert abs(abs(np.vdot(vecs[x], res.encoding[x] @ vecs[x])) - 1.0) < 1e-9
    assert attained(chn.qc(povm), np.eye(3), res) == pytest.approx(2.0, abs=1e-9)


def test_qc_computational_matches_identity(rng):
    povm = [projector(basis_vector(i, 3)) for i in range(3)]
    for _ in range(5):
        gd = rng.normal(size=4)
        assert cf.utility_qc(povm, np.diag(gd)).value == pytest.approx(cf.utility_identity(np.diag(gd), 3).value, abs=1e-12)


def test_qc_budget():
    povm = [np.eye(2) / 8] * 8
    with pytest.raises(cf.EnumerationBudgetError):
        cf.utility_qc(povm, np.eye(8), budget_log2=20)


def test_depolarizing_unbiased_examples(rng):
    g = np.array([[0.5, -0.5], [-0.5, 0.5]])
    assert cf.utility_depolarizing_unbiased(0.6, g, 2).value == pytest.approx(0.6)
    g = rng.normal(size=(3, 3))
    g -= g.mean(axis=0)
    assert cf.utility_depolarizing_unbiased(1.0, g, 2).value == pytest.approx(cf.utility_identity(g, 2).value)
    assert cf.utility_depolarizing_unbiased(0.0, g, 2).value == pytest.approx(0.0, abs=1e-12)


def test_depolarizing_equal_column_sums_and_scope():
    g = np.array([[0.5, -0.5], [-0.5, 0.5]]) + 0.25
    res = cf.utility_depolarizing_unbiased(0.6, g, 2)
    assert res.value == pytest.approx(0.6 * 1.0 + 0.5)
    with pytest.raises(cf.OutOfScopeError):
        cf.utility_depolarizing_unbiased(0.5, np.diag([0.6, 0.4]), 2)


def test_unitary_discrimination_examples():
    assert cf.utility_unitary_discrimination([0.5, 0.3, 0.2], 2).value == pytest.approx(0.8)
    assert cf.utility_unitary_discrimination([0.5, -0.2], 2).value == pytest.approx(0.5)
    assert cf.utility_unitary_discrimination([-0.5, -0.2, 0.0], 2).value == 0.0


@pytest.mark.parametrize("gd", [[0.5, 0.3, 0.2], [0.5, -0.2], [-0.5, -0.2, -0.1], [-1.0], [-0.3, -0.6]])
def test_unitary_discrimination_attains(gd):
    res = cf.utility_unitary_discrimination(gd, 2)
    assert attained(chn.identity(2), np.diag(gd), res) == pytest.approx(res.value, abs=1e-12)


def test_helstrom_examples():
    e0, e1 = projector(basis_vector(0, 2)), projector(basis_vector(1, 2))
    assert cf.helstrom(chn.identity(2), e0, e1, 0.6).value == pytest.approx(1.0)
    assert cf.helstrom(chn.identity(2), e0, e0, 0.3).value == pytest.approx(0.7)
    res = cf.utility_ampdamp_binary(0.5, 0.5)
    hel = cf.helstrom(chn.amplitude_damping(0.5), res.encoding[0], res.encoding[1], 0.5)
    assert hel.value == pytest.approx((1 + np.sqrt(0.5)) / 2, abs=1e-12)


def test_pauli_examples():
    for g0 in (0.0, 0.3, 0.5, 1.0):
        assert cf.utility_pauli_binary([1, 0, 0, 0], g0).value == pytest.approx(1.0)
    assert cf.utility_pauli_binary([0.7, 0.3, 0, 0], 0.5).value == pytest.approx(1.0)
    assert cf.utility_pauli_binary([0.25] * 4, 0.7).value == pytest.approx(0.7)


def test_ampdamp_examples():
    for eta in (0.0, 0.3, 0.5, 1.0):
        assert cf.utility_ampdamp_binary(eta, 0.5).value == pytest.approx((1 + np.sqrt(eta)) / 2, abs=1e-12)
        assert cf.utility_ampdamp_binary(eta, 1.0).value == pytest.approx(1.0, abs=1e-12)
    assert cf.utility_ampdamp_binary(0.5, 0.8).value == pytest.approx((1 + np.sqrt(0.68)) / 2, abs=1e-12)


def test_shifted_examples():
    sigma = np.diag([0.9, 0.1])
    for g0 in (0.5, 0.8, 1.0):
        assert cf.utility_shifted_depolarizing_binary(1.0, sigma, g0).value == pytest.approx(1.0)
    assert cf.utility_shifted_depolarizing_binary(0.5, sigma, 0.7).value == pytest.approx(0.83)
    assert cf.utility_shifted_depolarizing_binary(0.0, np.diag([1.0, 0.0]), 0.7).value == pytest.approx(0.7)
    res = cf.utility_shifted_depolarizing_binary(0.4, np.eye(2) / 2, 0.7)
    assert res.provenance == "depolarizing:binary"


def test_cloning_examples():
    assert cf.utility_cloning_binary(2, 0.5).value == pytest.approx(5 / 6, abs=1e-12)
    assert cf.utility_partialtrace_cloning_binary(2, 0.5).value == pytest.approx(5 / 6, abs=1e-12)
    for d in (2, 3, 4):
        assert cf.utility_cloning_binary(d, 1.0).value == pytest.approx(1.0)
        assert cf.utility_partialtrace_cloning_binary(d, 1.0).value == pytest.approx(1.0)
    assert cf.utility_cloning_binary(3, 0.5).value == pytest.approx(0.875)
    assert cf.utility_partialtrace_cloning_binary(3, 0.5).value == pytest.approx(0.8125)
    assert cf.utility_partialtrace_cloning_binary(4, 0.6).value == pytest.approx(0.82)
    for g0 in np.linspace(0, 1, 11):
        assert cf.utility_partialtrace_cloning_binary(2, g0).value == pytest.approx(max(g0, 1 - g0, 5 / 6))


def binary_results():
    rng = np.random.default_rng(3)
    out = []
    for g0 in (0.0, 0.2, 0.5, 0.77, 1.0):
        lam = rng.dirichlet(np.ones(4))
        out.append((chn.pauli(lam), cf.utility_pauli_binary(lam, g0), g0))
        eta = rng.uniform()
        out.append((chn.amplitude_damping(eta), cf.utility_ampdamp_binary(eta, g0), g0))
        s = np.diag(rng.dirichlet(np.ones(3)))
        out.append((chn.shifted_depolarizing(0.3, s), cf.utility_shifted_depolarizing_binary(0.3, s, g0), g0))
        out.append((chn.depolarizing(0.6, 3), cf.utility_depolarizing_binary(0.6, 3, g0), g0))
        out.append((chn.cloning_1to2(2), cf.utility_cloning_binary(2, g0), g0))
    return out


@pytest.mark.parametrize("ch,res,g0", binary_results())
def test_binary_invariants(ch, res, g0):
    game = binary_discrimination(g0)
    assert res.value <= upper_bound(game) + 1e-9
    assert res.value >= max(g0, 1 - g0) - 1e-12
    # the analytic encoding with Helstrom decoding attains the formula
    assert res.info["helstrom_value"] == pytest.approx(res.value, abs=1e-9)
    assert attained(ch, game, res) == pytest.approx(res.value, abs=1e-9)


def test_ampdamp_monotone_in_eta():
    etas = np.linspace(0, 1, 100)
    for g0 in (0.1, 0.5, 0.65, 0.9):
        vals = [cf.utility_ampdamp_binary(e, g0).value for e in etas]
        assert np.all(np.diff(vals) >= -1e-15)


def test_cloning_dominates_partial_trace():
    for d in (2, 3, 4, 5):
        for g0 in np.linspace(0, 1, 41):
            assert cf.utility_cloning_binary(d, g0).value >= cf.utility_partialtrace_cloning_binary(d, g0).value - 1e-15
    assert cf.utility_cloning_binary(2, 0.5).value == pytest.approx(cf.utility_partialtrace_cloning_binary(2, 0.5).value, abs=1e-12)


def test_cloning_covariance_invariance(rng):
    for d in (2, 3):
        ch = chn.cloning_1to2(d)
        e0, e1 = projector(basis_vector(0, d)), projector(basis_vector(1, d))
        base = cf.helstrom(ch, e0, e1, 0.7).value
        for _ in range(5):
            u = random_unitary(d, rng)
            rot = cf.helstrom(ch, u @ e0 @ u.conj().T, u @ e1 @ u.conj().T, 0.7).value
            assert rot == pytest.approx(base, abs=1e-9)


def test_closed_form_dispatch(rng):
    assert cf.closed_form(chn.identity(2), np.diag([0.5, 0.5])).value == pytest.approx(1.0)
    assert cf.closed_form(chn.pauli([0.25] * 4), binary_discrimination(0.7)).value == pytest.approx(0.7)
    assert cf.closed_form(chn.qc(trine_povm()[0]), np.eye(3)).value == pytest.approx(2.0)
    assert cf.closed_form(chn.Channel(2, 2, (np.eye(2),)), np.eye(2)) is None
    # binary-output games reduce to a discrimination game
    g = np.array([[0.4, 0.1], [0.0, 0.5], [0.3, 0.2]])
    ch = chn.amplitude_damping(0.4)
    res = cf.closed_form(ch, g)
    assert res.provenance.endswith("+reduction")
    assert attained(ch, g, res) == pytest.approx(res.value, abs=1e-9)
    assert cf.closed_form(ch, [[0.2, 0.2], [-0.1, -0.1]]).value == pytest.approx(0.1)


def test_result_json():
    out = cf.utility_ampdamp_binary(0.5, 0.5).to_json()
    assert out["value"] == pytest.approx((1 + np.sqrt(0.5)) / 2)
    assert out["provenance"] == "amplitude_damping:binary"


def test_game_object_accepted():
    assert cf.utility_identity(Game(np.eye(2)), 2).value == 2.0


def test_unitary_discrimination_forced_answer():
    assert cf.utility_unitary_discrimination([-1.0], 2).value == -1.0
    assert cf.utility_unitary_discrimination([-0.3, -0.6], 1).value == pytest.approx(-0.3)
    res = cf.utility_unitary_discrimination([-0.3, -0.6], 1)
    assert attained(chn.identity(1), np.diag([-0.3, -0.6]), res) == pytest.approx(-0.3)


def test_cloning_curves_meet_only_at_qubit_balanced_point_below_one():
    for d in (2, 3, 4):
        for g0 in np.linspace(0.5, 1.0, 101)[:-1]:
            gap = cf.utility_cloning_binary(d, g0).value - cf.utility_partialtrace_cloning_binary(d, g0).value
            assert (abs(gap) <= 1e-9) == (d == 2 and g0 == 0.5), (d, g0, gap)
        # both reach 1 at the fully unbalanced endpoint
        assert cf.utility_cloning_binary(d, 1.0).value == cf.utility_partialtrace_cloning_binary(d, 1.0).value == 1.0
