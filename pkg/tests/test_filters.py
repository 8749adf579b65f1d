import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdglmb.filters import (
    StepStats,
    TruncationConfig,
    dglmb_step,
    extract_estimates,
    is_injective,
    lmb_estimates,
    lmb_step,
    mdglmb_step,
    predict,
    predict_dglmb,
    truncate_hypotheses,
    update_single_sensor,
)
from mdglmb.gaussian import GaussianMixture
from mdglmb.models import BirthComponent, BirthModel, ClutterModel, MotionModel, SensorModel, ncv_matrices
from mdglmb.rfs import (
    DGlmbDensity,
    DGlmbHypothesis,
    Label,
    LmbParams,
    LmbTrack,
    MdGlmbDensity,
    MdGlmbHypothesis,
    expected_cardinality,
    extract_lmb,
    glmb_from_lmb,
    marginalize,
)
from oracles import kalman_oracle_like, random_linear_problem, update_weights_brute

EXACT = TruncationConfig.exact()
H = np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 0]])
a, b = Label(0, 1), Label(0, 2)
seeds = st.integers(0, 2**32 - 1)


def gm(x, y, s=1.0):
    return GaussianMixture.single(np.array([x, 0.0, y, 0.0]), np.eye(4) * s)


def md(*pairs):
    return MdGlmbDensity(tuple(MdGlmbHypothesis(ls, w, d) for ls, w, d in pairs))


def static_motion(P_S=1.0):
    return MotionModel(np.eye(4), np.zeros((4, 4)), P_S)


def weights(d):
    return {h.labels: h.weight for h in d.hypotheses}


def linear_sensor(P_D=0.85, rate=2.0):
    return SensorModel.linear(H, [1.0, 1.0], P_D, ClutterModel(rate, [[-10, 10], [-10, 10]]))


# --------------------------------------------------------------------------
# prediction


def test_predict_identity_dynamics():
    prior = md(((a,), 0.7, {a: gm(1, 2)}), ((), 0.3, {}))
    out = predict(prior, static_motion(), BirthModel(), EXACT, scan=1)
    assert weights(out) == pytest.approx(weights(prior))
    assert np.allclose(out.by_labels()[(a,)].densities[a].means, gm(1, 2).means)


def test_predict_single_birth_from_empty_prior():
    birth = BirthModel((BirthComponent(1, 0.09, gm(0, 0)),))
    out = predict(MdGlmbDensity.empty(), static_motion(), birth, EXACT, scan=4)
    assert weights(out) == pytest.approx({(): 0.91, (Label(4, 1),): 0.09})


def test_predict_survival_two_subsets():
    F, Q = ncv_matrices(5.0, 5.0)
    prior = md(((a,), 1.0, {a: gm(0, 0)}))
    out = predict(prior, MotionModel(F, Q, 0.9), BirthModel(), EXACT, scan=1)
    assert weights(out) == pytest.approx({(a,): 0.9, (): 0.1})
    dens = out.by_labels()[(a,)].densities[a]
    assert np.allclose(dens.covs[0], F @ np.eye(4) @ F.T + Q)


def test_predict_truncated_equals_top_of_exhaustive():
    birth = BirthModel(tuple(BirthComponent(i + 1, 0.2 + 0.1 * i, gm(i, i)) for i in range(4)))
    prior = DGlmbDensity.from_mdglmb(md(((a,), 0.6, {a: gm(0, 0)}), ((b,), 0.4, {b: gm(3, 3)})))
    motion = static_motion(0.8)
    full = predict_dglmb(prior, motion, birth, EXACT, scan=2)
    part = predict_dglmb(prior, motion, birth, TruncationConfig(12, 0.0, None, None, 0.0, None), scan=2)
    assert len(full) == 2 * 2**5
    top = sorted(full.hypotheses, key=lambda h: -h.weight)[:12]
    total = math.fsum(h.weight for h in top)
    assert {(h.labels, h.history_id) for h in part.hypotheses} == {(h.labels, h.history_id) for h in top}
    got = {(h.labels, h.history_id): h.weight for h in part.hypotheses}
    for h in top:
        assert got[(h.labels, h.history_id)] == pytest.approx(h.weight / total, rel=1e-12)


def test_labels_preserved_and_births_stamped():
    birth = BirthModel((BirthComponent(3, 0.5, gm(0, 0)),))
    prior = md(((a,), 1.0, {a: gm(0, 0)}))
    out = predict(prior, static_motion(0.95), birth, EXACT, scan=9)
    for h in out.hypotheses:
        assert set(h.labels) <= {a, Label(9, 3)}


# --------------------------------------------------------------------------
# update


def test_update_no_measurements_miss_factor():
    pred = md(((), 0.2, {}), ((a,), 0.5, {a: gm(0, 0)}), ((a, b), 0.3, {a: gm(0, 0), b: gm(5, 5)}))
    post = marginalize(update_single_sensor(pred, linear_sensor(0.85), np.zeros((0, 2)), EXACT))
    raw = {(): 0.2, (a,): 0.5 * 0.15, (a, b): 0.3 * 0.15**2}
    tot = sum(raw.values())
    assert weights(post) == pytest.approx({k: v / tot for k, v in raw.items()}, rel=1e-12)


def test_update_zero_detection_probability_is_identity():
    pred = md(((), 0.4, {}), ((a,), 0.6, {a: gm(0, 0)}))
    Z = np.array([[0.5, 0.1], [3.0, -2.0]])
    post = update_single_sensor(pred, linear_sensor(0.0), Z, EXACT)
    assert weights(marginalize(post)) == pytest.approx(weights(pred))
    assert all(h.association == (0,) * len(h.labels) for h in post.hypotheses)


def test_update_one_label_two_maps():
    P_D, rate = 0.8, 2.0
    sensor = linear_sensor(P_D, rate)
    pred = md(((a,), 1.0, {a: gm(1, -1, 2.0)}))
    z = np.array([1.5, -0.5])
    post = update_single_sensor(pred, sensor, z[None, :], EXACT)
    got = {h.association: h.weight for h in post.hypotheses}
    S = 2.0 * np.eye(2) + np.eye(2)
    nu = z - np.array([1.0, -1.0])
    g = math.exp(-0.5 * nu @ np.linalg.solve(S, nu)) / math.sqrt(np.linalg.det(2 * math.pi * S))
    kappa = rate / 400.0
    miss, det = 1 - P_D, P_D * g / kappa
    assert got[(0,)] == pytest.approx(miss / (miss + det), abs=1e-9)
    assert got[(1,)] == pytest.approx(det / (miss + det), abs=1e-9)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_update_matches_exhaustive_enumeration(seed):
    pred, sensor, Z = random_linear_problem(np.random.default_rng(seed))
    post = update_single_sensor(pred, sensor, Z, EXACT)
    kappa = sensor.clutter.rate / sensor.clutter.volume
    ref = update_weights_brute(pred, sensor.H, sensor.R, sensor.detection_probability, kappa, Z)
    got = {(h.labels, h.association): h.weight for h in post.hypotheses}
    assert set(got) == set(ref)
    for k in ref:
        assert got[k] == pytest.approx(ref[k], abs=1e-9)
    assert all(is_injective(dict(zip(h.labels, h.association))) for h in post.hypotheses)


def test_update_posterior_density_is_kalman():
    sensor = linear_sensor(0.9, 1.0)
    prior = gm(0, 0, 4.0)
    z = np.array([1.0, 2.0])
    post = update_single_sensor(md(((a,), 1.0, {a: prior})), sensor, z[None, :], EXACT)
    det = next(h for h in post.hypotheses if h.association == (1,))
    m, P = kalman_oracle_like(prior.means[0], prior.covs[0], H, sensor.R, z)
    assert np.allclose(det.densities[a].means[0], m, atol=1e-8)
    assert np.allclose(det.densities[a].covs[0], P, atol=1e-8)


# --------------------------------------------------------------------------
# full steps


def random_prior(rng):
    pred, sensor, Z = random_linear_problem(rng)
    return pred, sensor, Z


def test_mdglmb_step_without_sensors_equals_predict():
    rng = np.random.default_rng(0)
    prior, _, _ = random_prior(rng)
    birth = BirthModel((BirthComponent(1, 0.1, gm(0, 0)),))
    motion = MotionModel(*ncv_matrices(1.0, 1.0), 0.95)
    step = mdglmb_step(prior, motion, birth, [], EXACT, scan=1)
    pred = predict(prior, motion, birth, EXACT, scan=1)
    assert weights(step) == pytest.approx(weights(pred), rel=1e-12)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_mdglmb_step_is_marginalized_dglmb_step(seed):
    rng = np.random.default_rng(seed)
    prior, sensor, Z = random_prior(rng)
    birth = BirthModel((BirthComponent(1, 0.1, gm(0, 0)),))
    motion = MotionModel(*ncv_matrices(1.0, 1.0), 0.95)
    m = mdglmb_step(prior, motion, birth, [(sensor, Z)], EXACT, scan=1)
    d = dglmb_step(DGlmbDensity.from_mdglmb(prior), motion, birth, [(sensor, Z)], EXACT, scan=1)
    got, ref = weights(marginalize(d)), weights(m)
    assert set(got) == set(ref)
    for k in ref:
        assert got[k] == pytest.approx(ref[k], abs=1e-9)


def test_two_identical_sensors_equal_sequential_application():
    rng = np.random.default_rng(5)
    prior, sensor, Z = random_prior(rng)
    motion = static_motion(0.99)
    both = mdglmb_step(prior, motion, BirthModel(), [(sensor, Z), (sensor, Z)], EXACT, scan=1)
    once = mdglmb_step(prior, motion, BirthModel(), [(sensor, Z)], EXACT, scan=1)
    again = mdglmb_step(once, static_motion(1.0), BirthModel(), [(sensor, Z)], EXACT, scan=2)
    assert weights(both) == pytest.approx(weights(again), abs=1e-9)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_update_never_grows_hypothesis_count(seed):
    rng = np.random.default_rng(seed)
    prior, sensor, Z = random_prior(rng)
    birth = BirthModel((BirthComponent(1, 0.2, gm(0, 0)), BirthComponent(2, 0.3, gm(4, 4))))
    motion = MotionModel(*ncv_matrices(1.0, 1.0), 0.95)
    for trunc in (EXACT, TruncationConfig(max_hypotheses=5)):
        stats = StepStats()
        mdglmb_step(prior, motion, birth, [(sensor, Z), (sensor, Z[::-1])], trunc, scan=1, stats=stats)
        assert stats.n_final <= stats.n_predicted


def test_dglmb_step_identity():
    prior = DGlmbDensity.from_mdglmb(md(((a,), 0.6, {a: gm(0, 0)}), ((), 0.4, {})))
    out = dglmb_step(prior, static_motion(), BirthModel(), [(linear_sensor(0.0), np.zeros((0, 2)))], EXACT, 1)
    assert weights(marginalize(out)) == pytest.approx({(a,): 0.6, (): 0.4})


def test_dglmb_hypothesis_count_accounting():
    rng = np.random.default_rng(8)
    prior, sensor, Z = random_prior(rng)
    k = 2
    trunc = TruncationConfig(max_hypotheses=None, k_best_per_hypothesis=k, gate_probability=None, mixture=None)
    stats = StepStats()
    dglmb_step(DGlmbDensity.from_mdglmb(prior), static_motion(0.9), BirthModel(), [(sensor, Z)], trunc, 1, stats)
    assert stats.n_updated[0] <= stats.n_predicted * k


def test_lmb_step_identity():
    lmb = LmbParams((LmbTrack(a, 0.7, gm(1, 1)),))
    out = lmb_step(lmb, static_motion(), BirthModel(), [], EXACT, scan=1)
    assert out.existence() == {a: 0.7}


def test_lmb_step_perfect_measurement_kalman():
    sensor = SensorModel.linear(H, [1.0, 1.0], 1.0, ClutterModel(0.0, [[-10, 10], [-10, 10]]))
    prior = gm(0, 0, 3.0)
    z = np.array([0.5, -0.5])
    out = lmb_step(LmbParams((LmbTrack(a, 1.0, prior),)), static_motion(), BirthModel(), [(sensor, z[None])], EXACT, 1)
    t = out.tracks[0]
    assert t.existence == pytest.approx(1.0)
    m, P = kalman_oracle_like(prior.means[0], prior.covs[0], H, sensor.R, z)
    assert np.allclose(t.density.means[0], m, atol=1e-8)
    assert np.allclose(t.density.covs[0], P, atol=1e-8)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_lmb_existence_sum_matches_intermediate_glmb(seed):
    rng = np.random.default_rng(seed)
    pred, sensor, Z = random_prior(rng)
    lmb = extract_lmb(pred)
    post = update_single_sensor(glmb_from_lmb(lmb, None), sensor, Z, EXACT)
    r = extract_lmb(post).existence()
    assert math.fsum(r.values()) == pytest.approx(expected_cardinality(post), abs=1e-9)


# --------------------------------------------------------------------------
# estimation and truncation


def test_extract_estimates_examples():
    assert extract_estimates(MdGlmbDensity.empty()) == []
    est = extract_estimates(md(((), 0.3, {}), ((a,), 0.7, {a: gm(2, 3)})))
    assert [l for l, _ in est] == [a]
    assert np.allclose(est[0][1], [2, 0, 3, 0])
    assert extract_estimates(md(((), 0.5, {}), ((a,), 0.5, {a: gm(2, 3)}))) == []


def test_lmb_estimates_map_cardinality():
    lmb = LmbParams((LmbTrack(a, 0.9, gm(0, 0)), LmbTrack(b, 0.2, gm(1, 1))))
    assert [l for l, _ in lmb_estimates(lmb)] == [a]


def test_truncate_examples():
    d = md(((), 0.6, {}), ((a,), 0.3, {a: gm(0, 0)}), ((b,), 0.1, {b: gm(0, 0)}))
    same = truncate_hypotheses(d, TruncationConfig(max_hypotheses=10**6, hypothesis_weight_floor=0.0))
    assert weights(same) == pytest.approx(weights(d))
    top2 = truncate_hypotheses(d, TruncationConfig(max_hypotheses=2, hypothesis_weight_floor=0.0))
    assert weights(top2) == pytest.approx({(): 2 / 3, (a,): 1 / 3})
    best = truncate_hypotheses(d, TruncationConfig(max_hypotheses=5, hypothesis_weight_floor=0.9))
    assert weights(best) == {(): 1.0}


def test_truncate_keeps_label_set_spread():
    # 30 near-equal histories of {a} outrank every history of {b} one by one
    hyps = [DGlmbHypothesis(((a,)), i, 0.95 / 30, {a: gm(0, 0)}) for i in range(30)]
    hyps += [DGlmbHypothesis((b,), 30 + i, 0.025, {b: gm(1, 1)}) for i in range(2)]
    d = DGlmbDensity(tuple(hyps))
    out = truncate_hypotheses(d, TruncationConfig(max_hypotheses=20, hypothesis_weight_floor=0.0))
    sets = [h.labels for h in out.hypotheses]
    assert len(out) == 20
    assert sets.count((b,)) == 1 and sets.count((a,)) == 19


@given(seeds, st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_truncate_one_history_per_set_is_plain_top_n(seed, cap):
    rng = np.random.default_rng(seed)
    subsets = [(), (a,), (b,), (a, b)]
    w = rng.random(4) + 1e-3
    w[rng.random(4) < 0.3] = w[0]  # ties are broken by label-set order
    d = md(*[(ls, wi, {l: gm(0, 0) for l in ls}) for ls, wi in zip(subsets, w / w.sum())])
    out = truncate_hypotheses(d, TruncationConfig(max_hypotheses=cap, hypothesis_weight_floor=0.0))
    ref = sorted(d.hypotheses, key=lambda h: (-h.weight, h.labels))[:cap]
    assert [h.labels for h in out.hypotheses] == [h.labels for h in ref]


def test_dglmb_predict_keeps_deaths_with_flat_histories():
    prior = DGlmbDensity(tuple(DGlmbHypothesis((a,), i, 0.02, {a: gm(i, 0)}) for i in range(50)))
    trunc = TruncationConfig(max_hypotheses=50, hypothesis_weight_floor=0.0)
    out = predict_dglmb(prior, static_motion(0.95), BirthModel(()), trunc, scan=1)
    # every single death variant (0.02 * 0.05) ranks below all 50 survivors
    sets = [h.labels for h in out.hypotheses]
    assert () in sets and len(out) <= 50
    w = weights_by_set(out)
    assert w[()] == pytest.approx(0.05, rel=0.05)


def weights_by_set(d):
    out: dict = {}
    for h in d.hypotheses:
        out[h.labels] = out.get(h.labels, 0.0) + h.weight
    return out


def test_truncation_budget_rule():
    t = TruncationConfig(max_hypotheses=300)
    assert t.budget(0.5) == 150
    assert t.budget(1e-9) == 1
    assert TruncationConfig(max_hypotheses=None).budget(0.5) is None
