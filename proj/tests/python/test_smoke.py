"""End-to-end exercises of the Python bindings."""

import math

import numpy as np
import pytest

import dynsbm


def logit_vec(theta):
    theta = np.asarray(theta, dtype=float)
    return np.log(theta / (1.0 - theta)).reshape(-1, order="F")


@pytest.fixture(scope="module")
def generated():
    hp = dynsbm.isotropic_hyperparameters(2, 0.0, 0.0, 0.01)
    return dynsbm.generate(
        node_count=30,
        k=2,
        T=6,
        hp=hp,
        seed=11,
        membership_mode="static",
        p_stay=1.0,
    )


def test_generate_shapes(generated):
    snapshots, truth = generated
    assert len(snapshots) == 6
    assert snapshots.node_count == 30
    assert truth.psi.shape == (6, 4)
    assert len(truth.memberships) == 6
    first = snapshots[0]
    assert first.adjacency.shape == (30, 30)
    assert first.edge_count == int(first.adjacency.sum())
    assert np.all(np.diag(first.adjacency) == 0)


def test_generate_deterministic():
    hp = dynsbm.isotropic_hyperparameters(2, 0.0, 0.5, 0.02)
    a_snaps, a_truth = dynsbm.generate(
        node_count=12, k=2, T=3, hp=hp, seed=7,
        membership_mode="markov", p_stay=0.9,
    )
    b_snaps, b_truth = dynsbm.generate(
        node_count=12, k=2, T=3, hp=hp, seed=7,
        membership_mode="markov", p_stay=0.9,
    )
    assert np.array_equal(a_truth.psi, b_truth.psi)
    for t in range(3):
        assert np.array_equal(a_snaps[t].adjacency, b_snaps[t].adjacency)


def test_block_counts_and_likelihood(generated):
    snapshots, truth = generated
    classes = truth.memberships[0]
    stats = dynsbm.block_counts(snapshots[0], classes)
    assert stats.m.shape == (2, 2)
    assert stats.observed(0, 0)
    theta, filled = dynsbm.mle_theta(stats, 1e-4)
    assert not filled.any()
    ll = dynsbm.log_likelihood(stats, theta)
    assert ll < 0.0
    assert math.isfinite(ll)


def test_track_interval_order(generated):
    snapshots, truth = generated
    classes = truth.memberships[0]
    hp = dynsbm.isotropic_hyperparameters(2, 0.0, 1.0, 0.01)
    records = dynsbm.track_apriori(snapshots, classes, hp)
    assert len(records) == 6
    for rec in records:
        assert rec.posterior.kind == "posterior"
        assert np.all(rec.lower <= rec.theta)
        assert np.all(rec.theta <= rec.upper)
        assert math.isfinite(rec.innovation_norm)


def test_fit_recovers_planted_split():
    theta = [[0.75, 0.08], [0.08, 0.75]]
    hp_gen = dynsbm.make_hyperparameters(
        logit_vec(theta), np.zeros((4, 4)), np.zeros((4, 4))
    )
    snapshots, truth = dynsbm.generate(
        node_count=40, k=2, T=3, hp=hp_gen, seed=3,
        membership_mode="static", p_stay=1.0,
    )
    hp = dynsbm.isotropic_hyperparameters(2, 0.0, 1.0, 0.01)
    fits = dynsbm.fit_sequence(snapshots, hp, k=2, seed=1)
    assert len(fits) == 3
    for fit in fits:
        assert dynsbm.rand_index(fit.assignment, truth.memberships[0]) > 0.9
        assert fit.sweeps <= 50


def test_predict_and_roc(generated):
    snapshots, truth = generated
    classes = truth.memberships[0]
    hp = dynsbm.isotropic_hyperparameters(2, 0.0, 1.0, 0.01)
    records = dynsbm.track_apriori(snapshots, classes, hp)
    thetas = [rec.theta for rec in records[:-1]]
    run = dynsbm.predict_sequence(snapshots, thetas, [classes], 0.5, 0.5)
    assert [p.target_time for p in run.combined] == [2, 3, 4, 5, 6]
    assert 0.0 <= run.combined_eval.auc_pooled <= 1.0
    assert run.eta == 0.5

    scores = run.combined[0].scores
    roc = dynsbm.roc_curve(scores, snapshots[1])
    assert roc.points[0, 0] == math.inf
    assert roc.points[-1, 1] == 1.0 and roc.points[-1, 2] == 1.0
    assert 0.0 <= roc.auc <= 1.0


def test_error_translation(generated):
    snapshots, _ = generated
    with pytest.raises(ValueError):
        dynsbm.ClassAssignment([0, 0, 5], 2)
    degenerate = dynsbm.isotropic_hyperparameters(2, 0.0, 0.0, 0.0)
    with pytest.raises(dynsbm.NumericalError):
        dynsbm.fit_sequence(snapshots, degenerate, k=2, seed=1)
