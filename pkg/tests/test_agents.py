import itertools

import numpy as np
import pytest

from c2ctrust.agents import (
    THREAT_MODELS,
    BehaviorContext,
    Quality,
    Role,
    buyer_rating,
    seller_rating,
    service_quality,
    threat_model,
)

N, A, S = Role.NORMAL, Role.ATTACKER, Role.SPY
G, D = Quality.GOOD, Quality.DEFECTIVE


def ctx(tick, seed=0):
    return BehaviorContext(tick, 50, np.random.default_rng(seed))


def within_3_sigma(hits, trials, p):
    return abs(hits / trials - p) <= 3 * np.sqrt(p * (1 - p) / trials)


@pytest.mark.parametrize(
    "model,collusion,svc,rat",
    [
        ("A", False, {A: 1}, {A: 1}),
        ("B", True, {A: 1}, {A: 1}),
        ("C", True, {A: 0.5}, {A: 0}),
        ("D", True, {A: 1, S: 0}, {A: 0, S: 1}),
        ("E", True, {A: 0.5}, {A: 0.5}),
        ("F", True, {A: 1, S: 0}, {A: 0, S: 0.5}),
    ],
)
def test_threat_model_table(model, collusion, svc, rat):
    spec = threat_model(model)
    assert spec.collusion is collusion
    for role, p in svc.items():
        assert spec.service_prob(role) == p
    for role, p in rat.items():
        assert spec.rating_prob(role) == p
    assert spec.has_spies is (model in "DF")


def test_camouflage_parameters_independent():
    spec = threat_model("E", c=0.2, e=0.9)
    assert spec.service_prob(A) == pytest.approx(0.8)
    assert spec.rating_prob(A) == pytest.approx(0.1)
    assert threat_model("F", f=0.3).rating_prob(S) == pytest.approx(0.7)


def test_unknown_model():
    with pytest.raises(ValueError):
        threat_model("G")


class TestServiceQuality:
    def test_model_a_attacks_after_incubation(self):
        assert service_quality(A, N, ctx(60), threat_model("A")) is D

    def test_incubation_is_honest(self):
        assert service_quality(A, N, ctx(10), threat_model("A")) is G

    def test_normal_always_good(self):
        assert service_quality(N, A, ctx(90), threat_model("B")) is G

    def test_model_c_camouflage_rate(self):
        spec, c = threat_model("C", c=0.5), ctx(60, seed=1)
        hits = sum(service_quality(A, N, c, spec) is D for _ in range(10_000))
        assert abs(hits / 10_000 - 0.5) <= 0.03

    def test_colluders_serve_each_other(self):
        assert service_quality(A, S, ctx(60), threat_model("D")) is G
        # no collusion under A
        assert service_quality(A, A, ctx(60), threat_model("A")) is D


class TestBuyerRating:
    def test_normal_is_honest(self):
        assert buyer_rating(N, A, D, ctx(60), threat_model("A")) is False
        assert buyer_rating(N, A, G, ctx(60), threat_model("A")) is True

    def test_collusive_high_rating(self):
        assert buyer_rating(A, A, D, ctx(60), threat_model("B")) is True

    def test_spy_rating_attack(self):
        assert buyer_rating(S, N, G, ctx(60), threat_model("D")) is False

    def test_spy_honest_during_incubation(self):
        assert buyer_rating(S, N, G, ctx(49), threat_model("D")) is True

    def test_model_c_attackers_rate_truthfully(self):
        spec = threat_model("C")
        assert buyer_rating(A, N, G, ctx(70), spec) is True
        assert buyer_rating(A, N, D, ctx(70), spec) is False


class TestSellerRating:
    def test_punishes_unfair_complaint(self):
        assert seller_rating(N, S, G, False, ctx(60), threat_model("D")) is False

    def test_fair_complaint_accepted(self):
        assert seller_rating(N, N, D, False, ctx(60), threat_model("A")) is True

    def test_ally_buyer(self):
        assert seller_rating(A, A, G, True, ctx(60), threat_model("B")) is True

    def test_attacker_rating_attack_on_buyers(self):
        assert seller_rating(A, N, D, False, ctx(60), threat_model("B")) is False


@pytest.mark.parametrize("model", ["C", "E", "F"])
def test_attack_frequencies_calibrated(model):
    spec = threat_model(model)
    c = ctx(80, seed=7)
    trials = 10_000
    svc_role = A
    rat_role = S if spec.has_spies else A
    svc_p, rat_p = spec.service_prob(svc_role), spec.rating_prob(rat_role)
    svc = sum(service_quality(svc_role, N, c, spec) is D for _ in range(trials))
    rat = sum(buyer_rating(rat_role, N, G, c, spec) is False for _ in range(trials))
    assert within_3_sigma(svc, trials, svc_p)
    assert within_3_sigma(rat, trials, rat_p)


@pytest.mark.parametrize("model", "BCDEF")
def test_collusion_closure(model):
    spec = threat_model(model)
    c = ctx(75, seed=3)
    bad = [A, S] if spec.has_spies else [A]
    for seller, buyer in itertools.product(bad, bad):
        for _ in range(200):
            q = service_quality(seller, buyer, c, spec)
            assert q is G
            assert buyer_rating(buyer, seller, q, c, spec) is True
            assert seller_rating(seller, buyer, q, True, c, spec) is True


@pytest.mark.parametrize("model", THREAT_MODELS)
def test_incubation_matches_normal_behavior(model):
    spec = threat_model(model)
    for tick in (0, 25, 49):
        c = ctx(tick)
        for role in (A, S):
            for other in (N, A, S):
                assert service_quality(role, other, c, spec) == service_quality(N, other, c, spec)
                for q, rating in itertools.product((G, D), (True, False)):
                    assert buyer_rating(role, other, q, c, spec) == buyer_rating(N, other, q, c, spec)
                    assert seller_rating(role, other, q, rating, c, spec) == seller_rating(N, other, q, rating, c, spec)
