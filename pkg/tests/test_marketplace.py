import numpy as np
import pytest
from scipy import stats

from c2ctrust.agents import BehaviorContext, Quality, Role, threat_model
from c2ctrust.marketplace import (
    TransactionRecord,
    execute_transaction,
    read_transactions,
    sample_weighted,
    select_seller,
    write_transactions,
)
from c2ctrust.network import Roster, TradeGraph
from c2ctrust.trust_core import RatingLedger

N, A = Role.NORMAL, Role.ATTACKER


def roster(roles):
    return Roster(list(roles), np.zeros(len(roles), dtype=bool))


def ctx(tick=60, seed=0):
    return BehaviorContext(tick, 50, np.random.default_rng(seed))


def draw(buyer, graph, t, r, spec, times=10_000, seed=0, bias=0.5):
    rng = np.random.default_rng(seed)
    c = ctx(seed=seed)
    return np.array([select_seller(buyer, graph, t, r, spec, c, rng, bias) for _ in range(times)])


def test_singleton_pool():
    assert sample_weighted(np.array([7]), np.zeros(10), np.random.default_rng(0)) == 7


def test_two_nodes_only_counterparty():
    g = TradeGraph(2, [{1}, {0}])
    picks = draw(0, g, np.array([0.5, 0.5]), roster([N, N]), threat_model("A"), times=50)
    assert set(picks) == {1}


def test_zero_trust_falls_back_to_uniform():
    g = TradeGraph(3, [{1, 2}, {0}, {0}])
    picks = draw(0, g, np.array([1.0, 0.0, 0.0]), roster([N] * 3), threat_model("A"))
    assert abs(np.mean(picks == 1) - 0.5) <= 0.02


def test_trust_weighted_pair():
    g = TradeGraph(3, [{1, 2}, {0}, {0}])
    picks = draw(0, g, np.array([0.6, 0.3, 0.1]), roster([N] * 3), threat_model("A"))
    # exact weight 0.3 / (0.3 + 0.1)
    assert abs(np.mean(picks == 1) - 0.75) <= 0.02


def test_three_candidate_chi_square():
    g = TradeGraph(4, [{1, 2, 3}, {0}, {0}, {0}])
    t = np.array([0.1, 0.2, 0.3, 0.4])
    picks = draw(0, g, t, roster([N] * 4), threat_model("A"))
    observed = np.bincount(picks, minlength=4)[1:]
    expected = t[1:] / t[1:].sum() * len(picks)
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_proven_and_unproven_pools_split_evenly():
    g = TradeGraph(3, [{1}, {0}, {0}])
    picks = draw(0, g, np.full(3, 1 / 3), roster([N] * 3), threat_model("A"))
    assert abs(np.mean(picks == 1) - 0.5) <= 0.02


def test_colluders_favor_allies():
    n = 12
    roles = [A if i < 3 else N for i in range(n)]
    g = TradeGraph(n, [{5, 6} for _ in range(n)])
    g.out_edges[5] = {6, 7}
    g.out_edges[6] = {5, 7}
    t = np.full(n, 1 / n)
    picks = draw(0, g, t, roster(roles), threat_model("B"), bias=0.5)
    # 0.5 direct ally picks plus the trust-weighted share of the one unproven ally-rich pool
    unproven_allies = 2 / (n - 1 - 2)
    expected = 0.5 + 0.5 * 0.5 * unproven_allies
    assert abs(np.mean(np.isin(picks, [1, 2])) - expected) <= 0.02


def test_no_ally_bias_without_collusion():
    n = 12
    roles = [A if i < 3 else N for i in range(n)]
    g = TradeGraph(n, [{5, 6} for _ in range(n)])
    picks = draw(0, g, np.full(n, 1 / n), roster(roles), threat_model("A"))
    assert np.mean(np.isin(picks, [1, 2])) < 0.2


def test_no_counterparty():
    with pytest.raises(ValueError, match="no counterparty"):
        select_seller(0, TradeGraph(1, [set()]), np.ones(1), roster([N]), threat_model("A"), ctx(), np.random.default_rng(0))


class TestExecute:
    def setup(self, roles, model):
        n = len(roles)
        return RatingLedger(n), TradeGraph.empty(n), roster(roles), threat_model(model)

    def test_honest_pair(self):
        ledger, g, r, spec = self.setup([N, N], "A")
        rec = execute_transaction(0, 1, ledger, g, r, spec, ctx())
        assert rec.quality is Quality.GOOD and rec.buyer_rating and rec.seller_rating
        assert ledger.s[0, 1] == 1 and ledger.s[1, 0] == 1
        assert g.out_edges[0] == {1}

    def test_model_a_fraud(self):
        ledger, g, r, spec = self.setup([N, A], "A")
        rec = execute_transaction(0, 1, ledger, g, r, spec, ctx(60))
        # the attacker seller also rating-attacks its buyer
        assert rec.quality is Quality.DEFECTIVE and rec.buyer_rating is False
        assert ledger.s[0, 1] == -1

    def test_allies(self):
        ledger, g, r, spec = self.setup([A, A], "B")
        rec = execute_transaction(0, 1, ledger, g, r, spec, ctx(60))
        assert rec.quality is Quality.GOOD and rec.buyer_rating and rec.seller_rating

    def test_two_entries_one_edge(self):
        ledger, g, r, spec = self.setup([N, N, N], "A")
        execute_transaction(0, 2, ledger, g, r, spec, ctx())
        execute_transaction(0, 2, ledger, g, r, spec, ctx())
        assert np.abs(ledger.s).sum() == 4
        assert g.edges() == [(0, 2)]

    def test_self_trade(self):
        ledger, g, r, spec = self.setup([N, N], "A")
        with pytest.raises(ValueError):
            execute_transaction(1, 1, ledger, g, r, spec, ctx())


def test_transaction_csv_round_trip(tmp_path):
    recs = [
        TransactionRecord(1, 0, 3, Quality.GOOD, True, True),
        TransactionRecord(2, 3, 1, Quality.DEFECTIVE, False, True),
    ]
    path = tmp_path / "transactions.csv"
    write_transactions(recs, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "tick,buyer,seller,quality,buyer_rating,seller_rating"
    assert lines[2] == "2,3,1,defective,False,True"
    assert read_transactions(path) == recs
