#include <doctest.h>

#include <set>
#include <unordered_set>

#include "detpomdp/filtering.hpp"
#include "detpomdp/model.hpp"
#include "detpomdp/reachability.hpp"
#include "test_util.hpp"

using namespace detpomdp;

namespace {

Belief tb3_b0() { return make_belief({{0, Rational(1, 2)}, {1, Rational(1, 2)}}, 3); }

std::set<std::vector<StateIndex>> support_sets(const ReachLayers& r,
                                               const std::vector<BeliefId>& ids) {
    std::set<std::vector<StateIndex>> out;
    for (BeliefId id : ids) {
        std::vector<StateIndex> s;
        for (const auto& [p, w] : r.store[id].entries()) s.push_back(p.v);
        out.insert(s);
    }
    return out;
}

}  // namespace

TEST_CASE("depth zero is the singleton initial layer") {
    DetPomdpModel m = gen_tight_bound(3);
    ReachLayers r = reachable_layers(m, tb3_b0(), 0);
    REQUIRE(r.layers.size() == 1);
    CHECK(r.layers[0].size() == 1);
    CHECK(r.store[r.layers[0][0]] == tb3_b0());
}

TEST_CASE("bound-attaining instance reaches exactly seven beliefs") {
    DetPomdpModel m = gen_tight_bound(3);
    m.horizon = 8;  // stationary tables; deeper enumeration per the worked example
    ReachLayers r = reachable_layers(m, tb3_b0(), 8);
    auto u = reachable_union(r, 1, 8);
    CHECK(u.size() == 7);

    const StateIndex kCem = ExtendedState::kCemeteryValue;
    std::set<std::vector<StateIndex>> expected = {
        {0, 1}, {1, 2}, {0, 2}, {2}, {0}, {1}, {kCem},
    };
    CHECK(support_sets(r, u) == expected);
    CHECK(r.cemetery_reached());
}

TEST_CASE("union ranges are validated and monotone") {
    DetPomdpModel m = gen_tight_bound(3);
    ReachLayers r = reachable_layers(m, tb3_b0(), m.horizon);
    CHECK_THROWS_AS(reachable_union(r, 0, 0), ContractViolation);
    CHECK_THROWS_AS(reachable_union(r, 3, 2), ContractViolation);
    auto u1T = reachable_union(r, 1, m.horizon);
    auto u0T = reachable_union(r, 0, m.horizon);
    std::unordered_set<BeliefId> big(u0T.begin(), u0T.end());
    for (BeliefId id : u1T) CHECK(big.count(id) == 1);
}

TEST_CASE("belief cap aborts loudly") {
    DetPomdpModel m = gen_tight_bound(3);
    CHECK_THROWS_AS(reachable_layers(m, tb3_b0(), m.horizon, {.cap = 3}), CapExceeded);
}

TEST_CASE("closure depth zero keeps the distinct step mappings") {
    DetPomdpModel m = gen_tight_bound(3);
    MappingClosure c = mapping_closure(m);
    // Four (u,o) tables, all distinct on this instance.
    CHECK(c.depths[0].size() == 4);
    CHECK(c.reached_fixpoint);

    // Identity dynamics with one observation: the closure is the identity.
    DetPomdpModel idm;
    idm.horizon = 4;
    idm.stationary = true;
    idm.states = {"a", "b"};
    idm.controls = {"u"};
    idm.observations = {"o"};
    idm.dynamics = {{{0}, {1}}};
    idm.obs0 = {0, 0};
    idm.obs = {{{0}, {0}}};
    idm.cost = {{{ExtendedValue::zero()}, {ExtendedValue::zero()}}};
    idm.final_cost = {ExtendedValue::zero(), ExtendedValue::zero()};
    idm.admissible = {{{0}, {0}}};
    MappingClosure ci = mapping_closure(idm);
    CHECK(ci.size() == 1);
    for (const auto& ids : ci.depths) {
        REQUIRE(ids.size() == 1);
        CHECK(ids[0] == 0);
    }
}

TEST_CASE("closure cap aborts loudly") {
    DetPomdpModel m = gen_random(4, {.nx = 5, .nu = 3, .no = 3, .horizon = 6});
    MappingClosureOptions opts;
    opts.cap = 2;
    CHECK_THROWS_AS(mapping_closure(m, -1, opts), CapExceeded);
}

TEST_CASE("closure provenance replays to the stored table") {
    DetPomdpModel m = gen_tight_bound(4);
    MappingClosure c = mapping_closure(m);
    for (std::size_t id = 0; id < c.size(); ++id) {
        StepMapping g = c.replay(m, id);
        for (std::size_t i = 0; i < c.domain.size(); ++i) {
            ExtendedState y = g.apply(ExtendedState::state(c.domain[i]));
            CHECK(c.tables[id][i] == (y.is_cemetery() ? c.n_states : y.v));
        }
    }
}

TEST_CASE("pushing the closure through b0 reproduces the reachable set") {
    // R ∘ (F^D)⋆(b0) equals the union of reachable layers over [1, T]; both
    // the full-domain closure and the supp(b0)-restricted one agree.
    auto check_instance = [](const DetPomdpModel& m, const Belief& b0) {
        ReachLayers r = reachable_layers(m, b0, m.horizon);
        std::vector<BeliefId> ids = m.horizon == 1 ? r.layers[1]
                                                   : reachable_union(r, 1, m.horizon);
        std::unordered_set<Belief, BeliefHash> reach;
        for (BeliefId id : ids) reach.insert(r.store[id]);

        MappingClosure full = mapping_closure(m);
        std::vector<Belief> via_full = closure_beliefs(full, b0);
        CHECK(via_full.size() == reach.size());
        for (const auto& b : via_full) CHECK(reach.count(b) == 1);

        MappingClosureOptions restricted;
        std::vector<StateIndex> supp;
        for (const auto& [p, w] : b0.entries()) supp.push_back(p.v);
        restricted.restrict_domain = supp;
        std::vector<Belief> via_restricted = closure_beliefs(mapping_closure(m, -1, restricted), b0);
        CHECK(via_restricted.size() == reach.size());
        for (const auto& b : via_restricted) CHECK(reach.count(b) == 1);
    };

    check_instance(gen_tight_bound(3), tb3_b0());

    RandomStream rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        DetPomdpModel m = gen_random(1100 + trial,
                                     {.nx = static_cast<StateIndex>(2 + rng.below(3)),
                                      .nu = 2,
                                      .no = static_cast<ObsIndex>(1 + rng.below(2)),
                                      .horizon = static_cast<std::int32_t>(1 + rng.below(3))});
        check_instance(m, testutil::random_belief(rng, m.n_states()));
    }
}

TEST_CASE("per-control-sequence branches stay within the initial support size") {
    // For any fixed control sequence, the non-cemetery beliefs produced
    // across its observation branches number at most |supp(b0)|.
    RandomStream rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        DetPomdpModel m = gen_random(1200 + trial, {.nx = 4, .nu = 2, .no = 2, .horizon = 3});
        Belief b0 = testutil::random_belief(rng, 4);

        std::vector<ControlIndex> seq(m.horizon, 0);
        while (true) {
            std::unordered_set<Belief, BeliefHash> frontier{b0};
            for (std::int32_t t = 0; t < m.horizon; ++t) {
                std::unordered_set<Belief, BeliefHash> next;
                for (const auto& b : frontier) {
                    if (b.is_cemetery()) continue;
                    for (const auto& oc : expand_control(m, t, b, seq[t])) next.insert(oc.next);
                }
                CHECK(next.size() <= b0.support_size());
                frontier = std::move(next);
            }
            std::size_t pos = 0;
            while (pos < seq.size() && ++seq[pos] == m.n_controls()) seq[pos++] = 0;
            if (pos == seq.size()) break;
        }
    }
}

TEST_CASE("each layer is exactly the one-step image of the previous one") {
    // layers[t+1] = τ_t(layers[t], U, O) as sets, recomputed independently of
    // the enumerator's bookkeeping.
    RandomStream rng(73);
    for (int trial = 0; trial < 25; ++trial) {
        DetPomdpModel m = gen_random(1400 + trial,
                                     {.nx = static_cast<StateIndex>(2 + rng.below(3)),
                                      .nu = 2,
                                      .no = static_cast<ObsIndex>(1 + rng.below(3)),
                                      .horizon = 3});
        Belief b0 = testutil::random_belief(rng, m.n_states());
        ReachLayers r = reachable_layers(m, b0, m.horizon);
        for (std::int32_t t = 0; t < m.horizon; ++t) {
            std::unordered_set<Belief, BeliefHash> expected;
            for (BeliefId id : r.layers[t]) {
                const Belief& b = r.store[id];
                for (ControlIndex u = 0; u < m.n_controls(); ++u)
                    for (ObsIndex o = 0; o < m.n_observations(); ++o)
                        expected.insert(belief_step(m, t, b, u, o));
            }
            std::unordered_set<Belief, BeliefHash> got;
            for (BeliefId id : r.layers[t + 1]) got.insert(r.store[id]);
            CHECK(got == expected);
        }
        // Range-union bookkeeping agrees with the cumulative counters.
        CHECK(reachable_union(r, 0, m.horizon).size() == r.cumulative_size.back());
    }
}

TEST_CASE("models with duplicate labels are rejected") {
    DetPomdpModel m = gen_tight_bound(3);
    m.states[2] = "x1";
    CHECK_FALSE(validate_model(m).ok);
}

TEST_CASE("admissible-only expansion is a subset of the full expansion") {
    RandomStream rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        DetPomdpModel m = gen_random(1300 + trial, {.nx = 4, .nu = 3, .no = 2, .horizon = 3});
        Belief b0 = testutil::random_belief(rng, 4);
        ReachLayers full = reachable_layers(m, b0, m.horizon);
        ReachLayers adm = reachable_layers(m, b0, m.horizon, {.admissible_only = true});
        CHECK(adm.total_distinct() <= full.total_distinct());
        for (const auto& b : adm.store) CHECK(full.lookup(b) >= 0);
    }
}
