#pragma once

// Constrained belief-space dynamic programming: the backward induction
//   V_T(b) = Σ_x b(x) K(x),
//   V_t(b) = min_{u ∈ U^{b,ad}_t(b)} [ Σ_x b(x) L_t(x,u)
//                                      + Σ_o Q_{t+1}(b,u,o) V_{t+1}(τ_t(b,u,o)) ],
// with V_t(δ_∂) = 0, an empty admissible set giving +∞, and zero-probability
// observation terms skipped. Also closed-loop simulation and an independent
// brute-force oracle that enumerates every history-feedback policy.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "detpomdp/errors.hpp"
#include "detpomdp/extended_value.hpp"
#include "detpomdp/filtering.hpp"
#include "detpomdp/measure.hpp"
#include "detpomdp/model.hpp"
#include "detpomdp/reachability.hpp"

namespace detpomdp {

constexpr ControlIndex kInfeasible = -1;

struct SolveResult {
    ReachLayers layers;  // admissible-control forward pass, depth = horizon
    // value[t] / action[t] are indexed by belief id; beliefs absent from
    // layer t have no entry. The cemetery belief is pinned to value 0.
    std::vector<std::unordered_map<BeliefId, ExtendedValue>> value;
    std::vector<std::unordered_map<BeliefId, ControlIndex>> action;
    ExtendedValue optimal_value;

    const ExtendedValue& value_at(std::int32_t t, BeliefId id) const {
        auto it = value[t].find(id);
        if (it == value[t].end()) throw InternalError("value table lookup failed");
        return it->second;
    }
};

// Minimizing control stored for (t, b); beliefs off the reachable set (or
// the cemetery, where no action is defined) are lookup errors.
inline ControlIndex policy_action(const SolveResult& res, std::int32_t t, const Belief& b) {
    if (b.is_cemetery())
        throw ContractViolation("no action is defined at the cemetery belief");
    if (t < 0 || t >= static_cast<std::int32_t>(res.action.size()))
        throw ContractViolation("policy_action: time index out of range");
    BeliefId id = res.layers.lookup(b);
    if (id < 0) throw ContractViolation("policy_action: belief is not in the reachable set");
    auto it = res.action[t].find(id);
    if (it == res.action[t].end())
        throw ContractViolation("policy_action: belief not reachable at this time");
    return it->second;
}

inline SolveResult solve(const DetPomdpModel& m, const Belief& b0, const ReachOptions& reach = {
                             .cap = 10'000'000, .admissible_only = true}) {
    SolveResult res;
    ReachOptions opts = reach;
    opts.admissible_only = true;  // the recursion only ever minimizes over U^{b,ad}
    res.layers = reachable_layers(m, b0, m.horizon, opts);

    const std::int32_t T = m.horizon;
    res.value.resize(T + 1);
    res.action.resize(T);

    // Terminal layer: V_T(b) = Σ b(x) K(x); V_T(δ_∂) = 0.
    for (BeliefId id : res.layers.layers[T]) {
        const Belief& b = res.layers.store[id];
        if (b.is_cemetery()) {
            res.value[T].emplace(id, ExtendedValue::zero());
            continue;
        }
        ExtendedValue v = ExtendedValue::zero();
        for (const auto& [p, w] : b.entries()) v += w * m.K(p.v);
        res.value[T].emplace(id, v);
    }

    // Beliefs recur across layers; when the belief dynamics and admissibility
    // are time-invariant the admissible expansion of each distinct belief is
    // computed once and replayed at every time step.
    const bool reusable =
        m.dynamics_obs_stationary() && detail::admissible_tables_stationary(m);
    struct CachedControl {
        ControlIndex u;
        std::vector<std::pair<Rational, BeliefId>> outcomes;  // (Q, successor id), Q > 0
    };
    std::vector<std::vector<CachedControl>> cache;
    std::vector<char> cached;
    if (reusable) {
        cache.resize(res.layers.store.size());
        cached.assign(res.layers.store.size(), 0);
    }

    std::vector<CachedControl> scratch;
    auto expansions_of = [&](std::int32_t t, BeliefId id,
                             const Belief& b) -> const std::vector<CachedControl>& {
        std::vector<CachedControl>* dst = &scratch;
        if (reusable) {
            if (cached[id]) return cache[id];
            dst = &cache[id];
        }
        dst->clear();
        for (ControlIndex u : admissible_belief_controls(m, t, b)) {
            CachedControl cc;
            cc.u = u;
            for (const auto& oc : expand_control(m, t, b, u)) {
                BeliefId nid = res.layers.lookup(oc.next);
                if (nid < 0) throw InternalError("successor belief missing from layers");
                cc.outcomes.emplace_back(oc.prob, nid);
            }
            dst->push_back(std::move(cc));
        }
        if (reusable) cached[id] = 1;
        return *dst;
    };

    // Cost rows that do not depend on the state collapse to a single value
    // because belief masses sum to one.
    std::vector<std::vector<std::optional<ExtendedValue>>> flat_cost(m.n_slices());
    for (std::size_t s = 0; s < m.n_slices(); ++s) {
        flat_cost[s].resize(m.n_controls());
        for (ControlIndex u = 0; u < m.n_controls(); ++u) {
            bool flat = true;
            for (StateIndex x = 1; x < m.n_states() && flat; ++x)
                flat = m.cost[s][x][u] == m.cost[s][0][u];
            if (flat) flat_cost[s][u] = m.cost[s][0][u];
        }
    }

    // Dense V_{t+1} view rebuilt per step for O(1) successor lookups.
    std::vector<ExtendedValue> vnext(res.layers.store.size());
    for (std::int32_t t = T - 1; t >= 0; --t) {
        for (const auto& [id, v] : res.value[t + 1]) vnext[id] = v;
        const std::size_t slice = m.slice(t);
        for (BeliefId id : res.layers.layers[t]) {
            const Belief& b = res.layers.store[id];
            if (b.is_cemetery()) {
                res.value[t].emplace(id, ExtendedValue::zero());
                continue;
            }
            ExtendedValue best = ExtendedValue::infinity();
            ControlIndex best_u = kInfeasible;
            for (const CachedControl& cc : expansions_of(t, id, b)) {
                ExtendedValue cand = ExtendedValue::zero();
                if (flat_cost[slice][cc.u]) {
                    cand = *flat_cost[slice][cc.u];
                } else {
                    for (const auto& [p, w] : b.entries()) cand += w * m.L(t, p.v, cc.u);
                }
                if (cand.is_finite()) {
                    for (const auto& [q, nid] : cc.outcomes) {
                        cand += q * vnext[nid];
                        if (!cand.is_finite()) break;
                    }
                }
                if (best_u == kInfeasible || cand < best) {  // ties keep the lowest index
                    best = cand;
                    best_u = cc.u;
                }
            }
            res.value[t].emplace(id, best);
            res.action[t].emplace(id, best_u);
        }
    }

    res.optimal_value = res.value_at(0, res.layers.layers[0].front());
    return res;
}

// --------------------------------------------------------------------------
// Closed-loop simulation.

struct TrajectoryRecord {
    std::int32_t t = 0;
    StateIndex state = 0;
    ObsIndex observation = 0;
    ControlIndex control = kInfeasible;  // kInfeasible on the terminal row
    ExtendedValue step_cost = ExtendedValue::zero();
    StateIndex supp_min = 0;
    StateIndex supp_max = 0;
    std::size_t supp_size = 0;
    std::string belief_key;
};

struct SimulationResult {
    std::vector<TrajectoryRecord> records;
    Belief final_belief;  // belief held when the rollout ended; δ_∂ on contradiction
    ExtendedValue total_cost = ExtendedValue::zero();
    bool aborted = false;
    std::string diagnostic;
};

// Rolls the policy out from true state x0: u_t = π_t(b_t), x_{t+1} =
// f_t(x_t,u_t), o_{t+1} = h_{t+1}(x_{t+1},u_t), b_{t+1} = τ_t(b_t,u_t,o_{t+1}).
// When x0 ∉ supp(b0) an observation can contradict the belief; the rollout
// then stops at δ_∂ with a diagnostic.
inline SimulationResult simulate(const DetPomdpModel& m, const SolveResult& policy, StateIndex x0,
                                 const Belief& b0) {
    SimulationResult sim;
    if (x0 < 0 || x0 >= m.n_states()) throw ContractViolation("simulate: x0 out of range");
    if (b0.at(ExtendedState::state(x0)).is_zero())
        sim.diagnostic = "warning: x0 is outside supp(b0); ";

    Belief b = b0;
    StateIndex x = x0;
    ObsIndex o = m.h0(x0);
    for (std::int32_t t = 0; t < m.horizon; ++t) {
        TrajectoryRecord rec;
        rec.t = t;
        rec.state = x;
        rec.observation = o;
        rec.supp_min = b.support_min().v;
        rec.supp_max = b.support_max().v;
        rec.supp_size = b.support_size();
        rec.belief_key = canonical_key(b);

        ControlIndex u;
        try {
            u = policy_action(policy, t, b);
        } catch (const ContractViolation& e) {
            sim.final_belief = b;
            sim.aborted = true;
            sim.diagnostic += std::string("policy lookup failed at t=") + std::to_string(t) +
                              ": " + e.what();
            sim.records.push_back(rec);
            return sim;
        }
        if (u == kInfeasible) {
            sim.final_belief = b;
            sim.aborted = true;
            sim.diagnostic += "no admissible control at t=" + std::to_string(t);
            sim.records.push_back(rec);
            return sim;
        }
        rec.control = u;
        rec.step_cost = m.L(t, x, u);
        sim.total_cost += rec.step_cost;
        sim.records.push_back(rec);

        StateIndex x_next = m.f(t, x, u);
        ObsIndex o_next = m.h_next(t, x_next, u);
        b = belief_step(m, t, b, u, o_next);
        if (b.is_cemetery()) {
            sim.final_belief = b;
            sim.aborted = true;
            sim.diagnostic += "belief reached the cemetery at t=" + std::to_string(t + 1) +
                              " (observation contradicts the belief)";
            return sim;
        }
        x = x_next;
        o = o_next;
    }

    TrajectoryRecord last;
    last.t = m.horizon;
    last.state = x;
    last.observation = o;
    last.control = kInfeasible;
    last.step_cost = m.K(x);
    last.supp_min = b.support_min().v;
    last.supp_max = b.support_max().v;
    last.supp_size = b.support_size();
    last.belief_key = canonical_key(b);
    sim.total_cost += last.step_cost;
    sim.records.push_back(last);
    sim.final_belief = b;
    return sim;
}

// --------------------------------------------------------------------------
// Brute-force oracle.
//
// Enumerates every deterministic history-feedback policy: a control for each
// node of the observation tree (o_1, ..., o_t), t < T. For each policy the
// exact expected cost is Σ_{x ∈ supp(b0)} b0(x) · (realized cost from x); a
// policy whose prescribed control is inadmissible at a positive-probability
// state is infeasible (+∞). Completely independent of the belief machinery.

inline ExtendedValue brute_force_value(const DetPomdpModel& m, const Belief& b0,
                                       std::uint64_t policy_cap = 1'000'000) {
    if (b0.is_cemetery()) throw ContractViolation("initial belief must lie in Δ(X)");
    const std::int32_t T = m.horizon;
    const std::uint64_t nu = m.controls.size();
    const std::uint64_t no = m.observations.size();

    // Policy-tree nodes, level by level: 1 + |O| + ... + |O|^(T-1).
    std::vector<std::uint64_t> level_offset(T + 1, 0);
    std::uint64_t nodes = 0, level = 1;
    for (std::int32_t t = 0; t < T; ++t) {
        level_offset[t] = nodes;
        nodes += level;
        if (nodes > policy_cap) throw CapExceeded("oracle policy tree nodes", policy_cap);
        level *= no;
    }
    level_offset[T] = nodes;

    // Total number of policies is nu^nodes; refuse absurd enumerations.
    {
        long double total = 1.0L;
        for (std::uint64_t i = 0; i < nodes; ++i) {
            total *= static_cast<long double>(nu);
            if (total > static_cast<long double>(policy_cap))
                throw CapExceeded("oracle policies", policy_cap);
        }
    }

    std::vector<ControlIndex> choice(nodes, 0);
    std::optional<ExtendedValue> best;

    auto evaluate = [&]() -> ExtendedValue {
        ExtendedValue total = ExtendedValue::zero();
        for (const auto& [p, w] : b0.entries()) {
            StateIndex x = p.v;
            std::uint64_t node = 0;  // node index within its level
            ExtendedValue run = ExtendedValue::zero();
            for (std::int32_t t = 0; t < T; ++t) {
                ControlIndex u = choice[level_offset[t] + node];
                const auto& ad = m.admissible_at(t, x);
                if (!std::binary_search(ad.begin(), ad.end(), u)) return ExtendedValue::infinity();
                run += m.L(t, x, u);
                if (!run.is_finite()) return ExtendedValue::infinity();
                StateIndex x_next = m.f(t, x, u);
                ObsIndex o_next = m.h_next(t, x_next, u);
                node = node * no + static_cast<std::uint64_t>(o_next);
                x = x_next;
            }
            run += m.K(x);
            if (!run.is_finite()) return ExtendedValue::infinity();
            total += w * run;
        }
        return total;
    };

    while (true) {
        ExtendedValue v = evaluate();
        if (!best || v < *best) best = v;

        // Mixed-radix increment over all node choices.
        std::size_t pos = 0;
        while (pos < nodes) {
            if (static_cast<std::uint64_t>(++choice[pos]) < nu) break;
            choice[pos] = 0;
            ++pos;
        }
        if (pos == nodes) break;
    }
    return *best;
}

}  // namespace detpomdp
