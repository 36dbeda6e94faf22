#pragma once

// Reachable-belief enumeration: the layered sets B^R_t(b0) produced by
// exhaustive filtering, their unions over time ranges, and the deduplicated
// closure of composed step mappings F^D.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "detpomdp/errors.hpp"
#include "detpomdp/filtering.hpp"
#include "detpomdp/measure.hpp"
#include "detpomdp/model.hpp"

namespace detpomdp {

// Controls admissible at every state of the belief's support:
// U^{b,ad}_t(b) = ∩_{x ∈ supp(b)} U^ad_t(x). May be empty. The Bellman
// recursion never minimizes at the cemetery, so δ_∂ is a contract violation.
inline std::vector<ControlIndex> admissible_belief_controls(const DetPomdpModel& m, std::int32_t t,
                                                            const Belief& b) {
    if (b.is_cemetery())
        throw ContractViolation("admissible_belief_controls at the cemetery belief");
    std::vector<ControlIndex> acc = m.admissible_at(t, b.entries().front().first.v);
    std::vector<ControlIndex> tmp;
    for (std::size_t i = 1; i < b.entries().size() && !acc.empty(); ++i) {
        const auto& next = m.admissible_at(t, b.entries()[i].first.v);
        tmp.clear();
        std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(),
                              std::back_inserter(tmp));
        acc.swap(tmp);
    }
    return acc;
}

struct ReachOptions {
    std::uint64_t cap = 10'000'000;  // distinct beliefs; exceeding it is a hard error
    // When set, expansion uses only controls in U^{b,ad}(b) — the beliefs the
    // constrained Bellman recursion actually touches. Default follows the
    // reachable-set definition literally (all controls).
    bool admissible_only = false;
};

using BeliefId = std::int32_t;

struct ReachLayers {
    std::vector<Belief> store;                    // id → belief, in first-reach order
    std::vector<std::vector<BeliefId>> layers;    // ids per time 0..t_max
    std::vector<std::uint64_t> layer_size;        // |B^R_t|
    std::vector<std::uint64_t> cumulative_size;   // |B^R_{[0,t]}|
    std::vector<char> cemetery_in_layer;
    BeliefId cemetery_id = -1;                    // -1 when δ_∂ never reached

    std::unordered_map<Belief, BeliefId, BeliefHash> index;

    BeliefId lookup(const Belief& b) const {
        auto it = index.find(b);
        return it == index.end() ? -1 : it->second;
    }

    std::uint64_t total_distinct() const { return store.size(); }

    bool cemetery_reached() const { return cemetery_id >= 0; }
};

namespace detail {

inline bool admissible_tables_stationary(const DetPomdpModel& m) {
    for (std::size_t t = 1; t < m.admissible.size(); ++t)
        if (m.admissible[t] != m.admissible[0]) return false;
    return true;
}

}  // namespace detail

// Breadth-first layered enumeration of B^R_0, ..., B^R_{t_max} from b0 with
// global deduplication by canonical beliefs. When the belief dynamics are
// time-invariant, each distinct belief is expanded once and its successor
// ids are replayed in later layers; the result is identical either way.
inline ReachLayers reachable_layers(const DetPomdpModel& m, const Belief& b0, std::int32_t t_max,
                                    const ReachOptions& opts = {}) {
    if (b0.is_cemetery()) throw ContractViolation("initial belief must lie in Δ(X)");
    if (t_max < 0 || t_max > m.horizon)
        throw ContractViolation("reachability depth must lie in [0, horizon]");

    ReachLayers r;
    auto intern = [&r, &opts](const Belief& b) -> BeliefId {
        auto it = r.index.find(b);
        if (it != r.index.end()) return it->second;
        if (r.store.size() >= opts.cap) throw CapExceeded("reachable beliefs", opts.cap);
        BeliefId id = static_cast<BeliefId>(r.store.size());
        r.store.push_back(b);
        r.index.emplace(b, id);
        if (b.is_cemetery()) r.cemetery_id = id;
        return id;
    };

    r.layers.push_back({intern(b0)});

    std::vector<ControlIndex> all_controls(m.controls.size());
    for (ControlIndex u = 0; u < m.n_controls(); ++u) all_controls[u] = u;

    const bool reusable = m.dynamics_obs_stationary() &&
                          (!opts.admissible_only || detail::admissible_tables_stationary(m));
    std::vector<std::vector<BeliefId>> memo;  // id -> successor ids (when reusable)

    for (std::int32_t t = 0; t < t_max; ++t) {
        std::vector<BeliefId> next;
        std::unordered_set<BeliefId> in_next;
        auto push = [&](BeliefId id) {
            if (in_next.insert(id).second) next.push_back(id);
        };

        for (BeliefId id : r.layers.back()) {
            if (reusable && static_cast<std::size_t>(id) < memo.size() && !memo[id].empty()) {
                for (BeliefId sid : memo[id])
                    if (sid >= 0) push(sid);
                continue;
            }
            const Belief b = r.store[id];  // copy: store may reallocate while expanding
            std::vector<BeliefId> succ;
            if (b.is_cemetery()) {
                succ.push_back(id);  // absorbing
            } else {
                const std::vector<ControlIndex> own =
                    opts.admissible_only ? admissible_belief_controls(m, t, b)
                                         : std::vector<ControlIndex>{};
                const std::vector<ControlIndex>& use = opts.admissible_only ? own : all_controls;
                bool cemetery_hit = false;
                for (ControlIndex u : use) {
                    auto outcomes = expand_control(m, t, b, u);
                    for (const auto& oc : outcomes) succ.push_back(intern(oc.next));
                    if (outcomes.size() < static_cast<std::size_t>(m.n_observations()))
                        cemetery_hit = true;
                }
                if (cemetery_hit) succ.push_back(intern(Belief::cemetery()));
            }
            for (BeliefId sid : succ) push(sid);
            if (reusable) {
                if (static_cast<std::size_t>(id) >= memo.size()) memo.resize(id + 1);
                if (succ.empty()) succ.push_back(-1);  // dead end marker, filtered on replay
                memo[id] = std::move(succ);
            }
        }
        r.layers.push_back(std::move(next));
    }

    r.layer_size.reserve(r.layers.size());
    r.cemetery_in_layer.reserve(r.layers.size());
    for (const auto& layer : r.layers) {
        r.layer_size.push_back(layer.size());
        bool cem = r.cemetery_id >= 0 &&
                   std::find(layer.begin(), layer.end(), r.cemetery_id) != layer.end();
        r.cemetery_in_layer.push_back(cem ? 1 : 0);
    }
    // Ids are assigned at first reach, so the union over [0,t] is every id
    // allocated while expanding layers 0..t.
    r.cumulative_size.assign(r.layers.size(), 0);
    {
        std::vector<char> seen(r.store.size(), 0);
        std::uint64_t count = 0;
        for (std::size_t t = 0; t < r.layers.size(); ++t) {
            for (BeliefId id : r.layers[t]) {
                if (!seen[id]) {
                    seen[id] = 1;
                    ++count;
                }
            }
            r.cumulative_size[t] = count;
        }
    }
    return r;
}

// Union of reachable layers over the time range [t_from, t_to], t_from < t_to.
inline std::vector<BeliefId> reachable_union(const ReachLayers& r, std::int32_t t_from,
                                             std::int32_t t_to) {
    if (t_from < 0 || t_to >= static_cast<std::int32_t>(r.layers.size()) || !(t_from < t_to))
        throw ContractViolation("reachable_union requires 0 <= t_from < t_to <= computed depth");
    std::unordered_set<BeliefId> seen;
    std::vector<BeliefId> ids;
    for (std::int32_t t = t_from; t <= t_to; ++t) {
        for (BeliefId id : r.layers[t]) {
            if (seen.insert(id).second) ids.push_back(id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

// --------------------------------------------------------------------------
// Closure of composed step mappings.
//
// Elements are stored as image vectors over a fixed domain (all of X, or the
// support of a designated initial belief when the caller enables the
// restriction optimization). Values live in [0, |X|] with |X| encoding ∂.

struct MappingClosureOptions {
    std::uint64_t cap = 100'000;               // distinct tables
    std::optional<std::vector<StateIndex>> restrict_domain;  // e.g. supp(b0)
};

struct MappingClosure {
    StateIndex n_states = 0;
    std::vector<StateIndex> domain;                  // domain slots, ascending
    std::vector<std::vector<StateIndex>> tables;     // id → images over domain
    std::vector<std::vector<StepKey>> provenance;    // id → composition chain, first applied first
    std::vector<std::vector<std::int32_t>> depths;   // table ids per depth
    bool reached_fixpoint = false;

    std::size_t size() const { return tables.size(); }

    // Reconstructs the full extended-state mapping from a provenance chain.
    StepMapping replay(const DetPomdpModel& m, std::size_t id) const {
        const auto& chain = provenance[id];
        StepMapping g = step_mapping(m, chain.front());
        for (std::size_t i = 1; i < chain.size(); ++i)
            g = compose_mappings(step_mapping(m, chain[i]), g);
        return g;
    }
};

namespace detail {

struct TableHash {
    std::size_t operator()(const std::vector<StateIndex>& t) const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (StateIndex v : t) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

}  // namespace detail

// Builds F^D_{0:t} for t = 0..depth_max-1 with per-depth and global
// deduplication; stops early on stationary models once a depth introduces
// nothing new. depth_max defaults to the horizon.
inline MappingClosure mapping_closure(const DetPomdpModel& m, std::int32_t depth_max = -1,
                                      const MappingClosureOptions& opts = {}) {
    if (depth_max < 0 || depth_max > m.horizon) depth_max = m.horizon;
    const StateIndex n = m.n_states();

    MappingClosure c;
    c.n_states = n;
    if (opts.restrict_domain) {
        c.domain = *opts.restrict_domain;
        std::sort(c.domain.begin(), c.domain.end());
    } else {
        c.domain.resize(n);
        for (StateIndex x = 0; x < n; ++x) c.domain[x] = x;
    }

    std::unordered_map<std::vector<StateIndex>, std::int32_t, detail::TableHash> index;
    auto intern = [&](std::vector<StateIndex> tab, std::vector<StepKey> chain,
                      std::vector<std::int32_t>& depth_ids) {
        auto it = index.find(tab);
        if (it != index.end()) {
            if (std::find(depth_ids.begin(), depth_ids.end(), it->second) == depth_ids.end())
                depth_ids.push_back(it->second);
            return;
        }
        if (c.tables.size() >= opts.cap) throw CapExceeded("mapping closure", opts.cap);
        std::int32_t id = static_cast<std::int32_t>(c.tables.size());
        index.emplace(tab, id);
        c.tables.push_back(std::move(tab));
        c.provenance.push_back(std::move(chain));
        depth_ids.push_back(id);
    };

    const bool time_invariant = m.dynamics_obs_stationary();
    std::uint64_t known_before = 0;
    for (std::int32_t depth = 0; depth < depth_max; ++depth) {
        std::vector<std::int32_t> depth_ids;
        if (depth == 0) {
            for (ControlIndex u = 0; u < m.n_controls(); ++u) {
                for (ObsIndex o = 0; o < m.n_observations(); ++o) {
                    StepMapping g = step_mapping(m, 0, u, o);
                    std::vector<StateIndex> tab(c.domain.size());
                    for (std::size_t i = 0; i < c.domain.size(); ++i) {
                        ExtendedState y = g.apply(ExtendedState::state(c.domain[i]));
                        tab[i] = y.is_cemetery() ? n : y.v;
                    }
                    intern(std::move(tab), {StepKey{0, u, o}}, depth_ids);
                }
            }
        } else {
            const auto& prev = c.depths.back();
            for (ControlIndex u = 0; u < m.n_controls(); ++u) {
                for (ObsIndex o = 0; o < m.n_observations(); ++o) {
                    StepMapping g = step_mapping(m, depth, u, o);
                    const auto& raw = g.table();  // slot n is ∂
                    for (std::int32_t pid : prev) {
                        const auto& base = c.tables[pid];
                        std::vector<StateIndex> tab(base.size());
                        for (std::size_t i = 0; i < base.size(); ++i) tab[i] = raw[base[i]];
                        std::vector<StepKey> chain = c.provenance[pid];
                        chain.push_back(StepKey{depth, u, o});
                        intern(std::move(tab), std::move(chain), depth_ids);
                    }
                }
            }
        }
        c.depths.push_back(std::move(depth_ids));
        if (time_invariant && c.tables.size() == known_before) {
            // No new table at this depth: every deeper composition factors
            // through already-known tables, so the union is complete.
            c.reached_fixpoint = true;
            break;
        }
        known_before = c.tables.size();
    }
    return c;
}

// Applies every closure element to b0 and renormalizes: the belief set
// R ∘ (F^D)⋆(b0). When the closure was built with a restricted domain, the
// domain must contain supp(b0).
inline std::vector<Belief> closure_beliefs(const MappingClosure& c, const Belief& b0) {
    std::vector<Belief> out;
    out.reserve(c.tables.size());
    std::unordered_set<Belief, BeliefHash> seen;
    for (const auto& tab : c.tables) {
        std::vector<std::pair<ExtendedState, Rational>> pairs;
        pairs.reserve(b0.entries().size());
        for (const auto& [p, w] : b0.entries()) {
            auto it = std::lower_bound(c.domain.begin(), c.domain.end(), p.v);
            if (it == c.domain.end() || *it != p.v)
                throw ContractViolation("closure domain does not cover supp(b0)");
            StateIndex img = tab[it - c.domain.begin()];
            pairs.emplace_back(
                img == c.n_states ? ExtendedState::cemetery() : ExtendedState::state(img), w);
        }
        Belief b = renormalize(Measure::from_pairs(std::move(pairs)));
        if (seen.insert(b).second) out.push_back(b);
    }
    return out;
}

}  // namespace detpomdp
