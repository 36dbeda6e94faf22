#pragma once

// Separation classification and theoretical bound verification.
//
// A mapping set is separated when any two members that agree anywhere are
// identical; a set of extended-state self-mappings is ∂-separated when each
// pair is separated on the common non-cemetery preimage. A Det-POMDP whose
// composed step-mapping set F^D is ∂-separated admits the sharper
// reachable-belief bound 1 + (2^|supp b0| − |supp b0|)·|X|.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "detpomdp/bignat.hpp"
#include "detpomdp/errors.hpp"
#include "detpomdp/filtering.hpp"
#include "detpomdp/measure.hpp"
#include "detpomdp/model.hpp"
#include "detpomdp/reachability.hpp"

namespace detpomdp {

// --------------------------------------------------------------------------
// Separated mapping sets.

struct PairWitness {
    std::size_t g1 = 0, g2 = 0;  // indices into the checked set
    StateIndex agree_at = 0;     // domain point where the pair agrees
    StateIndex differ_at = 0;    // domain point where it differs
};

struct SeparationCheck {
    bool separated = true;
    std::optional<PairWitness> witness;
};

// Plain separation over a common domain: tables may map into any value set.
inline SeparationCheck is_separated_mapping_set(
    const std::vector<std::vector<StateIndex>>& tables) {
    SeparationCheck res;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (std::size_t j = i + 1; j < tables.size(); ++j) {
            const auto& a = tables[i];
            const auto& b = tables[j];
            if (a == b) continue;
            StateIndex agree = -1, differ = -1;
            for (std::size_t y = 0; y < a.size() && (agree < 0 || differ < 0); ++y) {
                if (a[y] == b[y]) {
                    if (agree < 0) agree = static_cast<StateIndex>(y);
                } else if (differ < 0) {
                    differ = static_cast<StateIndex>(y);
                }
            }
            if (agree >= 0 && differ >= 0) {
                res.separated = false;
                res.witness = PairWitness{i, j, agree, differ};
                return res;
            }
        }
    }
    return res;
}

// ∂-separation: each pair restricted to g1⁻¹(X) ∩ g2⁻¹(X) must be separated.
// An empty intersection domain is vacuously separated.
inline SeparationCheck is_cemetery_separated(const std::vector<StepMapping>& maps) {
    SeparationCheck res;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = i + 1; j < maps.size(); ++j) {
            const auto& a = maps[i].table();
            const auto& b = maps[j].table();
            const StateIndex n = maps[i].n_states();
            StateIndex agree = -1, differ = -1;
            for (StateIndex y = 0; y < n && (agree < 0 || differ < 0); ++y) {
                if (a[y] == n || b[y] == n) continue;  // outside the common preimage of X
                if (a[y] == b[y]) {
                    if (agree < 0) agree = y;
                } else if (differ < 0) {
                    differ = y;
                }
            }
            if (agree >= 0 && differ >= 0) {
                res.separated = false;
                res.witness = PairWitness{i, j, agree, differ};
                return res;
            }
        }
    }
    return res;
}

// --------------------------------------------------------------------------
// Separated-Det-POMDP classification.

enum class SeparationStatus {
    separated_exact,                 // F^D checked ∂-separated exhaustively
    separated_by_dynamics,           // composed dynamics form a separated set
    separated_by_affine_structure,   // declared f_t(x,u) = x + g_t(u), verified
    separated_by_product_structure,  // declared f_t(x,u) = x · g_t(u), 0 ∉ X, verified
    not_separated,
    undetermined_cap,
};

inline const char* to_string(SeparationStatus s) {
    switch (s) {
        case SeparationStatus::separated_exact: return "separated_exact";
        case SeparationStatus::separated_by_dynamics: return "separated_by_dynamics";
        case SeparationStatus::separated_by_affine_structure:
            return "separated_by_affine_structure";
        case SeparationStatus::separated_by_product_structure:
            return "separated_by_product_structure";
        case SeparationStatus::not_separated: return "not_separated";
        case SeparationStatus::undetermined_cap: return "undetermined_cap";
    }
    return "?";
}

struct SeparationWitness {
    std::vector<StepKey> chain1, chain2;  // composition chains, first applied first
    StateIndex agree_at = 0, differ_at = 0;
};

struct SeparationVerdict {
    SeparationStatus status = SeparationStatus::undetermined_cap;
    std::optional<SeparationWitness> witness;
    std::vector<std::string> trace;

    bool is_separated() const {
        return status == SeparationStatus::separated_exact ||
               status == SeparationStatus::separated_by_dynamics ||
               status == SeparationStatus::separated_by_affine_structure ||
               status == SeparationStatus::separated_by_product_structure;
    }
};

struct SeparationOptions {
    std::uint64_t dynamics_cap = 100'000;
    std::uint64_t closure_cap = 100'000;
};

namespace detail {

inline bool numeric_labels(const std::vector<std::string>& labels,
                           std::vector<std::int64_t>& values) {
    values.clear();
    values.reserve(labels.size());
    for (const auto& s : labels) {
        try {
            std::size_t used = 0;
            std::int64_t v = std::stoll(s, &used);
            if (used != s.size()) return false;
            values.push_back(v);
        } catch (...) {
            return false;
        }
    }
    return true;
}

// Verifies a declared affine/product structure against the dynamics table.
// Where the structural image stays on the state grid the table must match it
// exactly; where it leaves the grid the pair (x,u) must be inadmissible, so
// the declared algebra governs every transition the problem can take.
inline bool verify_structure(const DetPomdpModel& m, std::string& why) {
    const auto& st = *m.structure;
    std::vector<std::int64_t> values;
    if (!numeric_labels(m.states, values)) {
        why = "state labels are not numeric";
        return false;
    }
    if (st.kind == StructureAnnotation::Kind::product) {
        for (std::int64_t v : values)
            if (v == 0) {
                why = "product structure requires 0 not to be a state";
                return false;
            }
    }
    std::unordered_map<std::int64_t, StateIndex> by_value;
    for (StateIndex i = 0; i < m.n_states(); ++i) by_value.emplace(values[i], i);
    if (st.g.size() != m.n_slices()) {
        why = "structure slices do not match the model's tables";
        return false;
    }
    for (std::size_t t = 0; t < m.n_slices(); ++t) {
        if (st.g[t].size() != static_cast<std::size_t>(m.n_controls())) {
            why = "structure row has wrong control count";
            return false;
        }
        for (StateIndex x = 0; x < m.n_states(); ++x) {
            for (ControlIndex u = 0; u < m.n_controls(); ++u) {
                std::int64_t target = st.kind == StructureAnnotation::Kind::affine
                                          ? values[x] + st.g[t][u]
                                          : values[x] * st.g[t][u];
                auto it = by_value.find(target);
                if (it != by_value.end()) {
                    if (m.dynamics[t][x][u] != it->second) {
                        why = "dynamics[" + std::to_string(t) + "][" + std::to_string(x) + "][" +
                              std::to_string(u) + "] contradicts the declared structure";
                        return false;
                    }
                } else {
                    const auto& ad = m.admissible[t][x];
                    if (std::binary_search(ad.begin(), ad.end(), u)) {
                        why = "structural image leaves the state grid at admissible pair (t=" +
                              std::to_string(t) + ", x=" + std::to_string(x) + ", u=" +
                              std::to_string(u) + ")";
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

struct DynamicsClosure {
    std::vector<std::vector<StateIndex>> tables;
    bool complete = false;
};

// Deduplicated compositions f_{0:t} of the evolution functions for
// t = 0..horizon-1 (the mapping set whose separation is sufficient for the
// ∂-separation of the whole problem).
inline DynamicsClosure dynamics_closure(const DetPomdpModel& m, std::uint64_t cap) {
    DynamicsClosure c;
    const bool time_invariant = m.dynamics_obs_stationary();
    std::unordered_set<std::vector<StateIndex>, detail::TableHash> seen;
    std::vector<std::vector<StateIndex>> frontier;  // distinct depth-k compositions
    for (std::int32_t depth = 0; depth < m.horizon; ++depth) {
        std::vector<std::vector<StateIndex>> depth_set;
        for (ControlIndex u = 0; u < m.n_controls(); ++u) {
            std::vector<StateIndex> col = m.dynamics_column(depth, u);
            if (depth == 0) {
                depth_set.push_back(std::move(col));
            } else {
                for (const auto& base : frontier) {
                    std::vector<StateIndex> comp(base.size());
                    for (std::size_t x = 0; x < base.size(); ++x) comp[x] = col[base[x]];
                    depth_set.push_back(std::move(comp));
                }
            }
        }
        std::sort(depth_set.begin(), depth_set.end());
        depth_set.erase(std::unique(depth_set.begin(), depth_set.end()), depth_set.end());

        bool any_new = false;
        for (const auto& tab : depth_set) {
            if (seen.insert(tab).second) {
                if (c.tables.size() >= cap) {  // give up: result unusable
                    c.tables.clear();
                    return c;
                }
                c.tables.push_back(tab);
                any_new = true;
            }
        }
        if (time_invariant && !any_new) break;  // deeper compositions repeat known tables
        frontier = std::move(depth_set);
    }
    c.complete = true;
    return c;
}

}  // namespace detail

// Classification, cheapest check first: declared affine structure, declared
// product structure, exact separation of the composed dynamics, exact
// ∂-separation of the full step-mapping closure. Caps produce
// undetermined_cap, never an error.
inline SeparationVerdict check_separated_dpomdp(const DetPomdpModel& m,
                                                const SeparationOptions& opts = {}) {
    SeparationVerdict v;

    if (m.structure) {
        std::string why;
        if (detail::verify_structure(m, why)) {
            v.status = m.structure->kind == StructureAnnotation::Kind::affine
                           ? SeparationStatus::separated_by_affine_structure
                           : SeparationStatus::separated_by_product_structure;
            v.trace.push_back(std::string("declared ") +
                              (m.structure->kind == StructureAnnotation::Kind::affine ? "affine"
                                                                                      : "product") +
                              " structure verified against the dynamics table");
            return v;
        }
        v.trace.push_back("declared structure rejected: " + why);
    }

    {
        detail::DynamicsClosure dc = detail::dynamics_closure(m, opts.dynamics_cap);
        if (dc.complete) {
            auto check = is_separated_mapping_set(dc.tables);
            if (check.separated) {
                v.status = SeparationStatus::separated_by_dynamics;
                v.trace.push_back("composed evolution functions form a separated mapping set (" +
                                  std::to_string(dc.tables.size()) + " distinct compositions)");
                return v;
            }
            v.trace.push_back("composed evolution functions are not separated; "
                              "falling through to the exact check");
        } else {
            v.trace.push_back("dynamics closure exceeded its cap; skipping the sufficient check");
        }
    }

    try {
        MappingClosureOptions mco;
        mco.cap = opts.closure_cap;
        MappingClosure closure = mapping_closure(m, -1, mco);
        std::vector<StepMapping> maps;
        maps.reserve(closure.size());
        for (std::size_t id = 0; id < closure.size(); ++id) maps.push_back(closure.replay(m, id));
        auto check = is_cemetery_separated(maps);
        if (check.separated) {
            v.status = SeparationStatus::separated_exact;
            v.trace.push_back("step-mapping closure (" + std::to_string(maps.size()) +
                              " tables) is a ∂-separated mapping set");
        } else {
            v.status = SeparationStatus::not_separated;
            SeparationWitness w;
            w.chain1 = closure.provenance[check.witness->g1];
            w.chain2 = closure.provenance[check.witness->g2];
            w.agree_at = check.witness->agree_at;
            w.differ_at = check.witness->differ_at;
            v.witness = std::move(w);
            v.trace.push_back("found a pair of composed step mappings violating ∂-separation");
        }
    } catch (const CapExceeded&) {
        v.status = SeparationStatus::undetermined_cap;
        v.trace.push_back("step-mapping closure exceeded its cap; verdict undetermined");
    }
    return v;
}

// Recomputes the witness pair from its descriptors and confirms it violates
// ∂-separation: both images in X at both points, equal at one, different at
// the other.
inline bool replay_witness(const DetPomdpModel& m, const SeparationWitness& w) {
    auto build = [&m](const std::vector<StepKey>& chain) {
        StepMapping g = step_mapping(m, chain.front());
        for (std::size_t i = 1; i < chain.size(); ++i)
            g = compose_mappings(step_mapping(m, chain[i]), g);
        return g;
    };
    StepMapping g1 = build(w.chain1);
    StepMapping g2 = build(w.chain2);
    ExtendedState a1 = g1.apply(ExtendedState::state(w.agree_at));
    ExtendedState a2 = g2.apply(ExtendedState::state(w.agree_at));
    ExtendedState d1 = g1.apply(ExtendedState::state(w.differ_at));
    ExtendedState d2 = g2.apply(ExtendedState::state(w.differ_at));
    return !a1.is_cemetery() && !a2.is_cemetery() && a1 == a2 && !d1.is_cemetery() &&
           !d2.is_cemetery() && d1 != d2;
}

// --------------------------------------------------------------------------
// Bounds.

// (1 + |X|)^|X| — the support-independent reachable-belief bound.
inline BigNat bound_support_independent(const DetPomdpModel& m) {
    return BigNat::pow(static_cast<std::uint64_t>(m.n_states()) + 1,
                       static_cast<std::uint64_t>(m.n_states()));
}

struct DetPomdpBound {
    BigNat term_a;                 // (1 + |X|)^|supp b0|
    std::optional<BigNat> term_b;  // 1 + |supp b0| · |U|^(T+1); needs |U| > 1
    BigNat bound;                  // min of the applicable terms
};

inline DetPomdpBound bound_detpomdp(const DetPomdpModel& m, const Belief& b0) {
    if (b0.is_cemetery()) throw ContractViolation("bound_detpomdp needs a belief in Δ(X)");
    DetPomdpBound r;
    const std::uint64_t supp = b0.support_size();
    r.term_a = BigNat::pow(static_cast<std::uint64_t>(m.n_states()) + 1, supp);
    if (m.n_controls() > 1) {
        BigNat pw = BigNat::pow(static_cast<std::uint64_t>(m.n_controls()),
                                static_cast<std::uint64_t>(m.horizon) + 1);
        r.term_b = BigNat(1) + BigNat(supp) * pw;
        r.bound = *r.term_b < r.term_a ? *r.term_b : r.term_a;
    } else {
        r.bound = r.term_a;
    }
    return r;
}

// Smallest subset of X containing supp(b0) and closed under every f_t(·,u).
inline std::vector<StateIndex> stable_set(const DetPomdpModel& m, const Belief& b0) {
    if (b0.is_cemetery()) throw ContractViolation("stable_set needs a belief in Δ(X)");
    std::vector<char> in(m.n_states(), 0);
    std::vector<StateIndex> queue;
    for (const auto& [p, w] : b0.entries()) {
        in[p.v] = 1;
        queue.push_back(p.v);
    }
    while (!queue.empty()) {
        StateIndex x = queue.back();
        queue.pop_back();
        for (std::size_t t = 0; t < m.n_slices(); ++t) {
            for (ControlIndex u = 0; u < m.n_controls(); ++u) {
                StateIndex y = m.dynamics[t][x][u];
                if (!in[y]) {
                    in[y] = 1;
                    queue.push_back(y);
                }
            }
        }
    }
    std::vector<StateIndex> a;
    for (StateIndex x = 0; x < m.n_states(); ++x)
        if (in[x]) a.push_back(x);
    return a;
}

// 1 + (2^|supp b0| − |supp b0|) · |A|, with A = X when no stable set is given.
// A supplied A must contain supp(b0) and satisfy f_t(A, U) ⊆ A.
inline BigNat bound_separated(const DetPomdpModel& m, const Belief& b0,
                              const std::optional<std::vector<StateIndex>>& stable = std::nullopt) {
    if (b0.is_cemetery()) throw ContractViolation("bound_separated needs a belief in Δ(X)");
    std::uint64_t region = m.n_states();
    if (stable) {
        std::vector<char> in(m.n_states(), 0);
        for (StateIndex x : *stable) {
            if (x < 0 || x >= m.n_states())
                throw ModelError("stable set contains an out-of-range state");
            in[x] = 1;
        }
        for (const auto& [p, w] : b0.entries())
            if (!in[p.v]) throw ModelError("stable set does not contain supp(b0)");
        for (std::size_t t = 0; t < m.n_slices(); ++t)
            for (StateIndex x : *stable)
                for (ControlIndex u = 0; u < m.n_controls(); ++u)
                    if (!in[m.dynamics[t][x][u]])
                        throw ModelError("set is not stable under the dynamics");
        region = stable->size();
    }
    const std::uint64_t supp = b0.support_size();
    BigNat two_k = BigNat::pow(2, supp);
    return BigNat(1) + (two_k - BigNat(supp)) * BigNat(region);
}

// --------------------------------------------------------------------------
// Bound verification against the enumerated reachable set.

struct BoundsReport {
    BigNat support_independent;
    DetPomdpBound general_bound;
    std::optional<BigNat> separated_bound;
    std::optional<BigNat> separated_stable;
    std::vector<StateIndex> stable;
    SeparationVerdict verdict;
    std::uint64_t empirical_1T = 0;  // |B^R_{[1,T]}(b0)|
    std::uint64_t empirical_0T = 0;  // |B^R_{[0,T]}(b0)|
    bool conforms = true;
    bool support_independent_tight = false, general_tight = false, separated_tight = false;
};

inline BoundsReport verify_bounds(const DetPomdpModel& m, const Belief& b0,
                                  const ReachOptions& reach = {},
                                  const SeparationOptions& sep = {}) {
    BoundsReport r;
    r.support_independent = bound_support_independent(m);
    r.general_bound = bound_detpomdp(m, b0);
    r.verdict = check_separated_dpomdp(m, sep);
    if (r.verdict.is_separated()) {
        r.separated_bound = bound_separated(m, b0);
        if (b0.support_size() > 1) {
            r.stable = stable_set(m, b0);
            if (r.stable.size() < static_cast<std::size_t>(m.n_states()))
                r.separated_stable = bound_separated(m, b0, r.stable);
        }
    }

    ReachLayers layers = reachable_layers(m, b0, m.horizon, reach);
    r.empirical_0T = layers.cumulative_size.back();
    if (m.horizon == 1) {
        std::unordered_set<BeliefId> only(layers.layers[1].begin(), layers.layers[1].end());
        r.empirical_1T = only.size();
    } else {
        r.empirical_1T = reachable_union(layers, 1, m.horizon).size();
    }

    BigNat e1(r.empirical_1T), e0(r.empirical_0T);
    auto check = [&r](const BigNat& empirical, const BigNat& bound, bool& tight) {
        if (!(empirical <= bound)) r.conforms = false;
        tight = empirical == bound;
    };
    check(e0, r.support_independent, r.support_independent_tight);
    check(e1, r.general_bound.bound, r.general_tight);
    if (r.separated_bound) check(e1, *r.separated_bound, r.separated_tight);
    if (r.separated_stable) {
        bool tight_unused = false;
        check(e1, *r.separated_stable, tight_unused);
    }
    return r;
}

}  // namespace detpomdp
