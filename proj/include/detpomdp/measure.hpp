#pragma once

// Exact measures on the extended state set X ∪ {∂}, the belief set
// Δ(X) ∪ {δ_∂}, pushforward measures, renormalization, and the
// forward/backward restricted-mapping algebra.
//
// ∂ (the "cemetery" point) absorbs probability mass that is inconsistent
// with an observed outcome. It is a first-class point here, never an error.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "detpomdp/errors.hpp"
#include "detpomdp/rational.hpp"

namespace detpomdp {

using StateIndex = std::int32_t;

// A point of the extended state set. States are indices 0..|X|-1; the
// cemetery is a distinguished sentinel that sorts after every state.
struct ExtendedState {
    static constexpr StateIndex kCemeteryValue = INT32_MAX;

    StateIndex v = kCemeteryValue;

    static ExtendedState state(StateIndex s) { return ExtendedState{s}; }
    static ExtendedState cemetery() { return ExtendedState{kCemeteryValue}; }
    bool is_cemetery() const { return v == kCemeteryValue; }

    friend bool operator==(ExtendedState a, ExtendedState b) { return a.v == b.v; }
    friend bool operator!=(ExtendedState a, ExtendedState b) { return a.v != b.v; }
    friend bool operator<(ExtendedState a, ExtendedState b) { return a.v < b.v; }
};

// Sparse nonnegative measure on the extended state set. Entries are sorted
// by point and strictly positive; absent points carry zero mass.
struct Measure {
    std::vector<std::pair<ExtendedState, Rational>> entries;

    Rational total() const {
        Rational s;
        for (const auto& [p, w] : entries) s += w;
        return s;
    }

    Rational mass_on_states() const {
        Rational s;
        for (const auto& [p, w] : entries)
            if (!p.is_cemetery()) s += w;
        return s;
    }

    Rational at(ExtendedState p) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), p,
                                   [](const auto& e, ExtendedState q) { return e.first < q; });
        if (it != entries.end() && it->first == p) return it->second;
        return Rational::zero();
    }

    // Builds the canonical sparse form from possibly unsorted, possibly
    // duplicated, possibly zero-weight pairs. Negative weights are rejected.
    static Measure from_pairs(std::vector<std::pair<ExtendedState, Rational>> pairs) {
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Measure m;
        m.entries.reserve(pairs.size());
        for (auto& [p, w] : pairs) {
            if (w.is_negative()) throw ModelError("negative weight in measure");
            if (w.is_zero()) continue;
            if (!m.entries.empty() && m.entries.back().first == p) {
                m.entries.back().second += w;
            } else {
                m.entries.emplace_back(p, w);
            }
        }
        return m;
    }

    friend bool operator==(const Measure& a, const Measure& b) { return a.entries == b.entries; }
    friend bool operator!=(const Measure& a, const Measure& b) { return !(a == b); }
};

// Probability distribution restricted to Δ(X) ∪ {δ_∂}: either all mass on
// states, or exactly δ_∂. Construct through make_belief / renormalize /
// Belief::cemetery so the invariant always holds.
class Belief {
  public:
    Belief() : m_{{{ExtendedState::cemetery(), Rational::one()}}} {}

    static Belief cemetery() { return Belief(); }

    static Belief point(StateIndex s) {
        Measure m;
        m.entries.emplace_back(ExtendedState::state(s), Rational::one());
        return Belief(std::move(m));
    }

    bool is_cemetery() const { return m_.entries.front().first.is_cemetery(); }

    const std::vector<std::pair<ExtendedState, Rational>>& entries() const { return m_.entries; }
    const Measure& as_measure() const { return m_; }
    Rational at(ExtendedState p) const { return m_.at(p); }
    std::size_t support_size() const { return m_.entries.size(); }

    // Smallest / largest support point; meaningful for grid-state models.
    ExtendedState support_min() const { return m_.entries.front().first; }
    ExtendedState support_max() const { return m_.entries.back().first; }

    friend bool operator==(const Belief& a, const Belief& b) { return a.m_ == b.m_; }
    friend bool operator!=(const Belief& a, const Belief& b) { return !(a == b); }

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        for (const auto& [p, w] : m_.entries) {
            h = h * 1099511628211ull + static_cast<std::size_t>(static_cast<std::uint32_t>(p.v));
            h = h * 1099511628211ull + w.hash();
        }
        return h;
    }

  private:
    friend Belief make_belief(const std::vector<std::pair<StateIndex, Rational>>& weights,
                              StateIndex n_states);
    friend Belief renormalize(const Measure& m);
    explicit Belief(Measure m) : m_(std::move(m)) {
        if (m_.entries.empty()) throw InternalError("belief with empty support");
    }

    Measure m_;
};

struct BeliefHash {
    std::size_t operator()(const Belief& b) const { return b.hash(); }
};

// Exact probability distribution on X from state-indexed weights.
// Weights must be nonnegative, indices in [0, n_states), total mass exactly 1.
inline Belief make_belief(const std::vector<std::pair<StateIndex, Rational>>& weights,
                          StateIndex n_states) {
    std::vector<std::pair<ExtendedState, Rational>> pairs;
    pairs.reserve(weights.size());
    for (const auto& [s, w] : weights) {
        if (s < 0 || s >= n_states)
            throw ModelError("belief weight on out-of-range state index " + std::to_string(s));
        pairs.emplace_back(ExtendedState::state(s), w);
    }
    Measure m = Measure::from_pairs(std::move(pairs));
    Rational mass = m.total();
    if (mass != Rational::one())
        throw ModelError("belief mass is " + mass.str() + ", expected 1");
    return Belief(std::move(m));
}

// Support of a belief / measure as an ordered list of points.
inline std::vector<ExtendedState> support(const Belief& b) {
    std::vector<ExtendedState> s;
    s.reserve(b.entries().size());
    for (const auto& [p, w] : b.entries()) s.push_back(p);
    return s;
}

inline std::vector<ExtendedState> support(const Measure& m) {
    std::vector<ExtendedState> s;
    s.reserve(m.entries.size());
    for (const auto& [p, w] : m.entries) s.push_back(p);
    return s;
}

// Renormalization: scale the restriction to X back to a probability
// distribution; if no mass lies on X the result is δ_∂.
inline Belief renormalize(const Measure& m) {
    Rational mass = m.mass_on_states();
    if (mass.is_zero()) return Belief::cemetery();
    Measure out;
    out.entries.reserve(m.entries.size());
    for (const auto& [p, w] : m.entries) {
        if (p.is_cemetery()) continue;
        out.entries.emplace_back(p, w / mass);
    }
    return Belief(std::move(out));
}

// Injective, hashable key for belief deduplication: entries are already in
// reduced-fraction sorted form, so a direct byte encoding is canonical.
inline std::string canonical_key(const Belief& b) {
    std::string key;
    key.reserve(b.entries().size() * 20);
    auto put = [&key](std::int64_t v) {
        key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    for (const auto& [p, w] : b.entries()) {
        put(p.v);
        put(w.num());
        put(w.den());
    }
    return key;
}

// Self-mapping on the extended state set. Internally the cemetery occupies
// slot n (n = |X|), which keeps composition a plain table walk. Every
// mapping produced by this library fixes the cemetery.
class StepMapping {
  public:
    StepMapping(StateIndex n_states, std::vector<StateIndex> table)
        : n_(n_states), tab_(std::move(table)) {
        if (tab_.size() != static_cast<std::size_t>(n_) + 1)
            throw InternalError("step mapping table has wrong length");
        if (tab_[n_] != n_) throw InternalError("step mapping must fix the cemetery");
        for (StateIndex v : tab_)
            if (v < 0 || v > n_) throw InternalError("step mapping value out of range");
    }

    static StepMapping identity(StateIndex n_states) {
        std::vector<StateIndex> t(static_cast<std::size_t>(n_states) + 1);
        for (StateIndex i = 0; i <= n_states; ++i) t[i] = i;
        return StepMapping(n_states, std::move(t));
    }

    StateIndex n_states() const { return n_; }

    ExtendedState apply(ExtendedState x) const {
        StateIndex slot = x.is_cemetery() ? n_ : x.v;
        if (slot < 0 || slot > n_) throw InternalError("step mapping applied out of domain");
        StateIndex img = tab_[slot];
        return img == n_ ? ExtendedState::cemetery() : ExtendedState::state(img);
    }

    // Raw slot table; slot/value n encodes the cemetery.
    const std::vector<StateIndex>& table() const { return tab_; }

    friend bool operator==(const StepMapping& a, const StepMapping& b) {
        return a.n_ == b.n_ && a.tab_ == b.tab_;
    }
    friend bool operator!=(const StepMapping& a, const StepMapping& b) { return !(a == b); }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(n_) + 0x517cc1b727220a95ull;
        for (StateIndex v : tab_) h = h * 1099511628211ull + static_cast<std::size_t>(v);
        return h;
    }

  private:
    StateIndex n_;
    std::vector<StateIndex> tab_;
};

struct StepMappingHash {
    std::size_t operator()(const StepMapping& g) const { return g.hash(); }
};

// Image measure: (g⋆m)(d) = m(g⁻¹(d)). Total mass is preserved.
inline Measure pushforward(const StepMapping& g, const Measure& m) {
    std::vector<std::pair<ExtendedState, Rational>> pairs;
    pairs.reserve(m.entries.size());
    for (const auto& [p, w] : m.entries) pairs.emplace_back(g.apply(p), w);
    return Measure::from_pairs(std::move(pairs));
}

inline Measure pushforward(const StepMapping& g, const Belief& b) {
    return pushforward(g, b.as_measure());
}

// Y-forward restriction of a state map f : X → X. Keeps f(x) only when the
// image lands in Y; everything else (and ∂ itself) goes to ∂.
inline StepMapping forward_restrict(const std::vector<StateIndex>& f,
                                    const std::vector<bool>& in_Y) {
    const StateIndex n = static_cast<StateIndex>(f.size());
    if (in_Y.size() != f.size()) throw InternalError("forward_restrict: domain size mismatch");
    std::vector<StateIndex> tab(static_cast<std::size_t>(n) + 1, n);
    for (StateIndex x = 0; x < n; ++x) {
        StateIndex y = f[x];
        if (y < 0 || y >= n) throw InternalError("forward_restrict: map value out of range");
        tab[x] = in_Y[y] ? y : n;
    }
    return StepMapping(n, std::move(tab));
}

// Y-backward restriction: keeps f on the domain subset Y, ∂ elsewhere.
inline StepMapping backward_restrict(const std::vector<StateIndex>& f,
                                     const std::vector<bool>& in_Y) {
    const StateIndex n = static_cast<StateIndex>(f.size());
    if (in_Y.size() != f.size()) throw InternalError("backward_restrict: domain size mismatch");
    std::vector<StateIndex> tab(static_cast<std::size_t>(n) + 1, n);
    for (StateIndex x = 0; x < n; ++x) {
        StateIndex y = f[x];
        if (y < 0 || y >= n) throw InternalError("backward_restrict: map value out of range");
        tab[x] = in_Y[x] ? y : n;
    }
    return StepMapping(n, std::move(tab));
}

// Pointwise composition g2 ∘ g1. Fixes ∂ because both factors do.
inline StepMapping compose_mappings(const StepMapping& g2, const StepMapping& g1) {
    if (g1.n_states() != g2.n_states())
        throw InternalError("compose_mappings: mismatched state counts");
    const StateIndex n = g1.n_states();
    std::vector<StateIndex> tab(static_cast<std::size_t>(n) + 1);
    const auto& t1 = g1.table();
    const auto& t2 = g2.table();
    for (StateIndex x = 0; x <= n; ++x) tab[x] = t2[t1[x]];
    return StepMapping(n, std::move(tab));
}

}  // namespace detpomdp
