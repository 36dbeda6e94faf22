#pragma once

// Belief dynamics: the observation probability Q_{t+1}(b,u,o), the belief
// transition τ_t(b,u,o), and the equivalent pushforward representation
// τ_t(·,u,o) = R ∘ (F^{u,o}_t)⋆ with F^{u,o}_t the observation-consistent
// restriction of the dynamics.

#include <algorithm>
#include <utility>
#include <vector>

#include "detpomdp/errors.hpp"
#include "detpomdp/measure.hpp"
#include "detpomdp/model.hpp"

namespace detpomdp {

// Index triple identifying one belief-transition mapping.
struct StepKey {
    std::int32_t t = 0;
    ControlIndex u = 0;
    ObsIndex o = 0;

    friend bool operator==(const StepKey& a, const StepKey& b) {
        return a.t == b.t && a.u == b.u && a.o == b.o;
    }
};

namespace detail {

inline void check_step_indices(const DetPomdpModel& m, std::int32_t t, ControlIndex u,
                               ObsIndex o) {
    if (t < 0 || t >= m.horizon)
        throw ContractViolation("time index " + std::to_string(t) + " out of range");
    if (u < 0 || u >= m.n_controls()) throw ContractViolation("control index out of range");
    if (o < 0 || o >= m.n_observations()) throw ContractViolation("observation index out of range");
}

}  // namespace detail

// Probability of observing o at time t+1 after applying u under belief b:
// b((h^u_{t+1} ∘ f^u_t)⁻¹(o)). Zero at the cemetery belief.
inline Rational obs_prob(const DetPomdpModel& m, std::int32_t t, const Belief& b, ControlIndex u,
                         ObsIndex o) {
    detail::check_step_indices(m, t, u, o);
    if (b.is_cemetery()) return Rational::zero();
    Rational q;
    for (const auto& [p, w] : b.entries()) {
        StateIndex y = m.f(t, p.v, u);
        if (m.h_next(t, y, u) == o) q += w;
    }
    return q;
}

// One filtering step. If the observation has positive probability the result
// is the renormalized dynamics image restricted to the states consistent
// with o; otherwise the cemetery belief. The cemetery is absorbing.
inline Belief belief_step(const DetPomdpModel& m, std::int32_t t, const Belief& b, ControlIndex u,
                          ObsIndex o) {
    detail::check_step_indices(m, t, u, o);
    if (b.is_cemetery()) return Belief::cemetery();

    Rational q;
    std::vector<std::pair<ExtendedState, Rational>> kept;
    kept.reserve(b.entries().size());
    for (const auto& [p, w] : b.entries()) {
        StateIndex y = m.f(t, p.v, u);
        if (m.h_next(t, y, u) == o) {
            q += w;
            kept.emplace_back(ExtendedState::state(y), w);
        }
    }
    if (q.is_zero()) return Belief::cemetery();

    for (auto& [p, w] : kept) w /= q;
    return renormalize(Measure::from_pairs(std::move(kept)));
}

// The self-mapping F^{u,o}_t on the extended state set: applies f_t(·,u) and
// keeps the result only when it is consistent with observing o.
inline StepMapping step_mapping(const DetPomdpModel& m, std::int32_t t, ControlIndex u,
                                ObsIndex o) {
    detail::check_step_indices(m, t, u, o);
    const StateIndex n = m.n_states();
    std::vector<StateIndex> f(n);
    std::vector<bool> in_cell(n, false);
    for (StateIndex x = 0; x < n; ++x) {
        f[x] = m.f(t, x, u);
        if (m.h_next(t, x, u) == o) in_cell[x] = true;
    }
    return forward_restrict(f, in_cell);
}

inline StepMapping step_mapping(const DetPomdpModel& m, const StepKey& k) {
    return step_mapping(m, k.t, k.u, k.o);
}

// The pushforward representation of the same step: renormalize(F^{u,o}_t ⋆ b).
inline Belief belief_step_via_pushforward(const DetPomdpModel& m, std::int32_t t, const Belief& b,
                                          ControlIndex u, ObsIndex o) {
    return renormalize(pushforward(step_mapping(m, t, u, o), b.as_measure()));
}

// All positive-probability outcomes of applying control u to belief b in one
// pass: the per-observation probabilities and successor beliefs, ordered by
// observation index. Observations absent from the result have Q = 0 and
// successor δ_∂. Agrees with belief_step / obs_prob pointwise.
struct StepOutcome {
    ObsIndex o;
    Rational prob;
    Belief next;
};

inline std::vector<StepOutcome> expand_control(const DetPomdpModel& m, std::int32_t t,
                                               const Belief& b, ControlIndex u) {
    if (b.is_cemetery()) throw ContractViolation("expand_control at the cemetery belief");
    if (t < 0 || t >= m.horizon || u < 0 || u >= m.n_controls())
        throw ContractViolation("expand_control index out of range");

    // (o, y, w) triples for the whole support, grouped by observation.
    struct Moved {
        ObsIndex o;
        StateIndex y;
        Rational w;
    };
    std::vector<Moved> moved;
    moved.reserve(b.entries().size());
    for (const auto& [p, w] : b.entries()) {
        StateIndex y = m.f(t, p.v, u);
        moved.push_back({m.h_next(t, y, u), y, w});
    }
    std::sort(moved.begin(), moved.end(), [](const Moved& a, const Moved& b) {
        return a.o != b.o ? a.o < b.o : a.y < b.y;
    });

    std::vector<StepOutcome> out;
    std::size_t i = 0;
    while (i < moved.size()) {
        std::size_t j = i;
        Rational q;
        while (j < moved.size() && moved[j].o == moved[i].o) {
            q += moved[j].w;
            ++j;
        }
        Measure mres;
        mres.entries.reserve(j - i);
        for (std::size_t k = i; k < j; ++k) {
            if (!mres.entries.empty() && mres.entries.back().first.v == moved[k].y) {
                mres.entries.back().second += moved[k].w;
            } else {
                mres.entries.emplace_back(ExtendedState::state(moved[k].y), moved[k].w);
            }
        }
        out.push_back({moved[i].o, q, renormalize(mres)});
        i = j;
    }
    return out;
}

}  // namespace detpomdp
