#pragma once

// Det-POMDP problem instances: the data tuple (time steps, states, controls,
// observations, evolution functions, observation functions, costs,
// admissibility), validation, and the instance generators.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detpomdp/errors.hpp"
#include "detpomdp/extended_value.hpp"
#include "detpomdp/measure.hpp"
#include "detpomdp/rational.hpp"

namespace detpomdp {

using ControlIndex = std::int32_t;
using ObsIndex = std::int32_t;

// Optional declared algebraic structure of the dynamics, used by the
// separation analysis. Declarations are verified against the dynamics table
// before being trusted.
struct StructureAnnotation {
    enum class Kind { affine, product };
    Kind kind = Kind::affine;
    // g[slice][u]; slice count matches the model's table slicing.
    std::vector<std::vector<std::int64_t>> g;
};

struct ValidationIssue {
    enum class Severity { warning, error };
    Severity severity = Severity::error;
    std::string path;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;

    void add_error(std::string path, std::string message) {
        issues.push_back({ValidationIssue::Severity::error, std::move(path), std::move(message)});
        ok = false;
    }
    void add_warning(std::string path, std::string message) {
        issues.push_back({ValidationIssue::Severity::warning, std::move(path), std::move(message)});
    }
};

class DetPomdpModel {
  public:
    std::int32_t horizon = 1;  // time set is {0,...,horizon}
    bool stationary = true;    // one table slice replicated across all t

    std::vector<std::string> states;
    std::vector<std::string> controls;
    std::vector<std::string> observations;

    // Tables are sliced by time: one slice when stationary, `horizon`
    // slices otherwise. Inner layout is [x][u] (or [x] where noted).
    std::vector<std::vector<std::vector<StateIndex>>> dynamics;    // f_t : X×U → X
    std::vector<ObsIndex> obs0;                                    // h_0 : X → O
    std::vector<std::vector<std::vector<ObsIndex>>> obs;           // h_{t+1} : X×U → O
    std::vector<std::vector<std::vector<ExtendedValue>>> cost;     // L_t : X×U → ℝ∪{+∞}
    std::vector<ExtendedValue> final_cost;                         // K : X → ℝ∪{+∞}
    std::vector<std::vector<std::vector<ControlIndex>>> admissible;  // U^ad_t : X ⇉ U

    std::optional<std::map<std::string, Rational>> initial_belief;
    std::optional<StructureAnnotation> structure;

    // Issues discovered while reading the document that are reported through
    // validate_model (e.g. malformed rational literals).
    std::vector<ValidationIssue> pending_issues;

    StateIndex n_states() const { return static_cast<StateIndex>(states.size()); }
    ControlIndex n_controls() const { return static_cast<ControlIndex>(controls.size()); }
    ObsIndex n_observations() const { return static_cast<ObsIndex>(observations.size()); }
    std::size_t n_slices() const { return stationary ? 1 : static_cast<std::size_t>(horizon); }
    std::size_t slice(std::int32_t t) const { return stationary ? 0 : static_cast<std::size_t>(t); }

    StateIndex f(std::int32_t t, StateIndex x, ControlIndex u) const {
        return dynamics[slice(t)][x][u];
    }
    ObsIndex h0(StateIndex x) const { return obs0[x]; }
    // Observation produced at time t+1 after applying u at time t.
    ObsIndex h_next(std::int32_t t, StateIndex x_next, ControlIndex u) const {
        return obs[slice(t)][x_next][u];
    }
    const ExtendedValue& L(std::int32_t t, StateIndex x, ControlIndex u) const {
        return cost[slice(t)][x][u];
    }
    const ExtendedValue& K(StateIndex x) const { return final_cost[x]; }
    const std::vector<ControlIndex>& admissible_at(std::int32_t t, StateIndex x) const {
        return admissible[slice(t)][x];
    }

    // The f_t(·,u) column as a plain table over X.
    std::vector<StateIndex> dynamics_column(std::int32_t t, ControlIndex u) const {
        std::vector<StateIndex> col(states.size());
        for (StateIndex x = 0; x < n_states(); ++x) col[x] = f(t, x, u);
        return col;
    }

    // True when the belief dynamics are time-invariant: either a single
    // table slice, or identical dynamics/observation slices at every t
    // (costs may still vary).
    bool dynamics_obs_stationary() const {
        if (stationary) return true;
        for (std::size_t t = 1; t < dynamics.size(); ++t)
            if (dynamics[t] != dynamics[0]) return false;
        for (std::size_t t = 1; t < obs.size(); ++t)
            if (obs[t] != obs[0]) return false;
        return true;
    }

    std::optional<Belief> initial_belief_value() const {
        if (!initial_belief) return std::nullopt;
        std::vector<std::pair<StateIndex, Rational>> w;
        for (const auto& [label, weight] : *initial_belief) {
            auto it = std::find(states.begin(), states.end(), label);
            if (it == states.end())
                throw ModelError("initial belief on unknown state label '" + label + "'");
            w.emplace_back(static_cast<StateIndex>(it - states.begin()), weight);
        }
        return make_belief(w, n_states());
    }
};

// --------------------------------------------------------------------------
// Validation

namespace detail {

inline std::string idx3(const char* name, std::size_t a, std::size_t b, std::size_t c) {
    return std::string(name) + "[" + std::to_string(a) + "][" + std::to_string(b) + "][" +
           std::to_string(c) + "]";
}

inline void check_labels(const std::vector<std::string>& labels, const char* name,
                         ValidationReport& r) {
    if (labels.empty()) r.add_error(name, "set must be non-empty");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            if (labels[i] == labels[j]) {
                r.add_error(std::string(name) + "[" + std::to_string(j) + "]",
                            "duplicate label '" + labels[j] + "'");
            }
        }
    }
}

}  // namespace detail

// Checks every structural invariant of the data tuple: finite non-empty sets,
// total tables, in-range indices, well-formed costs and initial belief.
// Violations are report entries, never exceptions.
inline ValidationReport validate_model(const DetPomdpModel& m) {
    ValidationReport r;
    for (const auto& issue : m.pending_issues) {
        r.issues.push_back(issue);
        if (issue.severity == ValidationIssue::Severity::error) r.ok = false;
    }

    if (m.horizon < 1) r.add_error("horizon", "horizon must be a positive integer");
    detail::check_labels(m.states, "states", r);
    detail::check_labels(m.controls, "controls", r);
    detail::check_labels(m.observations, "observations", r);

    const std::size_t nx = m.states.size();
    const std::size_t nu = m.controls.size();
    const std::size_t no = m.observations.size();
    const std::size_t slices = m.stationary ? 1 : static_cast<std::size_t>(std::max(m.horizon, 1));

    auto check_slices = [&](const char* name, std::size_t got) {
        if (got != slices) {
            r.add_error(name, "expected " + std::to_string(slices) + " time slice(s), got " +
                                  std::to_string(got));
            return false;
        }
        return true;
    };

    if (check_slices("dynamics", m.dynamics.size())) {
        for (std::size_t t = 0; t < m.dynamics.size(); ++t) {
            if (m.dynamics[t].size() != nx) {
                r.add_error("dynamics[" + std::to_string(t) + "]", "expected one row per state");
                continue;
            }
            for (std::size_t x = 0; x < nx; ++x) {
                if (m.dynamics[t][x].size() != nu) {
                    r.add_error("dynamics[" + std::to_string(t) + "][" + std::to_string(x) + "]",
                                "expected one entry per control");
                    continue;
                }
                for (std::size_t u = 0; u < nu; ++u) {
                    StateIndex y = m.dynamics[t][x][u];
                    if (y < 0 || static_cast<std::size_t>(y) >= nx)
                        r.add_error(detail::idx3("dynamics", t, x, u),
                                    "state index " + std::to_string(y) + " out of range");
                }
            }
        }
    }

    if (m.obs0.size() != nx) {
        r.add_error("obs0", "expected one entry per state");
    } else {
        for (std::size_t x = 0; x < nx; ++x) {
            if (m.obs0[x] < 0 || static_cast<std::size_t>(m.obs0[x]) >= no)
                r.add_error("obs0[" + std::to_string(x) + "]", "observation index out of range");
        }
    }

    if (check_slices("obs", m.obs.size())) {
        for (std::size_t t = 0; t < m.obs.size(); ++t) {
            if (m.obs[t].size() != nx) {
                r.add_error("obs[" + std::to_string(t) + "]", "expected one row per state");
                continue;
            }
            for (std::size_t x = 0; x < nx; ++x) {
                if (m.obs[t][x].size() != nu) {
                    r.add_error("obs[" + std::to_string(t) + "][" + std::to_string(x) + "]",
                                "expected one entry per control");
                    continue;
                }
                for (std::size_t u = 0; u < nu; ++u) {
                    ObsIndex o = m.obs[t][x][u];
                    if (o < 0 || static_cast<std::size_t>(o) >= no)
                        r.add_error(detail::idx3("obs", t, x, u),
                                    "observation index " + std::to_string(o) + " out of range");
                }
            }
        }
    }

    if (check_slices("cost", m.cost.size())) {
        for (std::size_t t = 0; t < m.cost.size(); ++t) {
            if (m.cost[t].size() != nx) {
                r.add_error("cost[" + std::to_string(t) + "]", "expected one row per state");
                continue;
            }
            for (std::size_t x = 0; x < nx; ++x) {
                if (m.cost[t][x].size() != nu)
                    r.add_error("cost[" + std::to_string(t) + "][" + std::to_string(x) + "]",
                                "expected one entry per control");
            }
        }
    }
    if (m.final_cost.size() != nx) r.add_error("final_cost", "expected one entry per state");

    if (check_slices("admissible", m.admissible.size())) {
        for (std::size_t t = 0; t < m.admissible.size(); ++t) {
            if (m.admissible[t].size() != nx) {
                r.add_error("admissible[" + std::to_string(t) + "]",
                            "expected one entry per state");
                continue;
            }
            for (std::size_t x = 0; x < nx; ++x) {
                const auto& set = m.admissible[t][x];
                for (std::size_t k = 0; k < set.size(); ++k) {
                    if (set[k] < 0 || static_cast<std::size_t>(set[k]) >= nu)
                        r.add_error("admissible[" + std::to_string(t) + "][" + std::to_string(x) +
                                        "][" + std::to_string(k) + "]",
                                    "control index out of range");
                    if (k > 0 && set[k] <= set[k - 1])
                        r.add_error("admissible[" + std::to_string(t) + "][" + std::to_string(x) +
                                        "]",
                                    "control indices must be strictly increasing");
                }
            }
        }
    }

    if (m.initial_belief) {
        Rational mass;
        bool belief_ok = true;
        for (const auto& [label, w] : *m.initial_belief) {
            if (std::find(m.states.begin(), m.states.end(), label) == m.states.end()) {
                r.add_error("initial_belief[" + label + "]", "unknown state label");
                belief_ok = false;
            }
            if (w.is_negative()) {
                r.add_error("initial_belief[" + label + "]", "negative probability");
                belief_ok = false;
            }
            mass += w;
        }
        if (belief_ok && mass != Rational::one())
            r.add_error("initial_belief", "probabilities sum to " + mass.str() + ", expected 1");
    }

    if (m.structure) {
        const auto& st = *m.structure;
        if (st.g.size() != slices) {
            r.add_error("structure.g", "expected " + std::to_string(slices) + " time slice(s)");
        } else {
            for (std::size_t t = 0; t < st.g.size(); ++t) {
                if (st.g[t].size() != nu)
                    r.add_error("structure.g[" + std::to_string(t) + "]",
                                "expected one entry per control");
            }
        }
        for (std::size_t x = 0; x < nx; ++x) {
            try {
                (void)std::stoll(m.states[x]);
            } catch (...) {
                r.add_error("structure", "state label '" + m.states[x] +
                                             "' is not numeric; structure requires numeric labels");
                break;
            }
        }
    }

    return r;
}

// --------------------------------------------------------------------------
// Deterministic pseudo-random stream (splitmix64), platform-independent.

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1u) != 0; }

  private:
    std::uint64_t state_;
};

// Deterministic "generic" belief: distinct pseudo-random numerators over the
// given support, normalized exactly.
inline Belief gen_random_belief(std::uint64_t seed, StateIndex n_states,
                                const std::vector<StateIndex>& support_states,
                                std::int64_t numerator_bound = (1 << 20)) {
    if (support_states.empty()) throw ModelError("belief support must be non-empty");
    RandomStream rng(seed);
    std::vector<std::int64_t> nums(support_states.size());
    std::int64_t total = 0;
    for (auto& n : nums) {
        n = rng.range(1, numerator_bound);
        total += n;
    }
    std::vector<std::pair<StateIndex, Rational>> w;
    w.reserve(nums.size());
    for (std::size_t i = 0; i < nums.size(); ++i)
        w.emplace_back(support_states[i], Rational(nums[i], total));
    return make_belief(w, n_states);
}

// --------------------------------------------------------------------------
// Generators

struct GenOutput {
    DetPomdpModel model;
    std::vector<std::string> warnings;
};

// Separated instance reaching the reachable-belief bound with equality:
// n states on a cycle, one control that rotates, one that stays put, and an
// observation that fires only at (x_n, stay).
inline DetPomdpModel gen_tight_bound(std::int32_t n) {
    if (n < 3) throw ModelError("gen_tight_bound requires n >= 3");
    DetPomdpModel m;
    m.horizon = 2 * n;
    m.stationary = true;
    for (std::int32_t i = 1; i <= n; ++i) m.states.push_back("x" + std::to_string(i));
    m.controls = {"u1", "u2"};
    m.observations = {"o1", "o2"};

    std::vector<std::vector<StateIndex>> f(n, std::vector<StateIndex>(2));
    std::vector<std::vector<ObsIndex>> h(n, std::vector<ObsIndex>(2));
    std::vector<std::vector<ExtendedValue>> L(n, std::vector<ExtendedValue>(2, ExtendedValue::zero()));
    std::vector<std::vector<ControlIndex>> ad(n, std::vector<ControlIndex>{0, 1});
    for (StateIndex x = 0; x < n; ++x) {
        f[x][0] = x;                // stay
        f[x][1] = (x + 1) % n;      // rotate the n-cycle
        h[x][0] = (x == n - 1) ? 1 : 0;
        h[x][1] = 0;
    }
    m.dynamics = {f};
    m.obs = {h};
    m.obs0.assign(n, 0);
    m.cost = {L};
    m.final_cost.assign(n, ExtendedValue::zero());
    m.admissible = {ad};
    m.initial_belief = std::map<std::string, Rational>{{"x1", Rational(1, 2)},
                                                       {"x2", Rational(1, 2)}};
    return m;
}

struct TankParams {
    std::vector<std::int64_t> states;      // water volumes, ascending
    std::vector<std::int64_t> controls;    // removable volumes, ascending
    std::vector<std::int64_t> thresholds;  // observation thresholds, ascending
    std::int32_t horizon = 1;
    std::vector<Rational> prices;  // c_t; cycled if shorter than horizon
    // Optional embedded initial belief over [b0_lo, b0_hi] (state values).
    std::optional<std::pair<std::int64_t, std::int64_t>> b0_range;
    std::uint64_t b0_seed = 1;

    static std::vector<Rational> default_prices() {
        // Periodic square wave, period 20, levels {1, 3}.
        std::vector<Rational> p;
        for (int t = 0; t < 20; ++t) p.emplace_back(t < 10 ? 1 : 3);
        return p;
    }

    static TankParams preset_instance_1() {
        TankParams p;
        for (std::int64_t x = 0; x <= 300; ++x) p.states.push_back(x);
        for (std::int64_t u = 0; u <= 9; ++u) p.controls.push_back(u);
        p.thresholds = {0, 1};
        for (std::int64_t o = 20; o <= 300; o += 20) p.thresholds.push_back(o);
        p.horizon = 100;
        p.prices = default_prices();
        p.b0_range = {{260, 300}};
        return p;
    }

    static TankParams preset_instance_2() {
        TankParams p = preset_instance_1();
        p.thresholds = {1, 6, 11, 51, 101, 151, 201, 251};
        return p;
    }
};

// Partially observed tank: empty a tank at minimum cost while only quantized
// volume levels are observed. f(x,u) = x - u (snapped down onto the state
// grid), h(x) = largest threshold below the volume, L_t(x,u) = c_t * u,
// U^ad(x) = {u <= x}.
inline GenOutput gen_tank(const TankParams& params) {
    GenOutput out;
    DetPomdpModel& m = out.model;

    if (params.states.empty() || params.controls.empty())
        throw ModelError("gen_tank requires non-empty state and control grids");
    if (!std::is_sorted(params.states.begin(), params.states.end()) ||
        !std::is_sorted(params.controls.begin(), params.controls.end()) ||
        !std::is_sorted(params.thresholds.begin(), params.thresholds.end()))
        throw ModelError("gen_tank grids must be sorted ascending");
    if (params.states.front() < 0 || params.controls.front() < 0)
        throw ModelError("gen_tank grids must be nonnegative");
    if (params.horizon < 1) throw ModelError("gen_tank requires horizon >= 1");
    if (params.thresholds.empty()) throw ModelError("gen_tank requires observation thresholds");
    if (params.controls.front() > params.states.back())
        throw ModelError("gen_tank: every control exceeds the largest state (degenerate)");
    if (params.prices.empty()) throw ModelError("gen_tank requires a price sequence");

    const std::int64_t min_state = params.states.front();
    const std::int64_t max_state = params.states.back();

    for (std::int64_t x : params.states) m.states.push_back(std::to_string(x));
    for (std::int64_t u : params.controls) m.controls.push_back(std::to_string(u));

    // States strictly below the smallest threshold observe a synthetic floor
    // observation so that h stays total.
    bool needs_floor = params.thresholds.front() > min_state;
    if (needs_floor) {
        m.observations.push_back("floor");
        out.warnings.push_back(
            "states below the smallest threshold observe the synthetic 'floor' observation");
    }
    for (std::int64_t o : params.thresholds) {
        m.observations.push_back(std::to_string(o));
        if (o > max_state)
            out.warnings.push_back("threshold " + std::to_string(o) +
                                   " exceeds the largest state and is never observed");
    }
    const ObsIndex obs_base = needs_floor ? 1 : 0;

    const StateIndex nx = static_cast<StateIndex>(params.states.size());
    const ControlIndex nu = static_cast<ControlIndex>(params.controls.size());

    auto state_at_or_below = [&](std::int64_t v) -> StateIndex {
        // Largest grid index with value <= v; bottom of the grid if none.
        auto it = std::upper_bound(params.states.begin(), params.states.end(), v);
        if (it == params.states.begin()) return 0;
        return static_cast<StateIndex>((it - params.states.begin()) - 1);
    };
    auto observe = [&](std::int64_t v) -> ObsIndex {
        auto it = std::upper_bound(params.thresholds.begin(), params.thresholds.end(), v);
        if (it == params.thresholds.begin()) return 0;  // floor observation
        return obs_base + static_cast<ObsIndex>((it - params.thresholds.begin()) - 1);
    };

    std::vector<std::vector<StateIndex>> f(nx, std::vector<StateIndex>(nu));
    std::vector<std::vector<ObsIndex>> h(nx, std::vector<ObsIndex>(nu));
    std::vector<std::vector<ControlIndex>> ad(nx);
    for (StateIndex x = 0; x < nx; ++x) {
        for (ControlIndex u = 0; u < nu; ++u) {
            f[x][u] = state_at_or_below(params.states[x] - params.controls[u]);
            h[x][u] = observe(params.states[x]);  // level observation, control-independent
        }
        for (ControlIndex u = 0; u < nu; ++u)
            if (params.controls[u] <= params.states[x]) ad[x].push_back(u);
    }

    m.horizon = params.horizon;
    m.obs0.resize(nx);
    for (StateIndex x = 0; x < nx; ++x) m.obs0[x] = observe(params.states[x]);

    // Price-dependent costs make the model time-varying unless all prices
    // coincide over the horizon.
    std::vector<Rational> c(params.horizon);
    for (std::int32_t t = 0; t < params.horizon; ++t)
        c[t] = params.prices[t % params.prices.size()];
    bool flat = std::all_of(c.begin(), c.end(), [&](const Rational& v) { return v == c[0]; });

    m.stationary = flat;
    const std::size_t slices = flat ? 1 : static_cast<std::size_t>(params.horizon);
    m.dynamics.assign(slices, f);
    m.obs.assign(slices, h);
    m.admissible.assign(slices, ad);
    m.cost.resize(slices);
    for (std::size_t t = 0; t < slices; ++t) {
        m.cost[t].assign(nx, std::vector<ExtendedValue>(nu));
        for (StateIndex x = 0; x < nx; ++x)
            for (ControlIndex u = 0; u < nu; ++u)
                m.cost[t][x][u] = ExtendedValue(c[t] * Rational(params.controls[u]));
    }
    m.final_cost.assign(nx, ExtendedValue::zero());

    StructureAnnotation st;
    st.kind = StructureAnnotation::Kind::affine;
    st.g.assign(slices, std::vector<std::int64_t>());
    for (std::size_t t = 0; t < slices; ++t)
        for (ControlIndex u = 0; u < nu; ++u) st.g[t].push_back(-params.controls[u]);
    m.structure = st;

    if (params.b0_range) {
        auto [lo, hi] = *params.b0_range;
        std::vector<StateIndex> supp;
        for (StateIndex x = 0; x < nx; ++x)
            if (params.states[x] >= lo && params.states[x] <= hi) supp.push_back(x);
        Belief b0 = gen_random_belief(params.b0_seed, nx, supp);
        std::map<std::string, Rational> doc;
        for (const auto& [p, w] : b0.entries()) doc[m.states[p.v]] = w;
        m.initial_belief = std::move(doc);
    }

    return out;
}

struct RandomSizes {
    StateIndex nx = 2;
    ControlIndex nu = 2;
    ObsIndex no = 2;
    std::int32_t horizon = 2;
};

struct RandomOptions {
    bool affine = false;     // shift dynamics, clamped to the grid, annotated
    bool product = false;    // multiplicative dynamics on power-of-two labels
    bool cyclic = false;     // shift dynamics modulo |X| (no annotation)
    bool full_admissible = false;
    bool guarded_admissible = false;  // admissible iff the shift stays on the grid
    bool allow_infinite_costs = false;
    bool allow_empty_admissible = false;
    bool isolate_boundaries = false;  // clamp points get their own observation
    // Affine shifts drawn from [-3, 0] so the clamped boundary is absorbing;
    // combined with isolate_boundaries this keeps the composed step mappings
    // exactly ∂-separated, not just structurally declared.
    bool monotone_structure = false;
    std::int64_t cost_num_max = 8;
    std::int64_t cost_den_max = 4;
};

// Seed-deterministic random instance; two calls with equal arguments produce
// identical models.
inline DetPomdpModel gen_random(std::uint64_t seed, const RandomSizes& sizes,
                                const RandomOptions& options = {}) {
    if (sizes.nx < 1 || sizes.nu < 1 || sizes.no < 1 || sizes.horizon < 1)
        throw ModelError("gen_random requires all sizes >= 1");
    if (options.isolate_boundaries && sizes.no < 3)
        throw ModelError("gen_random: isolating boundaries requires >= 3 observations");

    RandomStream rng(seed);
    DetPomdpModel m;
    m.horizon = sizes.horizon;
    m.stationary = rng.coin();
    const std::size_t slices = m.stationary ? 1 : static_cast<std::size_t>(sizes.horizon);

    const bool structured = options.affine || options.product || options.cyclic;
    std::vector<std::int64_t> values(sizes.nx);
    if (options.product) {
        for (StateIndex i = 0; i < sizes.nx; ++i) values[i] = std::int64_t{1} << i;
    } else {
        for (StateIndex i = 0; i < sizes.nx; ++i) values[i] = i;
    }
    for (StateIndex i = 0; i < sizes.nx; ++i)
        m.states.push_back(structured ? std::to_string(values[i]) : "s" + std::to_string(i));
    for (ControlIndex i = 0; i < sizes.nu; ++i) m.controls.push_back("u" + std::to_string(i));
    for (ObsIndex i = 0; i < sizes.no; ++i) m.observations.push_back("o" + std::to_string(i));

    std::vector<std::vector<std::int64_t>> g;  // structured shift/factor per slice
    if (options.affine || options.cyclic) {
        g.resize(slices);
        for (auto& row : g) {
            row.resize(sizes.nu);
            for (auto& v : row) v = options.monotone_structure ? rng.range(-3, 0)
                                                               : rng.range(-3, 3);
        }
    } else if (options.product) {
        g.resize(slices);
        for (auto& row : g) {
            row.resize(sizes.nu);
            for (auto& v : row) v = std::int64_t{1} << rng.range(0, 2);  // 1, 2 or 4
        }
    }

    auto value_index = [&](std::int64_t v) -> StateIndex {
        auto it = std::find(values.begin(), values.end(), v);
        return it == values.end() ? -1 : static_cast<StateIndex>(it - values.begin());
    };

    m.dynamics.resize(slices);
    m.obs.resize(slices);
    m.cost.resize(slices);
    m.admissible.resize(slices);
    for (std::size_t t = 0; t < slices; ++t) {
        auto& f = m.dynamics[t];
        auto& h = m.obs[t];
        auto& L = m.cost[t];
        auto& ad = m.admissible[t];
        f.assign(sizes.nx, std::vector<StateIndex>(sizes.nu));
        h.assign(sizes.nx, std::vector<ObsIndex>(sizes.nu));
        L.assign(sizes.nx, std::vector<ExtendedValue>(sizes.nu));
        ad.assign(sizes.nx, {});

        for (StateIndex x = 0; x < sizes.nx; ++x) {
            for (ControlIndex u = 0; u < sizes.nu; ++u) {
                if (options.cyclic) {
                    std::int64_t y = ((x + g[t][u]) % sizes.nx + sizes.nx) % sizes.nx;
                    f[x][u] = static_cast<StateIndex>(y);
                } else if (options.affine) {
                    std::int64_t y = x + g[t][u];
                    if (y < 0) y = 0;
                    if (y >= sizes.nx) y = sizes.nx - 1;
                    f[x][u] = static_cast<StateIndex>(y);
                } else if (options.product) {
                    std::int64_t y = values[x] * g[t][u];
                    StateIndex idx = value_index(y);
                    f[x][u] = idx >= 0 ? idx : sizes.nx - 1;  // clamp to the top
                } else {
                    f[x][u] = static_cast<StateIndex>(rng.below(sizes.nx));
                }

                if (options.isolate_boundaries) {
                    // Reserve o0 / o1 for the grid boundaries so clamped mass
                    // is always observed in a singleton cell.
                    StateIndex y = f[x][u];
                    (void)y;
                    h[x][u] = 0;  // filled below per next-state
                } else {
                    h[x][u] = static_cast<ObsIndex>(rng.below(sizes.no));
                }

                Rational base(rng.range(0, options.cost_num_max),
                              rng.range(1, options.cost_den_max));
                bool inf = options.allow_infinite_costs && rng.below(8) == 0;
                L[x][u] = inf ? ExtendedValue::infinity() : ExtendedValue(base);
            }
        }

        if (options.isolate_boundaries) {
            // The h table is indexed by the arrival state: boundary states own
            // dedicated observations, interior states draw from the rest.
            for (StateIndex y = 0; y < sizes.nx; ++y)
                for (ControlIndex u = 0; u < sizes.nu; ++u) {
                    if (y == 0)
                        h[y][u] = 0;
                    else if (y == sizes.nx - 1)
                        h[y][u] = 1;
                    else
                        h[y][u] = 2 + static_cast<ObsIndex>(rng.below(sizes.no - 2));
                }
        }

        for (StateIndex x = 0; x < sizes.nx; ++x) {
            if (options.full_admissible) {
                for (ControlIndex u = 0; u < sizes.nu; ++u) ad[x].push_back(u);
            } else if (options.guarded_admissible && (options.affine || options.product)) {
                for (ControlIndex u = 0; u < sizes.nu; ++u) {
                    std::int64_t y = options.affine ? x + g[t][u] : values[x] * g[t][u];
                    bool in_range = options.affine
                                        ? (y >= 0 && y < sizes.nx)
                                        : (value_index(y) >= 0);
                    if (in_range) ad[x].push_back(u);
                }
            } else {
                for (ControlIndex u = 0; u < sizes.nu; ++u)
                    if (rng.below(4) != 0) ad[x].push_back(u);
                if (ad[x].empty() && !options.allow_empty_admissible)
                    ad[x].push_back(static_cast<ControlIndex>(rng.below(sizes.nu)));
            }
        }
    }

    if (options.isolate_boundaries) {
        m.obs0.resize(sizes.nx);
        for (StateIndex x = 0; x < sizes.nx; ++x)
            m.obs0[x] = x == 0 ? 0 : (x == sizes.nx - 1 ? 1 : 2);
    } else {
        m.obs0.resize(sizes.nx);
        for (StateIndex x = 0; x < sizes.nx; ++x)
            m.obs0[x] = static_cast<ObsIndex>(rng.below(sizes.no));
    }

    m.final_cost.resize(sizes.nx);
    for (StateIndex x = 0; x < sizes.nx; ++x) {
        bool inf = options.allow_infinite_costs && rng.below(8) == 0;
        m.final_cost[x] = inf ? ExtendedValue::infinity()
                              : ExtendedValue(Rational(rng.range(0, options.cost_num_max),
                                                       rng.range(1, options.cost_den_max)));
    }

    if (options.affine || options.product) {
        StructureAnnotation st;
        st.kind = options.affine ? StructureAnnotation::Kind::affine
                                 : StructureAnnotation::Kind::product;
        st.g = g;
        m.structure = st;
    }

    return m;
}

}  // namespace detpomdp
