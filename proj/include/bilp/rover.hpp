#pragma once

#include "bilp/decmdp.hpp"
#include "bilp/rng.hpp"

#include <set>

namespace bilp {

/**
 * Planetary-rover benchmark generator: two identical rovers visit `sites` in
 * order within `horizon` time units, choosing at each site to run an
 * experiment or skip. Experiment durations follow a per-site discretized
 * normal distribution (mean uniform in [4,6], variance 0.4 of the mean,
 * probability mass on integer durations 1..horizon by CDF differences,
 * renormalized). Completing an experiment earns the site's reward (uniform
 * in [0.1,1]); when both rovers run the experiment at a shared site, half
 * the site reward is added jointly, regardless of timing.
 */
struct RoverConfig {
    std::size_t sites = 6;
    std::size_t horizon = 15;
    std::set<std::size_t> shared_sites; // 1-based site indexes
    std::uint64_t seed = 0;
};

namespace detail {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace detail

inline DecMdp generate_rover(const RoverConfig& config) {
    const std::size_t sites = config.sites, horizon = config.horizon;
    if (sites == 0 || horizon == 0) throw std::invalid_argument("generate_rover: empty geometry");
    for (std::size_t k : config.shared_sites)
        if (k < 1 || k > sites) throw std::invalid_argument("generate_rover: shared site out of range");

    SplitMix64 rng(config.seed);
    std::vector<dvec> duration(sites); // pmf over 1..horizon per site
    dvec reward(sites);
    for (std::size_t k = 0; k < sites; ++k) {
        double mean = rng.uniform(4.0, 6.0);
        double sigma = std::sqrt(0.4 * mean);
        dvec pmf(horizon, 0.0);
        double total = 0.0;
        for (std::size_t d = 1; d <= horizon; ++d) {
            double lo = (double(d) - 0.5 - mean) / sigma;
            double hi = (double(d) + 0.5 - mean) / sigma;
            pmf[d - 1] = detail::normal_cdf(hi) - detail::normal_cdf(lo);
            total += pmf[d - 1];
        }
        for (double& v : pmf)
            v /= total;
        duration[k] = pmf;
        reward[k] = rng.uniform(0.1, 1.0);
    }

    // state (site k, remaining time t) for k in 1..sites, t in 1..horizon,
    // plus one absorbing terminal; full grid kept even where unreachable
    const std::size_t grid = sites * horizon;
    const std::size_t terminal = grid;
    auto state_of = [&](std::size_t k, std::size_t t) { return (k - 1) * horizon + (t - 1); };

    AgentModel agent;
    agent.states.reserve(grid + 1);
    for (std::size_t k = 1; k <= sites; ++k)
        for (std::size_t t = 1; t <= horizon; ++t)
            agent.states.push_back("site" + std::to_string(k) + "_t" + std::to_string(t));
    agent.states.push_back("done");
    agent.actions = {"experiment", "skip"};
    agent.terminal.assign(grid + 1, false);
    agent.terminal[terminal] = true;
    agent.initial.assign(grid + 1, 0.0);
    agent.initial[state_of(1, horizon)] = 1.0;
    agent.transition.assign(2, DenseMatrix(grid + 1, grid + 1));
    agent.local_reward = DenseMatrix(grid + 1, 2);

    for (std::size_t k = 1; k <= sites; ++k) {
        for (std::size_t t = 1; t <= horizon; ++t) {
            std::size_t s = state_of(k, t);
            // experiment: duration d completes when d <= t
            double complete = 0.0;
            for (std::size_t d = 1; d <= horizon; ++d) {
                double pr = duration[k - 1][d - 1];
                if (pr == 0.0) continue;
                if (d <= t) complete += pr;
                std::size_t next = (d < t && k < sites) ? state_of(k + 1, t - d) : terminal;
                agent.transition[0](s, next) += pr;
            }
            agent.local_reward(s, 0) = reward[k - 1] * complete;
            // skip: site advances, time does not
            std::size_t next = k < sites ? state_of(k + 1, t) : terminal;
            agent.transition[1](s, next) = 1.0;
        }
    }

    DecMdp m;
    m.agent1 = agent;
    m.agent2 = agent;
    m.joint_reward = DenseMatrix((grid + 1) * 2, (grid + 1) * 2);
    for (std::size_t k : config.shared_sites) {
        double bonus = reward[k - 1] / 2.0;
        for (std::size_t t1 = 1; t1 <= horizon; ++t1)
            for (std::size_t t2 = 1; t2 <= horizon; ++t2)
                m.joint_reward(m.agent1.pair_index(state_of(k, t1), 0),
                               m.agent2.pair_index(state_of(k, t2), 0)) = bonus;
    }
    return m;
}

} // namespace bilp
