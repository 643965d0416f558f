#pragma once

#include "bilp/bilinear.hpp"

#include <string>

namespace bilp {

struct InvalidModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * One agent's MDP, formulated as a stochastic shortest path problem: some
 * states are terminal, transitions out of them carry no probability, and the
 * positive-probability transition graph over the remaining states must be
 * acyclic (time always advances). `available` masks actions per state; an
 * empty mask means every action is available everywhere.
 */
struct AgentModel {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<bool> terminal;          // per state
    dvec initial;                        // per state, sums to 1
    std::vector<DenseMatrix> transition; // per action: |S| × |S| probabilities
    DenseMatrix local_reward;            // |S| × |A|
    DenseMatrix available;               // |S| × |A| 0/1 mask, may be empty

    std::size_t num_states() const { return states.size(); }
    std::size_t num_actions() const { return actions.size(); }

    bool is_available(std::size_t s, std::size_t a) const {
        return available.rows() == 0 || available(s, a) != 0.0;
    }

    bool is_terminal(std::size_t s) const { return terminal[s]; }

    /// flat (state, action) index over the full grid, used by joint rewards
    std::size_t pair_index(std::size_t s, std::size_t a) const { return s * num_actions() + a; }
};

/// Two transition- and observation-independent agents coupled only through
/// a joint reward on pairs of (state, action) grid indices.
struct DecMdp {
    AgentModel agent1, agent2;
    DenseMatrix joint_reward; // (|S1|·|A1|) × (|S2|·|A2|)
};

struct Policy {
    bool deterministic = true;
    // deterministic: chosen action index per state (meaningful off terminals)
    std::vector<std::size_t> action1, action2;
    // stochastic: action distribution per state
    DenseMatrix dist1, dist2;
};

namespace detail {

inline void validate_agent(const AgentModel& m, int which, bool allow_terminals) {
    const std::size_t ns = m.num_states(), na = m.num_actions();
    std::string tag = "agent " + std::to_string(which) + ": ";
    if (ns == 0 || na == 0) throw InvalidModel(tag + "empty state or action set");
    if (m.terminal.size() != ns || m.initial.size() != ns)
        throw InvalidModel(tag + "terminal/initial size mismatch");
    if (m.transition.size() != na) throw InvalidModel(tag + "one transition matrix per action required");
    for (const DenseMatrix& t : m.transition)
        if (t.rows() != ns || t.cols() != ns) throw InvalidModel(tag + "transition shape");
    if (m.local_reward.rows() != ns || m.local_reward.cols() != na)
        throw InvalidModel(tag + "reward shape");
    if (m.available.rows() != 0 && (m.available.rows() != ns || m.available.cols() != na))
        throw InvalidModel(tag + "availability shape");

    double alpha_total = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        if (m.initial[s] < -1e-12) throw InvalidModel(tag + "negative initial mass at " + m.states[s]);
        alpha_total += m.initial[s];
    }
    if (std::abs(alpha_total - 1.0) > 1e-9)
        throw InvalidModel(tag + "initial distribution does not sum to 1");

    for (std::size_t s = 0; s < ns; ++s) {
        if (m.is_terminal(s)) {
            if (!allow_terminals) throw InvalidModel(tag + "terminal state " + m.states[s] + " not allowed");
            for (std::size_t a = 0; a < na; ++a)
                for (std::size_t s2 = 0; s2 < ns; ++s2)
                    if (m.transition[a](s, s2) != 0.0)
                        throw InvalidModel(tag + "terminal state " + m.states[s] + " has outgoing probability");
            continue;
        }
        bool any_action = false;
        for (std::size_t a = 0; a < na; ++a) {
            if (!m.is_available(s, a)) {
                for (std::size_t s2 = 0; s2 < ns; ++s2)
                    if (m.transition[a](s, s2) != 0.0)
                        throw InvalidModel(tag + "unavailable action with transitions at " + m.states[s]);
                continue;
            }
            any_action = true;
            double total = 0.0;
            for (std::size_t s2 = 0; s2 < ns; ++s2) {
                double pr = m.transition[a](s, s2);
                if (pr < -1e-12 || pr > 1.0 + 1e-9)
                    throw InvalidModel(tag + "transition probability out of range at " + m.states[s]);
                total += pr;
            }
            if (std::abs(total - 1.0) > 1e-9)
                throw InvalidModel(tag + "transition row of " + m.states[s] + " does not sum to 1");
        }
        if (!any_action) throw InvalidModel(tag + "no available action at " + m.states[s]);
    }

    if (allow_terminals) {
        // positive-probability graph over non-terminal states must be acyclic
        std::vector<std::size_t> indegree(ns, 0);
        for (std::size_t s = 0; s < ns; ++s) {
            if (m.is_terminal(s)) continue;
            for (std::size_t a = 0; a < na; ++a)
                for (std::size_t s2 = 0; s2 < ns; ++s2)
                    if (!m.is_terminal(s2) && m.transition[a](s, s2) > 0.0) ++indegree[s2];
        }
        std::vector<std::size_t> queue;
        for (std::size_t s = 0; s < ns; ++s)
            if (!m.is_terminal(s) && indegree[s] == 0) queue.push_back(s);
        std::size_t seen = 0, nonterminal = 0;
        for (std::size_t s = 0; s < ns; ++s)
            if (!m.is_terminal(s)) ++nonterminal;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::size_t s = queue[head];
            ++seen;
            for (std::size_t a = 0; a < na; ++a)
                for (std::size_t s2 = 0; s2 < ns; ++s2)
                    if (!m.is_terminal(s2) && m.transition[a](s, s2) > 0.0 && --indegree[s2] == 0)
                        queue.push_back(s2);
        }
        if (seen != nonterminal) {
            for (std::size_t s = 0; s < ns; ++s)
                if (!m.is_terminal(s) && indegree[s] > 0)
                    throw InvalidModel(tag + "cycle through state " + m.states[s]);
        }
    }
}

struct PairLayout {
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (state, action) per variable
    std::vector<std::size_t> row_of_state;                  // constraint row per non-terminal state
    std::vector<std::size_t> nonterminal_states;
};

inline PairLayout layout(const AgentModel& m) {
    PairLayout l;
    l.row_of_state.assign(m.num_states(), std::size_t(-1));
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        if (m.is_terminal(s)) continue;
        l.row_of_state[s] = l.nonterminal_states.size();
        l.nonterminal_states.push_back(s);
        for (std::size_t a = 0; a < m.num_actions(); ++a)
            if (m.is_available(s, a)) l.pairs.emplace_back(s, a);
    }
    return l;
}

// occupancy-measure constraint block: one balance row per non-terminal state
inline void fill_flow_block(const AgentModel& m, const PairLayout& l, DenseMatrix& a, dvec& b) {
    a = DenseMatrix(l.nonterminal_states.size(), l.pairs.size());
    b.assign(l.nonterminal_states.size(), 0.0);
    for (std::size_t col = 0; col < l.pairs.size(); ++col) {
        auto [s, act] = l.pairs[col];
        a(l.row_of_state[s], col) += 1.0;
        for (std::size_t s2 : l.nonterminal_states)
            a(l.row_of_state[s2], col) -= m.transition[act](s, s2);
    }
    for (std::size_t s2 : l.nonterminal_states)
        b[l.row_of_state[s2]] = m.initial[s2];
}

} // namespace detail

inline void validate_decmdp(const DecMdp& m) {
    detail::validate_agent(m.agent1, 1, true);
    detail::validate_agent(m.agent2, 2, true);
    if (m.joint_reward.rows() != m.agent1.num_states() * m.agent1.num_actions() ||
        m.joint_reward.cols() != m.agent2.num_states() * m.agent2.num_actions())
        throw InvalidModel("joint reward shape does not match the state-action grids");
}

/**
 * Occupancy-measure formulation of the planning problem: variables x(s,a) and
 * y(s,a) over available non-terminal pairs, one balance row per non-terminal
 * state equating inflow and outflow with the initial mass, objective
 * r1ᵀx + xᵀRy + r2ᵀy. Variable order: states in model order, available
 * actions within each state.
 */
inline BilinearProgram compile_decmdp(const DecMdp& m) {
    validate_decmdp(m);
    detail::PairLayout l1 = detail::layout(m.agent1);
    detail::PairLayout l2 = detail::layout(m.agent2);

    BilinearProgram p;
    detail::fill_flow_block(m.agent1, l1, p.a1, p.rhs1);
    detail::fill_flow_block(m.agent2, l2, p.a2, p.rhs2);
    p.b1 = DenseMatrix(p.rhs1.size(), 0);
    p.b2 = DenseMatrix(p.rhs2.size(), 0);

    p.r1.resize(l1.pairs.size());
    for (std::size_t col = 0; col < l1.pairs.size(); ++col)
        p.r1[col] = m.agent1.local_reward(l1.pairs[col].first, l1.pairs[col].second);
    p.r2.resize(l2.pairs.size());
    for (std::size_t col = 0; col < l2.pairs.size(); ++col)
        p.r2[col] = m.agent2.local_reward(l2.pairs[col].first, l2.pairs[col].second);

    p.coupling = DenseMatrix(l1.pairs.size(), l2.pairs.size());
    for (std::size_t i = 0; i < l1.pairs.size(); ++i) {
        std::size_t row = m.agent1.pair_index(l1.pairs[i].first, l1.pairs[i].second);
        for (std::size_t j = 0; j < l2.pairs.size(); ++j) {
            std::size_t col = m.agent2.pair_index(l2.pairs[j].first, l2.pairs[j].second);
            p.coupling(i, j) = m.joint_reward(row, col);
        }
    }
    return p;
}

/**
 * Average-reward formulation for models without terminal states and with
 * zero local rewards: limiting-distribution variables p(s,a diff) in the
 * coupled blocks, reachability variables q(s,a) in the uncoupled ones, with
 * the stationarity rows and the initial-mass rows per state.
 */
inline BilinearProgram compile_average_reward(const DecMdp& m) {
    detail::validate_agent(m.agent1, 1, false);
    detail::validate_agent(m.agent2, 2, false);
    if (m.agent1.local_reward.max_abs() != 0.0 || m.agent2.local_reward.max_abs() != 0.0)
        throw InvalidModel("average-reward compilation requires zero local rewards");
    if (m.joint_reward.rows() != m.agent1.num_states() * m.agent1.num_actions() ||
        m.joint_reward.cols() != m.agent2.num_states() * m.agent2.num_actions())
        throw InvalidModel("joint reward shape does not match the state-action grids");

    auto build_side = [](const AgentModel& agent, DenseMatrix& pa, DenseMatrix& qa, dvec& rhs) {
        const std::size_t ns = agent.num_states(), na = agent.num_actions();
        std::size_t pairs = 0;
        std::vector<std::pair<std::size_t, std::size_t>> list;
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t a = 0; a < na; ++a)
                if (agent.is_available(s, a)) {
                    list.emplace_back(s, a);
                    ++pairs;
                }
        pa = DenseMatrix(2 * ns, pairs);
        qa = DenseMatrix(2 * ns, pairs);
        rhs.assign(2 * ns, 0.0);
        for (std::size_t col = 0; col < pairs; ++col) {
            auto [s, act] = list[col];
            // stationarity rows for p
            pa(s, col) += 1.0;
            for (std::size_t s2 = 0; s2 < ns; ++s2)
                pa(s2, col) -= agent.transition[act](s, s2);
            // initial-mass rows couple p and q
            pa(ns + s, col) += 1.0;
            qa(ns + s, col) += 1.0;
            for (std::size_t s2 = 0; s2 < ns; ++s2)
                qa(ns + s2, col) -= agent.transition[act](s, s2);
        }
        for (std::size_t s = 0; s < ns; ++s)
            rhs[ns + s] = agent.initial[s];
        return list;
    };

    BilinearProgram p;
    auto list1 = build_side(m.agent1, p.a1, p.b1, p.rhs1);
    auto list2 = build_side(m.agent2, p.a2, p.b2, p.rhs2);
    p.r1.assign(list1.size(), 0.0);
    p.s1.assign(list1.size(), 0.0);
    p.r2.assign(list2.size(), 0.0);
    p.s2.assign(list2.size(), 0.0);
    p.coupling = DenseMatrix(list1.size(), list2.size());
    for (std::size_t i = 0; i < list1.size(); ++i)
        for (std::size_t j = 0; j < list2.size(); ++j)
            p.coupling(i, j) = m.joint_reward(m.agent1.pair_index(list1[i].first, list1[i].second),
                                              m.agent2.pair_index(list2[j].first, list2[j].second));
    return p;
}

/**
 * Deterministic policy from a finite-horizon occupancy assignment: per state
 * the action with the largest visit probability, ties broken by the lowest
 * action index. States with zero occupancy get their first available action.
 */
inline Policy extract_policy(const DecMdp& m, const Assignment& a) {
    detail::PairLayout l1 = detail::layout(m.agent1);
    detail::PairLayout l2 = detail::layout(m.agent2);
    if (a.x.size() != l1.pairs.size() || a.y.size() != l2.pairs.size())
        throw DimensionMismatch("extract_policy: assignment does not match the compiled layout");

    auto pick = [](const AgentModel& agent, const detail::PairLayout& l, const dvec& occ) {
        std::vector<std::size_t> actions(agent.num_states(), 0);
        for (std::size_t s = 0; s < agent.num_states(); ++s)
            for (std::size_t act = 0; act < agent.num_actions(); ++act)
                if (agent.is_available(s, act)) {
                    actions[s] = act;
                    break;
                }
        std::vector<double> best(agent.num_states(), -1.0);
        for (std::size_t col = 0; col < l.pairs.size(); ++col) {
            auto [s, act] = l.pairs[col];
            if (occ[col] > best[s] + 1e-12) { // strict improvement keeps the lowest index on ties
                best[s] = occ[col];
                actions[s] = act;
            }
        }
        return actions;
    };

    Policy policy;
    policy.deterministic = true;
    policy.action1 = pick(m.agent1, l1, a.x);
    policy.action2 = pick(m.agent2, l2, a.y);
    return policy;
}

/**
 * Stochastic policy from an average-reward assignment: action ratios of the
 * limiting distribution p where it carries mass, of the reachability
 * variables q otherwise, uniform over available actions as a last resort.
 */
inline Policy extract_policy_average(const DecMdp& m, const Assignment& a) {
    auto fill = [](const AgentModel& agent, const dvec& pvals, const dvec& qvals) {
        const std::size_t ns = agent.num_states(), na = agent.num_actions();
        DenseMatrix dist(ns, na);
        std::vector<std::pair<std::size_t, std::size_t>> list;
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t act = 0; act < na; ++act)
                if (agent.is_available(s, act)) list.emplace_back(s, act);
        for (std::size_t s = 0; s < ns; ++s) {
            double p_total = 0.0, q_total = 0.0;
            for (std::size_t col = 0; col < list.size(); ++col)
                if (list[col].first == s) {
                    p_total += std::max(0.0, pvals[col]);
                    q_total += std::max(0.0, qvals[col]);
                }
            std::size_t avail = 0;
            for (std::size_t act = 0; act < na; ++act)
                if (agent.is_available(s, act)) ++avail;
            for (std::size_t col = 0; col < list.size(); ++col) {
                if (list[col].first != s) continue;
                std::size_t act = list[col].second;
                if (p_total > 1e-9)
                    dist(s, act) = std::max(0.0, pvals[col]) / p_total;
                else if (q_total > 1e-9)
                    dist(s, act) = std::max(0.0, qvals[col]) / q_total;
                else
                    dist(s, act) = 1.0 / double(avail);
            }
        }
        return dist;
    };

    Policy policy;
    policy.deterministic = false;
    policy.dist1 = fill(m.agent1, a.x, a.w);
    policy.dist2 = fill(m.agent2, a.y, a.z);
    return policy;
}

/**
 * Exhaustive oracle: evaluates every joint deterministic policy by exact
 * occupancy propagation through the acyclic state graph and returns the best
 * value with one optimal policy (ties: lexicographically first). Guarded by
 * a budget on the number of joint policies.
 */
inline std::pair<double, Policy> oracle_enumerate(const DecMdp& m,
                                                  std::size_t max_joint_policies = 1000000) {
    validate_decmdp(m);
    detail::PairLayout l1 = detail::layout(m.agent1);
    detail::PairLayout l2 = detail::layout(m.agent2);

    auto policy_space = [](const AgentModel& agent, const detail::PairLayout& l) {
        std::vector<std::vector<std::size_t>> choices; // available actions per non-terminal state
        for (std::size_t s : l.nonterminal_states) {
            std::vector<std::size_t> acts;
            for (std::size_t a = 0; a < agent.num_actions(); ++a)
                if (agent.is_available(s, a)) acts.push_back(a);
            choices.push_back(acts);
        }
        return choices;
    };
    auto count_policies = [](const std::vector<std::vector<std::size_t>>& choices) {
        double n = 1.0;
        for (const auto& c : choices)
            n *= double(c.size());
        return n;
    };

    auto choices1 = policy_space(m.agent1, l1);
    auto choices2 = policy_space(m.agent2, l2);
    double joint = count_policies(choices1) * count_policies(choices2);
    if (joint > double(max_joint_policies))
        throw TooLarge("oracle_enumerate: joint policy space exceeds the budget");

    // topological order of non-terminal states (valid for every policy)
    auto topo_order = [](const AgentModel& agent, const detail::PairLayout& l) {
        std::vector<std::size_t> indegree(agent.num_states(), 0);
        for (std::size_t s : l.nonterminal_states)
            for (std::size_t a = 0; a < agent.num_actions(); ++a)
                if (agent.is_available(s, a))
                    for (std::size_t s2 : l.nonterminal_states)
                        if (agent.transition[a](s, s2) > 0.0) ++indegree[s2];
        std::vector<std::size_t> order;
        for (std::size_t s : l.nonterminal_states)
            if (indegree[s] == 0) order.push_back(s);
        for (std::size_t head = 0; head < order.size(); ++head) {
            std::size_t s = order[head];
            for (std::size_t a = 0; a < agent.num_actions(); ++a)
                if (agent.is_available(s, a))
                    for (std::size_t s2 : l.nonterminal_states)
                        if (agent.transition[a](s, s2) > 0.0 && --indegree[s2] == 0)
                            order.push_back(s2);
        }
        return order;
    };

    auto occupancy = [](const AgentModel& agent, const detail::PairLayout& l,
                        const std::vector<std::size_t>& order,
                        const std::vector<std::size_t>& actions) {
        dvec state_occ(agent.num_states(), 0.0);
        for (std::size_t s : l.nonterminal_states)
            state_occ[s] = agent.initial[s];
        for (std::size_t s : order) {
            std::size_t a = actions[l.row_of_state[s]];
            for (std::size_t s2 : l.nonterminal_states)
                if (agent.transition[a](s, s2) > 0.0)
                    state_occ[s2] += state_occ[s] * agent.transition[a](s, s2);
        }
        dvec pair_occ(l.pairs.size(), 0.0);
        for (std::size_t col = 0; col < l.pairs.size(); ++col) {
            auto [s, act] = l.pairs[col];
            if (actions[l.row_of_state[s]] == act) pair_occ[col] = state_occ[s];
        }
        return pair_occ;
    };

    auto enumerate = [](const std::vector<std::vector<std::size_t>>& choices,
                        auto&& visit) {
        std::vector<std::size_t> pick(choices.size(), 0);
        while (true) {
            std::vector<std::size_t> actions(choices.size());
            for (std::size_t i = 0; i < choices.size(); ++i)
                actions[i] = choices[i][pick[i]];
            visit(actions);
            std::size_t level = choices.size();
            while (level > 0) {
                --level;
                if (++pick[level] < choices[level].size()) break;
                pick[level] = 0;
                if (level == 0) return;
            }
            if (choices.empty()) return;
        }
    };

    std::vector<std::size_t> order1 = topo_order(m.agent1, l1);
    std::vector<std::size_t> order2 = topo_order(m.agent2, l2);

    // side 2 occupancies precomputed once
    std::vector<std::vector<std::size_t>> policies2;
    std::vector<dvec> occ2;
    std::vector<double> base2;
    enumerate(choices2, [&](const std::vector<std::size_t>& actions) {
        dvec occ = occupancy(m.agent2, l2, order2, actions);
        double local = 0.0;
        for (std::size_t col = 0; col < l2.pairs.size(); ++col)
            local += occ[col] * m.agent2.local_reward(l2.pairs[col].first, l2.pairs[col].second);
        policies2.push_back(actions);
        occ2.push_back(std::move(occ));
        base2.push_back(local);
    });

    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best1, best2;
    enumerate(choices1, [&](const std::vector<std::size_t>& actions1) {
        dvec occ1 = occupancy(m.agent1, l1, order1, actions1);
        double local1 = 0.0;
        for (std::size_t col = 0; col < l1.pairs.size(); ++col)
            local1 += occ1[col] * m.agent1.local_reward(l1.pairs[col].first, l1.pairs[col].second);
        dvec coupled(l2.pairs.size(), 0.0);
        for (std::size_t i = 0; i < l1.pairs.size(); ++i) {
            if (occ1[i] == 0.0) continue;
            std::size_t row = m.agent1.pair_index(l1.pairs[i].first, l1.pairs[i].second);
            for (std::size_t j = 0; j < l2.pairs.size(); ++j)
                coupled[j] += occ1[i] * m.joint_reward(row, m.agent2.pair_index(l2.pairs[j].first,
                                                                                l2.pairs[j].second));
        }
        for (std::size_t k = 0; k < policies2.size(); ++k) {
            double v = local1 + base2[k] + dot(coupled, occ2[k]);
            if (v > best + 1e-15) {
                best = v;
                best1 = actions1;
                best2 = policies2[k];
            }
        }
    });

    Policy policy;
    policy.deterministic = true;
    policy.action1.assign(m.agent1.num_states(), 0);
    policy.action2.assign(m.agent2.num_states(), 0);
    for (std::size_t i = 0; i < l1.nonterminal_states.size(); ++i)
        policy.action1[l1.nonterminal_states[i]] = best1[i];
    for (std::size_t i = 0; i < l2.nonterminal_states.size(); ++i)
        policy.action2[l2.nonterminal_states[i]] = best2[i];
    return {best, policy};
}

} // namespace bilp
