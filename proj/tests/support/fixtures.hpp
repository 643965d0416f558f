#pragma once

#include "bilp/decmdp.hpp"

namespace testsupport {

/**
 * Two-agent coordination instance with deterministic tree dynamics. Agent 1
 * walks a four-state tree (branching at its second state), agent 2 a
 * five-state tree (branching at its first state); a joint bonus is paid when
 * both take the experiment branch into their fourth state. No local rewards,
 * so the objective is the pure coupling term.
 */
inline bilp::DecMdp example_four(double bonus = 3.0) {
    using bilp::AgentModel;
    using bilp::DenseMatrix;

    AgentModel a1;
    a1.states = {"s1", "s2", "s3", "s4", "done"};
    a1.actions = {"a1", "a2"};
    a1.terminal = {false, false, false, false, true};
    a1.initial = {1.0, 0.0, 0.0, 0.0, 0.0};
    a1.transition.assign(2, DenseMatrix(5, 5));
    a1.local_reward = DenseMatrix(5, 2);
    a1.available = DenseMatrix(5, 2);
    auto allow1 = [&](std::size_t s, std::size_t act, std::size_t next) {
        a1.available(s, act) = 1.0;
        a1.transition[act](s, next) = 1.0;
    };
    allow1(0, 0, 1); // s1 -a1-> s2
    allow1(1, 0, 2); // s2 -a1-> s3
    allow1(1, 1, 3); // s2 -a2-> s4
    allow1(2, 0, 4); // s3 -a1-> done
    allow1(3, 0, 4); // s4 -a1-> done

    AgentModel a2;
    a2.states = {"s1", "s2", "s3", "s4", "s5", "done"};
    a2.actions = {"a1", "a2"};
    a2.terminal = {false, false, false, false, false, true};
    a2.initial = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    a2.transition.assign(2, DenseMatrix(6, 6));
    a2.local_reward = DenseMatrix(6, 2);
    a2.available = DenseMatrix(6, 2);
    auto allow2 = [&](std::size_t s, std::size_t act, std::size_t next) {
        a2.available(s, act) = 1.0;
        a2.transition[act](s, next) = 1.0;
    };
    allow2(0, 0, 1); // s1 -a1-> s2
    allow2(0, 1, 3); // s1 -a2-> s4
    allow2(1, 0, 2); // s2 -a1-> s3
    allow2(2, 0, 4); // s3 -a1-> s5
    allow2(3, 0, 5); // s4 -a1-> done
    allow2(4, 0, 5); // s5 -a1-> done

    bilp::DecMdp m;
    m.agent1 = a1;
    m.agent2 = a2;
    m.joint_reward = DenseMatrix(5 * 2, 6 * 2);
    // both agents taking their branch into the fourth state share the bonus
    m.joint_reward(m.agent1.pair_index(3, 0), m.agent2.pair_index(3, 0)) = bonus;
    return m;
}

} // namespace testsupport
