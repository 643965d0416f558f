#pragma once

#include "bilp/decmdp.hpp"
#include "bilp/game.hpp"
#include "bilp/solver.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

namespace bilp {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ProblemDocument = std::variant<BilinearProgram, DecMdp, GameSpec>;

namespace io_detail {

using nlohmann::json;

inline void require_keys(const json& obj, const char* what,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) throw ParseError(std::string(what) + ": expected an object");
    for (const char* key : required)
        if (!obj.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : required)
            if (it.key() == key) known = true;
        for (const char* key : optional)
            if (it.key() == key) known = true;
        if (!known) throw ParseError(std::string(what) + ": unknown field '" + it.key() + "'");
    }
}

inline json matrix_to_json(const DenseMatrix& m) {
    json triplets = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) triplets.push_back({i, j, m(i, j)});
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"triplets", std::move(triplets)}};
}

inline DenseMatrix matrix_from_json(const json& j, const char* what) {
    require_keys(j, what, {"rows", "cols", "triplets"});
    if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned())
        throw ParseError(std::string(what) + ": rows/cols must be nonnegative integers");
    DenseMatrix m(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>());
    for (const json& t : j["triplets"]) {
        if (!t.is_array() || t.size() != 3) throw ParseError(std::string(what) + ": bad triplet");
        std::size_t r = t[0].get<std::size_t>(), c = t[1].get<std::size_t>();
        if (r >= m.rows() || c >= m.cols())
            throw ParseError(std::string(what) + ": triplet index out of range");
        double v = t[2].get<double>();
        if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite entry");
        m(r, c) = v;
    }
    return m;
}

inline dvec vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    dvec v;
    v.reserve(j.size());
    for (const json& e : j) {
        double x = e.get<double>();
        if (!std::isfinite(x)) throw ParseError(std::string(what) + ": non-finite entry");
        v.push_back(x);
    }
    return v;
}

inline index_list indices_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    index_list v;
    for (const json& e : j)
        v.push_back(e.get<std::size_t>());
    return v;
}

inline std::vector<std::string> names_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    std::vector<std::string> v;
    for (const json& e : j)
        v.push_back(e.get<std::string>());
    return v;
}

inline json program_to_json(const BilinearProgram& p) {
    json j;
    j["kind"] = "bilinear";
    j["sense1"] = p.sense1 == ConstraintSense::equality ? "equality" : "inequality";
    j["sense2"] = p.sense2 == ConstraintSense::equality ? "equality" : "inequality";
    j["a1"] = matrix_to_json(p.a1);
    j["b1"] = matrix_to_json(p.b1);
    j["rhs1"] = p.rhs1;
    j["a2"] = matrix_to_json(p.a2);
    j["b2"] = matrix_to_json(p.b2);
    j["rhs2"] = p.rhs2;
    j["r1"] = p.r1;
    j["s1"] = p.s1;
    j["r2"] = p.r2;
    j["s2"] = p.s2;
    j["coupling"] = matrix_to_json(p.coupling);
    j["free_x"] = p.free_x;
    j["free_w"] = p.free_w;
    j["free_y"] = p.free_y;
    j["free_z"] = p.free_z;
    return j;
}

inline BilinearProgram program_from_json(const json& j) {
    require_keys(j, "bilinear program",
                 {"kind", "sense1", "sense2", "a1", "b1", "rhs1", "a2", "b2", "rhs2", "r1", "s1",
                  "r2", "s2", "coupling", "free_x", "free_w", "free_y", "free_z"});
    BilinearProgram p;
    auto sense = [](const json& s, const char* what) {
        std::string v = s.get<std::string>();
        if (v == "equality") return ConstraintSense::equality;
        if (v == "inequality") return ConstraintSense::inequality;
        throw ParseError(std::string(what) + ": unknown sense '" + v + "'");
    };
    p.sense1 = sense(j["sense1"], "sense1");
    p.sense2 = sense(j["sense2"], "sense2");
    p.a1 = matrix_from_json(j["a1"], "a1");
    p.b1 = matrix_from_json(j["b1"], "b1");
    p.rhs1 = vector_from_json(j["rhs1"], "rhs1");
    p.a2 = matrix_from_json(j["a2"], "a2");
    p.b2 = matrix_from_json(j["b2"], "b2");
    p.rhs2 = vector_from_json(j["rhs2"], "rhs2");
    p.r1 = vector_from_json(j["r1"], "r1");
    p.s1 = vector_from_json(j["s1"], "s1");
    p.r2 = vector_from_json(j["r2"], "r2");
    p.s2 = vector_from_json(j["s2"], "s2");
    p.coupling = matrix_from_json(j["coupling"], "coupling");
    p.free_x = indices_from_json(j["free_x"], "free_x");
    p.free_w = indices_from_json(j["free_w"], "free_w");
    p.free_y = indices_from_json(j["free_y"], "free_y");
    p.free_z = indices_from_json(j["free_z"], "free_z");
    try {
        validate(p);
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("bilinear program: ") + e.what());
    }
    return p;
}

inline json agent_to_json(const AgentModel& m) {
    json j;
    j["states"] = m.states;
    j["actions"] = m.actions;
    json terminals = json::array();
    for (std::size_t s = 0; s < m.num_states(); ++s)
        if (m.terminal[s]) terminals.push_back(s);
    j["terminal"] = std::move(terminals);
    j["initial"] = m.initial;
    json transitions = json::array();
    for (std::size_t a = 0; a < m.num_actions(); ++a)
        for (std::size_t s = 0; s < m.num_states(); ++s)
            for (std::size_t s2 = 0; s2 < m.num_states(); ++s2)
                if (m.transition[a](s, s2) != 0.0)
                    transitions.push_back({s, a, s2, m.transition[a](s, s2)});
    j["transitions"] = std::move(transitions);
    json rewards = json::array();
    for (std::size_t s = 0; s < m.num_states(); ++s)
        for (std::size_t a = 0; a < m.num_actions(); ++a)
            if (m.local_reward(s, a) != 0.0) rewards.push_back({s, a, m.local_reward(s, a)});
    j["local_rewards"] = std::move(rewards);
    json available = json::array();
    if (m.available.rows() > 0)
        for (std::size_t s = 0; s < m.num_states(); ++s)
            for (std::size_t a = 0; a < m.num_actions(); ++a)
                if (m.available(s, a) != 0.0) available.push_back({s, a});
    j["available"] = std::move(available);
    return j;
}

inline AgentModel agent_from_json(const json& j, const char* what) {
    require_keys(j, what, {"states", "actions", "terminal", "initial", "transitions",
                           "local_rewards", "available"});
    AgentModel m;
    m.states = names_from_json(j["states"], "states");
    m.actions = names_from_json(j["actions"], "actions");
    const std::size_t ns = m.states.size(), na = m.actions.size();
    if (ns == 0 || na == 0) throw ParseError(std::string(what) + ": empty states or actions");
    m.terminal.assign(ns, false);
    for (const json& t : j["terminal"]) {
        std::size_t s = t.get<std::size_t>();
        if (s >= ns) throw ParseError(std::string(what) + ": terminal index out of range");
        m.terminal[s] = true;
    }
    m.initial = vector_from_json(j["initial"], "initial");
    if (m.initial.size() != ns) throw ParseError(std::string(what) + ": initial size mismatch");
    m.transition.assign(na, DenseMatrix(ns, ns));
    for (const json& t : j["transitions"]) {
        if (!t.is_array() || t.size() != 4)
            throw ParseError(std::string(what) + ": bad transition entry");
        std::size_t s = t[0].get<std::size_t>(), a = t[1].get<std::size_t>(),
                    s2 = t[2].get<std::size_t>();
        if (s >= ns || a >= na || s2 >= ns)
            throw ParseError(std::string(what) + ": transition index out of range");
        m.transition[a](s, s2) = t[3].get<double>();
    }
    m.local_reward = DenseMatrix(ns, na);
    for (const json& t : j["local_rewards"]) {
        if (!t.is_array() || t.size() != 3) throw ParseError(std::string(what) + ": bad reward entry");
        std::size_t s = t[0].get<std::size_t>(), a = t[1].get<std::size_t>();
        if (s >= ns || a >= na) throw ParseError(std::string(what) + ": reward index out of range");
        m.local_reward(s, a) = t[2].get<double>();
    }
    if (!j["available"].empty()) {
        m.available = DenseMatrix(ns, na);
        for (const json& t : j["available"]) {
            if (!t.is_array() || t.size() != 2)
                throw ParseError(std::string(what) + ": bad availability entry");
            std::size_t s = t[0].get<std::size_t>(), a = t[1].get<std::size_t>();
            if (s >= ns || a >= na)
                throw ParseError(std::string(what) + ": availability index out of range");
            m.available(s, a) = 1.0;
        }
    }
    return m;
}

inline json decmdp_to_json(const DecMdp& m) {
    json j;
    j["kind"] = "decmdp";
    j["agents"] = json::array({agent_to_json(m.agent1), agent_to_json(m.agent2)});
    j["joint_reward"] = matrix_to_json(m.joint_reward);
    return j;
}

inline DecMdp decmdp_from_json(const json& j) {
    require_keys(j, "decmdp", {"kind", "agents", "joint_reward"});
    if (!j["agents"].is_array() || j["agents"].size() != 2)
        throw ParseError("decmdp: exactly two agents required");
    DecMdp m;
    m.agent1 = agent_from_json(j["agents"][0], "agent 1");
    m.agent2 = agent_from_json(j["agents"][1], "agent 2");
    m.joint_reward = matrix_from_json(j["joint_reward"], "joint_reward");
    try {
        validate_decmdp(m);
    } catch (const InvalidModel& e) {
        throw ParseError(std::string("decmdp: ") + e.what());
    }
    return m;
}

inline json game_to_json(const GameSpec& g) {
    json j;
    j["kind"] = "game";
    j["r1"] = g.r1;
    j["r2"] = g.r2;
    j["c1"] = matrix_to_json(g.c1);
    j["c2"] = matrix_to_json(g.c2);
    j["a1"] = matrix_to_json(g.a1);
    j["b1"] = g.b1;
    j["a2"] = matrix_to_json(g.a2);
    j["b2"] = g.b2;
    return j;
}

inline GameSpec game_from_json(const json& j) {
    require_keys(j, "game", {"kind", "r1", "r2", "c1", "c2", "a1", "b1", "a2", "b2"});
    GameSpec g;
    g.r1 = vector_from_json(j["r1"], "r1");
    g.r2 = vector_from_json(j["r2"], "r2");
    g.c1 = matrix_from_json(j["c1"], "c1");
    g.c2 = matrix_from_json(j["c2"], "c2");
    g.a1 = matrix_from_json(j["a1"], "a1");
    g.b1 = vector_from_json(j["b1"], "b1");
    g.a2 = matrix_from_json(j["a2"], "a2");
    g.b2 = vector_from_json(j["b2"], "b2");
    try {
        validate_game(g);
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("game: ") + e.what());
    }
    return g;
}

} // namespace io_detail

inline std::string write_problem_string(const ProblemDocument& doc) {
    nlohmann::json j = std::visit(
        [](const auto& value) {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, BilinearProgram>)
                return io_detail::program_to_json(value);
            else if constexpr (std::is_same_v<T, DecMdp>)
                return io_detail::decmdp_to_json(value);
            else
                return io_detail::game_to_json(value);
        },
        doc);
    return j.dump(2) + "\n";
}

inline ProblemDocument read_problem_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParseError("problem document: missing 'kind'");
    std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "bilinear") return io_detail::program_from_json(j);
        if (kind == "decmdp") return io_detail::decmdp_from_json(j);
        if (kind == "game") return io_detail::game_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("problem document: ") + e.what());
    }
    throw ParseError("problem document: unknown kind '" + kind + "'");
}

inline ProblemDocument read_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return read_problem_string(buffer.str());
}

inline void write_problem_file(const std::string& path, const ProblemDocument& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << write_problem_string(doc);
}

/// Shortest round-trip decimal form, locale-independent.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string trace_csv_header() {
    return "iteration,incumbent_value,upper_bound,error_bound,region_count,planes_count,elapsed_ms";
}

inline std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::string out = trace_csv_header() + "\n";
    for (const TraceRow& row : trace) {
        out += std::to_string(row.iteration);
        out += ',';
        out += format_double(row.incumbent_value);
        out += ',';
        out += format_double(row.upper_bound);
        out += ',';
        out += format_double(row.error_bound);
        out += ',';
        out += std::to_string(row.region_count);
        out += ',';
        out += std::to_string(row.planes_count);
        out += ',';
        out += std::to_string(row.elapsed_ms);
        out += '\n';
    }
    return out;
}

} // namespace bilp
