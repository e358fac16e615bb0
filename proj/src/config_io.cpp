#include "coopcr/config_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace coopcr {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("write failed for " + path);
}

std::string format_double(double v) {
    char buf[64];
    // %.17g round-trips every double; trim to the shortest form that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& tok, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + tok + "' in " + where);
    }
}

std::vector<double> parse_numbers(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) out.push_back(parse_number(tok, where));
    return out;
}

struct RawEntry {
    std::string key;
    int index = -1;  // key[index], or -1
    std::vector<double> values;
};

std::vector<RawEntry> parse_entries(const std::string& text) {
    std::vector<RawEntry> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = values");
        RawEntry e;
        std::string key = trim(line.substr(0, eq));
        const auto br = key.find('[');
        if (br != std::string::npos) {
            if (key.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad index");
            e.index = static_cast<int>(parse_number(key.substr(br + 1, key.size() - br - 2),
                                                    "index on line " + std::to_string(lineno)));
            key = trim(key.substr(0, br));
        }
        e.key = key;
        e.values = parse_numbers(line.substr(eq + 1), "line " + std::to_string(lineno));
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

SystemParams parse_system_params(const std::string& text) {
    const auto entries = parse_entries(text);
    int num_sus = -1;
    double pu_rate = 0.0, solo = -1.0;
    bool have_pu_rate = false;
    std::map<std::string, std::vector<double>> shared;  // unindexed tables
    std::map<std::string, std::map<int, std::vector<double>>> per_su;

    const char* table_keys[] = {"power_levels", "su_success", "coop_success"};
    auto is_table = [&](const std::string& k) {
        for (const char* t : table_keys)
            if (k == t) return true;
        return false;
    };

    std::vector<double> budget_shared;
    std::map<int, double> budget_per_su;

    for (const auto& e : entries) {
        if (e.key == "num_sus") {
            if (e.values.size() != 1) throw ConfigError("num_sus takes one value");
            num_sus = static_cast<int>(e.values[0]);
            if (num_sus < 1 || e.values[0] != num_sus) throw ConfigError("num_sus must be a positive integer");
        } else if (e.key == "pu_arrival_rate") {
            if (e.values.size() != 1) throw ConfigError("pu_arrival_rate takes one value");
            pu_rate = e.values[0];
            have_pu_rate = true;
        } else if (e.key == "solo_success") {
            if (e.values.size() != 1) throw ConfigError("solo_success takes one value");
            solo = e.values[0];
        } else if (e.key == "power_budget") {
            if (e.index >= 0) {
                if (e.values.size() != 1) throw ConfigError("power_budget[s] takes one value");
                budget_per_su[e.index] = e.values[0];
            } else {
                budget_shared = e.values;
            }
        } else if (is_table(e.key)) {
            if (e.values.empty()) throw ConfigError(e.key + " needs at least one value");
            if (e.index >= 0)
                per_su[e.key][e.index] = e.values;
            else
                shared[e.key] = e.values;
        } else {
            throw ConfigError("unknown key '" + e.key + "'");
        }
    }

    if (num_sus < 1) throw ConfigError("num_sus missing");
    if (solo < 0.0) throw ConfigError("solo_success missing");
    if (!have_pu_rate) throw ConfigError("pu_arrival_rate missing");

    SystemParams p;
    p.solo_success = solo;
    p.pu_arrival_rate = pu_rate;
    const auto n = static_cast<std::size_t>(num_sus);

    auto build_table = [&](const std::string& key) {
        LevelTable t(n);
        for (std::size_t s = 0; s < n; ++s) {
            const auto& overrides = per_su[key];
            const auto it = overrides.find(static_cast<int>(s));
            if (it != overrides.end())
                t[s] = it->second;
            else if (shared.count(key))
                t[s] = shared[key];
            else
                throw ConfigError(key + " missing for su " + std::to_string(s));
        }
        return t;
    };
    p.power_levels = build_table("power_levels");
    p.su_success = build_table("su_success");
    p.coop_success = build_table("coop_success");

    p.power_budget.assign(n, 0.0);
    if (!budget_shared.empty()) {
        if (budget_shared.size() == 1)
            p.power_budget.assign(n, budget_shared[0]);
        else if (budget_shared.size() == n)
            p.power_budget = budget_shared;
        else
            throw ConfigError("power_budget needs 1 or num_sus values");
    } else if (budget_per_su.empty()) {
        throw ConfigError("power_budget missing");
    }
    for (const auto& [s, v] : budget_per_su) {
        if (s < 0 || s >= num_sus) throw ConfigError("power_budget index out of range");
        p.power_budget[static_cast<std::size_t>(s)] = v;
    }
    return p;
}

SystemParams load_system_params(const std::string& path) {
    try {
        return parse_system_params(read_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string format_system_params(const SystemParams& p) {
    std::ostringstream os;
    os << "num_sus = " << p.num_sus() << "\n";
    os << "pu_arrival_rate = " << format_double(p.pu_arrival_rate) << "\n";
    os << "solo_success = " << format_double(p.solo_success) << "\n";
    auto table = [&](const char* key, const LevelTable& t) {
        for (std::size_t s = 0; s < t.size(); ++s) {
            os << key << "[" << s << "] =";
            for (double v : t[s]) os << " " << format_double(v);
            os << "\n";
        }
    };
    table("power_levels", p.power_levels);
    table("su_success", p.su_success);
    table("coop_success", p.coop_success);
    os << "power_budget =";
    for (double v : p.power_budget) os << " " << format_double(v);
    os << "\n";
    return os.str();
}

std::string policy_to_csv(const JointPolicy& policy) {
    std::ostringstream os;
    os << "state,su,level,probability\n";
    auto rows = [&](const char* tag, const LevelTable& t) {
        for (std::size_t s = 0; s < t.size(); ++s)
            for (std::size_t i = 0; i < t[s].size(); ++i)
                os << tag << "," << s << "," << i << "," << format_double(t[s][i]) << "\n";
    };
    rows("e", policy.q_e);
    rows("b", policy.q_b);
    return os.str();
}

JointPolicy policy_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty policy file");
    if (trim(line) != "state,su,level,probability") throw ConfigError("bad policy header");
    struct Cell {
        std::size_t s, i;
        double v;
    };
    std::vector<Cell> e_cells, b_cells;
    std::size_t n_su = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string state, su, level, prob;
        if (!std::getline(ls, state, ',') || !std::getline(ls, su, ',') ||
            !std::getline(ls, level, ',') || !std::getline(ls, prob))
            throw ConfigError("policy line " + std::to_string(lineno) + ": expected 4 fields");
        const std::string where = "policy line " + std::to_string(lineno);
        Cell c{static_cast<std::size_t>(parse_number(trim(su), where)),
               static_cast<std::size_t>(parse_number(trim(level), where)),
               parse_number(trim(prob), where)};
        n_su = std::max(n_su, c.s + 1);
        const std::string st = trim(state);
        if (st == "e")
            e_cells.push_back(c);
        else if (st == "b")
            b_cells.push_back(c);
        else
            throw ConfigError(where + ": state must be e or b");
    }
    JointPolicy out;
    out.q_e.resize(n_su);
    out.q_b.resize(n_su);
    auto fill = [&](LevelTable& t, const std::vector<Cell>& cells) {
        for (const auto& c : cells)
            if (c.i + 1 > t[c.s].size()) t[c.s].resize(c.i + 1, 0.0);
        for (const auto& c : cells) t[c.s][c.i] = c.v;
    };
    fill(out.q_e, e_cells);
    fill(out.q_b, b_cells);
    for (std::size_t s = 0; s < n_su; ++s) {  // both tables share a shape
        const std::size_t L = std::max(out.q_e[s].size(), out.q_b[s].size());
        out.q_e[s].resize(L, 0.0);
        out.q_b[s].resize(L, 0.0);
    }
    return out;
}

std::string policy_to_text(const JointPolicy& policy) {
    std::ostringstream os;
    auto table = [&](const char* key, const LevelTable& t) {
        for (std::size_t s = 0; s < t.size(); ++s) {
            os << key << "[" << s << "] =";
            for (double v : t[s]) os << " " << format_double(v);
            os << "\n";
        }
    };
    table("q_e", policy.q_e);
    table("q_b", policy.q_b);
    return os.str();
}

JointPolicy policy_from_text(const std::string& text) {
    std::map<int, std::vector<double>> idle, busy;
    for (const auto& e : parse_entries(text)) {
        if (e.index < 0) throw ConfigError("policy entries need an SU index: " + e.key);
        if (e.key == "q_e")
            idle[e.index] = e.values;
        else if (e.key == "q_b")
            busy[e.index] = e.values;
        else
            throw ConfigError("unknown policy key '" + e.key + "'");
    }
    if (idle.size() != busy.size()) throw ConfigError("policy tables cover different SUs");
    JointPolicy out;
    for (const auto& [s, row] : idle) {
        if (s != static_cast<int>(out.q_e.size())) throw ConfigError("policy SUs must be contiguous");
        if (!busy.count(s) || busy[s].size() != row.size())
            throw ConfigError("policy table shape mismatch for su " + std::to_string(s));
        out.q_e.push_back(row);
        out.q_b.push_back(busy[s]);
    }
    return out;
}

void save_policy_csv(const std::string& path, const JointPolicy& policy) {
    write_file(path, policy_to_csv(policy));
}

JointPolicy load_policy_csv(const std::string& path) {
    try {
        return policy_from_csv(read_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string admm_state_to_text(const AdmmState& state) {
    std::ostringstream os;
    os << "rate_dual = " << format_double(state.duals.rate_dual) << "\n";
    os << "mass_dual = " << format_double(state.duals.mass_dual) << "\n";
    os << "rho = " << format_double(state.duals.rho) << "\n";
    for (std::size_t s = 0; s < state.nodes.size(); ++s) {
        const auto& n = state.nodes[s];
        os << "idle[" << s << "] =";
        for (double v : n.idle) os << " " << format_double(v);
        os << "\n";
        os << "busy[" << s << "] =";
        for (double v : n.busy) os << " " << format_double(v);
        os << "\n";
        os << "slack[" << s << "] = " << format_double(n.slack) << "\n";
        os << "power_dual[" << s << "] = " << format_double(n.power_dual) << "\n";
    }
    return os.str();
}

AdmmState admm_state_from_text(const std::string& text) {
    AdmmState st;
    std::map<int, NodeState> nodes;
    for (const auto& e : parse_entries(text)) {
        auto one = [&](const char* what) {
            if (e.values.size() != 1) throw ConfigError(std::string(what) + " takes one value");
            return e.values[0];
        };
        if (e.key == "rate_dual")
            st.duals.rate_dual = one("rate_dual");
        else if (e.key == "mass_dual")
            st.duals.mass_dual = one("mass_dual");
        else if (e.key == "rho")
            st.duals.rho = one("rho");
        else if (e.key == "idle" && e.index >= 0)
            nodes[e.index].idle = e.values;
        else if (e.key == "busy" && e.index >= 0)
            nodes[e.index].busy = e.values;
        else if (e.key == "slack" && e.index >= 0)
            nodes[e.index].slack = one("slack");
        else if (e.key == "power_dual" && e.index >= 0)
            nodes[e.index].power_dual = one("power_dual");
        else
            throw ConfigError("unknown solver-state key '" + e.key + "'");
    }
    for (auto& [s, n] : nodes) {
        if (s != static_cast<int>(st.nodes.size()))
            throw ConfigError("solver-state nodes must be contiguous from 0");
        st.nodes.push_back(std::move(n));
    }
    return st;
}

}  // namespace coopcr
