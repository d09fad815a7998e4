#include "hcprisk/bayes_net.hpp"

#include "hcprisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace hcprisk {
namespace {

// Intermediate table over a set of node indices; vars[0] varies slowest.
struct Factor {
    std::vector<int> vars;
    std::vector<int> cards;
    std::vector<double> table;
};

std::vector<std::size_t> strides_of(const std::vector<int>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * static_cast<std::size_t>(cards[i]);
    }
    return strides;
}

// Sums a factor over one variable.
Factor marginalize(const Factor& f, int var) {
    const auto pos_it = std::find(f.vars.begin(), f.vars.end(), var);
    const std::size_t pos = static_cast<std::size_t>(pos_it - f.vars.begin());

    Factor out;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i == pos) continue;
        out.vars.push_back(f.vars[i]);
        out.cards.push_back(f.cards[i]);
    }
    const std::size_t out_size = std::accumulate(
        out.cards.begin(), out.cards.end(), std::size_t{1},
        [](std::size_t a, int c) { return a * static_cast<std::size_t>(c); });
    out.table.assign(out_size, 0.0);

    const std::vector<std::size_t> in_strides = strides_of(f.cards);
    std::vector<int> assignment(out.cards.size(), 0);
    for (std::size_t out_idx = 0; out_idx < out_size; ++out_idx) {
        std::size_t base = 0;
        for (std::size_t i = 0, j = 0; i < f.vars.size(); ++i) {
            if (i == pos) continue;
            base += static_cast<std::size_t>(assignment[j]) * in_strides[i];
            ++j;
        }
        double total = 0.0;
        for (int s = 0; s < f.cards[pos]; ++s) {
            total += f.table[base + static_cast<std::size_t>(s) * in_strides[pos]];
        }
        out.table[out_idx] = total;

        for (std::size_t j = out.cards.size(); j-- > 0;) {
            if (++assignment[j] < out.cards[j]) break;
            assignment[j] = 0;
        }
    }
    return out;
}

Factor multiply(const Factor& a, const Factor& b) {
    Factor out;
    out.vars = a.vars;
    out.cards = a.cards;
    for (std::size_t i = 0; i < b.vars.size(); ++i) {
        if (std::find(out.vars.begin(), out.vars.end(), b.vars[i]) ==
            out.vars.end()) {
            out.vars.push_back(b.vars[i]);
            out.cards.push_back(b.cards[i]);
        }
    }
    const std::size_t out_size = std::accumulate(
        out.cards.begin(), out.cards.end(), std::size_t{1},
        [](std::size_t s, int c) { return s * static_cast<std::size_t>(c); });
    out.table.assign(out_size, 0.0);

    const std::vector<std::size_t> a_strides = strides_of(a.cards);
    const std::vector<std::size_t> b_strides = strides_of(b.cards);
    std::vector<std::size_t> a_map(out.vars.size(), 0);
    std::vector<std::size_t> b_map(out.vars.size(), 0);
    for (std::size_t i = 0; i < out.vars.size(); ++i) {
        const auto ia = std::find(a.vars.begin(), a.vars.end(), out.vars[i]);
        if (ia != a.vars.end()) {
            a_map[i] = a_strides[static_cast<std::size_t>(ia - a.vars.begin())];
        }
        const auto ib = std::find(b.vars.begin(), b.vars.end(), out.vars[i]);
        if (ib != b.vars.end()) {
            b_map[i] = b_strides[static_cast<std::size_t>(ib - b.vars.begin())];
        }
    }

    std::vector<int> assignment(out.cards.size(), 0);
    for (std::size_t idx = 0; idx < out_size; ++idx) {
        std::size_t a_idx = 0;
        std::size_t b_idx = 0;
        for (std::size_t i = 0; i < out.vars.size(); ++i) {
            a_idx += static_cast<std::size_t>(assignment[i]) * a_map[i];
            b_idx += static_cast<std::size_t>(assignment[i]) * b_map[i];
        }
        out.table[idx] = a.table[a_idx] * b.table[b_idx];
        for (std::size_t j = out.cards.size(); j-- > 0;) {
            if (++assignment[j] < out.cards[j]) break;
            assignment[j] = 0;
        }
    }
    return out;
}

// Fixes one variable to a state and drops it from the factor.
Factor reduce(const Factor& f, int var, int state) {
    const auto pos_it = std::find(f.vars.begin(), f.vars.end(), var);
    const std::size_t pos = static_cast<std::size_t>(pos_it - f.vars.begin());

    Factor out;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i == pos) continue;
        out.vars.push_back(f.vars[i]);
        out.cards.push_back(f.cards[i]);
    }
    const std::size_t out_size = std::accumulate(
        out.cards.begin(), out.cards.end(), std::size_t{1},
        [](std::size_t a, int c) { return a * static_cast<std::size_t>(c); });
    out.table.assign(out_size, 0.0);

    const std::vector<std::size_t> in_strides = strides_of(f.cards);
    std::vector<int> assignment(out.cards.size(), 0);
    for (std::size_t idx = 0; idx < out_size; ++idx) {
        std::size_t in_idx = static_cast<std::size_t>(state) * in_strides[pos];
        for (std::size_t i = 0, j = 0; i < f.vars.size(); ++i) {
            if (i == pos) continue;
            in_idx += static_cast<std::size_t>(assignment[j]) * in_strides[i];
            ++j;
        }
        out.table[idx] = f.table[in_idx];
        for (std::size_t j = out.cards.size(); j-- > 0;) {
            if (++assignment[j] < out.cards[j]) break;
            assignment[j] = 0;
        }
    }
    return out;
}

bool contains(const std::vector<int>& vars, int var) {
    return std::find(vars.begin(), vars.end(), var) != vars.end();
}

}  // namespace

std::vector<std::string> validate_network(const BayesNetSpec& spec) {
    std::vector<std::string> errors;
    auto report = [&errors](const std::string& message) {
        errors.push_back(message);
    };

    if (spec.nodes.empty()) report("network has no nodes");

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const NetworkNode& node = spec.nodes[i];
        if (!index.emplace(node.name, static_cast<int>(i)).second) {
            report("duplicate node name '" + node.name + "'");
        }
        if (node.states.size() < 2) {
            report("node '" + node.name + "' needs at least 2 states");
        }
        std::set<std::string> seen_states;
        for (const std::string& s : node.states) {
            if (!seen_states.insert(s).second) {
                report("node '" + node.name + "' repeats state label '" + s + "'");
            }
        }
        std::set<std::string> seen_parents;
        for (const std::string& parent : node.parents) {
            if (!seen_parents.insert(parent).second) {
                report("node '" + node.name + "' lists parent '" + parent +
                       "' twice");
            }
        }
    }
    for (const NetworkNode& node : spec.nodes) {
        for (const std::string& parent : node.parents) {
            if (index.find(parent) == index.end()) {
                report("node '" + node.name + "' references unknown parent '" +
                       parent + "'");
            }
        }
    }

    // Cycle detection over resolvable edges; reports the closing path.
    {
        const int n = static_cast<int>(spec.nodes.size());
        std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0/1/2
        std::vector<int> stack;
        // DFS over edges parent -> child.
        std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
        for (int child = 0; child < n; ++child) {
            for (const std::string& parent :
                 spec.nodes[static_cast<std::size_t>(child)].parents) {
                const auto it = index.find(parent);
                if (it != index.end()) {
                    children[static_cast<std::size_t>(it->second)].push_back(child);
                }
            }
        }
        std::function<void(int)> dfs = [&](int u) {
            color[static_cast<std::size_t>(u)] = 1;
            stack.push_back(u);
            for (int v : children[static_cast<std::size_t>(u)]) {
                if (color[static_cast<std::size_t>(v)] == 1) {
                    std::ostringstream cycle;
                    cycle << "cycle: ";
                    const auto from =
                        std::find(stack.begin(), stack.end(), v);
                    for (auto it = from; it != stack.end(); ++it) {
                        cycle << spec.nodes[static_cast<std::size_t>(*it)].name
                              << " -> ";
                    }
                    cycle << spec.nodes[static_cast<std::size_t>(v)].name;
                    report(cycle.str());
                } else if (color[static_cast<std::size_t>(v)] == 0) {
                    dfs(v);
                }
            }
            stack.pop_back();
            color[static_cast<std::size_t>(u)] = 2;
        };
        for (int u = 0; u < n; ++u) {
            if (color[static_cast<std::size_t>(u)] == 0) dfs(u);
        }
    }

    // CPT coverage and shape.
    std::map<std::string, const Cpt*> cpt_by_node;
    for (const Cpt& cpt : spec.cpts) {
        if (index.find(cpt.node) == index.end()) {
            report("CPT references unknown node '" + cpt.node + "'");
            continue;
        }
        if (!cpt_by_node.emplace(cpt.node, &cpt).second) {
            report("node '" + cpt.node + "' has more than one CPT");
        }
    }
    for (const NetworkNode& node : spec.nodes) {
        const auto it = cpt_by_node.find(node.name);
        if (it == cpt_by_node.end()) {
            report("node '" + node.name + "' has no CPT");
            continue;
        }
        bool parents_known = true;
        std::size_t expected_rows = 1;
        for (const std::string& parent : node.parents) {
            const auto pit = index.find(parent);
            if (pit == index.end()) {
                parents_known = false;
                break;
            }
            expected_rows *=
                spec.nodes[static_cast<std::size_t>(pit->second)].states.size();
        }
        const Cpt& cpt = *it->second;
        if (parents_known && cpt.rows.size() != expected_rows) {
            report("CPT for '" + node.name + "' has " +
                   std::to_string(cpt.rows.size()) + " rows, expected " +
                   std::to_string(expected_rows));
        }
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            const std::vector<double>& row = cpt.rows[r];
            if (row.size() != node.states.size()) {
                report("CPT for '" + node.name + "' row " + std::to_string(r) +
                       " has " + std::to_string(row.size()) +
                       " entries, expected " +
                       std::to_string(node.states.size()));
                continue;
            }
            double sum = 0.0;
            bool entries_ok = true;
            for (double v : row) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    report("CPT for '" + node.name + "' row " +
                           std::to_string(r) + " has a negative or non-finite"
                           " entry");
                    entries_ok = false;
                    break;
                }
                sum += v;
            }
            if (entries_ok && std::abs(sum - 1.0) > kDistributionTolerance) {
                std::ostringstream msg;
                msg << "CPT for '" << node.name << "' row " << r
                    << " sums to " << sum;
                report(msg.str());
            }
        }
    }

    if (spec.outcome.has_value()) {
        const auto it = index.find(spec.outcome->node);
        if (it == index.end()) {
            report("outcome references unknown node '" + spec.outcome->node +
                   "'");
        } else {
            const NetworkNode& node =
                spec.nodes[static_cast<std::size_t>(it->second)];
            if (std::find(node.states.begin(), node.states.end(),
                          spec.outcome->state) == node.states.end()) {
                report("outcome state '" + spec.outcome->state +
                       "' is not a state of node '" + spec.outcome->node + "'");
            }
        }
    }

    return errors;
}

BayesNet BayesNet::compile(const BayesNetSpec& spec) {
    const std::vector<std::string> errors = validate_network(spec);
    if (!errors.empty()) {
        std::string joined = "invalid network:";
        for (const std::string& e : errors) joined += "\n  - " + e;
        throw ParseError(joined);
    }
    BayesNet net;
    net.spec_ = spec;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        net.index_[spec.nodes[i].name] = static_cast<int>(i);
    }
    net.parent_indices_.resize(spec.nodes.size());
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        for (const std::string& parent : spec.nodes[i].parents) {
            net.parent_indices_[i].push_back(net.index_.at(parent));
        }
    }
    net.cpt_index_by_node_.assign(spec.nodes.size(), -1);
    for (std::size_t c = 0; c < spec.cpts.size(); ++c) {
        net.cpt_index_by_node_[static_cast<std::size_t>(
            net.index_.at(spec.cpts[c].node))] = static_cast<int>(c);
    }
    return net;
}

namespace {

int state_index_of(const NetworkNode& node, const std::string& state) {
    const auto it = std::find(node.states.begin(), node.states.end(), state);
    if (it == node.states.end()) return -1;
    return static_cast<int>(it - node.states.begin());
}

}  // namespace

double BayesNet::joint_probability(
    const std::map<std::string, std::string>& assignment) const {
    std::vector<int> states(spec_.nodes.size(), -1);
    for (const auto& [name, state] : assignment) {
        const auto it = index_.find(name);
        if (it == index_.end()) {
            throw DomainError("assignment references unknown node '" + name +
                              "'");
        }
        const int s =
            state_index_of(spec_.nodes[static_cast<std::size_t>(it->second)],
                           state);
        if (s < 0) {
            throw DomainError("'" + state + "' is not a state of node '" +
                              name + "'");
        }
        states[static_cast<std::size_t>(it->second)] = s;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] < 0) {
            throw DomainError("assignment is missing node '" +
                              spec_.nodes[i].name + "'");
        }
    }

    double probability = 1.0;
    for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
        const Cpt& cpt =
            spec_.cpts[static_cast<std::size_t>(cpt_index_by_node_[i])];
        std::size_t row = 0;
        for (int parent : parent_indices_[i]) {
            row = row * spec_.nodes[static_cast<std::size_t>(parent)].states.size() +
                  static_cast<std::size_t>(states[static_cast<std::size_t>(parent)]);
        }
        probability *= cpt.rows[row][static_cast<std::size_t>(states[i])];
    }
    return probability;
}

BayesNet::Posterior BayesNet::infer_posterior(const std::string& query_node,
                                              const Evidence& evidence,
                                              EliminationOrder order) const {
    const auto query_it = index_.find(query_node);
    if (query_it == index_.end()) {
        throw DomainError("query references unknown node '" + query_node + "'");
    }
    const int query = query_it->second;

    std::map<int, int> observed;  // node index -> state index
    for (const auto& [name, state] : evidence) {
        const auto it = index_.find(name);
        if (it == index_.end()) {
            throw DomainError("evidence references unknown node '" + name + "'");
        }
        const int s = state_index_of(
            spec_.nodes[static_cast<std::size_t>(it->second)], state);
        if (s < 0) {
            throw DomainError("'" + state + "' is not a state of node '" +
                              name + "'");
        }
        observed[it->second] = s;
    }

    // CPT factors with evidence applied.
    std::vector<Factor> factors;
    factors.reserve(spec_.nodes.size());
    for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
        Factor f;
        for (int parent : parent_indices_[i]) {
            f.vars.push_back(parent);
            f.cards.push_back(static_cast<int>(
                spec_.nodes[static_cast<std::size_t>(parent)].states.size()));
        }
        f.vars.push_back(static_cast<int>(i));
        f.cards.push_back(static_cast<int>(spec_.nodes[i].states.size()));
        const Cpt& cpt =
            spec_.cpts[static_cast<std::size_t>(cpt_index_by_node_[i])];
        f.table.reserve(cpt.rows.size() * spec_.nodes[i].states.size());
        for (const std::vector<double>& row : cpt.rows) {
            f.table.insert(f.table.end(), row.begin(), row.end());
        }
        for (const auto& [var, state] : observed) {
            if (contains(f.vars, var)) f = reduce(f, var, state);
        }
        factors.push_back(std::move(f));
    }

    // Variables still present anywhere, minus the query.
    std::set<int> to_eliminate;
    for (const Factor& f : factors) {
        for (int v : f.vars) {
            if (v != query) to_eliminate.insert(v);
        }
    }

    std::vector<int> elimination;
    if (order == EliminationOrder::min_degree) {
        // Greedy min-degree on the interaction graph, lexicographic names as
        // the deterministic tie-break.
        std::map<int, std::set<int>> neighbors;
        for (int v : to_eliminate) neighbors[v] = {};
        for (const Factor& f : factors) {
            for (int a : f.vars) {
                for (int b : f.vars) {
                    if (a != b && to_eliminate.count(a) != 0 &&
                        to_eliminate.count(b) != 0) {
                        neighbors[a].insert(b);
                    }
                }
            }
        }
        std::set<int> remaining = to_eliminate;
        while (!remaining.empty()) {
            int best = -1;
            std::size_t best_degree = 0;
            for (int v : remaining) {
                std::size_t degree = 0;
                for (int u : neighbors[v]) degree += remaining.count(u);
                const bool better =
                    best < 0 || degree < best_degree ||
                    (degree == best_degree &&
                     spec_.nodes[static_cast<std::size_t>(v)].name <
                         spec_.nodes[static_cast<std::size_t>(best)].name);
                if (better) {
                    best = v;
                    best_degree = degree;
                }
            }
            // Connect the eliminated variable's surviving neighbours.
            for (int a : neighbors[best]) {
                if (remaining.count(a) == 0) continue;
                for (int b : neighbors[best]) {
                    if (a != b && remaining.count(b) != 0) neighbors[a].insert(b);
                }
            }
            elimination.push_back(best);
            remaining.erase(best);
        }
    } else {
        // Reverse of a deterministic topological order (parents first).
        std::vector<int> topo;
        std::vector<int> pending(spec_.nodes.size(), 0);
        for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
            pending[i] = static_cast<int>(parent_indices_[i].size());
        }
        std::set<int> ready;
        for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
            if (pending[i] == 0) ready.insert(static_cast<int>(i));
        }
        while (!ready.empty()) {
            const int u = *ready.begin();
            ready.erase(ready.begin());
            topo.push_back(u);
            for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
                if (contains(parent_indices_[i], u) && --pending[i] == 0) {
                    ready.insert(static_cast<int>(i));
                }
            }
        }
        for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
            if (to_eliminate.count(*it) != 0) elimination.push_back(*it);
        }
    }

    for (int var : elimination) {
        Factor product;
        bool have = false;
        std::vector<Factor> rest;
        for (Factor& f : factors) {
            if (contains(f.vars, var)) {
                product = have ? multiply(product, f) : std::move(f);
                have = true;
            } else {
                rest.push_back(std::move(f));
            }
        }
        if (have) rest.push_back(marginalize(product, var));
        factors = std::move(rest);
    }

    // Everything left ranges over the query variable (or is a constant).
    const NetworkNode& qnode = spec_.nodes[static_cast<std::size_t>(query)];
    Factor result;
    result.vars = {query};
    result.cards = {static_cast<int>(qnode.states.size())};
    result.table.assign(qnode.states.size(), 1.0);
    for (const Factor& f : factors) {
        result = multiply(result, f);
    }

    const auto query_observed = observed.find(query);
    Posterior posterior;
    posterior.states = qnode.states;
    double z = 0.0;
    for (double v : result.table) z += v;
    if (query_observed != observed.end()) {
        // The query was itself observed: its factor entries were reduced, so
        // `result` is constant in the query; z is P(evidence).
        z /= static_cast<double>(qnode.states.size());
        if (!(z > 0.0)) {
            throw ImpossibleEvidenceError(
                "evidence assignment has probability zero");
        }
        posterior.probabilities.assign(qnode.states.size(), 0.0);
        posterior.probabilities[static_cast<std::size_t>(
            query_observed->second)] = 1.0;
        return posterior;
    }
    if (!(z > 0.0)) {
        throw ImpossibleEvidenceError("evidence assignment has probability zero");
    }
    posterior.probabilities.resize(result.table.size());
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        posterior.probabilities[i] = result.table[i] / z;
    }
    return posterior;
}

double BayesNet::population_risk_posterior(const Evidence& evidence) const {
    if (!spec_.outcome.has_value()) {
        throw ConfigError("network declares no outcome node");
    }
    const Posterior posterior = infer_posterior(spec_.outcome->node, evidence);
    const int s = state_index_of(
        spec_.nodes[static_cast<std::size_t>(index_.at(spec_.outcome->node))],
        spec_.outcome->state);
    return posterior.probabilities[static_cast<std::size_t>(s)];
}

std::string BayesNet::risk_bin_label(double risk, const NetworkNode& node) {
    if (!(risk >= 0.0 && risk <= 1.0)) {
        throw DomainError("risk outside [0,1] cannot be binned");
    }
    const std::size_t bins = node.states.size();
    std::size_t idx = static_cast<std::size_t>(risk * static_cast<double>(bins));
    if (idx >= bins) idx = bins - 1;
    return node.states[idx];
}

}  // namespace hcprisk
