#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hcprisk {

struct NetworkNode {
    std::string name;
    std::vector<std::string> states;   // >= 2, unique
    std::vector<std::string> parents;  // node names; acyclic at network level
};

// Conditional probability table. Rows are indexed row-major over the parent
// states in declared order (last parent varies fastest); each row holds one
// probability per node state in declared order and sums to 1 within 1e-9.
struct Cpt {
    std::string node;
    std::vector<std::vector<double>> rows;
};

struct OutcomeSpec {
    std::string node;
    std::string state;  // the state whose posterior mass is "infected"
};

struct BayesNetSpec {
    std::vector<NetworkNode> nodes;
    std::vector<Cpt> cpts;
    std::optional<OutcomeSpec> outcome;
};

// Every violation found (acyclicity, CPT coverage, row sums, shape checks);
// empty means the specification is valid. Never throws on malformed input.
std::vector<std::string> validate_network(const BayesNetSpec& spec);

using Evidence = std::map<std::string, std::string>;

enum class EliminationOrder {
    min_degree,          // greedy min-degree, lexicographic tie-break
    reverse_topological, // used to cross-check order independence
};

inline constexpr double kDistributionTolerance = 1e-9;

// Immutable compiled network supporting exact inference by variable
// elimination.
class BayesNet {
public:
    // Validates and compiles; throws ParseError listing every violation.
    static BayesNet compile(const BayesNetSpec& spec);

    const BayesNetSpec& spec() const { return spec_; }

    // Chain-rule probability of a full assignment (every node present).
    double joint_probability(
        const std::map<std::string, std::string>& assignment) const;

    struct Posterior {
        std::vector<std::string> states;
        std::vector<double> probabilities;  // sums to 1 within tolerance
    };

    // Exact posterior of one node given evidence. Throws
    // ImpossibleEvidenceError when the evidence has probability zero.
    Posterior infer_posterior(
        const std::string& query_node, const Evidence& evidence,
        EliminationOrder order = EliminationOrder::min_degree) const;

    // Posterior mass of the designated outcome state given evidence over the
    // factor groups; requires an outcome declaration in the specification.
    double population_risk_posterior(const Evidence& evidence) const;

    // Equal-width bin label on [0,1] for feeding a continuous individual
    // risk into a discretised risk node.
    static std::string risk_bin_label(double risk, const NetworkNode& node);

private:
    BayesNetSpec spec_;
    std::map<std::string, int> index_;              // node name -> position
    std::vector<std::vector<int>> parent_indices_;  // per node
    std::vector<int> cpt_index_by_node_;            // into spec_.cpts
};

}  // namespace hcprisk
