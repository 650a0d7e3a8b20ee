#pragma once

#include <optional>
#include <vector>

#include "cdgkit/graph.hpp"
#include "cdgkit/separation.hpp"

namespace cdgkit {

// Re-indexes g to ref's node ordering; throws when the label sets differ.
Graph aligned_to(const Graph& ref, const Graph& g);

bool same_directed_part(const Graph& g1, const Graph& g2);

// Collider connections inside the induced subgraph on A, computed via blunt
// components and their parent sets (valid under the all-loops assumption):
// conn[a] contains b iff a and b are both parents of some blunt component.
std::vector<NodeSet> collider_connection_matrix(const Graph& g, const NodeSet& A);
bool same_collider_connections(const Graph& g1, const Graph& g2, const NodeSet& A);

struct EquivWitness {
    NodeSet ancestral_set;
    int a = -1, b = -1; // pair whose collider connection differs
};

// Ancestral-set sweep: same directed part, then same collider connections on
// every ancestral set of the condensation.
bool markov_equivalent(const Graph& g1, const Graph& g2, EquivWitness* witness = nullptr);

// Definition-level oracle: compares full independence models. n <= cap.
bool markov_equivalent_oracle(const Graph& g1, const Graph& g2, int cap = 10);

struct ColliderPath {
    std::vector<int> nodes; // endpoints first and last
};

// The path's interiors must come from path-source ancestry; coverage is
// collider connectivity in g2 with allowed interior an({a,b} + interiors).
bool collider_path_covered(const ColliderPath& path, const Graph& g2);

// Enumerates collider paths of each graph and checks coverage in the other.
bool collider_equivalent(const Graph& g1, const Graph& g2,
                         ColliderPath* witness = nullptr, int cap = 12);

struct VirtualColliderTripath {
    int a, b;   // a < b
    NodeSet C;  // strongly connected component, or empty for the root
    friend bool operator==(const VirtualColliderTripath&, const VirtualColliderTripath&) = default;
    friend bool operator<(const VirtualColliderTripath& l, const VirtualColliderTripath& r) {
        if (l.a != r.a) return l.a < r.a;
        if (l.b != r.b) return l.b < r.b;
        return l.C < r.C;
    }
};

std::vector<VirtualColliderTripath> virtual_collider_tripaths(const Graph& g);
std::vector<VirtualColliderTripath> maximal_vcts(const Graph& g);

enum class Prescreen { Distinct, Indistinguishable };
// Necessary-condition filter: Distinct implies not Markov equivalent; the
// converse fails (same maximal tripaths do not force equivalence).
Prescreen vct_prescreen(const Graph& g1, const Graph& g2);

Graph permutation_graph(const Graph& g, const std::vector<int>& rho);

// Sufficient condition: rho fixes V minus S, S mutually connected by directed
// edges with equal parent sets. When the hypothesis holds the resulting
// permutation graph is verified Markov equivalent before returning true.
bool permutation_equivalent_sufficient(const Graph& g, const std::vector<int>& rho,
                                       const NodeSet& S);

bool is_maximal(const Graph& g, std::vector<Edge>* addable = nullptr);

// Hypothesis of the blunt-edge addition rule: a weak inducing path between a
// and b consisting of blunt edges only. When it holds, g + a|-|b is verified
// Markov equivalent before returning true.
bool blunt_path_edge_addition(const Graph& g, int a, int b);

struct EquivalenceClass {
    Graph representative;
    std::vector<Graph> members; // deterministic order (blunt-mask ascending)
    int greatest = -1, least = -1;
    bool has_greatest() const { return greatest >= 0; }
    bool has_least() const { return least >= 0; }
};
EquivalenceClass enumerate_class(const Graph& g);

} // namespace cdgkit
