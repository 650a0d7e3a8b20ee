#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdgkit/graph.hpp"

namespace cdgkit {

struct SeparationQuery {
    NodeSet A, B, C;
};

// One step of a connecting walk, for witness reporting.
struct WalkStep {
    int from, to;
    std::string edge; // "->", "<-", "|-|", "<->"
};
using Walk = std::vector<WalkStep>;

// Primary decider (augmentation criterion): proxy nodes for B, restriction to
// the ancestor closure, collider-connected-pair augmentation, plain separation.
bool augmented_separated(const Graph& g, const SeparationQuery& q);

// Independent decider: reachability over (node, arrival-mark) states honoring
// collider/noncollider openness; final transition must enter B via a head.
bool walk_state_separated(const Graph& g, const SeparationQuery& q,
                          Walk* witness = nullptr);

// Bounded brute force: explicit enumeration of walks up to max_len edges
// (default 2n^2). Exponential; for cross-validation at n <= 4.
bool brute_force_separated(const Graph& g, const SeparationQuery& q, int max_len = -1);

// mu_separated == augmented_separated; named entry point.
bool mu_separated(const Graph& g, const SeparationQuery& q);
bool mu_separated(const Graph& g, const NodeSet& A, const NodeSet& B, const NodeSet& C);

// Symmetric variant: no head-at-target requirement. A, B, C must be disjoint.
bool m_separated(const Graph& g, const NodeSet& A, const NodeSet& B, const NodeSet& C);
bool m_separated_augmented(const Graph& g, const NodeSet& A, const NodeSet& B,
                           const NodeSet& C);

// Walk from A to w with colliders in an(W), noncolliders outside W, and a neck
// (head or stump) on the final edge at w.
bool neck_reachable(const Graph& g, const NodeSet& A, int w, const NodeSet& W);

// Nontrivial walk a ... b whose interior nodes are all colliders and lie in
// allowed_interior. With allowed_interior = an({a,b}) this decides weak
// inducing paths.
bool collider_connected(const Graph& g, int a, int b, const NodeSet& allowed_interior);
bool weak_inducing_path_exists(const Graph& g, int a, int b);

// D(a,b) = {c in an({a,b}) : c collider connected to b} minus {a,b}; throws
// when a weak inducing path makes every separator fail.
NodeSet canonical_separator(const Graph& g, int a, int b);

struct IndependenceModel {
    int n = 0;
    // sep[a*n+b][Cmask] == true iff ({a},{b},C) is a separation.
    std::vector<std::vector<bool>> sep;
    bool operator==(const IndependenceModel&) const = default;
};
IndependenceModel independence_model(const Graph& g, int cap = 12);

} // namespace cdgkit
