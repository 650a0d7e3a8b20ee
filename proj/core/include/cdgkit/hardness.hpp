#pragma once

#include <string>
#include <vector>

#include "cdgkit/graph.hpp"

namespace cdgkit {

struct Literal {
    int var;       // 1-based
    bool positive;
};

struct DnfFormula {
    int nvars = 0;                          // highest variable index
    std::vector<std::vector<Literal>> terms; // 1..3 literals each
};

// Syntax: `(x1 & !x2) | (x3)`, variables `x<k>`.
DnfFormula parse_dnf(const std::string& text);
std::string format_dnf(const DnfFormula& f);

bool evaluate(const DnfFormula& f, const std::vector<bool>& assignment);
bool is_tautology(const DnfFormula& f); // brute force, nvars <= 20
// First falsifying assignment in counting order, if any.
bool find_falsifier(const DnfFormula& f, std::vector<bool>* assignment);

// The tautology <-> Markov equivalence reduction. D_plus adds the two blunt
// edges alpha |-| x_1 and alpha |-| u_1.
struct ReductionPair {
    Graph D, D_plus;
    int alpha, beta;
    std::vector<int> chi, ups;              // chi[l], ups[l] for l = 0..n-1
    std::vector<std::vector<int>> zeta;     // zeta[j][i], term j, position i
};
ReductionPair reduce_to_graph_pair(const DnfFormula& f);

// C = {chi_l : I(l)=1} + {ups_l : I(l)=0}; verifies that C separates beta from
// alpha in D but not in D_plus, with both deciders.
NodeSet falsifying_assignment_to_separator(const ReductionPair& pair, const DnfFormula& f,
                                           const std::vector<bool>& assignment);

} // namespace cdgkit
