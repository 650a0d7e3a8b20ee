#include "cdgkit/hardness.hpp"

#include <algorithm>
#include <sstream>

#include "cdgkit/separation.hpp"

namespace cdgkit {

DnfFormula parse_dnf(const std::string& text) {
    DnfFormula f;
    size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && std::isspace((unsigned char)text[i])) ++i; };
    auto expect = [&](char c) {
        skip_ws();
        if (i >= text.size() || text[i] != c)
            throw GraphError(std::string("DNF syntax error: expected '") + c + "'");
        ++i;
    };
    auto parse_literal = [&]() -> Literal {
        skip_ws();
        bool positive = true;
        if (i < text.size() && text[i] == '!') {
            positive = false;
            ++i;
            skip_ws();
        }
        if (i >= text.size() || text[i] != 'x')
            throw GraphError("DNF syntax error: expected variable x<k>");
        ++i;
        size_t start = i;
        while (i < text.size() && std::isdigit((unsigned char)text[i])) ++i;
        if (i == start) throw GraphError("DNF syntax error: variable index missing");
        int var = std::stoi(text.substr(start, i - start));
        if (var < 1) throw GraphError("DNF syntax error: variable index must be >= 1");
        return {var, positive};
    };
    while (true) {
        expect('(');
        std::vector<Literal> term;
        term.push_back(parse_literal());
        skip_ws();
        while (i < text.size() && text[i] == '&') {
            ++i;
            term.push_back(parse_literal());
            skip_ws();
        }
        expect(')');
        if (term.size() > 3) throw GraphError("DNF term too long (max 3 literals)");
        for (auto& l : term) f.nvars = std::max(f.nvars, l.var);
        f.terms.push_back(term);
        skip_ws();
        if (i >= text.size()) break;
        expect('|');
    }
    if (f.terms.empty()) throw GraphError("DNF formula has no terms");
    return f;
}

std::string format_dnf(const DnfFormula& f) {
    std::ostringstream out;
    for (size_t j = 0; j < f.terms.size(); ++j) {
        if (j) out << " | ";
        out << '(';
        for (size_t i = 0; i < f.terms[j].size(); ++i) {
            if (i) out << " & ";
            if (!f.terms[j][i].positive) out << '!';
            out << 'x' << f.terms[j][i].var;
        }
        out << ')';
    }
    return out.str();
}

bool evaluate(const DnfFormula& f, const std::vector<bool>& assignment) {
    for (auto& term : f.terms) {
        bool sat = true;
        for (auto& l : term)
            if (assignment[l.var - 1] != l.positive) {
                sat = false;
                break;
            }
        if (sat) return true;
    }
    return false;
}

bool find_falsifier(const DnfFormula& f, std::vector<bool>* assignment) {
    if (f.nvars > 20) throw GraphError("tautology check capped at 20 variables");
    for (std::uint32_t m = 0; m < (1u << f.nvars); ++m) {
        std::vector<bool> a(f.nvars);
        for (int i = 0; i < f.nvars; ++i) a[i] = (m >> i) & 1;
        if (!evaluate(f, a)) {
            if (assignment) *assignment = a;
            return true;
        }
    }
    return false;
}

bool is_tautology(const DnfFormula& f) { return !find_falsifier(f, nullptr); }

ReductionPair reduce_to_graph_pair(const DnfFormula& f) {
    ReductionPair p;
    Graph& d = p.D;
    int n = f.nvars;
    p.alpha = d.add_node("alpha");
    p.beta = d.add_node("beta");
    std::vector<int> vminus;
    p.zeta.resize(f.terms.size());
    for (size_t j = 0; j < f.terms.size(); ++j) {
        for (size_t i = 0; i < f.terms[j].size(); ++i) {
            int z = d.add_node("z_" + std::to_string(j + 1) + "_" + std::to_string(i + 1));
            p.zeta[j].push_back(z);
            vminus.push_back(z);
        }
    }
    for (int l = 0; l < n; ++l) {
        p.chi.push_back(d.add_node("x_" + std::to_string(l + 1)));
        vminus.push_back(p.chi.back());
    }
    for (int l = 0; l < n; ++l) {
        p.ups.push_back(d.add_node("u_" + std::to_string(l + 1)));
        vminus.push_back(p.ups.back());
    }
    // gamma companions: alpha -> g_delta <-> delta for every delta in V-.
    for (int delta : vminus) {
        int gd = d.add_node("g_" + d.label(delta));
        d.add_directed(p.alpha, gd);
        d.add_directed(gd, delta);
        d.add_directed(delta, gd);
    }
    // Term gadgets: alpha -> zeta_1 |-| ... |-| zeta_last |-| chi_1 and u_1.
    for (size_t j = 0; j < f.terms.size(); ++j) {
        const auto& zs = p.zeta[j];
        d.add_directed(p.alpha, zs.front());
        for (size_t i = 0; i + 1 < zs.size(); ++i) d.add_blunt(zs[i], zs[i + 1]);
        d.add_blunt(zs.back(), p.chi[0]);
        d.add_blunt(zs.back(), p.ups[0]);
        // Literal links: chi_l <-> zeta for positive literals of x_l, u_l for
        // negative ones (directed 2-cycles).
        for (size_t i = 0; i < f.terms[j].size(); ++i) {
            int anchor = f.terms[j][i].positive ? p.chi[f.terms[j][i].var - 1]
                                                : p.ups[f.terms[j][i].var - 1];
            d.add_directed(anchor, zs[i]);
            d.add_directed(zs[i], anchor);
        }
    }
    // Ladder: chi_l, u_l |-| chi_{l+1}, u_{l+1}; ends tied to beta.
    d.add_blunt(p.chi[0], p.ups[0]);
    for (int l = 0; l + 1 < n; ++l) {
        d.add_blunt(p.chi[l], p.chi[l + 1]);
        d.add_blunt(p.chi[l], p.ups[l + 1]);
        d.add_blunt(p.ups[l], p.chi[l + 1]);
        d.add_blunt(p.ups[l], p.ups[l + 1]);
    }
    d.add_blunt(p.chi[n - 1], p.beta);
    d.add_blunt(p.ups[n - 1], p.beta);
    // Every node has a directed loop.
    for (int v = 0; v < d.n(); ++v) d.add_directed(v, v);

    p.D_plus = d;
    p.D_plus.add_blunt(p.alpha, p.chi[0]);
    p.D_plus.add_blunt(p.alpha, p.ups[0]);
    return p;
}

NodeSet falsifying_assignment_to_separator(const ReductionPair& pair, const DnfFormula& f,
                                           const std::vector<bool>& assignment) {
    if ((int)assignment.size() != f.nvars) throw GraphError("assignment size mismatch");
    if (evaluate(f, assignment)) throw GraphError("NoFalsifier: assignment satisfies the formula");
    int n = pair.D.n();
    NodeSet C(n);
    for (int l = 0; l < f.nvars; ++l) C.add(assignment[l] ? pair.chi[l] : pair.ups[l]);
    // The assignment nodes alone leave detours through their companions open
    // (e.g. alpha -> g_u1 -> u1 |-| beta -> beta), so condition on the full
    // ancestral closure of the assignment nodes as well.
    NodeSet closure = C;
    closure.add(pair.alpha);
    closure.add(pair.beta);
    C = ancestors(pair.D_plus, closure);
    C.remove(pair.alpha);
    C.remove(pair.beta);
    NodeSet A = NodeSet::of(n, {pair.alpha});
    NodeSet B = NodeSet::of(n, {pair.beta});
    SeparationQuery q{A, B, C};
    bool sep_d_aug = augmented_separated(pair.D, q);
    bool sep_d_walk = walk_state_separated(pair.D, q);
    bool sep_dp_aug = augmented_separated(pair.D_plus, q);
    bool sep_dp_walk = walk_state_separated(pair.D_plus, q);
    if (!(sep_d_aug && sep_d_walk && !sep_dp_aug && !sep_dp_walk))
        throw GraphError("reduction witness failed verification");
    return C;
}

} // namespace cdgkit
