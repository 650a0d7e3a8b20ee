#include "cdgkit/equivalence.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace cdgkit {

namespace {

void require_loops(const Graph& g) {
    if (!g.all_loops_present())
        throw GraphError("operation requires every directed loop to be present");
}

void require_cdg(const Graph& g) {
    if (g.has_bidirected_edges())
        throw GraphError("operation is defined for cDGs only (bidirected edges present)");
}

} // namespace

Graph aligned_to(const Graph& ref, const Graph& g) {
    if (ref.n() != g.n()) throw GraphError("node sets differ");
    std::vector<int> remap(g.n());
    for (int i = 0; i < g.n(); ++i) {
        int j = ref.index_of(g.label(i));
        if (j < 0) throw GraphError("node sets differ: " + g.label(i));
        remap[i] = j;
    }
    Graph out;
    for (auto& l : ref.labels()) out.add_node(l);
    for (const Edge& e : g.edges()) {
        switch (e.kind) {
        case EdgeKind::Directed: out.add_directed(remap[e.a], remap[e.b]); break;
        case EdgeKind::Blunt: out.add_blunt(remap[e.a], remap[e.b]); break;
        case EdgeKind::Bidirected: out.add_bidirected(remap[e.a], remap[e.b]); break;
        }
    }
    return out;
}

bool same_directed_part(const Graph& g1, const Graph& g2) {
    Graph h = aligned_to(g1, g2);
    for (int i = 0; i < g1.n(); ++i)
        if (g1.children(i) != h.children(i)) return false;
    return true;
}

std::vector<NodeSet> collider_connection_matrix(const Graph& g, const NodeSet& A) {
    int n = g.n();
    std::vector<NodeSet> conn(n, NodeSet(n));
    // Blunt components within A.
    std::vector<char> seen(n, 0);
    A.for_each([&](int s) {
        if (seen[s]) return;
        NodeSet comp(n);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.add(v);
            (g.blunt_neighbors(v) & A).for_each([&](int w) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            });
        }
        NodeSet pa = g.parents_of(comp) & A;
        pa.for_each([&](int x) { conn[x] |= pa; });
    });
    return conn;
}

bool same_collider_connections(const Graph& g1, const Graph& g2, const NodeSet& A) {
    auto m1 = collider_connection_matrix(g1, A);
    auto m2 = collider_connection_matrix(g2, A);
    for (int i = 0; i < g1.n(); ++i)
        if (m1[i] != m2[i]) return false;
    return true;
}

bool markov_equivalent(const Graph& g1, const Graph& g2_in, EquivWitness* witness) {
    require_cdg(g1);
    require_cdg(g2_in);
    require_loops(g1);
    Graph g2 = aligned_to(g1, g2_in);
    require_loops(g2);
    if (!same_directed_part(g1, g2)) return false;
    for (const NodeSet& A : ancestral_sets(g1)) {
        auto m1 = collider_connection_matrix(g1, A);
        auto m2 = collider_connection_matrix(g2, A);
        for (int i = 0; i < g1.n(); ++i) {
            if (m1[i] == m2[i]) continue;
            if (witness) {
                witness->ancestral_set = A;
                witness->a = i;
                witness->b = (m1[i].minus(m2[i]) | m2[i].minus(m1[i])).first();
            }
            return false;
        }
    }
    return true;
}

bool markov_equivalent_oracle(const Graph& g1, const Graph& g2_in, int cap) {
    Graph g2 = aligned_to(g1, g2_in);
    return independence_model(g1, cap) == independence_model(g2, cap);
}

bool collider_path_covered(const ColliderPath& path, const Graph& g2) {
    NodeSet key(g2.n());
    for (int v : path.nodes) key.add(v);
    return collider_connected(g2, path.nodes.front(), path.nodes.back(),
                              ancestors(g2, key));
}

namespace {

// Checks that every collider path of ga is covered in gb.
bool covered_one_direction(const Graph& ga, const Graph& gb, ColliderPath* witness, int cap) {
    int n = ga.n();
    if (n > cap) throw GraphError("collider_equivalent: node cap exceeded");
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            NodeSet ends = NodeSet::of(n, {a, b});
            // Coverage is monotone in the allowed interior; remember verdicts
            // per ancestor closure.
            std::vector<std::pair<NodeSet, bool>> memo;
            auto covered = [&](const NodeSet& interior) {
                NodeSet allowed = ancestors(gb, ends | interior);
                for (auto& [s, v] : memo) {
                    if (v && s.is_subset_of(allowed)) return true;
                    if (!v && allowed.is_subset_of(s)) return false;
                }
                bool v = collider_connected(gb, a, b, allowed);
                memo.emplace_back(allowed, v);
                return v;
            };
            if (ga.adjacent(a, b) && !covered(NodeSet(n))) {
                if (witness) witness->nodes = {a, b};
                return false;
            }
            // DFS over blunt chains; boundary edges need a neck at the chain
            // ends, i.e. a -> g1 or a |-| g1 (and likewise at b).
            std::vector<int> chain;
            NodeSet used(n);
            bool ok = true;
            auto boundary = [&](int endpoint, int v) {
                return ga.has_directed(endpoint, v) || ga.has_blunt(endpoint, v);
            };
            std::function<void(int)> dfs = [&](int v) {
                if (!ok) return;
                chain.push_back(v);
                used.add(v);
                if (boundary(b, v)) {
                    if (!covered(used)) {
                        ok = false;
                        if (witness) {
                            witness->nodes = {a};
                            witness->nodes.insert(witness->nodes.end(), chain.begin(), chain.end());
                            witness->nodes.push_back(b);
                        }
                    }
                }
                if (ok) {
                    ga.blunt_neighbors(v).for_each([&](int w) {
                        if (!ok || used.contains(w) || w == a || w == b) return;
                        dfs(w);
                    });
                }
                chain.pop_back();
                used.remove(v);
            };
            for (int v = 0; v < n && ok; ++v)
                if (v != a && v != b && boundary(a, v)) dfs(v);
            if (!ok) return false;
        }
    }
    return true;
}

} // namespace

bool collider_equivalent(const Graph& g1, const Graph& g2_in, ColliderPath* witness, int cap) {
    require_cdg(g1);
    require_loops(g1);
    Graph g2 = aligned_to(g1, g2_in);
    require_cdg(g2);
    require_loops(g2);
    return covered_one_direction(g1, g2, witness, cap) &&
           covered_one_direction(g2, g1, witness, cap);
}

std::vector<VirtualColliderTripath> virtual_collider_tripaths(const Graph& g) {
    require_loops(g);
    int n = g.n();
    Condensation cond = strongly_connected_components(g);
    std::vector<VirtualColliderTripath> out;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            NodeSet ends = NodeSet::of(n, {a, b});
            for (int c = -1; c < (int)cond.components.size(); ++c) {
                NodeSet cset = c < 0 ? NodeSet(n) : cond.components[c];
                if (collider_connected(g, a, b, ancestors(g, ends | cset)))
                    out.push_back({a, b, cset});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VirtualColliderTripath> maximal_vcts(const Graph& g) {
    require_loops(g);
    int n = g.n();
    Condensation cond = strongly_connected_components(g);
    int k = (int)cond.components.size();
    std::vector<VirtualColliderTripath> out;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            NodeSet ends = NodeSet::of(n, {a, b});
            std::vector<char> is_vct(k + 1, 0); // slot k = the root component
            for (int c = 0; c <= k; ++c) {
                NodeSet cset = c == k ? NodeSet(n) : cond.components[c];
                is_vct[c] = collider_connected(g, a, b, ancestors(g, ends | cset));
            }
            for (int c = 0; c <= k; ++c) {
                if (!is_vct[c]) continue;
                bool maximal = true;
                if (c == k) {
                    // The root has no ancestors besides itself.
                } else {
                    if (is_vct[k]) maximal = false; // the root is everyone's ancestor
                    condensation_ancestors(cond, c).for_each([&](int anc) {
                        if (anc != c && is_vct[anc]) maximal = false;
                    });
                }
                if (maximal)
                    out.push_back({a, b, c == k ? NodeSet(n) : cond.components[c]});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Prescreen vct_prescreen(const Graph& g1, const Graph& g2_in) {
    Graph g2 = aligned_to(g1, g2_in);
    if (!same_directed_part(g1, g2)) return Prescreen::Distinct;
    if (maximal_vcts(g1) != maximal_vcts(g2)) return Prescreen::Distinct;
    return Prescreen::Indistinguishable;
}

Graph permutation_graph(const Graph& g, const std::vector<int>& rho) {
    int n = g.n();
    if ((int)rho.size() != n) throw GraphError("permutation size mismatch");
    std::vector<char> hit(n, 0);
    for (int v : rho) {
        if (v < 0 || v >= n || hit[v]) throw GraphError("not a permutation");
        hit[v] = 1;
    }
    Graph out;
    for (auto& l : g.labels()) out.add_node(l);
    for (const Edge& e : g.edges()) {
        switch (e.kind) {
        case EdgeKind::Directed: out.add_directed(e.a, e.b); break;
        case EdgeKind::Blunt: out.add_blunt(rho[e.a], rho[e.b]); break;
        case EdgeKind::Bidirected: throw GraphError("permutation graphs are defined for cDGs");
        }
    }
    return out;
}

bool permutation_equivalent_sufficient(const Graph& g, const std::vector<int>& rho,
                                       const NodeSet& S) {
    require_loops(g);
    for (int v = 0; v < g.n(); ++v)
        if (!S.contains(v) && rho[v] != v)
            throw GraphError("permutation must fix nodes outside S");
    auto elems = S.elements();
    for (int x : elems) {
        for (int y : elems) {
            if (x == y) continue;
            if (!g.has_directed(x, y)) return false;
            if (g.parents(x) != g.parents(y)) return false;
        }
    }
    if (!markov_equivalent(g, permutation_graph(g, rho)))
        throw GraphError("internal error: permutation hypothesis held but equivalence failed");
    return true;
}

bool is_maximal(const Graph& g, std::vector<Edge>* addable) {
    require_cdg(g);
    require_loops(g);
    bool maximal = true;
    for (int a = 0; a < g.n(); ++a) {
        for (int b = 0; b < g.n(); ++b) {
            if (a != b && !g.has_directed(a, b)) {
                Graph h = g.with_edge(Edge::directed(a, b));
                if (markov_equivalent(g, h)) {
                    maximal = false;
                    if (addable) addable->push_back(Edge::directed(a, b));
                }
            }
            if (a < b && !g.has_blunt(a, b)) {
                Graph h = g.with_edge(Edge::blunt(a, b));
                if (markov_equivalent(g, h)) {
                    maximal = false;
                    if (addable) addable->push_back(Edge::blunt(a, b));
                }
            }
        }
    }
    return maximal;
}

bool blunt_path_edge_addition(const Graph& g, int a, int b) {
    require_loops(g);
    if (a == b || g.has_blunt(a, b)) throw GraphError("expected an absent non-loop blunt edge");
    NodeSet allowed = ancestors(g, NodeSet::of(g.n(), {a, b}));
    // Reachability from a to b through blunt edges whose interior stays in
    // an({a,b}).
    NodeSet reached(g.n());
    std::vector<int> stack{a};
    bool found = g.blunt_neighbors(a).contains(b);
    while (!stack.empty() && !found) {
        int v = stack.back();
        stack.pop_back();
        g.blunt_neighbors(v).for_each([&](int w) {
            if (found) return;
            if (w == b) {
                found = true;
                return;
            }
            if (w != a && allowed.contains(w) && !reached.contains(w)) {
                reached.add(w);
                stack.push_back(w);
            }
        });
    }
    if (!found) return false;
    if (!markov_equivalent(g, g.with_edge(Edge::blunt(a, b))))
        throw GraphError("internal error: blunt-path hypothesis held but equivalence failed");
    return true;
}

EquivalenceClass enumerate_class(const Graph& g) {
    require_cdg(g);
    require_loops(g);
    int n = g.n();
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) slots.emplace_back(a, b);
    if (slots.size() > 20) throw GraphError("enumerate_class: too many blunt slots");
    Graph base = directed_part(g);
    EquivalenceClass cls;
    cls.representative = g;
    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
        Graph cand = base;
        for (size_t i = 0; i < slots.size(); ++i)
            if ((mask >> i) & 1) cand.add_blunt(slots[i].first, slots[i].second);
        if (markov_equivalent(g, cand)) {
            cls.members.push_back(cand);
            masks.push_back(mask);
        }
    }
    std::uint32_t uni = 0, inter = ~0u;
    for (auto m : masks) {
        uni |= m;
        inter &= m;
    }
    for (size_t i = 0; i < masks.size(); ++i) {
        if (masks[i] == uni) cls.greatest = (int)i;
        if (masks[i] == inter) cls.least = (int)i;
    }
    return cls;
}

} // namespace cdgkit
