#include "cdgkit/separation.hpp"

#include <algorithm>
#include <deque>

namespace cdgkit {

namespace {

enum Mark { Tail = 0, Stump = 1, Head = 2 };

const char* edge_op(Mark near, Mark far) {
    if (near == Tail) return "->";
    if (far == Tail) return "<-";
    if (near == Stump) return "|-|";
    return "<->";
}

// Enumerates traversals of edges incident to v: the mark at the v side and at
// the far side. Loops appear in both orientations.
template <typename F>
void for_half_edges(const Graph& g, int v, F f) {
    g.children(v).for_each([&](int w) { f(w, Tail, Head); });
    g.parents(v).for_each([&](int w) { f(w, Head, Tail); });
    g.blunt_neighbors(v).for_each([&](int w) { f(w, Stump, Stump); });
    g.bidirected_neighbors(v).for_each([&](int w) { f(w, Head, Head); });
}

// Nontrivial walk a ... b with every interior node a collider, all nodes in
// node_mask, interiors additionally in allowed_interior.
bool collider_walk(const Graph& g, int a, int b, const NodeSet& allowed_interior,
                   const NodeSet& node_mask) {
    int n = g.n();
    std::vector<char> visited(2 * n, 0);
    std::vector<std::pair<int, bool>> stack;
    bool found = false;
    auto push = [&](int w, Mark far) {
        if (found || !node_mask.contains(w)) return;
        if (w == b) {
            found = true;
            return;
        }
        bool neck = far != Tail;
        if (!visited[2 * w + neck]) {
            visited[2 * w + neck] = 1;
            stack.push_back({w, neck});
        }
    };
    for_half_edges(g, a, [&](int w, Mark, Mark far) { push(w, far); });
    while (!stack.empty() && !found) {
        auto [v, neck] = stack.back();
        stack.pop_back();
        if (!neck || !allowed_interior.contains(v)) continue;
        for_half_edges(g, v, [&](int w, Mark near, Mark far) {
            if (near == Tail) return; // interior collider needs a neck on both sides
            push(w, far);
        });
    }
    return found;
}

// Collider-connected pairs inside node_mask, as adjacency sets.
std::vector<NodeSet> augmented_adjacency(const Graph& g, const NodeSet& node_mask) {
    int n = g.n();
    std::vector<NodeSet> aug(n, NodeSet(n));
    node_mask.for_each([&](int u) {
        // One sweep of the collider-walk search collects everything reachable
        // from u, i.e. all v with an augmented edge u - v.
        std::vector<char> visited(2 * n, 0);
        std::vector<std::pair<int, bool>> stack;
        auto push = [&](int w, Mark far) {
            if (!node_mask.contains(w)) return;
            aug[u].add(w);
            bool neck = far != Tail;
            if (!visited[2 * w + neck]) {
                visited[2 * w + neck] = 1;
                stack.push_back({w, neck});
            }
        };
        for_half_edges(g, u, [&](int w, Mark, Mark far) { push(w, far); });
        while (!stack.empty()) {
            auto [v, neck] = stack.back();
            stack.pop_back();
            if (!neck) continue;
            for_half_edges(g, v, [&](int w, Mark near, Mark far) {
                if (near == Tail) return;
                push(w, far);
            });
        }
    });
    return aug;
}

bool undirected_separated(const std::vector<NodeSet>& aug, const NodeSet& start,
                          const NodeSet& target, const NodeSet& blocked) {
    if (start.intersects(target)) return false;
    NodeSet reached = start;
    NodeSet frontier = start.minus(blocked);
    while (!frontier.empty()) {
        NodeSet next((int)aug.size());
        frontier.for_each([&](int v) { next |= aug[v]; });
        next = next.minus(reached);
        if (next.intersects(target)) return false;
        reached |= next;
        frontier = next.minus(blocked);
    }
    return true;
}

struct ProxyGraph {
    Graph g;
    NodeSet proxies; // indices of the added proxy nodes
};

ProxyGraph build_proxy(const Graph& g, const NodeSet& B) {
    ProxyGraph p;
    p.g = g;
    int extra = B.count();
    p.proxies = NodeSet(g.n() + extra);
    B.for_each([&](int b) {
        int bp = p.g.add_node(g.label(b) + "'");
        p.proxies.add(bp);
        g.parents(b).for_each([&](int a) { p.g.add_directed(a, bp); });
    });
    return p;
}

} // namespace

bool augmented_separated(const Graph& g, const SeparationQuery& q) {
    NodeSet startA = q.A.minus(q.C);
    if (startA.empty()) return true;
    ProxyGraph p = build_proxy(g, q.B);
    NodeSet mask = ancestors(p.g, startA | p.proxies | q.C);
    auto aug = augmented_adjacency(p.g, mask);
    return undirected_separated(aug, startA, p.proxies, q.C);
}

bool mu_separated(const Graph& g, const SeparationQuery& q) { return augmented_separated(g, q); }
bool mu_separated(const Graph& g, const NodeSet& A, const NodeSet& B, const NodeSet& C) {
    return augmented_separated(g, {A, B, C});
}

bool walk_state_separated(const Graph& g, const SeparationQuery& q, Walk* witness) {
    int n = g.n();
    NodeSet anC = ancestors(g, q.C);
    NodeSet starts = q.A.minus(q.C);
    std::vector<char> visited(3 * n, 0);
    struct Parent { int state = -1; WalkStep step; };
    std::vector<Parent> parent(3 * n);
    std::vector<int> queue;
    bool connected = false;
    int accept_state = -1;
    WalkStep accept_step;

    auto offer = [&](int from_state, int from, int w, Mark near, Mark far) {
        if (connected) return;
        WalkStep step{from, w, edge_op(near, far)};
        if (far == Head && q.B.contains(w)) {
            connected = true;
            accept_state = from_state;
            accept_step = step;
            return;
        }
        int s = 3 * w + far;
        if (!visited[s]) {
            visited[s] = 1;
            parent[s] = {from_state, step};
            queue.push_back(s);
        }
    };

    starts.for_each([&](int a) {
        for_half_edges(g, a, [&](int w, Mark near, Mark far) { offer(-1, a, w, near, far); });
    });
    for (size_t qi = 0; qi < queue.size() && !connected; ++qi) {
        int s = queue[qi];
        int v = s / 3;
        Mark arrival = (Mark)(s % 3);
        for_half_edges(g, v, [&](int w, Mark near, Mark far) {
            bool collider = arrival != Tail && near != Tail;
            bool open = collider ? anC.contains(v) : !q.C.contains(v);
            if (open) offer(s, v, w, near, far);
        });
    }
    if (connected && witness) {
        Walk rev{accept_step};
        for (int s = accept_state; s != -1; s = parent[s].state) rev.push_back(parent[s].step);
        witness->assign(rev.rbegin(), rev.rend());
    }
    return !connected;
}

bool brute_force_separated(const Graph& g, const SeparationQuery& q, int max_len) {
    // Enumerates all walks by length via the step relation on (node, arrival
    // mark) states; a boolean frontier per length is exactly the set of
    // walk endpoints of that length.
    int n = g.n();
    if (max_len < 0) max_len = 2 * n * n;
    NodeSet anC = ancestors(g, q.C);
    std::vector<char> frontier(3 * n, 0);
    bool connected = false;
    q.A.minus(q.C).for_each([&](int a) {
        for_half_edges(g, a, [&](int w, Mark, Mark far) {
            if (far == Head && q.B.contains(w)) connected = true;
            frontier[3 * w + far] = 1;
        });
    });
    for (int len = 2; len <= max_len && !connected; ++len) {
        std::vector<char> next(3 * n, 0);
        bool any = false;
        for (int s = 0; s < 3 * n; ++s) {
            if (!frontier[s]) continue;
            int v = s / 3;
            Mark arrival = (Mark)(s % 3);
            for_half_edges(g, v, [&](int w, Mark near, Mark far) {
                bool collider = arrival != Tail && near != Tail;
                bool open = collider ? anC.contains(v) : !q.C.contains(v);
                if (!open) return;
                if (far == Head && q.B.contains(w)) connected = true;
                next[3 * w + far] = 1;
                any = true;
            });
        }
        if (!any) break;
        frontier.swap(next);
    }
    return !connected;
}

bool m_separated(const Graph& g, const NodeSet& A, const NodeSet& B, const NodeSet& C) {
    if (A.intersects(B)) throw GraphError("m_separated requires disjoint A and B");
    if (A.intersects(C) || B.intersects(C)) throw GraphError("m_separated requires C disjoint from A, B");
    if (A.empty() || B.empty()) return true;
    int n = g.n();
    NodeSet anC = ancestors(g, C);
    std::vector<char> visited(2 * n, 0);
    std::vector<std::pair<int, bool>> stack;
    bool connected = false;
    auto push = [&](int w, Mark far) {
        if (B.contains(w)) {
            connected = true;
            return;
        }
        bool neck = far != Tail;
        if (!visited[2 * w + neck]) {
            visited[2 * w + neck] = 1;
            stack.push_back({w, neck});
        }
    };
    A.for_each([&](int a) {
        for_half_edges(g, a, [&](int w, Mark, Mark far) { push(w, far); });
    });
    while (!stack.empty() && !connected) {
        auto [v, neck] = stack.back();
        stack.pop_back();
        for_half_edges(g, v, [&](int w, Mark near, Mark far) {
            bool collider = neck && near != Tail;
            bool open = collider ? anC.contains(v) : !C.contains(v);
            if (open) push(w, far);
        });
    }
    return !connected;
}

bool m_separated_augmented(const Graph& g, const NodeSet& A, const NodeSet& B,
                           const NodeSet& C) {
    if (A.intersects(B)) throw GraphError("m_separated requires disjoint A and B");
    if (A.empty() || B.empty()) return true;
    NodeSet mask = ancestors(g, A | B | C);
    auto aug = augmented_adjacency(g, mask);
    return undirected_separated(aug, A, B, C);
}

bool neck_reachable(const Graph& g, const NodeSet& A, int w, const NodeSet& W) {
    if (A.empty()) return false;
    int n = g.n();
    NodeSet anW = ancestors(g, W);
    std::vector<char> visited(2 * n, 0);
    std::vector<std::pair<int, bool>> stack;
    bool found = false;
    auto push = [&](int v, Mark far) {
        if (v == w && far != Tail) {
            found = true;
            return;
        }
        bool neck = far != Tail;
        if (!visited[2 * v + neck]) {
            visited[2 * v + neck] = 1;
            stack.push_back({v, neck});
        }
    };
    A.for_each([&](int a) {
        for_half_edges(g, a, [&](int v, Mark, Mark far) { push(v, far); });
    });
    while (!stack.empty() && !found) {
        auto [v, neck] = stack.back();
        stack.pop_back();
        for_half_edges(g, v, [&](int t, Mark near, Mark far) {
            bool collider = neck && near != Tail;
            bool open = collider ? anW.contains(v) : !W.contains(v);
            if (open) push(t, far);
        });
    }
    return found;
}

bool collider_connected(const Graph& g, int a, int b, const NodeSet& allowed_interior) {
    return collider_walk(g, a, b, allowed_interior, g.all_nodes());
}

bool weak_inducing_path_exists(const Graph& g, int a, int b) {
    if (a == b) throw GraphError("weak inducing path requires distinct endpoints");
    NodeSet ends(g.n());
    ends.add(a);
    ends.add(b);
    return collider_connected(g, a, b, ancestors(g, ends));
}

NodeSet canonical_separator(const Graph& g, int a, int b) {
    if (a == b) throw GraphError("canonical separator requires distinct endpoints");
    if (weak_inducing_path_exists(g, a, b))
        throw GraphError("no separator exists: weak inducing path between " + g.label(a) +
                         " and " + g.label(b));
    NodeSet ends(g.n());
    ends.add(a);
    ends.add(b);
    NodeSet an_ab = ancestors(g, ends);
    NodeSet all = g.all_nodes();
    NodeSet d(g.n());
    an_ab.for_each([&](int c) {
        if (c != a && c != b && collider_connected(g, c, b, all)) d.add(c);
    });
    return d;
}

IndependenceModel independence_model(const Graph& g, int cap) {
    int n = g.n();
    if (n > cap) throw GraphError("independence_model: node cap exceeded");
    IndependenceModel m;
    m.n = n;
    m.sep.assign(n * n, std::vector<bool>(std::size_t{1} << n, false));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (std::uint64_t cm = 0; cm < (std::uint64_t{1} << n); ++cm) {
                SeparationQuery q{NodeSet(n), NodeSet(n), NodeSet(n)};
                q.A.add(a);
                q.B.add(b);
                for (int i = 0; i < n; ++i)
                    if ((cm >> i) & 1) q.C.add(i);
                m.sep[a * n + b][cm] = walk_state_separated(g, q);
            }
        }
    }
    return m;
}

} // namespace cdgkit
