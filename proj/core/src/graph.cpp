#include "cdgkit/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cdgkit {

int Graph::index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

int Graph::add_node(const std::string& label) {
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    int idx = (int)labels_.size();
    labels_.push_back(label);
    index_[label] = idx;
    children_.emplace_back(idx + 1);
    parents_.emplace_back(idx + 1);
    blunt_.emplace_back(idx + 1);
    bidir_.emplace_back(idx + 1);
    return idx;
}

void Graph::ensure_node(int i) const {
    if (i < 0 || i >= n()) throw GraphError("node index out of range");
}

void Graph::add_directed(int tail, int head) {
    ensure_node(tail);
    ensure_node(head);
    children_[tail].add(head);
    parents_[head].add(tail);
}

void Graph::add_blunt(int x, int y) {
    ensure_node(x);
    ensure_node(y);
    if (x == y) throw GraphError("blunt loop rejected: " + labels_[x]);
    blunt_[x].add(y);
    blunt_[y].add(x);
}

void Graph::add_bidirected(int x, int y) {
    ensure_node(x);
    ensure_node(y);
    bidir_[x].add(y);
    bidir_[y].add(x);
}

Graph Graph::with_edge(const Edge& e) const {
    Graph g = *this;
    switch (e.kind) {
    case EdgeKind::Directed: g.add_directed(e.a, e.b); break;
    case EdgeKind::Blunt: g.add_blunt(e.a, e.b); break;
    case EdgeKind::Bidirected: g.add_bidirected(e.a, e.b); break;
    }
    return g;
}

Graph Graph::without_blunt(int x, int y) const {
    Graph g = *this;
    g.blunt_[x].remove(y);
    g.blunt_[y].remove(x);
    return g;
}

NodeSet Graph::parents_of(const NodeSet& s) const {
    NodeSet out(n());
    s.for_each([&](int i) { out |= parents_[i]; });
    return out;
}

bool Graph::has_blunt_edges() const {
    for (int i = 0; i < n(); ++i)
        if (!blunt_[i].empty()) return true;
    return false;
}

bool Graph::has_bidirected_edges() const {
    for (int i = 0; i < n(); ++i)
        if (!bidir_[i].empty()) return true;
    return false;
}

bool Graph::all_loops_present() const {
    for (int i = 0; i < n(); ++i)
        if (!children_[i].contains(i)) return false;
    return true;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < n(); ++i) {
        children_[i].for_each([&](int j) { out.push_back(Edge::directed(i, j)); });
        blunt_[i].for_each([&](int j) { if (i <= j) out.push_back(Edge::blunt(i, j)); });
        bidir_[i].for_each([&](int j) { if (i <= j) out.push_back(Edge::bidirected(i, j)); });
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

bool valid_label(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum((unsigned char)c) && c != '_') return false;
    return true;
}

} // namespace

Graph parse_graph(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "nodes:") {
            for (size_t i = 1; i < tok.size(); ++i) {
                if (!valid_label(tok[i])) throw ParseError("bad node label '" + tok[i] + "'", line_no);
                g.add_node(tok[i]);
            }
            continue;
        }
        if (tok.size() != 3) throw ParseError("expected 'a <op> b'", line_no);
        if (!valid_label(tok[0]) || !valid_label(tok[2]))
            throw ParseError("bad node label", line_no);
        int a = g.add_node(tok[0]);
        int b = g.add_node(tok[2]);
        try {
            if (tok[1] == "->") g.add_directed(a, b);
            else if (tok[1] == "<-") g.add_directed(b, a);
            else if (tok[1] == "|-|") g.add_blunt(a, b);
            else if (tok[1] == "<->") g.add_bidirected(a, b);
            else throw ParseError("unknown edge operator '" + tok[1] + "'", line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const GraphError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return g;
}

std::string serialize(const Graph& g) {
    // Canonical: sorted node header, then directed, blunt, bidirected lines,
    // each block lexicographic by labels.
    std::vector<std::string> names(g.labels());
    std::sort(names.begin(), names.end());
    std::ostringstream out;
    if (!names.empty()) {
        out << "nodes:";
        for (auto& s : names) out << ' ' << s;
        out << '\n';
    }
    auto emit = [&](EdgeKind kind, const char* op, bool unordered) {
        std::vector<std::pair<std::string, std::string>> lines;
        for (const Edge& e : g.edges()) {
            if (e.kind != kind) continue;
            std::string a = g.label(e.a), b = g.label(e.b);
            if (unordered && b < a) std::swap(a, b);
            lines.emplace_back(a, b);
        }
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
        for (auto& [a, b] : lines) out << a << ' ' << op << ' ' << b << '\n';
    };
    emit(EdgeKind::Directed, "->", false);
    emit(EdgeKind::Blunt, "|-|", true);
    emit(EdgeKind::Bidirected, "<->", true);
    return out.str();
}

NodeSet ancestors(const Graph& g, const NodeSet& c) {
    NodeSet result = c;
    NodeSet frontier = c;
    while (!frontier.empty()) {
        NodeSet next(g.n());
        frontier.for_each([&](int i) { next |= g.parents(i); });
        next = next.minus(result);
        result |= next;
        frontier = next;
    }
    return result;
}

NodeSet descendants(const Graph& g, const NodeSet& c) {
    NodeSet result = c;
    NodeSet frontier = c;
    while (!frontier.empty()) {
        NodeSet next(g.n());
        frontier.for_each([&](int i) { next |= g.children(i); });
        next = next.minus(result);
        result |= next;
        frontier = next;
    }
    return result;
}

Condensation strongly_connected_components(const Graph& g) {
    int n = g.n();
    // Tarjan, iterative.
    std::vector<int> low(n, -1), num(n, -1), comp(n, -1);
    std::vector<int> stack;
    std::vector<bool> on_stack(n, false);
    std::vector<NodeSet> comps;
    int counter = 0;

    struct Frame { int v; std::vector<int> next; size_t i; };
    for (int root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, g.children(root).elements(), 0});
        num[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.i < f.next.size()) {
                int w = f.next[f.i++];
                if (num[w] == -1) {
                    num[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, g.children(w).elements(), 0});
                } else if (on_stack[w]) {
                    if (num[w] < low[f.v]) low[f.v] = num[w];
                }
            } else {
                int v = f.v;
                if (low[v] == num[v]) {
                    NodeSet cset(n);
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        cset.add(w);
                        comp[w] = (int)comps.size();
                        if (w == v) break;
                    }
                    comps.push_back(cset);
                }
                call.pop_back();
                if (!call.empty() && low[v] < low[call.back().v]) low[call.back().v] = low[v];
            }
        }
    }

    // Deterministic order: sort components by minimum node index.
    std::vector<int> order((int)comps.size());
    for (size_t i = 0; i < comps.size(); ++i) order[i] = (int)i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return comps[a].first() < comps[b].first(); });
    Condensation c;
    std::vector<int> rank(comps.size());
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = (int)i;
    c.components.resize(comps.size());
    for (size_t i = 0; i < comps.size(); ++i) c.components[rank[i]] = comps[i];
    c.component_of.assign(n, -1);
    for (int v = 0; v < n; ++v) c.component_of[v] = rank[comp[v]];
    int k = (int)comps.size();
    c.dag_parents.assign(k, NodeSet(k));
    c.dag_children.assign(k, NodeSet(k));
    for (int v = 0; v < n; ++v) {
        g.children(v).for_each([&](int w) {
            int cv = c.component_of[v], cw = c.component_of[w];
            if (cv != cw) {
                c.dag_children[cv].add(cw);
                c.dag_parents[cw].add(cv);
            }
        });
    }
    return c;
}

NodeSet condensation_ancestors(const Condensation& c, int comp) {
    int k = (int)c.components.size();
    NodeSet result(k);
    result.add(comp);
    NodeSet frontier = result;
    while (!frontier.empty()) {
        NodeSet next(k);
        frontier.for_each([&](int i) { next |= c.dag_parents[i]; });
        next = next.minus(result);
        result |= next;
        frontier = next;
    }
    return result;
}

std::vector<NodeSet> ancestral_sets(const Graph& g) {
    Condensation c = strongly_connected_components(g);
    int k = (int)c.components.size();
    if (k > 24) throw GraphError("too many strongly connected components for ancestral-set enumeration");
    std::vector<NodeSet> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        bool closed = true;
        for (int i = 0; i < k && closed; ++i) {
            if (!((mask >> i) & 1)) continue;
            c.dag_parents[i].for_each([&](int p) {
                if (!((mask >> p) & 1)) closed = false;
            });
        }
        if (!closed) continue;
        NodeSet a(g.n());
        for (int i = 0; i < k; ++i)
            if ((mask >> i) & 1) a |= c.components[i];
        out.push_back(a);
    }
    std::sort(out.begin(), out.end(), [](const NodeSet& x, const NodeSet& y) {
        int cx = x.count(), cy = y.count();
        if (cx != cy) return cx < cy;
        return x < y;
    });
    return out;
}

std::vector<BluntComponent> blunt_components(const Graph& g) {
    int n = g.n();
    std::vector<bool> seen(n, false);
    std::vector<BluntComponent> out;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        NodeSet compset(n);
        std::vector<int> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            compset.add(v);
            g.blunt_neighbors(v).for_each([&](int w) {
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            });
        }
        out.push_back({compset, compset.count() == 1 && g.blunt_neighbors(s).empty()});
    }
    return out;
}

Graph induced_subgraph(const Graph& g, const NodeSet& keep) {
    Graph out;
    std::vector<int> remap(g.n(), -1);
    keep.for_each([&](int i) { remap[i] = out.add_node(g.label(i)); });
    for (const Edge& e : g.edges()) {
        if (remap[e.a] < 0 || remap[e.b] < 0) continue;
        switch (e.kind) {
        case EdgeKind::Directed: out.add_directed(remap[e.a], remap[e.b]); break;
        case EdgeKind::Blunt: out.add_blunt(remap[e.a], remap[e.b]); break;
        case EdgeKind::Bidirected: out.add_bidirected(remap[e.a], remap[e.b]); break;
        }
    }
    return out;
}

Graph directed_part(const Graph& g) {
    Graph out;
    for (auto& l : g.labels()) out.add_node(l);
    for (const Edge& e : g.edges())
        if (e.kind == EdgeKind::Directed) out.add_directed(e.a, e.b);
    return out;
}

Graph blunt_part(const Graph& g) {
    Graph out;
    for (auto& l : g.labels()) out.add_node(l);
    for (const Edge& e : g.edges())
        if (e.kind == EdgeKind::Blunt) out.add_blunt(e.a, e.b);
    return out;
}

Diagnostics validate(const Graph& g) {
    Diagnostics d;
    for (int i = 0; i < g.n(); ++i)
        if (!g.has_directed(i, i))
            d.messages.push_back("missing directed loop: " + g.label(i));
    if (g.has_blunt_edges() && g.has_bidirected_edges())
        d.messages.push_back("graph mixes blunt and bidirected edges (neither cDG nor DMG)");
    return d;
}

Graph add_all_loops(const Graph& g) {
    Graph out = g;
    for (int i = 0; i < out.n(); ++i) out.add_directed(i, i);
    return out;
}

} // namespace cdgkit
