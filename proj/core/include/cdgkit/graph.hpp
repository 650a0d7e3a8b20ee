#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdgkit/nodeset.hpp"

namespace cdgkit {

enum class EdgeKind { Directed, Blunt, Bidirected };

// Directed: a = tail, b = head. Blunt/Bidirected are unordered, normalized a <= b.
struct Edge {
    EdgeKind kind;
    int a, b;

    static Edge directed(int tail, int head) { return {EdgeKind::Directed, tail, head}; }
    static Edge blunt(int x, int y) {
        if (x > y) { int t = x; x = y; y = t; }
        return {EdgeKind::Blunt, x, y};
    }
    static Edge bidirected(int x, int y) {
        if (x > y) { int t = x; x = y; y = t; }
        return {EdgeKind::Bidirected, x, y};
    }
    friend bool operator==(const Edge& l, const Edge& r) {
        return l.kind == r.kind && l.a == r.a && l.b == r.b;
    }
    friend bool operator<(const Edge& l, const Edge& r) {
        if (l.kind != r.kind) return (int)l.kind < (int)r.kind;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    }
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mixed graph with directed, blunt and bidirected edges. cDGs carry directed +
// blunt edges; DMGs directed + bidirected. Blunt loops are rejected everywhere.
class Graph {
public:
    Graph() = default;

    int n() const { return (int)labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int i) const { return labels_[i]; }
    int index_of(const std::string& label) const; // -1 when absent
    int add_node(const std::string& label);       // idempotent, returns index

    void add_directed(int tail, int head);
    void add_blunt(int x, int y); // throws GraphError on x == y
    void add_bidirected(int x, int y);
    Graph with_edge(const Edge& e) const;
    Graph without_blunt(int x, int y) const;

    bool has_directed(int tail, int head) const { return children_[tail].contains(head); }
    bool has_blunt(int x, int y) const { return blunt_[x].contains(y); }
    bool has_bidirected(int x, int y) const { return bidir_[x].contains(y); }
    bool adjacent(int x, int y) const {
        return has_directed(x, y) || has_directed(y, x) || has_blunt(x, y) || has_bidirected(x, y);
    }

    const NodeSet& children(int i) const { return children_[i]; }
    const NodeSet& parents(int i) const { return parents_[i]; }
    const NodeSet& blunt_neighbors(int i) const { return blunt_[i]; }
    const NodeSet& bidirected_neighbors(int i) const { return bidir_[i]; }
    NodeSet parents_of(const NodeSet& s) const;

    NodeSet all_nodes() const {
        NodeSet s(n());
        for (int i = 0; i < n(); ++i) s.add(i);
        return s;
    }

    bool has_blunt_edges() const;
    bool has_bidirected_edges() const;
    bool all_loops_present() const;

    std::vector<Edge> edges() const; // canonical order: directed, blunt, bidirected; lexicographic

private:
    void ensure_node(int i) const;
    std::vector<std::string> labels_;
    std::map<std::string, int> index_;
    std::vector<NodeSet> children_, parents_, blunt_, bidir_;
};

class ParseError : public GraphError {
public:
    ParseError(const std::string& msg, int line)
        : GraphError(msg + " (line " + std::to_string(line) + ")"), line_no(line) {}
    int line_no;
};

// .cdg format: optional `nodes: a b c` header, one edge per line
// (`a -> b`, `a |-| b`, `a <-> b`), `#` comments, blank lines ignored.
Graph parse_graph(const std::string& text);
std::string serialize(const Graph& g); // canonical inverse of parse_graph

NodeSet ancestors(const Graph& g, const NodeSet& c);
NodeSet descendants(const Graph& g, const NodeSet& c);

struct Condensation {
    std::vector<NodeSet> components;         // sorted by minimum node index
    std::vector<int> component_of;           // node -> component index
    std::vector<NodeSet> dag_parents;        // over component indices
    std::vector<NodeSet> dag_children;
};
Condensation strongly_connected_components(const Graph& g);

// Ancestors of component c in the condensation DAG, including c itself.
NodeSet condensation_ancestors(const Condensation& c, int comp);

// Every nonempty ancestral set A = an(A), as unions of down-closed component
// sets of the condensation; sorted by cardinality then lexicographic bitset.
std::vector<NodeSet> ancestral_sets(const Graph& g);

struct BluntComponent {
    NodeSet nodes;
    bool isolated; // singleton with no blunt edges
};
std::vector<BluntComponent> blunt_components(const Graph& g);

Graph induced_subgraph(const Graph& g, const NodeSet& keep);
Graph directed_part(const Graph& g);
Graph blunt_part(const Graph& g);

struct Diagnostics {
    std::vector<std::string> messages;
    bool ok() const { return messages.empty(); }
};
// Reports missing directed loops and class violations (mixed blunt/bidirected).
Diagnostics validate(const Graph& g);

Graph add_all_loops(const Graph& g);

} // namespace cdgkit
