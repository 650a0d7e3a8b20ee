#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cdgkit/graph.hpp"
#include "cdgkit/ou.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline cdgkit::Graph fixture(const std::string& name) {
    return cdgkit::parse_graph(read_file(std::string(FIXTURE_DIR) + "/" + name));
}

// Random cDG with all loops, for property tests.
inline cdgkit::Graph random_cdg(int n, std::uint64_t seed, double pdir = 0.3,
                                double pblunt = 0.3) {
    cdgkit::Graph g;
    std::uint64_t ctr = 0;
    auto u = [&] { return cdgkit::ou::uniform01(seed, ctr++); };
    for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
    for (int i = 0; i < n; ++i) g.add_directed(i, i);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && u() < pdir) g.add_directed(a, b);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (u() < pblunt) g.add_blunt(a, b);
    return g;
}

// Same directed part as g, fresh random blunt edges.
inline cdgkit::Graph rerandomize_blunt(const cdgkit::Graph& g, std::uint64_t seed,
                                       double pblunt = 0.3) {
    cdgkit::Graph out = cdgkit::directed_part(g);
    std::uint64_t ctr = 0;
    for (int a = 0; a < g.n(); ++a)
        for (int b = a + 1; b < g.n(); ++b)
            if (cdgkit::ou::uniform01(seed, ctr++) < pblunt) out.add_blunt(a, b);
    return out;
}

// All 3-node cDGs with full loops: directed mask over the 6 off-diagonal
// ordered pairs, blunt mask over the 3 unordered pairs.
inline cdgkit::Graph cdg3(unsigned dmask, unsigned bmask) {
    cdgkit::Graph g;
    for (int i = 0; i < 3; ++i) g.add_node("n" + std::to_string(i));
    for (int i = 0; i < 3; ++i) g.add_directed(i, i);
    int bit = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) {
                if (dmask >> bit & 1) g.add_directed(a, b);
                ++bit;
            }
    bit = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            if (bmask >> bit & 1) g.add_blunt(a, b);
            ++bit;
        }
    return g;
}

// Example-style 3-node model: alpha -> beta directed, beta |-| gamma via a
// shared diffusion column, loops on every node.
inline cdgkit::ou::OUModel chain_model() {
    cdgkit::ou::OUModel m;
    m.nodes = {"alpha", "beta", "gamma"};
    m.M = cdgkit::ou::Matrix::Zero(3, 3);
    m.M(0, 0) = -1.0;
    m.M(1, 0) = 0.5;
    m.M(1, 1) = -1.0;
    m.M(2, 2) = -1.0;
    m.mu = cdgkit::ou::Vector(3);
    m.mu << 0.2, -0.1, 0.3;
    m.sigma0 = cdgkit::ou::Matrix::Zero(3, 4);
    m.sigma0(0, 0) = 1.0;
    m.sigma0(1, 1) = 1.0;
    m.sigma0(1, 3) = 0.7;
    m.sigma0(2, 2) = 1.0;
    m.sigma0(2, 3) = 0.6;
    m.gamma0_diag = cdgkit::ou::Vector(3);
    m.gamma0_diag << 1.0, 1.0, 1.0;
    return m;
}

} // namespace testutil
