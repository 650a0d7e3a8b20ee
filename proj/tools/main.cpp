// cdg: command-line front end for the cdgkit library.
//
// Subcommands cover graph validation, separation queries, Markov equivalence,
// class enumeration, the DNF-tautology reduction, random graph generation,
// OU-model extraction/verification, and the fixture regression corpus.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdgkit/equivalence.hpp"
#include "cdgkit/hardness.hpp"
#include "cdgkit/ou.hpp"
#include "cdgkit/separation.hpp"

using json = nlohmann::ordered_json;
using namespace cdgkit;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw GraphError("cannot write file: " + path);
    out << text;
}

Graph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

NodeSet parse_nodes(const Graph& g, const std::string& csv) {
    NodeSet s(g.n());
    std::stringstream ss(csv);
    std::string label;
    while (std::getline(ss, label, ',')) {
        if (label.empty()) continue;
        int i = g.index_of(label);
        if (i < 0) throw GraphError("unknown node label: " + label);
        s.add(i);
    }
    return s;
}

json labels_of(const Graph& g, const NodeSet& s) {
    json out = json::array();
    for (int i : s.elements()) out.push_back(g.label(i));
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CDGKIT_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

struct Output {
    std::string format = "json";
    bool exit_status = false;
    int rc = 0;

    void emit(const json& j) {
        if (format == "json") {
            std::cout << j.dump(2) << "\n";
            return;
        }
        for (auto& [k, v] : j.items())
            std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    // Negative verdicts flip the exit code only when --exit-status is given.
    void verdict(bool positive) {
        if (exit_status && !positive) rc = 1;
    }
};

Graph random_graph(int n, std::uint64_t seed, double p_dir, double p_blunt) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_node("v" + std::to_string(i + 1));
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i) g.add_directed(i, i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (ou::uniform01(seed, ctr++) < p_dir) g.add_directed(i, j);
            if (i < j && ou::uniform01(seed, ctr++) < p_blunt) g.add_blunt(i, j);
        }
    return g;
}

json walk_to_json(const Graph& g, const Walk& w) {
    json out = json::array();
    for (const WalkStep& s : w)
        out.push_back({{"from", g.label(s.from)}, {"to", g.label(s.to)}, {"edge", s.edge}});
    return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---- corpus: figure-level regressions over the fixtures directory ----

int run_corpus(Output& out, const std::string& dir) {
    auto fx = [&](const std::string& name) { return load_graph(dir + "/" + name); };
    json results = json::array();
    bool all_ok = true;
    auto check = [&](const std::string& name, bool ok) {
        results.push_back({{"check", name}, {"ok", ok}});
        all_ok = all_ok && ok;
    };

    {
        EquivalenceClass c = enumerate_class(fx("fig4_row1_left.cdg"));
        check("fig4_row1 class of 21 without greatest",
              c.members.size() == 21 && !c.has_greatest());
        check("fig4_row1 left equivalent to center",
              markov_equivalent(fx("fig4_row1_left.cdg"), fx("fig4_row1_center.cdg")));
    }
    {
        EquivalenceClass c = enumerate_class(fx("fig5_left.cdg"));
        check("fig5 class of 16", c.members.size() == 16);
        check("fig5 left equivalent to center",
              markov_equivalent(fx("fig5_left.cdg"), fx("fig5_center.cdg")));
        check("fig5 center equivalent to right",
              markov_equivalent(fx("fig5_center.cdg"), fx("fig5_right.cdg")));
    }
    check("fig6 pair not equivalent", !markov_equivalent(fx("fig6_left.cdg"), fx("fig6_right.cdg")));
    {
        Graph l = fx("fig7_left.cdg"), r = fx("fig7_right.cdg");
        check("fig7 pair equivalent, both maximal, class of 2",
              markov_equivalent(l, r) && is_maximal(l) && is_maximal(r) &&
                  enumerate_class(l).members.size() == 2);
    }
    {
        Graph l = fx("fig8_left.cdg"), r = fx("fig8_right.cdg");
        check("fig8 prescreen indistinguishable yet not equivalent",
              vct_prescreen(l, r) == Prescreen::Indistinguishable && !markov_equivalent(l, r));
    }
    {
        Graph l = fx("fig4_3node_row1_left.cdg");
        check("three-node class without greatest", !enumerate_class(l).has_greatest());
        check("three-node class without least",
              !enumerate_class(fx("fig4_3node_row2_left.cdg")).has_least());
    }
    for (const char* name :
         {"fig1_left.cdg", "fig2_left.cdg", "fig2_right.cdg", "fig3.cdg"}) {
        Graph g = fx(name);
        check(std::string(name) + " parses and round-trips",
              serialize(parse_graph(serialize(g))) == serialize(g));
    }

    out.emit({{"command", "corpus"}, {"fixtures", dir}, {"ok", all_ok}, {"results", results}});
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cdg: directed correlation graph toolkit"};
    app.require_subcommand(1);
    Output out;
    app.add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_flag("--exit-status", out.exit_status,
                 "Exit 1 on a negative verdict (not separated / not equivalent / invalid)");

    // validate
    std::string g_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a .cdg file for class violations");
    validate_cmd->add_option("graph", g_path, "Graph file")->required();

    // query-sep
    std::string qs_graph, qs_from, qs_to, qs_given, qs_method = "aug";
    auto* qs_cmd = app.add_subcommand("query-sep", "Decide a mu-separation query");
    qs_cmd->add_option("--graph", qs_graph)->required();
    qs_cmd->add_option("--from", qs_from, "Source labels, comma separated")->required();
    qs_cmd->add_option("--to", qs_to, "Target labels")->required();
    qs_cmd->add_option("--given", qs_given, "Conditioning labels");
    qs_cmd->add_option("--method", qs_method)->check(CLI::IsMember({"aug", "walk", "brute"}));

    // equiv
    std::string eq_g1, eq_g2, eq_method = "alg1";
    auto* eq_cmd = app.add_subcommand("equiv", "Decide Markov equivalence of two graphs");
    eq_cmd->add_option("g1", eq_g1)->required();
    eq_cmd->add_option("g2", eq_g2)->required();
    eq_cmd->add_option("--method", eq_method)
        ->check(CLI::IsMember({"alg1", "collider", "oracle", "prescreen"}));

    // class
    std::string cls_path;
    auto* cls_cmd = app.add_subcommand("class", "Enumerate the Markov equivalence class");
    cls_cmd->add_option("graph", cls_path)->required();

    // vct
    std::string vct_path;
    bool vct_all = false;
    auto* vct_cmd = app.add_subcommand("vct", "List (maximal) virtual collider tripaths");
    vct_cmd->add_option("graph", vct_path)->required();
    vct_cmd->add_flag("--all", vct_all, "List all tripaths, not only maximal ones");

    // maximal
    std::string max_path;
    auto* max_cmd = app.add_subcommand("maximal", "Check maximality, list addable edges");
    max_cmd->add_option("graph", max_path)->required();

    // reduce-dnf
    std::string rd_formula, rd_out_d, rd_out_dplus;
    auto* rd_cmd = app.add_subcommand("reduce-dnf", "Emit the graph pair of a 3DNF formula");
    rd_cmd->add_option("--formula", rd_formula)->required();
    rd_cmd->add_option("--out-d", rd_out_d)->required();
    rd_cmd->add_option("--out-dplus", rd_out_dplus)->required();

    // check-reduction
    std::string cr_formula;
    auto* cr_cmd =
        app.add_subcommand("check-reduction", "Run the tautology/equivalence consistency check");
    cr_cmd->add_option("--formula", cr_formula)->required();

    // random-graph
    int rg_n = 5;
    std::uint64_t rg_seed = default_seed();
    double rg_pdir = 0.3, rg_pblunt = 0.3;
    std::string rg_out;
    auto* rg_cmd = app.add_subcommand("random-graph", "Generate a random cDG with full loops");
    rg_cmd->add_option("--n", rg_n)->check(CLI::Range(1, 16));
    rg_cmd->add_option("--seed", rg_seed);
    rg_cmd->add_option("--p-dir", rg_pdir);
    rg_cmd->add_option("--p-blunt", rg_pblunt);
    rg_cmd->add_option("--out", rg_out, "Write .cdg here instead of stdout");

    // ou-extract
    std::string oe_model, oe_out;
    auto* oe_cmd =
        app.add_subcommand("ou-extract", "Canonical local independence graph of an OU model");
    oe_cmd->add_option("model", oe_model, "Model JSON file")->required();
    oe_cmd->add_option("--out", oe_out, "Write .cdg here instead of stdout");

    // ou-verify
    std::string ov_model, ov_from, ov_to, ov_given;
    int ov_paths = 10;
    double ov_dt = 1e-3, ov_T = 5.0, ov_tol = 1e-8;
    std::uint64_t ov_seed = default_seed() ? default_seed() : 7;
    auto* ov_cmd = app.add_subcommand(
        "ou-verify", "Simulate and filter to verify the global Markov property for one query");
    ov_cmd->add_option("model", ov_model)->required();
    ov_cmd->add_option("--from", ov_from)->required();
    ov_cmd->add_option("--to", ov_to)->required();
    ov_cmd->add_option("--given", ov_given);
    ov_cmd->add_option("--paths", ov_paths);
    ov_cmd->add_option("--dt", ov_dt);
    ov_cmd->add_option("--T", ov_T);
    ov_cmd->add_option("--tol", ov_tol);
    ov_cmd->add_option("--seed", ov_seed);

    // corpus
    std::string corpus_dir = "fixtures";
    auto* corpus_cmd = app.add_subcommand("corpus", "Run the fixture regression corpus");
    corpus_cmd->add_option("--fixtures", corpus_dir, "Fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            Graph g = load_graph(g_path);
            Diagnostics d = validate(g);
            out.emit({{"command", "validate"},
                      {"graph", g_path},
                      {"ok", d.ok()},
                      {"messages", d.messages}});
            out.verdict(d.ok());
        } else if (*qs_cmd) {
            Graph g = load_graph(qs_graph);
            SeparationQuery q{parse_nodes(g, qs_from), parse_nodes(g, qs_to),
                              parse_nodes(g, qs_given)};
            bool separated;
            Walk witness;
            if (qs_method == "aug") {
                separated = augmented_separated(g, q);
                if (!separated) walk_state_separated(g, q, &witness);
            } else if (qs_method == "walk") {
                separated = walk_state_separated(g, q, &witness);
            } else {
                separated = brute_force_separated(g, q);
                if (!separated) walk_state_separated(g, q, &witness);
            }
            json j{{"command", "query-sep"},
                   {"separated", separated},
                   {"method", qs_method}};
            if (!separated) j["witness_walk"] = walk_to_json(g, witness);
            out.emit(j);
            out.verdict(separated);
        } else if (*eq_cmd) {
            Graph g1 = load_graph(eq_g1), g2 = load_graph(eq_g2);
            auto t0 = std::chrono::steady_clock::now();
            json j{{"command", "equiv"}, {"method", eq_method}};
            bool verdict;
            if (eq_method == "alg1") {
                EquivWitness w;
                verdict = markov_equivalent(g1, g2, &w);
                if (!verdict && w.a >= 0)
                    j["witness"] = {{"ancestral_set", labels_of(g1, w.ancestral_set)},
                                    {"pair", {g1.label(w.a), g1.label(w.b)}}};
            } else if (eq_method == "collider") {
                ColliderPath w;
                verdict = same_directed_part(g1, g2) && collider_equivalent(g1, g2, &w);
                if (!verdict && !w.nodes.empty()) {
                    json path = json::array();
                    for (int v : w.nodes) path.push_back(g1.label(v));
                    j["witness"] = {{"uncovered_path", path}};
                }
            } else if (eq_method == "oracle") {
                verdict = markov_equivalent_oracle(g1, g2);
            } else {
                verdict = vct_prescreen(g1, g2) == Prescreen::Indistinguishable;
                j["note"] = "prescreen is necessary, not sufficient";
            }
            j["equivalent"] = verdict;
            j["timings"] = {{"total_ms", ms_since(t0)}};
            out.emit(j);
            out.verdict(verdict);
        } else if (*cls_cmd) {
            Graph g = load_graph(cls_path);
            EquivalenceClass c = enumerate_class(g);
            json members = json::array();
            for (const Graph& m : c.members) members.push_back(serialize(m));
            out.emit({{"command", "class"},
                      {"size", c.members.size()},
                      {"has_greatest", c.has_greatest()},
                      {"has_least", c.has_least()},
                      {"greatest", c.greatest},
                      {"least", c.least},
                      {"members", members}});
        } else if (*vct_cmd) {
            Graph g = load_graph(vct_path);
            auto list = vct_all ? virtual_collider_tripaths(g) : maximal_vcts(g);
            json items = json::array();
            for (const auto& t : list)
                items.push_back({{"a", g.label(t.a)},
                                 {"b", g.label(t.b)},
                                 {"component", labels_of(g, t.C)}});
            out.emit({{"command", "vct"},
                      {"maximal_only", !vct_all},
                      {"count", items.size()},
                      {"tripaths", items}});
        } else if (*max_cmd) {
            Graph g = load_graph(max_path);
            std::vector<Edge> addable;
            bool maximal = is_maximal(g, &addable);
            json adds = json::array();
            for (const Edge& e : addable)
                adds.push_back({{"a", g.label(e.a)}, {"b", g.label(e.b)}});
            out.emit({{"command", "maximal"}, {"maximal", maximal}, {"addable", adds}});
            out.verdict(maximal);
        } else if (*rd_cmd) {
            ReductionPair p = reduce_to_graph_pair(parse_dnf(rd_formula));
            write_file(rd_out_d, serialize(p.D));
            write_file(rd_out_dplus, serialize(p.D_plus));
            out.emit({{"command", "reduce-dnf"},
                      {"nodes", p.D.n()},
                      {"out_d", rd_out_d},
                      {"out_dplus", rd_out_dplus}});
        } else if (*cr_cmd) {
            DnfFormula f = parse_dnf(cr_formula);
            ReductionPair p = reduce_to_graph_pair(f);
            bool taut = is_tautology(f);
            bool equiv = markov_equivalent(p.D, p.D_plus);
            json j{{"command", "check-reduction"},
                   {"tautology", taut},
                   {"equivalent", equiv},
                   {"consistent", taut == equiv}};
            if (!taut) {
                std::vector<bool> a;
                find_falsifier(f, &a);
                NodeSet C = falsifying_assignment_to_separator(p, f, a);
                json assign = json::array();
                for (bool b : a) assign.push_back(b);
                j["falsifier"] = assign;
                j["separator"] = labels_of(p.D, C);
            }
            out.emit(j);
            out.verdict(taut == equiv);
        } else if (*rg_cmd) {
            Graph g = random_graph(rg_n, rg_seed, rg_pdir, rg_pblunt);
            if (rg_out.empty()) {
                std::cout << serialize(g);
            } else {
                write_file(rg_out, serialize(g));
                out.emit({{"command", "random-graph"}, {"seed", rg_seed}, {"out", rg_out}});
            }
        } else if (*oe_cmd) {
            ou::OUModel m = ou::model_from_json(read_file(oe_model));
            Graph g = ou::canonical_lig(m);
            if (oe_out.empty()) {
                std::cout << serialize(g);
            } else {
                write_file(oe_out, serialize(g));
                out.emit({{"command", "ou-extract"}, {"out", oe_out}});
            }
        } else if (*ov_cmd) {
            ou::OUModel m = ou::model_from_json(read_file(ov_model));
            Graph g = ou::canonical_lig(m);
            NodeSet A = parse_nodes(g, ov_from), B = parse_nodes(g, ov_to),
                    C = parse_nodes(g, ov_given);
            ou::VerificationReport r =
                ou::verify_global_markov(m, A, B, C, ov_T, ov_dt, ov_seed, ov_paths, ov_tol);
            out.emit({{"command", "ou-verify"},
                      {"separated", r.separated},
                      {"per_path_max_abs", r.max_abs},
                      {"scale", r.scale},
                      {"max_relative", r.max_relative},
                      {"tolerance", ov_tol},
                      {"verdict", r.separated ? (r.pass ? "PASS" : "FAIL") : "NOT_SEPARATED"}});
            out.verdict(r.separated && r.pass);
        } else if (*corpus_cmd) {
            return run_corpus(out, corpus_dir);
        }
    } catch (const GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return out.rc;
}
