#include "cdgkit/ou.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>

#include "cdgkit/separation.hpp"
#include "json.hpp"

namespace cdgkit::ou {

namespace {

Matrix submat(const Matrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
    return out;
}

Vector subvec(const Vector& v, const std::vector<int>& idx) {
    Vector out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void require_pd(const Matrix& S, const char* what) {
    Eigen::LLT<Matrix> llt(sym(S));
    if (llt.info() != Eigen::Success)
        throw GraphError(std::string(what) + " is not positive definite");
}

} // namespace

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t r = splitmix64(splitmix64(seed) + counter);
    return ((double)(r >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double normal(std::uint64_t seed, std::uint64_t counter) {
    double u1 = uniform01(seed, 2 * counter);
    double u2 = uniform01(seed, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

OUModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    OUModel m;
    m.nodes = j.at("nodes").get<std::vector<std::string>>();
    int n = (int)m.nodes.size();
    auto mat = [&](const nlohmann::json& a, const char* name) {
        if (!a.is_array() || a.empty()) throw GraphError(std::string("bad matrix: ") + name);
        int rows = (int)a.size(), cols = (int)a[0].size();
        Matrix out(rows, cols);
        for (int i = 0; i < rows; ++i) {
            if ((int)a[i].size() != cols)
                throw GraphError(std::string("ragged matrix: ") + name);
            for (int k = 0; k < cols; ++k) out(i, k) = a[i][k].get<double>();
        }
        return out;
    };
    m.M = mat(j.at("M"), "M");
    if (m.M.rows() != n || m.M.cols() != n) throw GraphError("M must be n x n");
    auto muv = j.at("mu").get<std::vector<double>>();
    if ((int)muv.size() != n) throw GraphError("mu must have n entries");
    m.mu = Eigen::Map<Vector>(muv.data(), n);
    if (j.contains("sigma0")) {
        m.sigma0 = mat(j.at("sigma0"), "sigma0");
        if (m.sigma0.rows() != n) throw GraphError("sigma0 must have n rows");
    }
    if (j.contains("Sigma")) {
        Matrix S = mat(j.at("Sigma"), "Sigma");
        if (S.rows() != n || S.cols() != n) throw GraphError("Sigma must be n x n");
        m.Sigma_exact = S;
        if (j.contains("sigma0")) {
            // keep provided factor
        } else {
            Eigen::LLT<Matrix> llt(sym(S));
            if (llt.info() != Eigen::Success) throw GraphError("Sigma is not positive definite");
            m.sigma0 = llt.matrixL();
        }
    }
    if (m.sigma0.size() == 0) throw GraphError("model needs sigma0 or Sigma");
    auto g0 = j.at("Gamma0_diag").get<std::vector<double>>();
    if ((int)g0.size() != n) throw GraphError("Gamma0_diag must have n entries");
    m.gamma0_diag = Eigen::Map<Vector>(g0.data(), n);
    return m;
}

std::string model_to_json(const OUModel& m) {
    nlohmann::json j;
    j["nodes"] = m.nodes;
    auto mat = [](const Matrix& M) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < M.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
            a.push_back(row);
        }
        return a;
    };
    j["M"] = mat(m.M);
    j["mu"] = std::vector<double>(m.mu.data(), m.mu.data() + m.mu.size());
    j["sigma0"] = mat(m.sigma0);
    if (m.Sigma_exact) j["Sigma"] = mat(*m.Sigma_exact);
    j["Gamma0_diag"] =
        std::vector<double>(m.gamma0_diag.data(), m.gamma0_diag.data() + m.gamma0_diag.size());
    return j.dump(2);
}

Graph canonical_lig(const OUModel& m, double tau0) {
    Matrix S = m.Sigma();
    require_pd(S, "Sigma");
    Graph g;
    for (auto& l : m.nodes) g.add_node(l);
    int n = m.n();
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            if (std::abs(m.M(b, a)) > tau0) g.add_directed(a, b);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (std::abs(S(a, b)) > tau0) g.add_blunt(a, b);
    return g;
}

bool is_stable(const Matrix& M) {
    if (M.rows() != M.cols()) throw GraphError("is_stable: matrix not square");
    if (M.rows() == 0) return true;
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success) throw GraphError("eigen iteration did not converge");
    return es.eigenvalues().real().maxCoeff() < 0.0;
}

Matrix lyapunov_solve(const Matrix& M, const Matrix& Q) {
    int n = (int)M.rows();
    if (Q.rows() != n || Q.cols() != n) throw GraphError("lyapunov_solve: dimension mismatch");
    if (n == 0) return Matrix(0, 0);
    Matrix I = Matrix::Identity(n, n);
    Matrix K = kron(I, M) + kron(M, I);
    Vector q = Eigen::Map<const Vector>(Q.data(), n * n);
    Vector x = K.partialPivLu().solve(-q);
    Matrix G = sym(Eigen::Map<Matrix>(x.data(), n, n));
    double qn = Q.norm();
    double res = (M * G + G * M.transpose() + Q).norm();
    if (!std::isfinite(res) || res > 1e-10 * (qn > 0 ? qn : 1.0))
        throw GraphError("lyapunov_solve: singular system (is M stable?)");
    return G;
}

Matrix expm(const Matrix& A) {
    if (A.rows() != A.cols()) throw GraphError("expm: matrix not square");
    int n = (int)A.rows();
    if (n == 0) return Matrix(0, 0);
    static const double c[7] = {1.0,        1.0 / 2.0,     5.0 / 44.0,    1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) s = std::max(0, (int)std::ceil(std::log2(norm / 0.5)));
    Matrix As = A / std::ldexp(1.0, s);
    Matrix I = Matrix::Identity(n, n);
    Matrix P = I; // As^k
    Matrix N = c[0] * I, D = c[0] * I;
    for (int k = 1; k <= 6; ++k) {
        P = P * As;
        N += c[k] * P;
        D += (k % 2 ? -c[k] : c[k]) * P;
    }
    Matrix R = D.partialPivLu().solve(N);
    for (int i = 0; i < s; ++i) R = R * R;
    return R;
}

Partition16 partition_v1_v6(const Graph& g, const NodeSet& A, const NodeSet& C) {
    int n = g.n();
    if (A.intersects(C)) throw GraphError("partition: A and C must be disjoint");
    Partition16 p;
    p.W = A | C;
    p.U = g.all_nodes().minus(p.W);
    p.V1 = NodeSet(n);
    p.V2 = NodeSet(n);
    p.V3 = NodeSet(n);
    p.V4 = NodeSet(n);
    p.V5 = NodeSet(n);
    p.V6 = NodeSet(n);
    for (int u : p.U.elements()) {
        if (m_separated(g, NodeSet::of(n, {u}), A, C)) p.V1.add(u);
    }
    NodeSet AC = A | C;
    for (int u : p.U.elements()) {
        if (p.V1.contains(u)) continue;
        if (m_separated(g, NodeSet::of(n, {u}), p.V1, AC))
            p.V2.add(u);
        else
            p.V3.add(u);
    }
    for (int w : p.W.elements()) {
        bool r1 = neck_reachable(g, p.V1, w, p.W);
        bool r2 = neck_reachable(g, p.V2, w, p.W);
        if (r1) p.V4.add(w);
        if (r2) p.V5.add(w);
        if (!r1 && !r2) p.V6.add(w);
    }
    if (p.V4.intersects(p.V5))
        throw GraphError("partition: V4 and V5 overlap (query not separated)");
    return p;
}

RiccatiSystem build_def(const OUModel& m, const NodeSet& U, const NodeSet& W) {
    RiccatiSystem sys;
    sys.u_nodes = U.elements();
    sys.w_nodes = W.elements();
    Matrix S = m.Sigma();
    Matrix Muu = submat(m.M, sys.u_nodes, sys.u_nodes);
    Matrix Mwu = submat(m.M, sys.w_nodes, sys.u_nodes);
    Matrix ss = submat(S, sys.u_nodes, sys.u_nodes);  // s.s
    Matrix sS = submat(S, sys.u_nodes, sys.w_nodes);  // s.S
    Matrix SS = submat(S, sys.w_nodes, sys.w_nodes);  // S.S
    Matrix SSi;
    if (SS.rows() > 0) {
        Eigen::LLT<Matrix> llt(sym(SS));
        if (llt.info() != Eigen::Success) throw GraphError("build_def: S.S singular");
        SSi = llt.solve(Matrix::Identity(SS.rows(), SS.rows()));
    } else {
        SSi = Matrix(0, 0);
    }
    sys.D = Muu.transpose() - Mwu.transpose() * SSi * sS.transpose();
    sys.E = sym(Mwu.transpose() * SSi * Mwu);
    sys.F = sym(ss - sS * SSi * sS.transpose());
    require_pd(sys.F, "build_def: F (Schur complement)");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sys.E);
    if (sys.E.rows() > 0 && es.eigenvalues().minCoeff() < -1e-10 * (1 + sys.E.norm()))
        throw GraphError("build_def: E not positive semidefinite");
    return sys;
}

CareResult care_solve(const RiccatiSystem& sys) {
    int k = (int)sys.D.rows();
    CareResult out;
    if (k == 0) {
        out.gamma_bar = Matrix(0, 0);
        return out;
    }
    Matrix H(2 * k, 2 * k);
    H.topLeftCorner(k, k) = sys.D;
    H.topRightCorner(k, k) = -sys.E;
    H.bottomLeftCorner(k, k) = -sys.F;
    H.bottomRightCorner(k, k) = -sys.D.transpose();
    Eigen::EigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success) throw GraphError("care_solve: eigen iteration failed");
    std::vector<int> stable;
    for (int i = 0; i < 2 * k; ++i)
        if (es.eigenvalues()[i].real() < 0) stable.push_back(i);
    if ((int)stable.size() != k)
        throw GraphError("care_solve: Hamiltonian has near-imaginary eigenvalues");
    Eigen::MatrixXcd V(2 * k, k);
    for (int i = 0; i < k; ++i) V.col(i) = es.eigenvectors().col(stable[i]);
    Eigen::MatrixXcd V1 = V.topRows(k), V2 = V.bottomRows(k);
    Eigen::MatrixXcd Xc = V1.transpose()
                              .colPivHouseholderQr()
                              .solve(V2.transpose())
                              .transpose();
    Matrix X = sym(Xc.real());
    out.iterates.push_back(X);

    auto residual = [&](const Matrix& G) {
        return (G * sys.D + sys.D.transpose() * G - G * sys.E * G + sys.F).norm();
    };
    double target = 1e-9 * (sys.F.norm() + X.squaredNorm() * sys.E.norm() + 1e-300);
    double res = residual(X);
    for (int it = 0; it < 30 && res > target; ++it) {
        Matrix L = (sys.D - sys.E * X).transpose();
        Matrix Q = X * sys.E * X + sys.F;
        Matrix Xn = lyapunov_solve(L, Q);
        double rn = residual(Xn);
        if (rn > 1e3 * res + 1e-12) throw GraphError("care_solve: Newton divergence");
        X = Xn;
        res = rn;
        out.newton_steps++;
        out.iterates.push_back(X);
    }
    out.gamma_bar = X;
    out.residual = res;
    double bound = 1e-8 * (sys.F.norm() + X.squaredNorm() * sys.E.norm());
    if (res > bound && res > 1e-12)
        throw GraphError("care_solve: residual above tolerance");
    return out;
}

std::vector<Matrix> riccati_diff(const RiccatiSystem& sys, const Matrix& gamma0,
                                 const std::vector<double>& t_grid) {
    int k = (int)sys.D.rows();
    std::vector<Matrix> out;
    if (k == 0) {
        out.assign(t_grid.size(), Matrix(0, 0));
        return out;
    }
    require_pd(gamma0, "riccati_diff: Gamma0");
    Matrix Gbar = care_solve(sys).gamma_bar;
    Matrix K = sys.D - sys.E * Gbar;
    Matrix Delta = gamma0 - Gbar;
    Matrix I = Matrix::Identity(k, k);
    Matrix A = I;          // e^{tK}
    Matrix S = Matrix::Zero(k, k); // int_0^t e^{sK} E e^{sK^T} ds
    // Per-step propagator and integral increment via the block exponential
    // exp(h [[K, E], [0, -K^T]]) = [[P, X], [0, P^{-T}]], S_h = X P^T.
    std::map<double, std::pair<Matrix, Matrix>> cache;
    auto step_mats = [&](double h) -> const std::pair<Matrix, Matrix>& {
        auto it = cache.find(h);
        if (it == cache.end()) {
            Matrix Hb = Matrix::Zero(2 * k, 2 * k);
            Hb.topLeftCorner(k, k) = K;
            Hb.topRightCorner(k, k) = sys.E;
            Hb.bottomRightCorner(k, k) = -K.transpose();
            Matrix Eh = expm(h * Hb);
            Matrix P = Eh.topLeftCorner(k, k);
            Matrix Sh = Eh.topRightCorner(k, k) * P.transpose();
            it = cache.emplace(h, std::make_pair(P, sym(Sh))).first;
        }
        return it->second;
    };
    double t_prev = 0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        double t = t_grid[i];
        if (t < t_prev - 1e-15) throw GraphError("riccati_diff: grid must be nondecreasing");
        double h = t - t_prev;
        if (h > 1e-15) {
            const auto& [P, Sh] = step_mats(h);
            S = sym(S + A * Sh * A.transpose());
            A = P * A;
        }
        Matrix inner = I + S * Delta;
        Eigen::PartialPivLU<Matrix> lu(inner);
        Matrix G = Gbar + A.transpose() * Delta * lu.solve(A);
        out.push_back(sym(G));
        t_prev = t;
    }
    return out;
}

std::vector<Matrix> riccati_rk4(const RiccatiSystem& sys, const Matrix& gamma0,
                                const std::vector<double>& t_grid, int substeps) {
    int k = (int)sys.D.rows();
    std::vector<Matrix> out;
    if (k == 0) {
        out.assign(t_grid.size(), Matrix(0, 0));
        return out;
    }
    auto f = [&](const Matrix& G) {
        return Matrix(G * sys.D + sys.D.transpose() * G - G * sys.E * G + sys.F);
    };
    Matrix G = gamma0;
    double t_prev = 0;
    for (double t : t_grid) {
        double span = t - t_prev;
        if (span > 0) {
            int m = std::max(substeps, (int)std::ceil(span / 0.01));
            double h = span / m;
            for (int i = 0; i < m; ++i) {
                Matrix k1 = f(G);
                Matrix k2 = f(G + 0.5 * h * k1);
                Matrix k3 = f(G + 0.5 * h * k2);
                Matrix k4 = f(G + h * k3);
                G = sym(G + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
            }
        }
        out.push_back(G);
        t_prev = t;
    }
    return out;
}

Path euler_maruyama(const OUModel& model, double T, double dt, std::uint64_t seed) {
    if (dt <= 0) throw GraphError("euler_maruyama: dt must be positive");
    int n = model.n(), m = (int)model.sigma0.cols();
    int steps = (int)std::llround(T / dt);
    Path p;
    p.dt = dt;
    p.seed = seed;
    p.X.resize(steps + 1, n);
    std::uint64_t ctr = 0;
    Vector x(n);
    for (int i = 0; i < n; ++i)
        x[i] = model.mu[i] + std::sqrt(model.gamma0_diag[i]) * normal(seed, ctr++);
    p.X.row(0) = x;
    double sq = std::sqrt(dt);
    Vector eps(m);
    for (int k = 0; k < steps; ++k) {
        for (int j = 0; j < m; ++j) eps[j] = normal(seed, ctr++);
        x = x + dt * (model.M * (x - model.mu)) + sq * (model.sigma0 * eps);
        p.X.row(k + 1) = x;
    }
    return p;
}

FilterRun kalman_bucy_filter(const OUModel& model, const NodeSet& W, const Path& path) {
    int n = model.n();
    if (path.dt <= 0 || path.X.cols() != n) throw GraphError("filter: grid mismatch");
    NodeSet U = NodeSet(n);
    for (int i = 0; i < n; ++i)
        if (!W.contains(i)) U.add(i);
    if (U.empty()) throw GraphError("filter: W must be a proper subset of the nodes");
    RiccatiSystem sys = build_def(model, U, W);
    int ku = (int)sys.u_nodes.size(), kw = (int)sys.w_nodes.size();
    int steps = (int)path.X.rows() - 1;
    double dt = path.dt;
    std::vector<double> grid(steps + 1);
    for (int k = 0; k <= steps; ++k) grid[k] = k * dt;

    Matrix S = model.Sigma();
    Matrix Muu = submat(model.M, sys.u_nodes, sys.u_nodes);
    Matrix Muw = submat(model.M, sys.u_nodes, sys.w_nodes);
    Matrix Mwu = submat(model.M, sys.w_nodes, sys.u_nodes);
    Matrix Mww = submat(model.M, sys.w_nodes, sys.w_nodes);
    Matrix sS = submat(S, sys.u_nodes, sys.w_nodes);
    Matrix SS = submat(S, sys.w_nodes, sys.w_nodes);
    Matrix SSi = kw > 0 ? Matrix(Eigen::LLT<Matrix>(sym(SS)).solve(Matrix::Identity(kw, kw)))
                        : Matrix(0, 0);
    Vector a = model.a();
    Vector aU = subvec(a, sys.u_nodes), aW = subvec(a, sys.w_nodes);

    Matrix g0 = Matrix::Zero(ku, ku);
    for (int i = 0; i < ku; ++i) g0(i, i) = model.gamma0_diag[sys.u_nodes[i]];

    FilterRun run;
    run.u_nodes = sys.u_nodes;
    run.gamma = riccati_diff(sys, g0, grid);
    run.m.resize(steps + 1, ku);
    Vector mcur(ku);
    for (int i = 0; i < ku; ++i) mcur[i] = model.mu[sys.u_nodes[i]];
    run.m.row(0) = mcur;
    for (int k = 0; k < steps; ++k) {
        Vector Xw(kw), Xw1(kw);
        for (int j = 0; j < kw; ++j) {
            Xw[j] = path.X(k, sys.w_nodes[j]);
            Xw1[j] = path.X(k + 1, sys.w_nodes[j]);
        }
        Vector drift = aU + Muu * mcur + Muw * Xw;
        Matrix gain = (sS + run.gamma[k] * Mwu.transpose()) * SSi;
        Vector innov = (Xw1 - Xw) - dt * (aW + Mwu * mcur + Mww * Xw);
        mcur = mcur + dt * drift + gain * innov;
        run.m.row(k + 1) = mcur;
    }
    return run;
}

VerificationReport verify_global_markov(const OUModel& model, const NodeSet& A,
                                        const NodeSet& B, const NodeSet& C, double T,
                                        double dt, std::uint64_t seed, int n_paths,
                                        double tol) {
    int n = model.n();
    Graph g = canonical_lig(model);
    VerificationReport rep;
    rep.separated = mu_separated(g, A, B, C);
    NodeSet W1 = C, W2 = C | A;
    double max_mag = 0;
    for (int p = 0; p < n_paths; ++p) {
        Path path = euler_maruyama(model, T, dt, seed + (std::uint64_t)p);
        FilterRun f1 = kalman_bucy_filter(model, W1, path);
        FilterRun f2 = kalman_bucy_filter(model, W2, path);
        std::vector<int> pos1(n, -1), pos2(n, -1);
        for (size_t i = 0; i < f1.u_nodes.size(); ++i) pos1[f1.u_nodes[i]] = (int)i;
        for (size_t i = 0; i < f2.u_nodes.size(); ++i) pos2[f2.u_nodes[i]] = (int)i;
        int steps = (int)path.X.rows() - 1;
        double path_max = 0;
        for (int k = 0; k <= steps; ++k) {
            for (int b : B.elements()) {
                double l1 = 0, l2 = 0;
                for (int d = 0; d < n; ++d) {
                    double c = model.M(b, d);
                    if (c == 0) continue;
                    double v1 = W1.contains(d) ? path.X(k, d) : f1.m(k, pos1[d]);
                    double v2 = W2.contains(d) ? path.X(k, d) : f2.m(k, pos2[d]);
                    l1 += c * (v1 - model.mu[d]);
                    l2 += c * (v2 - model.mu[d]);
                }
                path_max = std::max(path_max, std::abs(l1 - l2));
                max_mag = std::max(max_mag, std::abs(l2));
            }
        }
        rep.max_abs.push_back(path_max);
    }
    rep.scale = std::max(1.0, max_mag);
    double worst = 0;
    for (double d : rep.max_abs) worst = std::max(worst, d);
    rep.max_relative = worst / rep.scale;
    rep.pass = rep.max_relative <= tol;
    return rep;
}

namespace {

void audit_blocks(const Matrix& M, const char* name, const std::vector<NodeSet>& V,
                  const std::vector<std::pair<int, int>>& zero_blocks, double tol,
                  std::vector<std::string>& out) {
    for (auto [bi, bj] : zero_blocks) {
        for (int r : V[bi].elements())
            for (int c : V[bj].elements())
                if (std::abs(M(r, c)) > tol)
                    out.push_back(std::string(name) + "[V" + std::to_string(bi + 1) + ",V" +
                                  std::to_string(bj + 1) + "] nonzero at (" + std::to_string(r) +
                                  "," + std::to_string(c) + ") = " + std::to_string(M(r, c)));
    }
}

} // namespace

SparsityReport audit_model_sparsity(const OUModel& m, const Partition16& p, double tol) {
    SparsityReport rep;
    std::vector<NodeSet> V = {p.V1, p.V2, p.V3, p.V4, p.V5, p.V6};
    // Zero blocks of the drift, 0-based block indices.
    std::vector<std::pair<int, int>> mz = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {3, 1}, {3, 2},
                                           {4, 0}, {4, 2}, {5, 0}, {5, 1}, {5, 2}};
    audit_blocks(m.M, "M", V, mz, tol, rep.violations);
    std::vector<std::pair<int, int>> sz = {{0, 1}, {0, 4}, {0, 5}, {1, 0}, {1, 3}, {1, 5},
                                           {3, 1}, {3, 4}, {3, 5}, {4, 0}, {4, 3}, {4, 5},
                                           {5, 0}, {5, 1}, {5, 3}, {5, 4}};
    audit_blocks(m.Sigma(), "Sigma", V, sz, tol, rep.violations);
    return rep;
}

SparsityReport audit_def_sparsity(const RiccatiSystem& sys, const Partition16& p, double tol) {
    SparsityReport rep;
    int n = 0;
    for (int u : sys.u_nodes) n = std::max(n, u + 1);
    std::vector<int> pos(n, -1);
    for (size_t i = 0; i < sys.u_nodes.size(); ++i) pos[sys.u_nodes[i]] = (int)i;
    auto local = [&](const NodeSet& s) {
        NodeSet out((int)sys.u_nodes.size());
        for (int v : s.elements())
            if (v < n && pos[v] >= 0) out.add(pos[v]);
        return out;
    };
    std::vector<NodeSet> V = {local(p.V1), local(p.V2), local(p.V3)};
    std::vector<std::pair<int, int>> dz = {{0, 1}, {1, 0}, {2, 0}, {2, 1}};
    audit_blocks(sys.D, "D", V, dz, tol, rep.violations);
    std::vector<std::pair<int, int>> ez = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};
    audit_blocks(sys.E, "E", V, ez, tol, rep.violations);
    std::vector<std::pair<int, int>> fz = {{0, 1}, {1, 0}};
    audit_blocks(sys.F, "F", V, fz, tol, rep.violations);
    return rep;
}

std::optional<SeparatedInstance> generate_separated_instance(int n, std::uint64_t seed) {
    if (n < 3) throw GraphError("instance generation needs n >= 3");
    std::uint64_t ctr = 0;
    auto u01 = [&] { return uniform01(seed, ctr++); };
    for (int attempt = 0; attempt < 400; ++attempt) {
        Graph g;
        for (int i = 0; i < n; ++i) g.add_node("v" + std::to_string(i + 1));
        for (int i = 0; i < n; ++i) g.add_directed(i, i);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b && u01() < 0.25) g.add_directed(a, b);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (u01() < 0.25) g.add_blunt(a, b);
        int ai = (int)(u01() * n) % n;
        int bi = (int)(u01() * (n - 1)) % (n - 1);
        if (bi >= ai) ++bi;
        NodeSet A = NodeSet::of(n, {ai}), B = NodeSet::of(n, {bi}), C(n);
        for (int i = 0; i < n; ++i)
            if (i != ai && i != bi && u01() < 0.4) C.add(i);
        if (!mu_separated(g, A, B, C)) continue;

        OUModel m;
        m.nodes = g.labels();
        m.M = Matrix::Zero(n, n);
        for (int b = 0; b < n; ++b)
            for (int a = 0; a < n; ++a) {
                if (a == b)
                    m.M(b, b) = -(1.0 + u01());
                else if (g.has_directed(a, b))
                    m.M(b, a) = (u01() < 0.5 ? -1 : 1) * (0.5 + u01());
            }
        {
            Eigen::EigenSolver<Matrix> es(m.M, false);
            double mr = es.eigenvalues().real().maxCoeff();
            if (mr > -0.05)
                for (int i = 0; i < n; ++i) m.M(i, i) -= mr + 0.5;
        }
        Matrix S = Matrix::Zero(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (g.has_blunt(a, b)) S(a, b) = S(b, a) = (u01() < 0.5 ? -1 : 1) * (0.1 + 0.3 * u01());
        for (int i = 0; i < n; ++i) {
            double row = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) row += std::abs(S(i, j));
            S(i, i) = 1.0 + row + u01();
        }
        Eigen::LLT<Matrix> llt(S);
        if (llt.info() != Eigen::Success) continue;
        m.Sigma_exact = S;
        m.sigma0 = llt.matrixL();
        m.mu = Vector(n);
        m.gamma0_diag = Vector(n);
        for (int i = 0; i < n; ++i) {
            m.mu[i] = 2 * u01() - 1;
            m.gamma0_diag[i] = 0.5 + u01();
        }
        return SeparatedInstance{std::move(m), A, B, C};
    }
    return std::nullopt;
}

} // namespace cdgkit::ou
