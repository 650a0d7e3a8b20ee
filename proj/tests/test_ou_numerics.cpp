#include "cdgkit/ou.hpp"

#include <cmath>

#include "cdgkit/equivalence.hpp"
#include "cdgkit/separation.hpp"
#include "doctest.h"
#include "util.hpp"

using namespace cdgkit;
using namespace cdgkit::ou;
using testutil::chain_model;

TEST_CASE("canonical graph extraction") {
    OUModel m = chain_model();
    Graph g = canonical_lig(m);
    Graph want = testutil::fixture("fig1_left.cdg");
    CHECK(serialize(aligned_to(want, g)) == serialize(want));

    OUModel diag;
    diag.nodes = {"a", "b"};
    diag.M = -Matrix::Identity(2, 2);
    diag.mu = Vector::Zero(2);
    diag.sigma0 = Matrix::Identity(2, 2);
    diag.gamma0_diag = Vector::Ones(2);
    Graph gd = canonical_lig(diag);
    CHECK(gd.edges().size() == 2); // loops only

    OUModel dense = diag;
    dense.M << -2, 1, 1, -2;
    Graph gg = canonical_lig(dense);
    CHECK(gg.has_directed(0, 1));
    CHECK(gg.has_directed(1, 0));

    OUModel badsigma = diag;
    badsigma.sigma0 = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(canonical_lig(badsigma), GraphError);
}

TEST_CASE("model json round trip") {
    OUModel m = chain_model();
    OUModel back = model_from_json(model_to_json(m));
    CHECK(back.nodes == m.nodes);
    CHECK((back.M - m.M).norm() == 0);
    CHECK((back.sigma0 - m.sigma0).norm() == 0);
    CHECK((back.mu - m.mu).norm() == 0);
    CHECK((back.gamma0_diag - m.gamma0_diag).norm() == 0);
}

TEST_CASE("stability") {
    CHECK(is_stable(-Matrix::Identity(3, 3)));
    CHECK(!is_stable(Matrix::Identity(3, 3)));
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK(!is_stable(rot));
}

TEST_CASE("lyapunov solutions") {
    Matrix I = Matrix::Identity(2, 2);
    CHECK((lyapunov_solve(-I, 2 * I) - I).norm() < 1e-12);

    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = -1;
    M(1, 1) = -2;
    Matrix G = lyapunov_solve(M, Matrix::Identity(2, 2));
    CHECK(std::abs(G(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(G(1, 1) - 0.25) < 1e-12);

    // integral form via quadrature
    for (int s = 0; s < 5; ++s) {
        int n = 3;
        Matrix A = Matrix::Zero(n, n), B = Matrix::Zero(n, n);
        std::uint64_t ctr = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                A(i, j) = uniform01(300 + s, ctr++) - 0.5;
                B(i, j) = uniform01(400 + s, ctr++) - 0.5;
            }
        A -= 2.0 * Matrix::Identity(n, n);
        Matrix Q = B * B.transpose() + 0.1 * Matrix::Identity(n, n);
        Matrix G2 = lyapunov_solve(A, Q);
        Matrix quad = Matrix::Zero(n, n);
        double h = 1e-3;
        for (int k = 0; k < 20000; ++k) {
            Matrix E1 = expm(A * (k * h)), E2 = expm(A * ((k + 1) * h));
            quad += 0.5 * h * (E1 * Q * E1.transpose() + E2 * Q * E2.transpose());
        }
        CHECK((G2 - quad).norm() < 1e-3 * Q.norm());
        CHECK((A * G2 + G2 * A.transpose() + Q).norm() <= 1e-10 * Q.norm());
    }

    CHECK_THROWS_AS(lyapunov_solve(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), GraphError);
}

TEST_CASE("matrix exponential agrees with the Taylor series") {
    for (int s = 0; s < 10; ++s) {
        int n = 4;
        Matrix A(n, n);
        std::uint64_t ctr = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = 2.0 * uniform01(500 + s, ctr++) - 1.0;
        Matrix series = Matrix::Identity(n, n), term = Matrix::Identity(n, n);
        for (int k = 1; k < 60; ++k) {
            term = term * A / k;
            series += term;
        }
        CHECK((expm(A) - series).norm() < 1e-12 * series.norm());
    }
    // semigroup property
    Matrix A(2, 2);
    A << -1, 0.3, 0.2, -0.7;
    CHECK((expm(2 * A) - expm(A) * expm(A)).norm() < 1e-12);
}

TEST_CASE("scalar algebraic Riccati fixture") {
    RiccatiSystem sys;
    sys.D = -Matrix::Ones(1, 1);
    sys.E = Matrix::Ones(1, 1);
    sys.F = Matrix::Ones(1, 1);
    CareResult r = care_solve(sys);
    CHECK(std::abs(r.gamma_bar(0, 0) - (std::sqrt(2.0) - 1.0)) < 1e-10);
}

TEST_CASE("care with E=0 is a lyapunov solve") {
    Matrix D(2, 2);
    D << -1, 0.4, 0, -2;
    RiccatiSystem sys;
    sys.D = D;
    sys.E = Matrix::Zero(2, 2);
    sys.F = Matrix::Identity(2, 2);
    Matrix g1 = care_solve(sys).gamma_bar;
    Matrix g2 = lyapunov_solve(D.transpose(), Matrix::Identity(2, 2));
    CHECK((g1 - g2).norm() < 1e-9);
}

namespace {

RiccatiSystem random_system(int k, std::uint64_t seed) {
    std::uint64_t ctr = 0;
    auto u = [&] { return 2.0 * uniform01(seed, ctr++) - 1.0; };
    Matrix D(k, k), B(k, k), Cq(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            D(i, j) = u();
            B(i, j) = 0.5 * u();
            Cq(i, j) = u();
        }
    D -= (1.5 + k * 0.3) * Matrix::Identity(k, k);
    RiccatiSystem sys;
    sys.D = D;
    sys.E = B * B.transpose();
    sys.F = Cq * Cq.transpose() + 0.2 * Matrix::Identity(k, k);
    return sys;
}

Matrix random_pd(int k, std::uint64_t seed) {
    std::uint64_t ctr = 0;
    Matrix A(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = uniform01(seed, ctr++) - 0.5;
    return A * A.transpose() + 0.3 * Matrix::Identity(k, k);
}

} // namespace

TEST_CASE("closed-form Riccati flow matches RK4 and converges") {
    for (int s = 0; s < 6; ++s) {
        int k = 1 + s % 4;
        RiccatiSystem sys = random_system(k, 600 + s);
        Matrix g0 = random_pd(k, 700 + s);
        std::vector<double> grid = {0.0, 0.1, 1.0, 10.0};
        auto closed = riccati_diff(sys, g0, grid);
        auto rk = riccati_rk4(sys, g0, grid);
        for (size_t i = 0; i < grid.size(); ++i) {
            CHECK((closed[i] - rk[i]).norm() < 1e-6);
            Eigen::SelfAdjointEigenSolver<Matrix> es(closed[i]);
            CHECK(es.eigenvalues().minCoeff() > -1e-8);
        }
        Matrix gbar = care_solve(sys).gamma_bar;
        auto tail = riccati_diff(sys, g0, {50.0});
        CHECK((tail[0] - gbar).norm() < 1e-6);
        auto fixed = riccati_diff(sys, gbar + 1e-13 * Matrix::Identity(k, k), {0.0, 0.5, 2.0});
        for (auto& g : fixed) CHECK((g - gbar).norm() < 1e-9);
    }
}

TEST_CASE("euler-maruyama") {
    OUModel m = chain_model();
    Path p1 = euler_maruyama(m, 1.0, 1e-3, 7);
    Path p2 = euler_maruyama(m, 1.0, 1e-3, 7);
    CHECK((p1.X - p2.X).norm() == 0.0); // bit-identical determinism
    Path p3 = euler_maruyama(m, 1.0, 1e-3, 8);
    CHECK((p1.X - p3.X).norm() > 0.0);

    OUModel det = m;
    det.sigma0 = Matrix::Zero(3, 4);
    det.gamma0_diag = Vector::Zero(3) + 1e-300 * Vector::Ones(3);
    Path pd = euler_maruyama(det, 1.0, 1e-4, 1);
    // deterministic linear ODE: X(t) - mu = expm(tM)(X0 - mu)
    Vector x0 = pd.X.row(0);
    Vector want = m.mu + expm(m.M) * (x0 - m.mu);
    Vector got = pd.X.row(pd.X.rows() - 1);
    CHECK((got - want).norm() < 1e-3);
}

TEST_CASE("stationary covariance of a long path") {
    OUModel m = chain_model();
    Matrix gamma_inf = lyapunov_solve(m.M, m.Sigma());
    Path p = euler_maruyama(m, 200.0, 2e-3, 11);
    int burn = 20000, count = 0;
    Matrix acc = Matrix::Zero(3, 3);
    for (int k = burn; k < p.X.rows(); ++k) {
        Vector d = Vector(p.X.row(k)) - m.mu;
        acc += d * d.transpose();
        ++count;
    }
    acc /= count;
    // crude 3-sigma-style Monte Carlo band for correlated samples
    CHECK((acc - gamma_inf).cwiseAbs().maxCoeff() < 0.35);
}

TEST_CASE("filter on a fully decoupled model ignores the path") {
    OUModel m;
    m.nodes = {"u", "w"};
    m.M = Matrix::Zero(2, 2);
    m.M(0, 0) = -1.0;
    m.M(1, 1) = -2.0;
    m.mu = Vector::Zero(2);
    m.mu << 0.5, -0.5;
    m.sigma0 = Matrix::Identity(2, 2);
    m.gamma0_diag = Vector::Ones(2);
    Path p = euler_maruyama(m, 2.0, 1e-3, 3);
    FilterRun f = kalman_bucy_filter(m, NodeSet::of(2, {1}), p);
    // gain vanishes, so m solves dm = M_UU m dt about the mean
    double mcur = m.mu[0];
    for (int k = 0; k < p.X.rows() - 1; ++k) {
        double drift = -1.0 * (mcur - m.mu[0]);
        mcur += 1e-3 * drift;
        CHECK(std::abs(f.m(k + 1, 0) - mcur) < 1e-12);
    }
    for (auto& g : f.gamma) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("scalar filter covariance matches the scalar Riccati flow") {
    OUModel m = chain_model();
    NodeSet W = NodeSet::of(3, {0, 1}); // observe alpha, beta; filter gamma
    Path p = euler_maruyama(m, 1.0, 1e-3, 5);
    FilterRun f = kalman_bucy_filter(m, W, p);
    REQUIRE(f.u_nodes == std::vector<int>{2});
    RiccatiSystem sys = build_def(m, NodeSet::of(3, {2}), W);
    std::vector<double> grid;
    for (int k = 0; k < p.X.rows(); ++k) grid.push_back(k * 1e-3);
    auto rk = riccati_rk4(sys, Matrix::Ones(1, 1), grid, 8);
    for (size_t k = 0; k < rk.size(); k += 100)
        CHECK(std::abs(f.gamma[k](0, 0) - rk[k](0, 0)) < 1e-6);
}

TEST_CASE("partition of the chain model query") {
    OUModel m = chain_model();
    Graph g = canonical_lig(m);
    int a = g.index_of("alpha"), b = g.index_of("beta"), c = g.index_of("gamma");
    NodeSet A = NodeSet::of(3, {a}), C(3);
    REQUIRE(mu_separated(g, A, NodeSet::of(3, {c}), C));
    Partition16 p = partition_v1_v6(g, A, C);
    CHECK(p.W == A);
    // pa(gamma) minus (A+C) inside V1
    NodeSet pa_c = g.parents(c);
    CHECK(pa_c.minus(A).is_subset_of(p.V1));
    CHECK(p.V1.contains(c));
    CHECK(!p.V1.contains(b)); // beta hears alpha directly

    // A empty: V1 is all of U
    Partition16 p0 = partition_v1_v6(g, NodeSet(3), NodeSet::of(3, {b}));
    CHECK(p0.V1 == p0.U);
    CHECK(p0.V2.empty());
    CHECK(p0.V3.empty());
}

TEST_CASE("build_def block formulas") {
    // scalar U, W: D = M_uu - M_wu Sigma_uw / Sigma_ww, F = Schur complement
    OUModel m;
    m.nodes = {"u", "w"};
    m.M = Matrix(2, 2);
    m.M << -2.0, 0.3, 0.7, -3.0;
    m.mu = Vector::Zero(2);
    Matrix S(2, 2);
    S << 2.0, 0.5, 0.5, 1.5;
    m.Sigma_exact = S;
    m.sigma0 = Eigen::LLT<Matrix>(S).matrixL();
    m.gamma0_diag = Vector::Ones(2);
    RiccatiSystem sys = build_def(m, NodeSet::of(2, {0}), NodeSet::of(2, {1}));
    CHECK(std::abs(sys.D(0, 0) - (-2.0 - 0.7 * 0.5 / 1.5)) < 1e-12);
    CHECK(std::abs(sys.E(0, 0) - 0.7 * 0.7 / 1.5) < 1e-12);
    CHECK(std::abs(sys.F(0, 0) - (2.0 - 0.25 / 1.5)) < 1e-12);

    // decoupled blocks: D = M_UU^T, E = 0, F = Sigma_UU
    OUModel d;
    d.nodes = {"u", "w"};
    d.M = Matrix::Zero(2, 2);
    d.M(0, 0) = -1;
    d.M(1, 1) = -1;
    d.mu = Vector::Zero(2);
    d.sigma0 = Matrix::Identity(2, 2);
    d.gamma0_diag = Vector::Ones(2);
    RiccatiSystem s2 = build_def(d, NodeSet::of(2, {0}), NodeSet::of(2, {1}));
    CHECK(s2.E.norm() == 0.0);
    CHECK((s2.D - d.M.block(0, 0, 1, 1).transpose()).norm() == 0.0);
    CHECK(std::abs(s2.F(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("global Markov verification on the chain model") {
    OUModel m = chain_model();
    NodeSet A = NodeSet::of(3, {0}), B = NodeSet::of(3, {2}), C(3);
    VerificationReport pos = verify_global_markov(m, A, B, C, 2.0, 1e-3, 21, 4);
    CHECK(pos.separated);
    CHECK(pos.pass);
    CHECK(pos.max_relative <= 1e-8);

    VerificationReport neg =
        verify_global_markov(m, A, NodeSet::of(3, {1}), C, 2.0, 1e-3, 21, 4);
    CHECK(!neg.separated);
    CHECK(neg.max_relative >= 1e3 * std::max(pos.max_relative, 1e-15));

    VerificationReport trivial = verify_global_markov(m, NodeSet(3), B, C, 1.0, 1e-3, 3, 2);
    CHECK(trivial.max_relative == 0.0);
}

TEST_CASE("generated separated instances satisfy the audited sparsity") {
    int produced = 0;
    for (int s = 0; s < 12 && produced < 6; ++s) {
        auto inst = generate_separated_instance(5, 800 + s);
        if (!inst) continue;
        ++produced;
        Graph g = canonical_lig(inst->model);
        REQUIRE(mu_separated(g, inst->A, inst->B, inst->C));
        Partition16 p = partition_v1_v6(g, inst->A, inst->C);
        SparsityReport mr = audit_model_sparsity(inst->model, p, 0.0);
        if (!mr.ok())
            for (auto& v : mr.violations) MESSAGE(v);
        CHECK(mr.ok());
        RiccatiSystem sys = build_def(inst->model, p.U, p.W);
        SparsityReport dr = audit_def_sparsity(sys, p, 1e-10);
        CHECK(dr.ok());
        // stationary conditional covariance keeps the V1/V2 block zero
        Matrix gbar = care_solve(sys).gamma_bar;
        Partition16 local = p;
        std::vector<int> pos(g.n(), -1);
        for (size_t i = 0; i < sys.u_nodes.size(); ++i) pos[sys.u_nodes[i]] = (int)i;
        for (int x : p.V1.elements())
            for (int y : p.V2.elements())
                CHECK(std::abs(gbar(pos[x], pos[y])) <= 1e-10);
    }
    CHECK(produced >= 3);
}

TEST_CASE("D-pattern matrices invert within the pattern") {
    // three-block lower-left zero structure is closed under inversion
    for (int s = 0; s < 10; ++s) {
        int k1 = 2, k2 = 2, k3 = 1, k = k1 + k2 + k3;
        Matrix D = Matrix::Zero(k, k);
        std::uint64_t ctr = 0;
        auto u = [&] { return 2.0 * uniform01(900 + s, ctr++) - 1.0; };
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                bool zero = (i < k1 && j >= k1 && j < k1 + k2) || (i >= k1 && i < k1 + k2 && j < k1) ||
                            (i >= k1 + k2 && j < k1 + k2);
                if (!zero) D(i, j) = u();
            }
        for (int i = 0; i < k; ++i) D(i, i) += 3.0;
        Matrix Di = D.inverse();
        for (int i = 0; i < k1; ++i)
            for (int j = k1; j < k1 + k2; ++j) CHECK(std::abs(Di(i, j)) < 1e-10);
        for (int i = k1; i < k1 + k2; ++i)
            for (int j = 0; j < k1; ++j) CHECK(std::abs(Di(i, j)) < 1e-10);
        for (int i = k1 + k2; i < k; ++i)
            for (int j = 0; j < k1 + k2; ++j) CHECK(std::abs(Di(i, j)) < 1e-10);
    }
}

TEST_CASE("lyapunov solve preserves the off-block zeros") {
    // L with the transposed three-block pattern and Q with zero V1/V2 blocks
    for (int s = 0; s < 10; ++s) {
        int k1 = 2, k2 = 2, k = k1 + k2;
        Matrix L = Matrix::Zero(k, k);
        std::uint64_t ctr = 0;
        auto u = [&] { return 2.0 * uniform01(950 + s, ctr++) - 1.0; };
        for (int i = 0; i < k1; ++i)
            for (int j = 0; j < k1; ++j) L(i, j) = u();
        for (int i = k1; i < k; ++i)
            for (int j = k1; j < k; ++j) L(i, j) = u();
        for (int i = 0; i < k; ++i) L(i, i) -= 3.0;
        Matrix Q = Matrix::Zero(k, k);
        Matrix Q1(k1, k1), Q2(k2, k2);
        for (int i = 0; i < k1; ++i)
            for (int j = 0; j < k1; ++j) Q1(i, j) = u();
        for (int i = 0; i < k2; ++i)
            for (int j = 0; j < k2; ++j) Q2(i, j) = u();
        Q.topLeftCorner(k1, k1) = Q1 * Q1.transpose();
        Q.bottomRightCorner(k2, k2) = Q2 * Q2.transpose();
        Matrix Z = lyapunov_solve(L, Q);
        for (int i = 0; i < k1; ++i)
            for (int j = k1; j < k; ++j) CHECK(std::abs(Z(i, j)) <= 1e-10);
    }
}

TEST_CASE("sparsity audit catches a mutation") {
    for (int s = 0; s < 30; ++s) {
        auto inst = generate_separated_instance(5, 1200 + s);
        if (!inst) continue;
        Graph g = canonical_lig(inst->model);
        Partition16 p = partition_v1_v6(g, inst->A, inst->C);
        // find an entry inside a zero block of M: V6 row, V1 column style
        for (int r : p.V2.elements())
            for (int c : p.V1.elements()) {
                OUModel mut = inst->model;
                mut.M(r, c) = 1.0;
                CHECK(!audit_model_sparsity(mut, p, 0.0).ok());
                return;
            }
    }
    FAIL("no instance with a nonempty (V2, V1) drift block found");
}
