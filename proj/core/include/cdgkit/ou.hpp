#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdgkit/graph.hpp"

namespace cdgkit::ou {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// dX_t = M(X_t - mu)dt + sigma0 dW_t, X_0 ~ N(mu, diag(gamma0_diag)).
struct OUModel {
    std::vector<std::string> nodes;
    Matrix M;          // n x n drift
    Vector mu;         // n
    Matrix sigma0;     // n x m diffusion factor
    Vector gamma0_diag; // n, initial covariance diagonal
    // Optional exact diffusion matrix; sigma0 is then its Cholesky factor and
    // structural zeros are preserved exactly.
    std::optional<Matrix> Sigma_exact;

    int n() const { return (int)nodes.size(); }
    Matrix Sigma() const { return Sigma_exact ? *Sigma_exact : Matrix(sigma0 * sigma0.transpose()); }
    Vector a() const { return -M * mu; }
};

OUModel model_from_json(const std::string& text);
std::string model_to_json(const OUModel& m);

// Directed edge a -> b iff |M_ba| > tau0, blunt edge iff |Sigma_ab| > tau0
// (a != b), loop iff the diagonal drift entry is nonzero.
Graph canonical_lig(const OUModel& m, double tau0 = 1e-12);

bool is_stable(const Matrix& M);

// M X + X M^T + Q = 0 for stable M, via the vectorized Kronecker solve.
Matrix lyapunov_solve(const Matrix& M, const Matrix& Q);

// Scaling-and-squaring with a Pade(6,6) approximant.
Matrix expm(const Matrix& A);

struct Partition16 {
    NodeSet V1, V2, V3, V4, V5, V6, U, W;
};
// W = A + C observed, U the rest; V1..V3 split U by m-separation from A and
// V1, V4..V6 split W by neck-reachability from V1/V2.
Partition16 partition_v1_v6(const Graph& g, const NodeSet& A, const NodeSet& C);

struct RiccatiSystem {
    Matrix D, E, F;
    std::vector<int> u_nodes, w_nodes; // global indices, ascending
};
RiccatiSystem build_def(const OUModel& m, const NodeSet& U, const NodeSet& W);

struct CareResult {
    Matrix gamma_bar;
    int newton_steps = 0;
    double residual = 0;
    std::vector<Matrix> iterates; // Newton iterates, for sparsity checks
};
// 0 = Gamma D + D^T Gamma - Gamma E Gamma + F: stable invariant subspace of
// the Hamiltonian, refined by Newton-Kleinman steps (each one Lyapunov solve).
CareResult care_solve(const RiccatiSystem& sys);

// Closed-form flow of the differential Riccati equation evaluated on t_grid;
// the inner integral accumulates in closed form step by step.
std::vector<Matrix> riccati_diff(const RiccatiSystem& sys, const Matrix& gamma0,
                                 const std::vector<double>& t_grid);
// RK4 oracle for gdot = g D + D^T g - g E g + F.
std::vector<Matrix> riccati_rk4(const RiccatiSystem& sys, const Matrix& gamma0,
                                const std::vector<double>& t_grid, int substeps = 64);

struct Path {
    double dt = 0;
    Matrix X; // (steps + 1) x n
    std::uint64_t seed = 0;
};
Path euler_maruyama(const OUModel& m, double T, double dt, std::uint64_t seed);

struct FilterRun {
    std::vector<int> u_nodes;
    Matrix m;                  // (steps + 1) x |U| conditional means
    std::vector<Matrix> gamma; // conditional covariances on the grid
};
FilterRun kalman_bucy_filter(const OUModel& m, const NodeSet& W, const Path& path);

struct VerificationReport {
    bool separated = false;            // the query's mu-separation verdict
    std::vector<double> max_abs;       // per path, max_t |lambda^C - lambda^{C+A}|
    double scale = 0;                  // max |lambda^{C+A}| seen (floored at 1)
    double max_relative = 0;
    bool pass = false;                 // max_relative <= tol (meaningful when separated)
};
VerificationReport verify_global_markov(const OUModel& m, const NodeSet& A,
                                        const NodeSet& B, const NodeSet& C, double T,
                                        double dt, std::uint64_t seed, int n_paths,
                                        double tol = 1e-8);

struct SparsityReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
// The 11 drift and 16 diffusion zero blocks of the partition.
SparsityReport audit_model_sparsity(const OUModel& m, const Partition16& p, double tol = 0.0);
// D three-block-triangular, F_{V1V2} = 0, E block diagonal with E_{V3V3} = 0.
SparsityReport audit_def_sparsity(const RiccatiSystem& sys, const Partition16& p,
                                  double tol = 1e-10);

struct SeparatedInstance {
    OUModel model;
    NodeSet A, B, C;
};
// Random cDG + rejection-sampled separated query + matrices respecting the
// graph's zeros, drift stabilized by a spectral shift.
std::optional<SeparatedInstance> generate_separated_instance(int n, std::uint64_t seed);

// Counter-based uniform/normal generator used by the simulators.
double uniform01(std::uint64_t seed, std::uint64_t counter);
double normal(std::uint64_t seed, std::uint64_t counter);

} // namespace cdgkit::ou
