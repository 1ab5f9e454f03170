#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace chladni {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse LU factors of K - sigma M (UMFPACK, symmetric strategy: AMD
/// ordering with diagonal pivot tolerance 1e-3). Each solve applies one step
/// of iterative refinement. Throws std::runtime_error on exact singularity.
/// Solves are const and may run concurrently.
class Factorization {
public:
    Factorization(const SparseMatrix& k, const SparseMatrix& m, double sigma);
    ~Factorization();
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;

    double shift() const { return sigma_; }
    int size() const { return n_; }

    /// x with (K - sigma M) x = b.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    /// Largest relative error of (K - sigma M) x_j = e_j over `samples`
    /// pseudo-random columns.
    double reconstruction_error(const SparseMatrix& k, const SparseMatrix& m, int samples,
                                std::uint64_t seed = 7) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double sigma_ = 0.0;
    int n_ = 0;
};

Factorization factorize_shifted(const SparseMatrix& k, const SparseMatrix& m, double sigma);

/// Eigenpair of the pencil K c = lambda M c. `lambda` is the eigenvalue of
/// M^{-1} K, c has unit M-norm with its largest-magnitude entry positive.
struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;  // ||K c - lambda M c||_2 / (||K||_inf ||c||_2)
};

struct LanczosOptions {
    int ncv = 0;  // 0 selects max(4k, 40)
    int max_restarts = 0;  // 0 selects 50 k
    double tolerance = 1e-8;
    std::uint64_t seed = 12345;
    std::string* log = nullptr;  // appended diagnostics, one line per restart
};

/// The k eigenpairs nearest sigma, sorted by |lambda - sigma|, by
/// thick-restart Lanczos on (K - sigma M)^{-1} M with full
/// reorthogonalization in the M inner product. Throws std::runtime_error
/// reporting the Ritz residuals when the restart cap is reached.
std::vector<EigenPair> eigs_near(const SparseMatrix& k, const SparseMatrix& m, double sigma, int count,
                                 const LanczosOptions& options = {});

/// Same, reusing an existing factorization of K - sigma M.
std::vector<EigenPair> eigs_near(const SparseMatrix& k, const SparseMatrix& m, const Factorization& fac,
                                 int count, const LanczosOptions& options = {});

/// Solves -(omega^2 M + K) c = rhs. Throws std::runtime_error when the
/// system is singular or omega lies within about 1e-6 relative of an
/// eigenfrequency (estimated by power iteration when check_resonance is set).
Eigen::VectorXd solve_forced(const SparseMatrix& k, const SparseMatrix& m, double omega, const Eigen::VectorXd& rhs,
                             bool check_resonance = true);

/// Several right-hand sides sharing one factorization.
std::vector<Eigen::VectorXd> solve_forced(const SparseMatrix& k, const SparseMatrix& m, double omega,
                                          const std::vector<Eigen::VectorXd>& rhs, bool check_resonance = true);

struct Frequency {
    enum class Kind { oscillatory, rigid, damped };
    Kind kind = Kind::oscillatory;
    double hz = 0.0;  // sqrt(-lambda) / 2 pi for oscillatory modes, 0 otherwise
};

Frequency frequency_of(double lambda);
std::string to_string(Frequency::Kind kind);

/// lambda = -(2 pi f)^2.
double shift_for(double hz);

}  // namespace chladni
