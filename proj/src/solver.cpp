#include "chladni/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/UmfPackSupport>

namespace chladni {

namespace {

double sparse_norm_inf(const SparseMatrix& a) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (int c = 0; c < a.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index i = 0;
    v.cwiseAbs().maxCoeff(&i);
    if (v(i) < 0) v = -v;
}

}  // namespace

struct Factorization::Impl {
    SparseMatrix a;
    Eigen::UmfPackLU<SparseMatrix> lu;
};

Factorization::Factorization(const SparseMatrix& k, const SparseMatrix& m, double sigma)
    : impl_(std::make_unique<Impl>()), sigma_(sigma), n_(static_cast<int>(k.rows())) {
    if (k.rows() != k.cols() || m.rows() != k.rows() || m.cols() != k.cols()) {
        throw std::invalid_argument("K and M must be square of equal size");
    }
    impl_->a = k - sigma * m;
    impl_->a.makeCompressed();
    // Symmetric strategy: AMD on the pattern of A + A^T, diagonal pivots
    // accepted down to 1e-3 of the column maximum.
    impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    impl_->lu.umfpackControl()(UMFPACK_SYM_PIVOT_TOLERANCE) = 1e-3;
    impl_->lu.compute(impl_->a);
    if (impl_->lu.info() != Eigen::Success) {
        throw std::runtime_error("K - sigma M is singular at sigma = " + std::to_string(sigma) +
                                 "; perturb the shift");
    }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
    if (b.size() != n_) throw std::invalid_argument("right-hand side length mismatch");
    Eigen::VectorXd x = impl_->lu.solve(b);
    const Eigen::VectorXd r = b - impl_->a * x;
    x += impl_->lu.solve(r);
    return x;
}

double Factorization::reconstruction_error(const SparseMatrix& k, const SparseMatrix& m, int samples,
                                           std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n_ - 1);
    const SparseMatrix a = k - sigma_ * m;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
        e(pick(rng)) = 1.0;
        const Eigen::VectorXd x = solve(e);
        worst = std::max(worst, (a * x - e).norm());
    }
    return worst;
}

Factorization factorize_shifted(const SparseMatrix& k, const SparseMatrix& m, double sigma) {
    return Factorization(k, m, sigma);
}

std::vector<EigenPair> eigs_near(const SparseMatrix& k, const SparseMatrix& m, double sigma, int count,
                                 const LanczosOptions& options) {
    const Factorization fac(k, m, sigma);
    return eigs_near(k, m, fac, count, options);
}

std::vector<EigenPair> eigs_near(const SparseMatrix& k, const SparseMatrix& m, const Factorization& fac,
                                 int count, const LanczosOptions& options) {
    const int n = fac.size();
    if (count < 1) throw std::invalid_argument("eigenpair count must be positive");
    if (count > n) throw std::invalid_argument("more eigenpairs requested than the system size");
    const double sigma = fac.shift();
    const int ncv = std::min(n, options.ncv > 0 ? options.ncv : std::max(4 * count, 40));
    const int max_restarts = options.max_restarts > 0 ? options.max_restarts : 50 * count;
    const double knorm = sparse_norm_inf(k);
    const double mnorm = sparse_norm_inf(m);
    std::mt19937_64 rng(options.seed);

    Eigen::MatrixXd v(n, ncv + 1), mv(n, ncv + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ncv + 1, ncv + 1);

    // M-orthogonalizes w against columns [0, j) twice and returns the norm.
    auto orthogonalize = [&](Eigen::VectorXd& w, int j, Eigen::VectorXd* coeffs) {
        if (coeffs) coeffs->setZero(j);
        for (int pass = 0; pass < 2 && j > 0; ++pass) {
            const Eigen::VectorXd c = mv.leftCols(j).transpose() * w;
            w.noalias() -= v.leftCols(j) * c;
            if (coeffs) *coeffs += c;
        }
    };
    auto set_column = [&](int j, const Eigen::VectorXd& w) {
        const Eigen::VectorXd mw = m * w;
        const double nrm = std::sqrt(std::max(w.dot(mw), 0.0));
        v.col(j) = w / nrm;
        mv.col(j) = mw / nrm;
        return nrm;
    };
    auto fresh_vector = [&](int j) {
        for (int attempt = 0; attempt < 10; ++attempt) {
            Eigen::VectorXd w = random_vector(n, rng);
            orthogonalize(w, j, nullptr);
            const Eigen::VectorXd mw = m * w;
            if (w.dot(mw) > 1e-20 * mnorm * w.squaredNorm()) {
                set_column(j, w);
                return true;
            }
        }
        return false;
    };

    if (!fresh_vector(0)) throw std::runtime_error("could not build a starting vector");
    int start = 0;
    Eigen::VectorXd theta;
    Eigen::MatrixXd y;
    std::vector<double> ritz_residuals;
    int active = ncv;

    for (int restart = 0; restart <= max_restarts; ++restart) {
        active = ncv;
        for (int j = start; j < ncv; ++j) {
            Eigen::VectorXd w = fac.solve(mv.col(j));
            Eigen::VectorXd c;
            orthogonalize(w, j + 1, &c);
            h.col(j).head(j + 1) = c;
            const Eigen::VectorXd mw = m * w;
            const double beta = std::sqrt(std::max(w.dot(mw), 0.0));
            const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
            if (beta <= 1e-12 * scale) {
                // Invariant subspace: continue with a fresh orthogonal direction.
                h(j + 1, j) = 0.0;
                if (j + 1 == n || !fresh_vector(j + 1)) {
                    active = j + 1;
                    break;
                }
            } else {
                h(j + 1, j) = beta;
                v.col(j + 1) = w / beta;
                mv.col(j + 1) = mw / beta;
            }
        }

        const Eigen::MatrixXd t = 0.5 * (h.topLeftCorner(active, active) + h.topLeftCorner(active, active).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        std::vector<int> order(active);
        for (int i = 0; i < active; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
        });
        theta.resize(active);
        y.resize(active, active);
        for (int i = 0; i < active; ++i) {
            theta(i) = es.eigenvalues()(order[i]);
            y.col(i) = es.eigenvectors().col(order[i]);
        }
        const double beta_last = active == ncv ? h(ncv, ncv - 1) : 0.0;
        const int want = std::min(count, active);
        ritz_residuals.assign(want, 0.0);
        int converged = 0;
        for (int i = 0; i < want; ++i) {
            ritz_residuals[i] = std::abs(beta_last * y(active - 1, i));
            if (ritz_residuals[i] <= 0.1 * options.tolerance * std::abs(theta(i))) ++converged;
        }
        if (options.log) {
            std::ostringstream line;
            line.precision(6);
            line << "restart " << restart << " converged " << converged << "/" << want;
            for (int i = 0; i < want; ++i) line << " r" << i << "=" << ritz_residuals[i] / std::max(std::abs(theta(i)), 1e-300);
            *options.log += line.str() + "\n";
        }
        if (converged == want || active < ncv) break;
        if (restart == max_restarts) {
            std::ostringstream msg;
            msg << "Lanczos did not converge after " << max_restarts << " restarts; relative Ritz residuals:";
            for (int i = 0; i < want; ++i) msg << ' ' << ritz_residuals[i] / std::max(std::abs(theta(i)), 1e-300);
            throw std::runtime_error(msg.str());
        }

        // Thick restart: keep the leading Ritz vectors and the residual vector.
        const int keep = std::min(ncv - 1, count + std::max(1, (ncv - count) / 2));
        const Eigen::MatrixXd vk = v.leftCols(active) * y.leftCols(keep);
        const Eigen::MatrixXd mvk = mv.leftCols(active) * y.leftCols(keep);
        v.col(keep) = v.col(ncv);
        mv.col(keep) = mv.col(ncv);
        v.leftCols(keep) = vk;
        mv.leftCols(keep) = mvk;
        h.setZero();
        for (int i = 0; i < keep; ++i) {
            h(i, i) = theta(i);
            h(keep, i) = beta_last * y(active - 1, i);
            h(i, keep) = h(keep, i);
        }
        start = keep;
    }

    const int want = std::min(count, active);
    std::vector<EigenPair> pairs;
    pairs.reserve(want);
    for (int i = 0; i < want; ++i) {
        Eigen::VectorXd x = v.leftCols(active) * y.col(i);
        x /= std::sqrt(x.dot(m * x));
        EigenPair p;
        p.lambda = x.dot(k * x);
        const Eigen::VectorXd r = k * x - p.lambda * (m * x);
        p.residual = r.norm() / (std::max(knorm, 1e-300) * x.norm());
        fix_sign(x);
        p.vector = std::move(x);
        pairs.push_back(std::move(p));
    }
    std::stable_sort(pairs.begin(), pairs.end(), [sigma](const EigenPair& a, const EigenPair& b) {
        return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
    });
    for (const auto& p : pairs) {
        if (!(p.residual <= options.tolerance)) {
            throw std::runtime_error("eigenpair residual " + std::to_string(p.residual) + " above tolerance");
        }
    }
    return pairs;
}

std::vector<Eigen::VectorXd> solve_forced(const SparseMatrix& k, const SparseMatrix& m, double omega,
                                          const std::vector<Eigen::VectorXd>& rhs, bool check_resonance) {
    const double sigma = -omega * omega;
    const Factorization fac(k, m, sigma);
    if (check_resonance) {
        // Power iteration for the largest |mu| of (K - sigma M)^{-1} M, i.e.
        // the eigenvalue of the pencil closest to sigma.
        std::mt19937_64 rng(99);
        Eigen::VectorXd x = random_vector(fac.size(), rng);
        double mu = 0.0;
        for (int it = 0; it < 12; ++it) {
            const Eigen::VectorXd mx = m * x;
            const double nrm = std::sqrt(std::max(x.dot(mx), 1e-300));
            x /= nrm;
            const Eigen::VectorXd y = fac.solve(mx / nrm);
            mu = std::sqrt(std::max(y.dot(m * y), 0.0));
            x = y;
        }
        if (mu * 2e-6 * omega * omega >= 1.0) {
            throw std::runtime_error("drive frequency is within 1e-6 of an eigenfrequency; detune the frequency");
        }
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(rhs.size());
    for (const auto& b : rhs) out.push_back(-fac.solve(b));
    return out;
}

Eigen::VectorXd solve_forced(const SparseMatrix& k, const SparseMatrix& m, double omega, const Eigen::VectorXd& rhs,
                             bool check_resonance) {
    return solve_forced(k, m, omega, std::vector<Eigen::VectorXd>{rhs}, check_resonance).front();
}

Frequency frequency_of(double lambda) {
    if (lambda < 0) return {Frequency::Kind::oscillatory, std::sqrt(-lambda) / (2.0 * std::numbers::pi)};
    if (lambda == 0) return {Frequency::Kind::rigid, 0.0};
    return {Frequency::Kind::damped, 0.0};
}

std::string to_string(Frequency::Kind kind) {
    switch (kind) {
        case Frequency::Kind::oscillatory: return "oscillatory";
        case Frequency::Kind::rigid: return "rigid";
        default: return "damped";
    }
}

double shift_for(double hz) {
    const double w = 2.0 * std::numbers::pi * hz;
    return -w * w;
}

}  // namespace chladni
