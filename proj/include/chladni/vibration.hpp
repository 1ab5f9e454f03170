#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chladni/assembly.hpp"
#include "chladni/solver.hpp"

namespace chladni {

/// Coordinates of a discrete system: the full layout (coarse basis) or the
/// reduced coordinates of Div^b (fine basis, through the prolongation).
struct SystemBasis {
    std::string name = "coarse";
    const DofLayout* layout = nullptr;
    SparseMatrix prolongation;  // empty for the full layout

    int size() const;
    FaceCoefficientField expand(const Eigen::VectorXd& coords) const;
    /// P^T v for a vector in layout order; identity for the full layout.
    Eigen::VectorXd restrict(const Eigen::VectorXd& layout_vector) const;
};

SystemBasis coarse_basis(const Discretization& d);
SystemBasis fine_basis(const Discretization& d, const ConstraintMap& cmap);

/// Boundary faces of K' whose outward normal n satisfies <n, direction> >= min_cos.
/// A zero direction selects nothing.
struct ObservationSelector {
    Vec3 direction = Vec3::Zero();
    double min_cos = 0.999;
};

/// Outward unit normal of a boundary face of a complex.
Vec3 outward_face_normal(const SimplicialComplex3& k, int f);

/// Barycenters of the selected faces followed by their vertices (in vertex
/// order). A barycenter is evaluated on its tetrahedron; a vertex value is
/// the average over the tetrahedra of the selected faces containing it.
struct ObservationPoints {
    std::vector<Vec3> points;
    std::vector<std::vector<int>> tets;
    std::vector<int> faces;  // selected faces
    int num_barycenters = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// Throws std::invalid_argument when a nonzero selector matches no face.
ObservationPoints observation_points(const SimplicialComplex3& fine, const ObservationSelector& selector);

/// Value of a field at every observation point.
std::vector<Vec3> evaluate(const WhitneyBasis& basis, const ObservationPoints& obs, const FaceCoefficientField& u);

/// Sum over boundary faces of c_f [f : t], the outward flux of U.
double boundary_flux(const SimplicialComplex3& fine, const FaceCoefficientField& u);

/// Resonance wave with trivial initial data driven by
/// C1 cos(wt) -/+ C2 sin(wt):
///   w(t) = sum_r [c1 (cos wt - cos w_r t) + s c2 ((w / w_r) sin w_r t - sin wt)] / (w_r^2 - w^2)
/// with -(w^2 M + K) c_j = C_j and s = +1 for the minus branch. Modes with
/// w_r^2 = -lambda <= 0 use the analytic continuation of the same formula.
struct ResonanceWave {
    double omega = 0.0;
    std::vector<double> mode_omega_sq;
    Eigen::VectorXd c1, c2;  // system coordinates
    int sign = 1;
    std::string basis = "coarse";

    /// Weights (a, b) with w(t) = a c1 + b c2.
    std::pair<double, double> weights(double t) const;
    std::pair<double, double> weight_derivatives(double t) const;
    Eigen::VectorXd coords(double t) const;
};

ResonanceWave resonance_wave(double frequency_hz, const std::vector<EigenPair>& modes, const Eigen::VectorXd& rhs1,
                             const Eigen::VectorXd& rhs2, const SparseMatrix& k, const SparseMatrix& m, int sign = 1,
                             bool check_resonance = true);

/// t_j = j 2 pi / (10 omega), j = 1..10.
std::vector<double> default_times(double omega);

struct NormSamples {
    std::vector<double> times;
    Eigen::MatrixXd norms;  // points x times
    Eigen::VectorXd max, min, delta;

    /// argmax_j max_j / min_j.
    int worst_time() const;
};

NormSamples sample_norms(const ResonanceWave& wave, const SystemBasis& sys, const WhitneyBasis& basis,
                         const ObservationPoints& obs, const std::vector<double>& times);

struct NodalReport {
    double c_omega = 0.0;
    std::vector<std::uint8_t> nodal;  // per observation point, nodal at every time
    std::vector<int> nodal_per_time;
    int worst_time = 0;

    int count() const;
};

NodalReport nodal_points(const NormSamples& samples, double c_omega);

/// Point coordinates, nodal flag and the per-time norms divided by the
/// largest sampled norm (so the file does not depend on the forcing scale).
std::string nodal_csv(const ObservationPoints& obs, const NormSamples& samples, const NodalReport& report);

/// Scatter plot of the observation points projected on the plane normal to
/// `view`, nodal points dark.
std::string nodal_svg(const ObservationPoints& obs, const NodalReport& report, const Vec3& view);

/// Coefficients with unit M-norm and largest-magnitude entry positive.
Eigen::VectorXd normalize_mass(const Eigen::VectorXd& c, const SparseMatrix& m);

struct FluxRow {
    double frequency = 0.0;
    double mode_frequency = 0.0;
    std::string kind;
    double residual = 0.0;
    double eigen_flux = 0.0;
    double wave_flux = 0.0;
    int worst_time = 0;
};

std::string flux_table_text(const std::string& body, const std::string& basis, const std::vector<FluxRow>& rows);
std::string flux_table_csv(const std::vector<FluxRow>& rows);

}  // namespace chladni
