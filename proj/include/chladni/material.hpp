#pragma once

#include <array>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace chladni {

/// Orthotropic engineering constants in the ordered cylindrical axes
/// (r, theta, z). Moduli in Pa, Poisson ratios dimensionless.
/// mu_ij is the ratio for a load along i and contraction along j.
struct EngineeringConstants {
    double e_r = 0, e_theta = 0, e_z = 0;
    double g_theta_z = 0, g_r_z = 0, g_r_theta = 0;
    double mu_r_theta = 0, mu_theta_r = 0;
    double mu_r_z = 0, mu_z_r = 0;
    double mu_theta_z = 0, mu_z_theta = 0;
};

/// Replaces each pair mu_ij/e_i, mu_ji/e_j by its arithmetic mean and solves
/// back for the ratios, so that mu_ij/e_i = mu_ji/e_j holds.
EngineeringConstants symmetrize(const EngineeringConstants& raw);

/// Largest |mu_ij/e_i - mu_ji/e_j| relative to the pair magnitude.
double reciprocity_defect(const EngineeringConstants& c);

/// Fourth-order elasticity tensor W^{ijkl} with Voigt pair order
/// (11, 22, 33, 23, 31, 12); axes (1, 2, 3) = (r, theta, z) = (x, y, z).
///
/// The 6x6 entries are the tensor components themselves: W^{ijkl} is the
/// 6x6 entry at (pair(ij), pair(kl)) for every index combination, so
/// contractions over all four indices count each shear pair twice.
class ElasticTensor {
public:
    using Voigt = Eigen::Matrix<double, 6, 6>;

    ElasticTensor() : ElasticTensor(Voigt::Zero(), 0.0) {}
    ElasticTensor(const Voigt& voigt, double density);

    const Voigt& voigt() const { return voigt_; }
    double density() const { return density_; }

    /// Upper-left normal block.
    Eigen::Matrix3d normal_block() const { return voigt_.topLeftCorner<3, 3>(); }
    /// Lower-right shear block.
    Eigen::Matrix3d shear_block() const { return voigt_.bottomRightCorner<3, 3>(); }

    double operator()(int i, int j, int k, int l) const { return full_[index(i, j, k, l)]; }

    bool is_zero() const { return voigt_.isZero(0.0); }

    static int pair(int i, int j);

private:
    static int index(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

    Voigt voigt_;
    double density_;
    std::array<double, 81> full_{};
};

/// Builds the tensor by inverting the orthotropic compliance. Throws
/// std::domain_error when the normal compliance block is singular.
/// Expects constants satisfying the reciprocity relation (see symmetrize).
ElasticTensor from_engineering(const EngineeringConstants& c, double density);

/// Eigenvalues of the normal block (ascending) followed by the shear
/// diagonal, all in Pa.
std::array<double, 6> coercivity_eigenvalues(const ElasticTensor& t);

struct BoundaryProducts {
    /// (W'(1) N)^alpha = W^{alpha i j j} N^i
    Eigen::Vector3d identity_stress_normal;
    /// (sigma(G) N)^alpha = W^{alpha i k beta} G(k, beta) N^i
    Eigen::Vector3d stress_normal;
};

/// Boundary traction products for a unit normal N and displacement gradient
/// G(k, beta) = d_k u^beta.
BoundaryProducts boundary_products(const ElasticTensor& t, const Eigen::Vector3d& normal,
                                   const Eigen::Matrix3d& grad);

/// Raw Engelmann spruce constants (12% moisture): e_z = 9790 MPa with the
/// tabulated modulus and Poisson ratios.
EngineeringConstants engelmann_spruce_raw();

constexpr double kSpruceDensity = 360.0;  // kg/m^3

struct MaterialPreset {
    std::string name;
    EngineeringConstants constants;  // symmetrized
    double density = kSpruceDensity;
};

/// Built-in preset by name ("engelmann-spruce") or a JSON preset file with
/// constants in MPa and density in kg/m^3.
MaterialPreset load_material(const std::string& name_or_path);
MaterialPreset material_from_json(const std::string& text);
std::string material_to_json(const MaterialPreset& preset);

}  // namespace chladni
