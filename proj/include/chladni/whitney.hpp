#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chladni/mesh.hpp"

namespace chladni {

using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Coefficients of a field U = sum_f c_f W_f in the span of the face Whitney
/// fields, indexed by global face id.
struct FaceCoefficientField {
    Eigen::VectorXd coeffs;

    FaceCoefficientField() = default;
    explicit FaceCoefficientField(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    static FaceCoefficientField zero(int num_faces) {
        return FaceCoefficientField(Eigen::VectorXd::Zero(num_faces));
    }
    int size() const { return static_cast<int>(coeffs.size()); }
};

class ElasticTensor;

/// Whitney edge and face vector fields of a tetrahedral complex.
///
/// On each tetrahedron the barycentric coordinates are affine, so their
/// gradients are constant and every Whitney field is affine there:
/// W = sum_k lambda_k * V.col(k) with a 3x4 coefficient matrix V.
/// The face field of f = [p0, p1, p2] is
///   2 (x_p0 grad x_p1 x grad x_p2 + x_p1 grad x_p2 x grad x_p0 + x_p2 grad x_p0 x grad x_p1),
/// the edge field of e = [p0, p1] is x_p0 grad x_p1 - x_p1 grad x_p0.
///
/// Holds a pointer to the complex, which must outlive the basis.
class WhitneyBasis {
public:
    explicit WhitneyBasis(const SimplicialComplex3& complex);

    const SimplicialComplex3& complex() const { return *complex_; }

    /// Columns are grad lambda_k for the local vertices of t (1/m).
    const Mat34& gradients(int t) const { return gradients_[t]; }
    double volume(int t) const { return volumes_[t]; }

    /// Barycentric coordinates of x with respect to t.
    Eigen::Vector4d barycentric(int t, const Vec3& x) const;

    /// Local position of a vertex in t, or -1.
    int local_index(int t, int vertex) const;

    /// W_f restricted to t as lambda coefficients; zero if f is not a face of t.
    Mat34 face_field_on(int f, int t) const;
    /// W_e restricted to t as lambda coefficients; zero if e is not an edge of t.
    Mat34 edge_field_on(int e, int t) const;

    /// Jacobian J(alpha, i) = d_i W_f^alpha on t (constant).
    Mat3 face_field_jacobian(int f, int t) const;

    /// Value of W_f at x (1/m^2). Zero outside the star of f; throws
    /// std::domain_error if x is outside the polytope.
    Vec3 eval_face_field(int f, const Vec3& x) const;
    /// Value of W_e at x (1/m).
    Vec3 eval_edge_field(int e, const Vec3& x) const;

    /// Value of sum_f c_f W_f at x, evaluated on tetrahedron t.
    Vec3 eval_on(const FaceCoefficientField& u, int t, const Vec3& x) const;

    /// A tetrahedron containing x (within a relative tolerance), or -1.
    int locate(const Vec3& x) const;

private:
    bool inside(int t, const Vec3& x) const;

    const SimplicialComplex3* complex_;
    std::vector<Mat34> gradients_;
    std::vector<double> volumes_;
    // Uniform bucket grid over tetrahedron bounding boxes for point location.
    Vec3 grid_lo_, grid_cell_;
    std::array<int, 3> grid_n_{};
    std::vector<int> grid_offsets_, grid_tets_;
};

/// Coefficients of curl W_e in the face basis: (b_ef)_f, integer valued.
FaceCoefficientField curl_edge_field(const SimplicialComplex3& complex, int e);

/// Sum_f c_f b_ft for every tetrahedron: the outward flux of U through the
/// boundary of t.
Eigen::VectorXd tet_flux_sums(const SimplicialComplex3& complex, const FaceCoefficientField& u);

/// Divergence of U on every tetrahedron (constant per tetrahedron, 1/m^3).
Eigen::VectorXd divergence(const WhitneyBasis& basis, const FaceCoefficientField& u);

/// Exact integral of lambda_0^a lambda_1^b lambda_2^c lambda_3^d over t:
/// 6 vol(t) a! b! c! d! / (a+b+c+d+3)!.
double integrate_monomial(const WhitneyBasis& basis, int t, const std::array<int, 4>& exponents);

/// Exact integral of the dot product of two affine fields given by lambda
/// coefficients over t.
double integrate_dot(const WhitneyBasis& basis, int t, const Mat34& a, const Mat34& b);

/// L2 inner product of W_f and W_g.
double pair_mass(const WhitneyBasis& basis, int f, int g);

/// -integral of d_i W_f^alpha A^{alpha beta}_{ij} d_j W_g^beta with
/// A^{alpha beta}_{ij} = W^{i alpha j beta}.
double pair_stiffness(const WhitneyBasis& basis, int f, int g, const ElasticTensor& tensor);

/// vol * J_f(alpha, i) W^{i alpha j beta} J_g(beta, j) for two constant
/// Jacobians on one tetrahedron (the integrand of pair_stiffness without the
/// leading minus sign).
double stiffness_contraction(const Mat3& jf, const Mat3& jg, const ElasticTensor& tensor, double vol);

/// Flux of W_f through face g along g's vertex-order normal, computed by
/// affine quadrature on g from the side of tetrahedron t (a tetrahedron
/// containing g).
double face_flux(const WhitneyBasis& basis, int f, int g, int t);

/// Line integral of W_e along edge g (oriented by vertex order), from
/// tetrahedron t containing g.
double edge_circulation(const WhitneyBasis& basis, int e, int g, int t);

/// Per-tetrahedron gradients and volumes as CSV, one row per tetrahedron.
std::string gradients_csv(const WhitneyBasis& basis);

}  // namespace chladni
