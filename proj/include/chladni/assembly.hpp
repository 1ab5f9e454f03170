#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "chladni/material.hpp"
#include "chladni/mesh.hpp"
#include "chladni/whitney.hpp"

namespace chladni {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Compressed sparse matrix with a symmetry flag.
struct SparseSymMatrix {
    SparseMatrix mat;
    bool symmetric = true;

    int size() const { return static_cast<int>(mat.rows()); }
    /// Maximum absolute row sum.
    double norm_inf() const;
    /// ||M - M^T||_inf.
    double asymmetry() const;
};

double norm_inf(const SparseMatrix& m);

/// Degrees of freedom of the full system: interior faces of K' first, then
/// boundary faces, each group in face order.
struct DofLayout {
    std::vector<int> faces;        // dof -> face id
    std::vector<int> dof_of_face;  // face id -> dof
    int num_interior = 0;

    int size() const { return static_cast<int>(faces.size()); }
    int num_boundary() const { return size() - num_interior; }

    /// Dof-ordered vector to face-indexed coefficients and back.
    FaceCoefficientField to_field(const Eigen::VectorXd& dofs) const;
    Eigen::VectorXd from_field(const FaceCoefficientField& u) const;
};

DofLayout make_layout(const SimplicialComplex3& fine);

/// Everything built on a coarse body: K, its subdivision K', the Whitney
/// basis of K', coarse boundary frames and the dof layout. Not copyable, the
/// basis refers to the fine complex held here.
class Discretization {
public:
    explicit Discretization(SimplicialComplex3 coarse);
    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;

    const SimplicialComplex3& coarse() const { return coarse_; }
    const BarycentricSubdivision& subdivision() const { return sub_; }
    const SimplicialComplex3& fine() const { return sub_.fine; }
    const WhitneyBasis& basis() const { return *basis_; }
    const std::vector<BoundaryFrame>& frames() const { return frames_; }
    const DofLayout& layout() const { return layout_; }

    /// Frame of the coarse face carrying a fine boundary face.
    const BoundaryFrame& frame_of_fine_face(int fine_face) const;

private:
    SimplicialComplex3 coarse_;
    BarycentricSubdivision sub_;
    std::unique_ptr<WhitneyBasis> basis_;
    std::vector<BoundaryFrame> frames_;
    std::vector<int> frame_index_;  // coarse face -> frame index or -1
    DofLayout layout_;
};

/// rho * <W_f, W_g> in layout order.
SparseSymMatrix assemble_mass(const Discretization& d, double density);

/// Volume term -<d_i W_f^alpha, A^{alpha beta}_{ij} d_j W_g^beta> in layout order,
/// without the boundary term.
SparseSymMatrix assemble_volume_stiffness(const Discretization& d, const ElasticTensor& tensor);

/// Boundary term B(W_f, W_f) for a fine boundary face f:
/// <sigma(DW)N, W> - (<sigma(DW)N, N> + <W'(1)N, N><d_N W, N>) <W, N>,
/// surface integrals over f, N the outward normal of the coarse face.
double boundary_term(const Discretization& d, const ElasticTensor& tensor, int fine_face);

/// Volume term plus the boundary term on the boundary diagonal.
SparseSymMatrix assemble_stiffness(const Discretization& d, const ElasticTensor& tensor);

/// Number of structurally nonzero off-diagonal entries in the
/// boundary-boundary block with magnitude above tol * ||M||_inf.
int boundary_block_offdiagonals(const SparseSymMatrix& m, const DofLayout& layout, double tol = 0.0);

/// Rows of the traction system for one coarse boundary face: entry (r, j) is
/// the surface integral of <d_T W_j, W'(1)N> + <T, sigma(grad W_j)N> over
/// the face, T = T1 for r = 0 and T2 for r = 1.
Eigen::Matrix<double, 2, 6> traction_rows(const Discretization& d, const ElasticTensor& tensor,
                                          const BoundaryFrame& frame);

/// Largest magnitude of the products summed in traction_rows, the reference
/// for deciding that a row vanishes.
double traction_scale(const Discretization& d, const ElasticTensor& tensor, const BoundaryFrame& frame);

struct FaceConstraint {
    int coarse_face = -1;
    int rank = 0;
    std::vector<int> dependent;  // fine face ids (pivot columns)
    std::vector<int> free;       // fine face ids
};

/// Partition of the fine boundary faces into dependent and free faces with
/// c_dependent = C c_free, plus the prolongation from reduced coordinates
/// (interior faces in layout order, then free faces in face order) to the
/// full layout.
struct ConstraintMap {
    std::vector<FaceConstraint> faces;  // one per coarse boundary face
    std::vector<int> dependent;         // sorted fine face ids
    std::vector<int> free;              // sorted fine face ids
    SparseMatrix c;                     // |dependent| x |free|
    SparseMatrix raw;                   // 2|F_b| x |layout|, traction rows
    SparseMatrix prolongation;          // |layout| x reduced_dim
    int null_rows = 0;

    int rank_count(int r) const;
    int reduced_dim() const { return static_cast<int>(prolongation.cols()); }
};

/// Singular-value rank threshold relative to the larger of the largest
/// singular value and the traction scale of the face.
constexpr double kRankTolerance = 1e-9;

/// Builds the traction system face by face. A face whose rows vanish (rank 0,
/// e.g. axis-aligned faces of an axis-aligned orthotropic body, where every
/// face field has an isotropic Jacobian) contributes two null rows and no
/// constraint.
ConstraintMap assemble_boundary_constraints(const Discretization& d, const ElasticTensor& tensor);

/// dim Div^b(K) = |F'| - 2|F_b| + r_n.
int div_b_dimension(const Discretization& d, const ConstraintMap& cmap);

/// P^T A P for both matrices.
std::pair<SparseSymMatrix, SparseSymMatrix> reduce_system(const SparseSymMatrix& mass,
                                                          const SparseSymMatrix& stiffness,
                                                          const ConstraintMap& cmap);

/// Largest number of off-diagonal nonzeros in any row of the free-free
/// block of a reduced matrix.
int reduced_boundary_row_census(const SparseSymMatrix& reduced, const Discretization& d,
                                const ConstraintMap& cmap, double tol = 0.0);

/// External pressure wave F = F0 sin(k.(x - s) -/+ omega t) with k = omega/v
/// along `direction`. sign = +1 selects the minus branch.
struct ForcingWave {
    Vec3 amplitude = Vec3(0.0, 1.0, 0.0);  // N/m^3
    Vec3 direction = Vec3(0.0, 1.0, 0.0);
    double speed = 343.0;                   // m/s
    double frequency = 80.0;                // Hz
    Vec3 source = Vec3::Zero();             // m
    int sign = 1;

    double omega() const;
    Vec3 wave_vector() const;
    void validate() const;
};

/// Wave travelling along +y towards the body from a source `distance` below
/// its lowest point, on the line through the x-z midpoint of its bounding box.
ForcingWave default_wave(const SimplicialComplex3& body, double frequency, double distance = 0.62);

/// Load vectors C1_f = <F0 sin(k.(x - s)), W_f> and C2_f = <F0 cos(k.(x - s)), W_f>
/// in layout order, by a collapsed Gauss-Legendre rule on each tetrahedron.
std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_forcing(const Discretization& d,
                                                             const ForcingWave& wave);

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n);

/// Points and weights of the collapsed (Duffy) product rule on tetrahedron t,
/// n points per direction. Weights sum to vol(t).
std::vector<std::pair<Vec3, double>> tet_quadrature(const SimplicialComplex3& k, int t, int n);

/// Matrix Market coordinate text, general storage.
std::string to_matrix_market(const SparseMatrix& m);
SparseMatrix from_matrix_market(const std::string& text);

/// One value per line with a header.
std::string vector_csv(const Eigen::VectorXd& v, const std::string& header);

}  // namespace chladni
