#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace chladni {

using Vec3 = Eigen::Vector3d;

/// Reference to a simplex of a complex: its dimension (0..3) and its index
/// in the corresponding global list.
struct SimplexRef {
    int dim = 0;
    int id = 0;
};

/// Oriented tetrahedral complex.
///
/// Every simplex is stored with strictly increasing vertex indices. Faces and
/// edges are derived from the tetrahedra and kept in lexicographic order of
/// their vertex tuples, which is the global linear order used for
/// coefficient vectors. The geometric orientation of a tetrahedron relative to
/// the ambient orientation is kept as a separate sign, so incidence numbers
/// carry any mismatch between vertex order and geometry.
///
/// Local numbering: `tet_faces(t)[i]` is the face opposite local vertex `i`
/// of `t`, `face_edges(f)[i]` is the edge opposite local vertex `i` of `f`.
///
/// Instances are immutable after construction.
class SimplicialComplex3 {
public:
    SimplicialComplex3() = default;

    /// Builds the complex from vertex coordinates and tetrahedra given in any
    /// vertex order. Throws std::invalid_argument on out-of-range indices,
    /// repeated vertices, degenerate (zero volume) tetrahedra, or faces shared
    /// by more than two tetrahedra.
    static SimplicialComplex3 from_tets(std::vector<Vec3> vertices,
                                        std::vector<std::array<int, 4>> tets);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_tets() const { return static_cast<int>(tets_.size()); }
    int count(int dim) const;

    int num_boundary_faces() const { return num_boundary_faces_; }
    int euler_characteristic() const {
        return num_vertices() - num_edges() + num_faces() - num_tets();
    }

    const Vec3& vertex(int p) const { return vertices_[p]; }
    std::span<const Vec3> vertices() const { return vertices_; }
    const std::array<int, 4>& tet(int t) const { return tets_[t]; }
    std::span<const std::array<int, 4>> tets() const { return tets_; }
    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    std::span<const std::array<int, 3>> faces() const { return faces_; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    std::span<const std::array<int, 2>> edges() const { return edges_; }

    /// +1 if the increasing vertex order of `t` is positively oriented in R^3.
    int tet_sign(int t) const { return tet_sign_[t]; }
    const std::array<int, 4>& tet_faces(int t) const { return tet_faces_[t]; }
    const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }

    std::span<const int> face_tets(int f) const;
    std::span<const int> edge_faces(int e) const;
    std::span<const int> vertex_edges(int p) const;
    std::span<const int> vertex_tets(int p) const;

    bool is_boundary_face(int f) const { return face_tets(f).size() == 1; }
    bool is_boundary_edge(int e) const { return boundary_edge_[e] != 0; }
    bool is_boundary_vertex(int p) const { return boundary_vertex_[p] != 0; }

    /// Index of the face with the given vertices (any order), or -1.
    int find_face(int a, int b, int c) const;
    /// Index of the edge with the given vertices (any order), or -1.
    int find_edge(int a, int b) const;

    /// Incidence number of `a` in the boundary of `b` (dim b = dim a + 1),
    /// in {-1, 0, +1}. For b a tetrahedron the sign refers to the outward
    /// co-orientation, so that sum_f c_f [f:t] is the outward flux of
    /// sum_f c_f W_f through the boundary of t.
    int incidence(SimplexRef a, SimplexRef b) const;

    /// Tetrahedra whose closure contains the simplex (the closed star at the
    /// top dimension), sorted by index.
    std::vector<int> star(SimplexRef s) const;

    double tet_volume(int t) const;
    double face_area(int f) const;
    /// Unit normal of face f following its vertex order,
    /// (p1 - p0) x (p2 - p0) normalized.
    Vec3 face_normal(int f) const;
    Vec3 barycenter(SimplexRef s) const;

    /// Sum of boundary face areas.
    double boundary_area() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<std::int8_t> tet_sign_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 4>> tet_faces_;
    std::vector<std::array<int, 3>> face_edges_;

    // CSR adjacency.
    std::vector<int> face_tets_offsets_, face_tets_;
    std::vector<int> edge_faces_offsets_, edge_faces_;
    std::vector<int> vertex_edges_offsets_, vertex_edges_;
    std::vector<int> vertex_tets_offsets_, vertex_tets_;

    std::vector<std::uint8_t> boundary_edge_;
    std::vector<std::uint8_t> boundary_vertex_;
    int num_boundary_faces_ = 0;
};

/// Interior/boundary partition of the edges and faces of a complex, using the
/// vertex-based rule: a face (edge) is a boundary face (edge) when all of its
/// vertices lie on the boundary, and interior otherwise.
struct Classification {
    std::vector<int> interior_faces;
    std::vector<int> boundary_faces;
    std::vector<int> interior_edges;
    std::vector<int> boundary_edges;
};

Classification classify(const SimplicialComplex3& complex);

/// Regular block body: nx*ny*nz blocks of size dx*dy*dz (meters), each
/// split into five tetrahedra. The split alternates with the parity of
/// i+j+k so that neighbouring blocks share face diagonals.
SimplicialComplex3 build_slab(int nx, int ny, int nz, double dx, double dy, double dz);

/// Grid description of a plate whose thin direction is y. Cell (i, k) covers
/// [i*cell, (i+1)*cell] x [k*cell, (k+1)*cell] in the x-z plane. Arrays are
/// row-major with index i*nz + k.
struct HeightfieldPlate {
    int nx = 0;
    int nz = 0;
    std::vector<std::uint8_t> mask;
    std::vector<double> thickness;  // meters, > 0 on masked cells
    std::vector<double> elevation;  // meters
    double cell = 0.0;              // meters
    int layers = 2;                 // blocks across the thickness
};

/// One column of `layers` blocks per masked cell. Nodal thickness and
/// elevation are averages over the masked cells touching the node, so the
/// blocks of neighbouring columns conform. Throws std::invalid_argument on
/// inconsistent sizes, non-positive thickness, or a mask that is empty or not
/// edge-connected.
SimplicialComplex3 build_heightfield_plate(const HeightfieldPlate& plate);

/// First barycentric subdivision K' of a complex K.
///
/// Vertices of K' are the barycenters of the simplices of K, numbered by
/// decreasing dimension of the parent simplex (tetrahedra first), ties broken
/// by parent index. Each tetrahedron of K yields 24 tetrahedra, each face 6
/// sub-faces.
struct BarycentricSubdivision {
    SimplicialComplex3 fine;
    std::vector<SimplexRef> vertex_parent;
    /// For every coarse face, the 6 fine faces lying in it, sorted.
    std::vector<std::array<int, 6>> coarse_face_subfaces;
    /// Coarse face containing a fine face, or -1.
    std::vector<int> fine_face_parent;
    /// For every coarse tetrahedron, its 24 fine tetrahedra.
    std::vector<std::array<int, 24>> coarse_tet_subtets;
};

BarycentricSubdivision barycentric_subdivision(const SimplicialComplex3& coarse);

/// Orthonormal frame of a boundary face of K: outward unit normal and
/// tangents with (t1, t2, normal) positively oriented.
struct BoundaryFrame {
    int coarse_face = -1;
    Vec3 normal;
    Vec3 t1;
    Vec3 t2;
    std::array<int, 6> subfaces{};
    double area = 0.0;
};

/// Frames of all boundary faces of the coarse complex, in coarse face order.
std::vector<BoundaryFrame> boundary_frames(const SimplicialComplex3& coarse,
                                           const BarycentricSubdivision& sub);

/// Outward unit normal of a boundary face.
Vec3 outward_normal(const SimplicialComplex3& complex, int boundary_face);

/// Mesh JSON document: vertices in meters, tetrahedra, and boundary faces as
/// vertex triples. Output is deterministic.
std::string mesh_to_json(const SimplicialComplex3& complex);
SimplicialComplex3 mesh_from_json(const std::string& text);

}  // namespace chladni
