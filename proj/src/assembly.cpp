#include "chladni/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace chladni {

namespace {

using Triplet = Eigen::Triplet<double>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

// A((alpha, i), (beta, j)) = W^{i alpha j beta}, flattened with index 3*alpha + i.
Mat9 contraction_matrix(const ElasticTensor& w) {
    Mat9 a;
    for (int al = 0; al < 3; ++al)
        for (int i = 0; i < 3; ++i)
            for (int be = 0; be < 3; ++be)
                for (int j = 0; j < 3; ++j) a(3 * al + i, 3 * be + j) = w(i, al, j, be);
    return a;
}

Eigen::Matrix<double, 9, 1> flatten(const Mat3& j) {
    Eigen::Matrix<double, 9, 1> v;
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) v(3 * a + i) = j(a, i);
    return v;
}

SparseMatrix from_triplets(int n, int m, const std::vector<Triplet>& trips) {
    SparseMatrix s(n, m);
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    return s;
}

Vec3 face_centroid(const SimplicialComplex3& k, int f) {
    const auto& v = k.face(f);
    return (k.vertex(v[0]) + k.vertex(v[1]) + k.vertex(v[2])) / 3.0;
}

}  // namespace

double norm_inf(const SparseMatrix& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

double SparseSymMatrix::norm_inf() const { return chladni::norm_inf(mat); }

double SparseSymMatrix::asymmetry() const {
    const SparseMatrix diff = mat - SparseMatrix(mat.transpose());
    return chladni::norm_inf(diff);
}

FaceCoefficientField DofLayout::to_field(const Eigen::VectorXd& dofs) const {
    if (dofs.size() != size()) throw std::invalid_argument("dof vector length mismatch");
    auto u = FaceCoefficientField::zero(static_cast<int>(dof_of_face.size()));
    for (int i = 0; i < size(); ++i) u.coeffs(faces[i]) = dofs(i);
    return u;
}

Eigen::VectorXd DofLayout::from_field(const FaceCoefficientField& u) const {
    if (u.size() != static_cast<int>(dof_of_face.size())) {
        throw std::invalid_argument("coefficient length mismatch");
    }
    Eigen::VectorXd d(size());
    for (int i = 0; i < size(); ++i) d(i) = u.coeffs(faces[i]);
    return d;
}

DofLayout make_layout(const SimplicialComplex3& fine) {
    const Classification c = classify(fine);
    DofLayout l;
    l.faces = c.interior_faces;
    l.faces.insert(l.faces.end(), c.boundary_faces.begin(), c.boundary_faces.end());
    l.num_interior = static_cast<int>(c.interior_faces.size());
    l.dof_of_face.assign(fine.num_faces(), -1);
    for (int i = 0; i < l.size(); ++i) l.dof_of_face[l.faces[i]] = i;
    return l;
}

Discretization::Discretization(SimplicialComplex3 coarse)
    : coarse_(std::move(coarse)), sub_(barycentric_subdivision(coarse_)) {
    basis_ = std::make_unique<WhitneyBasis>(sub_.fine);
    frames_ = boundary_frames(coarse_, sub_);
    frame_index_.assign(coarse_.num_faces(), -1);
    for (int i = 0; i < static_cast<int>(frames_.size()); ++i) frame_index_[frames_[i].coarse_face] = i;
    layout_ = make_layout(sub_.fine);
}

const BoundaryFrame& Discretization::frame_of_fine_face(int fine_face) const {
    const int parent = sub_.fine_face_parent[fine_face];
    if (parent < 0 || frame_index_[parent] < 0) {
        throw std::invalid_argument("fine face does not lie on the boundary");
    }
    return frames_[frame_index_[parent]];
}

SparseSymMatrix assemble_mass(const Discretization& d, double density) {
    const auto& k = d.fine();
    const auto& basis = d.basis();
    const auto& dof = d.layout().dof_of_face;
    std::vector<Triplet> trips;
    trips.reserve(16 * static_cast<size_t>(k.num_tets()));
    for (int t = 0; t < k.num_tets(); ++t) {
        const auto& tf = k.tet_faces(t);
        std::array<Mat34, 4> v;
        for (int i = 0; i < 4; ++i) v[i] = basis.face_field_on(tf[i], t);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                trips.emplace_back(dof[tf[i]], dof[tf[j]], density * integrate_dot(basis, t, v[i], v[j]));
            }
    }
    const int n = d.layout().size();
    return {from_triplets(n, n, trips), true};
}

SparseSymMatrix assemble_volume_stiffness(const Discretization& d, const ElasticTensor& tensor) {
    const auto& k = d.fine();
    const auto& basis = d.basis();
    const auto& dof = d.layout().dof_of_face;
    const Mat9 a = contraction_matrix(tensor);
    std::vector<Triplet> trips;
    trips.reserve(16 * static_cast<size_t>(k.num_tets()));
    for (int t = 0; t < k.num_tets(); ++t) {
        const auto& tf = k.tet_faces(t);
        Eigen::Matrix<double, 9, 4> j;
        for (int i = 0; i < 4; ++i) j.col(i) = flatten(basis.face_field_jacobian(tf[i], t));
        const Eigen::Matrix4d s = -basis.volume(t) * (j.transpose() * a * j);
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) trips.emplace_back(dof[tf[p]], dof[tf[q]], s(p, q));
    }
    const int n = d.layout().size();
    return {from_triplets(n, n, trips), true};
}

double boundary_term(const Discretization& d, const ElasticTensor& tensor, int f) {
    const auto& k = d.fine();
    if (!k.is_boundary_face(f)) throw std::invalid_argument("boundary_term: interior face");
    const int t = k.face_tets(f)[0];
    const auto& basis = d.basis();
    const Vec3 n = d.frame_of_fine_face(f).normal;
    const Mat34 v = basis.face_field_on(f, t);
    const Mat3 jac = v * basis.gradients(t).transpose();
    const Vec3 w_int = k.face_area(f) * (v * basis.barycentric(t, face_centroid(k, f)));
    const BoundaryProducts bp = boundary_products(tensor, n, jac.transpose());
    const double dn = (jac * n).dot(n);
    return bp.stress_normal.dot(w_int) -
           (bp.stress_normal.dot(n) + bp.identity_stress_normal.dot(n) * dn) * w_int.dot(n);
}

SparseSymMatrix assemble_stiffness(const Discretization& d, const ElasticTensor& tensor) {
    SparseSymMatrix k = assemble_volume_stiffness(d, tensor);
    const auto& layout = d.layout();
    std::vector<Triplet> trips;
    trips.reserve(layout.num_boundary());
    for (int i = layout.num_interior; i < layout.size(); ++i) {
        trips.emplace_back(i, i, boundary_term(d, tensor, layout.faces[i]));
    }
    k.mat += from_triplets(layout.size(), layout.size(), trips);
    k.mat.makeCompressed();
    return k;
}

int boundary_block_offdiagonals(const SparseSymMatrix& m, const DofLayout& layout, double tol) {
    const double cut = tol * m.norm_inf();
    int count = 0;
    for (int c = layout.num_interior; c < m.mat.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m.mat, c); it; ++it) {
            if (it.row() >= layout.num_interior && it.row() != c && std::abs(it.value()) > cut) ++count;
        }
    return count;
}

Eigen::Matrix<double, 2, 6> traction_rows(const Discretization& d, const ElasticTensor& tensor,
                                          const BoundaryFrame& frame) {
    const auto& k = d.fine();
    const auto& basis = d.basis();
    Eigen::Matrix<double, 2, 6> rows;
    for (int j = 0; j < 6; ++j) {
        const int f = frame.subfaces[j];
        const int t = k.face_tets(f)[0];
        const Mat3 jac = basis.face_field_jacobian(f, t);
        const BoundaryProducts bp = boundary_products(tensor, frame.normal, jac.transpose());
        const double area = k.face_area(f);
        rows(0, j) = area * ((jac * frame.t1).dot(bp.identity_stress_normal) + frame.t1.dot(bp.stress_normal));
        rows(1, j) = area * ((jac * frame.t2).dot(bp.identity_stress_normal) + frame.t2.dot(bp.stress_normal));
    }
    return rows;
}

double traction_scale(const Discretization& d, const ElasticTensor& tensor, const BoundaryFrame& frame) {
    const auto& k = d.fine();
    const auto& basis = d.basis();
    double scale = 0.0;
    for (int j = 0; j < 6; ++j) {
        const int f = frame.subfaces[j];
        const Mat3 jac = basis.face_field_jacobian(f, k.face_tets(f)[0]);
        const BoundaryProducts bp = boundary_products(tensor, frame.normal, jac.transpose());
        const double term = jac.norm() * bp.identity_stress_normal.norm() + bp.stress_normal.norm();
        scale = std::max(scale, k.face_area(f) * term);
    }
    return scale;
}

int ConstraintMap::rank_count(int r) const {
    return static_cast<int>(std::count_if(faces.begin(), faces.end(), [r](const FaceConstraint& f) { return f.rank == r; }));
}

ConstraintMap assemble_boundary_constraints(const Discretization& d, const ElasticTensor& tensor) {
    const auto& layout = d.layout();
    const auto& frames = d.frames();
    ConstraintMap cm;
    cm.faces.reserve(frames.size());
    std::vector<Triplet> raw;
    // (dependent face, free face, value)
    std::vector<std::tuple<int, int, double>> entries;

    for (size_t fi = 0; fi < frames.size(); ++fi) {
        const BoundaryFrame& fr = frames[fi];
        const Eigen::Matrix<double, 2, 6> a = traction_rows(d, tensor, fr);
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 6; ++j) {
                if (a(r, j) != 0.0) raw.emplace_back(2 * static_cast<int>(fi) + r, layout.dof_of_face[fr.subfaces[j]], a(r, j));
            }

        FaceConstraint fc;
        fc.coarse_face = fr.coarse_face;
        Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(a, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        // Entries below the rounding level of the summed products are zero.
        const double cut = kRankTolerance * std::max(s(0), traction_scale(d, tensor, fr));
        fc.rank = (s(0) > cut) + (s(1) > cut);
        cm.null_rows += 2 - fc.rank;

        // Reduced row echelon form of an orthonormal basis of the row space,
        // pivoting on the largest remaining entry.
        Eigen::Matrix<double, Eigen::Dynamic, 6> r = svd.matrixV().leftCols(fc.rank).transpose();
        std::array<bool, 6> is_pivot{};
        std::vector<int> pivots;
        for (int step = 0; step < fc.rank; ++step) {
            int br = -1, bc = -1;
            double best = -1.0;
            for (int c = 0; c < 6; ++c) {
                if (is_pivot[c]) continue;
                for (int row = step; row < fc.rank; ++row) {
                    if (std::abs(r(row, c)) > best) {
                        best = std::abs(r(row, c));
                        br = row;
                        bc = c;
                    }
                }
            }
            r.row(step).swap(r.row(br));
            r.row(step) /= r(step, bc);
            for (int row = 0; row < fc.rank; ++row) {
                if (row != step) r.row(row) -= r(row, bc) * r.row(step);
            }
            is_pivot[bc] = true;
            pivots.push_back(bc);
        }
        for (int c = 0; c < 6; ++c) {
            (is_pivot[c] ? fc.dependent : fc.free).push_back(fr.subfaces[c]);
        }
        for (int step = 0; step < fc.rank; ++step)
            for (int c = 0; c < 6; ++c) {
                if (!is_pivot[c] && r(step, c) != 0.0) {
                    entries.emplace_back(fr.subfaces[pivots[step]], fr.subfaces[c], -r(step, c));
                }
            }
        std::sort(fc.dependent.begin(), fc.dependent.end());
        cm.dependent.insert(cm.dependent.end(), fc.dependent.begin(), fc.dependent.end());
        cm.free.insert(cm.free.end(), fc.free.begin(), fc.free.end());
        cm.faces.push_back(std::move(fc));
    }
    std::sort(cm.dependent.begin(), cm.dependent.end());
    std::sort(cm.free.begin(), cm.free.end());

    const int nf = d.fine().num_faces();
    std::vector<int> dep_pos(nf, -1), free_pos(nf, -1);
    for (size_t i = 0; i < cm.dependent.size(); ++i) dep_pos[cm.dependent[i]] = static_cast<int>(i);
    for (size_t i = 0; i < cm.free.size(); ++i) free_pos[cm.free[i]] = static_cast<int>(i);

    std::vector<Triplet> ct, pt;
    for (const auto& [dep, fr, v] : entries) ct.emplace_back(dep_pos[dep], free_pos[fr], v);
    cm.c = from_triplets(static_cast<int>(cm.dependent.size()), static_cast<int>(cm.free.size()), ct);
    cm.raw = from_triplets(2 * static_cast<int>(frames.size()), layout.size(), raw);

    const int ni = layout.num_interior;
    for (int i = 0; i < ni; ++i) pt.emplace_back(i, i, 1.0);
    for (size_t m = 0; m < cm.free.size(); ++m) pt.emplace_back(layout.dof_of_face[cm.free[m]], ni + static_cast<int>(m), 1.0);
    for (const auto& [dep, fr, v] : entries) pt.emplace_back(layout.dof_of_face[dep], ni + free_pos[fr], v);
    cm.prolongation = from_triplets(layout.size(), ni + static_cast<int>(cm.free.size()), pt);
    return cm;
}

int div_b_dimension(const Discretization& d, const ConstraintMap& cmap) {
    return d.fine().num_faces() - 2 * static_cast<int>(d.frames().size()) + cmap.null_rows;
}

std::pair<SparseSymMatrix, SparseSymMatrix> reduce_system(const SparseSymMatrix& mass,
                                                          const SparseSymMatrix& stiffness,
                                                          const ConstraintMap& cmap) {
    const SparseMatrix& p = cmap.prolongation;
    if (p.rows() != mass.mat.rows() || p.rows() != stiffness.mat.rows()) {
        throw std::invalid_argument("constraint map does not match the system size");
    }
    const SparseMatrix pt = p.transpose();
    SparseMatrix mr = pt * mass.mat * p;
    SparseMatrix kr = pt * stiffness.mat * p;
    mr.makeCompressed();
    kr.makeCompressed();
    return {{mr, true}, {kr, true}};
}

int reduced_boundary_row_census(const SparseSymMatrix& reduced, const Discretization& d,
                                const ConstraintMap&, double tol) {
    const int ni = d.layout().num_interior;
    const double cut = tol * reduced.norm_inf();
    const int n = reduced.size();
    std::vector<int> per_row(n, 0);
    for (int c = ni; c < n; ++c)
        for (SparseMatrix::InnerIterator it(reduced.mat, c); it; ++it) {
            if (it.row() >= ni && it.row() != c && std::abs(it.value()) > cut) ++per_row[it.row()];
        }
    return per_row.empty() ? 0 : *std::max_element(per_row.begin(), per_row.end());
}

double ForcingWave::omega() const { return 2.0 * std::numbers::pi * frequency; }

Vec3 ForcingWave::wave_vector() const { return (omega() / speed) * direction; }

void ForcingWave::validate() const {
    if (std::abs(direction.norm() - 1.0) > 1e-12) throw std::invalid_argument("wave direction must be a unit vector");
    if (!(speed > 0)) throw std::invalid_argument("wave speed must be positive");
    if (!(frequency > 0)) throw std::invalid_argument("wave frequency must be positive");
    if (sign != 1 && sign != -1) throw std::invalid_argument("wave sign must be +1 or -1");
}

ForcingWave default_wave(const SimplicialComplex3& body, double frequency, double distance) {
    Vec3 lo = body.vertex(0), hi = lo;
    for (const auto& v : body.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    ForcingWave w;
    w.frequency = frequency;
    w.source = Vec3(0.5 * (lo.x() + hi.x()), lo.y() - distance, 0.5 * (lo.z() + hi.z()));
    return w;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    // Legendre polynomial P_n(z) and its derivative.
    auto legendre = [n](double z) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (z * p1 - p0) / (z * z - 1.0)};
    };
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(z);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double dp = legendre(z).second;
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

std::vector<std::pair<Vec3, double>> tet_quadrature(const SimplicialComplex3& k, int t, int n) {
    const auto [x, w] = gauss_legendre01(n);
    const auto& tv = k.tet(t);
    const Vec3& v0 = k.vertex(tv[0]);
    Mat3 jm;
    for (int c = 0; c < 3; ++c) jm.col(c) = k.vertex(tv[c + 1]) - v0;
    const double det = std::abs(jm.determinant());
    std::vector<std::pair<Vec3, double>> out;
    out.reserve(n * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const double u = x[a], v = x[b], s = x[c];
                const Vec3 ref(u, v * (1.0 - u), s * (1.0 - u) * (1.0 - v));
                const double weight = w[a] * w[b] * w[c] * (1.0 - u) * (1.0 - u) * (1.0 - v) * det;
                out.emplace_back(v0 + jm * ref, weight);
            }
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_forcing(const Discretization& d, const ForcingWave& wave) {
    wave.validate();
    const auto& k = d.fine();
    const auto& basis = d.basis();
    const auto& dof = d.layout().dof_of_face;
    const Vec3 kv = wave.wave_vector();
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(d.layout().size());
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(d.layout().size());
    for (int t = 0; t < k.num_tets(); ++t) {
        Eigen::Vector4d ms = Eigen::Vector4d::Zero(), mc = Eigen::Vector4d::Zero();
        for (const auto& [x, w] : tet_quadrature(k, t, 4)) {
            const double phase = kv.dot(x - wave.source);
            const Eigen::Vector4d l = basis.barycentric(t, x);
            ms += w * std::sin(phase) * l;
            mc += w * std::cos(phase) * l;
        }
        for (int f : k.tet_faces(t)) {
            const Mat34 v = basis.face_field_on(f, t);
            c1(dof[f]) += wave.amplitude.dot(v * ms);
            c2(dof[f]) += wave.amplitude.dot(v * mc);
        }
    }
    return {c1, c2};
}

std::string to_matrix_market(const SparseMatrix& m) {
    std::ostringstream out;
    out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    return out.str();
}

SparseMatrix from_matrix_market(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0) {
        throw std::invalid_argument("unsupported Matrix Market header");
    }
    const bool symmetric = line.find("symmetric") != std::string::npos;
    while (std::getline(in, line) && !line.empty() && line[0] == '%') {
    }
    std::istringstream dims(line);
    long rows = 0, cols = 0, nnz = 0;
    if (!(dims >> rows >> cols >> nnz)) throw std::invalid_argument("bad Matrix Market size line");
    std::vector<Triplet> trips;
    trips.reserve(nnz);
    for (long i = 0; i < nnz; ++i) {
        long r = 0, c = 0;
        double v = 0;
        if (!(in >> r >> c >> v)) throw std::invalid_argument("truncated Matrix Market data");
        trips.emplace_back(r - 1, c - 1, v);
        if (symmetric && r != c) trips.emplace_back(c - 1, r - 1, v);
    }
    return from_triplets(static_cast<int>(rows), static_cast<int>(cols), trips);
}

std::string vector_csv(const Eigen::VectorXd& v, const std::string& header) {
    std::ostringstream out;
    out.precision(17);
    out << header << '\n';
    for (int i = 0; i < v.size(); ++i) out << v(i) << '\n';
    return out.str();
}

}  // namespace chladni
