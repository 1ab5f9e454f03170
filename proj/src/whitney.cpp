#include "chladni/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "chladni/material.hpp"

namespace chladni {

namespace {

constexpr double kInsideTol = 1e-10;

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

std::array<int, 2> common_tets(const SimplicialComplex3& k, int f, int g, int& count) {
    std::array<int, 2> out{-1, -1};
    count = 0;
    for (int a : k.face_tets(f))
        for (int b : k.face_tets(g))
            if (a == b) out[count++] = a;
    return out;
}

}  // namespace

WhitneyBasis::WhitneyBasis(const SimplicialComplex3& complex) : complex_(&complex) {
    const int nt = complex.num_tets();
    gradients_.resize(nt);
    volumes_.resize(nt);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& v : complex.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    for (int t = 0; t < nt; ++t) {
        const auto& tv = complex.tet(t);
        const Vec3& v0 = complex.vertex(tv[0]);
        Mat3 jm;
        for (int k = 0; k < 3; ++k) jm.col(k) = complex.vertex(tv[k + 1]) - v0;
        const Mat3 inv = jm.inverse();
        Mat34 g;
        for (int k = 0; k < 3; ++k) g.col(k + 1) = inv.row(k).transpose();
        g.col(0) = -(g.col(1) + g.col(2) + g.col(3));
        gradients_[t] = g;
        volumes_[t] = std::abs(jm.determinant()) / 6.0;
    }

    if (nt == 0) return;
    const Vec3 ext = (hi - lo).cwiseMax(1e-300);
    const double per_axis = std::cbrt(static_cast<double>(nt) / ext.prod());
    for (int a = 0; a < 3; ++a) {
        grid_n_[a] = std::clamp(static_cast<int>(std::ceil(ext(a) * per_axis)), 1, 256);
    }
    grid_lo_ = lo;
    grid_cell_ = ext.cwiseQuotient(Vec3(grid_n_[0], grid_n_[1], grid_n_[2]));
    const int ncell = grid_n_[0] * grid_n_[1] * grid_n_[2];
    auto cell_range = [&](int t, std::array<int, 3>& c0, std::array<int, 3>& c1) {
        Vec3 tl = complex.vertex(complex.tet(t)[0]), th = tl;
        for (int k = 1; k < 4; ++k) {
            tl = tl.cwiseMin(complex.vertex(complex.tet(t)[k]));
            th = th.cwiseMax(complex.vertex(complex.tet(t)[k]));
        }
        for (int a = 0; a < 3; ++a) {
            const double pad = 1e-9 * grid_cell_(a);
            c0[a] = std::clamp(static_cast<int>(std::floor((tl(a) - pad - lo(a)) / grid_cell_(a))), 0,
                               grid_n_[a] - 1);
            c1[a] = std::clamp(static_cast<int>(std::floor((th(a) + pad - lo(a)) / grid_cell_(a))), 0,
                               grid_n_[a] - 1);
        }
    };
    grid_offsets_.assign(ncell + 1, 0);
    std::array<int, 3> c0{}, c1{};
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<int> fill;
        if (pass == 1) {
            for (int c = 0; c < ncell; ++c) grid_offsets_[c + 1] += grid_offsets_[c];
            grid_tets_.resize(grid_offsets_[ncell]);
            fill.assign(grid_offsets_.begin(), grid_offsets_.end() - 1);
        }
        for (int t = 0; t < nt; ++t) {
            cell_range(t, c0, c1);
            for (int i = c0[0]; i <= c1[0]; ++i)
                for (int j = c0[1]; j <= c1[1]; ++j)
                    for (int k = c0[2]; k <= c1[2]; ++k) {
                        const int c = (i * grid_n_[1] + j) * grid_n_[2] + k;
                        if (pass == 0) {
                            ++grid_offsets_[c + 1];
                        } else {
                            grid_tets_[fill[c]++] = t;
                        }
                    }
        }
    }
}

Eigen::Vector4d WhitneyBasis::barycentric(int t, const Vec3& x) const {
    const Mat34& g = gradients_[t];
    const Vec3 d = x - complex_->vertex(complex_->tet(t)[0]);
    Eigen::Vector4d l;
    for (int k = 1; k < 4; ++k) l(k) = g.col(k).dot(d);
    l(0) = 1.0 - l(1) - l(2) - l(3);
    return l;
}

int WhitneyBasis::local_index(int t, int vertex) const {
    const auto& tv = complex_->tet(t);
    for (int k = 0; k < 4; ++k)
        if (tv[k] == vertex) return k;
    return -1;
}

bool WhitneyBasis::inside(int t, const Vec3& x) const {
    return barycentric(t, x).minCoeff() >= -kInsideTol;
}

int WhitneyBasis::locate(const Vec3& x) const {
    if (grid_tets_.empty()) return -1;
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) {
        const double u = (x(a) - grid_lo_(a)) / grid_cell_(a);
        if (u < -1e-6 || u > grid_n_[a] + 1e-6) return -1;
        c[a] = std::clamp(static_cast<int>(std::floor(u)), 0, grid_n_[a] - 1);
    }
    const int cell = (c[0] * grid_n_[1] + c[1]) * grid_n_[2] + c[2];
    for (int i = grid_offsets_[cell]; i < grid_offsets_[cell + 1]; ++i) {
        if (inside(grid_tets_[i], x)) return grid_tets_[i];
    }
    return -1;
}

Mat34 WhitneyBasis::face_field_on(int f, int t) const {
    Mat34 v = Mat34::Zero();
    const auto& fv = complex_->face(f);
    std::array<int, 3> loc{};
    for (int i = 0; i < 3; ++i) {
        loc[i] = local_index(t, fv[i]);
        if (loc[i] < 0) return v;
    }
    const Mat34& g = gradients_[t];
    for (int i = 0; i < 3; ++i) {
        const int b = loc[(i + 1) % 3], c = loc[(i + 2) % 3];
        v.col(loc[i]) = 2.0 * g.col(b).cross(g.col(c));
    }
    return v;
}

Mat34 WhitneyBasis::edge_field_on(int e, int t) const {
    Mat34 v = Mat34::Zero();
    const auto& ev = complex_->edge(e);
    const int a = local_index(t, ev[0]), b = local_index(t, ev[1]);
    if (a < 0 || b < 0) return v;
    const Mat34& g = gradients_[t];
    v.col(a) = g.col(b);
    v.col(b) = -g.col(a);
    return v;
}

Mat3 WhitneyBasis::face_field_jacobian(int f, int t) const {
    return face_field_on(f, t) * gradients_[t].transpose();
}

Vec3 WhitneyBasis::eval_face_field(int f, const Vec3& x) const {
    for (int t : complex_->face_tets(f)) {
        if (inside(t, x)) return face_field_on(f, t) * barycentric(t, x);
    }
    if (locate(x) < 0) throw std::domain_error("point outside the polytope");
    return Vec3::Zero();
}

Vec3 WhitneyBasis::eval_edge_field(int e, const Vec3& x) const {
    for (int t : complex_->star({1, e})) {
        if (inside(t, x)) return edge_field_on(e, t) * barycentric(t, x);
    }
    if (locate(x) < 0) throw std::domain_error("point outside the polytope");
    return Vec3::Zero();
}

Vec3 WhitneyBasis::eval_on(const FaceCoefficientField& u, int t, const Vec3& x) const {
    Mat34 v = Mat34::Zero();
    for (int f : complex_->tet_faces(t)) {
        const double c = u.coeffs(f);
        if (c != 0.0) v += c * face_field_on(f, t);
    }
    return v * barycentric(t, x);
}

FaceCoefficientField curl_edge_field(const SimplicialComplex3& complex, int e) {
    auto u = FaceCoefficientField::zero(complex.num_faces());
    for (int f : complex.edge_faces(e)) u.coeffs(f) = complex.incidence({1, e}, {2, f});
    return u;
}

Eigen::VectorXd tet_flux_sums(const SimplicialComplex3& complex, const FaceCoefficientField& u) {
    if (u.size() != complex.num_faces()) throw std::invalid_argument("coefficient length mismatch");
    Eigen::VectorXd s(complex.num_tets());
    for (int t = 0; t < complex.num_tets(); ++t) {
        const auto& tf = complex.tet_faces(t);
        const double sign = complex.tet_sign(t);
        s(t) = sign * (u.coeffs(tf[0]) - u.coeffs(tf[1]) + u.coeffs(tf[2]) - u.coeffs(tf[3]));
    }
    return s;
}

Eigen::VectorXd divergence(const WhitneyBasis& basis, const FaceCoefficientField& u) {
    Eigen::VectorXd d = tet_flux_sums(basis.complex(), u);
    for (int t = 0; t < d.size(); ++t) d(t) /= basis.volume(t);
    return d;
}

double integrate_monomial(const WhitneyBasis& basis, int t, const std::array<int, 4>& e) {
    int n = 0;
    double num = 1.0;
    for (int k : e) {
        if (k < 0) throw std::invalid_argument("negative exponent");
        n += k;
        num *= factorial(k);
    }
    return 6.0 * basis.volume(t) * num / factorial(n + 3);
}

double integrate_dot(const WhitneyBasis& basis, int t, const Mat34& a, const Mat34& b) {
    const Eigen::Matrix4d g = a.transpose() * b;
    return basis.volume(t) * (g.sum() + g.trace()) / 20.0;
}

double pair_mass(const WhitneyBasis& basis, int f, int g) {
    int n = 0;
    const auto ts = common_tets(basis.complex(), f, g, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += integrate_dot(basis, ts[i], basis.face_field_on(f, ts[i]), basis.face_field_on(g, ts[i]));
    return s;
}

double stiffness_contraction(const Mat3& jf, const Mat3& jg, const ElasticTensor& w, double vol) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) {
            const double x = jf(a, i);
            if (x == 0.0) continue;
            double r = 0.0;
            for (int b = 0; b < 3; ++b)
                for (int j = 0; j < 3; ++j) r += w(i, a, j, b) * jg(b, j);
            s += x * r;
        }
    return vol * s;
}

double pair_stiffness(const WhitneyBasis& basis, int f, int g, const ElasticTensor& tensor) {
    int n = 0;
    const auto ts = common_tets(basis.complex(), f, g, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const int t = ts[i];
        s += stiffness_contraction(basis.face_field_jacobian(f, t), basis.face_field_jacobian(g, t), tensor,
                                   basis.volume(t));
    }
    return -s;
}

double face_flux(const WhitneyBasis& basis, int f, int g, int t) {
    const auto& k = basis.complex();
    const auto& gv = k.face(g);
    const Vec3& p0 = k.vertex(gv[0]);
    const Vec3& p1 = k.vertex(gv[1]);
    const Vec3& p2 = k.vertex(gv[2]);
    const Vec3 centroid = (p0 + p1 + p2) / 3.0;
    const Vec3 w = basis.face_field_on(f, t) * basis.barycentric(t, centroid);
    return 0.5 * w.dot((p1 - p0).cross(p2 - p0));
}

double edge_circulation(const WhitneyBasis& basis, int e, int g, int t) {
    const auto& k = basis.complex();
    const auto& gv = k.edge(g);
    const Vec3& p0 = k.vertex(gv[0]);
    const Vec3& p1 = k.vertex(gv[1]);
    const Vec3 w = basis.edge_field_on(e, t) * basis.barycentric(t, 0.5 * (p0 + p1));
    return w.dot(p1 - p0);
}

std::string gradients_csv(const WhitneyBasis& basis) {
    std::ostringstream out;
    out.precision(17);
    out << "tet,volume";
    for (int k = 0; k < 4; ++k) out << ",g" << k << "x,g" << k << "y,g" << k << "z";
    out << "\n";
    for (int t = 0; t < basis.complex().num_tets(); ++t) {
        out << t << ',' << basis.volume(t);
        const Mat34& g = basis.gradients(t);
        for (int k = 0; k < 4; ++k) out << ',' << g(0, k) << ',' << g(1, k) << ',' << g(2, k);
        out << "\n";
    }
    return out.str();
}

}  // namespace chladni
