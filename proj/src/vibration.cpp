#include "chladni/vibration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>

namespace chladni {

int SystemBasis::size() const {
    return prolongation.size() ? static_cast<int>(prolongation.cols()) : layout->size();
}

FaceCoefficientField SystemBasis::expand(const Eigen::VectorXd& coords) const {
    if (coords.size() != size()) throw std::invalid_argument("coordinate length does not match the basis");
    if (prolongation.size() == 0) return layout->to_field(coords);
    return layout->to_field(prolongation * coords);
}

Eigen::VectorXd SystemBasis::restrict(const Eigen::VectorXd& v) const {
    if (prolongation.size() == 0) return v;
    return prolongation.transpose() * v;
}

SystemBasis coarse_basis(const Discretization& d) { return {"coarse", &d.layout(), SparseMatrix()}; }

SystemBasis fine_basis(const Discretization& d, const ConstraintMap& cmap) {
    return {"fine", &d.layout(), cmap.prolongation};
}

Vec3 outward_face_normal(const SimplicialComplex3& k, int f) {
    if (!k.is_boundary_face(f)) throw std::invalid_argument("face is not a boundary face");
    return k.incidence({2, f}, {3, k.face_tets(f)[0]}) * k.face_normal(f);
}

ObservationPoints observation_points(const SimplicialComplex3& k, const ObservationSelector& sel) {
    ObservationPoints obs;
    if (sel.direction.isZero(0.0)) return obs;
    const Vec3 dir = sel.direction.normalized();
    std::map<int, std::vector<int>> vertex_tets;
    for (int f = 0; f < k.num_faces(); ++f) {
        if (!k.is_boundary_face(f) || outward_face_normal(k, f).dot(dir) < sel.min_cos) continue;
        const int t = k.face_tets(f)[0];
        obs.faces.push_back(f);
        obs.points.push_back(k.barycenter({2, f}));
        obs.tets.push_back({t});
        for (int p : k.face(f)) vertex_tets[p].push_back(t);
    }
    if (obs.faces.empty()) throw std::invalid_argument("observation selector matches no boundary face");
    obs.num_barycenters = static_cast<int>(obs.faces.size());
    for (auto& [p, tets] : vertex_tets) {
        std::sort(tets.begin(), tets.end());
        tets.erase(std::unique(tets.begin(), tets.end()), tets.end());
        obs.points.push_back(k.vertex(p));
        obs.tets.push_back(std::move(tets));
    }
    return obs;
}

std::vector<Vec3> evaluate(const WhitneyBasis& basis, const ObservationPoints& obs, const FaceCoefficientField& u) {
    std::vector<Vec3> out(obs.size(), Vec3::Zero());
    for (int i = 0; i < obs.size(); ++i) {
        for (int t : obs.tets[i]) out[i] += basis.eval_on(u, t, obs.points[i]);
        out[i] /= static_cast<double>(obs.tets[i].size());
    }
    return out;
}

double boundary_flux(const SimplicialComplex3& k, const FaceCoefficientField& u) {
    if (u.size() != k.num_faces()) throw std::invalid_argument("coefficient length mismatch");
    double s = 0.0;
    for (int f = 0; f < k.num_faces(); ++f) {
        if (k.is_boundary_face(f) && u.coeffs(f) != 0.0) s += u.coeffs(f) * k.incidence({2, f}, {3, k.face_tets(f)[0]});
    }
    return s;
}

namespace {

// cos-like and sin-like functions of sqrt(q) t continued to q <= 0:
// C = cos(sqrt(q) t), S = sin(sqrt(q) t) / sqrt(q).
std::pair<double, double> mode_functions(double q, double t) {
    if (q > 0) {
        const double w = std::sqrt(q);
        return {std::cos(w * t), std::sin(w * t) / w};
    }
    if (q < 0) {
        const double kappa = std::sqrt(-q);
        return {std::cosh(kappa * t), std::sinh(kappa * t) / kappa};
    }
    return {1.0, t};
}

}  // namespace

std::pair<double, double> ResonanceWave::weights(double t) const {
    double a = 0.0, b = 0.0;
    const double w2 = omega * omega;
    for (double q : mode_omega_sq) {
        const auto [c, s] = mode_functions(q, t);
        a += (std::cos(omega * t) - c) / (q - w2);
        b += sign * (omega * s - std::sin(omega * t)) / (q - w2);
    }
    return {a, b};
}

std::pair<double, double> ResonanceWave::weight_derivatives(double t) const {
    double a = 0.0, b = 0.0;
    const double w2 = omega * omega;
    for (double q : mode_omega_sq) {
        const auto [c, s] = mode_functions(q, t);
        a += (-omega * std::sin(omega * t) + q * s) / (q - w2);
        b += sign * (omega * c - omega * std::cos(omega * t)) / (q - w2);
    }
    return {a, b};
}

Eigen::VectorXd ResonanceWave::coords(double t) const {
    const auto [a, b] = weights(t);
    return a * c1 + b * c2;
}

ResonanceWave resonance_wave(double frequency_hz, const std::vector<EigenPair>& modes, const Eigen::VectorXd& rhs1,
                             const Eigen::VectorXd& rhs2, const SparseMatrix& k, const SparseMatrix& m, int sign,
                             bool check_resonance) {
    if (!(frequency_hz > 0)) throw std::invalid_argument("drive frequency must be positive");
    if (modes.empty()) throw std::invalid_argument("resonance wave needs at least one mode");
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    ResonanceWave w;
    w.omega = 2.0 * std::numbers::pi * frequency_hz;
    w.sign = sign;
    const double w2 = w.omega * w.omega;
    for (const auto& p : modes) {
        const double q = -p.lambda;
        if (std::abs(q - w2) <= 1e-12 * w2) {
            throw std::invalid_argument("drive frequency coincides with a mode frequency");
        }
        w.mode_omega_sq.push_back(q);
    }
    auto sols = solve_forced(k, m, w.omega, std::vector<Eigen::VectorXd>{rhs1, rhs2}, check_resonance);
    w.c1 = std::move(sols[0]);
    w.c2 = std::move(sols[1]);
    return w;
}

std::vector<double> default_times(double omega) {
    std::vector<double> t(10);
    for (int j = 1; j <= 10; ++j) t[j - 1] = j * 2.0 * std::numbers::pi / (10.0 * omega);
    return t;
}

int NormSamples::worst_time() const {
    int best = 0;
    double best_ratio = -1.0;
    for (int j = 0; j < max.size(); ++j) {
        const double r = min(j) > 0 ? max(j) / min(j) : (max(j) > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (r > best_ratio) {
            best_ratio = r;
            best = j;
        }
    }
    return best;
}

NormSamples sample_norms(const ResonanceWave& wave, const SystemBasis& sys, const WhitneyBasis& basis,
                         const ObservationPoints& obs, const std::vector<double>& times) {
    const std::vector<Vec3> u1 = evaluate(basis, obs, sys.expand(wave.c1));
    const std::vector<Vec3> u2 = evaluate(basis, obs, sys.expand(wave.c2));
    NormSamples s;
    s.times = times;
    const int nt = static_cast<int>(times.size());
    s.norms.resize(obs.size(), nt);
    s.max = Eigen::VectorXd::Zero(nt);
    s.min = Eigen::VectorXd::Zero(nt);
    s.delta = Eigen::VectorXd::Zero(nt);
    for (int j = 0; j < nt; ++j) {
        const auto [a, b] = wave.weights(times[j]);
        for (int i = 0; i < obs.size(); ++i) s.norms(i, j) = (a * u1[i] + b * u2[i]).norm();
        if (obs.size() > 0) {
            s.max(j) = s.norms.col(j).maxCoeff();
            s.min(j) = s.norms.col(j).minCoeff();
        }
        s.delta(j) = 0.1 * (s.max(j) - s.min(j));
    }
    return s;
}

int NodalReport::count() const { return static_cast<int>(std::count(nodal.begin(), nodal.end(), 1)); }

NodalReport nodal_points(const NormSamples& s, double c_omega) {
    if (!(c_omega > 0)) throw std::invalid_argument("c_omega must be positive");
    NodalReport r;
    r.c_omega = c_omega;
    const int np = static_cast<int>(s.norms.rows()), nt = static_cast<int>(s.norms.cols());
    r.nodal.assign(np, 1);
    r.nodal_per_time.assign(nt, 0);
    for (int j = 0; j < nt; ++j) {
        const double cut = s.min(j) + c_omega * s.delta(j);
        for (int i = 0; i < np; ++i) {
            if (s.norms(i, j) <= cut) {
                ++r.nodal_per_time[j];
            } else {
                r.nodal[i] = 0;
            }
        }
    }
    r.worst_time = s.worst_time();
    return r;
}

std::string nodal_csv(const ObservationPoints& obs, const NormSamples& s, const NodalReport& r) {
    std::ostringstream out;
    const double scale = s.norms.size() ? s.norms.maxCoeff() : 0.0;
    out << "x,y,z,nodal";
    for (size_t j = 0; j < s.times.size(); ++j) out << ",r" << j + 1;
    out << '\n';
    for (int i = 0; i < obs.size(); ++i) {
        const Vec3& p = obs.points[i];
        out << std::setprecision(10) << p.x() << ',' << p.y() << ',' << p.z() << ',' << int(r.nodal[i]);
        out << std::setprecision(9);
        for (int j = 0; j < s.norms.cols(); ++j) out << ',' << (scale > 0 ? s.norms(i, j) / scale : 0.0);
        out << '\n';
    }
    return out.str();
}

std::string nodal_svg(const ObservationPoints& obs, const NodalReport& r, const Vec3& view) {
    Vec3 n = view.isZero(0.0) ? Vec3::UnitY() : view.normalized();
    Vec3 u = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitZ());
    u = (u - u.dot(n) * n).normalized();
    const Vec3 v = n.cross(u);
    double umin = 0, umax = 1, vmin = 0, vmax = 1;
    if (obs.size() > 0) {
        umin = vmin = std::numeric_limits<double>::infinity();
        umax = vmax = -umin;
        for (const auto& p : obs.points) {
            umin = std::min(umin, p.dot(u));
            umax = std::max(umax, p.dot(u));
            vmin = std::min(vmin, p.dot(v));
            vmax = std::max(vmax, p.dot(v));
        }
    }
    const double span = std::max({umax - umin, vmax - vmin, 1e-12});
    const double size = 600.0, pad = 20.0;
    const double sx = size / span;
    const double width = (umax - umin) * sx + 2 * pad, height = (vmax - vmin) * sx + 2 * pad;
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << (umax - umin) * sx << "\" height=\""
        << (vmax - vmin) * sx << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < obs.size(); ++i) {
            const bool nodal = r.nodal.size() == static_cast<size_t>(obs.size()) && r.nodal[i];
            if (nodal != (pass == 1)) continue;
            const double x = pad + (obs.points[i].dot(u) - umin) * sx;
            const double y = pad + (vmax - obs.points[i].dot(v)) * sx;
            out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << (nodal ? 2.5 : 1.0) << "\" fill=\""
                << (nodal ? "black" : "#cccccc") << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

Eigen::VectorXd normalize_mass(const Eigen::VectorXd& c, const SparseMatrix& m) {
    const double nrm = std::sqrt(std::max(c.dot(m * c), 0.0));
    if (nrm == 0.0) return c;
    Eigen::VectorXd out = c / nrm;
    Eigen::Index i = 0;
    out.cwiseAbs().maxCoeff(&i);
    if (out(i) < 0) out = -out;
    return out;
}

std::string flux_table_text(const std::string& body, const std::string& basis, const std::vector<FluxRow>& rows) {
    std::ostringstream out;
    out << "body " << body << "  basis " << basis << '\n';
    out << std::setw(8) << "f" << std::setw(16) << "f_r" << std::setw(13) << "kind" << std::setw(14) << "residual"
        << std::setw(16) << "flux_eig" << std::setw(16) << "flux_wave" << std::setw(7) << "t_j" << '\n';
    for (const auto& r : rows) {
        out << std::setw(8) << std::setprecision(6) << r.frequency << std::setw(16) << std::fixed << std::setprecision(8)
            << r.mode_frequency << std::defaultfloat << std::setw(13) << r.kind << std::setw(14) << std::setprecision(3)
            << std::scientific << r.residual << std::defaultfloat << std::setw(16) << std::fixed << std::setprecision(10)
            << r.eigen_flux << std::setw(16) << r.wave_flux << std::defaultfloat << std::setw(7) << r.worst_time + 1
            << '\n';
    }
    return out.str();
}

std::string flux_table_csv(const std::vector<FluxRow>& rows) {
    std::ostringstream out;
    out << "f,f_r,kind,residual,flux_eigenvector,flux_wave,worst_time\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.frequency << ',' << r.mode_frequency << ',' << r.kind << ',' << r.residual << ',' << r.eigen_flux << ','
            << r.wave_flux << ',' << r.worst_time + 1 << '\n';
    }
    return out.str();
}

}  // namespace chladni
