#include "chladni/material.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace chladni {

namespace {

struct PairRef {
    double EngineeringConstants::*mu_ij;
    double EngineeringConstants::*e_i;
    double EngineeringConstants::*mu_ji;
    double EngineeringConstants::*e_j;
};

constexpr PairRef kPairs[] = {
    {&EngineeringConstants::mu_r_theta, &EngineeringConstants::e_r, &EngineeringConstants::mu_theta_r,
     &EngineeringConstants::e_theta},
    {&EngineeringConstants::mu_r_z, &EngineeringConstants::e_r, &EngineeringConstants::mu_z_r,
     &EngineeringConstants::e_z},
    {&EngineeringConstants::mu_theta_z, &EngineeringConstants::e_theta, &EngineeringConstants::mu_z_theta,
     &EngineeringConstants::e_z},
};

}  // namespace

EngineeringConstants symmetrize(const EngineeringConstants& raw) {
    EngineeringConstants c = raw;
    for (const auto& p : kPairs) {
        const double q = 0.5 * (raw.*p.mu_ij / raw.*p.e_i + raw.*p.mu_ji / raw.*p.e_j);
        c.*p.mu_ij = q * raw.*p.e_i;
        c.*p.mu_ji = q * raw.*p.e_j;
    }
    return c;
}

double reciprocity_defect(const EngineeringConstants& c) {
    double worst = 0.0;
    for (const auto& p : kPairs) {
        const double a = c.*p.mu_ij / c.*p.e_i, b = c.*p.mu_ji / c.*p.e_j;
        const double scale = std::max(std::abs(a), std::abs(b));
        if (scale > 0) worst = std::max(worst, std::abs(a - b) / scale);
    }
    return worst;
}

int ElasticTensor::pair(int i, int j) {
    if (i == j) return i;
    const int s = i + j;  // (1,2) -> 3, (0,2) -> 2, (0,1) -> 1
    return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

ElasticTensor::ElasticTensor(const Voigt& voigt, double density) : voigt_(voigt), density_(density) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) full_[index(i, j, k, l)] = voigt_(pair(i, j), pair(k, l));
}

ElasticTensor from_engineering(const EngineeringConstants& c, double density) {
    if (!(c.e_r > 0 && c.e_theta > 0 && c.e_z > 0)) {
        throw std::domain_error("moduli of elasticity must be positive");
    }
    Eigen::Matrix3d u;
    u << 1.0 / c.e_r, -c.mu_theta_r / c.e_theta, -c.mu_z_r / c.e_z,
        -c.mu_r_theta / c.e_r, 1.0 / c.e_theta, -c.mu_z_theta / c.e_z,
        -c.mu_r_z / c.e_r, -c.mu_theta_z / c.e_theta, 1.0 / c.e_z;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(u);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw std::domain_error("singular compliance block (non-coercive material)");
    ElasticTensor::Voigt w = ElasticTensor::Voigt::Zero();
    const Eigen::Matrix3d inv = lu.inverse();
    w.topLeftCorner<3, 3>() = 0.5 * (inv + inv.transpose());
    w(3, 3) = c.g_theta_z;
    w(4, 4) = c.g_r_z;
    w(5, 5) = c.g_r_theta;
    return ElasticTensor(w, density);
}

std::array<double, 6> coercivity_eigenvalues(const ElasticTensor& t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.normal_block(), Eigen::EigenvaluesOnly);
    const Eigen::Matrix3d d = t.shear_block();
    return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2), d(0, 0), d(1, 1), d(2, 2)};
}

BoundaryProducts boundary_products(const ElasticTensor& t, const Eigen::Vector3d& n,
                                   const Eigen::Matrix3d& g) {
    BoundaryProducts out{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) {
            if (n(i) == 0.0) continue;
            double s = 0.0;
            for (int j = 0; j < 3; ++j) s += t(a, i, j, j);
            out.identity_stress_normal(a) += s * n(i);
            double r = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int b = 0; b < 3; ++b) r += t(a, i, k, b) * g(k, b);
            out.stress_normal(a) += r * n(i);
        }
    return out;
}

EngineeringConstants engelmann_spruce_raw() {
    constexpr double mpa = 1e6;
    const double ez = 9790.0 * mpa;
    EngineeringConstants c;
    c.e_z = ez;
    c.e_theta = 0.059 * ez;
    c.e_r = 0.128 * ez;
    c.g_r_z = 0.124 * ez;
    c.g_theta_z = 0.120 * ez;
    c.g_r_theta = 0.010 * ez;
    c.mu_z_r = 0.422;
    c.mu_z_theta = 0.462;
    c.mu_r_theta = 0.530;
    c.mu_theta_r = 0.255;
    c.mu_r_z = 0.083;
    c.mu_theta_z = 0.058;
    return c;
}

MaterialPreset material_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    constexpr double mpa = 1e6;
    MaterialPreset p;
    p.name = j.value("name", std::string("custom"));
    p.density = j.value("density_kg_m3", kSpruceDensity);
    const auto& m = j.at("moduli_mpa");
    const auto& g = j.at("rigidity_mpa");
    const auto& mu = j.at("poisson");
    EngineeringConstants c;
    c.e_r = m.at("e_r").get<double>() * mpa;
    c.e_theta = m.at("e_theta").get<double>() * mpa;
    c.e_z = m.at("e_z").get<double>() * mpa;
    c.g_theta_z = g.at("g_theta_z").get<double>() * mpa;
    c.g_r_z = g.at("g_r_z").get<double>() * mpa;
    c.g_r_theta = g.at("g_r_theta").get<double>() * mpa;
    c.mu_r_theta = mu.at("r_theta").get<double>();
    c.mu_theta_r = mu.at("theta_r").get<double>();
    c.mu_r_z = mu.at("r_z").get<double>();
    c.mu_z_r = mu.at("z_r").get<double>();
    c.mu_theta_z = mu.at("theta_z").get<double>();
    c.mu_z_theta = mu.at("z_theta").get<double>();
    if (!(p.density > 0)) throw std::invalid_argument("density must be positive");
    p.constants = j.value("symmetrize", true) ? symmetrize(c) : c;
    return p;
}

std::string material_to_json(const MaterialPreset& p) {
    constexpr double mpa = 1e6;
    const auto& c = p.constants;
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["density_kg_m3"] = p.density;
    j["moduli_mpa"] = {{"e_r", c.e_r / mpa}, {"e_theta", c.e_theta / mpa}, {"e_z", c.e_z / mpa}};
    j["rigidity_mpa"] = {
        {"g_theta_z", c.g_theta_z / mpa}, {"g_r_z", c.g_r_z / mpa}, {"g_r_theta", c.g_r_theta / mpa}};
    j["poisson"] = {{"r_theta", c.mu_r_theta}, {"theta_r", c.mu_theta_r}, {"r_z", c.mu_r_z},
                    {"z_r", c.mu_z_r},         {"theta_z", c.mu_theta_z}, {"z_theta", c.mu_z_theta}};
    j["symmetrize"] = false;
    return j.dump(2) + "\n";
}

MaterialPreset load_material(const std::string& name_or_path) {
    if (name_or_path == "engelmann-spruce") {
        return {"engelmann-spruce", symmetrize(engelmann_spruce_raw()), kSpruceDensity};
    }
    if (!std::filesystem::exists(name_or_path)) {
        throw std::invalid_argument("unknown material preset: " + name_or_path);
    }
    std::ifstream in(name_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return material_from_json(ss.str());
}

}  // namespace chladni
