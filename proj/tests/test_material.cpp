#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Eigenvalues>

#include "chladni/material.hpp"

using namespace chladni;

namespace {

// Relative agreement to `digits` significant digits.
::testing::AssertionResult same_digits(double a, double b, int digits) {
    const double tol = 0.5 * std::pow(10.0, 1 - digits) * std::max(std::abs(a), std::abs(b));
    if (std::abs(a - b) <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a << " vs " << b;
}

ElasticTensor spruce() {
    const auto m = load_material("engelmann-spruce");
    return from_engineering(m.constants, m.density);
}

// Independent 4-index lookup from the Voigt matrix.
int voigt_index(int i, int j) {
    static const int table[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
    return table[i][j];
}

}  // namespace

TEST(Material, SymmetrizeRestoresReciprocity) {
    const auto raw = engelmann_spruce_raw();
    EXPECT_GT(reciprocity_defect(raw), 1e-3);
    const auto s = symmetrize(raw);
    EXPECT_LT(reciprocity_defect(s), 1e-14);
    EXPECT_DOUBLE_EQ(s.e_r, raw.e_r);
    EXPECT_DOUBLE_EQ(s.g_r_theta, raw.g_r_theta);
    // The symmetrized ratio is the mean of the two raw ratios.
    EXPECT_NEAR(s.mu_r_theta / s.e_r, 0.5 * (raw.mu_r_theta / raw.e_r + raw.mu_theta_r / raw.e_theta), 1e-25);
}

TEST(Material, NormalBlockOfSpruce) {
    const ElasticTensor w = spruce();
    const double ref[3][3] = {{157.198269069862, 44.1920517114940, 116.065341927474},
                              {44.1920517114940, 72.0200103705017, 75.6887031695923},
                              {116.065341927474, 75.6887031695923, 1095.80735919001}};
    const Eigen::Matrix3d n = w.normal_block();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_TRUE(same_digits(n(i, j), 1e7 * ref[i][j], 6)) << i << j;
}

TEST(Material, ShearBlockOfSpruce) {
    const Eigen::Matrix3d d = spruce().shear_block();
    EXPECT_TRUE(same_digits(d(0, 0), 117.480e7, 6));
    EXPECT_TRUE(same_digits(d(1, 1), 121.396e7, 6));
    EXPECT_TRUE(same_digits(d(2, 2), 9.790e7, 6));
    EXPECT_EQ(d(0, 1), 0.0);
    EXPECT_EQ(d(1, 2), 0.0);
}

TEST(Material, CoercivityEigenvalues) {
    const auto ev = coercivity_eigenvalues(spruce());
    std::array<double, 3> normal{ev[0], ev[1], ev[2]};
    std::array<double, 3> ref{52.5760348742398e7, 156.292790395160e7, 1116.15681336097e7};
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(same_digits(normal[i], ref[i], 6));
    for (double v : ev) EXPECT_GT(v, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(spruce().normal_block());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(es.eigenvalues()(i), normal[i], 1e-6 * normal[i]);
}

TEST(Material, ComplianceInverse) {
    const auto c = symmetrize(engelmann_spruce_raw());
    Eigen::Matrix3d u;
    u << 1 / c.e_r, -c.mu_theta_r / c.e_theta, -c.mu_z_r / c.e_z, -c.mu_r_theta / c.e_r, 1 / c.e_theta,
        -c.mu_z_theta / c.e_z, -c.mu_r_z / c.e_r, -c.mu_theta_z / c.e_theta, 1 / c.e_z;
    const Eigen::Matrix3d prod = spruce().normal_block() * u;
    EXPECT_LT((prod - Eigen::Matrix3d::Identity()).norm(), 1e-12);
}

TEST(Material, FullTensorSymmetries) {
    const ElasticTensor w = spruce();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double v = w(i, j, k, l);
                    EXPECT_EQ(v, w.voigt()(voigt_index(i, j), voigt_index(k, l)));
                    EXPECT_EQ(v, w(j, i, k, l));
                    EXPECT_EQ(v, w(k, l, i, j));
                }
    EXPECT_EQ(ElasticTensor::pair(1, 2), 3);
    EXPECT_EQ(ElasticTensor::pair(2, 0), 4);
    EXPECT_EQ(ElasticTensor::pair(0, 1), 5);
}

TEST(Material, BoundaryProductsBruteForce) {
    const ElasticTensor w = spruce();
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int n = 0; n < 20; ++n) {
        Eigen::Vector3d normal(nd(rng), nd(rng), nd(rng));
        normal.normalize();
        Eigen::Matrix3d g;
        for (int i = 0; i < 9; ++i) g(i) = nd(rng);
        Eigen::Vector3d isn = Eigen::Vector3d::Zero(), sn = Eigen::Vector3d::Zero();
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j)
                    isn(a) += w.voigt()(voigt_index(a, i), voigt_index(j, j)) * normal(i);
                for (int k = 0; k < 3; ++k)
                    for (int b = 0; b < 3; ++b)
                        sn(a) += w.voigt()(voigt_index(a, i), voigt_index(k, b)) * g(k, b) * normal(i);
            }
        const auto bp = boundary_products(w, normal, g);
        EXPECT_LT((bp.identity_stress_normal - isn).norm(), 1e-12 * isn.norm());
        EXPECT_LT((bp.stress_normal - sn).norm(), 1e-12 * sn.norm());
    }
}

TEST(Material, SingularComplianceThrows) {
    // Equal moduli with Poisson ratio 1/2 everywhere: the rows of the
    // compliance block sum to zero.
    EngineeringConstants c;
    c.e_r = c.e_theta = c.e_z = 1e9;
    c.g_theta_z = c.g_r_z = c.g_r_theta = 1e8;
    c.mu_r_theta = c.mu_theta_r = c.mu_r_z = c.mu_z_r = c.mu_theta_z = c.mu_z_theta = 0.5;
    EXPECT_THROW(from_engineering(c, 360), std::domain_error);
    c.e_z = -1.0;
    EXPECT_THROW(from_engineering(c, 360), std::domain_error);
}

TEST(Material, PresetJsonRoundTrip) {
    const auto p = load_material("engelmann-spruce");
    const std::string text = material_to_json(p);
    const auto back = material_from_json(text);
    EXPECT_EQ(back.density, p.density);
    EXPECT_NEAR(back.constants.e_z, p.constants.e_z, 1e-6);
    EXPECT_NEAR(back.constants.mu_theta_z, p.constants.mu_theta_z, 1e-15);
    const std::string path = ::testing::TempDir() + "/preset.json";
    std::ofstream(path) << text;
    EXPECT_NEAR(load_material(path).constants.g_r_z, p.constants.g_r_z, 1e-6);
    std::remove(path.c_str());
    EXPECT_THROW(load_material("no-such-wood"), std::exception);
    EXPECT_THROW(material_from_json("{\"density_kg_m3\": 1}"), std::exception);
}
