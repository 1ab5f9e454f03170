#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "chladni/assembly.hpp"
#include "chladni/solver.hpp"
#include "chladni/vibration.hpp"

using namespace chladni;

namespace {

ElasticTensor spruce() {
    const auto m = load_material("engelmann-spruce");
    return from_engineering(m.constants, m.density);
}

struct SmallSystem {
    Discretization d{build_slab(2, 1, 2, 0.01, 0.005, 0.01)};
    ElasticTensor w = spruce();
    SparseSymMatrix m = assemble_mass(d, 360.0);
    SparseSymMatrix k = assemble_stiffness(d, w);
};

SmallSystem& small() {
    static SmallSystem s;
    return s;
}

ResonanceWave toy_wave(std::vector<double> q, int sign) {
    ResonanceWave w;
    w.omega = 2.0;
    w.mode_omega_sq = std::move(q);
    w.c1 = Eigen::VectorXd::Ones(3);
    w.c2 = Eigen::VectorXd::LinSpaced(3, -1, 2);
    w.sign = sign;
    return w;
}

}  // namespace

TEST(Observation, FarSideCount) {
    for (double dy : {0.01, 0.005, 0.0025}) {
        const auto fine = barycentric_subdivision(build_slab(10, 2, 20, 0.01, dy, 0.01)).fine;
        const auto obs = observation_points(fine, {Vec3::UnitY()});
        EXPECT_EQ(obs.size(), 3661);
        EXPECT_EQ(obs.num_barycenters, 2400);
        for (const auto& p : obs.points) EXPECT_NEAR(p.y(), 2 * dy, 1e-15);
    }
}

TEST(Observation, SelectorEdgeCases) {
    const auto& k = small().d.fine();
    EXPECT_EQ(observation_points(k, {Vec3::Zero()}).size(), 0);
    EXPECT_THROW(observation_points(k, {Vec3(1, 1, 0).normalized()}), std::invalid_argument);
    const auto obs = observation_points(k, {-Vec3::UnitZ()});
    for (int f : obs.faces) EXPECT_NEAR(outward_face_normal(k, f).z(), -1.0, 1e-12);
}

TEST(Flux, BasisFieldsHaveUnitOrZeroFlux) {
    const auto& k = small().d.fine();
    for (int f = 0; f < k.num_faces(); ++f) {
        auto u = FaceCoefficientField::zero(k.num_faces());
        u.coeffs(f) = 1.0;
        const double flux = boundary_flux(k, u);
        if (k.is_boundary_face(f)) {
            const int t = k.face_tets(f)[0];
            EXPECT_EQ(flux, k.incidence({2, f}, {3, t}));
        } else {
            EXPECT_EQ(flux, 0.0);
        }
    }
}

TEST(Flux, CurlsAreFluxFree) {
    const auto& k = small().d.fine();
    for (int e = 0; e < k.num_edges(); e += 11) EXPECT_EQ(boundary_flux(k, curl_edge_field(k, e)), 0.0);
}

TEST(ResonanceWave, TrivialInitialData) {
    for (int sign : {1, -1}) {
        const auto w = toy_wave({1.0, 3.5, 0.0, -2.0}, sign);
        const auto [a, b] = w.weights(0.0);
        const auto [da, db] = w.weight_derivatives(0.0);
        EXPECT_EQ(a, 0.0);
        EXPECT_EQ(b, 0.0);
        EXPECT_EQ(da, 0.0);
        EXPECT_EQ(db, 0.0);
        EXPECT_EQ(w.coords(0.0).norm(), 0.0);
    }
}

TEST(ResonanceWave, DerivativesMatchFiniteDifferences) {
    const auto w = toy_wave({1.0, 3.5, 0.0, -2.0}, 1);
    const double h = 1e-6;
    for (double t : {0.3, 1.1, 2.7}) {
        const auto [ap, bp] = w.weights(t + h);
        const auto [am, bm] = w.weights(t - h);
        const auto [da, db] = w.weight_derivatives(t);
        EXPECT_NEAR((ap - am) / (2 * h), da, 1e-6 * (1 + std::abs(da)));
        EXPECT_NEAR((bp - bm) / (2 * h), db, 1e-6 * (1 + std::abs(db)));
    }
}

TEST(ResonanceWave, ContinuousAcrossZeroModes) {
    const double t = 0.8;
    const auto a = toy_wave({1e-9}, 1).weights(t);
    const auto b = toy_wave({0.0}, 1).weights(t);
    const auto c = toy_wave({-1e-9}, 1).weights(t);
    EXPECT_NEAR(a.first, b.first, 1e-8);
    EXPECT_NEAR(c.first, b.first, 1e-8);
    EXPECT_NEAR(a.second, b.second, 1e-8);
    EXPECT_NEAR(c.second, b.second, 1e-8);
}

TEST(ResonanceWave, SingleModeClosedForm) {
    // One mode with w_r^2 = q: a(t) = (cos wt - cos w_r t) / (q - w^2).
    const auto w = toy_wave({5.0}, 1);
    const double t = 0.9, q = 5.0, om = 2.0;
    const auto [a, b] = w.weights(t);
    EXPECT_NEAR(a, (std::cos(om * t) - std::cos(std::sqrt(q) * t)) / (q - om * om), 1e-14);
    EXPECT_NEAR(b, (om / std::sqrt(q) * std::sin(std::sqrt(q) * t) - std::sin(om * t)) / (q - om * om), 1e-14);
}

TEST(ResonanceWave, OnSmallSlab) {
    auto& s = small();
    const double f = 80.0;
    const auto modes = eigs_near(s.k.mat, s.m.mat, shift_for(f), 3);
    const auto [c1, c2] = assemble_forcing(s.d, default_wave(s.d.coarse(), f));
    const auto w = resonance_wave(f, modes, c1, c2, s.k.mat, s.m.mat, 1);
    // Particular solutions of -(w^2 M + K) c = C.
    const double om = 2 * M_PI * f;
    const Eigen::VectorXd r = -(om * om * (s.m.mat * w.c1) + s.k.mat * w.c1) - c1;
    EXPECT_LE(r.norm(), 1e-9 * c1.norm());
    const SystemBasis sys = coarse_basis(s.d);
    const auto obs = observation_points(s.d.fine(), {Vec3::UnitY()});
    for (const auto& v : evaluate(s.d.basis(), obs, sys.expand(w.coords(0.0)))) EXPECT_EQ(v.norm(), 0.0);
    EXPECT_THROW(resonance_wave(-1, modes, c1, c2, s.k.mat, s.m.mat), std::invalid_argument);
    EXPECT_THROW(resonance_wave(f, {}, c1, c2, s.k.mat, s.m.mat), std::invalid_argument);
}

TEST(Nodal, NestedAndScaleInvariant) {
    auto& s = small();
    const double f = 80.0;
    const auto modes = eigs_near(s.k.mat, s.m.mat, shift_for(f), 2);
    ForcingWave wave = default_wave(s.d.coarse(), f);
    const SystemBasis sys = coarse_basis(s.d);
    const auto obs = observation_points(s.d.fine(), {Vec3::UnitY()});
    std::string csv[2];
    for (int pass = 0; pass < 2; ++pass) {
        const auto [c1, c2] = assemble_forcing(s.d, wave);
        const auto w = resonance_wave(f, modes, c1, c2, s.k.mat, s.m.mat, 1);
        const auto samples = sample_norms(w, sys, s.d.basis(), obs, default_times(w.omega));
        ASSERT_EQ(samples.norms.rows(), obs.size());
        ASSERT_EQ(samples.norms.cols(), 10);
        std::vector<std::uint8_t> prev;
        for (double c : {0.8, 0.4, 0.04, 0.02, 0.01, 0.005, 0.0025}) {
            const auto r = nodal_points(samples, c);
            if (!prev.empty())
                for (int i = 0; i < obs.size(); ++i) EXPECT_LE(r.nodal[i], prev[i]);
            prev = r.nodal;
        }
        csv[pass] = nodal_csv(obs, samples, nodal_points(samples, 0.8));
        wave.amplitude *= 4.0;
    }
    EXPECT_EQ(csv[0], csv[1]);
    EXPECT_THROW(nodal_points(NormSamples{}, 0.0), std::invalid_argument);
}

TEST(Nodal, WorstTimeAndThreshold) {
    NormSamples s;
    s.times = {1, 2};
    s.norms.resize(3, 2);
    s.norms << 1, 5, 2, 6, 3, 10;
    s.max = s.norms.colwise().maxCoeff();
    s.min = s.norms.colwise().minCoeff();
    s.delta = s.max - s.min;
    EXPECT_EQ(s.worst_time(), 0);  // 3/1 > 10/5
    const auto r = nodal_points(s, 0.5);
    // Cuts: 1 + 0.5*2 = 2 and 5 + 0.5*5 = 7.5.
    EXPECT_EQ(r.nodal, (std::vector<std::uint8_t>{1, 1, 0}));
    EXPECT_EQ(r.nodal_per_time, (std::vector<int>{2, 2}));
    EXPECT_EQ(r.count(), 2);
}

TEST(Normalize, UnitMassNorm) {
    auto& s = small();
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(s.m.size(), -3, 1);
    const Eigen::VectorXd u = normalize_mass(c, s.m.mat);
    EXPECT_NEAR(u.dot(s.m.mat * u), 1.0, 1e-12);
    Eigen::Index i;
    u.cwiseAbs().maxCoeff(&i);
    EXPECT_GT(u(i), 0.0);
}

TEST(Basis, FineBasisExpandsThroughProlongation) {
    auto& s = small();
    const auto cm = assemble_boundary_constraints(s.d, s.w);
    const SystemBasis fb = fine_basis(s.d, cm);
    EXPECT_EQ(fb.size(), cm.reduced_dim());
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(fb.size(), 0, 1);
    const auto u = fb.expand(x);
    EXPECT_LE((s.d.layout().from_field(u) - cm.prolongation * x).norm(), 1e-14);
    const SystemBasis cb = coarse_basis(s.d);
    EXPECT_EQ(cb.size(), s.d.layout().size());
    EXPECT_EQ(cb.restrict(x.head(cb.size())), x.head(cb.size()));
}

TEST(Output, SvgAndTables) {
    ObservationPoints obs;
    obs.points = {Vec3(0, 0, 0), Vec3(1, 0, 1)};
    NodalReport r;
    r.nodal = {1, 0};
    const std::string svg = nodal_svg(obs, r, Vec3::UnitY());
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n'), 5);
    const std::vector<FluxRow> rows{{80, 79.9, "oscillatory", 1e-12, 0.001, -0.002, 6}};
    const std::string csv = flux_table_csv(rows);
    EXPECT_NE(csv.find("80,79.9,oscillatory"), std::string::npos);
    EXPECT_NE(flux_table_text("slab", "coarse", rows).find("basis coarse"), std::string::npos);
}
