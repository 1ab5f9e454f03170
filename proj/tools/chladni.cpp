// Batch front-end: mesh, assemble, eigs, resonate, flux.
// Lengths on the command line are in centimeters, frequencies in Hz.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "chladni/assembly.hpp"
#include "chladni/material.hpp"
#include "chladni/mesh.hpp"
#include "chladni/solver.hpp"
#include "chladni/vibration.hpp"

namespace fs = std::filesystem;
using namespace chladni;

namespace {

constexpr double kCm = 0.01;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string slab;
    std::string cell = "1x0.5x1";
    std::string plate;
    std::string material = "engelmann-spruce";
    std::vector<double> freqs{80, 147, 222, 304, 349};
    std::string basis = "coarse";
    int modes = 1;
    std::vector<double> comega{0.8};
    std::string out;
    std::uint64_t seed = 12345;
    int threads = 1;
    double f0 = 1.0;
    std::string sign = "minus";
    double distance = 62.0;  // cm
    bool write_matrices = true;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string p;
    while (std::getline(in, p, sep)) parts.push_back(p);
    return parts;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid " + what + " '" + s + "'");
    }
}

std::array<int, 3> parse_counts(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 3) throw UsageError("slab must look like NXxNYxNZ, got '" + s + "'");
    std::array<int, 3> n{};
    for (int i = 0; i < 3; ++i) {
        const double v = parse_number(parts[i], "block count");
        if (v < 1 || v != std::floor(v) || v > 1e6) throw UsageError("block counts must be positive integers, got '" + s + "'");
        n[i] = static_cast<int>(v);
    }
    return n;
}

std::array<double, 3> parse_cell(std::string s) {
    if (s.size() > 2 && s.substr(s.size() - 2) == "cm") s.resize(s.size() - 2);
    const auto parts = split(s, 'x');
    if (parts.size() != 3) throw UsageError("cell must look like AxBxC (cm), got '" + s + "'");
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i) {
        c[i] = parse_number(parts[i], "cell size");
        if (!(c[i] > 0)) throw UsageError("cell sizes must be positive");
    }
    return c;
}

// Plate file: {"nx", "nz", "cell_cm", "layers", "mask", "thickness_cm",
// "elevation_cm"}; arrays row-major with index i*nz + k.
HeightfieldPlate read_plate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read plate file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        HeightfieldPlate p;
        p.nx = j.at("nx").get<int>();
        p.nz = j.at("nz").get<int>();
        p.cell = j.at("cell_cm").get<double>() * kCm;
        p.layers = j.value("layers", 2);
        p.mask = j.at("mask").get<std::vector<std::uint8_t>>();
        for (double t : j.at("thickness_cm").get<std::vector<double>>()) p.thickness.push_back(t * kCm);
        const auto elev = j.value("elevation_cm", std::vector<double>(p.mask.size(), 0.0));
        for (double e : elev) p.elevation.push_back(e * kCm);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed plate file '" + path + "': " + e.what());
    }
}

std::string body_name(const RunConfig& c) {
    return c.plate.empty() ? "slab" : fs::path(c.plate).stem().string();
}

std::string hz_label(double f) {
    std::ostringstream s;
    s << std::setprecision(10) << f;
    return s.str();
}

std::string prefix(const RunConfig& c, double f) {
    return body_name(c) + "_" + c.basis + "_" + hz_label(f) + "Hz";
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// Checks everything that does not need the discretization.
void validate(RunConfig& c, bool needs_freqs) {
    if (c.slab.empty() == c.plate.empty()) throw UsageError("exactly one of --slab or --plate is required");
    if (!c.slab.empty()) {
        parse_counts(c.slab);
        parse_cell(c.cell);
    }
    if (!c.plate.empty()) read_plate(c.plate);
    if (needs_freqs) {
        if (c.freqs.empty()) throw UsageError("no frequencies given");
        for (double f : c.freqs)
            if (!(f > 0) || !std::isfinite(f)) throw UsageError("frequencies must be positive");
    }
    if (c.basis != "coarse" && c.basis != "fine") throw UsageError("--basis must be coarse or fine");
    if (c.modes < 1) throw UsageError("--modes must be at least 1");
    for (double w : c.comega)
        if (!(w > 0 && w <= 1)) throw UsageError("--comega values must lie in (0, 1]");
    if (c.sign != "minus" && c.sign != "plus") throw UsageError("--sign must be minus or plus");
    if (!(c.f0 > 0) || !std::isfinite(c.f0)) throw UsageError("--f0 must be positive");
    if (!(c.distance > 0)) throw UsageError("--distance must be positive");
    if (c.threads < 1) throw UsageError("--threads must be at least 1");
    try {
        load_material(c.material);
    } catch (const std::exception& e) {
        throw UsageError(std::string("material: ") + e.what());
    }
    if (c.out.empty()) {
        const char* env = std::getenv("CHLADNI_OUT");
        c.out = env && *env ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (!fs::is_directory(c.out)) throw UsageError("cannot create output directory '" + c.out + "'");
}

SimplicialComplex3 build_body(const RunConfig& c) {
    if (!c.plate.empty()) return build_heightfield_plate(read_plate(c.plate));
    const auto n = parse_counts(c.slab);
    const auto s = parse_cell(c.cell);
    return build_slab(n[0], n[1], n[2], s[0] * kCm, s[1] * kCm, s[2] * kCm);
}

std::string census_line(const std::string& name, const SimplicialComplex3& k) {
    std::ostringstream s;
    s << name << " V " << k.num_vertices() << " E " << k.num_edges() << " F " << k.num_faces() << " T "
      << k.num_tets() << " boundary_faces " << k.num_boundary_faces() << " euler " << k.euler_characteristic();
    return s.str();
}

// Assembled pencil on the requested basis.
struct Pipeline {
    std::unique_ptr<Discretization> d;
    ElasticTensor tensor;
    SparseSymMatrix mass, stiffness;
    ConstraintMap cmap;
    SparseSymMatrix mass_red, stiffness_red;
    bool reduced = false;

    const SparseMatrix& k(bool fine) const { return fine ? stiffness_red.mat : stiffness.mat; }
    const SparseMatrix& m(bool fine) const { return fine ? mass_red.mat : mass.mat; }
    SystemBasis basis(bool fine) const { return fine ? fine_basis(*d, cmap) : coarse_basis(*d); }
};

Pipeline build_pipeline(const RunConfig& c, bool with_constraints) {
    Pipeline p;
    p.d = std::make_unique<Discretization>(build_body(c));
    const MaterialPreset mat = load_material(c.material);
    p.tensor = from_engineering(mat.constants, mat.density);
    p.mass = assemble_mass(*p.d, mat.density);
    p.stiffness = assemble_stiffness(*p.d, p.tensor);
    if (with_constraints) {
        p.cmap = assemble_boundary_constraints(*p.d, p.tensor);
        std::tie(p.mass_red, p.stiffness_red) = reduce_system(p.mass, p.stiffness, p.cmap);
        p.reduced = true;
    }
    return p;
}

LanczosOptions lanczos_options(const RunConfig& c) {
    LanczosOptions o;
    o.seed = c.seed;
    return o;
}

std::string eig_table_header() {
    std::ostringstream s;
    s << std::setw(8) << "f" << std::setw(18) << "f_r" << std::setw(13) << "kind" << std::setw(18) << "lambda"
      << std::setw(12) << "residual" << std::setw(16) << "flux_t0" << '\n';
    return s.str();
}

std::string eig_table_row(double f, const EigenPair& p, double flux) {
    const Frequency fr = frequency_of(p.lambda);
    std::ostringstream s;
    s << std::setw(8) << hz_label(f) << std::setw(18) << std::fixed << std::setprecision(8) << fr.hz
      << std::defaultfloat << std::setw(13) << to_string(fr.kind) << std::setw(18) << std::setprecision(9) << p.lambda
      << std::setw(12) << std::setprecision(3) << std::scientific << p.residual << std::defaultfloat << std::setw(16)
      << std::fixed << std::setprecision(10) << flux << std::defaultfloat << '\n';
    return s.str();
}

int cmd_mesh(RunConfig& c) {
    validate(c, false);
    const SimplicialComplex3 k = build_body(c);
    const BarycentricSubdivision sub = barycentric_subdivision(k);
    const std::string census = census_line("K", k) + "\n" + census_line("K'", sub.fine) + "\n";
    const fs::path dir(c.out);
    write_file(dir / (body_name(c) + "_mesh.json"), mesh_to_json(k));
    write_file(dir / (body_name(c) + "_census.txt"), census);
    std::cout << census;
    return 0;
}

int cmd_assemble(RunConfig& c) {
    validate(c, false);
    Pipeline p = build_pipeline(c, true);
    const Discretization& d = *p.d;
    const fs::path dir(c.out);
    const std::string body = body_name(c);
    if (c.write_matrices) {
        write_file(dir / (body + "_I.mtx"), to_matrix_market(p.mass.mat));
        write_file(dir / (body + "_K.mtx"), to_matrix_market(p.stiffness.mat));
        write_file(dir / (body + "_I_red.mtx"), to_matrix_market(p.mass_red.mat));
        write_file(dir / (body + "_K_red.mtx"), to_matrix_market(p.stiffness_red.mat));
        write_file(dir / (body + "_C.mtx"), to_matrix_market(p.cmap.c));
    }
    std::ostringstream s;
    s << std::setprecision(6);
    s << census_line("K", d.coarse()) << '\n' << census_line("K'", d.fine()) << '\n';
    s << "dofs " << d.layout().size() << " interior " << d.layout().num_interior << " boundary "
      << d.layout().num_boundary() << '\n';
    s << "subsystems " << p.cmap.faces.size() << " rank2 " << p.cmap.rank_count(2) << " rank1 "
      << p.cmap.rank_count(1) << " rank0 " << p.cmap.rank_count(0) << " null_rows " << p.cmap.null_rows << '\n';
    s << "dim_div_b " << div_b_dimension(d, p.cmap) << " reduced_size " << p.cmap.reduced_dim() << '\n';
    s << "asymmetry K " << p.stiffness.asymmetry() / p.stiffness.norm_inf() << " I "
      << p.mass.asymmetry() / p.mass.norm_inf() << " K_red " << p.stiffness_red.asymmetry() / p.stiffness_red.norm_inf()
      << " I_red " << p.mass_red.asymmetry() / p.mass_red.norm_inf() << '\n';
    s << "boundary_offdiagonals K " << boundary_block_offdiagonals(p.stiffness, d.layout()) << " I "
      << boundary_block_offdiagonals(p.mass, d.layout()) << '\n';
    s << "reduced_row_census K_red " << reduced_boundary_row_census(p.stiffness_red, d, p.cmap) << " I_red "
      << reduced_boundary_row_census(p.mass_red, d, p.cmap) << '\n';
    write_file(dir / (body + "_assemble.txt"), s.str());
    std::cout << s.str();
    return 0;
}

int cmd_eigs(RunConfig& c) {
    validate(c, true);
    const bool fine = c.basis == "fine";
    Pipeline p = build_pipeline(c, fine);
    const SystemBasis sys = p.basis(fine);
    const fs::path dir(c.out);
    std::string table = "body " + body_name(c) + "  basis " + c.basis + '\n' + eig_table_header();
    std::vector<FluxRow> rows;
    for (double f : c.freqs) {
        const auto pairs = eigs_near(p.k(fine), p.m(fine), shift_for(f), c.modes, lanczos_options(c));
        std::ostringstream modes;
        modes << std::setprecision(17) << "# lambda";
        for (const auto& e : pairs) modes << ',' << e.lambda;
        modes << "\n# f_r";
        for (const auto& e : pairs) modes << ',' << frequency_of(e.lambda).hz;
        modes << '\n';
        for (int i = 0; i < sys.size(); ++i) {
            for (size_t j = 0; j < pairs.size(); ++j) modes << (j ? "," : "") << pairs[j].vector(i);
            modes << '\n';
        }
        write_file(dir / (prefix(c, f) + "_modes.csv"), modes.str());
        for (const auto& e : pairs) {
            table += eig_table_row(f, e, boundary_flux(p.d->fine(), sys.expand(e.vector)));
        }
        const EigenPair& e = pairs.front();
        const Frequency fr = frequency_of(e.lambda);
        rows.push_back({f, fr.hz, to_string(fr.kind), e.residual, boundary_flux(p.d->fine(), sys.expand(e.vector)), 0.0, 0});
    }
    write_file(dir / (body_name(c) + "_" + c.basis + "_eigs.txt"), table);
    write_file(dir / (body_name(c) + "_" + c.basis + "_eigs.csv"), flux_table_csv(rows));
    std::cout << table;
    return 0;
}

struct ResonanceResult {
    FluxRow row;
    std::vector<int> nodal_counts;
};

ResonanceResult resonate_one(const RunConfig& c, const Pipeline& p, bool fine, double f, bool write) {
    const Discretization& d = *p.d;
    const SystemBasis sys = p.basis(fine);
    const auto pairs = eigs_near(p.k(fine), p.m(fine), shift_for(f), c.modes, lanczos_options(c));

    // The wave is linear in F0 and every report is normalized, so the
    // analysis runs on unit amplitude and F0 only scales the forcing file.
    ForcingWave wave = default_wave(d.coarse(), f, c.distance * kCm);
    wave.sign = c.sign == "minus" ? 1 : -1;
    const auto [c1, c2] = assemble_forcing(d, wave);
    const ResonanceWave rw =
        resonance_wave(f, pairs, sys.restrict(c1), sys.restrict(c2), p.k(fine), p.m(fine), wave.sign, true);

    const ObservationPoints obs = observation_points(d.fine(), {wave.direction});
    const NormSamples samples = sample_norms(rw, sys, d.basis(), obs, default_times(rw.omega));
    const int worst = samples.worst_time();
    const Eigen::VectorXd at_worst = normalize_mass(rw.coords(samples.times[worst]), p.m(fine));

    ResonanceResult res;
    const EigenPair& e = pairs.front();
    const Frequency fr = frequency_of(e.lambda);
    res.row = {f,
               fr.hz,
               to_string(fr.kind),
               e.residual,
               boundary_flux(d.fine(), sys.expand(e.vector)),
               boundary_flux(d.fine(), sys.expand(at_worst)),
               worst};

    const fs::path dir(c.out);
    const std::string base = prefix(c, f);
    if (write) {
        std::ostringstream forcing;
        forcing << std::setprecision(17) << "c1,c2\n";
        for (int i = 0; i < c1.size(); ++i) forcing << c.f0 * c1(i) << ',' << c.f0 * c2(i) << '\n';
        write_file(dir / (base + "_forcing.csv"), forcing.str());
    }
    for (double w : c.comega) {
        const NodalReport r = nodal_points(samples, w);
        res.nodal_counts.push_back(r.count());
        if (!write) continue;
        const std::string tag = base + "_c" + hz_label(w);
        write_file(dir / (tag + "_nodal.csv"), nodal_csv(obs, samples, r));
        write_file(dir / (tag + "_nodal.svg"), nodal_svg(obs, r, wave.direction));
    }
    return res;
}

int cmd_resonate(RunConfig& c) {
    validate(c, true);
    const bool fine = c.basis == "fine";
    Pipeline p = build_pipeline(c, fine);
    std::vector<FluxRow> rows;
    std::ostringstream log;
    for (double f : c.freqs) {
        const ResonanceResult r = resonate_one(c, p, fine, f, true);
        rows.push_back(r.row);
        log << "f " << hz_label(f) << " nodal";
        for (size_t i = 0; i < c.comega.size(); ++i) log << " c" << hz_label(c.comega[i]) << "=" << r.nodal_counts[i];
        log << '\n';
    }
    const fs::path dir(c.out);
    const std::string table = flux_table_text(body_name(c), c.basis, rows);
    write_file(dir / (body_name(c) + "_" + c.basis + "_resonance.txt"), table + log.str());
    write_file(dir / (body_name(c) + "_" + c.basis + "_resonance.csv"), flux_table_csv(rows));
    std::cout << table << log.str();
    return 0;
}

int cmd_flux(RunConfig& c) {
    validate(c, true);
    Pipeline p = build_pipeline(c, true);
    const fs::path dir(c.out);
    std::string report;
    for (const bool fine : {false, true}) {
        RunConfig cc = c;
        cc.basis = fine ? "fine" : "coarse";
        std::vector<FluxRow> rows;
        for (double f : c.freqs) rows.push_back(resonate_one(cc, p, fine, f, false).row);
        report += flux_table_text(body_name(c), cc.basis, rows) + '\n';
        write_file(dir / (body_name(c) + "_" + cc.basis + "_flux.csv"), flux_table_csv(rows));
    }
    write_file(dir / (body_name(c) + "_flux.txt"), report);
    std::cout << report;
    return 0;
}

void add_body_options(CLI::App* app, RunConfig& c) {
    app->add_option("--slab", c.slab, "block counts NXxNYxNZ");
    app->add_option("--cell", c.cell, "block size in cm, AxBxC");
    app->add_option("--plate", c.plate, "height-field plate JSON");
    app->add_option("--material", c.material, "preset name or JSON file");
    app->add_option("--out", c.out, "output directory (default $CHLADNI_OUT or .)");
    app->add_option("--threads", c.threads, "thread count");
}

void add_solve_options(CLI::App* app, RunConfig& c) {
    app->add_option("--freqs", c.freqs, "drive frequencies in Hz")->delimiter(',');
    app->add_option("--basis", c.basis, "coarse or fine");
    app->add_option("--modes", c.modes, "eigenpairs per frequency");
    app->add_option("--seed", c.seed, "Lanczos start vector seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Whitney face-field vibration analysis of orthotropic plates");
    app.require_subcommand(1);
    RunConfig config;

    auto* mesh = app.add_subcommand("mesh", "build K and K', write mesh JSON and census");
    add_body_options(mesh, config);
    auto* assemble = app.add_subcommand("assemble", "assemble I, K and the traction constraints");
    add_body_options(assemble, config);
    assemble->add_flag("!--no-matrices", config.write_matrices, "skip Matrix Market output");
    auto* eigs = app.add_subcommand("eigs", "eigenpairs nearest each frequency");
    add_body_options(eigs, config);
    add_solve_options(eigs, config);
    auto* resonate = app.add_subcommand("resonate", "resonance waves and nodal patterns");
    add_body_options(resonate, config);
    add_solve_options(resonate, config);
    auto* flux = app.add_subcommand("flux", "coarse and fine flux tables");
    add_body_options(flux, config);
    add_solve_options(flux, config);
    for (auto* sub : {resonate, flux}) {
        sub->add_option("--comega", config.comega, "nodal thresholds")->delimiter(',');
        sub->add_option("--f0", config.f0, "forcing amplitude N/m^3");
        sub->add_option("--sign", config.sign, "minus or plus branch");
        sub->add_option("--distance", config.distance, "source distance in cm");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    Eigen::setNbThreads(config.threads);
    try {
        if (*mesh) return cmd_mesh(config);
        if (*assemble) return cmd_assemble(config);
        if (*eigs) return cmd_eigs(config);
        if (*resonate) return cmd_resonate(config);
        if (*flux) return cmd_flux(config);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}
