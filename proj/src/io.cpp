#include "hwm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "hwm/lp.hpp"
#include "hwm/wave_reform.hpp"

namespace hwm::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config: " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: " + v);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an integer: " + v);
    }
}

long Config::get_long(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + ": not a boolean: " + v);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::istringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": bad list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

std::vector<int> Config::get_ints(const std::string& key) const {
    std::vector<int> out;
    for (double d : get_doubles(key)) out.push_back(static_cast<int>(std::llround(d)));
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Datum generation

GridSpec grid_from_config(const Config& cfg) {
    const auto points = cfg.get_ints("grid.points");
    const auto lengths = cfg.get_doubles("grid.lengths");
    if (points.size() != lengths.size())
        throw ConfigError("grid.points and grid.lengths disagree on dimension");
    try {
        return GridSpec(points, lengths);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

DatumSpec datum_from_config(const Config& cfg) {
    DatumSpec d;
    if (cfg.has("datum.p")) {
        const auto p = cfg.get_doubles("datum.p");
        if (p.size() != 3) throw ConfigError("datum.p: needs 3 components");
        std::copy(p.begin(), p.end(), d.p.begin());
    }
    const double pn = std::sqrt(d.p[0] * d.p[0] + d.p[1] * d.p[1] + d.p[2] * d.p[2]);
    if (pn == 0.0) throw ConfigError("datum.p: zero vector");
    for (double& v : d.p) v /= pn;
    if (cfg.has("datum.center")) d.center = cfg.get_doubles("datum.center");
    d.radius = cfg.get_double("datum.radius", 1.5);
    d.amplitude = cfg.get_double("datum.amplitude", 0.05);
    d.amplitude2 = cfg.get_double("datum.amplitude2", 0.0);
    d.compatible = cfg.get_bool("datum.compatible", true);
    return d;
}

std::array<std::array<double, 3>, 2> tangent_frame(const std::array<double, 3>& p) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(p[i]) < std::abs(p[axis])) axis = i;
    std::array<double, 3> e1 = {0.0, 0.0, 0.0};
    e1[axis] = 1.0;
    const double dp = e1[0] * p[0] + e1[1] * p[1] + e1[2] * p[2];
    for (int i = 0; i < 3; ++i) e1[i] -= dp * p[i];
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double& v : e1) v /= n1;
    const std::array<double, 3> e2 = {p[1] * e1[2] - p[2] * e1[1],
                                      p[2] * e1[0] - p[0] * e1[2],
                                      p[0] * e1[1] - p[1] * e1[0]};
    return {e1, e2};
}

double bump_profile(double r, double radius) {
    const double s = r / radius;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

picard::WaveData generate_datum(const DatumSpec& spec, const GridSpec& grid) {
    const int n = grid.dim();
    std::vector<double> center = spec.center;
    if (center.empty())
        for (int d = 0; d < n; ++d) center.push_back(0.5 * grid.lengths[d]);
    if (static_cast<int>(center.size()) != n)
        throw ConfigError("datum.center: dimension mismatch");
    for (int d = 0; d < n; ++d)
        if (!(center[d] - spec.radius > 0.0 && center[d] + spec.radius < grid.lengths[d]))
            throw ConfigError("datum bump touches the box boundary");

    const auto frame = tangent_frame(spec.p);
    Field u0(grid, 3);
    const std::size_t S = grid.total();
    for (std::size_t i = 0; i < S; ++i) {
        // lattice coordinates of flat index i
        std::size_t rem = i;
        double r2 = 0.0;
        for (int d = n - 1; d >= 0; --d) {
            const int nd = grid.points[d];
            const int m = static_cast<int>(rem % static_cast<std::size_t>(nd));
            rem /= static_cast<std::size_t>(nd);
            const double x = grid.lengths[d] * m / nd;
            const double dx = x - center[d];
            r2 += dx * dx;
        }
        const double b = bump_profile(std::sqrt(r2), spec.radius);
        for (int c = 0; c < 3; ++c)
            u0.at(c, i) = spec.p[c] +
                          b * (spec.amplitude * frame[0][c] + spec.amplitude2 * frame[1][c]);
    }
    project_to_sphere(u0);

    picard::WaveData data;
    data.u1 = Field(grid, 3);
    if (spec.compatible) data.u1 = rhs_halfwave(u0);
    data.u0 = std::move(u0);
    return data;
}

// ---------------------------------------------------------------------------
// Snapshot format

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("snapshot: truncated file");
    return v;
}

}  // namespace

void write_snapshot(const fs::path& file, const Field& f) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot: " + file.string());
    out.write("HWM1", 4);
    const GridSpec& g = f.grid();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    for (int np : g.points) put<std::uint32_t>(out, static_cast<std::uint32_t>(np));
    for (double l : g.lengths) put<double>(out, l);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.components()));
    for (int c = 0; c < f.components(); ++c) {
        auto span = f.comp(c);
        out.write(reinterpret_cast<const char*>(span.data()),
                  static_cast<std::streamsize>(span.size() * sizeof(double)));
    }
}

Field read_snapshot(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read snapshot: " + file.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HWM1", 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + file.string());
    const auto n = take<std::uint32_t>(in);
    std::vector<int> points;
    for (std::uint32_t d = 0; d < n; ++d)
        points.push_back(static_cast<int>(take<std::uint32_t>(in)));
    std::vector<double> lengths;
    for (std::uint32_t d = 0; d < n; ++d) lengths.push_back(take<double>(in));
    const auto comps = take<std::uint32_t>(in);
    Field f(GridSpec(points, lengths), static_cast<int>(comps));
    for (std::uint32_t c = 0; c < comps; ++c) {
        auto span = f.comp(static_cast<int>(c));
        in.read(reinterpret_cast<char*>(span.data()),
                static_cast<std::streamsize>(span.size() * sizeof(double)));
        if (!in) throw std::runtime_error("snapshot: truncated data");
    }
    return f;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const fs::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write csv: " + file.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << fmt17(row[i]);
        out << "\n";
    }
}

std::vector<std::vector<double>> read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read csv: " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {  // header
            first = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Run orchestration

namespace {

long effective_seed(const Config& cfg, const RunOptions& opt) {
    return opt.seed_override >= 0 ? opt.seed_override : cfg.get_long("seed", 1);
}

void write_manifest(const Config& cfg, const RunOptions& opt, const std::string& command) {
    Config copy = cfg;
    copy.set("seed", std::to_string(effective_seed(cfg, opt)));
    std::ofstream out(opt.out_dir / "manifest.txt");
    if (!out) throw std::runtime_error("cannot write manifest");
    out << "# hwm run manifest\n";
    out << "# version " << kVersion << "\n";
    out << "# command " << command << "\n";
    out << copy.serialize();
}

EvolutionParams evolve_params(const Config& cfg) {
    EvolutionParams p;
    p.dt = cfg.get_double("evolve.dt", 1e-3);
    p.steps = cfg.get_long("evolve.steps", 1000);
    p.project_each_step = cfg.get_bool("evolve.project_each_step", false);
    p.record_every = cfg.get_long("evolve.record_every", 10);
    p.orth_hard_threshold = cfg.get_double("evolve.orth_hard_threshold", 1e-3);
    p.norm_low = cfg.get_double("evolve.norm_low", 0.9);
    p.norm_high = cfg.get_double("evolve.norm_high", 1.1);
    if (!(p.dt > 0.0) || p.record_every < 1)
        throw ConfigError("evolve: dt must be positive and record_every >= 1");
    return p;
}

picard::IterationParams iterate_params(const Config& cfg) {
    picard::IterationParams p;
    p.T = cfg.get_double("iterate.T", 0.5);
    p.dt = cfg.get_double("iterate.dt", 1e-3);
    p.tol_outer = cfg.get_double("iterate.tol_outer", 1e-8);
    p.tol_inner = cfg.get_double("iterate.tol_inner", 1e-9);
    p.outer_cap = static_cast<int>(cfg.get_long("iterate.outer_cap", 15));
    p.inner_cap = static_cast<int>(cfg.get_long("iterate.inner_cap", 25));
    p.dealias = cfg.get_bool("iterate.dealias", true);
    return p;
}

std::string frame_name(const char* stem, std::size_t idx) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%05zu.hwm", stem, idx);
    return buf;
}

}  // namespace

int run_evolve(const Config& cfg, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    write_manifest(cfg, opt, "evolve");

    const GridSpec grid = grid_from_config(cfg);
    const DatumSpec dspec = datum_from_config(cfg);
    const picard::WaveData data = generate_datum(dspec, grid);
    const EvolutionParams params = evolve_params(cfg);

    State s0;
    s0.u = data.u0;
    const EvolveResult res = evolve(s0, params);

    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < res.traj.frames(); ++m)
        rows.push_back({res.traj.time(m), res.energy[m], res.max_constraint_violation[m],
                        res.max_rhs_dot_u[m], res.l2_change_from_initial[m]});
    write_csv(opt.out_dir / "diagnostics.csv",
              {"t", "energy", "max_constraint_violation", "max_rhs_dot_u",
               "l2_change_from_initial"},
              rows);
    for (std::size_t m = 0; m < res.traj.frames(); ++m) {
        write_snapshot(opt.out_dir / frame_name("frame_u", m), res.traj.u[m]);
        write_snapshot(opt.out_dir / frame_name("frame_ut", m), res.traj.ut[m]);
    }
    return res.status == RunStatus::ok ? kExitOk : kExitDiverged;
}

namespace {

Trajectory load_trajectory(const fs::path& run_dir) {
    const Config manifest = Config::load(run_dir / "manifest.txt");
    Trajectory traj;
    traj.dt = manifest.get_double("evolve.dt", 1e-3) *
              static_cast<double>(manifest.get_long("evolve.record_every", 10));
    for (std::size_t m = 0;; ++m) {
        const fs::path fu = run_dir / frame_name("frame_u", m);
        if (!fs::exists(fu)) break;
        traj.u.push_back(read_snapshot(fu));
        traj.ut.push_back(read_snapshot(run_dir / frame_name("frame_ut", m)));
    }
    if (traj.u.empty()) throw std::runtime_error("no snapshots in " + run_dir.string());
    return traj;
}

}  // namespace

int run_analyze(const Config& cfg, const RunOptions& opt, const fs::path& run_dir) {
    fs::create_directories(opt.out_dir);
    write_manifest(cfg, opt, "analyze");

    const Trajectory traj = load_trajectory(run_dir);
    const GridSpec grid = grid_from_config(cfg);
    if (!(traj.u.front().grid() == grid))
        throw ConfigError("snapshot grid does not match config grid");
    const int n = grid.dim();

    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < traj.frames(); ++m) {
        const Field x = x_residual(traj.u[m], traj.ut[m]);
        rows.push_back({traj.time(m), energy(traj.u[m]), l2_norm(x), tilde_energy(x, n)});
    }
    write_csv(opt.out_dir / "analysis.csv", {"t", "energy", "x_l2", "tilde_e"}, rows);

    if (traj.frames() >= 8) {
        const lp::NormReport rep = lp::s_norm(traj, lp::default_pairs(n));
        std::ofstream out(opt.out_dir / "norms.csv");
        out << "band,quantity,value\n";
        for (const auto& b : rep.bands) {
            out << b.k << ",strichartz_sup," << fmt17(b.strichartz_sup) << "\n";
            out << b.k << ",xsb_component," << fmt17(b.xsb_component) << "\n";
            out << b.k << ",s_band," << fmt17(b.s_band) << "\n";
        }
        const double besov = lp::besov_value(traj.u.front(), n / 2.0);
        out << "aggregate,s_norm," << fmt17(rep.s_norm) << "\n";
        out << "aggregate,besov_initial," << fmt17(besov) << "\n";
    }

    if (traj.frames() >= 5) {
        std::ofstream out(opt.out_dir / "wave_residual.csv");
        out << "wave_residual_l2\n" << fmt17(wave_residual(traj)) << "\n";
    }
    return kExitOk;
}

int run_iterate(const Config& cfg, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    write_manifest(cfg, opt, "iterate");

    const GridSpec grid = grid_from_config(cfg);
    const DatumSpec dspec = datum_from_config(cfg);
    const picard::WaveData data = generate_datum(dspec, grid);
    const picard::IterationParams params = iterate_params(cfg);

    const picard::IterationState state = picard::halfwave_iterate(data, params);

    std::vector<std::vector<double>> rows;
    for (const auto& row : state.log)
        rows.push_back({static_cast<double>(row.j), static_cast<double>(row.i),
                        row.diff_norm, row.ratio, row.sphere_defect, row.x_residual});
    write_csv(opt.out_dir / "iteration.csv",
              {"j", "i", "diff_norm", "ratio", "sphere_defect", "x_residual"}, rows);

    if (!state.current.u.empty()) {
        write_snapshot(opt.out_dir / "final_u.hwm", state.current.u.back());
        write_snapshot(opt.out_dir / "final_ut.hwm", state.current.ut.back());
    }
    if (state.status == picard::IterStatus::non_contraction) return kExitNonContraction;
    return kExitOk;
}

int run_probe(const Config& cfg, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    write_manifest(cfg, opt, "probe");

    const GridSpec grid = grid_from_config(cfg);
    const long seed = effective_seed(cfg, opt);
    const int samples = static_cast<int>(cfg.get_long("probe.samples", 20));
    const int k1 = static_cast<int>(cfg.get_long("probe.k1", 4));
    const int k2 = static_cast<int>(cfg.get_long("probe.k2", 3));

    const lp::BilinearProbeReport bil =
        lp::bilinear_probe(grid, k1, k2, samples, static_cast<unsigned>(seed));
    std::vector<std::vector<double>> rows;
    for (const auto& s : bil.samples)
        rows.push_back({static_cast<double>(s.seed), s.gamma, s.lhs, s.rhs, s.ratio});
    write_csv(opt.out_dir / "bilinear_probe.csv", {"seed", "gamma", "lhs", "rhs", "ratio"},
              rows);
    {
        std::ofstream out(opt.out_dir / "bilinear_summary.csv");
        out << "max_ratio,fitted_gamma_exponent\n"
            << fmt17(bil.max_ratio) << "," << fmt17(bil.fitted_gamma_exponent) << "\n";
    }

    // energy inequality ensemble: free waves and randomly forced solutions
    std::mt19937_64 rng(static_cast<unsigned long>(seed));
    std::normal_distribution<double> dist(0.0, 1.0);
    const long steps = cfg.get_long("probe.steps", 64);
    const double dt = cfg.get_double("probe.dt", 1e-2);
    std::vector<std::vector<double>> energy_rows;
    for (int trial = 0; trial < samples; ++trial) {
        picard::WaveData data;
        data.u0 = Field(grid, 3);
        data.u1 = Field(grid, 3);
        Field raw(grid, 3);
        for (double& v : raw.raw()) v = dist(rng);
        data.u0 = lp::lp_project(raw, k1);
        const bool forced = trial % 2 == 1;
        std::vector<Field> forcing(static_cast<std::size_t>(steps) + 1, Field(grid, 3));
        if (forced)
            for (auto& f : forcing) {
                Field fr(grid, 3);
                for (double& v : fr.raw()) v = dist(rng);
                f = lp::lp_project(fr, k2);
            }
        const Trajectory traj =
            picard::linear_wave_solve(data, forced ? &forcing : nullptr, dt, steps);
        const lp::EnergyProbeSample s =
            lp::energy_inequality_probe(traj, forced ? forcing : std::vector<Field>());
        energy_rows.push_back({static_cast<double>(trial), s.lhs, s.rhs, s.ratio});
    }
    write_csv(opt.out_dir / "energy_probe.csv", {"seed", "lhs", "rhs", "ratio"},
              energy_rows);

    const lp::SigmaDecayReport sig =
        lp::sigma_decay_probe(grid, k1, static_cast<unsigned>(seed));
    std::vector<std::vector<double>> sig_rows;
    for (std::size_t i = 0; i < sig.band_mass.size(); ++i)
        sig_rows.push_back({static_cast<double>(i), sig.band_mass[i]});
    write_csv(opt.out_dir / "sigma_bands.csv", {"band_index", "mass"}, sig_rows);
    {
        std::ofstream out(opt.out_dir / "sigma_summary.csv");
        out << "center,fitted_exponent\n"
            << sig.center << "," << fmt17(sig.fitted_exponent) << "\n";
    }
    return kExitOk;
}

int run_identities(const Config& cfg, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    write_manifest(cfg, opt, "identities");

    const GridSpec grid = grid_from_config(cfg);
    const DatumSpec dspec = datum_from_config(cfg);
    const picard::WaveData data = generate_datum(dspec, grid);

    const IdentityReport idr = check_derivation_identities(
        data.u0, static_cast<unsigned>(effective_seed(cfg, opt)));
    const lp::OrthoReport orth = lp::orthogonality_check(data.u0);
    const Field x = x_residual(data.u0, data.u1);

    write_csv(opt.out_dir / "identities.csv",
              {"graph_identity_defect", "dt_dot_identity_defect", "ortho_global_defect",
               "x_l2", "tilde_e"},
              {{idr.graph_identity_defect, idr.dt_dot_identity_defect, orth.global_defect,
                l2_norm(x), tilde_energy(x, grid.dim())}});
    write_csv(opt.out_dir / "triple_product.csv", {"triple_product_defect"},
              {{idr.triple_product_defect}});

    std::vector<std::vector<double>> band_rows;
    for (const auto& b : orth.bands)
        band_rows.push_back({static_cast<double>(b.k), b.remainder_direct,
                             b.remainder_bilinear, b.route_agreement, b.symbol_bound});
    write_csv(opt.out_dir / "ortho_bands.csv",
              {"k", "remainder_direct", "remainder_bilinear", "route_agreement",
               "symbol_bound"},
              band_rows);
    return kExitOk;
}

}  // namespace hwm::io
