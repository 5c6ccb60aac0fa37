#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hwm/grid.hpp"
#include "hwm/halfwave.hpp"
#include "hwm/picard.hpp"

namespace hwm::io {

inline constexpr const char* kVersion = "0.1.0";

// Flat key-value config with dotted section names. Lines are `key = value`;
// `#` starts a comment. Values round-trip losslessly (stored verbatim).
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::filesystem::path& file);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    std::string serialize() const;

private:
    std::map<std::string, std::string> values_;
};

// Thrown on missing/invalid keys; carries the key path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DatumSpec {
    std::array<double, 3> p = {0.0, 0.0, 1.0};
    std::vector<double> center;
    double radius = 1.5;
    double amplitude = 0.05;   // tangent direction 1
    double amplitude2 = 0.0;   // tangent direction 2
    bool compatible = true;    // u1 = u0 x (-Lap)^{1/2} u0
};

GridSpec grid_from_config(const Config& cfg);
DatumSpec datum_from_config(const Config& cfg);

// Deterministic tangent frame completing p: the axis of smallest |p|
// component, Gram-Schmidt'ed against p, then the cross product.
std::array<std::array<double, 3>, 2> tangent_frame(const std::array<double, 3>& p);

// Smooth compactly supported bump profile, 1 at the center, 0 outside radius.
double bump_profile(double r, double radius);

picard::WaveData generate_datum(const DatumSpec& spec, const GridSpec& grid);

// Binary snapshot: magic "HWM1", u32 n, u32 N_1..N_n, f64 L_1..L_n,
// u32 component count, then f64 component arrays in row-major lattice order.
void write_snapshot(const std::filesystem::path& file, const Field& f);
Field read_snapshot(const std::filesystem::path& file);

// CSV with 17 significant digits so doubles round-trip exactly.
void write_csv(const std::filesystem::path& file,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::filesystem::path& file);

// Run orchestration. Every command reads one config and writes a manifest
// (config copy + effective seed + version) into the run directory; the
// manifest is itself a valid config that reproduces the run.
struct RunOptions {
    std::filesystem::path out_dir;
    long seed_override = -1;  // < 0: use the config seed
    bool quiet = false;
};

// exit codes per command contract
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitNonContraction = 4;

int run_evolve(const Config& cfg, const RunOptions& opt);
int run_analyze(const Config& cfg, const RunOptions& opt,
                const std::filesystem::path& run_dir);
int run_iterate(const Config& cfg, const RunOptions& opt);
int run_probe(const Config& cfg, const RunOptions& opt);
int run_identities(const Config& cfg, const RunOptions& opt);

}  // namespace hwm::io
