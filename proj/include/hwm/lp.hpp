#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "hwm/grid.hpp"
#include "hwm/halfwave.hpp"

namespace hwm::lp {

// Smooth dyadic cutoff built from the exp(-1/x) mollifier. chi is supported
// in [1/2, 2], chi(1) = 1, and sum_k chi(x/2^k) = 1 for all x > 0 by
// telescoping against the lowpass profile:
//   lowpass(x) = 1 for x <= 1, 0 for x >= 2, smooth monotone in between
//   chi(x) = lowpass(x) - lowpass(2x)
//   sum_{k <= j} chi(x/2^k) = lowpass(x/2^j)
double chi(double x);
double lowpass(double x);

// Dyadic band range covering the nonzero spectrum of a grid.
struct DyadicPartition {
    int kmin = 0;
    int kmax = 0;
    static DyadicPartition cover(const GridSpec& g);
    int bands() const { return kmax - kmin + 1; }
};

// P_k: spectrum multiplied by chi(|xi|/2^k).
Field lp_project(const Field& f, int k);
// P_{<m}: multiplier lowpass(|xi|/2^{m-1}); keeps the zero mode.
Field lp_project_below(const Field& f, int m);

struct BesovResult {
    double value = 0.0;
    std::vector<double> per_band;      // 2^{ks} ||P_k f||_{L2}
    double tail_mass = 0.0;            // spectral mass outside the band range
    bool tail_warning = false;
};

// sum_k 2^{ks} ||P_k f||_{L2}
BesovResult besov_norm(const Field& f, double s, const DyadicPartition& part);
double besov_value(const Field& f, double s);

// ---------------------------------------------------------------------------
// Windowed space-time spectrum

// Hann-windowed DFT in t combined with the exact spatial transform. All
// space-time norms below refer to the windowed trajectory; the window is an
// unavoidable substitute for the infinite-time transform and its leakage is
// measured on known free waves (see modulation tests).
struct SpaceTimeSpectrum {
    GridSpec grid;
    int comps = 0;
    std::size_t frames = 0;
    double dt = 0.0;
    std::vector<double> window;  // per-frame Hann weights
    // coef[c * frames * total + m * total + i], convention
    // g(t_m, x) = sum_{tau,xi} coef e^{i(tau t_m + xi.x)}
    std::vector<cplx> coef;

    double tau(std::size_t m) const;
    std::size_t spatial() const { return grid.total(); }
    cplx& at(int c, std::size_t m, std::size_t i);
    cplx at(int c, std::size_t m, std::size_t i) const;
    double window_time() const { return dt * static_cast<double>(frames); }
};

SpaceTimeSpectrum spacetime_transform(const std::vector<Field>& frames, double dt);
// Reconstructs the windowed frames (window already applied).
std::vector<Field> spacetime_inverse(const SpaceTimeSpectrum& sts);

// Modulation bands in x = ||tau| - |xi||. The lowest band j = jmin is
// inclusive (multiplier lowpass(x/2^jmin)) so the cone set x = 0 is kept and
// the bands sum to one exactly.
struct ModulationBands {
    int jmin = 0;
    int jmax = 0;
    static ModulationBands cover(const SpaceTimeSpectrum& sts);
};

double modulation_multiplier(const ModulationBands& bands, int j, double dist);
SpaceTimeSpectrum modulation_project(const SpaceTimeSpectrum& sts, int j,
                                     const ModulationBands& bands);

// L2_{t,x} norm (windowed) of the coefficients scaled by weight(tau, |xi|);
// the spatial zero mode is dropped.
double weighted_l2(const SpaceTimeSpectrum& sts,
                   const std::function<double(double, double)>& weight);

enum class XsbAggregation { sup, sum };

// 2^{jb}-weighted modulation decomposition of |xi|^s-weighted L2 norms.
double xsb_norm(const SpaceTimeSpectrum& sts, double s, double b, XsbAggregation agg);

// ---------------------------------------------------------------------------
// Strichartz machinery

struct AdmissiblePair {
    double p = std::numeric_limits<double>::infinity();
    double q = 2.0;
    bool admissible(int n) const;
    // weight exponent of eq. the S norm: 1/p + n/q - 1
    double weight_exponent(int n) const;
};

// (inf,2) plus the saturating pairs for p = 4 and p = 2 where they exist.
std::vector<AdmissiblePair> default_pairs(int n);

// ||grad_{t,x} P_k u||_{L^p_t L^q_x}: spectral spatial gradients, centered
// time differences, composite trapezoid in t.
double strichartz_norm(const Trajectory& traj, const AdmissiblePair& pair, int k);

struct BandReport {
    int k = 0;
    double strichartz_sup = 0.0;  // sup over pairs, 2^{..k}-weighted
    double xsb_component = 0.0;
    double s_band = 0.0;          // S_k contribution
};

struct NormReport {
    std::vector<BandReport> bands;
    double s_norm = 0.0;
    double n_norm = 0.0;
    double besov = 0.0;
    double sigma_decay = 0.0;
};

// eq. S norm: per band, sup over admissible pairs of the weighted Strichartz
// norm plus the X^{n/2-1,1/2,inf} component of grad_{t,x} P_k u.
NormReport s_norm(const Trajectory& traj, const std::vector<AdmissiblePair>& pairs);

// N norm of a forcing trajectory: per band, the sum-space infimum
// approximated by a one-parameter modulation-threshold split.
double n_norm(const std::vector<Field>& forcing, double dt);
// Pure L1_t Hdot^{n/2-1} option (upper bound for the infimum by construction).
double n_norm_pure_l1h(const std::vector<Field>& forcing, double dt);

// ---------------------------------------------------------------------------
// Bilinear multiplier engine

struct MultiplierSymbol {
    // m(xi, eta); must satisfy m(-xi,-eta) = m(xi,eta) for real output
    std::function<double(const std::vector<double>&, const std::vector<double>&)> m;
    double gamma = 1.0;
};

// F(u,v)(x) = sum_{xi,eta} m(xi,eta) chi_{k1}(xi) uhat(xi) chi_{k2}(eta)
// vhat(eta) e^{ix.(xi+eta)}, direct double sum over retained band modes.
// Both inputs must be scalar fields. Throws if the pair count exceeds budget.
Field bilinear_multiplier(const MultiplierSymbol& sym, const Field& u, const Field& v,
                          int k1, int k2, std::size_t pair_budget = 20'000'000);

// Variant with arbitrary spectral masks in place of the chi bands.
Field bilinear_multiplier_masked(
    const MultiplierSymbol& sym, const Field& u, const Field& v,
    const std::function<double(double)>& mask_u,
    const std::function<double(double)>& mask_v, std::size_t pair_budget = 20'000'000);

// ---------------------------------------------------------------------------
// Identity probes

struct OrthoBand {
    int k = 0;
    double remainder_direct = 0.0;    // || P_k-bookkeeping remainder ||_inf
    double remainder_bilinear = 0.0;  // same, via the bilinear route
    double route_agreement = 0.0;     // || direct - bilinear ||_inf
    double symbol_bound = 0.0;        // measured sup of the 2^k m / |eta| symbol
};

struct OrthoReport {
    double global_defect = 0.0;       // band bookkeeping of u.u - |mean|^2
    double truncated_defect = 0.0;    // same with the band sum cut at width 3
    std::vector<OrthoBand> bands;
};

// Band-by-band evaluation of the u.u - p.p rearrangement and its frequency
// localized version. u is projected exactly to the sphere first.
OrthoReport orthogonality_check(const Field& u);

struct ProbeSample {
    unsigned seed = 0;
    double gamma = 1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct BilinearProbeReport {
    std::vector<ProbeSample> samples;
    double max_ratio = 0.0;
    double fitted_gamma_exponent = 0.0;
};

// Lemma-style product bound probe: Z/X/Y = (L2, L4, L4) on the lattice,
// random band-localized pairs, symbol scaled by gamma in {1, 0.1, 0.01}.
BilinearProbeReport bilinear_probe(const GridSpec& g, int k1, int k2, int samples,
                                   unsigned seed);

struct EnergyProbeSample {
    double lhs = 0.0;   // S norm of the trajectory
    double rhs = 0.0;   // data norm + N norm of the forcing
    double ratio = 0.0;
};

// Left and right side of the standard energy inequality on one trajectory;
// no pass/fail since the constant is unknown.
EnergyProbeSample energy_inequality_probe(const Trajectory& traj,
                                          const std::vector<Field>& forcing);

struct SigmaDecayReport {
    int center = 0;
    std::vector<double> band_mass;  // ||P_k N(u)||_{L2} per band
    double fitted_exponent = 0.0;   // decay rate in |k - center| above the peak
};

// Off-band leakage of the wave-maps nonlinearity for a band-localized input.
SigmaDecayReport sigma_decay_probe(const GridSpec& g, int k1, unsigned seed);

}  // namespace hwm::lp
