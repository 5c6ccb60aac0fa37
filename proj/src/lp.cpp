#include "hwm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hwm::lp {

namespace {

double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// smooth step: 0 for t <= 0, 1 for t >= 1
double smooth_step(double t) {
    const double a = mollifier(t);
    const double b = mollifier(1.0 - t);
    return a / (a + b);
}

}  // namespace

double lowpass(double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    return smooth_step(2.0 - x);
}

double chi(double x) { return lowpass(x) - lowpass(2.0 * x); }

DyadicPartition DyadicPartition::cover(const GridSpec& g) {
    DyadicPartition p;
    p.kmin = static_cast<int>(std::floor(std::log2(g.min_freq()))) - 1;
    p.kmax = static_cast<int>(std::ceil(std::log2(g.max_freq()))) + 1;
    return p;
}

Field lp_project(const Field& f, int k) {
    const double scale = std::pow(2.0, -k);
    Spectrum sp = forward(f);
    Spectrum mod = apply_radial_multiplier(sp, [scale](double x) { return chi(x * scale); });
    return inverse(mod);
}

Field lp_project_below(const Field& f, int m) {
    const double scale = std::pow(2.0, -(m - 1));
    Spectrum sp = forward(f);
    Spectrum mod =
        apply_radial_multiplier(sp, [scale](double x) { return lowpass(x * scale); });
    return inverse(mod);
}

BesovResult besov_norm(const Field& f, double s, const DyadicPartition& part) {
    BesovResult res;
    Field covered(f.grid(), f.components());
    for (int k = part.kmin; k <= part.kmax; ++k) {
        Field pk = lp_project(f, k);
        const double band = std::pow(2.0, s * k) * l2_norm(pk);
        res.per_band.push_back(band);
        res.value += band;
        axpy(covered, 1.0, pk);
    }
    // mass outside the covered range, excluding the mean
    Spectrum sp = forward(sub(f, covered));
    double tail = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        if (freq_norm(sp.grid(), i) == 0.0) continue;
        for (int c = 0; c < sp.components(); ++c) tail += std::norm(sp.at(c, i));
    }
    res.tail_mass = std::sqrt(tail * f.grid().box_volume());
    res.tail_warning = res.tail_mass > 1e-12 * (1.0 + res.value);
    return res;
}

double besov_value(const Field& f, double s) {
    return besov_norm(f, s, DyadicPartition::cover(f.grid())).value;
}

// ---------------------------------------------------------------------------

double SpaceTimeSpectrum::tau(std::size_t m) const {
    const int M = static_cast<int>(frames);
    int a = static_cast<int>(m);
    if (a > M / 2) a -= M;
    return 2.0 * 3.14159265358979323846 * a / (dt * static_cast<double>(M));
}

cplx& SpaceTimeSpectrum::at(int c, std::size_t m, std::size_t i) {
    return coef[(static_cast<std::size_t>(c) * frames + m) * spatial() + i];
}
cplx SpaceTimeSpectrum::at(int c, std::size_t m, std::size_t i) const {
    return coef[(static_cast<std::size_t>(c) * frames + m) * spatial() + i];
}

SpaceTimeSpectrum spacetime_transform(const std::vector<Field>& frames, double dt) {
    if (frames.size() < 8)
        throw std::invalid_argument("spacetime_transform: window too short (< 8 frames)");
    SpaceTimeSpectrum sts;
    sts.grid = frames.front().grid();
    sts.comps = frames.front().components();
    sts.frames = frames.size();
    sts.dt = dt;
    const std::size_t M = sts.frames;
    const std::size_t S = sts.spatial();

    sts.window.resize(M);
    for (std::size_t m = 0; m < M; ++m)
        sts.window[m] =
            0.5 * (1.0 - std::cos(2.0 * 3.14159265358979323846 * m / static_cast<double>(M)));

    sts.coef.assign(static_cast<std::size_t>(sts.comps) * M * S, cplx(0.0));
    // spatial transform per frame (windowed), then DFT in t
    for (std::size_t m = 0; m < M; ++m) {
        Spectrum sp = forward(frames[m]);
        for (int c = 0; c < sts.comps; ++c)
            for (std::size_t i = 0; i < S; ++i)
                sts.at(c, m, i) = sp.at(c, i) * sts.window[m];
    }
    std::vector<cplx> line(M);
    const std::vector<int> dims = {static_cast<int>(M)};
    for (int c = 0; c < sts.comps; ++c)
        for (std::size_t i = 0; i < S; ++i) {
            for (std::size_t m = 0; m < M; ++m) line[m] = sts.at(c, m, i);
            fft_inplace(dims, line.data(), true);
            for (std::size_t m = 0; m < M; ++m)
                sts.at(c, m, i) = line[m] / static_cast<double>(M);
        }
    return sts;
}

std::vector<Field> spacetime_inverse(const SpaceTimeSpectrum& sts) {
    const std::size_t M = sts.frames;
    const std::size_t S = sts.spatial();
    std::vector<cplx> line(M);
    const std::vector<int> dims = {static_cast<int>(M)};
    std::vector<Spectrum> per_frame(M, Spectrum(sts.grid, sts.comps));
    for (int c = 0; c < sts.comps; ++c)
        for (std::size_t i = 0; i < S; ++i) {
            for (std::size_t m = 0; m < M; ++m) line[m] = sts.at(c, m, i);
            fft_inplace(dims, line.data(), false);
            for (std::size_t m = 0; m < M; ++m) per_frame[m].at(c, i) = line[m];
        }
    std::vector<Field> out;
    out.reserve(M);
    for (std::size_t m = 0; m < M; ++m) out.push_back(inverse(per_frame[m]));
    return out;
}

ModulationBands ModulationBands::cover(const SpaceTimeSpectrum& sts) {
    const double tau_max =
        3.14159265358979323846 / sts.dt;  // |tau| at the time Nyquist
    const double dist_max = tau_max + sts.grid.max_freq();
    const double tau_res =
        2.0 * 3.14159265358979323846 / (sts.dt * static_cast<double>(sts.frames));
    ModulationBands b;
    b.jmax = static_cast<int>(std::ceil(std::log2(dist_max)));
    b.jmin = static_cast<int>(std::floor(std::log2(tau_res))) - 1;
    if (b.jmin > b.jmax) b.jmin = b.jmax;
    return b;
}

double modulation_multiplier(const ModulationBands& bands, int j, double dist) {
    const double x = dist * std::pow(2.0, -j);
    return j == bands.jmin ? lowpass(x) : chi(x);
}

SpaceTimeSpectrum modulation_project(const SpaceTimeSpectrum& sts, int j,
                                     const ModulationBands& bands) {
    SpaceTimeSpectrum out = sts;
    const std::size_t M = sts.frames;
    const std::size_t S = sts.spatial();
    std::vector<double> xi(S);
    for (std::size_t i = 0; i < S; ++i) xi[i] = freq_norm(sts.grid, i);
    for (std::size_t m = 0; m < M; ++m) {
        const double at = std::abs(sts.tau(m));
        for (std::size_t i = 0; i < S; ++i) {
            const double mult = modulation_multiplier(bands, j, std::abs(at - xi[i]));
            for (int c = 0; c < sts.comps; ++c) out.at(c, m, i) *= mult;
        }
    }
    return out;
}

double weighted_l2(const SpaceTimeSpectrum& sts,
                   const std::function<double(double, double)>& weight) {
    const std::size_t M = sts.frames;
    const std::size_t S = sts.spatial();
    double acc = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
        const double xi = freq_norm(sts.grid, i);
        if (xi == 0.0) continue;
        for (std::size_t m = 0; m < M; ++m) {
            const double w = weight(sts.tau(m), xi);
            for (int c = 0; c < sts.comps; ++c)
                acc += w * w * std::norm(sts.at(c, m, i));
        }
    }
    return std::sqrt(acc * sts.window_time() * sts.grid.box_volume());
}

double xsb_norm(const SpaceTimeSpectrum& sts, double s, double b, XsbAggregation agg) {
    const ModulationBands bands = ModulationBands::cover(sts);
    double sup = 0.0, sum = 0.0;
    for (int j = bands.jmin; j <= bands.jmax; ++j) {
        const double val = weighted_l2(sts, [&](double tau, double xi) {
            return std::pow(xi, s) * modulation_multiplier(bands, j, std::abs(std::abs(tau) - xi));
        });
        const double weighted = std::pow(2.0, b * j) * val;
        sup = std::max(sup, weighted);
        sum += weighted;
    }
    return agg == XsbAggregation::sup ? sup : sum;
}

// ---------------------------------------------------------------------------

bool AdmissiblePair::admissible(int n) const {
    if (p < 2.0 || q < 2.0) return false;
    const double lhs = 1.0 / p + (n - 1) / (2.0 * q);
    return lhs <= (n - 1) / 4.0 + 1e-12;
}

double AdmissiblePair::weight_exponent(int n) const { return 1.0 / p + n / q - 1.0; }

std::vector<AdmissiblePair> default_pairs(int n) {
    std::vector<AdmissiblePair> out;
    out.push_back({std::numeric_limits<double>::infinity(), 2.0});
    for (double p : {4.0, 2.0}) {
        if (n < 2) continue;
        const double inv_q = 0.5 - 2.0 / (p * (n - 1));
        if (inv_q < 0.0) continue;
        const double q = inv_q == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_q;
        if (q < 2.0) continue;
        out.push_back({p, q});
    }
    return out;
}

namespace {

// pointwise magnitude of grad_{t,x} of a band projection, one field per frame
std::vector<Field> spacetime_gradient_magnitude(const std::vector<Field>& pk, double dt) {
    const std::size_t M = pk.size();
    std::vector<Field> mag;
    mag.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
        // centered time differences, one-sided at the ends
        Field tder = pk[m];
        if (m == 0) {
            tder = sub(pk[1], pk[0]);
            for (double& v : tder.raw()) v /= dt;
        } else if (m + 1 == M) {
            tder = sub(pk[M - 1], pk[M - 2]);
            for (double& v : tder.raw()) v /= dt;
        } else {
            tder = sub(pk[m + 1], pk[m - 1]);
            for (double& v : tder.raw()) v /= 2.0 * dt;
        }
        Field sq = dot(tder, tder);
        for (const Field& g : gradient(pk[m])) {
            Field gg = dot(g, g);
            axpy(sq, 1.0, gg);
        }
        Field out(pk[m].grid(), 1);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.at(0, i) = std::sqrt(sq.at(0, i));
        mag.push_back(std::move(out));
    }
    return mag;
}

double spatial_lq(const Field& mag, double q) {
    if (std::isinf(q)) return linf_norm(mag);
    double s = 0.0;
    for (double v : mag.raw()) s += std::pow(std::abs(v), q);
    return std::pow(s * mag.grid().cell_volume(), 1.0 / q);
}

double time_lp(const std::vector<double>& vals, double p, double dt) {
    if (std::isinf(p)) return *std::max_element(vals.begin(), vals.end());
    double s = 0.0;
    for (std::size_t m = 0; m < vals.size(); ++m) {
        const double w = (m == 0 || m + 1 == vals.size()) ? 0.5 : 1.0;
        s += w * std::pow(vals[m], p);
    }
    return std::pow(s * dt, 1.0 / p);
}

double mixed_norm(const std::vector<Field>& mag, const AdmissiblePair& pair, double dt) {
    std::vector<double> per_frame(mag.size());
    for (std::size_t m = 0; m < mag.size(); ++m) per_frame[m] = spatial_lq(mag[m], pair.q);
    return time_lp(per_frame, pair.p, dt);
}

}  // namespace

double strichartz_norm(const Trajectory& traj, const AdmissiblePair& pair, int k) {
    const int n = traj.u.front().grid().dim();
    if (!pair.admissible(n))
        throw std::invalid_argument("strichartz_norm: pair is not admissible");
    std::vector<Field> pk;
    pk.reserve(traj.frames());
    for (const Field& f : traj.u) pk.push_back(lp_project(f, k));
    return mixed_norm(spacetime_gradient_magnitude(pk, std::abs(traj.dt)), pair,
                      std::abs(traj.dt));
}

NormReport s_norm(const Trajectory& traj, const std::vector<AdmissiblePair>& pairs) {
    NormReport rep;
    const GridSpec& g = traj.u.front().grid();
    const int n = g.dim();
    const double dt = std::abs(traj.dt);
    for (const auto& pr : pairs)
        if (!pr.admissible(n)) throw std::invalid_argument("s_norm: inadmissible pair");

    const DyadicPartition part = DyadicPartition::cover(g);
    const SpaceTimeSpectrum sts = spacetime_transform(traj.u, dt);
    const ModulationBands mods = ModulationBands::cover(sts);

    for (int k = part.kmin; k <= part.kmax; ++k) {
        BandReport band;
        band.k = k;

        std::vector<Field> pk;
        pk.reserve(traj.frames());
        for (const Field& f : traj.u) pk.push_back(lp_project(f, k));
        const auto mag = spacetime_gradient_magnitude(pk, dt);
        for (const auto& pr : pairs) {
            const double v =
                std::pow(2.0, pr.weight_exponent(n) * k) * mixed_norm(mag, pr, dt);
            band.strichartz_sup = std::max(band.strichartz_sup, v);
        }

        const double chi_scale = std::pow(2.0, -k);
        const double sobolev = static_cast<double>(n) / 2.0 - 1.0;
        for (int j = mods.jmin; j <= mods.jmax; ++j) {
            const double v = weighted_l2(sts, [&](double tau, double xi) {
                const double grad = std::sqrt(tau * tau + xi * xi);
                return grad * std::pow(xi, sobolev) * chi(xi * chi_scale) *
                       modulation_multiplier(mods, j, std::abs(std::abs(tau) - xi));
            });
            band.xsb_component = std::max(band.xsb_component, std::pow(2.0, 0.5 * j) * v);
        }

        band.s_band = band.strichartz_sup + band.xsb_component;
        rep.s_norm += band.s_band;
        rep.bands.push_back(band);
    }
    return rep;
}

namespace {

// L1_t Hdot^{n/2-1} of the low-modulation part of P_k F under threshold j0.
// j0 == jmin means an empty low part; j0 == jmax+1 keeps everything.
double l1h_piece(const SpaceTimeSpectrum& sts, const ModulationBands& mods, int k,
                 int j0) {
    if (j0 <= mods.jmin) return 0.0;
    SpaceTimeSpectrum cut = sts;
    const std::size_t M = sts.frames;
    const std::size_t S = sts.spatial();
    const double chi_scale = std::pow(2.0, -k);
    const double low_scale = std::pow(2.0, -(j0 - 1));
    for (std::size_t m = 0; m < M; ++m) {
        const double at = std::abs(sts.tau(m));
        for (std::size_t i = 0; i < S; ++i) {
            const double xi = freq_norm(sts.grid, i);
            const double dist = std::abs(at - xi);
            const double mult = chi(xi * chi_scale) *
                                (j0 > mods.jmax ? 1.0 : lowpass(dist * low_scale));
            for (int c = 0; c < sts.comps; ++c) cut.at(c, m, i) *= mult;
        }
    }
    const auto frames = spacetime_inverse(cut);
    const double e = sts.grid.dim() / 2.0 - 1.0;
    std::vector<double> per_frame(frames.size());
    for (std::size_t m = 0; m < frames.size(); ++m)
        per_frame[m] = std::sqrt(
            spectral_quadratic(frames[m], [e](double x) { return std::pow(x, 2.0 * e); }));
    double s = 0.0;
    for (std::size_t m = 0; m < per_frame.size(); ++m) {
        const double w = (m == 0 || m + 1 == per_frame.size()) ? 0.5 : 1.0;
        s += w * per_frame[m];
    }
    return s * sts.dt;
}

double xsb_piece(const SpaceTimeSpectrum& sts, const ModulationBands& mods, int k,
                 int j0) {
    const double chi_scale = std::pow(2.0, -k);
    const double sobolev = sts.grid.dim() / 2.0 - 1.0;
    double sum = 0.0;
    for (int j = std::max(j0, mods.jmin); j <= mods.jmax; ++j) {
        const double v = weighted_l2(sts, [&](double tau, double xi) {
            return std::pow(xi, sobolev) * chi(xi * chi_scale) *
                   modulation_multiplier(mods, j, std::abs(std::abs(tau) - xi));
        });
        sum += std::pow(2.0, -0.5 * j) * v;
    }
    return sum;
}

}  // namespace

double n_norm(const std::vector<Field>& forcing, double dt) {
    const SpaceTimeSpectrum sts = spacetime_transform(forcing, dt);
    const ModulationBands mods = ModulationBands::cover(sts);
    const DyadicPartition part = DyadicPartition::cover(sts.grid);
    double total = 0.0;
    for (int k = part.kmin; k <= part.kmax; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (int j0 = mods.jmin; j0 <= mods.jmax + 1; ++j0)
            best = std::min(best, l1h_piece(sts, mods, k, j0) + xsb_piece(sts, mods, k, j0));
        total += best;
    }
    return total;
}

double n_norm_pure_l1h(const std::vector<Field>& forcing, double dt) {
    const SpaceTimeSpectrum sts = spacetime_transform(forcing, dt);
    const ModulationBands mods = ModulationBands::cover(sts);
    const DyadicPartition part = DyadicPartition::cover(sts.grid);
    double total = 0.0;
    for (int k = part.kmin; k <= part.kmax; ++k)
        total += l1h_piece(sts, mods, k, mods.jmax + 1);
    return total;
}

// ---------------------------------------------------------------------------

Field bilinear_multiplier_masked(
    const MultiplierSymbol& sym, const Field& u, const Field& v,
    const std::function<double(double)>& mask_u,
    const std::function<double(double)>& mask_v, std::size_t pair_budget) {
    if (u.components() != 1 || v.components() != 1)
        throw std::invalid_argument("bilinear_multiplier: scalar inputs required");
    if (!(u.grid() == v.grid()))
        throw std::invalid_argument("bilinear_multiplier: grid mismatch");
    const GridSpec& g = u.grid();
    const std::size_t S = g.total();

    struct Mode {
        std::vector<int> alias;
        std::vector<double> xi;
        cplx amp;
    };
    auto gather = [&](const Field& f, const std::function<double(double)>& mask) {
        Spectrum sp = forward(f);
        std::vector<Mode> modes;
        for (std::size_t i = 0; i < S; ++i) {
            const double w = mask(freq_norm(g, i));
            if (w == 0.0) continue;
            const cplx a = sp.at(0, i) * w;
            if (a == cplx(0.0)) continue;
            modes.push_back({alias_vector(g, i), freq_vector(g, i), a});
        }
        return modes;
    };

    const auto mu = gather(u, mask_u);
    const auto mv = gather(v, mask_v);
    if (mu.size() * mv.size() > pair_budget)
        throw std::runtime_error("bilinear_multiplier: mode-pair budget exceeded (" +
                                 std::to_string(mu.size()) + " x " +
                                 std::to_string(mv.size()) + " pairs)");

    Spectrum out(g, 1);
    std::vector<int> sum_alias(g.dim());
    for (const Mode& a : mu)
        for (const Mode& b : mv) {
            for (int d = 0; d < g.dim(); ++d) sum_alias[d] = a.alias[d] + b.alias[d];
            const std::size_t idx = index_of_alias(g, sum_alias);
            out.at(0, idx) += sym.m(a.xi, b.xi) * a.amp * b.amp;
        }
    return inverse(out);
}

Field bilinear_multiplier(const MultiplierSymbol& sym, const Field& u, const Field& v,
                          int k1, int k2, std::size_t pair_budget) {
    const double s1 = std::pow(2.0, -k1);
    const double s2 = std::pow(2.0, -k2);
    return bilinear_multiplier_masked(
        sym, u, v, [s1](double x) { return chi(x * s1); },
        [s2](double x) { return chi(x * s2); }, pair_budget);
}

// ---------------------------------------------------------------------------

namespace {

Field scalar_comp(const Field& f, int c) {
    Field out(f.grid(), 1);
    auto src = f.comp(c);
    auto dst = out.comp(0);
    std::copy(src.begin(), src.end(), dst.begin());
    return out;
}

// band sum of dot(u_{k1}, u_{k2}) over pairs within the given width
Field band_pair_sum(const std::vector<Field>& bands, int width) {
    Field sum(bands.front().grid(), 1);
    const int nb = static_cast<int>(bands.size());
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) {
            if (std::abs(a - b) > width) continue;
            Field d = dot(bands[a], bands[b]);
            axpy(sum, 1.0, d);
        }
    return sum;
}

}  // namespace

OrthoReport orthogonality_check(const Field& u_in) {
    Field u = u_in;
    project_to_sphere(u);
    const GridSpec& g = u.grid();
    const DyadicPartition part = DyadicPartition::cover(g);
    const int width = 10;

    std::vector<Field> bands;
    for (int k = part.kmin; k <= part.kmax; ++k) bands.push_back(lp_project(u, k));

    // target: u.u - |mean|^2, exact by band bookkeeping
    double mean_sq = 0.0;
    for (int c = 0; c < 3; ++c) {
        double m = 0.0;
        for (double v : u.comp(c)) m += v;
        m /= static_cast<double>(u.size());
        mean_sq += m * m;
    }
    Field target = dot(u, u);
    for (double& v : target.raw()) v -= mean_sq;

    auto assemble = [&](int w) {
        Field total = band_pair_sum(bands, w);
        for (int a = 0; a < static_cast<int>(bands.size()); ++a) {
            const int k1 = part.kmin + a;
            Field low = lp_project_below(u, k1 - width);
            Field d = dot(bands[a], low);
            axpy(total, 2.0, d);
        }
        return total;
    };

    OrthoReport rep;
    rep.global_defect = linf_norm(sub(assemble(width), target));
    rep.truncated_defect = linf_norm(sub(assemble(3), target));

    // localized version: remainder of replacing P_k(sum u_{k1} . u_{<k1-10})
    // by u_k . u_{<k-10}, checked against the 2^{-k}-scaled bilinear route
    for (int k = part.kmin; k <= part.kmax; ++k) {
        OrthoBand ob;
        ob.k = k;

        Field direct(g, 1);
        for (int a = 0; a < static_cast<int>(bands.size()); ++a) {
            const int k1 = part.kmin + a;
            Field low = lp_project_below(u, k1 - width);
            Field term = lp_project(dot(bands[a], low), k);
            axpy(direct, 2.0, term);
        }
        {
            const int a = k - part.kmin;
            Field low = lp_project_below(u, k - width);
            Field diag = dot(bands[a], low);
            axpy(direct, -2.0, diag);
        }
        ob.remainder_direct = linf_norm(direct);

        Field bilinear(g, 1);
        const double out_scale = std::pow(2.0, -k);
        for (int k1 = k - 1; k1 <= k + 1; ++k1) {
            if (k1 < part.kmin || k1 > part.kmax) continue;
            const double band_scale = std::pow(2.0, -k1);
            const double low_scale = std::pow(2.0, -(k1 - width - 1));
            const double delta = (k1 == k) ? 1.0 : 0.0;
            MultiplierSymbol sym;
            sym.m = [out_scale, delta](const std::vector<double>& xi,
                                       const std::vector<double>& eta) {
                double s = 0.0;
                for (std::size_t d = 0; d < xi.size(); ++d) {
                    const double t = xi[d] + eta[d];
                    s += t * t;
                }
                return chi(std::sqrt(s) * out_scale) - delta;
            };
            for (int c = 0; c < 3; ++c) {
                Field uc = scalar_comp(u, c);
                Field term = bilinear_multiplier_masked(
                    sym, uc, uc, [band_scale](double x) { return chi(x * band_scale); },
                    [low_scale](double x) { return lowpass(x * low_scale); });
                axpy(bilinear, 2.0, term);
            }
        }
        ob.remainder_bilinear = linf_norm(bilinear);
        ob.route_agreement = linf_norm(sub(direct, bilinear));

        // measured bound of 2^k m(xi,eta)/|eta| on the sampled support
        double bound = 0.0;
        const double two_k = std::pow(2.0, k);
        for (std::size_t i = 0; i < (g.total() > 20000 ? 0 : g.total()); ++i) {
            const double xi = freq_norm(g, i);
            if (chi(xi * out_scale * 0.5) == 0.0 && chi(xi * out_scale) == 0.0 &&
                chi(xi * out_scale * 2.0) == 0.0)
                continue;
            for (std::size_t jdx = 0; jdx < g.total(); ++jdx) {
                const double eta = freq_norm(g, jdx);
                if (eta == 0.0 || eta > xi * std::pow(2.0, -width + 2)) continue;
                const auto xv = freq_vector(g, i);
                const auto ev = freq_vector(g, jdx);
                double s = 0.0;
                for (int d = 0; d < g.dim(); ++d) {
                    const double t = xv[d] + ev[d];
                    s += t * t;
                }
                const double m = chi(std::sqrt(s) * out_scale) - chi(xi * out_scale);
                bound = std::max(bound, std::abs(m) * two_k / eta);
            }
        }
        ob.symbol_bound = bound;
        rep.bands.push_back(ob);
    }
    return rep;
}

// ---------------------------------------------------------------------------

BilinearProbeReport bilinear_probe(const GridSpec& g, int k1, int k2, int samples,
                                   unsigned seed) {
    BilinearProbeReport rep;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);

    const auto base_symbol = [](const std::vector<double>& xi,
                                const std::vector<double>& eta) {
        double d = 0.0, nx = 0.0, ne = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            d += xi[i] * eta[i];
            nx += xi[i] * xi[i];
            ne += eta[i] * eta[i];
        }
        return std::cos(d / (1.0 + std::sqrt(nx * ne)));
    };

    const std::vector<double> gammas = {1.0, 0.1, 0.01};
    std::vector<double> mean_log_ratio(gammas.size(), 0.0);
    std::vector<int> counts(gammas.size(), 0);

    for (int trial = 0; trial < samples; ++trial) {
        Field u(g, 1), v(g, 1);
        for (double& x : u.raw()) x = dist(rng);
        for (double& x : v.raw()) x = dist(rng);
        Field pu = lp_project(u, k1);
        Field pv = lp_project(v, k2);
        const double denom = spatial_lq(pu, 4.0) * spatial_lq(pv, 4.0);
        if (denom == 0.0) continue;
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            MultiplierSymbol sym;
            const double gamma = gammas[gi];
            sym.gamma = gamma;
            sym.m = [gamma, &base_symbol](const std::vector<double>& xi,
                                          const std::vector<double>& eta) {
                return gamma * base_symbol(xi, eta);
            };
            Field f = bilinear_multiplier(sym, u, v, k1, k2);
            const double ratio = l2_norm(f) / denom;
            rep.samples.push_back(
                {static_cast<unsigned>(trial), gamma, l2_norm(f), denom, ratio});
            rep.max_ratio = std::max(rep.max_ratio, ratio / gamma);
            if (ratio > 0.0) {
                mean_log_ratio[gi] += std::log(ratio);
                ++counts[gi];
            }
        }
    }

    // least-squares slope of log(mean ratio) against log gamma
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int npts = 0;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        if (counts[gi] == 0) continue;
        const double x = std::log(gammas[gi]);
        const double y = mean_log_ratio[gi] / counts[gi];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
    }
    if (npts >= 2)
        rep.fitted_gamma_exponent =
            (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    return rep;
}

EnergyProbeSample energy_inequality_probe(const Trajectory& traj,
                                          const std::vector<Field>& forcing) {
    EnergyProbeSample s;
    const int n = traj.u.front().grid().dim();
    s.lhs = s_norm(traj, default_pairs(n)).s_norm;
    const double e_hi = n / 2.0;
    const double e_lo = n / 2.0 - 1.0;
    const double data_norm =
        std::sqrt(spectral_quadratic(traj.u.front(),
                                     [e_hi](double k) { return std::pow(k, 2.0 * e_hi); })) +
        std::sqrt(spectral_quadratic(traj.ut.front(),
                                     [e_lo](double k) { return std::pow(k, 2.0 * e_lo); }));
    double forcing_norm = 0.0;
    bool all_zero = true;
    for (const Field& f : forcing)
        if (linf_norm(f) != 0.0) all_zero = false;
    if (!all_zero) forcing_norm = n_norm(forcing, std::abs(traj.dt));
    s.rhs = data_norm + forcing_norm;
    s.ratio = s.rhs == 0.0 ? 0.0 : s.lhs / s.rhs;
    return s;
}

SigmaDecayReport sigma_decay_probe(const GridSpec& g, int k1, unsigned seed) {
    SigmaDecayReport rep;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);

    Field noise(g, 3);
    for (double& x : noise.raw()) x = dist(rng);
    Field band(g, 3);
    for (int c = 0; c < 3; ++c) {
        Field nc = scalar_comp(noise, c);
        Field pc = lp_project(nc, k1);
        auto src = pc.comp(0);
        auto dst = band.comp(c);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    const double amp = linf_norm(band);
    Field u(g, 3);
    for (std::size_t i = 0; i < u.size(); ++i) u.at(2, i) = 1.0;
    if (amp > 0.0) axpy(u, 0.1 / amp, band);
    project_to_sphere(u);

    Field q(g, 1);
    for (const Field& gr : gradient(u)) {
        Field gg = dot(gr, gr);
        axpy(q, 1.0, gg);
    }
    Field nl = mul(q, u);

    const DyadicPartition part = DyadicPartition::cover(g);
    for (int k = part.kmin; k <= part.kmax; ++k)
        rep.band_mass.push_back(l2_norm(lp_project(nl, k)));

    int peak = 0;
    for (std::size_t i = 1; i < rep.band_mass.size(); ++i)
        if (rep.band_mass[i] > rep.band_mass[peak]) peak = static_cast<int>(i);
    rep.center = part.kmin + peak;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int npts = 0;
    for (std::size_t i = peak + 1; i < rep.band_mass.size(); ++i) {
        if (rep.band_mass[i] <= 1e-14 * rep.band_mass[peak]) continue;
        const double x = static_cast<double>(i - peak);
        const double y = std::log2(rep.band_mass[i] / rep.band_mass[peak]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
    }
    if (npts >= 2)
        rep.fitted_exponent = -(npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    return rep;
}

}  // namespace hwm::lp
