#include "hwm/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace hwm {

GridSpec::GridSpec(std::vector<int> n_points, std::vector<double> box_lengths)
    : points(std::move(n_points)), lengths(std::move(box_lengths)) {
    if (points.empty() || points.size() != lengths.size())
        throw std::invalid_argument("GridSpec: points/lengths mismatch");
    for (int n : points)
        if (n < 4 || n % 2 != 0)
            throw std::invalid_argument("GridSpec: point counts must be even and >= 4");
    for (double l : lengths)
        if (!(l > 0.0)) throw std::invalid_argument("GridSpec: lengths must be positive");
}

std::size_t GridSpec::total() const {
    std::size_t t = 1;
    for (int n : points) t *= static_cast<std::size_t>(n);
    return t;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim(); ++d) v *= lengths[d] / points[d];
    return v;
}

double GridSpec::box_volume() const {
    double v = 1.0;
    for (double l : lengths) v *= l;
    return v;
}

double GridSpec::max_freq() const {
    double s = 0.0;
    for (int d = 0; d < dim(); ++d) {
        double f = freq(points[d] / 2, d);
        s += f * f;
    }
    return std::sqrt(s);
}

double GridSpec::min_freq() const {
    double best = 0.0;
    for (int d = 0; d < dim(); ++d) {
        double f = std::abs(freq(1, d));
        if (best == 0.0 || f < best) best = f;
    }
    return best;
}

Field::Field(GridSpec grid, int components, double fill)
    : grid_(std::move(grid)), comps_(components),
      data_(static_cast<std::size_t>(components) * grid_.total(), fill) {
    if (components != 1 && components != 3)
        throw std::invalid_argument("Field: components must be 1 or 3");
}

std::span<double> Field::comp(int c) { return {data_.data() + c * size(), size()}; }
std::span<const double> Field::comp(int c) const {
    return {data_.data() + c * size(), size()};
}

bool Field::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Field& f, const std::string& who) {
    if (!f.all_finite()) throw std::invalid_argument(who + ": non-finite samples");
}

Spectrum::Spectrum(GridSpec grid, int components)
    : grid_(std::move(grid)), comps_(components),
      data_(static_cast<std::size_t>(components) * grid_.total()) {}

std::span<cplx> Spectrum::comp(int c) { return {data_.data() + c * size(), size()}; }
std::span<const cplx> Spectrum::comp(int c) const {
    return {data_.data() + c * size(), size()};
}

namespace {

// Cached FFTW plans per grid shape. Plans are created with FFTW_ESTIMATE so
// results are deterministic across runs; creation is serialized.
class FftEngine {
public:
    static FftEngine& instance() {
        static FftEngine e;
        return e;
    }

    void transform(const std::vector<int>& dims, cplx* data, int sign) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto key = std::make_pair(dims, sign);
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                plan = fftw_plan_dft(static_cast<int>(dims.size()),
                                     dims.data(),
                                     reinterpret_cast<fftw_complex*>(scratch(dims)),
                                     reinterpret_cast<fftw_complex*>(scratch(dims)),
                                     sign, FFTW_ESTIMATE);
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

private:
    cplx* scratch(const std::vector<int>& dims) {
        std::size_t t = 1;
        for (int n : dims) t *= static_cast<std::size_t>(n);
        if (scratch_.size() < t) scratch_.resize(t);
        return scratch_.data();
    }

    std::mutex mu_;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
    std::vector<cplx> scratch_;
};

}  // namespace

Spectrum forward(const Field& f) {
    Spectrum s(f.grid(), f.components());
    const std::size_t n = f.size();
    std::vector<cplx> buf(n);
    for (int c = 0; c < f.components(); ++c) {
        auto in = f.comp(c);
        for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
        FftEngine::instance().transform(f.grid().points, buf.data(), FFTW_FORWARD);
        auto out = s.comp(c);
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = buf[i] * inv;
    }
    return s;
}

Field inverse(const Spectrum& s) {
    Field f(s.grid(), s.components());
    const std::size_t n = s.size();
    std::vector<cplx> buf(n);
    for (int c = 0; c < s.components(); ++c) {
        auto in = s.comp(c);
        for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
        FftEngine::instance().transform(s.grid().points, buf.data(), FFTW_BACKWARD);
        auto out = f.comp(c);
        for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
    }
    return f;
}

double freq_norm(const GridSpec& g, std::size_t i) {
    double s = 0.0;
    std::size_t rem = i;
    for (int d = g.dim() - 1; d >= 0; --d) {
        const int n = g.points[d];
        const int m = static_cast<int>(rem % static_cast<std::size_t>(n));
        rem /= static_cast<std::size_t>(n);
        const double f = g.freq(m, d);
        s += f * f;
    }
    return std::sqrt(s);
}

std::vector<double> freq_vector(const GridSpec& g, std::size_t i) {
    std::vector<double> out(g.dim());
    std::size_t rem = i;
    for (int d = g.dim() - 1; d >= 0; --d) {
        const int n = g.points[d];
        const int m = static_cast<int>(rem % static_cast<std::size_t>(n));
        rem /= static_cast<std::size_t>(n);
        out[d] = g.freq(m, d);
    }
    return out;
}

std::vector<int> alias_vector(const GridSpec& g, std::size_t i) {
    std::vector<int> out(g.dim());
    std::size_t rem = i;
    for (int d = g.dim() - 1; d >= 0; --d) {
        const int n = g.points[d];
        const int m = static_cast<int>(rem % static_cast<std::size_t>(n));
        rem /= static_cast<std::size_t>(n);
        out[d] = g.alias(m, d);
    }
    return out;
}

std::size_t index_of_alias(const GridSpec& g, const std::vector<int>& alias) {
    std::size_t idx = 0;
    for (int d = 0; d < g.dim(); ++d) {
        const int n = g.points[d];
        int m = alias[d] % n;
        if (m < 0) m += n;
        idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(m);
    }
    return idx;
}

void fft_inplace(const std::vector<int>& dims, cplx* data, bool forward_sign) {
    FftEngine::instance().transform(dims, data,
                                    forward_sign ? FFTW_FORWARD : FFTW_BACKWARD);
}

Spectrum apply_radial_multiplier(const Spectrum& s,
                                 const std::function<double(double)>& mult) {
    Spectrum out(s.grid(), s.components());
    const std::size_t n = s.size();
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = mult(freq_norm(s.grid(), i));
    for (int c = 0; c < s.components(); ++c) {
        auto in = s.comp(c);
        auto o = out.comp(c);
        for (std::size_t i = 0; i < n; ++i) o[i] = in[i] * m[i];
    }
    return out;
}

Field frac_laplacian(const Field& f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("frac_laplacian: s must be positive");
    require_finite(f, "frac_laplacian");
    Spectrum sp = forward(f);
    Spectrum mod = apply_radial_multiplier(
        sp, [s](double k) { return k == 0.0 ? 0.0 : std::pow(k, 2.0 * s); });
    return inverse(mod);
}

Field derivative(const Field& f, int d) {
    require_finite(f, "derivative");
    const GridSpec& g = f.grid();
    if (d < 0 || d >= g.dim()) throw std::invalid_argument("derivative: bad axis");
    Spectrum sp = forward(f);
    const std::size_t n = sp.size();

    // strides for decoding the index along axis d
    std::size_t stride = 1;
    for (int dd = g.dim() - 1; dd > d; --dd) stride *= static_cast<std::size_t>(g.points[dd]);
    const int nd = g.points[d];

    for (int c = 0; c < sp.components(); ++c) {
        auto sc = sp.comp(c);
        for (std::size_t i = 0; i < n; ++i) {
            const int m = static_cast<int>((i / stride) % static_cast<std::size_t>(nd));
            // Nyquist mode of the odd multiplier is zeroed to keep output real
            if (g.alias(m, d) == nd / 2) {
                sc[i] = 0.0;
            } else {
                sc[i] *= cplx(0.0, g.freq(m, d));
            }
        }
    }
    return inverse(sp);
}

std::vector<Field> gradient(const Field& f) {
    std::vector<Field> out;
    out.reserve(f.grid().dim());
    for (int d = 0; d < f.grid().dim(); ++d) out.push_back(derivative(f, d));
    return out;
}

Field laplacian(const Field& f) {
    require_finite(f, "laplacian");
    Spectrum sp = forward(f);
    Spectrum mod = apply_radial_multiplier(sp, [](double k) { return -k * k; });
    return inverse(mod);
}

Field dealias_two_thirds(const Field& f) {
    const GridSpec& g = f.grid();
    Spectrum sp = forward(f);
    const std::size_t n = sp.size();
    std::vector<char> keep(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        for (int d = g.dim() - 1; d >= 0; --d) {
            const int nd = g.points[d];
            const int m = static_cast<int>(rem % static_cast<std::size_t>(nd));
            rem /= static_cast<std::size_t>(nd);
            if (std::abs(g.alias(m, d)) > nd / 3) {
                keep[i] = 0;
                break;
            }
        }
    }
    for (int c = 0; c < sp.components(); ++c) {
        auto sc = sp.comp(c);
        for (std::size_t i = 0; i < n; ++i)
            if (!keep[i]) sc[i] = 0.0;
    }
    return inverse(sp);
}

double l2_sq(const Field& f) {
    double s = 0.0;
    for (double v : f.raw()) s += v * v;
    return s * f.grid().cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(l2_sq(f)); }

double linf_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.raw()) m = std::max(m, std::abs(v));
    return m;
}

double spectral_quadratic(const Field& f, const std::function<double(double)>& weight) {
    Spectrum sp = forward(f);
    const std::size_t n = sp.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = freq_norm(sp.grid(), i);
        if (k == 0.0) continue;
        const double w = weight(k);
        for (int c = 0; c < sp.components(); ++c) s += w * std::norm(sp.at(c, i));
    }
    return s * f.grid().box_volume();
}

static void check_same(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw std::invalid_argument("field shape mismatch");
}

Field add(const Field& a, const Field& b) {
    check_same(a, b);
    Field out = a;
    auto r = out.raw();
    auto rb = b.raw();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += rb[i];
    return out;
}

Field sub(const Field& a, const Field& b) {
    check_same(a, b);
    Field out = a;
    auto r = out.raw();
    auto rb = b.raw();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rb[i];
    return out;
}

Field scale(const Field& a, double alpha) {
    Field out = a;
    for (double& v : out.raw()) v *= alpha;
    return out;
}

void axpy(Field& y, double alpha, const Field& x) {
    check_same(y, x);
    auto r = y.raw();
    auto rx = x.raw();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += alpha * rx[i];
}

Field cross(const Field& a, const Field& b) {
    check_same(a, b);
    if (a.components() != 3) throw std::invalid_argument("cross: needs 3 components");
    Field out(a.grid(), 3);
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = a.at(0, i), ay = a.at(1, i), az = a.at(2, i);
        const double bx = b.at(0, i), by = b.at(1, i), bz = b.at(2, i);
        out.at(0, i) = ay * bz - az * by;
        out.at(1, i) = az * bx - ax * bz;
        out.at(2, i) = ax * by - ay * bx;
    }
    return out;
}

Field dot(const Field& a, const Field& b) {
    check_same(a, b);
    Field out(a.grid(), 1);
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < a.components(); ++c) s += a.at(c, i) * b.at(c, i);
        out.at(0, i) = s;
    }
    return out;
}

Field mul(const Field& scalar, const Field& v) {
    if (scalar.components() != 1) throw std::invalid_argument("mul: first arg scalar");
    if (!(scalar.grid() == v.grid())) throw std::invalid_argument("mul: grid mismatch");
    Field out = v;
    const std::size_t n = v.size();
    for (int c = 0; c < v.components(); ++c)
        for (std::size_t i = 0; i < n; ++i) out.at(c, i) *= scalar.at(0, i);
    return out;
}

}  // namespace hwm
