#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hwm {

using cplx = std::complex<double>;

// Periodic lattice: n dimensions, N_i points (even, >= 4) on a box of side L_i.
// Mode index m_i carries the signed alias in (-N_i/2, N_i/2] and the physical
// frequency xi_i = 2*pi*alias/L_i.
struct GridSpec {
    std::vector<int> points;
    std::vector<double> lengths;

    GridSpec() = default;
    GridSpec(std::vector<int> n_points, std::vector<double> box_lengths);

    int dim() const { return static_cast<int>(points.size()); }
    std::size_t total() const;
    double cell_volume() const;
    double box_volume() const;

    // signed alias of mode index m along axis d
    int alias(int m, int d) const {
        const int n = points[d];
        return m <= n / 2 ? m : m - n;
    }
    double freq(int m, int d) const {
        return 2.0 * 3.14159265358979323846 * alias(m, d) / lengths[d];
    }
    // largest |xi| representable on the lattice
    double max_freq() const;
    // smallest nonzero |xi|
    double min_freq() const;

    bool operator==(const GridSpec&) const = default;
};

// Real field with one or three components sampled on the lattice.
// Component data is stored contiguously, row-major with the last axis fastest.
class Field {
public:
    Field() = default;
    Field(GridSpec grid, int components, double fill = 0.0);

    const GridSpec& grid() const { return grid_; }
    int components() const { return comps_; }
    std::size_t size() const { return grid_.total(); }

    std::span<double> comp(int c);
    std::span<const double> comp(int c) const;
    double& at(int c, std::size_t i) { return data_[c * size() + i]; }
    double at(int c, std::size_t i) const { return data_[c * size() + i]; }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    bool all_finite() const;

private:
    GridSpec grid_;
    int comps_ = 0;
    std::vector<double> data_;
};

// Complex Fourier coefficients of a Field, convention
//   f(x) = sum_xi uhat(xi) e^{i xi.x},
// i.e. the forward transform divides by the total point count. Parseval then
// reads mean|f|^2 = sum |uhat|^2.
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(GridSpec grid, int components);

    const GridSpec& grid() const { return grid_; }
    int components() const { return comps_; }
    std::size_t size() const { return grid_.total(); }

    std::span<cplx> comp(int c);
    std::span<const cplx> comp(int c) const;
    cplx& at(int c, std::size_t i) { return data_[c * size() + i]; }
    cplx at(int c, std::size_t i) const { return data_[c * size() + i]; }

private:
    GridSpec grid_;
    int comps_ = 0;
    std::vector<cplx> data_;
};

Spectrum forward(const Field& f);
Field inverse(const Spectrum& s);

// |xi| of flat index i
double freq_norm(const GridSpec& g, std::size_t i);
// frequency vector (xi_1..xi_n) of flat index i
std::vector<double> freq_vector(const GridSpec& g, std::size_t i);
// signed mode aliases of flat index i
std::vector<int> alias_vector(const GridSpec& g, std::size_t i);
// flat index of a signed alias vector (wrapped periodically)
std::size_t index_of_alias(const GridSpec& g, const std::vector<int>& alias);

// Unnormalized in-place complex FFT over an arbitrary shape (row-major,
// last axis fastest). Used for the windowed time transform as well.
void fft_inplace(const std::vector<int>& dims, cplx* data, bool forward_sign);

// Applies a multiplier depending only on |xi|; the zero mode is set to
// mult(0) as given by the caller (most operators annihilate it).
Spectrum apply_radial_multiplier(const Spectrum& s,
                                 const std::function<double(double)>& mult);

// (-Delta)^s: multiplier |xi|^{2s}, zero mode annihilated. Requires s > 0.
Field frac_laplacian(const Field& f, double s);

// Spectral partial derivative along axis d (multiplier i*xi_d, Nyquist zeroed).
Field derivative(const Field& f, int d);
std::vector<Field> gradient(const Field& f);

// Spectral Laplacian (multiplier -|xi|^2).
Field laplacian(const Field& f);

// 2/3-rule truncation: zeroes all modes with any |alias_d| > N_d/3.
Field dealias_two_thirds(const Field& f);

// Lattice quadrature of |f|^2 (cell volume times sample sum).
double l2_sq(const Field& f);
double l2_norm(const Field& f);
double linf_norm(const Field& f);

// Parseval-side sum of w(|xi|)*|fhat(xi)|^2 over xi != 0, times box volume.
double spectral_quadratic(const Field& f, const std::function<double(double)>& weight);

// elementwise helpers
Field add(const Field& a, const Field& b);
Field sub(const Field& a, const Field& b);
Field scale(const Field& a, double alpha);
void axpy(Field& y, double alpha, const Field& x);

// pointwise 3-vector algebra (components must be 3 / 3 -> 3 or 1)
Field cross(const Field& a, const Field& b);
Field dot(const Field& a, const Field& b);           // 3,3 -> 1
Field mul(const Field& scalar, const Field& v);      // 1,3 -> 3 (or 1,1 -> 1)

void require_finite(const Field& f, const std::string& who);

}  // namespace hwm
