#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwm/halfwave.hpp"
#include "hwm/io.hpp"
#include "hwm/wave_reform.hpp"

using namespace hwm;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field great_circle(int n) {
    Field u(GridSpec({n}, {2.0 * kPi}), 3);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / n;
        u.at(0, i) = std::cos(x);
        u.at(1, i) = std::sin(x);
        u.at(2, i) = 0.0;
    }
    return u;
}

Field bump_datum(int n, double amplitude = 0.05, double radius = 1.5) {
    io::DatumSpec spec;
    spec.radius = radius;
    spec.amplitude = amplitude;
    return io::generate_datum(spec, GridSpec({n}, {2.0 * kPi})).u0;
}

Field random_sphere_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field u(g, 3);
    for (double& v : u.raw()) v = dist(rng);
    project_to_sphere(u);
    return u;
}

Trajectory evolve_bump(int n, double dt, long steps, long record_every,
                       double amplitude = 0.05) {
    State s;
    s.u = bump_datum(n, amplitude);
    EvolutionParams p;
    p.dt = dt;
    p.steps = steps;
    p.record_every = record_every;
    return evolve(s, p).traj;
}

}  // namespace

TEST_CASE("projector basics") {
    const GridSpec g({16}, {2.0 * kPi});
    Field base(g, 3), v(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) {
        base.at(0, i) = 1.0;
        v.at(0, i) = 3.0;
        v.at(1, i) = 4.0;
        v.at(2, i) = 5.0;
    }
    const Field pv = projector_perp(base, v);
    CHECK(pv.at(0, 0) == doctest::Approx(0.0));
    CHECK(pv.at(1, 0) == doctest::Approx(4.0));
    CHECK(pv.at(2, 0) == doctest::Approx(5.0));

    // parallel input annihilated, orthogonal input untouched
    CHECK(linf_norm(projector_perp(base, scale(base, 2.5))) < 1e-13);
    Field orth(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) orth.at(1, i) = 1.5;
    CHECK(linf_norm(sub(projector_perp(base, orth), orth)) < 1e-13);
}

TEST_CASE("projector is idempotent and checks its base") {
    const GridSpec g({32}, {2.0 * kPi});
    const Field base = random_sphere_field(g, 3);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field v(g, 3);
    for (double& w : v.raw()) w = dist(rng);
    const Field once = projector_perp(base, v);
    CHECK(linf_norm(sub(projector_perp(base, once), once)) < 1e-12);
    CHECK(linf_norm(dot(base, once)) < 1e-12);

    Field tiny = base;
    for (double& w : tiny.raw()) w *= 0.1;
    CHECK_THROWS(projector_perp(tiny, v));
}

TEST_CASE("wave rhs vanishes on constants") {
    const GridSpec g({32}, {2.0 * kPi});
    Field u(g, 3), ut(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) u.at(2, i) = 1.0;
    CHECK(linf_norm(wave_rhs(u, ut)) < 1e-14);
}

TEST_CASE("great-circle closed form: wave rhs equals u") {
    // line 1 gives u |grad u|^2 = u; lines 2 and 3 vanish since
    // (-Lap)^{1/2} u = u there
    const Field u = great_circle(64);
    const Field ut(u.grid(), 3);
    CHECK(linf_norm(sub(wave_rhs(u, ut), u)) < 1e-10);
    const Field hu = frac_laplacian(u, 0.5);
    CHECK(linf_norm(wave_rhs_projector_line(u, hu)) < 1e-12);
    CHECK(linf_norm(wave_rhs_commutator_line(u, hu)) < 1e-12);
}

TEST_CASE("projection lines stay orthogonal to u") {
    const GridSpec g({64}, {2.0 * kPi});
    const Field u = bump_datum(64, 0.3);
    CHECK(linf_norm(dot(u, wave_rhs_projector_line(u, u))) < 1e-10);
    CHECK(linf_norm(dot(u, wave_rhs_commutator_line(u, u))) < 1e-10);
}

TEST_CASE("derivation identities on random and structured inputs") {
    const Field u = bump_datum(128, 0.05, 2.8);
    const IdentityReport rep = check_derivation_identities(u, 17);
    CHECK(rep.triple_product_defect <= 1e-14);
    CHECK(rep.dt_dot_identity_defect <= 1e-10);
}

TEST_CASE("graph identity on the great circle") {
    // u.Lap u = -1 and |grad u|^2 = 1 exactly
    const IdentityReport rep = check_derivation_identities(great_circle(64), 1);
    CHECK(rep.graph_identity_defect < 1e-12);
}

TEST_CASE("graph identity defect falls spectrally under refinement") {
    const double d128 =
        check_derivation_identities(bump_datum(128, 0.05, 2.8), 1).graph_identity_defect;
    const double d256 =
        check_derivation_identities(bump_datum(256, 0.05, 2.8), 1).graph_identity_defect;
    CHECK(d128 / d256 > 1e2);
}

TEST_CASE("x_residual of compatible data is exactly zero") {
    const Field u = bump_datum(64, 0.1);
    const Field ut = rhs_halfwave(u);
    const Field x = x_residual(u, ut);
    CHECK(l2_norm(x) == 0.0);
    CHECK(tilde_energy(x, 1) == 0.0);
}

TEST_CASE("x_residual with ut = 0 against the Parseval oracle") {
    const Field u = bump_datum(64, 0.2);
    const Field ut(u.grid(), 3);
    const Field x = x_residual(u, ut);
    CHECK(l2_norm(add(x, rhs_halfwave(u))) < 1e-14);

    // oracle: direct spectrum-side sum of | |xi|^{n/2-3/2} xhat |^2 / 2
    const Spectrum xs = forward(x);
    const GridSpec& g = u.grid();
    double oracle = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = freq_norm(g, i);
        if (w == 0.0) continue;
        const double m = std::pow(w, 1.0 / 2.0 - 3.0 / 2.0);
        for (int c = 0; c < 3; ++c) oracle += m * m * std::norm(xs.at(c, i));
    }
    oracle *= 0.5 * g.box_volume();
    const double te = tilde_energy(x, 1);
    CHECK(std::abs(te - oracle) / oracle < 1e-12);
}

TEST_CASE("tilde energy is quadratic in X") {
    const Field u = bump_datum(64, 0.2);
    const Field x = x_residual(u, Field(u.grid(), 3));
    const double base = tilde_energy(x, 1);
    CHECK(tilde_energy(scale(x, 3.0), 1) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("wave residual of a constant trajectory is zero") {
    const GridSpec g({32}, {2.0 * kPi});
    Trajectory traj;
    traj.dt = 0.1;
    Field u(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) u.at(0, i) = 1.0;
    for (int m = 0; m < 6; ++m) {
        traj.u.push_back(u);
        traj.ut.push_back(Field(g, 3));
    }
    CHECK(wave_residual(traj) < 1e-13);
}

TEST_CASE("wave residual needs at least five frames") {
    Trajectory traj;
    traj.dt = 0.1;
    const GridSpec g({16}, {2.0 * kPi});
    for (int m = 0; m < 4; ++m) {
        traj.u.push_back(Field(g, 3, 1.0));
        traj.ut.push_back(Field(g, 3));
    }
    CHECK_THROWS(wave_residual(traj));
}

TEST_CASE("wave residual converges at second order in the frame spacing") {
    const double r1 = wave_residual(evolve_bump(64, 1e-3, 200, 10));
    const double r2 = wave_residual(evolve_bump(64, 5e-4, 400, 10));
    const double order = std::log2(r1 / r2);
    CHECK(order >= 1.8);
}

TEST_CASE("wave residual flags corrupted time derivatives") {
    Trajectory clean = evolve_bump(64, 1e-3, 200, 10);
    const double base = wave_residual(clean);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> dist(0.0, 1.0);
    Trajectory dirty = clean;
    for (std::size_t m = 0; m < dirty.frames(); ++m) {
        Field noise(dirty.u[m].grid(), 3);
        for (double& v : noise.raw()) v = dist(rng);
        axpy(dirty.ut[m], 0.1, projector_perp(dirty.u[m], noise));
    }
    CHECK(wave_residual(dirty) > 10.0 * base);
}
