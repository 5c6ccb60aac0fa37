#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwm/halfwave.hpp"
#include "hwm/io.hpp"

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

Field random_sphere_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field u(g, 3);
    for (double& v : u.raw()) v = dist(rng);
    project_to_sphere(u);
    return u;
}

Field bump_datum(int n, double amplitude = 0.05, double radius = 1.5) {
    io::DatumSpec spec;
    spec.radius = radius;
    spec.amplitude = amplitude;
    return io::generate_datum(spec, GridSpec({n}, {2.0 * kPi})).u0;
}

}  // namespace

TEST_CASE("rhs vanishes on constants") {
    Field u(GridSpec({32}, {2.0 * kPi}), 3);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.at(0, i) = 0.0;
        u.at(1, i) = 0.6;
        u.at(2, i) = 0.8;
    }
    CHECK(linf_norm(rhs_halfwave(u)) < 1e-14);
}

TEST_CASE("great circle is a static solution") {
    // each component is a |xi| = 1 eigenfunction, so (-Lap)^{1/2}u = u
    CHECK(linf_norm(rhs_halfwave(great_circle(64))) < 1e-13);
}

TEST_CASE("rhs is pointwise orthogonal to u") {
    const GridSpec g({128}, {2.0 * kPi});
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const Field u = random_sphere_field(g, seed);
        CHECK(linf_norm(dot(u, rhs_halfwave(u))) < 1e-12);
    }
}

TEST_CASE("energy of a constant is zero") {
    Field u(GridSpec({32}, {2.0 * kPi}), 3, 0.5);
    CHECK(energy(u) < 1e-14);
}

TEST_CASE("energy of the great circle is 2 pi") {
    CHECK(energy(great_circle(64)) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("quadrature and Parseval energies agree") {
    const GridSpec g({64}, {2.0 * kPi});
    for (unsigned seed = 11; seed <= 13; ++seed) {
        const Field u = random_sphere_field(g, seed);
        const double a = energy(u), b = energy_spectral(u);
        CHECK(std::abs(a - b) / b < 1e-10);
    }
}

TEST_CASE("zero steps returns the state unchanged") {
    State s;
    s.u = bump_datum(64);
    EvolutionParams p;
    p.steps = 0;
    const EvolveResult res = evolve(s, p);
    CHECK(res.traj.frames() == 1);
    CHECK(l2_norm(sub(res.traj.u[0], s.u)) == 0.0);
}

TEST_CASE("great circle stays static over T = 1") {
    State s;
    s.u = great_circle(64);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 1000;
    p.record_every = 1000;
    const EvolveResult res = evolve(s, p);
    CHECK(res.status == RunStatus::ok);
    CHECK(linf_norm(sub(res.traj.u.back(), s.u)) < 1e-9);
}

TEST_CASE("self-convergence order of the time integrator is ~4") {
    State s;
    s.u = bump_datum(64, 0.2);
    auto final_u = [&](double dt, long steps) {
        EvolutionParams p;
        p.dt = dt;
        p.steps = steps;
        p.record_every = steps;
        return evolve(s, p).traj.u.back();
    };
    const Field ref = final_u(1e-3, 160);   // dt/8 reference
    const Field a = final_u(8e-3, 20);
    const Field b = final_u(4e-3, 40);
    const double ea = linf_norm(sub(a, ref));
    const double eb = linf_norm(sub(b, ref));
    const double order = std::log2(ea / eb);
    CHECK(order >= 3.7);
}

TEST_CASE("time reversal returns to the initial state") {
    State s;
    s.u = bump_datum(64, 0.1);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 200;
    p.record_every = 200;
    State fwd;
    fwd.u = evolve(s, p).traj.u.back();
    p.reverse = true;
    const Field back = evolve(fwd, p).traj.u.back();
    CHECK(linf_norm(sub(back, s.u)) < 1e-10);
}

TEST_CASE("constraint drift stays small without projection") {
    State s;
    s.u = bump_datum(64, 0.1);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 500;
    p.record_every = 100;
    const EvolveResult res = evolve(s, p);
    CHECK(res.status == RunStatus::ok);
    for (double v : res.max_constraint_violation) CHECK(v < 1e-10);
}

TEST_CASE("projection enforces the constraint exactly") {
    State s;
    s.u = bump_datum(64, 0.1);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 50;
    p.record_every = 50;
    p.project_each_step = true;
    const EvolveResult res = evolve(s, p);
    CHECK(res.max_constraint_violation.back() < 5e-16);
}

TEST_CASE("divergence detection on constraint blow-up") {
    State s;
    s.u = bump_datum(32, 0.1);
    for (double& v : s.u.raw()) v *= 2.0;  // |u| = 2 everywhere
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 5;
    const EvolveResult res = evolve(s, p);
    CHECK(res.status == RunStatus::diverged);
}

TEST_CASE("recorded ut is the equation right-hand side") {
    State s;
    s.u = bump_datum(64, 0.05);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 20;
    p.record_every = 10;
    const EvolveResult res = evolve(s, p);
    for (std::size_t m = 0; m < res.traj.frames(); ++m)
        CHECK(l2_norm(sub(res.traj.ut[m], rhs_halfwave(res.traj.u[m]))) == 0.0);
}

TEST_CASE("energy drift of the reference run is tiny and improves with dt") {
    State s;
    s.u = bump_datum(128, 0.05);
    auto peak_drift = [&](double dt, long steps) {
        EvolutionParams p;
        p.dt = dt;
        p.steps = steps;
        p.record_every = steps / 20;
        const EvolveResult res = evolve(s, p);
        double worst = 0.0;
        for (double e : res.energy)
            worst = std::max(worst, std::abs(e - res.energy.front()) / res.energy.front());
        return worst;
    };
    const double d1 = peak_drift(1e-3, 1000);
    const double d2 = peak_drift(5e-4, 2000);
    CHECK(d1 < 1e-6);
    CHECK(d1 / d2 >= 8.0);
}
