#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwm/halfwave.hpp"
#include "hwm/io.hpp"
#include "hwm/picard.hpp"
#include "hwm/wave_reform.hpp"

using namespace hwm;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec circle(int n) { return GridSpec({n}, {2.0 * kPi}); }

Field cos_mode(const GridSpec& g, int mode, double amp, int comp) {
    Field f(g, 3);
    const int n = g.points[0];
    for (std::size_t i = 0; i < g.total(); ++i)
        f.at(comp, i) = amp * std::cos(mode * 2.0 * kPi * static_cast<double>(i) / n);
    return f;
}

picard::WaveData bump_data(int n, double amplitude, double radius = 2.8) {
    io::DatumSpec spec;
    spec.amplitude = amplitude;
    spec.radius = radius;
    return io::generate_datum(spec, circle(n));
}

}  // namespace

TEST_CASE("zero data and zero forcing give the zero trajectory") {
    const GridSpec g = circle(32);
    picard::WaveData data;
    data.u0 = Field(g, 3);
    data.u1 = Field(g, 3);
    const Trajectory traj = picard::linear_wave_solve(data, nullptr, 0.05, 10);
    for (const Field& u : traj.u) CHECK(linf_norm(u) == 0.0);
    for (const Field& v : traj.ut) CHECK(linf_norm(v) == 0.0);
}

TEST_CASE("single-mode data follow d'Alembert exactly") {
    const GridSpec g = circle(64);
    const int mode = 5;
    const double A = 0.8;
    picard::WaveData data;
    data.u0 = cos_mode(g, mode, A, 1);
    data.u1 = Field(g, 3);
    const double dt = 0.02;
    const long steps = 50;
    const Trajectory traj = picard::linear_wave_solve(data, nullptr, dt, steps);
    double worst = 0.0;
    for (long m = 0; m <= steps; ++m) {
        const Field expect = cos_mode(g, mode, A * std::cos(mode * dt * m), 1);
        worst = std::max(worst, linf_norm(sub(traj.u[m], expect)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("zero-mode drifts linearly") {
    const GridSpec g = circle(16);
    picard::WaveData data;
    data.u0 = Field(g, 3, 0.25);
    data.u1 = Field(g, 3, 0.5);
    const Trajectory traj = picard::linear_wave_solve(data, nullptr, 0.1, 10);
    CHECK(linf_norm(sub(traj.u.back(), Field(g, 3, 0.25 + 0.5 * 1.0))) < 1e-13);
}

TEST_CASE("constant forcing matches the closed-form Duhamel amplitude") {
    const GridSpec g = circle(64);
    const int mode = 3;
    auto run = [&](double dt, long steps) {
        picard::WaveData data;
        data.u0 = Field(g, 3);
        data.u1 = Field(g, 3);
        std::vector<Field> forcing(steps + 1, cos_mode(g, mode, 1.0, 0));
        const Trajectory traj = picard::linear_wave_solve(data, &forcing, dt, steps);
        const double t = dt * static_cast<double>(steps);
        const double amp = (1.0 - std::cos(mode * t)) / (mode * mode);
        return linf_norm(sub(traj.u.back(), cos_mode(g, mode, amp, 0)));
    };
    const double e1 = run(0.02, 50);
    const double e2 = run(0.01, 100);
    CHECK(e1 < 1e-3);
    CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("free evolution conserves the discrete wave energy per mode") {
    const GridSpec g = circle(64);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 1.0);
    picard::WaveData data;
    data.u0 = Field(g, 3);
    data.u1 = Field(g, 3);
    for (double& v : data.u0.raw()) v = dist(rng);
    for (double& v : data.u1.raw()) v = dist(rng);
    {   // drop the zero mode so the linear drift does not enter
        Spectrum s0 = forward(data.u0), s1 = forward(data.u1);
        for (int c = 0; c < 3; ++c) {
            s0.at(c, 0) = 0.0;
            s1.at(c, 0) = 0.0;
        }
        data.u0 = inverse(s0);
        data.u1 = inverse(s1);
    }
    const Trajectory traj = picard::linear_wave_solve(data, nullptr, 0.05, 40);
    const double e0 = picard::discrete_wave_energy(traj.u.front(), traj.ut.front());
    for (std::size_t m = 0; m < traj.frames(); ++m) {
        const double e = picard::discrete_wave_energy(traj.u[m], traj.ut[m]);
        CHECK(std::abs(e - e0) / e0 < 1e-12);
    }
}

TEST_CASE("free evolution has the semigroup property") {
    const GridSpec g = circle(64);
    picard::WaveData data;
    data.u0 = cos_mode(g, 4, 0.6, 0);
    axpy(data.u0, 1.0, cos_mode(g, 7, 0.2, 2));
    data.u1 = cos_mode(g, 2, 0.3, 1);
    const double dt = 0.05;
    const Trajectory whole = picard::linear_wave_solve(data, nullptr, dt, 20);
    const Trajectory first = picard::linear_wave_solve(data, nullptr, dt, 8);
    picard::WaveData mid;
    mid.u0 = first.u.back();
    mid.u1 = first.ut.back();
    const Trajectory second = picard::linear_wave_solve(mid, nullptr, dt, 12);
    CHECK(linf_norm(sub(second.u.back(), whole.u.back())) < 1e-12);
    CHECK(linf_norm(sub(second.ut.back(), whole.ut.back())) < 1e-12);
}

TEST_CASE("solver is linear in the data") {
    const GridSpec g = circle(32);
    picard::WaveData data;
    data.u0 = cos_mode(g, 3, 0.5, 0);
    data.u1 = cos_mode(g, 5, 0.2, 1);
    picard::WaveData scaled;
    scaled.u0 = scale(data.u0, -1.7);
    scaled.u1 = scale(data.u1, -1.7);
    const Trajectory a = picard::linear_wave_solve(data, nullptr, 0.05, 12);
    const Trajectory b = picard::linear_wave_solve(scaled, nullptr, 0.05, 12);
    for (std::size_t m = 0; m < a.frames(); ++m)
        CHECK(linf_norm(sub(b.u[m], scale(a.u[m], -1.7))) < 1e-12);
}

TEST_CASE("forcing must cover every time node") {
    const GridSpec g = circle(16);
    picard::WaveData data;
    data.u0 = Field(g, 3);
    data.u1 = Field(g, 3);
    std::vector<Field> forcing(5, Field(g, 3));
    CHECK_THROWS(picard::linear_wave_solve(data, &forcing, 0.1, 10));
}

TEST_CASE("wave-maps fixed point on constant data converges immediately") {
    const GridSpec g = circle(32);
    picard::WaveData data;
    data.u0 = Field(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) data.u0.at(2, i) = 1.0;
    data.u1 = Field(g, 3);
    picard::IterationParams p;
    p.T = 0.2;
    p.dt = 0.01;
    const picard::FixedPointResult res = picard::wavemap_iterate(data, p);
    CHECK(res.converged);
    CHECK(res.diffs.size() <= 2);
    for (const Field& u : res.traj.u)
        CHECK(linf_norm(sub(u, data.u0)) < 1e-13);
}

TEST_CASE("wave-maps fixed point contracts on a small bump") {
    // N = 128 keeps the spatial constraint floor below the tolerance scale
    const picard::WaveData data = bump_data(128, 0.05);
    picard::IterationParams p;
    p.T = 0.25;
    p.dt = 1e-3;
    p.tol_inner = 1e-8;
    const picard::FixedPointResult res = picard::wavemap_iterate(data, p);
    CHECK(res.converged);
    REQUIRE(res.diffs.size() >= 3);
    for (std::size_t i = 2; i < res.diffs.size(); ++i)
        CHECK(res.diffs[i] < 0.5 * res.diffs[i - 1]);

    // consistency of the converged wave map
    double sphere_defect = 0.0, graph_defect = 0.0;
    for (const Field& u : res.traj.u) {
        sphere_defect = std::max(sphere_defect, constraint_violation(u));
        graph_defect = std::max(
            graph_defect, check_derivation_identities(u, 1).graph_identity_defect);
    }
    CHECK(sphere_defect <= 10.0 * p.tol_inner);
    CHECK(graph_defect < 1e-5);
}

TEST_CASE("full iteration on constant data stays constant") {
    const GridSpec g = circle(32);
    picard::WaveData data;
    data.u0 = Field(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) data.u0.at(2, i) = 1.0;
    data.u1 = Field(g, 3);
    picard::IterationParams p;
    p.T = 0.2;
    p.dt = 0.01;
    const picard::IterationState state = picard::halfwave_iterate(data, p);
    CHECK(state.status == picard::IterStatus::converged);
    for (const Field& u : state.current.u)
        CHECK(linf_norm(sub(u, data.u0)) < 1e-12);
}

TEST_CASE("full iteration contracts and closes the first-order equation") {
    const picard::WaveData data = bump_data(128, 0.05);
    picard::IterationParams p;
    p.T = 0.25;
    p.dt = 1e-3;
    p.tol_outer = 1e-6;
    p.tol_inner = 1e-8;
    const picard::IterationState state = picard::halfwave_iterate(data, p);
    CHECK(state.status == picard::IterStatus::converged);
    REQUIRE(state.outer_diffs.size() >= 2);
    for (std::size_t i = 1; i < state.outer_diffs.size(); ++i)
        CHECK(state.outer_diffs[i] < 0.5 * state.outer_diffs[i - 1]);

    double xres = 0.0, sphere = 0.0;
    for (std::size_t m = 0; m < state.current.frames(); ++m) {
        xres = std::max(
            xres, l2_norm(x_residual(state.current.u[m], state.current.ut[m])));
        sphere = std::max(sphere, constraint_violation(state.current.u[m]));
    }
    CHECK(xres <= 10.0 * p.tol_outer);
    CHECK(sphere <= 10.0 * p.tol_inner);
}

TEST_CASE("iteration matches the first-order integrator") {
    const picard::WaveData data = bump_data(64, 0.05);
    picard::IterationParams p;
    p.T = 0.25;
    p.dt = 1e-3;
    p.tol_outer = 1e-6;
    p.tol_inner = 1e-8;
    const picard::IterationState state = picard::halfwave_iterate(data, p);
    REQUIRE(state.status == picard::IterStatus::converged);

    State s0;
    s0.u = data.u0;
    EvolutionParams ep;
    ep.dt = p.dt;
    ep.steps = static_cast<long>(std::llround(p.T / p.dt));
    ep.record_every = ep.steps;
    const EvolveResult ev = evolve(s0, ep);
    REQUIRE(ev.status == RunStatus::ok);
    CHECK(l2_norm(sub(state.current.u.back(), ev.traj.u.back())) < 1e-4);
}

TEST_CASE("sphere propagation check") {
    const GridSpec g = circle(32);
    Trajectory traj;
    traj.dt = 0.01;
    Field u(g, 3);
    for (std::size_t i = 0; i < g.total(); ++i) u.at(2, i) = 1.0;
    for (int m = 0; m < 6; ++m) {
        traj.u.push_back(u);
        traj.ut.push_back(Field(g, 3));
    }
    const picard::SpherePropagationReport rep = picard::sphere_propagation_check(traj);
    CHECK(rep.g_inf_max < 1e-14);
    CHECK(rep.wave_residual_g < 1e-12);
}

TEST_CASE("broken compatibility shows up in the sphere defect") {
    picard::WaveData data = bump_data(64, 0.05);
    // normal component breaks u0 . u1 = 0
    axpy(data.u1, 0.1, data.u0);
    picard::IterationParams p;
    p.T = 0.25;
    p.dt = 1e-3;
    const picard::IterationState state = picard::halfwave_iterate(data, p);
    const picard::SpherePropagationReport rep =
        picard::sphere_propagation_check(state.current);
    CHECK(rep.g_inf_max > 1e-3);
}
