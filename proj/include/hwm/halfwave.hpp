#pragma once

#include <optional>
#include <vector>

#include "hwm/grid.hpp"

namespace hwm {

struct State {
    double t = 0.0;
    Field u;
};

struct EvolutionParams {
    double dt = 1e-3;
    long steps = 0;
    bool project_each_step = false;
    long record_every = 1;
    // divergence thresholds, overridable from config
    double orth_hard_threshold = 1e-3;
    double norm_low = 0.9;
    double norm_high = 1.1;
    bool reverse = false;  // integrate with negated right-hand side
};

// Time-ordered (t, u, ut) frames at uniform spacing.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;  // spacing between recorded frames
    std::vector<Field> u;
    std::vector<Field> ut;

    std::size_t frames() const { return u.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

enum class RunStatus { ok, diverged };

struct EvolveResult {
    RunStatus status = RunStatus::ok;
    Trajectory traj;
    std::vector<double> energy;                 // per recorded frame
    std::vector<double> max_constraint_violation;
    std::vector<double> max_rhs_dot_u;
    std::vector<double> l2_change_from_initial;
};

// u x (-Delta)^{1/2} u. Output is pointwise orthogonal to u.
Field rhs_halfwave(const Field& u);

// E = integral |(-Delta)^{1/4} u|^2 dx, evaluated by lattice quadrature.
double energy(const Field& u);
// Same quantity via the Parseval sum; serves as an independent oracle.
double energy_spectral(const Field& u);

// max over the lattice of | |u(x)|^2 - 1 |
double constraint_violation(const Field& u);

// Normalize each sample to the unit sphere.
void project_to_sphere(Field& u);

// One classical RK4 step of du/dt = u x (-Delta)^{1/2} u.
State step(const State& s, const EvolutionParams& p);

EvolveResult evolve(const State& s0, const EvolutionParams& p);

}  // namespace hwm
