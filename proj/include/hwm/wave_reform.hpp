#pragma once

#include "hwm/grid.hpp"
#include "hwm/halfwave.hpp"

namespace hwm {

struct WaveState {
    double t = 0.0;
    Field u;
    Field ut;  // independent time derivative, not recomputed
};

struct IdentityReport {
    double triple_product_defect = 0.0;   // a x (b x c) = b(a.c) - c(a.b)
    double graph_identity_defect = 0.0;   // max |u.Lap u + grad u . grad u|
    double dt_dot_identity_defect = 0.0;  // first-line dot with u vs -|ut|^2
};

struct ResidualReport {
    double x_l2 = 0.0;
    double tilde_e = 0.0;
    double wave_residual_l2 = 0.0;
    double measured_order = 0.0;  // filled by callers running refinement studies
};

// v - base (base.v)/|base|^2 pointwise. Requires |base| >= 0.5 everywhere.
Field projector_perp(const Field& base, const Field& v);

// The three lines of the second-order reformulation:
//   u(grad u . grad u - ut . ut)
//   + Pi_{u_perp}((-Lap)^{1/2}u)(u . (-Lap)^{1/2}u)
//   + u x (-Lap)^{1/2}(u x (-Lap)^{1/2}u) - u x (u x (-Lap)u)
Field wave_rhs(const Field& u, const Field& ut);

// Individual lines, exposed for diagnostics.
Field wave_rhs_selfterm(const Field& u, const Field& ut);            // line 1
Field wave_rhs_projector_line(const Field& u, const Field& base);    // line 2
Field wave_rhs_commutator_line(const Field& u, const Field& base);   // line 3

IdentityReport check_derivation_identities(const Field& u, unsigned rng_seed = 1);

// X = ut - u x (-Lap)^{1/2} u
Field x_residual(const Field& u, const Field& ut);

// (1/2) * integral |(-Lap)^{n/4-3/4} X|^2 dx, zero mode dropped.
double tilde_energy(const Field& x, int n);

// Centered-difference residual of the wave equation along a trajectory:
// L2 norm of d2u/dt2 - Lap u - wave_rhs(u, ut) over interior frames.
// Requires at least 5 frames.
double wave_residual(const Trajectory& traj);

}  // namespace hwm
