#pragma once

#include <vector>

#include "hwm/grid.hpp"
#include "hwm/halfwave.hpp"

namespace hwm::picard {

struct WaveData {
    Field u0;  // sphere-valued, equal to the background direction outside a bump
    Field u1;  // tangent: u0 . u1 = 0 pointwise
};

enum class IterStatus { converged, hit_cap, non_contraction };

struct IterationRow {
    int j = 0;
    int i = 0;
    double diff_norm = 0.0;
    double ratio = 0.0;
    double sphere_defect = 0.0;
    double x_residual = 0.0;
};

struct IterationState {
    int j = 0;
    int i = 0;
    Trajectory current;
    std::vector<double> outer_diffs;
    bool converged = false;
    IterStatus status = IterStatus::converged;
    std::vector<IterationRow> log;
};

struct IterationParams {
    double T = 0.5;
    double dt = 1e-3;
    double tol_outer = 1e-8;
    double tol_inner = 1e-9;
    int outer_cap = 15;
    int inner_cap = 25;
    bool dealias = true;  // 2/3-rule truncation of nonlinear products
};

// Exact per-mode propagator for Box u = F with trapezoid Duhamel quadrature.
// The forcing, when present, must be sampled at every node (steps + 1 frames).
// Mode xi != 0 rotates by (cos |xi| dt, sin |xi| dt / |xi|); the zero mode
// drifts linearly.
Trajectory linear_wave_solve(const WaveData& data, const std::vector<Field>* forcing,
                             double dt, long steps);

// sup-in-t Sobolev proxy for the S norm used as the contraction metric:
// sup_t ( Hdot^{n/2}(du) + Hdot^{n/2-1}(dut) )
double trajectory_diff_norm(const Trajectory& a, const Trajectory& b);

// Discrete wave energy sum_xi (|uthat|^2 + |xi|^2 |uhat|^2), conserved
// exactly per mode by the free propagator.
double discrete_wave_energy(const Field& u, const Field& ut);

// Wave-maps self-nonlinearity u(grad u.grad u - ut.ut), optionally dealiased.
Field wavemap_nonlinearity(const Field& u, const Field& ut, bool dealias);

struct FixedPointResult {
    Trajectory traj;
    std::vector<double> diffs;
    bool converged = false;
    IterStatus status = IterStatus::converged;
};

// First iterate: the wave map with the given data, by Duhamel fixed point
// starting from the free evolution.
FixedPointResult wavemap_iterate(const WaveData& data, const IterationParams& p);

// Outer/inner scheme for the full reformulated equation. The nonlocal lines
// are frozen at the previous outer iterate; the orthogonal projector follows
// the previous inner iterate.
IterationState halfwave_iterate(const WaveData& data, const IterationParams& p);

struct SpherePropagationReport {
    double g_inf_max = 0.0;          // max over frames of || |u|^2 - 1 ||_inf
    double wave_residual_g = 0.0;    // residual of Box g = g(grad u.grad u - ut.ut)
    std::vector<double> g_inf;       // per frame
};

SpherePropagationReport sphere_propagation_check(const Trajectory& traj);

}  // namespace hwm::picard
