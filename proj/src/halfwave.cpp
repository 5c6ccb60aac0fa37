#include "hwm/halfwave.hpp"

#include <cmath>

namespace hwm {

Field rhs_halfwave(const Field& u) {
    require_finite(u, "rhs_halfwave");
    return cross(u, frac_laplacian(u, 0.5));
}

double energy(const Field& u) {
    require_finite(u, "energy");
    Field q = frac_laplacian(u, 0.25);
    return l2_sq(q);
}

double energy_spectral(const Field& u) {
    return spectral_quadratic(u, [](double k) { return k; });
}

double constraint_violation(const Field& u) {
    double worst = 0.0;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < u.components(); ++c) s += u.at(c, i) * u.at(c, i);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

void project_to_sphere(Field& u) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < u.components(); ++c) s += u.at(c, i) * u.at(c, i);
        const double inv = 1.0 / std::sqrt(s);
        for (int c = 0; c < u.components(); ++c) u.at(c, i) *= inv;
    }
}

namespace {

Field rk4_rhs(const Field& u, bool reverse) {
    Field r = rhs_halfwave(u);
    if (reverse)
        for (double& v : r.raw()) v = -v;
    return r;
}

bool norm_in_range(const Field& u, double lo, double hi) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < u.components(); ++c) s += u.at(c, i) * u.at(c, i);
        const double r = std::sqrt(s);
        if (!(r >= lo && r <= hi)) return false;
    }
    return true;
}

}  // namespace

State step(const State& s, const EvolutionParams& p) {
    const double h = p.dt;
    const Field& u = s.u;

    Field k1 = rk4_rhs(u, p.reverse);
    Field u2 = u;
    axpy(u2, 0.5 * h, k1);
    Field k2 = rk4_rhs(u2, p.reverse);
    Field u3 = u;
    axpy(u3, 0.5 * h, k2);
    Field k3 = rk4_rhs(u3, p.reverse);
    Field u4 = u;
    axpy(u4, h, k3);
    Field k4 = rk4_rhs(u4, p.reverse);

    State out;
    out.t = s.t + (p.reverse ? -h : h);
    out.u = u;
    axpy(out.u, h / 6.0, k1);
    axpy(out.u, h / 3.0, k2);
    axpy(out.u, h / 3.0, k3);
    axpy(out.u, h / 6.0, k4);
    if (p.project_each_step) project_to_sphere(out.u);
    return out;
}

EvolveResult evolve(const State& s0, const EvolutionParams& p) {
    EvolveResult res;
    res.traj.t0 = s0.t;
    res.traj.dt = p.dt * static_cast<double>(p.record_every) * (p.reverse ? -1.0 : 1.0);

    const double e0 = energy(s0.u);
    const Field u0 = s0.u;

    auto record = [&](const State& s) {
        Field rhs = rhs_halfwave(s.u);
        double worst_dot = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) d += rhs.at(c, i) * s.u.at(c, i);
            worst_dot = std::max(worst_dot, std::abs(d));
        }
        res.traj.u.push_back(s.u);
        res.traj.ut.push_back(std::move(rhs));
        res.energy.push_back(energy(s.u));
        res.max_constraint_violation.push_back(constraint_violation(s.u));
        res.max_rhs_dot_u.push_back(worst_dot);
        res.l2_change_from_initial.push_back(l2_norm(sub(s.u, u0)));
        (void)e0;
    };

    State s = s0;
    record(s);
    for (long i = 0; i < p.steps; ++i) {
        s = step(s, p);
        if (!s.u.all_finite() || !norm_in_range(s.u, p.norm_low, p.norm_high)) {
            res.status = RunStatus::diverged;
            return res;
        }
        if ((i + 1) % p.record_every == 0) record(s);
    }
    return res;
}

}  // namespace hwm
