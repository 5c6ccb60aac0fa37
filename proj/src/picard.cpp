#include "hwm/picard.hpp"

#include <cmath>

#include "hwm/wave_reform.hpp"

namespace hwm::picard {

Trajectory linear_wave_solve(const WaveData& data, const std::vector<Field>* forcing,
                             double dt, long steps) {
    require_finite(data.u0, "linear_wave_solve");
    require_finite(data.u1, "linear_wave_solve");
    if (!(dt > 0.0) || steps < 0)
        throw std::invalid_argument("linear_wave_solve: bad dt/steps");
    if (forcing && static_cast<long>(forcing->size()) != steps + 1)
        throw std::invalid_argument("linear_wave_solve: forcing must cover every node");

    const GridSpec& g = data.u0.grid();
    const std::size_t S = g.total();
    const int C = data.u0.components();

    Spectrum uh = forward(data.u0);
    Spectrum vh = forward(data.u1);

    std::vector<double> omega(S);
    for (std::size_t i = 0; i < S; ++i) omega[i] = freq_norm(g, i);

    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt = dt;
    traj.u.reserve(steps + 1);
    traj.ut.reserve(steps + 1);
    traj.u.push_back(inverse(uh));
    traj.ut.push_back(inverse(vh));

    Spectrum fh_cur(g, C), fh_next(g, C);
    if (forcing) fh_cur = forward((*forcing)[0]);

    for (long m = 0; m < steps; ++m) {
        if (forcing) fh_next = forward((*forcing)[m + 1]);
        for (std::size_t i = 0; i < S; ++i) {
            const double w = omega[i];
            double c, s_over_w, ws;
            if (w == 0.0) {
                c = 1.0;
                s_over_w = dt;
                ws = 0.0;
            } else {
                c = std::cos(w * dt);
                s_over_w = std::sin(w * dt) / w;
                ws = w * std::sin(w * dt);
            }
            for (int cc = 0; cc < C; ++cc) {
                const cplx u0 = uh.at(cc, i);
                const cplx v0 = vh.at(cc, i);
                cplx u1 = c * u0 + s_over_w * v0;
                cplx v1 = -ws * u0 + c * v0;
                if (forcing) {
                    const cplx f0 = fh_cur.at(cc, i);
                    const cplx f1 = fh_next.at(cc, i);
                    u1 += 0.5 * dt * s_over_w * f0;
                    v1 += 0.5 * dt * (c * f0 + f1);
                }
                uh.at(cc, i) = u1;
                vh.at(cc, i) = v1;
            }
        }
        if (forcing) fh_cur = fh_next;
        traj.u.push_back(inverse(uh));
        traj.ut.push_back(inverse(vh));
    }
    return traj;
}

double trajectory_diff_norm(const Trajectory& a, const Trajectory& b) {
    if (a.frames() != b.frames())
        throw std::invalid_argument("trajectory_diff_norm: frame mismatch");
    const int n = a.u.front().grid().dim();
    const double e_hi = n / 2.0;
    const double e_lo = n / 2.0 - 1.0;
    double worst = 0.0;
    for (std::size_t m = 0; m < a.frames(); ++m) {
        const double du = std::sqrt(spectral_quadratic(
            sub(a.u[m], b.u[m]), [e_hi](double k) { return std::pow(k, 2.0 * e_hi); }));
        const double dv = std::sqrt(spectral_quadratic(
            sub(a.ut[m], b.ut[m]), [e_lo](double k) { return std::pow(k, 2.0 * e_lo); }));
        worst = std::max(worst, du + dv);
    }
    return worst;
}

double discrete_wave_energy(const Field& u, const Field& ut) {
    Spectrum uh = forward(u);
    Spectrum vh = forward(ut);
    double e = 0.0;
    for (std::size_t i = 0; i < uh.size(); ++i) {
        const double w = freq_norm(u.grid(), i);
        for (int c = 0; c < u.components(); ++c)
            e += std::norm(vh.at(c, i)) + w * w * std::norm(uh.at(c, i));
    }
    return e;
}

Field wavemap_nonlinearity(const Field& u, const Field& ut, bool dealias) {
    Field q(u.grid(), 1);
    for (const Field& g : gradient(u)) {
        Field gg = dot(g, g);
        axpy(q, 1.0, gg);
    }
    Field tt = dot(ut, ut);
    axpy(q, -1.0, tt);
    Field out = mul(q, u);
    return dealias ? dealias_two_thirds(out) : out;
}

namespace {

long step_count(const IterationParams& p) {
    return static_cast<long>(std::llround(p.T / p.dt));
}

bool non_contracting(const std::vector<double>& ratios) {
    if (ratios.size() < 3) return false;
    const std::size_t n = ratios.size();
    return ratios[n - 1] >= 1.0 && ratios[n - 2] >= 1.0 && ratios[n - 3] >= 1.0;
}

}  // namespace

FixedPointResult wavemap_iterate(const WaveData& data, const IterationParams& p) {
    FixedPointResult res;
    const long steps = step_count(p);
    res.traj = linear_wave_solve(data, nullptr, p.dt, steps);

    std::vector<double> ratios;
    for (int sweep = 0; sweep < p.inner_cap; ++sweep) {
        std::vector<Field> forcing;
        forcing.reserve(res.traj.frames());
        for (std::size_t m = 0; m < res.traj.frames(); ++m)
            forcing.push_back(wavemap_nonlinearity(res.traj.u[m], res.traj.ut[m], p.dealias));
        Trajectory next = linear_wave_solve(data, &forcing, p.dt, steps);
        const double diff = trajectory_diff_norm(next, res.traj);
        if (!res.diffs.empty() && res.diffs.back() > 0.0)
            ratios.push_back(diff / res.diffs.back());
        res.diffs.push_back(diff);
        res.traj = std::move(next);
        if (diff < p.tol_inner) {
            res.converged = true;
            res.status = IterStatus::converged;
            return res;
        }
        if (non_contracting(ratios)) {
            res.status = IterStatus::non_contraction;
            return res;
        }
    }
    res.status = IterStatus::hit_cap;
    return res;
}

IterationState halfwave_iterate(const WaveData& data, const IterationParams& p) {
    IterationState state;
    const long steps = step_count(p);

    // u^{(1)}: the wave map with the given data
    FixedPointResult wm = wavemap_iterate(data, p);
    Trajectory prev = std::move(wm.traj);
    state.log.push_back({1, static_cast<int>(wm.diffs.size()),
                         wm.diffs.empty() ? 0.0 : wm.diffs.back(), 0.0, 0.0, 0.0});
    if (wm.status == IterStatus::non_contraction) {
        state.status = IterStatus::non_contraction;
        state.current = std::move(prev);
        return state;
    }

    std::vector<double> outer_ratios;
    for (int j = 2; j <= p.outer_cap + 1; ++j) {
        state.j = j;

        // frozen pieces from u^{(j-1)}: the projector input of line 2 and the
        // full bracket of line 3
        std::vector<Field> frozen_vec, frozen_sc, frozen_line3;
        frozen_vec.reserve(prev.frames());
        for (std::size_t m = 0; m < prev.frames(); ++m) {
            const Field& up = prev.u[m];
            Field hu = frac_laplacian(up, 0.5);
            frozen_sc.push_back(dot(up, hu));
            frozen_vec.push_back(hu);
            Field first = cross(up, frac_laplacian(cross(up, hu), 0.5));
            Field minus_lap = scale(laplacian(up), -1.0);
            Field second = cross(up, cross(up, minus_lap));
            frozen_line3.push_back(sub(first, second));
        }

        Trajectory cur = linear_wave_solve(data, nullptr, p.dt, steps);  // u^{(j,0)}
        std::vector<double> inner_diffs, inner_ratios;
        bool inner_done = false;
        for (int i = 1; i <= p.inner_cap; ++i) {
            state.i = i;
            std::vector<Field> forcing;
            forcing.reserve(cur.frames());
            for (std::size_t m = 0; m < cur.frames(); ++m) {
                Field f = wavemap_nonlinearity(cur.u[m], cur.ut[m], p.dealias);
                Field l2 = mul(frozen_sc[m], projector_perp(cur.u[m], frozen_vec[m]));
                Field l3 = projector_perp(cur.u[m], frozen_line3[m]);
                axpy(f, 1.0, l2);
                axpy(f, 1.0, l3);
                forcing.push_back(std::move(f));
            }
            Trajectory next = linear_wave_solve(data, &forcing, p.dt, steps);
            const double diff = trajectory_diff_norm(next, cur);
            double ratio = 0.0;
            if (!inner_diffs.empty() && inner_diffs.back() > 0.0) {
                ratio = diff / inner_diffs.back();
                inner_ratios.push_back(ratio);
            }
            inner_diffs.push_back(diff);
            cur = std::move(next);

            double sphere_defect = 0.0, xres = 0.0;
            for (std::size_t m = 0; m < cur.frames(); ++m)
                sphere_defect = std::max(sphere_defect, constraint_violation(cur.u[m]));
            for (std::size_t m = 0; m < cur.frames(); ++m)
                xres = std::max(xres, l2_norm(x_residual(cur.u[m], cur.ut[m])));
            state.log.push_back({j, i, diff, ratio, sphere_defect, xres});

            if (diff < p.tol_inner) {
                inner_done = true;
                break;
            }
            if (non_contracting(inner_ratios)) {
                state.status = IterStatus::non_contraction;
                state.current = std::move(cur);
                return state;
            }
        }
        if (!inner_done) {
            state.status = IterStatus::hit_cap;
            state.current = std::move(cur);
            return state;
        }

        const double outer_diff = trajectory_diff_norm(cur, prev);
        double outer_ratio = 0.0;
        if (!state.outer_diffs.empty() && state.outer_diffs.back() > 0.0) {
            outer_ratio = outer_diff / state.outer_diffs.back();
            outer_ratios.push_back(outer_ratio);
        }
        state.outer_diffs.push_back(outer_diff);
        // summary row: i = 0 marks the outer comparison against u^{(j-1)}
        state.log.push_back({j, 0, outer_diff, outer_ratio,
                             state.log.back().sphere_defect, state.log.back().x_residual});
        prev = std::move(cur);

        if (outer_diff < p.tol_outer) {
            state.converged = true;
            state.status = IterStatus::converged;
            break;
        }
        if (non_contracting(outer_ratios)) {
            state.status = IterStatus::non_contraction;
            break;
        }
        if (j == p.outer_cap + 1) state.status = IterStatus::hit_cap;
    }
    state.current = std::move(prev);
    return state;
}

SpherePropagationReport sphere_propagation_check(const Trajectory& traj) {
    SpherePropagationReport rep;
    std::vector<Field> g;
    g.reserve(traj.frames());
    for (std::size_t m = 0; m < traj.frames(); ++m) {
        Field gm = dot(traj.u[m], traj.u[m]);
        for (double& v : gm.raw()) v -= 1.0;
        rep.g_inf.push_back(linf_norm(gm));
        rep.g_inf_max = std::max(rep.g_inf_max, rep.g_inf.back());
        g.push_back(std::move(gm));
    }
    if (traj.frames() >= 3) {
        const double dt = std::abs(traj.dt);
        for (std::size_t m = 1; m + 1 < traj.frames(); ++m) {
            Field gtt = g[m + 1];
            axpy(gtt, -2.0, g[m]);
            axpy(gtt, 1.0, g[m - 1]);
            for (double& v : gtt.raw()) v /= dt * dt;
            Field resid = sub(gtt, laplacian(g[m]));
            Field q(traj.u[m].grid(), 1);
            for (const Field& gr : gradient(traj.u[m])) {
                Field gg = dot(gr, gr);
                axpy(q, 1.0, gg);
            }
            Field tt = dot(traj.ut[m], traj.ut[m]);
            axpy(q, -1.0, tt);
            Field rhs = mul(q, g[m]);
            axpy(resid, -1.0, rhs);
            rep.wave_residual_g = std::max(rep.wave_residual_g, l2_norm(resid));
        }
    }
    return rep;
}

}  // namespace hwm::picard
