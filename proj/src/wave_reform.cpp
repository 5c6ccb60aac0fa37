#include "hwm/wave_reform.hpp"

#include <cmath>
#include <random>

namespace hwm {

Field projector_perp(const Field& base, const Field& v) {
    if (base.components() != 3 || v.components() != 3)
        throw std::invalid_argument("projector_perp: needs 3-component fields");
    const std::size_t n = base.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += base.at(c, i) * base.at(c, i);
        if (s < 0.25) throw std::invalid_argument("projector_perp: |base| < 0.5 somewhere");
    }
    Field out = v;
    for (std::size_t i = 0; i < n; ++i) {
        double bb = 0.0, bv = 0.0;
        for (int c = 0; c < 3; ++c) {
            bb += base.at(c, i) * base.at(c, i);
            bv += base.at(c, i) * v.at(c, i);
        }
        const double a = bv / bb;
        for (int c = 0; c < 3; ++c) out.at(c, i) -= a * base.at(c, i);
    }
    return out;
}

Field wave_rhs_selfterm(const Field& u, const Field& ut) {
    Field q(u.grid(), 1);
    for (const Field& g : gradient(u)) {
        Field gg = dot(g, g);
        axpy(q, 1.0, gg);
    }
    Field tt = dot(ut, ut);
    axpy(q, -1.0, tt);
    return mul(q, u);
}

Field wave_rhs_projector_line(const Field& u, const Field& base) {
    Field hu = frac_laplacian(u, 0.5);
    return mul(dot(u, hu), projector_perp(base, hu));
}

Field wave_rhs_commutator_line(const Field& u, const Field& base) {
    Field hu = frac_laplacian(u, 0.5);
    Field first = cross(base, frac_laplacian(cross(u, hu), 0.5));
    Field minus_lap = scale(laplacian(u), -1.0);
    Field second = cross(base, cross(u, minus_lap));
    return sub(first, second);
}

Field wave_rhs(const Field& u, const Field& ut) {
    require_finite(u, "wave_rhs");
    require_finite(ut, "wave_rhs");
    Field out = wave_rhs_selfterm(u, ut);
    Field l2 = wave_rhs_projector_line(u, u);
    Field l3 = wave_rhs_commutator_line(u, u);
    axpy(out, 1.0, l2);
    axpy(out, 1.0, l3);
    return out;
}

IdentityReport check_derivation_identities(const Field& u, unsigned rng_seed) {
    IdentityReport rep;

    // (a) triple-product identity on random vector triples
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        double a[3], b[3], c[3];
        for (int i = 0; i < 3; ++i) {
            a[i] = dist(rng);
            b[i] = dist(rng);
            c[i] = dist(rng);
        }
        double bc[3] = {b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2],
                        b[0] * c[1] - b[1] * c[0]};
        double lhs[3] = {a[1] * bc[2] - a[2] * bc[1], a[2] * bc[0] - a[0] * bc[2],
                         a[0] * bc[1] - a[1] * bc[0]};
        const double ac = a[0] * c[0] + a[1] * c[1] + a[2] * c[2];
        const double ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        for (int i = 0; i < 3; ++i) {
            const double rhs = b[i] * ac - c[i] * ab;
            rep.triple_product_defect =
                std::max(rep.triple_product_defect, std::abs(lhs[i] - rhs));
        }
    }

    // (b) u.Lap u + grad u . grad u = 0 for sphere-valued u
    Field uu = u;
    project_to_sphere(uu);
    Field lap = laplacian(uu);
    Field defect = dot(uu, lap);
    for (const Field& g : gradient(uu)) {
        Field gg = dot(g, g);
        axpy(defect, 1.0, gg);
    }
    rep.graph_identity_defect = linf_norm(defect);

    // (c) first line of the pre-projection form dotted with u equals -|ut|^2
    // when ut = u x (-Lap)^{1/2} u
    Field hu = frac_laplacian(uu, 0.5);
    Field ut = cross(uu, hu);
    Field line = sub(mul(dot(uu, hu), hu), mul(dot(hu, hu), uu));
    Field lhs = dot(line, uu);
    Field rhs = scale(dot(ut, ut), -1.0);
    rep.dt_dot_identity_defect = linf_norm(sub(lhs, rhs));
    return rep;
}

Field x_residual(const Field& u, const Field& ut) {
    return sub(ut, rhs_halfwave(u));
}

double tilde_energy(const Field& x, int n) {
    if (n != x.grid().dim()) throw std::invalid_argument("tilde_energy: dimension mismatch");
    // weight on |xhat|^2 is the square of the |xi|^{n/2-3/2} multiplier
    const double e = static_cast<double>(n) - 3.0;
    return 0.5 * spectral_quadratic(x, [e](double k) { return std::pow(k, e); });
}

double wave_residual(const Trajectory& traj) {
    if (traj.frames() < 5) throw std::invalid_argument("wave_residual: needs >= 5 frames");
    const double dt = std::abs(traj.dt);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.frames(); ++i) {
        Field utt = traj.u[i + 1];
        axpy(utt, -2.0, traj.u[i]);
        axpy(utt, 1.0, traj.u[i - 1]);
        for (double& v : utt.raw()) v /= dt * dt;

        Field resid = sub(utt, laplacian(traj.u[i]));
        Field rhs = wave_rhs(traj.u[i], traj.ut[i]);
        axpy(resid, -1.0, rhs);
        worst = std::max(worst, l2_norm(resid));
    }
    return worst;
}

}  // namespace hwm
