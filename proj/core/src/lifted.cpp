#include "irskg/lifted.hpp"

#include <cmath>

#include "irskg/errors.hpp"

namespace irskg {

LiftedObjective make_objective(const EffectiveStatistics& stats, const GeometryVectors& geo, double scale) {
    if (!(scale > 0.0)) {
        throw DomainError("objective scale must be positive");
    }
    LiftedObjective o;
    o.beta = geo.beta;
    o.psi = geo.psi;
    o.c_u = stats.c_u / scale;
    o.c_e = stats.c_e / scale;
    o.sigma_u2 = stats.sigma_u2 / scale;
    o.sigma_e2 = stats.sigma_e2 / scale;
    o.sigma_n2 = stats.sigma_n2 / scale;
    o.M = stats.M;
    o.scale = scale;
    o.rate_offset = rate_constant(stats) + std::log2(scale);
    return o;
}

LiftedObjective make_objective(const EffectiveStatistics& stats, const GeometryVectors& geo) {
    return make_objective(stats, geo, stats.sigma_u2);
}

LiftedMoments lifted_moments(const CMatrix& V, const LiftedObjective& obj) {
    const CVector Vb = V * obj.beta;
    const CVector Vp = V * obj.psi;
    LiftedMoments m;
    m.a = obj.beta.dot(Vb).real();
    m.e = obj.psi.dot(Vp).real();
    m.z = obj.beta.dot(Vp);
    return m;
}

LiftedMoments rank_one_moments(const CVector& v, const LiftedObjective& obj) {
    // beta^H conj(v) v^T psi = conj(v^T beta) (v^T psi)
    const Complex vb = (v.transpose() * obj.beta)(0);
    const Complex vp = (v.transpose() * obj.psi)(0);
    LiftedMoments m;
    m.a = std::norm(vb);
    m.e = std::norm(vp);
    m.z = std::conj(vb) * vp;
    return m;
}

double lift_f(const LiftedMoments& m, const LiftedObjective& o) {
    const double M = o.M;
    const double su = o.sigma_u2;
    const double se = o.sigma_e2;
    const double pu = o.c_u * m.a;
    const double pe = o.c_e * m.e;
    const double pupe = o.c_u * o.c_e * std::norm(m.z);
    return su * su * se * se + 2.0 * M * M * se * su * pupe + M * M * se * se * pu * pu +
           2.0 * M * su * su * se * pe + M * M * su * su * pe * pe + 2.0 * M * su * se * se * pu;
}

double lift_g(const LiftedMoments& m, const LiftedObjective& o) {
    const double M = o.M;
    const double se = o.sigma_e2;
    const double sn = o.sigma_n2;
    const double pu = o.c_u * m.a;
    const double pe = o.c_e * m.e;
    const double pupe = o.c_u * o.c_e * std::norm(m.z);
    return se * se * sn + M * M * sn * pe * pe + 2.0 * M * M * se * pupe + 2.0 * M * se * se * pu +
           2.0 * M * sn * se * pe;
}

double lift_f(const CMatrix& V, const LiftedObjective& obj) { return lift_f(lifted_moments(V, obj), obj); }
double lift_g(const CMatrix& V, const LiftedObjective& obj) { return lift_g(lifted_moments(V, obj), obj); }

double scalar_ratio(const CVector& v, const LiftedObjective& obj) {
    const LiftedMoments m = rank_one_moments(v, obj);
    return lift_f(m, obj) / lift_g(m, obj);
}

double rate_from_ratio(double ratio, const LiftedObjective& obj) { return std::log2(ratio) + obj.rate_offset; }

LowRankGradient& LowRankGradient::operator+=(const LowRankGradient& o) {
    kb += o.kb;
    kx += o.kx;
    kz += o.kz;
    return *this;
}

LowRankGradient LowRankGradient::operator*(double s) const { return {kb * s, kx * s, kz * s}; }

// d/dV of |z|^2 with z = beta^H V psi is z beta psi^H + conj(z) psi beta^H.
LowRankGradient gradient_f_coefficients(const LiftedMoments& m, const LiftedObjective& o) {
    const double M = o.M;
    const double su = o.sigma_u2;
    const double se = o.sigma_e2;
    LowRankGradient G;
    G.kb = 2.0 * M * M * se * se * o.c_u * o.c_u * m.a + 2.0 * M * su * se * se * o.c_u;
    G.kx = 2.0 * M * su * su * se * o.c_e + 2.0 * M * M * su * su * o.c_e * o.c_e * m.e;
    G.kz = 2.0 * M * M * se * su * o.c_u * o.c_e * m.z;
    return G;
}

LowRankGradient gradient_g_coefficients(const LiftedMoments& m, const LiftedObjective& o) {
    const double M = o.M;
    const double se = o.sigma_e2;
    const double sn = o.sigma_n2;
    LowRankGradient G;
    G.kb = 2.0 * M * se * se * o.c_u;
    G.kx = 2.0 * M * M * sn * o.c_e * o.c_e * m.e + 2.0 * M * sn * se * o.c_e;
    G.kz = 2.0 * M * M * se * o.c_u * o.c_e * m.z;
    return G;
}

CMatrix materialize(const LowRankGradient& G, const LiftedObjective& o) {
    const CMatrix cross = G.kz * (o.beta * o.psi.adjoint());
    return G.kb * (o.beta * o.beta.adjoint()) + G.kx * (o.psi * o.psi.adjoint()) + cross + cross.adjoint();
}

double inner_product(const LowRankGradient& G, const LiftedMoments& m) {
    // Tr(B V) = a, Tr(X V) = e, Tr(beta psi^H V) = conj(z), Tr(psi beta^H V) = z
    return G.kb * m.a + G.kx * m.e + 2.0 * (G.kz * std::conj(m.z)).real();
}

CMatrix gradient_f(const CMatrix& V, const LiftedObjective& obj) {
    return materialize(gradient_f_coefficients(lifted_moments(V, obj), obj), obj);
}

CMatrix gradient_g(const CMatrix& V, const LiftedObjective& obj) {
    return materialize(gradient_g_coefficients(lifted_moments(V, obj), obj), obj);
}

}  // namespace irskg
