#pragma once

#include "irskg/channel.hpp"
#include "irskg/keyrate.hpp"

namespace irskg {

// Lifted form of the key-rate fraction f/g. With V = conj(v) v^T (so that
// Tr(B V) = |v^T beta|^2), every p-monomial of f and g maps to a trace:
//
//   p_U     -> c_u Tr(B V)         = c_u beta^H V beta
//   p_E     -> c_e Tr(X V)         = c_e psi^H V psi
//   p_U^2   -> c_u^2 Tr(B V B V)   = c_u^2 (beta^H V beta)^2
//   p_E^2   -> c_e^2 Tr(X V X V)
//   p_U p_E -> c_u c_e Tr(B V X V) = c_u c_e |beta^H V psi|^2
//
// Each quadratic term is the squared modulus of a linear functional of V, so the
// lifted f and g are convex on Hermitian matrices.
//
// Variances are stored divided by `scale` so the optimizer works with O(1)
// numbers; f scales as scale^4 and g as scale^3.
struct LiftedObjective {
    CVector beta;
    CVector psi;
    double c_u = 0.0;
    double c_e = 0.0;
    double sigma_u2 = 0.0;
    double sigma_e2 = 0.0;
    double sigma_n2 = 0.0;
    int M = 1;
    double scale = 1.0;
    // rate = log2(f / g) + rate_offset for the normalized f and g.
    double rate_offset = 0.0;

    int size() const { return static_cast<int>(beta.size()); }
};

// Normalizes by `scale`; pass 1 to keep raw units.
LiftedObjective make_objective(const EffectiveStatistics& stats, const GeometryVectors& geo, double scale);

// Normalizes by stats.sigma_u2.
LiftedObjective make_objective(const EffectiveStatistics& stats, const GeometryVectors& geo);

// The three linear functionals the lifted objective depends on.
struct LiftedMoments {
    double a = 0.0;        // beta^H V beta
    double e = 0.0;        // psi^H V psi
    Complex z{0.0, 0.0};   // beta^H V psi
};

LiftedMoments lifted_moments(const CMatrix& V, const LiftedObjective& obj);

// Rank-one moments for V = conj(v) v^T without forming V.
LiftedMoments rank_one_moments(const CVector& v, const LiftedObjective& obj);

double lift_f(const LiftedMoments& m, const LiftedObjective& obj);
double lift_g(const LiftedMoments& m, const LiftedObjective& obj);
double lift_f(const CMatrix& V, const LiftedObjective& obj);
double lift_g(const CMatrix& V, const LiftedObjective& obj);

// f(v) / g(v) for a unit-modulus v, in the objective's units.
double scalar_ratio(const CVector& v, const LiftedObjective& obj);

double rate_from_ratio(double ratio, const LiftedObjective& obj);

// Hermitian gradient in the real inner product <A, D> = Re Tr(A^H D), stored in
// the span of B, X and the beta/psi cross terms:
//
//   G = kb B + kx X + kz beta psi^H + conj(kz) psi beta^H
struct LowRankGradient {
    double kb = 0.0;
    double kx = 0.0;
    Complex kz{0.0, 0.0};

    LowRankGradient& operator+=(const LowRankGradient& o);
    LowRankGradient operator*(double s) const;
};

LowRankGradient gradient_f_coefficients(const LiftedMoments& m, const LiftedObjective& obj);
LowRankGradient gradient_g_coefficients(const LiftedMoments& m, const LiftedObjective& obj);

CMatrix materialize(const LowRankGradient& G, const LiftedObjective& obj);

// <G, V> = Re Tr(G^H V) evaluated from V's moments.
double inner_product(const LowRankGradient& G, const LiftedMoments& m);

CMatrix gradient_f(const CMatrix& V, const LiftedObjective& obj);
CMatrix gradient_g(const CMatrix& V, const LiftedObjective& obj);

}  // namespace irskg
