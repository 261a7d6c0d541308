#pragma once

#include "irskg/channel.hpp"

namespace irskg {

// Hermitian PSD matrix with unit diagonal.
struct LiftedMatrix {
    CMatrix V;
};

struct Feasibility {
    double diag_residual = 0.0;   // max_n |V_nn - 1|
    double psd_residual = 0.0;    // max(0, -lambda_min) / max(lambda_max, 1)
    double hermitian_residual = 0.0;  // max |V - V^H|
};

Feasibility feasibility(const CMatrix& V);

// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
CMatrix project_psd(const CMatrix& A);

struct ElliptopeProjection {
    CMatrix V;
    int iterations = 0;
    double residual = 0.0;  // max |diag - 1| of the last PSD iterate
    bool converged = false;
};

// Euclidean projection onto {V >= 0, diag(V) = 1} by Dykstra's alternating
// projections between the PSD cone (with correction term) and the affine
// unit-diagonal set. Returns the unit-diagonal iterate, so the diagonal is exact
// and the PSD violation is bounded by `residual`.
ElliptopeProjection project_elliptope(const CMatrix& A, double tol, int max_iterations);

}  // namespace irskg
