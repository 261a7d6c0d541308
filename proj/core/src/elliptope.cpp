#include "irskg/elliptope.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace irskg {

Feasibility feasibility(const CMatrix& V) {
    Feasibility f;
    f.diag_residual = (V.diagonal().array() - Complex(1.0, 0.0)).abs().maxCoeff();
    f.hermitian_residual = (V - V.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (V + V.adjoint()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    f.psd_residual = std::max(0.0, -lambda[0]) / std::max(lambda[lambda.size() - 1], 1.0);
    return f;
}

CMatrix project_psd(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (A + A.adjoint()));
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    const CMatrix& U = eig.eigenvectors();
    return U * clipped.asDiagonal() * U.adjoint();
}

ElliptopeProjection project_elliptope(const CMatrix& A, double tol, int max_iterations) {
    const Eigen::Index n = A.rows();
    ElliptopeProjection out;
    CMatrix Y = 0.5 * (A + A.adjoint());
    CMatrix correction = CMatrix::Zero(n, n);
    for (int k = 1; k <= max_iterations; ++k) {
        const CMatrix R = Y - correction;
        const CMatrix X = project_psd(R);
        correction = X - R;
        Y = X;
        Y.diagonal().setOnes();
        out.iterations = k;
        out.residual = (X.diagonal().array() - Complex(1.0, 0.0)).abs().maxCoeff();
        if (out.residual <= tol) {
            out.converged = true;
            break;
        }
    }
    out.V = std::move(Y);
    return out;
}

}  // namespace irskg
