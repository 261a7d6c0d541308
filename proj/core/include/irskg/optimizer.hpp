#pragma once

#include <iosfwd>
#include <vector>

#include "irskg/elliptope.hpp"
#include "irskg/keyrate.hpp"
#include "irskg/lifted.hpp"
#include "irskg/random.hpp"
#include "irskg/scenario.hpp"

namespace irskg {

struct SubproblemResult {
    LiftedMatrix V;
    double objective = 0.0;  // surrogate value at V
    double anchor_objective = 0.0;
    int steps = 0;
    bool converged = false;
    Feasibility residuals;
};

// Maximizes the concave surrogate
//
//   f(V_m) + <grad f(V_m), V - V_m> - mu g(V)
//
// over the elliptope by projected gradient ascent with backtracking, starting at
// the anchor V_m. Never returns a point whose surrogate is below the anchor's.
// Throws ConvergenceError if settings.subproblem_cap steps do not reach
// settings.subproblem_tol.
SubproblemResult solve_subproblem(double mu, const LiftedMatrix& anchor, const LiftedObjective& obj,
                                  const SolverSettings& settings);

// As solve_subproblem, but stops quietly at the step cap.
SubproblemResult ascend_subproblem(double mu, const LiftedMatrix& anchor, const LiftedObjective& obj,
                                   const SolverSettings& settings, int step_cap);

struct InnerRecord {
    int outer = 0;
    int inner = 0;
    double mu = 0.0;
    double objective = 0.0;  // f(V) - mu g(V) after the re-anchored solve
    int steps = 0;
    double diag_residual = 0.0;
    double psd_residual = 0.0;
};

struct OptimizerTrace {
    std::vector<double> mu;  // mu^(0), mu^(1), ...
    std::vector<InnerRecord> inner;
    int outer_iterations = 0;
    int inner_iterations = 0;
    bool converged = false;
    double final_gap = 0.0;  // |f(V)/g(V) - mu| at the last outer iteration
    double relaxed_ratio = 0.0;
    double achieved_ratio = 0.0;
    double final_rate = 0.0;
    CVector final_v;
    int randomization_trials = 0;
    int best_trial = 0;
    int refinement_rounds = 0;
    Feasibility residuals;
};

struct DinkelbachResult {
    LiftedMatrix V;
    OptimizerTrace trace;
};

// Dinkelbach outer loop on mu = f/g; each outer iteration runs SCA re-anchoring
// of the linearized f until the objective gain drops below inner_tol. Returns the
// best iterate flagged non-converged when the caps are hit.
DinkelbachResult dinkelbach_sca(const LiftedObjective& obj, const LiftedMatrix& init, const SolverSettings& settings);

struct RandomizationResult {
    CVector v;
    double ratio = 0.0;
    int best_trial = 0;  // 0 is the principal-eigenvector candidate
    int candidates = 0;
};

// Draws xi ~ CN(0, V), maps each to v = exp(-j arg(xi)) (V models conj(v) v^T) and
// keeps the best ratio; candidate 0 is the phase of V's principal eigenvector.
// The first best candidate wins ties.
RandomizationResult gaussian_randomization(const LiftedMatrix& V, const LiftedObjective& obj, int trials, Rng& rng);

struct PhaseOptimization {
    CVector v;
    KeyRateReport report;
    OptimizerTrace trace;
};

// SDR + Dinkelbach + SCA from V = I, then Gaussian randomization. If a rank-one
// candidate beats the relaxed value the relaxation is restarted from that
// candidate, so the reported bound is never below the achieved ratio.
PhaseOptimization optimize_objective(const LiftedObjective& obj, const SolverSettings& settings, Rng& rng);

PhaseOptimization optimize_phases(const Scenario& scenario, const GeometryVectors& geo, const ChannelGains& gains,
                                  Rng& rng);

// Maximizer of I(H_A; H_B): that rate increases with p_U, which peaks at
// v_n = conj(beta_n) with p_U = c_u L^2.
CVector optimize_no_eve(const GeometryVectors& geo);

CVector random_phase_baseline(int elements, Rng& rng);

struct GridOptimum {
    CVector v;
    double ratio = 0.0;
    double rate = 0.0;
    long long evaluated = 0;
};

inline constexpr long long kGridBudget = 10'000'000;

// Exhaustive f/g over phases {2 pi k / K}. Throws BudgetError if K^L > kGridBudget.
GridOptimum brute_force_phases(const LiftedObjective& obj, int grid_points);

// iteration CSV: outer,inner,mu,objective,steps,diag_residual,psd_residual
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace);

}  // namespace irskg
