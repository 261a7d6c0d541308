#include "irskg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "irskg/errors.hpp"

namespace irskg {

namespace {

// f(V_m) + <grad f(V_m), V - V_m> - mu g(V), evaluated from moments of V.
struct Surrogate {
    const LiftedObjective& obj;
    double mu;
    double offset;  // f(V_m) - <grad f(V_m), V_m>
    double f_anchor;
    LowRankGradient grad_f;

    Surrogate(const LiftedObjective& o, double mu_, const LiftedMoments& anchor) : obj(o), mu(mu_) {
        grad_f = gradient_f_coefficients(anchor, obj);
        f_anchor = lift_f(anchor, obj);
        offset = f_anchor - inner_product(grad_f, anchor);
    }

    double value(const LiftedMoments& m) const { return offset + inner_product(grad_f, m) - mu * lift_g(m, obj); }

    LowRankGradient gradient(const LiftedMoments& m) const {
        LowRankGradient G = grad_f;
        G += gradient_g_coefficients(m, obj) * (-mu);
        return G;
    }
};

// Lipschitz bound of grad(mu g) in the Frobenius norm.
double curvature_bound(const LiftedObjective& o, double mu) {
    const double M = o.M;
    const double L2 = static_cast<double>(o.size()) * o.size();
    return mu * (2.0 * M * M * o.sigma_n2 * o.c_e * o.c_e * L2 + 4.0 * M * M * o.sigma_e2 * o.c_u * o.c_e * L2);
}

LiftedMoments difference(const LiftedMoments& a, const LiftedMoments& b) { return {a.a - b.a, a.e - b.e, a.z - b.z}; }

// Gains are measured against f, which sets the magnitude of f - mu g.
double relative_gain(double gain, double reference) {
    return gain / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

CVector unit_phases_conjugate(const CVector& x) {
    CVector v(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        v[n] = std::abs(x[n]) > 0.0 ? std::polar(1.0, -std::arg(x[n])) : Complex(1.0, 0.0);
    }
    return v;
}


struct AscentOutcome {
    int steps = 0;
    bool converged = false;
};

// V itself, restored to the elliptope by Dykstra after each gradient step.
struct ProjectedState {
    CMatrix V;
    LiftedMoments m;
    double step = -1.0;

    ProjectedState(CMatrix v, const LiftedObjective& obj) : V(std::move(v)), m(lifted_moments(V, obj)) {}

    const CMatrix& lifted() const { return V; }

    AscentOutcome ascend(const Surrogate& S, const SolverSettings& settings, int cap) {
        const LiftedObjective& obj = S.obj;
        const double lip = curvature_bound(obj, S.mu);
        AscentOutcome out;
        double value = S.value(m);
        for (int k = 0; k < cap; ++k) {
            const LowRankGradient G = S.gradient(m);
            const CMatrix Gm = materialize(G, obj);
            const double gnorm = Gm.norm();
            if (!(gnorm > 0.0)) {
                out.converged = true;
                break;
            }
            if (step < 0.0) {
                // Lipschitz step, but never longer than the elliptope's diameter.
                step = lip > 0.0 ? 1.0 / lip : 1.0;
                step = std::min(step, 2.0 * obj.size() / gnorm);
            }
            CMatrix candidate;
            LiftedMoments cm;
            double cvalue = value;
            bool accepted = false;
            for (int backtrack = 0; backtrack < 60; ++backtrack) {
                ElliptopeProjection p =
                    project_elliptope(V + step * Gm, settings.projection_tol, settings.projection_cap);
                cm = lifted_moments(p.V, obj);
                cvalue = S.value(cm);
                const double dist2 = (p.V - V).squaredNorm();
                const double model = value + inner_product(G, difference(cm, m)) - dist2 / (2.0 * step);
                if (cvalue >= model - 1e-14 * std::max(1.0, std::abs(value))) {
                    candidate = std::move(p.V);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            ++out.steps;
            if (!accepted || cvalue <= value) {
                out.converged = true;
                break;
            }
            const double gain = cvalue - value;
            V = std::move(candidate);
            m = cm;
            value = cvalue;
            if (relative_gain(gain, S.f_anchor) <= settings.subproblem_tol) {
                out.converged = true;
                break;
            }
            step *= 2.0;
        }
        return out;
    }
};

// V = U U^H with unit-norm rows of the square factor U.
struct FactoredState {
    CMatrix U;
    CVector ub;  // U^H beta
    CVector up;  // U^H psi
    LiftedMoments m;
    double step = -1.0;
    CMatrix prev_step;
    CMatrix prev_T;
    bool have_prev = false;
    mutable CMatrix cache;

    FactoredState(const CMatrix& V, const LiftedObjective& obj) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (V + V.adjoint()));
        U = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        normalize_rows(U);
        refresh(obj);
    }

    static void normalize_rows(CMatrix& A) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const double n = A.row(i).norm();
            if (n > 0.0) {
                A.row(i) /= n;
            } else {
                A.row(i).setZero();
                A(i, i % A.cols()) = 1.0;
            }
        }
    }

    void refresh(const LiftedObjective& obj) {
        ub = U.adjoint() * obj.beta;
        up = U.adjoint() * obj.psi;
        m = {ub.squaredNorm(), up.squaredNorm(), ub.dot(up)};
        cache.resize(0, 0);
    }

    const CMatrix& lifted() const {
        if (cache.size() == 0) {
            cache = U * U.adjoint();
        }
        return cache;
    }

    AscentOutcome ascend(const Surrogate& S, const SolverSettings& settings, int cap) {
        const LiftedObjective& obj = S.obj;
        AscentOutcome out;
        double value = S.value(m);
        for (int k = 0; k < cap; ++k) {
            // d/dU of S(U U^H) is 2 G U; G U only needs U^H beta and U^H psi.
            const LowRankGradient G = S.gradient(m);
            const CMatrix E = 2.0 * (obj.beta * (G.kb * ub.adjoint() + G.kz * up.adjoint()) +
                                     obj.psi * (G.kx * up.adjoint() + std::conj(G.kz) * ub.adjoint()));
            const Eigen::VectorXd radial = E.cwiseProduct(U.conjugate()).rowwise().sum().real();
            const CMatrix T = E - radial.asDiagonal() * U;
            const double t2 = T.squaredNorm();
            if (!(t2 > 0.0)) {
                out.converged = true;
                break;
            }
            if (step < 0.0) {
                step = 0.5 / std::sqrt(t2);
            } else if (have_prev) {
                // Barzilai-Borwein step from the last accepted move.
                const double sy = -(prev_step.cwiseProduct((T - prev_T).conjugate())).sum().real();
                if (sy > 0.0) {
                    step = prev_step.squaredNorm() / sy;
                }
            }
            FactoredState trial = *this;
            double tvalue = value;
            bool accepted = false;
            for (int backtrack = 0; backtrack < 60; ++backtrack) {
                trial.U = U + step * T;
                normalize_rows(trial.U);
                trial.refresh(obj);
                tvalue = S.value(trial.m);
                if (tvalue >= value + 1e-4 * step * t2) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            ++out.steps;
            if (!accepted || tvalue <= value) {
                out.converged = true;
                break;
            }
            const double gain = tvalue - value;
            prev_step = trial.U - U;
            prev_T = T;
            have_prev = true;
            U = std::move(trial.U);
            ub = std::move(trial.ub);
            up = std::move(trial.up);
            m = trial.m;
            cache.resize(0, 0);
            value = tvalue;
            if (relative_gain(gain, S.f_anchor) <= settings.subproblem_tol) {
                out.converged = true;
                break;
            }
            step *= 2.0;
        }
        return out;
    }
};

template <typename State>
SubproblemResult run_subproblem(double mu, const LiftedMatrix& anchor, const LiftedObjective& obj,
                                const SolverSettings& settings, int cap) {
    State state(anchor.V, obj);
    const Surrogate S(obj, mu, state.m);
    SubproblemResult out;
    out.anchor_objective = S.value(state.m);
    const AscentOutcome r = state.ascend(S, settings, cap);
    out.steps = r.steps;
    out.converged = r.converged;
    out.objective = S.value(state.m);
    out.V = LiftedMatrix{state.lifted()};
    out.residuals = feasibility(out.V.V);
    return out;
}

template <typename State>
DinkelbachResult run_dinkelbach(State state, const LiftedObjective& obj, const SolverSettings& settings) {
    DinkelbachResult out;
    OptimizerTrace& trace = out.trace;
    double mu = lift_f(state.m, obj) / lift_g(state.m, obj);
    trace.mu.push_back(mu);

    for (int t = 0; t < settings.outer_cap; ++t) {
        double objective = lift_f(state.m, obj) - mu * lift_g(state.m, obj);
        for (int inner = 0; inner < settings.inner_cap; ++inner) {
            const Surrogate S(obj, mu, state.m);
            State next = state;
            const AscentOutcome r = next.ascend(S, settings, settings.subproblem_cap);
            const double value = lift_f(next.m, obj) - mu * lift_g(next.m, obj);
            const Feasibility res = feasibility(next.lifted());
            ++trace.inner_iterations;
            trace.inner.push_back({t, inner, mu, value, r.steps, res.diag_residual, res.psd_residual});
            const double gain = value - objective;
            if (gain > 0.0) {
                state = std::move(next);
                objective = value;
            }
            if (relative_gain(gain, lift_f(state.m, obj)) <= settings.inner_tol) {
                break;
            }
        }
        ++trace.outer_iterations;
        const double ratio = lift_f(state.m, obj) / lift_g(state.m, obj);
        trace.final_gap = std::abs(ratio - mu);
        mu = std::max(mu, ratio);
        trace.mu.push_back(mu);
        if (trace.final_gap <= settings.outer_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.relaxed_ratio = lift_f(state.m, obj) / lift_g(state.m, obj);
    out.V = LiftedMatrix{state.lifted()};
    trace.residuals = feasibility(out.V.V);
    return out;
}

}  // namespace

SubproblemResult ascend_subproblem(double mu, const LiftedMatrix& anchor, const LiftedObjective& obj,
                                   const SolverSettings& settings, int step_cap) {
    if (mu < 0.0) {
        throw DomainError("Dinkelbach parameter mu must be >= 0");
    }
    if (settings.method == SubproblemMethod::kProjected) {
        return run_subproblem<ProjectedState>(mu, anchor, obj, settings, step_cap);
    }
    return run_subproblem<FactoredState>(mu, anchor, obj, settings, step_cap);
}

SubproblemResult solve_subproblem(double mu, const LiftedMatrix& anchor, const LiftedObjective& obj,
                                  const SolverSettings& settings) {
    SubproblemResult r = ascend_subproblem(mu, anchor, obj, settings, settings.subproblem_cap);
    if (!r.converged) {
        throw ConvergenceError("subproblem did not converge within the step cap", r.steps,
                               r.objective - r.anchor_objective);
    }
    return r;
}

DinkelbachResult dinkelbach_sca(const LiftedObjective& obj, const LiftedMatrix& init, const SolverSettings& settings) {
    if (settings.method == SubproblemMethod::kProjected) {
        return run_dinkelbach(ProjectedState(init.V, obj), obj, settings);
    }
    return run_dinkelbach(FactoredState(init.V, obj), obj, settings);
}

RandomizationResult gaussian_randomization(const LiftedMatrix& V, const LiftedObjective& obj, int trials, Rng& rng) {
    if (trials < 1) {
        throw DomainError("randomization needs at least one trial");
    }
    const Eigen::Index L = V.V.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (V.V + V.V.adjoint()));
    // Round-off eigenvalues would otherwise contribute sqrt(eps)-sized noise.
    const double floor = 1e-12 * std::max(eig.eigenvalues()[L - 1], 0.0);
    const Eigen::VectorXd lambda = (eig.eigenvalues().array() > floor).select(eig.eigenvalues(), 0.0);
    const CMatrix factor = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

    RandomizationResult best;
    best.v = unit_phases_conjugate(eig.eigenvectors().col(L - 1));
    best.ratio = scalar_ratio(best.v, obj);
    best.best_trial = 0;
    best.candidates = 1 + trials;

    CVector z(L);
    for (int i = 1; i <= trials; ++i) {
        for (Eigen::Index n = 0; n < L; ++n) {
            z[n] = complex_gaussian(rng, 1.0);
        }
        CVector v = unit_phases_conjugate(factor * z);
        const double ratio = scalar_ratio(v, obj);
        if (ratio > best.ratio) {
            best.ratio = ratio;
            best.v = std::move(v);
            best.best_trial = i;
        }
    }
    return best;
}

PhaseOptimization optimize_objective(const LiftedObjective& obj, const SolverSettings& settings, Rng& rng) {
    const int L = obj.size();
    DinkelbachResult relaxed = dinkelbach_sca(obj, LiftedMatrix{CMatrix::Identity(L, L)}, settings);
    RandomizationResult pick = gaussian_randomization(relaxed.V, obj, settings.randomization_trials, rng);
    OptimizerTrace trace = relaxed.trace;

    constexpr int kMaxRefinements = 3;
    int rounds = 0;
    // Restart only when the rank-one pick beats the relaxation by more than
    // rounding; a tight relaxation returns the same point to ~1e-12.
    constexpr double kRefineMargin = 1e-9;
    while (pick.ratio > trace.relaxed_ratio * (1.0 + kRefineMargin) && rounds < kMaxRefinements) {
        ++rounds;
        const CMatrix start = pick.v.conjugate() * pick.v.transpose();
        DinkelbachResult again = dinkelbach_sca(obj, LiftedMatrix{start}, settings);
        RandomizationResult repick = gaussian_randomization(again.V, obj, settings.randomization_trials, rng);
        const int outer_before = trace.outer_iterations;
        for (InnerRecord rec : again.trace.inner) {
            rec.outer += outer_before;
            trace.inner.push_back(rec);
        }
        trace.mu.insert(trace.mu.end(), again.trace.mu.begin(), again.trace.mu.end());
        trace.outer_iterations += again.trace.outer_iterations;
        trace.inner_iterations += again.trace.inner_iterations;
        trace.converged = again.trace.converged;
        trace.final_gap = again.trace.final_gap;
        trace.relaxed_ratio = again.trace.relaxed_ratio;
        trace.residuals = again.trace.residuals;
        relaxed.V = std::move(again.V);
        if (repick.ratio > pick.ratio) {
            pick = std::move(repick);
        }
    }
    trace.refinement_rounds = rounds;
    trace.randomization_trials = pick.candidates;
    trace.best_trial = pick.best_trial;
    trace.achieved_ratio = pick.ratio;
    trace.final_rate = rate_from_ratio(pick.ratio, obj);
    trace.final_v = pick.v;

    PhaseOptimization out;
    out.v = std::move(pick.v);
    out.trace = std::move(trace);
    return out;
}

PhaseOptimization optimize_phases(const Scenario& scenario, const GeometryVectors& geo, const ChannelGains& gains,
                                  Rng& rng) {
    const CVector ones = CVector::Ones(scenario.L);
    const EffectiveStatistics base = effective_stats(ones, geo, gains, scenario);
    const LiftedObjective obj = make_objective(base, geo);
    PhaseOptimization out = optimize_objective(obj, scenario.config.solver, rng);
    const EffectiveStatistics stats = effective_stats(out.v, geo, gains, scenario);
    out.report = key_rate_report(stats, geo.R_BS);
    out.report.relaxed_bound = rate_from_ratio(out.trace.relaxed_ratio, obj);
    return out;
}

CVector optimize_no_eve(const GeometryVectors& geo) { return geo.beta.conjugate(); }

CVector random_phase_baseline(int elements, Rng& rng) {
    if (elements < 1) {
        throw DomainError("IRS needs at least one element");
    }
    CVector v(elements);
    for (int n = 0; n < elements; ++n) {
        v[n] = std::polar(1.0, uniform_phase(rng));
    }
    return v;
}

GridOptimum brute_force_phases(const LiftedObjective& obj, int grid_points) {
    const int L = obj.size();
    if (grid_points < 1) {
        throw DomainError("grid needs at least one point");
    }
    long long total = 1;
    for (int n = 0; n < L; ++n) {
        total *= grid_points;
        if (total > kGridBudget) {
            throw BudgetError("exhaustive grid needs " + std::to_string(grid_points) + "^" + std::to_string(L) +
                              " evaluations; budget is " + std::to_string(kGridBudget));
        }
    }
    std::vector<Complex> points(grid_points);
    for (int k = 0; k < grid_points; ++k) {
        points[k] = std::polar(1.0, 2.0 * kPi * k / grid_points);
    }

    std::vector<int> digit(L, 0);
    CVector v = CVector::Constant(L, points[0]);
    GridOptimum best;
    best.ratio = -1.0;
    for (long long count = 0; count < total; ++count) {
        const double ratio = scalar_ratio(v, obj);
        if (ratio > best.ratio) {
            best.ratio = ratio;
            best.v = v;
        }
        for (int n = 0; n < L; ++n) {
            if (++digit[n] < grid_points) {
                v[n] = points[digit[n]];
                break;
            }
            digit[n] = 0;
            v[n] = points[0];
        }
    }
    best.evaluated = total;
    best.rate = rate_from_ratio(best.ratio, obj);
    return best;
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace) {
    out << "outer,inner,mu,objective,steps,diag_residual,psd_residual\n";
    char buf[160];
    for (const InnerRecord& r : trace.inner) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%d,%.6e,%.6e\n", r.outer, r.inner, r.mu, r.objective,
                      r.steps, r.diag_residual, r.psd_residual);
        out << buf;
    }
}

}  // namespace irskg
