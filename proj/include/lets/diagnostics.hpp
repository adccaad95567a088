#pragma once

#include <cstdint>
#include <functional>

#include "lets/core.hpp"
#include "lets/rng.hpp"

namespace lets {

using ScalarField = std::function<double(const FeatureVector&)>;

// Trapezoid rule over an axis-aligned box (1-D or 2-D), with the cell count
// doubled until two successive estimates agree within tol.
struct GridIntegrator {
    FeatureVector lo;
    FeatureVector hi;
    double tol = 1e-6;
    std::size_t init_cells = 64;
    std::size_t max_refine = 14;
};

// Importance-sampled Monte Carlo integral for dimensions the grid rule does
// not cover: E[f(X)/density(X)] with X ~ sample.
struct McIntegrator {
    std::function<FeatureVector(Rng&)> sample;
    ScalarField density;
    std::uint64_t draws = 1000000;
};

double integrate(const ScalarField& f, const GridIntegrator& grid);
double integrate(const ScalarField& f, const McIntegrator& mc, Rng& rng);

// Class-conditional densities with class-0 weight u.
struct DensityPair {
    ScalarField p0;
    ScalarField p1;
    double u = 0.5;
};

// Large-sample limit of the cut-edge fraction R_n / n:
//   2uv * integral of p0 p1 / (u p0 + v p1),
// which equals 2uv whenever the densities coincide.
double asymptotic_cut_fraction(const DensityPair& dp, const GridIntegrator& grid);
double asymptotic_cut_fraction(const DensityPair& dp, const McIntegrator& mc, Rng& rng);
double asymptotic_cut_fraction_discrete(const std::vector<double>& p0_mass,
                                        const std::vector<double>& p1_mass, double u);

// Large-sample drift of the standardized cut statistic under a fixed query
// density:
//   (integral of 2 P(0|s) P(1|s) p(s) - 2uv) / sqrt(2uv [2uv + (a_d-1)(1-4uv)])
// where a_d is the dimension-dependent degree coefficient of the tree.
double fr_drift_limit(const ScalarField& posterior0, const ScalarField& density, double u,
                      double a_d, const GridIntegrator& grid);
double fr_drift_limit_discrete(const std::vector<double>& posterior0,
                               const std::vector<double>& mass, double u, double a_d);

// Expected squared log-ratio E_p[log^2(q/p)] over a shared finite support.
double kl2_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Joint law of (S, Z) on a finite feature support: mass per atom for each class.
struct DiscreteJoint {
    std::vector<double> mass0;
    std::vector<double> mass1;
};

// Variance of the information density log(P(Z|S)/P(Z)) under the joint law.
// With clip_eps > 0 the conditional is clamped into [clip_eps, 1 - clip_eps]
// before taking logs, matching what a clipped predictor can express.
double info_spectrum_variance(const DiscreteJoint& joint, double clip_eps = 0.0);

// Mutual information H(Z) - H(Z|S) in nats.
double mutual_information(const DiscreteJoint& joint);
double mutual_information(const ScalarField& posterior0, const ScalarField& density,
                          const GridIntegrator& grid);

struct PowerBoundInputs {
    std::size_t n_labels = 0; // label budget of the monitored run
    double alpha = 0.05;
    double mi = 0.0;    // mutual information I(S; Z) in nats
    double delta = 0.0; // information gain of the guided query scheme
    double eps1 = 0.0;  // worst-case squared log-ratio of predictor vs truth
    double eps2 = 0.0;  // same with the roles of the laws swapped
    double sigma = 0.0; // information-spectrum standard deviation bound
};

struct PowerBounds {
    double guided = 0.0;  // scheme that earns the delta gain
    double uniform = 0.0; // uniform-query reference
};

// Finite-sample rejection-probability lower bounds
//   guided  = Phi((log(alpha)/sqrt(N) + sqrt(N)(I + delta - 2 sqrt(eps1) - sqrt(eps2))) / D)
//   uniform = Phi((log(alpha)/sqrt(N) + sqrt(N)(I - sqrt(eps1))) / D)
// with shared scale D = sqrt(eps1 + sigma^2 + 2 sigma sqrt(eps1)).
PowerBounds power_lower_bounds(const PowerBoundInputs& in);

} // namespace lets
