#include "lets/diagnostics.hpp"

#include <cmath>

#include "lets/graph_fr.hpp"

namespace lets {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double binary_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

void check_prior(double u) {
    require(std::isfinite(u) && u > 0.0 && u < 1.0, ErrorCode::BadProbability,
            "class prior must lie in (0, 1)");
}

void check_distribution(const std::vector<double>& p, const char* what) {
    require(!p.empty(), ErrorCode::InvalidArgument, std::string(what) + " is empty");
    double total = 0.0;
    for (double x : p) {
        require(std::isfinite(x) && x >= 0.0, ErrorCode::BadProbability,
                std::string(what) + " has negative or non-finite mass");
        total += x;
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::BadProbability,
            std::string(what) + " must sum to 1");
}

double trapezoid_1d(const ScalarField& f, double lo, double hi, std::size_t cells) {
    double h = (hi - lo) / static_cast<double>(cells);
    FeatureVector x(1);
    x[0] = lo;
    double sum = 0.5 * f(x);
    for (std::size_t i = 1; i < cells; ++i) {
        x[0] = lo + h * static_cast<double>(i);
        sum += f(x);
    }
    x[0] = hi;
    sum += 0.5 * f(x);
    return sum * h;
}

double trapezoid_2d(const ScalarField& f, const FeatureVector& lo, const FeatureVector& hi,
                    std::size_t cells) {
    double hx = (hi[0] - lo[0]) / static_cast<double>(cells);
    double hy = (hi[1] - lo[1]) / static_cast<double>(cells);
    FeatureVector x(2);
    double sum = 0.0;
    for (std::size_t i = 0; i <= cells; ++i) {
        x[0] = lo[0] + hx * static_cast<double>(i);
        double wx = (i == 0 || i == cells) ? 0.5 : 1.0;
        for (std::size_t j = 0; j <= cells; ++j) {
            x[1] = lo[1] + hy * static_cast<double>(j);
            double wy = (j == 0 || j == cells) ? 0.5 : 1.0;
            sum += wx * wy * f(x);
        }
    }
    return sum * hx * hy;
}

// Cut-fraction integrand with the 0/0 corner (both densities vanish) read as 0.
double cut_fraction_term(double p0, double p1, double u) {
    double denom = u * p0 + (1.0 - u) * p1;
    if (denom <= 0.0) return 0.0;
    return 2.0 * u * (1.0 - u) * p0 * p1 / denom;
}

} // namespace

double integrate(const ScalarField& f, const GridIntegrator& grid) {
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "integrand is empty");
    const std::size_t dim = grid.lo.size();
    require(dim >= 1 && dim <= 2, ErrorCode::IntegrationFailure,
            "grid rule covers 1-D and 2-D boxes only");
    require(grid.hi.size() == dim, ErrorCode::DimensionMismatch,
            "integration box bounds are inconsistent");
    for (std::size_t j = 0; j < dim; ++j) {
        require(std::isfinite(grid.lo[j]) && std::isfinite(grid.hi[j]) &&
                    grid.lo[j] < grid.hi[j],
                ErrorCode::InvalidArgument, "integration box must have positive extent");
    }
    require(grid.init_cells >= 2, ErrorCode::InvalidArgument,
            "grid needs at least two cells");
    require(grid.tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");

    std::size_t cells = grid.init_cells;
    double prev = dim == 1 ? trapezoid_1d(f, grid.lo[0], grid.hi[0], cells)
                           : trapezoid_2d(f, grid.lo, grid.hi, cells);
    for (std::size_t r = 0; r < grid.max_refine; ++r) {
        cells *= 2;
        double cur = dim == 1 ? trapezoid_1d(f, grid.lo[0], grid.hi[0], cells)
                              : trapezoid_2d(f, grid.lo, grid.hi, cells);
        if (std::abs(cur - prev) < grid.tol) return cur;
        prev = cur;
    }
    fail(ErrorCode::IntegrationFailure, "grid refinement did not converge");
}

double integrate(const ScalarField& f, const McIntegrator& mc, Rng& rng) {
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "integrand is empty");
    require(static_cast<bool>(mc.sample) && static_cast<bool>(mc.density),
            ErrorCode::InvalidArgument, "Monte Carlo rule needs a sampler and its density");
    require(mc.draws >= 1, ErrorCode::InvalidArgument, "need at least one draw");
    double sum = 0.0;
    for (std::uint64_t i = 0; i < mc.draws; ++i) {
        FeatureVector x = mc.sample(rng);
        double m = mc.density(x);
        require(m > 0.0, ErrorCode::IntegrationFailure,
                "sampler produced a point of zero density");
        sum += f(x) / m;
    }
    return sum / static_cast<double>(mc.draws);
}

double asymptotic_cut_fraction(const DensityPair& dp, const GridIntegrator& grid) {
    check_prior(dp.u);
    return integrate(
        [&](const FeatureVector& s) {
            return cut_fraction_term(dp.p0(s), dp.p1(s), dp.u);
        },
        grid);
}

double asymptotic_cut_fraction(const DensityPair& dp, const McIntegrator& mc, Rng& rng) {
    check_prior(dp.u);
    return integrate(
        [&](const FeatureVector& s) {
            return cut_fraction_term(dp.p0(s), dp.p1(s), dp.u);
        },
        mc, rng);
}

double asymptotic_cut_fraction_discrete(const std::vector<double>& p0_mass,
                                        const std::vector<double>& p1_mass, double u) {
    check_prior(u);
    check_distribution(p0_mass, "class-0 mass");
    check_distribution(p1_mass, "class-1 mass");
    require(p0_mass.size() == p1_mass.size(), ErrorCode::LengthMismatch,
            "class masses must share one support");
    double total = 0.0;
    for (std::size_t i = 0; i < p0_mass.size(); ++i) {
        total += cut_fraction_term(p0_mass[i], p1_mass[i], u);
    }
    return total;
}

namespace {

double fr_drift_from_parts(double posterior_product_mean, double u, double a_d) {
    double uv2 = 2.0 * u * (1.0 - u);
    double inner = uv2 + (a_d - 1.0) * (1.0 - 2.0 * uv2);
    double denom_sq = uv2 * inner;
    require(denom_sq > 0.0, ErrorCode::ZeroDenominator,
            "degree coefficient makes the limit variance vanish");
    return (posterior_product_mean - uv2) / std::sqrt(denom_sq);
}

} // namespace

double fr_drift_limit(const ScalarField& posterior0, const ScalarField& density, double u,
                      double a_d, const GridIntegrator& grid) {
    check_prior(u);
    double mean = integrate(
        [&](const FeatureVector& s) {
            double p0 = posterior0(s);
            return 2.0 * p0 * (1.0 - p0) * density(s);
        },
        grid);
    return fr_drift_from_parts(mean, u, a_d);
}

double fr_drift_limit_discrete(const std::vector<double>& posterior0,
                               const std::vector<double>& mass, double u, double a_d) {
    check_prior(u);
    check_distribution(mass, "query density");
    require(posterior0.size() == mass.size(), ErrorCode::LengthMismatch,
            "posterior and density supports differ");
    double mean = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        require(posterior0[i] >= 0.0 && posterior0[i] <= 1.0, ErrorCode::BadProbability,
                "posteriors must lie in [0, 1]");
        mean += 2.0 * posterior0[i] * (1.0 - posterior0[i]) * mass[i];
    }
    return fr_drift_from_parts(mean, u, a_d);
}

double kl2_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    check_distribution(p, "base distribution");
    check_distribution(q, "comparison distribution");
    require(p.size() == q.size(), ErrorCode::LengthMismatch,
            "distributions must share one support");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        require(q[i] > 0.0, ErrorCode::SupportMismatch,
                "comparison distribution vanishes on the base support");
        double r = std::log(q[i] / p[i]);
        total += p[i] * r * r;
    }
    return total;
}

namespace {

struct JointView {
    double pz1 = 0.0; // label marginal P(Z = 1)
};

JointView check_joint(const DiscreteJoint& joint, const char* what) {
    require(!joint.mass0.empty() && joint.mass0.size() == joint.mass1.size(),
            ErrorCode::LengthMismatch, std::string(what) + " has inconsistent supports");
    double total = 0.0, ones = 0.0;
    for (std::size_t i = 0; i < joint.mass0.size(); ++i) {
        require(std::isfinite(joint.mass0[i]) && joint.mass0[i] >= 0.0 &&
                    std::isfinite(joint.mass1[i]) && joint.mass1[i] >= 0.0,
                ErrorCode::BadProbability,
                std::string(what) + " has negative or non-finite mass");
        total += joint.mass0[i] + joint.mass1[i];
        ones += joint.mass1[i];
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::DegenerateJoint,
            std::string(what) + " must have unit mass");
    require(ones > 0.0 && ones < 1.0, ErrorCode::DegenerateJoint,
            std::string(what) + " is single-class");
    return {ones};
}

} // namespace

double info_spectrum_variance(const DiscreteJoint& joint, double clip_eps) {
    require(clip_eps >= 0.0 && clip_eps < 0.5, ErrorCode::BadHyperparameter,
            "clip_eps must lie in [0, 0.5)");
    JointView view = check_joint(joint, "joint law");
    double mean = 0.0, mean_sq = 0.0;
    for (std::size_t i = 0; i < joint.mass0.size(); ++i) {
        double ps = joint.mass0[i] + joint.mass1[i];
        if (ps == 0.0) continue;
        double post1 = joint.mass1[i] / ps;
        if (clip_eps > 0.0) post1 = std::clamp(post1, clip_eps, 1.0 - clip_eps);
        double values[2] = {std::log((1.0 - post1) / (1.0 - view.pz1)),
                            std::log(post1 / view.pz1)};
        double weights[2] = {joint.mass0[i], joint.mass1[i]};
        for (int z = 0; z < 2; ++z) {
            if (weights[z] == 0.0) continue;
            mean += weights[z] * values[z];
            mean_sq += weights[z] * values[z] * values[z];
        }
    }
    return mean_sq - mean * mean;
}

double mutual_information(const DiscreteJoint& joint) {
    JointView view = check_joint(joint, "joint law");
    double cond = 0.0;
    for (std::size_t i = 0; i < joint.mass0.size(); ++i) {
        double ps = joint.mass0[i] + joint.mass1[i];
        if (ps == 0.0) continue;
        cond += ps * binary_entropy(joint.mass1[i] / ps);
    }
    return binary_entropy(view.pz1) - cond;
}

double mutual_information(const ScalarField& posterior0, const ScalarField& density,
                          const GridIntegrator& grid) {
    double u = integrate(
        [&](const FeatureVector& s) { return posterior0(s) * density(s); }, grid);
    require(u > 0.0 && u < 1.0, ErrorCode::DegenerateJoint,
            "label marginal is single-class");
    double cond = integrate(
        [&](const FeatureVector& s) { return binary_entropy(posterior0(s)) * density(s); },
        grid);
    return binary_entropy(u) - cond;
}

PowerBounds power_lower_bounds(const PowerBoundInputs& in) {
    require(in.n_labels >= 1, ErrorCode::InvalidArgument, "label budget must be positive");
    require(in.alpha > 0.0 && in.alpha < 1.0, ErrorCode::InvalidArgument,
            "alpha must lie in (0, 1)");
    require(in.mi >= 0.0 && std::isfinite(in.mi), ErrorCode::InvalidArgument,
            "mutual information must be non-negative");
    require(in.delta >= 0.0 && in.eps1 >= 0.0 && in.eps2 >= 0.0 && in.sigma >= 0.0,
            ErrorCode::InvalidArgument, "gain, error and scale terms must be non-negative");

    double denom_sq = in.eps1 + in.sigma * in.sigma + 2.0 * in.sigma * std::sqrt(in.eps1);
    require(denom_sq > 0.0, ErrorCode::ZeroDenominator,
            "error and scale terms cannot both vanish");
    double denom = std::sqrt(denom_sq);
    double root_n = std::sqrt(static_cast<double>(in.n_labels));
    double base = std::log(in.alpha) / root_n;

    PowerBounds out;
    out.guided = normal_cdf(
        (base + root_n * (in.mi + in.delta - 2.0 * std::sqrt(in.eps1) - std::sqrt(in.eps2))) /
        denom);
    out.uniform = normal_cdf((base + root_n * (in.mi - std::sqrt(in.eps1))) / denom);
    return out;
}

} // namespace lets
