#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dilset/dyadic.hpp"

namespace dilset {

// Numerical d=2 spherical averages on thickened spherical caps.  The cap of
// radius parameter `a`, thickness `delta` and width parameter `rho` is
//   { (y1,y2) : | |y| - a | <= delta, |y1| <= sqrt(rho), y2 > 0 }.
// Circle averages use the midpoint rule with step dtheta (default
// min(delta, sqrt(rho))/16, which resolves both angular feature scales).

struct KnappConfig {
    double a = 1.0;
    double delta = 1.0 / 256;
    double rho = 1.0 / 16;
    double c = 1e-2;       // smallness constant of the certified region
    double dtheta = 0.0;   // 0 -> default rule
    int x1_samples = 5;
    int x2_samples = 5;

    void validate() const;
    double effective_dtheta() const;
    int circle_samples() const;
};

bool knapp_indicator(const KnappConfig& cfg, double y1, double y2);

// Exact area of the cap (the L^p norms of its indicator are powers of this).
double cap_measure(const KnappConfig& cfg);

// Closed-form average at the cap center: A_a f(0) = asin(sqrt(rho)/a)/pi.
double knapp_arc_value(const KnappConfig& cfg);

// Midpoint-rule average of f(x - t*(cos,sin)) over the full circle.
template <class F>
double spherical_average(F&& f, double x1, double x2, double t, int n_samples) {
    const double dtheta = 2.0 * M_PI / n_samples;
    double sum = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double theta = (k + 0.5) * dtheta;
        sum += f(x1 - t * std::cos(theta), x2 - t * std::sin(theta));
    }
    return sum / n_samples;
}

// Same quadrature for the cap indicator, skipping samples that provably miss
// the cap (the support is an arc near the bottom of the circle).
double knapp_average(const KnappConfig& cfg, double x1, double x2, double t);

// max over one sample per cell of e (cell midpoints); cells must be finer
// than delta/4.
double maximal_over_set(const KnappConfig& cfg, double x1, double x2, const DyadicSet& e);

struct PointwiseLowerResult {
    double min_ratio = 0.0;  // min over samples of A_t f / sqrt(rho)
    std::size_t samples = 0;
    bool pass = false;
};

// Scans the certified region {|x1| <= c*delta/sqrt(rho), |x2 + t - a| <= c*delta}
// for every delta-cell of e inside the window.
PointwiseLowerResult verify_pointwise_lower(const KnappConfig& cfg, const DyadicSet& e,
                                            const DyadicWindow& window, double threshold = 0.1);

struct ExperimentRow {
    double delta = 0.0;
    double rho = 0.0;
    double fp_norm = 0.0;
    double mq_lower = 0.0;
    double ratio = 0.0;
};

struct ExperimentRecord {
    std::vector<ExperimentRow> rows;
    double inv_p = 0.0;
    double inv_q = 0.0;
    double beta_local = 0.0;      // fitted covering exponent of e inside the window
    double predicted_slope = 0.0;
    double fitted_slope = 0.0;
    double residual = 0.0;
};

// Sweeps delta (>= 4 values, geometric), ties rho = delta/|window|, measures
// ||f||_p in closed form and a rigorous grid lower bound for ||M_E f||_q over
// the disjoint certified regions, and fits log(ratio) against log(delta).
ExperimentRecord norm_ratio_experiment(const KnappConfig& base, const std::vector<double>& deltas,
                                       const DyadicSet& e, const DyadicWindow& window,
                                       double inv_p, double inv_q);

// Predicted log-slope of ||M_E f||_q / ||f||_p in delta when rho scales like
// delta^s_rho and N(E cap I, delta) ~ delta^(-beta_local).
double predicted_ratio_slope(int d, double inv_p, double inv_q, double beta_local,
                             double s_rho = 1.0);

std::string record_to_csv(const ExperimentRecord& r);

}  // namespace dilset
