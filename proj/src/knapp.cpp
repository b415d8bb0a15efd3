#include "dilset/knapp.hpp"

#include <algorithm>
#include <sstream>

namespace dilset {

namespace {

// pairs (t, delta-cell id) for one representative per delta-sized cell of
// e inside the window; the representative is the midpoint of the first fine
// cell of e in that coarse cell, so it lies in the rendered set.
std::vector<double> delta_cell_representatives(const DyadicSet& e, const DyadicWindow& window,
                                               double delta) {
    const DyadicSet inside = restrict_to(e, window);
    if (inside.empty()) throw PreconditionError("window does not meet the set");
    const int depth_delta = std::min(e.depth(),
                                     static_cast<int>(std::ceil(std::log2(1.0 / delta))));
    const double fine_width = std::exp2(-e.depth());
    std::vector<double> out;
    const int shift = e.depth() - depth_delta;
    std::int64_t last_coarse = -1;
    for (const Run& r : inside.runs()) {
        for (std::int64_t n = r.begin; n < r.end;) {
            const std::int64_t coarse = n >> shift;
            if (coarse != last_coarse) {
                out.push_back((static_cast<double>(n) + 0.5) * fine_width);
                last_coarse = coarse;
                n = std::min(r.end, (coarse + 1) << shift);
            } else {
                n = std::min(r.end, (coarse + 1) << shift);
            }
        }
    }
    return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                 double* residual) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    if (residual) {
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            r = std::max(r, std::abs(ys[i] - (slope * xs[i] + intercept)));
        *residual = r;
    }
    return slope;
}

}  // namespace

void KnappConfig::validate() const {
    if (!(delta > 0.0 && delta <= rho && rho <= 1.0))
        throw PreconditionError("knapp config needs 0 < delta <= rho <= 1");
    if (!(a >= 1.0 && a <= 2.0)) throw PreconditionError("cap radius a must lie in [1,2]");
    if (!(c > 0.0 && c <= 1e-2)) throw PreconditionError("c must lie in (0, 1e-2]");
    if (x1_samples < 1 || x2_samples < 1) throw PreconditionError("empty sample grid");
}

double KnappConfig::effective_dtheta() const {
    return 2.0 * M_PI / circle_samples();
}

int KnappConfig::circle_samples() const {
    const double step = dtheta > 0.0 ? dtheta : std::min(delta, std::sqrt(rho)) / 16.0;
    const double n = std::ceil(2.0 * M_PI / step);
    if (n > 5e7) throw SizeGuardError("quadrature step too small");
    return std::max(16, static_cast<int>(n));
}

bool knapp_indicator(const KnappConfig& cfg, double y1, double y2) {
    if (y2 <= 0.0) return false;
    if (std::abs(y1) > std::sqrt(cfg.rho)) return false;
    return std::abs(std::hypot(y1, y2) - cfg.a) <= cfg.delta;
}

double cap_measure(const KnappConfig& cfg) {
    cfg.validate();
    const double s = std::sqrt(cfg.rho);
    auto half_disc_strip = [&](double r) {
        // area of { |y1| <= s, 0 < y2 <= sqrt(r^2 - y1^2) }
        if (r <= 0.0) return 0.0;
        const double t = std::min(s, r);
        return t * std::sqrt(std::max(0.0, r * r - t * t)) + r * r * std::asin(t / r);
    };
    return half_disc_strip(cfg.a + cfg.delta) - half_disc_strip(cfg.a - cfg.delta);
}

double knapp_arc_value(const KnappConfig& cfg) {
    return std::asin(std::sqrt(cfg.rho) / cfg.a) / M_PI;
}

double knapp_average(const KnappConfig& cfg, double x1, double x2, double t) {
    const int n = cfg.circle_samples();
    const double dtheta = 2.0 * M_PI / n;
    // the cap requires |x1 - t*cos(theta)| <= sqrt(rho): an arc around the
    // bottom of the circle once the y2 > 0 condition is folded in
    const double reach = (std::sqrt(cfg.rho) + std::abs(x1)) / t;
    if (reach >= 0.95) {
        // wide cap: the two candidate arcs merge, scan everything
        auto f = [&](double y1, double y2) {
            return knapp_indicator(cfg, y1, y2) ? 1.0 : 0.0;
        };
        return spherical_average(f, x1, x2, t, n);
    }
    const double half_width = std::asin(reach) + 4.0 * dtheta;
    const double center = 1.5 * M_PI;
    const int k_lo = static_cast<int>(std::floor((center - half_width) / dtheta - 1.0));
    const int k_hi = static_cast<int>(std::ceil((center + half_width) / dtheta + 1.0));
    double sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double theta = (k + 0.5) * dtheta;
        if (knapp_indicator(cfg, x1 - t * std::cos(theta), x2 - t * std::sin(theta))) sum += 1.0;
    }
    return sum / n;
}

double maximal_over_set(const KnappConfig& cfg, double x1, double x2, const DyadicSet& e) {
    cfg.validate();
    if (e.empty()) throw PreconditionError("maximal_over_set: empty dilation set");
    const double width = std::exp2(-e.depth());
    if (width > cfg.delta / 4.0)
        throw PreconditionError("dilation set must be rendered with cell width <= delta/4");
    double best = 0.0;
    for (const Run& r : e.runs())
        for (std::int64_t n = r.begin; n < r.end; ++n)
            best = std::max(best, knapp_average(cfg, x1, x2,
                                                (static_cast<double>(n) + 0.5) * width));
    return best;
}

PointwiseLowerResult verify_pointwise_lower(const KnappConfig& cfg, const DyadicSet& e,
                                            const DyadicWindow& window, double threshold) {
    cfg.validate();
    const std::vector<double> ts = delta_cell_representatives(e, window, cfg.delta);
    const double x1_half = cfg.c * cfg.delta / std::sqrt(cfg.rho);
    const double x2_half = cfg.c * cfg.delta;
    const double sqrt_rho = std::sqrt(cfg.rho);

    PointwiseLowerResult out;
    out.min_ratio = 1e300;
    for (double t : ts) {
        for (int i = 0; i < cfg.x1_samples; ++i) {
            const double x1 =
                -x1_half + (2 * i + 1) * x1_half / cfg.x1_samples;
            for (int k = 0; k < cfg.x2_samples; ++k) {
                const double x2 =
                    (cfg.a - t) - x2_half + (2 * k + 1) * x2_half / cfg.x2_samples;
                const double ratio = knapp_average(cfg, x1, x2, t) / sqrt_rho;
                out.min_ratio = std::min(out.min_ratio, ratio);
                ++out.samples;
            }
        }
    }
    out.pass = out.min_ratio >= threshold;
    return out;
}

double predicted_ratio_slope(int d, double inv_p, double inv_q, double beta_local, double s_rho) {
    // ||M f||_q ~ rho^((d-1)/2) [delta * N * (delta/sqrt(rho))^(d-1)]^(1/q),
    // ||f||_p ~ (delta * rho^((d-1)/2))^(1/p), N ~ delta^(-beta_local)
    const double half = (d - 1) / 2.0;
    return half * s_rho + (1.0 - beta_local + (d - 1) * (1.0 - s_rho / 2.0)) * inv_q -
           (1.0 + half * s_rho) * inv_p;
}

ExperimentRecord norm_ratio_experiment(const KnappConfig& base, const std::vector<double>& deltas,
                                       const DyadicSet& e, const DyadicWindow& window,
                                       double inv_p, double inv_q) {
    if (deltas.size() < 4) throw PreconditionError("sweep needs at least 4 delta values");
    if (!(inv_p >= 0.0 && inv_p <= 1.0 && inv_q >= 0.0 && inv_q <= 1.0))
        throw PreconditionError("(1/p, 1/q) must lie in [0,1]^2");
    validate_window(window);

    const double window_len = std::exp2(-window.level);
    const double window_left = static_cast<double>(window.index) * window_len;

    ExperimentRecord rec;
    rec.inv_p = inv_p;
    rec.inv_q = inv_q;

    std::vector<double> log_delta, log_ratio, log_n;
    for (double delta : deltas) {
        KnappConfig cfg = base;
        cfg.delta = delta;
        cfg.rho = delta / window_len;
        cfg.a = window_left;
        cfg.validate();

        const double measure = cap_measure(cfg);
        const double fp = std::pow(measure, inv_p);

        const std::vector<double> ts = delta_cell_representatives(e, window, delta);
        if (ts.size() > 100000) throw SizeGuardError("norm experiment grid too large");
        const double x1_half = cfg.c * cfg.delta / std::sqrt(cfg.rho);
        const double x2_half = cfg.c * cfg.delta;
        const double dx = 2 * x1_half / cfg.x1_samples;
        const double dy = 2 * x2_half / cfg.x2_samples;

        double acc = 0.0;  // integral of A^q, or max A for q = infinity
        for (double t : ts) {
            for (int i = 0; i < cfg.x1_samples; ++i) {
                const double x1 = -x1_half + (2 * i + 1) * x1_half / cfg.x1_samples;
                for (int k = 0; k < cfg.x2_samples; ++k) {
                    const double x2 =
                        (cfg.a - t) - x2_half + (2 * k + 1) * x2_half / cfg.x2_samples;
                    const double v = knapp_average(cfg, x1, x2, t);
                    if (inv_q == 0.0)
                        acc = std::max(acc, v);
                    else
                        acc += std::pow(v, 1.0 / inv_q) * dx * dy;
                }
            }
        }
        const double mq = inv_q == 0.0 ? acc : std::pow(acc, inv_q);

        rec.rows.push_back({delta, cfg.rho, fp, mq, mq / fp});
        log_delta.push_back(std::log2(delta));
        log_ratio.push_back(std::log2(std::max(mq / fp, 1e-300)));
        const int depth_delta = static_cast<int>(std::ceil(std::log2(1.0 / delta)));
        log_n.push_back(std::log2(static_cast<double>(
            covering_number(restrict_to(e, window), std::min(depth_delta, e.depth())))));
    }

    // covering exponent of e inside the window: N ~ delta^-beta_local
    std::vector<double> neg_log_delta;
    for (double ld : log_delta) neg_log_delta.push_back(-ld);
    rec.beta_local = fit_slope(neg_log_delta, log_n, nullptr);
    rec.predicted_slope = predicted_ratio_slope(2, inv_p, inv_q, rec.beta_local);
    rec.fitted_slope = fit_slope(log_delta, log_ratio, &rec.residual);
    return rec;
}

std::string record_to_csv(const ExperimentRecord& r) {
    std::ostringstream os;
    os << "delta,rho,fp_norm,Mq_lower,ratio,predicted_slope,fitted_slope,residual\n";
    for (const ExperimentRow& row : r.rows)
        os << row.delta << "," << row.rho << "," << row.fp_norm << "," << row.mq_lower << ","
           << row.ratio << "," << r.predicted_slope << "," << r.fitted_slope << ","
           << r.residual << "\n";
    return os.str();
}

}  // namespace dilset
