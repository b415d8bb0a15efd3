#include "dilset/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dilset {

namespace {

void check_scale(const DyadicSet& s, int j) {
    if (j < 0 || j > s.depth())
        throw DepthError("scale index " + std::to_string(j) + " exceeds stored depth " +
                         std::to_string(s.depth()));
}

void check_exponent(double e, const char* name) {
    if (!(e >= 0.0 && e <= 1.0))
        throw PreconditionError(std::string(name) + " must lie in [0,1]");
}

}  // namespace

double minkowski_characteristic(const DyadicSet& s, double beta, int j) {
    check_scale(s, j);
    check_exponent(beta, "beta");
    return std::exp2(-j * beta) * static_cast<double>(covering_number(s, j));
}

AssouadValue assouad_characteristic(const DyadicSet& s, double gamma, int j) {
    check_scale(s, j);
    check_exponent(gamma, "gamma");
    const std::vector<Run> cells = coarse_runs(s, j);
    AssouadValue best;
    if (cells.empty()) return best;
    for (int level = 0; level <= j; ++level) {
        const WindowCount wc = max_window_count(cells, j, level);
        const double value = std::exp2(-(j - level) * gamma) * static_cast<double>(wc.count);
        if (value > best.value) best = {value, DyadicWindow{level, wc.index}};
    }
    return best;
}

double brute_assouad_oracle(const DyadicSet& s, double gamma, int j) {
    check_scale(s, j);
    check_exponent(gamma, "gamma");
    if (j > 14) throw SizeGuardError("brute_assouad_oracle limited to j <= 14");

    const std::int64_t lo = std::int64_t{1} << j;
    const std::int64_t n = lo;  // cells per unit interval
    // occupancy over indices lo .. 2*lo, inclusive of the closing cell
    std::vector<std::int64_t> prefix(static_cast<std::size_t>(n) + 2, 0);
    {
        std::vector<char> occ(static_cast<std::size_t>(n) + 1, 0);
        for (const Run& r : coarse_runs(s, j))
            for (std::int64_t c = r.begin; c < r.end; ++c)
                occ[static_cast<std::size_t>(c - lo)] = 1;
        for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i)
            prefix[i + 1] = prefix[i] + occ[i];
    }
    std::vector<double> wpow(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::int64_t len = 1; len <= n; ++len)
        wpow[static_cast<std::size_t>(len)] = std::pow(static_cast<double>(len), -gamma);

    double best = 0.0;
    for (std::int64_t a = 0; a < n; ++a) {
        for (std::int64_t b = a + 1; b <= n; ++b) {
            // window [1 + a*2^-j, 1 + b*2^-j), closed at 2 when b == n
            std::int64_t count = prefix[static_cast<std::size_t>(b)] -
                                 prefix[static_cast<std::size_t>(a)];
            if (b == n) count += prefix[static_cast<std::size_t>(n) + 1] -
                                 prefix[static_cast<std::size_t>(n)];
            const double v = wpow[static_cast<std::size_t>(b - a)] * static_cast<double>(count);
            if (v > best) best = v;
        }
    }
    return best;
}

CharacteristicProfile profile(const DyadicSet& s, double beta, double gamma, int j_lo, int j_hi) {
    if (j_lo > j_hi) throw PreconditionError("profile: empty scale window");
    check_scale(s, j_lo);
    check_scale(s, j_hi);
    CharacteristicProfile out{beta, gamma, {}};
    for (int j = j_lo; j <= j_hi; ++j) {
        const AssouadValue av = assouad_characteristic(s, gamma, j);
        out.rows.push_back({j, covering_number(s, j), minkowski_characteristic(s, beta, j),
                            av.value, av.window.level, av.window.index});
    }
    return out;
}

std::string profile_to_csv(const CharacteristicProfile& p) {
    std::ostringstream os;
    os << "j,N,chiM,chiA,win_level,win_index\n";
    for (const ProfileRow& r : p.rows)
        os << r.j << "," << r.covering << "," << r.chi_m << "," << r.chi_a << "," << r.win_level
           << "," << r.win_index << "\n";
    return os.str();
}

std::string profile_to_json(const CharacteristicProfile& p) {
    std::ostringstream os;
    os << "{\"beta\":" << p.beta << ",\"gamma\":" << p.gamma << ",\"rows\":[";
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const ProfileRow& r = p.rows[i];
        os << (i ? "," : "") << "{\"j\":" << r.j << ",\"N\":" << r.covering
           << ",\"chiM\":" << r.chi_m << ",\"chiA\":" << r.chi_a
           << ",\"win_level\":" << r.win_level << ",\"win_index\":" << r.win_index << "}";
    }
    os << "]}";
    return os.str();
}

SlopeFit estimate_minkowski_dim(const DyadicSet& s, int j_lo, int j_hi) {
    if (j_hi - j_lo < 3) throw PreconditionError("estimate_minkowski_dim needs >= 4 scales");
    check_scale(s, j_lo);
    check_scale(s, j_hi);

    std::vector<double> ys;
    bool all_one = true;
    for (int j = j_lo; j <= j_hi; ++j) {
        const std::int64_t n = covering_number(s, j);
        if (n != 1) all_one = false;
        ys.push_back(std::log2(static_cast<double>(n)));
    }
    if (all_one) return SlopeFit{0.0, 0.0, true};

    const std::size_t n = ys.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(j_lo) + static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(j_lo) + static_cast<double>(i);
        resid = std::max(resid, std::abs(ys[i] - (slope * x + intercept)));
    }
    return SlopeFit{slope, resid, false};
}

namespace {

SpectrumEstimate window_exponent_sweep(const DyadicSet& s, double theta, int j_lo, int j_hi,
                                       bool restrict_theta) {
    if (j_lo > j_hi || j_lo < 1) throw PreconditionError("invalid scale window");
    check_scale(s, j_hi);

    SpectrumEstimate out;
    out.theta = theta;
    out.j_lo = j_lo;
    out.j_hi = j_hi;
    for (int j = j_lo; j <= j_hi; ++j) {
        const std::vector<Run> cells = coarse_runs(s, j);
        const int level_cap = restrict_theta
                                  ? std::min(static_cast<int>(std::floor(theta * j)), j - 1)
                                  : j - 1;
        double raw = 0.0;
        for (int level = 0; level <= level_cap; ++level) {
            const WindowCount wc = max_window_count(cells, j, level);
            if (wc.count <= 1) continue;
            raw = std::max(raw, std::log2(static_cast<double>(wc.count)) /
                                    static_cast<double>(j - level));
        }
        out.per_scale.push_back(raw);
        out.value = std::max(out.value, raw);
    }
    out.value = std::min(out.value, 1.0);  // the closing cell can push a full window past 2^(j-l)
    return out;
}

}  // namespace

SpectrumEstimate upper_assouad_spectrum(const DyadicSet& s, double theta, int j_lo, int j_hi) {
    if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("theta must lie in (0,1)");
    return window_exponent_sweep(s, theta, j_lo, j_hi, true);
}

SpectrumEstimate assouad_window_estimate(const DyadicSet& s, int j_lo, int j_hi) {
    SpectrumEstimate e = window_exponent_sweep(s, 1.0, j_lo, j_hi, false);
    e.theta = 1.0;
    return e;
}

QuasiAssouadEstimate estimate_quasi_assouad(const DyadicSet& s, const std::vector<double>& thetas,
                                            int j_lo, int j_hi) {
    if (thetas.empty()) throw PreconditionError("estimate_quasi_assouad: empty theta list");
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if (thetas[i] <= thetas[i - 1])
            throw PreconditionError("theta list must increase toward 1");
    QuasiAssouadEstimate out;
    for (double t : thetas) {
        const SpectrumEstimate e = upper_assouad_spectrum(s, t, j_lo, j_hi);
        out.curve.emplace_back(t, e.value);
        out.value = e.value;
    }
    return out;
}

std::string spectrum_curve_to_csv(const QuasiAssouadEstimate& q) {
    std::ostringstream os;
    os << "theta,value\n";
    for (const auto& [t, v] : q.curve) os << t << "," << v << "\n";
    return os.str();
}

}  // namespace dilset
