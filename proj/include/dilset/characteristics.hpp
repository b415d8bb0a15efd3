#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dilset/dyadic.hpp"

namespace dilset {

// Scale-indexed Minkowski and Assouad characteristics on the dyadic grid.
// chi_M(beta, j) = 2^(-j*beta) * N(S, 2^-j);
// chi_A(gamma, j) = max over dyadic windows W of level <= j of
//                   2^(-(j-level)*gamma) * N(S & W, 2^-j).
// The dyadic-window max tracks the all-interval supremum within a factor 4.

double minkowski_characteristic(const DyadicSet& s, double beta, int j);

struct AssouadValue {
    double value = 0.0;
    DyadicWindow window;  // maximizer; ties broken by smallest level, then index
};

AssouadValue assouad_characteristic(const DyadicSet& s, double gamma, int j);

// Exact supremum over all windows with endpoints on the depth-j grid and
// length >= 2^-j.  Cost O(4^j); guarded at j <= 14.
double brute_assouad_oracle(const DyadicSet& s, double gamma, int j);

struct ProfileRow {
    int j = 0;
    std::int64_t covering = 0;
    double chi_m = 0.0;
    double chi_a = 0.0;
    int win_level = 0;
    std::int64_t win_index = 0;
};

struct CharacteristicProfile {
    double beta = 0.0;
    double gamma = 0.0;
    std::vector<ProfileRow> rows;
};

CharacteristicProfile profile(const DyadicSet& s, double beta, double gamma, int j_lo, int j_hi);
std::string profile_to_csv(const CharacteristicProfile& p);
std::string profile_to_json(const CharacteristicProfile& p);

// Least-squares slope of log2 N against j over [j_lo, j_hi].
struct SlopeFit {
    double slope = 0.0;
    double residual = 0.0;  // max absolute deviation of log2 N from the fit
    bool degenerate = false;
};

SlopeFit estimate_minkowski_dim(const DyadicSet& s, int j_lo, int j_hi);

// Finite-depth upper-spectrum estimate at theta: for j in [j_lo, j_hi] take
// the max over window levels l <= floor(theta*j) of log2(N(S & W, 2^-j))/(j-l),
// then the max over j.  Clamped to [0,1].
struct SpectrumEstimate {
    double theta = 0.0;
    double value = 0.0;
    int j_lo = 0;
    int j_hi = 0;
    std::vector<double> per_scale;  // raw exponent per j
};

SpectrumEstimate upper_assouad_spectrum(const DyadicSet& s, double theta, int j_lo, int j_hi);

// Same sweep without the theta restriction (window level up to j-1): the
// finite-depth Assouad-dimension analog.
SpectrumEstimate assouad_window_estimate(const DyadicSet& s, int j_lo, int j_hi);

struct QuasiAssouadEstimate {
    double value = 0.0;                             // spectrum at the largest theta
    std::vector<std::pair<double, double>> curve;   // (theta, value)
};

QuasiAssouadEstimate estimate_quasi_assouad(const DyadicSet& s, const std::vector<double>& thetas,
                                            int j_lo, int j_hi);
std::string spectrum_curve_to_csv(const QuasiAssouadEstimate& q);

}  // namespace dilset
