#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dilset/dyadic.hpp"

namespace dilset {

// Symbolic, depth-independent descriptions of the set families the workbench
// can build.  A blueprint is rendered onto the depth-j grid by render(); the
// rendering collects every cell meeting the ideal set, with cells whose
// membership is numerically ambiguous (within kRenderTolerance of a cell
// boundary) included on both sides.

inline constexpr long double kRenderTolerance = 0x1p-50L;

struct Interval {
    long double a = 1.0L;
    long double b = 2.0L;
};

struct FullInterval {};

struct SingletonPoint {
    double x = 1.5;
};

// m-th generation of the ratio-mu middle-removal construction on `window`:
// 2^m closed intervals of length mu^m * |window|.
struct CantorMiddle {
    double mu = 0.5;
    int generation = 0;
    Interval window;
};

// The 2^m midpoints of those intervals.
struct CantorMidpoints {
    double mu = 0.5;
    int generation = 0;
    Interval window;
};

// Union over k = 1..k_max of midpoint sets on the blocks
// J_k = [1 + lambda^(k+1), 1 + lambda^k], lambda = 2^(-1/beta), mu = 2^(-1/gamma),
// with generations m(k) = ceil(k / theta), theta = 1 - beta/gamma.
struct AssouadRegularRaw {
    double beta = 0.5;
    double gamma = 1.0;
    int k_max = 8;
};

// The same family contracted toward 1 by s = c_f^(-1/beta): x -> 1 + s*(x-1).
struct AssouadRegularScaled {
    double beta = 0.5;
    double gamma = 1.0;
    int k_max = 8;
    double c_f = 1.0;
};

// Families with zero Minkowski and prescribed Assouad dimension alpha.
struct ZeroMinkowski {
    double alpha = 0.5;
    int n_max = 4;
};

struct UnionTerm {
    double beta = 0.5;
    double gamma = 1.0;
    double c_f = 1.0;  // calibration for beta < gamma terms; unused otherwise
};

// Union over n of 1 + 2^(-L(n)-1) * E(beta_n, gamma_n).
struct TheoremUnion {
    std::vector<UnionTerm> terms;
    std::vector<long long> shifts;  // the L sequence
    int k_max = 8;
    int calib_depth = 24;
};

using Blueprint = std::variant<FullInterval, SingletonPoint, CantorMiddle, CantorMidpoints,
                               AssouadRegularRaw, AssouadRegularScaled, ZeroMinkowski,
                               TheoremUnion>;

// --- validated construction -------------------------------------------------

Blueprint make_cantor_middle(double mu, int generation, Interval window = {});
Blueprint make_cantor_midpoints(double mu, int generation, Interval window = {});
Blueprint assouad_regular_raw(double beta, double gamma, int k_max);
Blueprint zero_minkowski(double alpha, int n_max);

// Brute-force calibration of the covering constant: the max over j in
// [1, j_max] of 2^(-j*beta) * N(F, 2^-j) on the depth-j_max rendering of the
// raw family, clamped below by 1.
double calibrate_cf(double beta, double gamma, int k_max, int j_max);

Blueprint uniform_family(double beta, double gamma, int k_max, int j_max);

// Minimal strictly increasing sequence with
// L(n) >= L(k) + (n-k)/gamma_n for all 1 <= k < n (ceiling at equality).
std::vector<long long> l_sequence(const std::vector<double>& gammas, long long l1);
bool l_sequence_valid(const std::vector<double>& gammas, const std::vector<long long>& shifts);

// pairs[i] = (beta_i, gamma_i); terms with beta == gamma become self-similar
// Cantor sets, beta == 0 becomes a point.  Calibrates c_f per remaining term.
Blueprint theorem_union(const std::vector<std::pair<double, double>>& pairs,
                        const std::vector<long long>& shifts, int k_max, int calib_depth = 24);

// --- derived quantities of the Assouad-regular construction ------------------

struct RegularFamilyInfo {
    long double lambda;
    long double mu;
    long double theta;
    double beta;
    double gamma;
    int k_max;
    long double scale;  // c_f^(-1/beta); 1 for the raw family

    int generation(int k) const;        // m(k)
    Interval block(int k) const;        // J_k in raw coordinates
    long double block_length(int k) const;
};

RegularFamilyInfo family_info(const Blueprint& bp);

// sigma_k = |J_k| * mu^m(k) for the raw construction.
long double sigma_k(const Blueprint& bp, int k);

// --- rendering ----------------------------------------------------------------

DyadicSet render(const Blueprint& bp, int depth, int depth_budget = kDefaultDepthBudget);

// --- JSON ----------------------------------------------------------------------

std::string blueprint_to_json(const Blueprint& bp);
Blueprint blueprint_from_json(const std::string& text);

}  // namespace dilset
