#include "dilset/blueprint.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace dilset {

namespace {

using json = nlohmann::json;

void check_ratio(double mu) {
    if (!(mu > 0.0) || mu > 0.5)
        throw PreconditionError("cantor ratio must lie in (0, 1/2]");
}

void check_window(const Interval& j) {
    if (!(j.a >= 1.0L && j.b <= 2.0L && j.a < j.b))
        throw PreconditionError("construction window must be a subinterval of [1,2]");
}

void check_pair(double beta, double gamma) {
    if (!(beta > 0.0) || !(beta < gamma) || !(gamma <= 1.0))
        throw PreconditionError(
            "assouad-regular family needs 0 < beta < gamma <= 1 "
            "(use a middle-Cantor set for beta == gamma)");
}

// ---------------------------------------------------------------------------
// Cell accumulation at a fixed depth, with the tolerance rule: a value that
// lies within kRenderTolerance of a cell boundary (but not exactly on it)
// contributes the cells on both sides.
// ---------------------------------------------------------------------------

class CellAccum {
public:
    explicit CellAccum(int depth)
        : depth_(depth),
          lo_(DyadicSet::first_index(depth)),
          hi_(DyadicSet::closing_index(depth)),
          scale_(std::exp2(depth)),
          eps_(kRenderTolerance * std::exp2(depth)) {}

    int depth() const { return depth_; }
    long double cell_width() const { return 1.0L / scale_; }

    void add_point(long double x) {
        const long double s = x * scale_;
        const long double f = std::floor(s);
        std::int64_t n = static_cast<std::int64_t>(f);
        const long double frac = s - f;
        add_cell(n);
        if (frac > 0.0L && frac <= eps_) add_cell(n - 1);
        if (1.0L - frac <= eps_) add_cell(n + 1);
    }

    // All cells meeting the closed interval [a, b].
    void add_closed_interval(long double a, long double b) {
        const long double sa = a * scale_, sb = b * scale_;
        const long double fa = std::floor(sa), fb = std::floor(sb);
        std::int64_t na = static_cast<std::int64_t>(fa);
        std::int64_t nb = static_cast<std::int64_t>(fb);
        if (sa - fa > 0.0L && sa - fa <= eps_) --na;
        if (1.0L - (sb - fb) <= eps_) ++nb;
        add_range(na, nb);
    }

    void add_cell(std::int64_t n) {
        if (n < lo_ || n > hi_) return;
        cells_.push_back(n);
    }

    void add_range(std::int64_t a, std::int64_t b) {  // inclusive
        a = std::max(a, lo_);
        b = std::min(b, hi_);
        for (std::int64_t n = a; n <= b; ++n) cells_.push_back(n);
    }

    // True when [a, b] lies inside one cell even after tolerance fuzz.
    bool single_cell(long double a, long double b) const {
        const long double sa = a * scale_, sb = b * scale_;
        const long double fa = std::floor(sa), fb = std::floor(sb);
        if (fa != fb) return false;
        const long double fra = sa - fa;
        const long double frb = sb - fb;
        if (fra > 0.0L && fra <= eps_) return false;
        if (1.0L - frb <= eps_) return false;
        return true;
    }

    DyadicSet finish() {
        std::sort(cells_.begin(), cells_.end());
        cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
        std::vector<Run> runs;
        for (std::int64_t n : cells_) {
            if (!runs.empty() && runs.back().end == n)
                ++runs.back().end;
            else
                runs.push_back({n, n + 1});
        }
        return DyadicSet(depth_, std::move(runs));
    }

private:
    int depth_;
    std::int64_t lo_, hi_;
    long double scale_;
    long double eps_;
    std::vector<std::int64_t> cells_;
};

// ---------------------------------------------------------------------------
// Middle-Cantor descent.  Children of [a,b] are [a, a+mu*(b-a)] and
// [b-mu*(b-a), b]; the mu == 1/2 tiling degenerates to closed intervals
// (intervals) resp. arithmetic midpoint progressions (midpoints).
// ---------------------------------------------------------------------------

struct CantorRenderer {
    long double mu;
    int generations;
    bool midpoints;
    CellAccum* out;

    void emit_progression(long double a, long double b, int gens_left) const {
        // midpoint set of the mu = 1/2 tiling: 2^g points, step (b-a)/2^g,
        // first point a + step/2
        const long double step = (b - a) * std::exp2(-gens_left);
        const long double first = a + step / 2;
        const long double last = b - step / 2;
        if (gens_left == 0 || step <= out->cell_width()) {
            if (gens_left == 0)
                out->add_point(first);
            else
                out->add_closed_interval(first, last);  // every cell in range meets a point
            return;
        }
        const long double n_points = std::exp2(gens_left);
        for (long double i = 0; i < n_points; ++i) out->add_point(first + step * i);
    }

    void descend(long double a, long double b, int gen) const {
        if (gen == generations) {
            if (midpoints)
                out->add_point((a + b) / 2);
            else
                out->add_closed_interval(a, b);
            return;
        }
        if (mu == 0.5L) {
            if (midpoints)
                emit_progression(a, b, generations - gen);
            else
                out->add_closed_interval(a, b);  // the tiling reproduces [a,b]
            return;
        }
        if (b - a <= out->cell_width()) {
            if (!midpoints) {
                // descendants reach both endpoints, so exactly these cells
                out->add_closed_interval(a, b);
                return;
            }
            if (out->single_cell(a, b)) {
                out->add_closed_interval(a, b);
                return;
            }
            // interval straddles a cell boundary; keep splitting
        }
        const long double child = mu * (b - a);
        descend(a, a + child, gen + 1);
        descend(b - child, b, gen + 1);
    }
};

void render_cantor(CellAccum& acc, long double mu, int gens, const Interval& window,
                   bool midpoints) {
    CantorRenderer r{mu, gens, midpoints, &acc};
    r.descend(window.a, window.b, 0);
}

// ---------------------------------------------------------------------------

RegularFamilyInfo make_info(double beta, double gamma, int k_max, double c_f) {
    RegularFamilyInfo info;
    info.beta = beta;
    info.gamma = gamma;
    info.k_max = k_max;
    info.lambda = std::exp2(-1.0L / beta);
    info.mu = std::exp2(-1.0L / gamma);
    info.theta = 1.0L - static_cast<long double>(beta) / gamma;
    info.scale = (c_f == 1.0) ? 1.0L : std::pow(static_cast<long double>(c_f),
                                                 -1.0L / static_cast<long double>(beta));
    return info;
}

void render_regular_family(CellAccum& acc, const RegularFamilyInfo& info) {
    for (int k = 1; k <= info.k_max; ++k) {
        const Interval raw = info.block(k);
        // contract toward 1
        const Interval blk{1.0L + info.scale * (raw.a - 1.0L), 1.0L + info.scale * (raw.b - 1.0L)};
        if (blk.b - blk.a < acc.cell_width()) {
            acc.add_point(blk.b);  // collapse to the cell holding the block top
            continue;
        }
        render_cantor(acc, info.mu, info.generation(k), blk, /*midpoints=*/true);
    }
}

void render_zero_minkowski(CellAccum& acc, const ZeroMinkowski& z) {
    if (z.alpha == 0.0) {
        acc.add_point(1.5L);
        return;
    }
    if (z.alpha == 1.0) {
        // {1 + 2^-sqrt(l) : l >= 1}, truncated
        for (long long l = 1; l <= z.n_max; ++l) {
            const long double p = 1.0L + std::exp2(-std::sqrt(static_cast<long double>(l)));
            if (p < 1.0L + acc.cell_width()) {
                acc.add_point(p);  // the remaining tail stays inside this cell
                break;
            }
            acc.add_point(p);
        }
        return;
    }
    const long double mu = std::exp2(-1.0L / z.alpha);
    int n0 = 0;
    while (z.alpha * std::exp2(n0) < 1.0) ++n0;
    for (int n = n0; n <= z.n_max; ++n) {
        if (n >= 60) break;  // block is far below any renderable scale
        const long double top = std::exp2(-static_cast<long double>(1LL << n));
        const Interval blk{1.0L + top / 2, 1.0L + top};
        if (blk.b - blk.a < acc.cell_width()) {
            acc.add_point(blk.b);
            continue;
        }
        render_cantor(acc, mu, n, blk, /*midpoints=*/true);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// validated construction
// ---------------------------------------------------------------------------

Blueprint make_cantor_middle(double mu, int generation, Interval window) {
    check_ratio(mu);
    check_window(window);
    if (generation < 0) throw PreconditionError("generation must be >= 0");
    return CantorMiddle{mu, generation, window};
}

Blueprint make_cantor_midpoints(double mu, int generation, Interval window) {
    check_ratio(mu);
    check_window(window);
    if (generation < 0) throw PreconditionError("generation must be >= 0");
    return CantorMidpoints{mu, generation, window};
}

Blueprint assouad_regular_raw(double beta, double gamma, int k_max) {
    check_pair(beta, gamma);
    if (k_max < 1) throw PreconditionError("k_max must be >= 1");
    return AssouadRegularRaw{beta, gamma, k_max};
}

Blueprint zero_minkowski(double alpha, int n_max) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw PreconditionError("alpha must lie in [0,1]");
    if (n_max < 1) throw PreconditionError("n_max must be >= 1");
    return ZeroMinkowski{alpha, n_max};
}

int RegularFamilyInfo::generation(int k) const {
    if (k < 1 || k > k_max) throw PreconditionError("block index out of range");
    return static_cast<int>(std::ceil(static_cast<long double>(k) / theta));
}

Interval RegularFamilyInfo::block(int k) const {
    if (k < 1 || k > k_max) throw PreconditionError("block index out of range");
    const long double lk = std::exp2(-static_cast<long double>(k) / beta);
    return Interval{1.0L + lk * lambda, 1.0L + lk};
}

long double RegularFamilyInfo::block_length(int k) const {
    const Interval j = block(k);
    return j.b - j.a;
}

RegularFamilyInfo family_info(const Blueprint& bp) {
    if (const auto* raw = std::get_if<AssouadRegularRaw>(&bp))
        return make_info(raw->beta, raw->gamma, raw->k_max, 1.0);
    if (const auto* sc = std::get_if<AssouadRegularScaled>(&bp))
        return make_info(sc->beta, sc->gamma, sc->k_max, sc->c_f);
    throw PreconditionError("family_info: not an assouad-regular blueprint");
}

long double sigma_k(const Blueprint& bp, int k) {
    const RegularFamilyInfo info = family_info(bp);
    return info.block_length(k) * std::exp2(-static_cast<long double>(info.generation(k)) /
                                             static_cast<long double>(info.gamma));
}

double calibrate_cf(double beta, double gamma, int k_max, int j_max) {
    check_pair(beta, gamma);
    if (j_max < 1 || j_max > kDefaultDepthBudget)
        throw PreconditionError("calibration depth out of range");
    const DyadicSet f = render(assouad_regular_raw(beta, gamma, k_max), j_max);
    double best = 1.0;
    for (int j = 1; j <= j_max; ++j) {
        const double chi = std::exp2(-j * beta) * static_cast<double>(covering_number(f, j));
        best = std::max(best, chi);
    }
    return best;
}

Blueprint uniform_family(double beta, double gamma, int k_max, int j_max) {
    return AssouadRegularScaled{beta, gamma, k_max, calibrate_cf(beta, gamma, k_max, j_max)};
}

std::vector<long long> l_sequence(const std::vector<double>& gammas, long long l1) {
    if (gammas.empty()) throw PreconditionError("l_sequence: empty gamma list");
    for (double g : gammas)
        if (!(g > 0.0 && g <= 1.0)) throw PreconditionError("gamma entries must lie in (0,1]");
    if (l1 < 0) throw PreconditionError("l_sequence: L1 must be >= 0");
    std::vector<long long> out{l1};
    for (std::size_t n = 1; n < gammas.size(); ++n) {
        double need = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            need = std::max(need, static_cast<double>(out[k]) +
                                      static_cast<double>(n - k) / gammas[n]);
        out.push_back(std::max(out[n - 1] + 1, static_cast<long long>(std::ceil(need))));
    }
    return out;
}

bool l_sequence_valid(const std::vector<double>& gammas, const std::vector<long long>& shifts) {
    if (shifts.size() != gammas.size() || shifts.empty()) return false;
    for (std::size_t n = 1; n < shifts.size(); ++n) {
        if (shifts[n] <= shifts[n - 1]) return false;
        for (std::size_t k = 0; k < n; ++k) {
            const double need = static_cast<double>(shifts[k]) +
                                static_cast<double>(n - k) / gammas[n];
            if (static_cast<double>(shifts[n]) < need - 1e-9) return false;
        }
    }
    return true;
}

Blueprint theorem_union(const std::vector<std::pair<double, double>>& pairs,
                        const std::vector<long long>& shifts, int k_max, int calib_depth) {
    if (pairs.empty()) throw PreconditionError("theorem_union: empty pair list");
    if (pairs.size() != shifts.size())
        throw PreconditionError("theorem_union: pair and shift counts differ");
    std::vector<double> gammas;
    for (const auto& [b, g] : pairs) {
        if (!(b >= 0.0 && b <= g && g <= 1.0))
            throw PreconditionError("theorem_union: pairs need 0 <= beta <= gamma <= 1");
        gammas.push_back(g > 0.0 ? g : 1.0);  // a point term imposes no constraint
    }
    if (!l_sequence_valid(gammas, shifts))
        throw PreconditionError("theorem_union: L sequence violates the growth condition");

    TheoremUnion tu;
    tu.shifts = shifts;
    tu.k_max = k_max;
    tu.calib_depth = calib_depth;
    for (const auto& [b, g] : pairs) {
        UnionTerm term{b, g, 1.0};
        if (b > 0.0 && b < g) term.c_f = calibrate_cf(b, g, k_max, calib_depth);
        tu.terms.push_back(term);
    }
    return tu;
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

namespace {

DyadicSet render_union_term(const UnionTerm& t, int sub_depth, int k_max, int budget) {
    if (t.beta == 0.0)
        return render(SingletonPoint{1.5}, sub_depth, budget);
    if (t.beta == t.gamma) {
        const int gens = static_cast<int>(std::ceil(sub_depth * t.beta)) + 1;
        return render(make_cantor_middle(std::exp2(-1.0 / t.beta), gens), sub_depth, budget);
    }
    return render(AssouadRegularScaled{t.beta, t.gamma, k_max, t.c_f}, sub_depth, budget);
}

}  // namespace

DyadicSet render(const Blueprint& bp, int depth, int depth_budget) {
    if (depth < 0 || depth > depth_budget || depth_budget > kDefaultDepthBudget + 20)
        throw DepthError("render: depth " + std::to_string(depth) + " exceeds budget " +
                         std::to_string(depth_budget));

    if (std::holds_alternative<FullInterval>(bp)) {
        // the half-open [1,2): one run covering the whole grid
        return DyadicSet(depth, {{DyadicSet::first_index(depth), DyadicSet::closing_index(depth)}});
    }

    CellAccum acc(depth);
    if (const auto* pt = std::get_if<SingletonPoint>(&bp)) {
        if (!(pt->x >= 1.0 && pt->x <= 2.0))
            throw PreconditionError("singleton point must lie in [1,2]");
        acc.add_point(pt->x);
    } else if (const auto* cm = std::get_if<CantorMiddle>(&bp)) {
        render_cantor(acc, cm->mu, cm->generation, cm->window, false);
    } else if (const auto* cp = std::get_if<CantorMidpoints>(&bp)) {
        render_cantor(acc, cp->mu, cp->generation, cp->window, true);
    } else if (std::holds_alternative<AssouadRegularRaw>(bp) ||
               std::holds_alternative<AssouadRegularScaled>(bp)) {
        render_regular_family(acc, family_info(bp));
    } else if (const auto* z = std::get_if<ZeroMinkowski>(&bp)) {
        render_zero_minkowski(acc, *z);
    } else if (const auto* tu = std::get_if<TheoremUnion>(&bp)) {
        DyadicSet result(depth);
        for (std::size_t i = 0; i < tu->terms.size(); ++i) {
            const long long shift = tu->shifts[i];
            const int sub_depth = depth - static_cast<int>(shift) - 1;
            if (shift > depth || sub_depth < 0) {
                // block sits below cell width; keep the cell at 1
                acc.add_cell(DyadicSet::first_index(depth));
                continue;
            }
            const DyadicSet part = render_union_term(tu->terms[i], sub_depth, tu->k_max,
                                                     depth_budget);
            result = set_union(result, affine_embed(part, static_cast<int>(shift), depth_budget));
        }
        return set_union(result, acc.finish());
    }
    return acc.finish();
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json interval_to_json(const Interval& j) {
    return json::array({static_cast<double>(j.a), static_cast<double>(j.b)});
}

Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(ParseError::Kind::BadJson, "interval must be [a, b]");
    return Interval{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string blueprint_to_json(const Blueprint& bp) {
    json out;
    if (std::holds_alternative<FullInterval>(bp)) {
        out = {{"variant", "full_interval"}, {"params", json::object()}};
    } else if (const auto* p = std::get_if<SingletonPoint>(&bp)) {
        out = {{"variant", "singleton"}, {"params", {{"x", p->x}}}};
    } else if (const auto* p = std::get_if<CantorMiddle>(&bp)) {
        out = {{"variant", "cantor_middle"},
               {"params",
                {{"mu", p->mu}, {"m", p->generation}, {"j", interval_to_json(p->window)}}}};
    } else if (const auto* p = std::get_if<CantorMidpoints>(&bp)) {
        out = {{"variant", "cantor_midpoints"},
               {"params",
                {{"mu", p->mu}, {"m", p->generation}, {"j", interval_to_json(p->window)}}}};
    } else if (const auto* p = std::get_if<AssouadRegularRaw>(&bp)) {
        out = {{"variant", "assouad_regular_raw"},
               {"params", {{"beta", p->beta}, {"gamma", p->gamma}, {"k_max", p->k_max}}}};
    } else if (const auto* p = std::get_if<AssouadRegularScaled>(&bp)) {
        out = {{"variant", "assouad_regular_scaled"},
               {"params",
                {{"beta", p->beta}, {"gamma", p->gamma}, {"k_max", p->k_max}, {"c_f", p->c_f}}}};
    } else if (const auto* p = std::get_if<ZeroMinkowski>(&bp)) {
        out = {{"variant", "zero_minkowski"},
               {"params", {{"alpha", p->alpha}, {"n_max", p->n_max}}}};
    } else if (const auto* p = std::get_if<TheoremUnion>(&bp)) {
        json pairs = json::array();
        for (const UnionTerm& t : p->terms)
            pairs.push_back({{"beta", t.beta}, {"gamma", t.gamma}, {"c_f", t.c_f}});
        out = {{"variant", "theorem_union"},
               {"params",
                {{"pairs", pairs},
                 {"l", p->shifts},
                 {"k_max", p->k_max},
                 {"calib_depth", p->calib_depth}}}};
    }
    return out.dump(2);
}

Blueprint blueprint_from_json(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, std::string("invalid JSON: ") + e.what());
    }
    try {
        const std::string variant = in.at("variant").get<std::string>();
        const json& p = in.contains("params") ? in.at("params") : json::object();
        if (variant == "full_interval") return FullInterval{};
        if (variant == "singleton") {
            const double x = p.at("x").get<double>();
            if (!(x >= 1.0 && x <= 2.0))
                throw PreconditionError("singleton point must lie in [1,2]");
            return SingletonPoint{x};
        }
        if (variant == "cantor_middle")
            return make_cantor_middle(p.at("mu").get<double>(), p.at("m").get<int>(),
                                      interval_from_json(p.at("j")));
        if (variant == "cantor_midpoints")
            return make_cantor_midpoints(p.at("mu").get<double>(), p.at("m").get<int>(),
                                         interval_from_json(p.at("j")));
        if (variant == "assouad_regular_raw")
            return assouad_regular_raw(p.at("beta").get<double>(), p.at("gamma").get<double>(),
                                       p.at("k_max").get<int>());
        if (variant == "uniform_family") {
            // calibrates on load; construct writes the c_f sidecar
            return uniform_family(p.at("beta").get<double>(), p.at("gamma").get<double>(),
                                  p.at("k_max").get<int>(),
                                  p.contains("j_max") ? p.at("j_max").get<int>() : 24);
        }
        if (variant == "assouad_regular_scaled") {
            const double beta = p.at("beta").get<double>();
            const double gamma = p.at("gamma").get<double>();
            check_pair(beta, gamma);
            const double cf = p.contains("c_f") ? p.at("c_f").get<double>()
                                                : calibrate_cf(beta, gamma, p.at("k_max").get<int>(),
                                                               24);
            if (cf < 1.0) throw PreconditionError("c_f must be >= 1");
            return AssouadRegularScaled{beta, gamma, p.at("k_max").get<int>(), cf};
        }
        if (variant == "zero_minkowski")
            return zero_minkowski(p.at("alpha").get<double>(), p.at("n_max").get<int>());
        if (variant == "theorem_union") {
            std::vector<std::pair<double, double>> pairs;
            for (const json& t : p.at("pairs"))
                pairs.emplace_back(t.at("beta").get<double>(), t.at("gamma").get<double>());
            std::vector<long long> shifts = p.at("l").get<std::vector<long long>>();
            const int k_max = p.at("k_max").get<int>();
            const int calib = p.contains("calib_depth") ? p.at("calib_depth").get<int>() : 24;
            // reuse stored calibrations when present
            bool have_cf = true;
            for (const json& t : p.at("pairs"))
                if (!t.contains("c_f")) have_cf = false;
            if (!have_cf) return theorem_union(pairs, shifts, k_max, calib);
            TheoremUnion tu;
            tu.shifts = shifts;
            tu.k_max = k_max;
            tu.calib_depth = calib;
            std::vector<double> gammas;
            for (const json& t : p.at("pairs")) {
                UnionTerm term{t.at("beta").get<double>(), t.at("gamma").get<double>(),
                               t.at("c_f").get<double>()};
                if (!(term.beta >= 0.0 && term.beta <= term.gamma && term.gamma <= 1.0))
                    throw PreconditionError("theorem_union: pairs need 0 <= beta <= gamma <= 1");
                gammas.push_back(term.gamma > 0.0 ? term.gamma : 1.0);
                tu.terms.push_back(term);
            }
            if (!l_sequence_valid(gammas, shifts))
                throw PreconditionError("theorem_union: L sequence violates the growth condition");
            return tu;
        }
        throw ParseError(ParseError::Kind::BadJson, "unknown blueprint variant: " + variant);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, std::string("blueprint schema: ") + e.what());
    }
}

}  // namespace dilset
