#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "dilset/blueprint.hpp"
#include "dilset/characteristics.hpp"
#include "dilset/dyadic.hpp"
#include "dilset/knapp.hpp"
#include "dilset/typeset.hpp"

namespace {

using namespace dilset;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << text;
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
}

std::pair<int, int> parse_scale_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw PreconditionError("scale window must be 'j_lo:j_hi'");
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

DyadicWindow parse_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw PreconditionError("window must be 'level:index'");
    DyadicWindow w{std::stoi(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
    validate_window(w);
    return w;
}

int run_construct(const std::string& blueprint_path, int depth, int budget,
                  const std::string& out) {
    const std::string text = read_file(blueprint_path);
    const Blueprint bp = blueprint_from_json(text);
    const DyadicSet s = render(bp, depth, budget);
    save_dyset(s, out);
    std::cout << "wrote " << out << " (depth " << s.depth() << ", " << s.cell_count()
              << " cells, " << s.runs().size() << " runs)\n";
    if (const auto* sc = std::get_if<AssouadRegularScaled>(&bp)) {
        std::ostringstream os;
        os << "{\n  \"beta\": " << sc->beta << ",\n  \"gamma\": " << sc->gamma
           << ",\n  \"k_max\": " << sc->k_max << ",\n  \"c_f\": " << sc->c_f << "\n}\n";
        write_file(out + ".calib.json", os.str());
        std::cout << "calibration sidecar: " << out << ".calib.json (c_f = " << sc->c_f << ")\n";
    }
    return 0;
}

int run_profile(const std::string& set_path, double beta, double gamma,
                const std::string& scale_window, bool oracle, const std::string& theta_grid,
                const std::string& spectrum_out, const std::string& out_csv,
                const std::string& out_json) {
    const DyadicSet s = load_dyset(set_path);
    auto [j_lo, j_hi] = scale_window.empty()
                            ? std::pair<int, int>{std::min(8, s.depth()), std::min(24, s.depth())}
                            : parse_scale_window(scale_window);
    const CharacteristicProfile p = profile(s, beta, gamma, j_lo, j_hi);
    write_or_print(out_csv, profile_to_csv(p));
    if (!out_json.empty()) write_file(out_json, profile_to_json(p));

    if (oracle) {
        const int j = std::min(j_hi, 12);
        const double brute = brute_assouad_oracle(s, gamma, j);
        const double dyadic = assouad_characteristic(s, gamma, j).value;
        std::cout << "oracle check at j=" << j << ": dyadic=" << dyadic << " brute=" << brute
                  << " ratio=" << (dyadic > 0 ? brute / dyadic : 0.0) << " (must be in [1,4])\n";
        if (!(brute >= dyadic * (1 - 1e-9) && brute <= 4 * dyadic * (1 + 1e-9))) {
            std::cerr << "oracle disagreement beyond factor 4\n";
            return 1;
        }
    }
    if (!theta_grid.empty()) {
        // "a:b:n" -> n thetas equally spaced in [a,b]
        std::istringstream ts(theta_grid);
        std::string sa, sb, sn;
        std::getline(ts, sa, ':');
        std::getline(ts, sb, ':');
        std::getline(ts, sn, ':');
        const double a = std::stod(sa), b = std::stod(sb);
        const int n = std::stoi(sn);
        if (n < 1 || a <= 0 || b >= 1 || a > b)
            throw PreconditionError("theta grid must be 'a:b:n' with 0 < a <= b < 1");
        std::vector<double> thetas;
        for (int i = 0; i < n; ++i)
            thetas.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        const QuasiAssouadEstimate q = estimate_quasi_assouad(s, thetas, j_lo, j_hi);
        write_or_print(spectrum_out, spectrum_curve_to_csv(q));
        std::cout << "quasi-assouad estimate (theta=" << thetas.back() << "): " << q.value
                  << "\n";
    }
    return 0;
}

int run_qpoly(int d, const std::string& beta, const std::string& gamma, const std::string& out) {
    const Rational b = rational_from_string(beta);
    const Rational g = rational_from_string(gamma);
    const TypeSetPolygon poly = q_polygon(d, b, g);
    for (const PQPoint& v : poly.vertices())
        std::cout << "(" << rational_to_string(v.x) << ", " << rational_to_string(v.y) << ") = ("
                  << static_cast<double>(v.x) << ", " << static_cast<double>(v.y) << ")\n";
    if (!out.empty()) write_file(out, polygon_to_json(poly));
    return 0;
}

int run_intersect(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<TypeSetPolygon> polys;
    for (const std::string& path : inputs) polys.push_back(polygon_from_json(read_file(path)));
    const TypeSetPolygon r = polygon_intersection(polys);
    for (const PQPoint& v : r.vertices())
        std::cout << "(" << rational_to_string(v.x) << ", " << rational_to_string(v.y) << ")\n";
    if (!out.empty()) write_file(out, polygon_to_json(r));
    return 0;
}

int run_realize(const std::string& input, int d, int k_max, int calib_depth, long long l1,
                const std::string& out) {
    const TypeSetPolygon w = polygon_from_json(read_file(input));
    RealizeOptions opts;
    opts.k_max = k_max;
    opts.calib_depth = calib_depth;
    opts.l1 = l1;
    const Realization r = realize_type_set(w, d, opts);
    std::ostringstream os;
    os << "{\n  \"beta\": \"" << rational_to_string(r.beta) << "\",\n  \"gamma\": \""
       << rational_to_string(r.gamma) << "\",\n  \"pairs\": [";
    for (std::size_t i = 0; i < r.pairs.size(); ++i)
        os << (i ? ", " : "") << "[\"" << rational_to_string(r.pairs[i].first) << "\", \""
           << rational_to_string(r.pairs[i].second) << "\"]";
    os << "],\n  \"l\": [";
    for (std::size_t i = 0; i < r.shifts.size(); ++i) os << (i ? ", " : "") << r.shifts[i];
    os << "],\n  \"blueprint\": " << blueprint_to_json(r.blueprint) << "\n}\n";
    write_or_print(out, os.str());
    std::cout << "beta = " << static_cast<double>(r.beta)
              << ", gamma_min = " << static_cast<double>(r.gamma) << ", " << r.pairs.size()
              << " pair(s)\n";
    return 0;
}

int run_knapp_verify(double a, double delta, double rho, double c, const std::string& set_path,
                     const std::string& window_spec, double threshold, const std::string& out) {
    KnappConfig cfg;
    cfg.a = a;
    cfg.delta = delta;
    cfg.rho = rho;
    cfg.c = c;
    cfg.validate();
    const DyadicSet e = set_path.empty()
                            ? render(FullInterval{}, 14)
                            : load_dyset(set_path);
    const DyadicWindow w = window_spec.empty() ? whole_domain_window() : parse_window(window_spec);
    const PointwiseLowerResult r = verify_pointwise_lower(cfg, e, w, threshold);
    std::ostringstream os;
    os << "a,delta,rho,c,min_ratio,samples,pass\n";
    os << a << "," << delta << "," << rho << "," << c << "," << r.min_ratio << "," << r.samples
       << "," << (r.pass ? 1 : 0) << "\n";
    write_or_print(out, os.str());
    std::cout << "min ratio " << r.min_ratio << " over " << r.samples << " samples: "
              << (r.pass ? "PASS" : "FAIL") << "\n";
    return r.pass ? 0 : 1;
}

int run_knapp_experiment(const std::string& set_path, const std::string& window_spec,
                         const std::string& deltas_csv, double inv_p, double inv_q,
                         const std::string& out) {
    const DyadicSet e = load_dyset(set_path);
    const DyadicWindow w = parse_window(window_spec);
    std::vector<double> deltas;
    std::istringstream ds(deltas_csv);
    std::string tok;
    while (std::getline(ds, tok, ',')) deltas.push_back(std::stod(tok));
    const ExperimentRecord rec = norm_ratio_experiment(KnappConfig{}, deltas, e, w, inv_p, inv_q);
    write_or_print(out, record_to_csv(rec));
    std::cout << "fitted slope " << rec.fitted_slope << " vs predicted " << rec.predicted_slope
              << " (beta_local " << rec.beta_local << ", residual " << rec.residual << ")\n";
    return 0;
}

int run_selftest(unsigned seed) {
    std::cout << "seed " << seed << "\n";
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> depth_dist(2, 16);
    for (int round = 0; round < 50; ++round) {
        const int depth = depth_dist(rng);
        const std::int64_t lo = DyadicSet::first_index(depth);
        const std::int64_t hi = DyadicSet::closing_index(depth);
        std::uniform_int_distribution<std::int64_t> cell(lo, hi);
        std::vector<Run> runs;
        for (int i = 0; i < 12; ++i) {
            const std::int64_t b = cell(rng);
            runs.push_back({b, std::min(hi + 1, b + 1 + (cell(rng) - lo) % 8)});
        }
        const DyadicSet s(depth, runs);
        if (deserialize(serialize(s)) != s) {
            std::cerr << "round-trip mismatch at round " << round << "\n";
            return 1;
        }
    }
    std::cout << "serialization round-trip verified on 50 random sets\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dilation-set workbench: fractal dilation sets, covering characteristics, "
                 "type-set geometry and spherical-average experiments"};
    app.require_subcommand(1);
    unsigned seed = 12345;
    app.add_option("--seed", seed, "seed for randomized self-checks");

    // construct
    auto* construct = app.add_subcommand("construct", "render a blueprint to a DYSET file");
    std::string bp_path, out_path;
    int depth = 20, budget = kDefaultDepthBudget;
    construct->add_option("--blueprint", bp_path, "blueprint JSON")->required();
    construct->add_option("--depth", depth, "grid depth")->required();
    construct->add_option("--budget", budget, "depth budget");
    construct->add_option("--out", out_path, "output DYSET path")->required();

    // profile
    auto* prof = app.add_subcommand("profile", "characteristic profile of a DYSET file");
    std::string set_path, scale_window, theta_grid, spectrum_out, out_csv, out_json;
    double beta = 0.5, gamma = 1.0;
    bool oracle = false;
    prof->add_option("--set", set_path, "DYSET input")->required();
    prof->add_option("--beta", beta, "Minkowski exponent");
    prof->add_option("--gamma", gamma, "Assouad exponent");
    prof->add_option("--scale-window", scale_window, "j_lo:j_hi");
    prof->add_flag("--oracle", oracle, "cross-check against the brute-force window supremum");
    prof->add_option("--theta-grid", theta_grid, "a:b:n spectrum grid");
    prof->add_option("--spectrum-out", spectrum_out, "spectrum curve CSV");
    prof->add_option("--out", out_csv, "profile CSV (stdout when omitted)");
    prof->add_option("--json", out_json, "profile JSON");

    // typeset
    auto* typeset = app.add_subcommand("typeset", "exact type-set geometry");
    typeset->require_subcommand(1);
    auto* qpoly = typeset->add_subcommand("qpoly", "corner points and polygon");
    int d = 2;
    std::string beta_str = "1/2", gamma_str = "1", poly_out;
    qpoly->add_option("-d,--dim", d, "ambient dimension");
    qpoly->add_option("-b,--beta", beta_str, "beta (rational)");
    qpoly->add_option("-g,--gamma", gamma_str, "gamma (rational)");
    qpoly->add_option("--out", poly_out, "polygon JSON");

    auto* intersect = typeset->add_subcommand("intersect", "intersect polygons");
    std::vector<std::string> poly_inputs;
    std::string intersect_out;
    intersect->add_option("--in", poly_inputs, "polygon JSON inputs")->required();
    intersect->add_option("--out", intersect_out, "output JSON");

    auto* realize = typeset->add_subcommand("realize", "realize a polygon as a dilation set");
    std::string realize_in, realize_out;
    int rk_max = 6, rcalib = 14;
    long long l1 = 1;
    realize->add_option("--in", realize_in, "polygon JSON")->required();
    realize->add_option("-d,--dim", d, "ambient dimension");
    realize->add_option("--k-max", rk_max, "blocks per family");
    realize->add_option("--calib-depth", rcalib, "calibration depth");
    realize->add_option("--l1", l1, "first level shift");
    realize->add_option("--out", realize_out, "realization JSON");

    // knapp
    auto* knapp = app.add_subcommand("knapp", "spherical-average experiments");
    knapp->require_subcommand(1);
    auto* verify = knapp->add_subcommand("verify", "pointwise lower-bound scan");
    double ka = 1.0, kdelta = 1.0 / 256, krho = 1.0 / 16, kc = 1e-2, kthresh = 0.1;
    std::string kset, kwindow, kout;
    verify->add_option("--a", ka, "cap radius");
    verify->add_option("--delta", kdelta, "thickness");
    verify->add_option("--rho", krho, "cap width parameter");
    verify->add_option("--c", kc, "region constant");
    verify->add_option("--set", kset, "DYSET dilation set (default: full [1,2])");
    verify->add_option("--window", kwindow, "level:index window (default: whole domain)");
    verify->add_option("--threshold", kthresh, "acceptance ratio");
    verify->add_option("--out", kout, "CSV output");

    auto* experiment = knapp->add_subcommand("experiment", "norm-ratio sweep");
    std::string eset, ewindow, edeltas, eout;
    double inv_p = 0.4, inv_q = 0.2;
    experiment->add_option("--set", eset, "DYSET dilation set")->required();
    experiment->add_option("--window", ewindow, "level:index window")->required();
    experiment->add_option("--deltas", edeltas, "comma-separated deltas")->required();
    experiment->add_option("--inv-p", inv_p, "1/p");
    experiment->add_option("--inv-q", inv_q, "1/q");
    experiment->add_option("--out", eout, "CSV output");

    auto* smoke = knapp->add_subcommand("smoke", "f == 1 quadrature sanity");

    auto* selftest = app.add_subcommand("selftest", "seeded serialization property check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (construct->parsed()) return run_construct(bp_path, depth, budget, out_path);
        if (prof->parsed())
            return run_profile(set_path, beta, gamma, scale_window, oracle, theta_grid,
                               spectrum_out, out_csv, out_json);
        if (typeset->parsed()) {
            if (qpoly->parsed()) return run_qpoly(d, beta_str, gamma_str, poly_out);
            if (intersect->parsed()) return run_intersect(poly_inputs, intersect_out);
            if (realize->parsed())
                return run_realize(realize_in, d, rk_max, rcalib, l1, realize_out);
        }
        if (knapp->parsed()) {
            if (verify->parsed())
                return run_knapp_verify(ka, kdelta, krho, kc, kset, kwindow, kthresh, kout);
            if (experiment->parsed())
                return run_knapp_experiment(eset, ewindow, edeltas, inv_p, inv_q, eout);
            if (smoke->parsed()) {
                auto one = [](double, double) { return 1.0; };
                const double v = dilset::spherical_average(one, 0.3, -0.2, 1.5, 4096);
                std::cout << "average of 1 over the circle: " << v << "\n";
                return std::abs(v - 1.0) < 1e-12 ? 0 : 1;
            }
        }
        if (selftest->parsed()) return run_selftest(seed);
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const DepthError& e) {
        std::cerr << "depth error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
