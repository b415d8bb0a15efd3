#include "dilset/typeset.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace dilset {

namespace {

using json = nlohmann::json;

Rational cross(const PQPoint& o, const PQPoint& a, const PQPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

bool lex_less(const PQPoint& a, const PQPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Monotone-chain hull, counterclockwise, strictly convex.
std::vector<PQPoint> convex_hull(std::vector<PQPoint> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<PQPoint> hull;
    auto build = [&](auto begin, auto end) {
        const std::size_t base = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= base + 2 &&
                   sign(cross(hull[hull.size() - 2], hull.back(), *it)) <= 0)
                hull.pop_back();
            hull.push_back(*it);
        }
        hull.pop_back();
    };
    build(pts.begin(), pts.end());
    build(pts.rbegin(), pts.rend());
    return hull;
}

void canonical_rotate(std::vector<PQPoint>& verts) {
    auto first = std::min_element(verts.begin(), verts.end(), lex_less);
    std::rotate(verts.begin(), first, verts.end());
}

BigInt gcd3(BigInt a, BigInt b, BigInt c) {
    using boost::multiprecision::gcd;
    return gcd(gcd(abs(a), abs(b)), abs(c));
}

}  // namespace

Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw ParseError(ParseError::Kind::BadJson, "empty rational");
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const BigInt num(s.substr(0, slash));
            const BigInt den(s.substr(slash + 1));
            if (den == 0) throw ParseError(ParseError::Kind::BadJson, "zero denominator");
            return Rational(num, den);
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(BigInt(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac_len = s.size() - dot - 1;
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(BigInt(digits), den);
    } catch (const std::exception&) {
        throw ParseError(ParseError::Kind::BadJson, "bad rational literal: '" + s + "'");
    }
}

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

SupportLine SupportLine::undirected_key() const {
    SupportLine k = *this;
    const int s = (k.a != 0) ? sign(Rational(k.a)) : sign(Rational(k.b));
    if (s < 0) {
        k.a = -k.a;
        k.b = -k.b;
        k.c = -k.c;
    }
    return k;
}

SupportLine line_through(const PQPoint& p, const PQPoint& q) {
    // direction (dx,dy); outward normal (dy,-dx) for CCW traversal p -> q
    const Rational a = q.y - p.y;
    const Rational b = p.x - q.x;
    const Rational c = a * p.x + b * p.y;
    // clear denominators
    BigInt da = denominator(a), db = denominator(b), dc = denominator(c);
    BigInt scale = lcm(lcm(da, db), dc);
    BigInt ia = numerator(a) * (scale / da);
    BigInt ib = numerator(b) * (scale / db);
    BigInt ic = numerator(c) * (scale / dc);
    const BigInt g = gcd3(ia, ib, ic);
    if (g > 1) {
        ia /= g;
        ib /= g;
        ic /= g;
    }
    if (ia == 0 && ib == 0) throw PreconditionError("degenerate line through equal points");
    return SupportLine{ia, ib, ic};
}

TypeSetPolygon TypeSetPolygon::from_points(std::vector<PQPoint> points, PolygonTag tag) {
    for (const PQPoint& p : points)
        if (p.x < 0 || p.x > 1 || p.y < 0 || p.y > 1)
            throw PreconditionError("type-set points must lie in [0,1]^2");
    std::vector<PQPoint> hull = convex_hull(std::move(points));
    if (hull.size() < 3)
        throw PreconditionError("polygon is degenerate (no interior)");
    canonical_rotate(hull);
    return TypeSetPolygon(std::move(hull), tag);
}

bool TypeSetPolygon::contains(const PQPoint& p) const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (sign(cross(verts_[i], verts_[(i + 1) % n], p)) < 0) return false;
    return true;
}

bool TypeSetPolygon::contains(const TypeSetPolygon& q) const {
    for (const PQPoint& v : q.vertices())
        if (!contains(v)) return false;
    return true;
}

std::vector<SupportLine> TypeSetPolygon::edge_lines() const {
    std::vector<SupportLine> out;
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(line_through(verts_[i], verts_[(i + 1) % n]));
    return out;
}

bool operator==(const TypeSetPolygon& a, const TypeSetPolygon& b) {
    return a.verts_ == b.verts_;
}

QPoints q_points(int d, const Rational& beta, const Rational& gamma) {
    if (d < 2) throw PreconditionError("dimension d must be >= 2");
    if (beta < 0 || beta > gamma || gamma > 1)
        throw PreconditionError("q_points needs 0 <= beta <= gamma <= 1");
    QPoints q;
    q.q1 = {0, 0};
    const Rational dm1 = d - 1;
    q.q2 = {dm1 / (dm1 + beta), dm1 / (dm1 + beta)};
    q.q3 = {(d - beta) / (d - beta + 1), Rational(1) / (d - beta + 1)};
    const Rational den = d * d + 2 * gamma - 1;
    q.q4 = {d * dm1 / den, dm1 / den};
    return q;
}

TypeSetPolygon q_polygon(int d, const Rational& beta, const Rational& gamma) {
    const QPoints q = q_points(d, beta, gamma);
    return TypeSetPolygon::from_points({q.q1, q.q2, q.q3, q.q4}, PolygonTag::QPolygon);
}

namespace {

Rational line_eval(const SupportLine& l, const PQPoint& p) {
    return Rational(l.a) * p.x + Rational(l.b) * p.y - Rational(l.c);
}

std::vector<PQPoint> clip_by_halfplane(const std::vector<PQPoint>& poly, const SupportLine& l) {
    std::vector<PQPoint> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PQPoint& cur = poly[i];
        const PQPoint& nxt = poly[(i + 1) % n];
        const Rational vc = line_eval(l, cur);
        const Rational vn = line_eval(l, nxt);
        if (vc <= 0) out.push_back(cur);
        if ((vc < 0 && vn > 0) || (vc > 0 && vn < 0)) {
            const Rational t = vc / (vc - vn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return out;
}

}  // namespace

TypeSetPolygon polygon_intersection(const std::vector<TypeSetPolygon>& polys) {
    if (polys.empty()) throw PreconditionError("polygon_intersection: empty input");
    std::vector<PQPoint> cur(polys[0].vertices().begin(), polys[0].vertices().end());
    for (std::size_t i = 1; i < polys.size(); ++i) {
        for (const SupportLine& l : polys[i].edge_lines()) {
            cur = clip_by_halfplane(cur, l);
            if (cur.size() < 3)
                throw InfeasibleError("polygon intersection is empty or degenerate");
        }
    }
    return TypeSetPolygon::from_points(std::move(cur), PolygonTag::Intersection);
}

Rational beta_from_line(const SupportLine& l, int d) {
    if (d < 2) throw PreconditionError("dimension d must be >= 2");
    // intersect with x + y = 1
    if (l.a == l.b) throw PreconditionError("line is parallel to the x+y=1 locus");
    const Rational y = (Rational(l.a) - Rational(l.c)) / (Rational(l.a) - Rational(l.b));
    if (y == 0) throw PreconditionError("line meets the locus at y = 0");
    const Rational beta = Rational(d + 1) - 1 / y;
    if (beta < 0 || beta > 1)
        throw InfeasibleError("recovered beta' = " + rational_to_string(beta) +
                              " lies outside [0,1]");
    return beta;
}

Rational gamma_from_line(const SupportLine& l, int d) {
    if (d < 2) throw PreconditionError("dimension d must be >= 2");
    // intersect with x = d*y
    const Rational den = Rational(l.a) * d + Rational(l.b);
    if (den == 0) throw PreconditionError("line is parallel to the x=dy locus");
    const Rational y = Rational(l.c) / den;
    if (y == 0) throw PreconditionError("line meets the locus at the origin");
    const Rational gamma = (Rational(d - 1) / y - d * d + 1) / 2;
    if (gamma < 0 || gamma > 1)
        throw InfeasibleError("recovered gamma' = " + rational_to_string(gamma) +
                              " lies outside [0,1]");
    return gamma;
}

namespace {

// Largest y with (d*y, y) in w; the polygon always contains the origin end.
Rational max_point_on_q4_locus(const TypeSetPolygon& w, int d) {
    Rational best = 0;
    const auto& v = w.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PQPoint& p = v[i];
        const PQPoint& q = v[(i + 1) % n];
        const Rational fp = p.x - d * p.y;
        const Rational fq = q.x - d * q.y;
        if (fp == 0) best = std::max(best, p.y);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
            const Rational t = fp / (fp - fq);
            best = std::max(best, Rational(p.y + t * (q.y - p.y)));
        }
    }
    return best;
}

}  // namespace

Realization realize_type_set(const TypeSetPolygon& w, int d, const RealizeOptions& opts) {
    if (d < 2) throw PreconditionError("dimension d must be >= 2");

    // beta is forced by the unique vertex on the third-corner locus x+y=1.
    std::optional<PQPoint> q3_vertex;
    for (const PQPoint& v : w.vertices()) {
        if (v.x + v.y == 1) {
            if (q3_vertex)
                throw InfeasibleError("ambiguous input: several vertices on the x+y=1 locus");
            q3_vertex = v;
        }
    }
    if (!q3_vertex)
        throw InfeasibleError("cannot read beta: no vertex on the x+y=1 locus");
    const Rational beta = Rational(d + 1) - 1 / q3_vertex->y;
    if (beta < 0 || beta > 1)
        throw InfeasibleError("vertex on the x+y=1 locus yields beta outside [0,1]");

    // minimal gamma: the farthest point of w along x = d*y
    const Rational y4 = max_point_on_q4_locus(w, d);
    if (y4 == 0) throw InfeasibleError("polygon does not reach the x=dy locus");
    const Rational gamma = (Rational(d - 1) / y4 - d * d + 1) / 2;
    if (gamma > 1)
        throw InfeasibleError("polygon is too thin along x=dy: minimal gamma exceeds 1");
    if (gamma < beta)
        throw InfeasibleError("minimal gamma is below beta");

    const TypeSetPolygon inner = q_polygon(d, beta, gamma);
    const TypeSetPolygon outer = q_polygon(d, beta, beta);
    if (!w.contains(inner) || !outer.contains(w))
        throw InfeasibleError("polygon violates the q-polygon sandwich");

    Realization out;
    out.beta = beta;
    out.gamma = gamma;
    const double beta_d = static_cast<double>(beta);
    const double gamma_d = static_cast<double>(gamma);

    if (beta == 0) {
        // sandwiched between equal polygons: a single average realizes it
        out.pairs.emplace_back(beta, gamma);
        out.shifts = {opts.l1};
        out.blueprint = SingletonPoint{1.5};
        return out;
    }
    if (gamma == beta) {
        out.pairs.emplace_back(beta, beta);
        out.shifts = {opts.l1};
        const int gens = static_cast<int>(std::ceil(opts.calib_depth * beta_d)) + 1;
        out.blueprint = make_cantor_middle(std::exp2(-1.0 / beta_d), gens);
        return out;
    }
    if (w == inner) {
        out.pairs.emplace_back(beta, gamma);
        out.shifts = {opts.l1};
        out.blueprint = uniform_family(beta_d, gamma_d, opts.k_max, opts.calib_depth);
        return out;
    }

    // edges of w whose lines do not carry an edge of the minimal q-polygon
    std::vector<SupportLine> skip;
    for (const SupportLine& l : inner.edge_lines()) skip.push_back(l.undirected_key());
    for (const SupportLine& l : w.edge_lines()) {
        const SupportLine key = l.undirected_key();
        if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
        out.pairs.emplace_back(beta_from_line(l, d), gamma_from_line(l, d));
    }
    if (out.pairs.empty())
        throw InfeasibleError("no realizable boundary edges found");

    std::vector<std::pair<double, double>> pairs_d;
    std::vector<double> gammas_d;
    for (const auto& [b, g] : out.pairs) {
        pairs_d.emplace_back(static_cast<double>(b), static_cast<double>(g));
        gammas_d.push_back(std::max(static_cast<double>(g), 1e-9));
    }
    out.shifts = l_sequence(gammas_d, opts.l1);
    out.blueprint = theorem_union(pairs_d, out.shifts, opts.k_max, opts.calib_depth);
    return out;
}

ExponentBundle lower_bound_exponent(int d, const Rational& inv_p, const Rational& inv_q) {
    if (d < 2) throw PreconditionError("dimension d must be >= 2");
    if (inv_p < 0 || inv_p > 1 || inv_q < 0 || inv_q > 1)
        throw PreconditionError("(1/p, 1/q) must lie in [0,1]^2");
    ExponentBundle e;
    e.e_delta = inv_p - d * inv_q;
    e.e_window = Rational(d - 1) / 2 * (inv_p + inv_q - 1);
    e.e_count = inv_q;
    return e;
}

BoundDiagnostic q4_bound_diagnostic(const ExponentBundle& e,
                                    const std::vector<CoveringObservation>& data) {
    BoundDiagnostic out;
    out.max_violation = -1e300;
    for (const CoveringObservation& obs : data) {
        const double v = static_cast<double>(e.e_count) *
                             std::log2(static_cast<double>(obs.count)) +
                         static_cast<double>(e.e_delta) * obs.j +
                         static_cast<double>(e.e_window) * (obs.j - obs.level);
        if (v > out.max_violation) {
            out.max_violation = v;
            out.argmax = obs;
        }
    }
    return out;
}

namespace {

json rational_to_json(const Rational& r) {
    return json{{"num", numerator(r).str()}, {"den", denominator(r).str()}};
}

Rational rational_from_json(const json& j) {
    const BigInt num(j.at("num").get<std::string>());
    const BigInt den(j.at("den").get<std::string>());
    if (den == 0) throw ParseError(ParseError::Kind::BadJson, "zero denominator");
    return Rational(num, den);
}

const char* tag_name(PolygonTag t) {
    switch (t) {
        case PolygonTag::QPolygon: return "q_polygon";
        case PolygonTag::Intersection: return "intersection";
        default: return "user";
    }
}

}  // namespace

std::string polygon_to_json(const TypeSetPolygon& p) {
    json verts = json::array();
    for (const PQPoint& v : p.vertices())
        verts.push_back({{"x", rational_to_json(v.x)}, {"y", rational_to_json(v.y)}});
    json out{{"tag", tag_name(p.tag())}, {"vertices", verts}};
    return out.dump(2);
}

TypeSetPolygon polygon_from_json(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, std::string("invalid JSON: ") + e.what());
    }
    try {
        std::vector<PQPoint> pts;
        for (const json& v : in.at("vertices"))
            pts.push_back({rational_from_json(v.at("x")), rational_from_json(v.at("y"))});
        PolygonTag tag = PolygonTag::User;
        if (in.contains("tag")) {
            const std::string t = in.at("tag").get<std::string>();
            if (t == "q_polygon") tag = PolygonTag::QPolygon;
            else if (t == "intersection") tag = PolygonTag::Intersection;
        }
        return TypeSetPolygon::from_points(std::move(pts), tag);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, std::string("polygon schema: ") + e.what());
    }
}

}  // namespace dilset
