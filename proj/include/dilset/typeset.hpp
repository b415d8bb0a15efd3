#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dilset/blueprint.hpp"
#include "dilset/errors.hpp"

namespace dilset {

// Exact 2D convex calculus for L^p-improving type sets.  All coordinates are
// arbitrary-precision rationals; nothing in this module rounds.

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "3/5", "0.6", "1" into an exact rational.
Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& r);

struct PQPoint {
    Rational x;  // 1/p
    Rational y;  // 1/q

    friend bool operator==(const PQPoint&, const PQPoint&) = default;
};

// Half-plane a*x + b*y <= c with integer coefficients, gcd(a,b,c) = 1.
struct SupportLine {
    BigInt a, b, c;

    // Orientation-free key for "is this the same line": sign-canonical triple.
    SupportLine undirected_key() const;
    friend bool operator==(const SupportLine&, const SupportLine&) = default;
};

SupportLine line_through(const PQPoint& p, const PQPoint& q);

enum class PolygonTag { QPolygon, Intersection, User };

// Convex polygon in [0,1]^2, vertices counterclockwise and strictly convex.
class TypeSetPolygon {
public:
    // Convex hull of the given points; collinear and duplicate points are
    // absorbed.  Throws if the hull has no interior.
    static TypeSetPolygon from_points(std::vector<PQPoint> points,
                                      PolygonTag tag = PolygonTag::User);

    const std::vector<PQPoint>& vertices() const { return verts_; }
    PolygonTag tag() const { return tag_; }
    std::size_t size() const { return verts_.size(); }

    bool contains(const PQPoint& p) const;          // closed containment
    bool contains(const TypeSetPolygon& q) const;   // q subset of *this
    std::vector<SupportLine> edge_lines() const;    // one half-plane per edge

    // Equality as point sets (canonical vertex rotation).
    friend bool operator==(const TypeSetPolygon& a, const TypeSetPolygon& b);

private:
    TypeSetPolygon(std::vector<PQPoint> verts, PolygonTag tag)
        : verts_(std::move(verts)), tag_(tag) {}

    std::vector<PQPoint> verts_;
    PolygonTag tag_;
};

// The four corner points of eqn-style type regions for dimension d and
// parameters 0 <= beta <= gamma <= 1.
struct QPoints {
    PQPoint q1, q2, q3, q4;
};

QPoints q_points(int d, const Rational& beta, const Rational& gamma);
TypeSetPolygon q_polygon(int d, const Rational& beta, const Rational& gamma);

TypeSetPolygon polygon_intersection(const std::vector<TypeSetPolygon>& polys);

// Where a line crosses the locus of third corner points (x + y = 1):
// recovers beta' with the crossing at q3(beta').  Throws on parallel lines or
// beta' outside [0,1].
Rational beta_from_line(const SupportLine& line, int d);

// Where a line crosses the fourth-corner locus (x = d*y): recovers gamma'.
Rational gamma_from_line(const SupportLine& line, int d);

struct Realization {
    Rational beta;
    Rational gamma;                                   // minimal feasible gamma
    std::vector<std::pair<Rational, Rational>> pairs; // recovered (beta_n, gamma_n)
    std::vector<long long> shifts;                    // L sequence used
    Blueprint blueprint;
};

struct RealizeOptions {
    int k_max = 6;
    int calib_depth = 14;
    long long l1 = 1;
};

// Theorem-style realization: reads (beta, gamma) off the polygon, recovers one
// (beta_n, gamma_n) pair per boundary edge that is not an edge of the minimal
// q_polygon, and packages a renderable blueprint.
Realization realize_type_set(const TypeSetPolygon& w, int d, const RealizeOptions& opts = {});

// Exponent bundle of the covering-number necessary condition
//   N(E cap I, delta)^(1/q) <= C * delta^e_delta * (delta/|I|)^e_window:
// e_delta = 1/p - d/q, e_window = (d-1)/2 * (1/p + 1/q - 1).
struct ExponentBundle {
    Rational e_delta;
    Rational e_window;
    Rational e_count;  // 1/q
};

ExponentBundle lower_bound_exponent(int d, const Rational& inv_p, const Rational& inv_q);

// One windowed covering observation: N cells of E cap I at scale 2^-j for a
// window of length 2^-level.
struct CoveringObservation {
    int j = 0;
    int level = 0;
    std::int64_t count = 1;
};

// Largest value of (1/q)log2 N + e_delta*j + e_window*(j-level) over the
// observations; growth in j rules the pair (1/p, 1/q) out.
struct BoundDiagnostic {
    double max_violation = 0.0;
    CoveringObservation argmax;
};

BoundDiagnostic q4_bound_diagnostic(const ExponentBundle& e,
                                    const std::vector<CoveringObservation>& data);

// JSON: {"tag": ..., "vertices": [{"x": {"num": "..", "den": ".."}, "y": ...}]}
std::string polygon_to_json(const TypeSetPolygon& p);
TypeSetPolygon polygon_from_json(const std::string& text);

}  // namespace dilset
