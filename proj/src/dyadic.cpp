#include "dilset/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dilset {

namespace {

void check_depth(int depth) {
    if (depth < 0 || depth > 62)
        throw PreconditionError("depth out of range: " + std::to_string(depth));
}

std::vector<Run> normalize_runs(int depth, std::vector<Run> runs) {
    const std::int64_t lo = DyadicSet::first_index(depth);
    const std::int64_t hi = DyadicSet::closing_index(depth) + 1;  // end is exclusive
    for (const Run& r : runs) {
        if (r.begin >= r.end)
            throw PreconditionError("empty or reversed run");
        if (r.begin < lo || r.end > hi)
            throw PreconditionError("run outside the [1,2] grid at depth " +
                                    std::to_string(depth));
    }
    std::sort(runs.begin(), runs.end(),
              [](const Run& a, const Run& b) { return a.begin < b.begin; });
    std::vector<Run> out;
    for (const Run& r : runs) {
        if (!out.empty() && r.begin <= out.back().end)
            out.back().end = std::max(out.back().end, r.end);
        else
            out.push_back(r);
    }
    return out;
}

}  // namespace

DyadicSet::DyadicSet(int depth) : depth_(depth) { check_depth(depth); }

DyadicSet::DyadicSet(int depth, std::vector<Run> runs) : depth_(depth) {
    check_depth(depth);
    runs_ = normalize_runs(depth, std::move(runs));
}

std::int64_t DyadicSet::cell_count() const {
    std::int64_t total = 0;
    for (const Run& r : runs_) total += r.end - r.begin;
    return total;
}

bool DyadicSet::contains_cell(std::int64_t n) const {
    auto it = std::upper_bound(runs_.begin(), runs_.end(), n,
                               [](std::int64_t v, const Run& r) { return v < r.begin; });
    if (it == runs_.begin()) return false;
    --it;
    return n >= it->begin && n < it->end;
}

DyadicWindow whole_domain_window() { return DyadicWindow{0, 1}; }

void validate_window(const DyadicWindow& w) {
    if (w.level < 0 || w.level > 62)
        throw PreconditionError("window level out of range");
    const std::int64_t lo = std::int64_t{1} << w.level;
    if (w.index < lo || w.index >= 2 * lo)
        throw PreconditionError("window outside [1,2]");
}

std::vector<Run> coarse_runs(const DyadicSet& s, int coarse_depth) {
    if (coarse_depth < 0 || coarse_depth > s.depth())
        throw DepthError("cannot refine below stored depth: requested " +
                         std::to_string(coarse_depth) + ", stored " +
                         std::to_string(s.depth()));
    const int shift = s.depth() - coarse_depth;
    std::vector<Run> out;
    for (const Run& r : s.runs()) {
        Run c{r.begin >> shift, ((r.end - 1) >> shift) + 1};
        if (!out.empty() && c.begin <= out.back().end)
            out.back().end = std::max(out.back().end, c.end);
        else
            out.push_back(c);
    }
    return out;
}

std::int64_t covering_number(const DyadicSet& s, int coarse_depth) {
    std::int64_t total = 0;
    for (const Run& r : coarse_runs(s, coarse_depth)) total += r.end - r.begin;
    return total;
}

DyadicSet restrict_to(const DyadicSet& s, const DyadicWindow& w) {
    validate_window(w);
    if (w.level > s.depth())
        throw DepthError("window level exceeds set depth");
    const int shift = s.depth() - w.level;
    const std::int64_t lo = w.index << shift;
    std::int64_t hi = (w.index + 1) << shift;
    if (w.is_rightmost()) ++hi;  // absorb the closing cell
    std::vector<Run> out;
    for (const Run& r : s.runs()) {
        const std::int64_t b = std::max(r.begin, lo);
        const std::int64_t e = std::min(r.end, hi);
        if (b < e) out.push_back({b, e});
    }
    return DyadicSet(s.depth(), std::move(out));
}

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b) {
    if (a.depth() != b.depth())
        throw DepthError("union of sets at different depths (refine first)");
    std::vector<Run> runs = a.runs();
    runs.insert(runs.end(), b.runs().begin(), b.runs().end());
    return DyadicSet(a.depth(), std::move(runs));
}

DyadicSet affine_embed(const DyadicSet& s, int l, int depth_budget) {
    if (l < 0) throw PreconditionError("affine_embed: negative level shift");
    const int new_depth = s.depth() + l + 1;
    if (new_depth > depth_budget)
        throw DepthError("affine_embed exceeds depth budget " + std::to_string(depth_budget));
    const std::int64_t offset = std::int64_t{1} << new_depth;
    std::vector<Run> out;
    out.reserve(s.runs().size());
    for (const Run& r : s.runs()) out.push_back({r.begin + offset, r.end + offset});
    return DyadicSet(new_depth, std::move(out));
}

WindowCount max_window_count(const std::vector<Run>& cells, int coarse_depth, int level) {
    if (level < 0 || level > coarse_depth)
        throw PreconditionError("window level out of range for coarse depth");
    const int shift = coarse_depth - level;
    const std::int64_t wsize = std::int64_t{1} << shift;
    const std::int64_t last_window = (std::int64_t{2} << level) - 1;
    auto window_of = [&](std::int64_t cell) {
        return std::min(cell >> shift, last_window);  // closing cell -> rightmost window
    };

    WindowCount best{0, 0};
    std::int64_t cur_w = -1, cur_cnt = 0;
    auto flush = [&] {
        if (cur_w >= 0 && cur_cnt > best.count) best = {cur_w, cur_cnt};
    };
    auto emit = [&](std::int64_t w, std::int64_t cnt) {
        if (w == cur_w) {
            cur_cnt += cnt;
        } else {
            flush();
            cur_w = w;
            cur_cnt = cnt;
        }
    };

    for (const Run& r : cells) {
        const std::int64_t wf = window_of(r.begin);
        const std::int64_t wl = window_of(r.end - 1);
        if (wf == wl) {
            emit(wf, r.end - r.begin);
            continue;
        }
        emit(wf, (wf + 1) * wsize - r.begin);
        if (wl - wf > 1) {
            // interior windows are fully covered; flush first so an aligned
            // full first window wins the tie
            flush();
            cur_w = -1;
            cur_cnt = 0;
            if (wsize > best.count) best = {wf + 1, wsize};
        }
        emit(wl, r.end - std::max(wl * wsize, r.begin));
    }
    flush();
    return best;
}

std::string serialize(const DyadicSet& s) {
    std::ostringstream os;
    os << "DYSET v1\n";
    os << "depth " << s.depth() << "\n";
    os << "runs " << s.runs().size() << "\n";
    for (const Run& r : s.runs()) os << r.begin << " " << r.end << "\n";
    return os.str();
}

namespace {

std::int64_t parse_int(const std::string& tok, ParseError::Kind kind, const char* what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(kind, std::string("bad integer in ") + what + ": '" + tok + "'");
    return v;
}

}  // namespace

DyadicSet deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "DYSET v1")
        throw ParseError(ParseError::Kind::BadHeader, "expected 'DYSET v1' header");

    if (!std::getline(is, line) || line.rfind("depth ", 0) != 0)
        throw ParseError(ParseError::Kind::BadDepth, "expected 'depth <j>' line");
    const std::int64_t depth = parse_int(line.substr(6), ParseError::Kind::BadDepth, "depth");
    if (depth < 0 || depth > 62)
        throw ParseError(ParseError::Kind::BadDepth, "depth out of range");

    if (!std::getline(is, line) || line.rfind("runs ", 0) != 0)
        throw ParseError(ParseError::Kind::BadRunCount, "expected 'runs <count>' line");
    const std::int64_t count = parse_int(line.substr(5), ParseError::Kind::BadRunCount, "runs");
    if (count < 0)
        throw ParseError(ParseError::Kind::BadRunCount, "negative run count");

    const std::int64_t lo = std::int64_t{1} << depth;
    const std::int64_t hi = (std::int64_t{2} << depth) + 1;
    std::vector<Run> runs;
    runs.reserve(static_cast<std::size_t>(count));
    std::int64_t prev_end = -1;
    for (std::int64_t i = 0; i < count; ++i) {
        if (!std::getline(is, line))
            throw ParseError(ParseError::Kind::BadRuns, "missing run line");
        std::istringstream ls(line);
        std::string ta, tb, rest;
        if (!(ls >> ta >> tb) || (ls >> rest))
            throw ParseError(ParseError::Kind::BadRuns, "expected '<begin> <end>'");
        const std::int64_t b = parse_int(ta, ParseError::Kind::BadRuns, "run begin");
        const std::int64_t e = parse_int(tb, ParseError::Kind::BadRuns, "run end");
        if (b >= e)
            throw ParseError(ParseError::Kind::BadRuns, "empty or reversed run");
        if (b < lo || e > hi)
            throw ParseError(ParseError::Kind::OutOfRange, "run outside the [1,2] grid");
        if (b <= prev_end)
            throw ParseError(ParseError::Kind::BadRuns,
                             "runs must be sorted, disjoint and non-adjacent");
        prev_end = e;
        runs.push_back({b, e});
    }
    while (std::getline(is, line)) {
        if (!line.empty())
            throw ParseError(ParseError::Kind::TrailingData, "trailing data after runs");
    }
    return DyadicSet(static_cast<int>(depth), std::move(runs));
}

void save_dyset(const DyadicSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << serialize(s);
    if (!out) throw Error("write failed: " + path);
}

DyadicSet load_dyset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace dilset
