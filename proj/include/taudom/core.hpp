#ifndef TAUDOM_CORE_HPP
#define TAUDOM_CORE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace taudom {

using Coord = std::int64_t;
using ColorId = std::uint32_t;

/*
 * Exact rational threshold in (0,1], kept in lowest terms.  All dominance
 * tests are integer comparisons; there is no floating point anywhere in the
 * query path, so threshold ties are deterministic.
 */
class Tau {
public:
    Tau(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
        if (num == 0 || den == 0 || num > den)
            throw std::invalid_argument("tau must satisfy 0 < num <= den");
        const std::uint64_t g = std::gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    std::uint64_t num() const { return num_; }
    std::uint64_t den() const { return den_; }

    // true iff count/total >= num/den with total > 0
    bool dominates(std::uint64_t count, std::uint64_t total) const {
        if (total == 0) return false;
        using u128 = unsigned __int128;
        return u128(count) * den_ >= u128(num_) * total;
    }

    // no query can ever report more than this many colors
    std::uint64_t max_dominators() const { return den_ / num_; }

    Tau halve() const {
        if (den_ > (std::uint64_t(1) << 62))
            throw std::overflow_error("tau denominator too large to halve");
        return Tau(num_, den_ * 2);
    }

    // parses "num/den"
    static Tau parse(const std::string& text) {
        const auto slash = text.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument("tau must be given as num/den");
        const std::uint64_t n = std::stoull(text.substr(0, slash));
        const std::uint64_t d = std::stoull(text.substr(slash + 1));
        return Tau(n, d);
    }

    std::string str() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    bool operator==(const Tau& o) const { return num_ == o.num_ && den_ == o.den_; }

private:
    std::uint64_t num_;
    std::uint64_t den_;
};

inline bool dominates(std::uint64_t count, std::uint64_t total, const Tau& tau) {
    return tau.dominates(count, total);
}

inline std::uint64_t max_dominators(const Tau& tau) { return tau.max_dominators(); }

inline Tau halve(const Tau& tau) { return tau.halve(); }

struct ColoredPoint {
    std::vector<Coord> coords;
    ColorId color = 0;

    ColoredPoint() = default;
    ColoredPoint(std::vector<Coord> c, ColorId col) : coords(std::move(c)), color(col) {}
    ColoredPoint(Coord x, ColorId col) : coords{x}, color(col) {}
    ColoredPoint(Coord x, Coord y, ColorId col) : coords{x, y}, color(col) {}
    ColoredPoint(Coord x, Coord y, Coord z, ColorId col) : coords{x, y, z}, color(col) {}

    std::size_t dim() const { return coords.size(); }
};

/*
 * Axis-aligned query rectangle, closed on every axis.  lo[i] > hi[i] is
 * rejected at construction; use an interval that misses all points to express
 * an empty query instead.
 */
class Rect {
public:
    Rect(std::vector<Coord> lo, std::vector<Coord> hi)
        : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.size() != hi_.size() || lo_.empty())
            throw std::invalid_argument("rect bounds must have equal nonzero dimension");
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (lo_[i] > hi_[i])
                throw std::invalid_argument("rect requires lo <= hi on every axis");
    }

    Rect(Coord a, Coord b) : Rect(std::vector<Coord>{a}, std::vector<Coord>{b}) {}

    std::size_t dim() const { return lo_.size(); }
    Coord lo(std::size_t axis) const { return lo_[axis]; }
    Coord hi(std::size_t axis) const { return hi_[axis]; }
    const std::vector<Coord>& lo() const { return lo_; }
    const std::vector<Coord>& hi() const { return hi_; }

    bool contains(const ColoredPoint& p) const {
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (p.coords[i] < lo_[i] || p.coords[i] > hi_[i]) return false;
        return true;
    }

    // rectangle over the first k axes
    Rect prefix(std::size_t k) const {
        return Rect(std::vector<Coord>(lo_.begin(), lo_.begin() + k),
                    std::vector<Coord>(hi_.begin(), hi_.begin() + k));
    }

private:
    std::vector<Coord> lo_;
    std::vector<Coord> hi_;
};

/*
 * Sorted duplicate-free set of color ids.  Query results are tiny (at most
 * floor(1/tau) entries), so a flat vector beats any node-based set.
 */
class ColorSet {
public:
    ColorSet() = default;

    static ColorSet from_unsorted(std::vector<ColorId> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        ColorSet s;
        s.colors_ = std::move(v);
        return s;
    }

    void insert(ColorId c) {
        auto it = std::lower_bound(colors_.begin(), colors_.end(), c);
        if (it == colors_.end() || *it != c) colors_.insert(it, c);
    }

    bool contains(ColorId c) const {
        return std::binary_search(colors_.begin(), colors_.end(), c);
    }

    std::size_t size() const { return colors_.size(); }
    bool empty() const { return colors_.empty(); }

    auto begin() const { return colors_.begin(); }
    auto end() const { return colors_.end(); }

    const std::vector<ColorId>& values() const { return colors_; }

    bool operator==(const ColorSet& o) const { return colors_ == o.colors_; }
    bool operator!=(const ColorSet& o) const { return colors_ != o.colors_; }

private:
    std::vector<ColorId> colors_;
};

/*
 * Brute-force reference: one pass over the points, exact per-color tallies,
 * then the dominance test.  Every structure in this library is checked
 * against this function.
 */
inline ColorSet oracle_dominators(std::span<const ColoredPoint> points, const Rect& q,
                                  const Tau& tau) {
    std::unordered_map<ColorId, std::uint64_t> tally;
    std::uint64_t total = 0;
    for (const auto& p : points) {
        if (p.dim() != q.dim())
            throw std::invalid_argument("point/query dimension mismatch");
        if (q.contains(p)) {
            ++tally[p.color];
            ++total;
        }
    }
    std::vector<ColorId> out;
    for (const auto& [c, cnt] : tally)
        if (tau.dominates(cnt, total)) out.push_back(c);
    return ColorSet::from_unsorted(std::move(out));
}

inline ColorSet oracle_dominators(const std::vector<ColoredPoint>& points, const Rect& q,
                                  const Tau& tau) {
    return oracle_dominators(std::span<const ColoredPoint>(points), q, tau);
}

} // namespace taudom

#endif
