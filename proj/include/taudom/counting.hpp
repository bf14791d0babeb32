#ifndef TAUDOM_COUNTING_HPP
#define TAUDOM_COUNTING_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>

#include "taudom/core.hpp"
#include "taudom/order_stat_tree.hpp"

namespace taudom {

/*
 * Static per-color 1-D range counting: all (color, coordinate) pairs in one
 * sorted array, a count is two binary searches.  Unknown colors count zero.
 */
class StaticColorIndex1D {
public:
    StaticColorIndex1D() = default;

    explicit StaticColorIndex1D(std::vector<std::pair<ColorId, Coord>> pairs)
        : pairs_(std::move(pairs)) {
        std::sort(pairs_.begin(), pairs_.end());
    }

    static StaticColorIndex1D from_points(std::span<const ColoredPoint> pts) {
        std::vector<std::pair<ColorId, Coord>> v;
        v.reserve(pts.size());
        for (const auto& p : pts) {
            if (p.dim() != 1)
                throw std::invalid_argument("StaticColorIndex1D requires 1-D points");
            v.emplace_back(p.color, p.coords[0]);
        }
        return StaticColorIndex1D(std::move(v));
    }

    // points of color c with coordinate in [a, b]
    std::uint64_t count(ColorId c, Coord a, Coord b) const {
        if (a > b) return 0;
        auto lo = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(c, a));
        auto hi = std::upper_bound(pairs_.begin(), pairs_.end(), std::make_pair(c, b));
        return static_cast<std::uint64_t>(hi - lo);
    }

    std::size_t stored() const { return pairs_.size(); }

private:
    std::vector<std::pair<ColorId, Coord>> pairs_;
};

/*
 * Static rank structure over integers in [0, U): an x-fast trie over every
 * Theta(log U)-th element plus binary search inside the final bucket.  A
 * count_le costs O(log log U) expected hash probes.
 */
class GridCounter {
public:
    GridCounter() = default;

    GridCounter(std::vector<Coord> sorted_vals, std::uint64_t universe) {
        build(std::move(sorted_vals), universe);
    }

    void build(std::vector<Coord> sorted_vals, std::uint64_t universe) {
        vals_ = std::move(sorted_vals);
        if (universe == 0) throw std::invalid_argument("grid universe must be positive");
        for (Coord v : vals_)
            if (v < 0 || static_cast<std::uint64_t>(v) >= universe)
                throw std::invalid_argument("grid coordinate outside [0, U)");
        bits_ = std::max<unsigned>(1, std::bit_width(universe - 1));
        bucket_ = std::max<std::size_t>(1, bits_);
        nreps_ = (vals_.size() + bucket_ - 1) / bucket_;
        if (nreps_ <= 1) return; // a single bucket needs no trie
        for (std::size_t r = 0; r < nreps_; ++r) {
            const std::uint64_t v = static_cast<std::uint64_t>(vals_[r * bucket_]);
            for (unsigned k = 1; k <= bits_; ++k) {
                auto [it, fresh] =
                    trie_.try_emplace(trie_key(k, v >> (bits_ - k)),
                                      RepRange{static_cast<std::uint32_t>(r),
                                               static_cast<std::uint32_t>(r)});
                if (!fresh) {
                    it->second.lo = std::min<std::uint32_t>(it->second.lo, static_cast<std::uint32_t>(r));
                    it->second.hi = std::max<std::uint32_t>(it->second.hi, static_cast<std::uint32_t>(r));
                }
            }
        }
    }

    // number of stored values <= x (x may be anything)
    std::uint64_t count_le(Coord x) const {
        if (vals_.empty() || x < vals_.front()) return 0;
        if (x >= vals_.back()) return vals_.size();
        std::size_t rep = 0;
        if (nreps_ > 1) {
            const std::uint64_t ux = static_cast<std::uint64_t>(x);
            // binary search over prefix lengths for the deepest match
            unsigned lo = 0, hi = bits_;
            RepRange node{0, static_cast<std::uint32_t>(nreps_ - 1)};
            while (lo < hi) {
                const unsigned mid = (lo + hi + 1) / 2;
                auto it = trie_.find(trie_key(mid, ux >> (bits_ - mid)));
                if (it != trie_.end()) {
                    lo = mid;
                    node = it->second;
                } else {
                    hi = mid - 1;
                }
            }
            if (lo == bits_) {
                rep = node.hi; // x equals a representative value
            } else if ((ux >> (bits_ - lo - 1)) & 1) {
                rep = node.hi; // everything under the match is below x
            } else {
                if (node.lo == 0) return 0;
                rep = node.lo - 1;
            }
        }
        const auto begin = vals_.begin() + static_cast<std::ptrdiff_t>(rep * bucket_);
        const auto end = vals_.begin() +
                         static_cast<std::ptrdiff_t>(std::min(vals_.size(), (rep + 1) * bucket_));
        return rep * bucket_ + static_cast<std::uint64_t>(std::upper_bound(begin, end, x) - begin);
    }

    std::uint64_t count(Coord a, Coord b) const {
        if (a > b) return 0;
        const std::uint64_t hi = count_le(b);
        const std::uint64_t lo = (a == std::numeric_limits<Coord>::min()) ? 0 : count_le(a - 1);
        return hi - lo;
    }

    std::size_t stored() const { return vals_.size(); }

private:
    struct RepRange {
        std::uint32_t lo;
        std::uint32_t hi;
    };

    // one map for all trie levels, keyed by (prefix length, prefix bits)
    using TrieKey = unsigned __int128;
    struct TrieKeyHash {
        std::size_t operator()(TrieKey k) const {
            std::uint64_t x = static_cast<std::uint64_t>(k) ^
                              (static_cast<std::uint64_t>(k >> 64) * 0x9e3779b97f4a7c15ULL);
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return static_cast<std::size_t>(x ^ (x >> 31));
        }
    };

    static TrieKey trie_key(unsigned level, std::uint64_t prefix) {
        return (static_cast<TrieKey>(level) << 64) | prefix;
    }

    std::vector<Coord> vals_;
    std::unordered_map<TrieKey, RepRange, TrieKeyHash> trie_;
    std::size_t bucket_ = 1;
    std::size_t nreps_ = 0;
    unsigned bits_ = 1;
};

/*
 * Per-color grid counting over a fixed universe [0, U).  Same contract as
 * StaticColorIndex1D; U must be known at build time and every coordinate must
 * fit below it.
 */
class GridColorIndex1D {
public:
    GridColorIndex1D() = default;

    GridColorIndex1D(std::span<const std::pair<ColorId, Coord>> pairs, std::uint64_t universe)
        : universe_(universe) {
        std::unordered_map<ColorId, std::vector<Coord>> per_color;
        for (const auto& [c, x] : pairs) per_color[c].push_back(x);
        for (auto& [c, xs] : per_color) {
            std::sort(xs.begin(), xs.end());
            counters_.emplace(c, GridCounter(std::move(xs), universe));
        }
    }

    static GridColorIndex1D from_points(std::span<const ColoredPoint> pts, std::uint64_t universe) {
        std::vector<std::pair<ColorId, Coord>> v;
        v.reserve(pts.size());
        for (const auto& p : pts) {
            if (p.dim() != 1)
                throw std::invalid_argument("GridColorIndex1D requires 1-D points");
            v.emplace_back(p.color, p.coords[0]);
        }
        return GridColorIndex1D(v, universe);
    }

    std::uint64_t count(ColorId c, Coord a, Coord b) const {
        auto it = counters_.find(c);
        if (it == counters_.end()) return 0;
        return it->second.count(a, b);
    }

    std::uint64_t universe() const { return universe_; }

    std::size_t stored() const {
        std::size_t n = 0;
        for (const auto& [c, g] : counters_) n += g.stored();
        return n;
    }

private:
    std::uint64_t universe_ = 0;
    std::unordered_map<ColorId, GridCounter> counters_;
};

/*
 * Dynamic per-color 1-D counting: one order-statistics tree per color.
 * Deleting a coordinate that is not present is an error.
 */
class DynColorIndex1D {
public:
    void insert(ColorId c, Coord x) { trees_[c].insert(x); }

    void erase(ColorId c, Coord x) {
        auto it = trees_.find(c);
        if (it == trees_.end() || !it->second.erase_one(x))
            throw std::invalid_argument("dyn_delete: no such (color, coordinate)");
        if (it->second.empty()) trees_.erase(it);
    }

    std::uint64_t count(ColorId c, Coord a, Coord b) const {
        auto it = trees_.find(c);
        if (it == trees_.end()) return 0;
        return it->second.count_range(a, b);
    }

    std::size_t stored() const {
        std::size_t n = 0;
        for (const auto& [c, t] : trees_) n += t.size();
        return n;
    }

private:
    std::unordered_map<ColorId, OrderStatTree<Coord>> trees_;
};

/*
 * Static d-dimensional counter over one point set: a balanced tree on the
 * last axis whose nodes own a (d-1)-dimensional counter, sorted array at the
 * base.  Query decomposes the last axis into canonical nodes and recurses,
 * O(log^d n) overall.  Small fringe nodes are scanned directly.
 */
class StaticCounterD {
public:
    StaticCounterD() = default;

    StaticCounterD(std::vector<std::vector<Coord>> rows, std::size_t dim) { build(std::move(rows), dim); }

    void build(const std::vector<std::vector<Coord>>& rows, std::size_t dim) {
        if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
        for (const auto& r : rows)
            if (r.size() != dim) throw std::invalid_argument("row dimension mismatch");
        std::vector<Coord> flat;
        flat.reserve(rows.size() * dim);
        for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
        init(std::move(flat), dim);
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }

    std::uint64_t count(const Rect& q) const {
        if (q.dim() != dim_) throw std::invalid_argument("count: dimension mismatch");
        if (n_ == 0) return 0;
        const std::size_t lo = first_row_geq(q.lo(dim_ - 1));
        const std::size_t hi = first_row_gt(q.hi(dim_ - 1));
        if (lo >= hi) return 0;
        if (!root_) return scan(lo, hi, q);
        return count_node(*root_, lo, hi, q);
    }

    std::size_t stored_elements() const {
        std::size_t n = data_.size();
        if (root_) n += stored_node(*root_);
        return n;
    }

private:
    static constexpr std::size_t kLeafCutoff = 16;

    struct Node {
        std::size_t lo, hi;
        std::unique_ptr<StaticCounterD> sub; // dim-1 counter over rows [lo, hi)
        std::unique_ptr<Node> left, right;
        bool leaf() const { return !left; }
    };

    std::size_t dim_ = 0;
    std::size_t n_ = 0;
    std::vector<Coord> data_; // row-major, sorted by last axis
    std::unique_ptr<Node> root_;

    Coord at(std::size_t row, std::size_t axis) const { return data_[row * dim_ + axis]; }

    void init(std::vector<Coord> flat, std::size_t dim) {
        dim_ = dim;
        data_ = sort_rows_by_last_axis(std::move(flat), dim);
        n_ = data_.size() / dim_;
        if (dim_ > 1 && n_ > kLeafCutoff) root_ = build_node(0, n_);
    }

    static std::vector<Coord> sort_rows_by_last_axis(std::vector<Coord> flat, std::size_t dim) {
        const std::size_t n = flat.size() / dim;
        if (dim == 1) {
            std::sort(flat.begin(), flat.end());
            return flat;
        }
        std::vector<std::uint32_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return flat[a * dim + dim - 1] < flat[b * dim + dim - 1];
        });
        std::vector<Coord> out(flat.size());
        for (std::size_t i = 0; i < n; ++i)
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(order[i] * dim),
                      flat.begin() + static_cast<std::ptrdiff_t>((order[i] + 1) * dim),
                      out.begin() + static_cast<std::ptrdiff_t>(i * dim));
        return out;
    }

    std::size_t first_row_geq(Coord x) const {
        std::size_t lo = 0, hi = n_;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (at(mid, dim_ - 1) < x)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::size_t first_row_gt(Coord x) const {
        std::size_t lo = 0, hi = n_;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (at(mid, dim_ - 1) <= x)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::unique_ptr<Node> build_node(std::size_t lo, std::size_t hi) {
        auto node = std::make_unique<Node>();
        node->lo = lo;
        node->hi = hi;
        std::vector<Coord> proj;
        proj.reserve((hi - lo) * (dim_ - 1));
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t a = 0; a + 1 < dim_; ++a) proj.push_back(at(i, a));
        node->sub = std::make_unique<StaticCounterD>();
        node->sub->init(std::move(proj), dim_ - 1);
        if (hi - lo > kLeafCutoff) {
            const std::size_t mid = lo + (hi - lo) / 2;
            node->left = build_node(lo, mid);
            node->right = build_node(mid, hi);
        }
        return node;
    }

    std::uint64_t scan(std::size_t lo, std::size_t hi, const Rect& q) const {
        std::uint64_t n = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            bool in = true;
            for (std::size_t a = 0; a + 1 < dim_; ++a)
                if (at(i, a) < q.lo(a) || at(i, a) > q.hi(a)) {
                    in = false;
                    break;
                }
            n += in;
        }
        return n;
    }

    std::uint64_t count_node(const Node& node, std::size_t lo, std::size_t hi, const Rect& q) const {
        if (lo <= node.lo && node.hi <= hi)
            return node.sub->count(q.prefix(dim_ - 1));
        if (node.leaf())
            return scan(std::max(lo, node.lo), std::min(hi, node.hi), q);
        std::uint64_t n = 0;
        if (lo < node.left->hi && node.left->lo < hi) n += count_node(*node.left, lo, hi, q);
        if (lo < node.right->hi && node.right->lo < hi) n += count_node(*node.right, lo, hi, q);
        return n;
    }

    static std::size_t stored_node(const Node& node) {
        std::size_t n = node.sub ? node.sub->stored_elements() : 0;
        if (node.left) n += stored_node(*node.left) + stored_node(*node.right);
        return n;
    }
};

/*
 * Per-color d-dimensional counting front end over StaticCounterD.
 */
class StaticColorIndexD {
public:
    StaticColorIndexD() = default;

    StaticColorIndexD(std::span<const ColoredPoint> pts, std::size_t dim) : dim_(dim) {
        std::unordered_map<ColorId, std::vector<std::vector<Coord>>> per_color;
        for (const auto& p : pts) {
            if (p.dim() != dim) throw std::invalid_argument("point dimension mismatch");
            per_color[p.color].push_back(p.coords);
        }
        for (auto& [c, rows] : per_color)
            counters_.emplace(c, StaticCounterD(std::move(rows), dim));
    }

    std::uint64_t count(ColorId c, const Rect& q) const {
        if (q.dim() != dim_) throw std::invalid_argument("countd: dimension mismatch");
        auto it = counters_.find(c);
        if (it == counters_.end()) return 0;
        return it->second.count(q);
    }

    std::size_t dim() const { return dim_; }

    std::size_t stored_elements() const {
        std::size_t n = 0;
        for (const auto& [c, t] : counters_) n += t.stored_elements();
        return n;
    }

private:
    std::size_t dim_ = 1;
    std::unordered_map<ColorId, StaticCounterD> counters_;
};

/*
 * Rank-space reduction.  Per axis the map holds the sorted distinct
 * coordinates; equal coordinates share a rank so that any rectangle in
 * original space and its rank image contain exactly the same points.
 * Ranks are 1-based.
 */
class RankMap {
public:
    RankMap() = default;

    // builds the map and rewrites the points into rank space
    static std::pair<RankMap, std::vector<ColoredPoint>> reduce(std::span<const ColoredPoint> pts) {
        RankMap map;
        if (pts.empty()) return {map, {}};
        const std::size_t d = pts.front().dim();
        map.axis_vals_.resize(d);
        for (std::size_t a = 0; a < d; ++a) {
            auto& vals = map.axis_vals_[a];
            vals.reserve(pts.size());
            for (const auto& p : pts) {
                if (p.dim() != d) throw std::invalid_argument("mixed dimensions");
                vals.push_back(p.coords[a]);
            }
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        }
        std::vector<ColoredPoint> reduced;
        reduced.reserve(pts.size());
        for (const auto& p : pts) {
            std::vector<Coord> rc(d);
            for (std::size_t a = 0; a < d; ++a) rc[a] = map.rank_of(a, p.coords[a]);
            reduced.emplace_back(std::move(rc), p.color);
        }
        return {std::move(map), std::move(reduced)};
    }

    std::size_t dim() const { return axis_vals_.size(); }

    // 1-based rank of a stored coordinate
    Coord rank_of(std::size_t axis, Coord v) const {
        const auto& vals = axis_vals_[axis];
        auto it = std::lower_bound(vals.begin(), vals.end(), v);
        return static_cast<Coord>(it - vals.begin()) + 1;
    }

    // maps a query to rank space; nullopt when some axis interval is empty
    std::optional<Rect> to_rank_space(const Rect& q) const {
        if (q.dim() != dim()) throw std::invalid_argument("rank_query: dimension mismatch");
        std::vector<Coord> lo(dim()), hi(dim());
        for (std::size_t a = 0; a < dim(); ++a) {
            const auto& vals = axis_vals_[a];
            auto l = std::lower_bound(vals.begin(), vals.end(), q.lo(a)); // successor
            auto h = std::upper_bound(vals.begin(), vals.end(), q.hi(a)); // past predecessor
            if (l == vals.end() || h == vals.begin()) return std::nullopt;
            lo[a] = static_cast<Coord>(l - vals.begin()) + 1;
            hi[a] = static_cast<Coord>(h - vals.begin());
            if (lo[a] > hi[a]) return std::nullopt;
        }
        return Rect(std::move(lo), std::move(hi));
    }

    std::size_t distinct(std::size_t axis) const { return axis_vals_[axis].size(); }

private:
    std::vector<std::vector<Coord>> axis_vals_;
};

} // namespace taudom

#endif
