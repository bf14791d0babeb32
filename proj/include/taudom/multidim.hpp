#ifndef TAUDOM_MULTIDIM_HPP
#define TAUDOM_MULTIDIM_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>

#include "taudom/core.hpp"
#include "taudom/counting.hpp"
#include "taudom/dynamic1d.hpp"
#include "taudom/static1d.hpp"

namespace taudom {

struct MdQueryStats {
    std::uint64_t canonical_nodes = 0;
    std::uint64_t candidates = 0;          // size of the candidate union
    std::uint64_t verification_probes = 0; // one d-dim counting query per candidate
    std::vector<ColorId> candidate_union;  // for soundness checks
};

/*
 * Static d-dimensional domination structure.  Coordinates are rank-reduced
 * once at build time; a balanced tree over the top axis holds a (d-1)-dim
 * structure per node, the 1-D base case is an exponential interval tree over
 * the grid [1, n].  A query decomposes the top axis into O(log n) canonical
 * nodes, unions their dominator sets, and verifies every candidate with one
 * d-dimensional counting query against the whole rectangle.
 */
class StaticRangeTree {
public:
    StaticRangeTree(std::span<const ColoredPoint> pts, const Tau& tau, std::size_t dim,
                    ExpVariant base_variant = ExpVariant::grid_index)
        : dim_(dim), tau_(tau) {
        if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
        for (const auto& p : pts)
            if (p.dim() != dim) throw std::invalid_argument("point dimension mismatch");
        auto [map, reduced] = RankMap::reduce(pts);
        rank_map_ = std::move(map);
        level_ = std::make_unique<Level>(std::move(reduced), tau, dim, base_variant);
    }

    StaticRangeTree(const std::vector<ColoredPoint>& pts, const Tau& tau, std::size_t dim,
                    ExpVariant base_variant = ExpVariant::grid_index)
        : StaticRangeTree(std::span<const ColoredPoint>(pts), tau, dim, base_variant) {}

    std::size_t size() const { return level_->size(); }
    std::size_t dim() const { return dim_; }
    const Tau& tau() const { return tau_; }

    ColorSet query(const Rect& q) const {
        MdQueryStats st;
        return query(q, st);
    }

    ColorSet query(const Rect& q, MdQueryStats& st) const {
        st = {};
        if (q.dim() != dim_) throw std::invalid_argument("query dimension mismatch");
        if (level_->size() == 0) return {};
        auto rq = rank_map_.to_rank_space(q);
        if (!rq) return {};
        return level_->query(*rq, &st);
    }

private:
    /*
     * One recursion level: an exact domination structure over k-dim points.
     * Owns its own counting indexes so candidate verification stays within
     * the level's point subset.
     */
    class Level {
    public:
        static constexpr std::size_t kTopCutoff = 16;

        Level(std::vector<ColoredPoint> pts, const Tau& tau, std::size_t k, ExpVariant base_variant)
            : k_(k), tau_(tau) {
            if (k == 1) {
                base_ = std::make_unique<ExpTree>(pts, tau, base_variant);
                n_ = pts.size();
                return;
            }
            rows_ = std::move(pts);
            const std::size_t axis = k - 1;
            std::stable_sort(rows_.begin(), rows_.end(),
                             [axis](const auto& a, const auto& b) {
                                 return a.coords[axis] < b.coords[axis];
                             });
            n_ = rows_.size();
            per_color_ = StaticColorIndexD(rows_, k);
            std::vector<std::vector<Coord>> all;
            all.reserve(n_);
            for (const auto& r : rows_) all.push_back(r.coords);
            totals_ = StaticCounterD(std::move(all), k);
            if (n_ > 0) root_ = build(0, n_, base_variant);
        }

        std::size_t size() const { return n_; }

        ColorSet query(const Rect& q, MdQueryStats* st) const {
            if (k_ == 1) {
                ExpQueryStats es;
                ColorSet res = base_->query(q.lo(0), q.hi(0), es);
                if (st) {
                    st->canonical_nodes += 1;
                    st->candidates += es.counting_probes;
                    st->verification_probes += es.counting_probes;
                }
                return res;
            }
            if (n_ == 0) return {};
            const std::size_t axis = k_ - 1;
            const std::size_t qlo = first_row_geq(q.lo(axis));
            const std::size_t qhi = first_row_gt(q.hi(axis));
            if (qlo >= qhi) return {};
            ColorSet cand;
            collect_candidates(*root_, qlo, qhi, q, cand, st);
            const std::uint64_t total = totals_.count(q);
            std::vector<ColorId> out;
            for (ColorId c : cand) {
                if (st) ++st->verification_probes;
                if (tau_.dominates(per_color_.count(c, q), total)) out.push_back(c);
            }
            if (st) {
                st->candidates += cand.size();
                st->candidate_union.insert(st->candidate_union.end(), cand.begin(), cand.end());
            }
            return ColorSet::from_unsorted(std::move(out));
        }

    private:
        struct Node {
            std::size_t lo, hi;
            std::unique_ptr<Node> left, right;
            std::unique_ptr<Level> sub;
            bool leaf() const { return !left; }
        };

        std::size_t k_;
        Tau tau_;
        std::size_t n_ = 0;
        std::unique_ptr<ExpTree> base_;     // k == 1
        std::vector<ColoredPoint> rows_;    // k >= 2, sorted by last axis
        StaticColorIndexD per_color_;
        StaticCounterD totals_;
        std::unique_ptr<Node> root_;

        std::size_t first_row_geq(Coord x) const {
            std::size_t lo = 0, hi = rows_.size();
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (rows_[mid].coords[k_ - 1] < x)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            return lo;
        }

        std::size_t first_row_gt(Coord x) const {
            std::size_t lo = 0, hi = rows_.size();
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (rows_[mid].coords[k_ - 1] <= x)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            return lo;
        }

        std::unique_ptr<Node> build(std::size_t lo, std::size_t hi, ExpVariant base_variant) {
            auto node = std::make_unique<Node>();
            node->lo = lo;
            node->hi = hi;
            if (hi - lo > kTopCutoff) {
                const std::size_t mid = lo + (hi - lo) / 2;
                node->left = build(lo, mid, base_variant);
                node->right = build(mid, hi, base_variant);
            }
            std::vector<ColoredPoint> proj;
            proj.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i)
                proj.emplace_back(std::vector<Coord>(rows_[i].coords.begin(),
                                                     rows_[i].coords.begin() +
                                                         static_cast<std::ptrdiff_t>(k_ - 1)),
                                  rows_[i].color);
            node->sub = std::make_unique<Level>(std::move(proj), tau_, k_ - 1, base_variant);
            return node;
        }

        // canonical decomposition of the row interval; fringe leaves are scanned
        void collect_candidates(const Node& node, std::size_t qlo, std::size_t qhi, const Rect& q,
                                ColorSet& cand, MdQueryStats* st) const {
            if (qlo <= node.lo && node.hi <= qhi) {
                if (st) ++st->canonical_nodes;
                ColorSet sub = node.sub->query(q.prefix(k_ - 1), nullptr);
                for (ColorId c : sub) cand.insert(c);
                return;
            }
            if (node.leaf()) {
                if (st) ++st->canonical_nodes;
                scan_piece(std::max(qlo, node.lo), std::min(qhi, node.hi), q, cand);
                return;
            }
            if (qlo < node.left->hi && node.left->lo < qhi)
                collect_candidates(*node.left, qlo, qhi, q, cand, st);
            if (qlo < node.right->hi && node.right->lo < qhi)
                collect_candidates(*node.right, qlo, qhi, q, cand, st);
        }

        // dominators of a small fringe piece, found by direct tally
        void scan_piece(std::size_t lo, std::size_t hi, const Rect& q, ColorSet& cand) const {
            std::vector<std::pair<ColorId, std::uint32_t>> tally;
            std::uint64_t total = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                bool in = true;
                for (std::size_t a = 0; a + 1 < k_; ++a)
                    if (rows_[i].coords[a] < q.lo(a) || rows_[i].coords[a] > q.hi(a)) {
                        in = false;
                        break;
                    }
                if (!in) continue;
                ++total;
                bool found = false;
                for (auto& [c, cnt] : tally)
                    if (c == rows_[i].color) {
                        ++cnt;
                        found = true;
                        break;
                    }
                if (!found) tally.emplace_back(rows_[i].color, 1);
            }
            for (const auto& [c, cnt] : tally)
                if (tau_.dominates(cnt, total)) cand.insert(c);
        }
    };

    std::size_t dim_;
    Tau tau_;
    RankMap rank_map_;
    std::unique_ptr<Level> level_;
};

/*
 * Dynamic d-dimensional domination structure: a weight-balanced tree over the
 * top axis with a dynamic (d-1)-dim structure per node, DynTree1D at the
 * base.  Imbalance triggers a flat rebuild of the subtree including all
 * nested structures.  Verification counting walks the same decomposition, so
 * no separate d-dimensional counting tree is maintained.
 */
class DynRangeTree {
public:
    DynRangeTree(const Tau& tau, std::size_t dim) : dim_(dim), tau_(tau) {
        if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
        level_ = std::make_unique<DynLevel>(tau, dim);
    }

    DynRangeTree(std::span<const ColoredPoint> pts, const Tau& tau, std::size_t dim)
        : DynRangeTree(tau, dim) {
        for (const auto& p : pts) insert(p);
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }

    void insert(const ColoredPoint& p) {
        if (p.dim() != dim_) throw std::invalid_argument("point dimension mismatch");
        Row row{p.coords, p.color, seq_++};
        membership_[{p.coords, p.color}].push_back(row.seq);
        level_->insert(row);
        ++n_;
    }

    // removes the first live point (smallest insertion sequence) matching
    // coordinates and color
    void erase(const ColoredPoint& p) {
        if (p.dim() != dim_) throw std::invalid_argument("point dimension mismatch");
        auto it = membership_.find({p.coords, p.color});
        if (it == membership_.end())
            throw std::invalid_argument("dyn_delete_md: no such point");
        const std::uint64_t seq = it->second.front();
        it->second.erase(it->second.begin());
        if (it->second.empty()) membership_.erase(it);
        level_->erase(Row{p.coords, p.color, seq});
        --n_;
    }

    ColorSet query(const Rect& q) const {
        MdQueryStats st;
        return query(q, st);
    }

    ColorSet query(const Rect& q, MdQueryStats& st) const {
        st = {};
        if (q.dim() != dim_) throw std::invalid_argument("query dimension mismatch");
        return level_->query(q, &st);
    }

private:
    struct Row {
        std::vector<Coord> coords;
        ColorId color;
        std::uint64_t seq;
    };

    class DynLevel {
    public:
        static constexpr std::size_t kLeafCap = 8;

        DynLevel(const Tau& tau, std::size_t k) : k_(k), tau_(tau) {
            if (k == 1) base_ = std::make_unique<DynTree1D>(tau, DynVariant::plain);
        }

        DynLevel(const Tau& tau, std::size_t k, std::vector<Row> rows) : DynLevel(tau, k) {
            if (k_ == 1) {
                std::vector<ColoredPoint> pts;
                pts.reserve(rows.size());
                for (const auto& r : rows) pts.emplace_back(r.coords[0], r.color);
                base_ = std::make_unique<DynTree1D>(pts, tau, DynVariant::plain);
                return;
            }
            std::sort(rows.begin(), rows.end(), RowKeyLess{k_ - 1});
            if (!rows.empty()) root_ = build(rows, 0, rows.size());
        }

        void insert(const Row& row) {
            if (k_ == 1) {
                base_->insert(row.coords[0], row.color);
                return;
            }
            root_ = insert_rec(std::move(root_), row);
        }

        void erase(const Row& row) {
            if (k_ == 1) {
                base_->erase(row.coords[0], row.color);
                return;
            }
            root_ = erase_rec(std::move(root_), row);
        }

        ColorSet query(const Rect& q, MdQueryStats* st) const {
            if (k_ == 1) {
                DynQueryStats ds;
                ColorSet res = base_->query(q.lo(0), q.hi(0), ds);
                if (st) {
                    st->canonical_nodes += 1;
                    st->candidates += ds.counting_probes;
                    st->verification_probes += ds.counting_probes;
                }
                return res;
            }
            if (!root_) return {};
            ColorSet cand;
            collect_candidates(*root_, q, cand, st);
            const std::uint64_t total = count_points(q);
            std::vector<ColorId> out;
            for (ColorId c : cand) {
                if (st) ++st->verification_probes;
                if (tau_.dominates(count_color(c, q), total)) out.push_back(c);
            }
            if (st) {
                st->candidates += cand.size();
                st->candidate_union.insert(st->candidate_union.end(), cand.begin(), cand.end());
            }
            return ColorSet::from_unsorted(std::move(out));
        }

        std::uint64_t count_color(ColorId c, const Rect& q) const {
            if (k_ == 1) return base_->count_color(c, q.lo(0), q.hi(0));
            if (!root_) return 0;
            return count_color_rec(*root_, c, q);
        }

        std::uint64_t count_points(const Rect& q) const {
            if (k_ == 1) return base_->count_points(q.lo(0), q.hi(0));
            if (!root_) return 0;
            return count_points_rec(*root_, q);
        }

        std::size_t size() const {
            if (k_ == 1) return base_->size();
            return root_ ? root_->count : 0;
        }

    private:
        struct Key {
            Coord x;
            std::uint64_t seq;
            auto operator<=>(const Key&) const = default;
        };

        struct RowKeyLess {
            std::size_t axis;
            bool operator()(const Row& a, const Row& b) const {
                if (a.coords[axis] != b.coords[axis]) return a.coords[axis] < b.coords[axis];
                return a.seq < b.seq;
            }
        };

        struct Node {
            std::unique_ptr<Node> left, right;
            std::uint32_t count = 0;
            Key minkey{}, maxkey{};
            std::vector<Row> rows;         // leaf payload, kept in key order
            std::unique_ptr<DynLevel> sub; // internal: (k-1)-dim structure
            bool leaf() const { return !left; }
        };

        std::size_t k_;
        Tau tau_;
        std::unique_ptr<DynTree1D> base_;
        std::unique_ptr<Node> root_;

        Key row_key(const Row& r) const { return Key{r.coords[k_ - 1], r.seq}; }

        Row project(const Row& r) const {
            return Row{std::vector<Coord>(r.coords.begin(),
                                          r.coords.begin() + static_cast<std::ptrdiff_t>(k_ - 1)),
                       r.color, r.seq};
        }

        static void pull(Node& v) {
            v.count = v.left->count + v.right->count;
            v.minkey = v.left->minkey;
            v.maxkey = v.right->maxkey;
        }

        std::unique_ptr<Node> make_leaf(std::vector<Row> rows) const {
            auto n = std::make_unique<Node>();
            n->rows = std::move(rows);
            n->count = static_cast<std::uint32_t>(n->rows.size());
            n->minkey = row_key(n->rows.front());
            n->maxkey = row_key(n->rows.back());
            return n;
        }

        std::unique_ptr<Node> build(std::vector<Row>& rows, std::size_t lo, std::size_t hi) {
            if (hi - lo <= kLeafCap)
                return make_leaf(std::vector<Row>(rows.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  rows.begin() + static_cast<std::ptrdiff_t>(hi)));
            auto node = std::make_unique<Node>();
            const std::size_t mid = lo + (hi - lo) / 2;
            node->left = build(rows, lo, mid);
            node->right = build(rows, mid, hi);
            pull(*node);
            std::vector<Row> proj;
            proj.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) proj.push_back(project(rows[i]));
            node->sub = std::make_unique<DynLevel>(tau_, k_ - 1, std::move(proj));
            return node;
        }

        std::unique_ptr<Node> rebuild(std::unique_ptr<Node> v) {
            std::vector<Row> rows;
            rows.reserve(v->count);
            flatten(*v, rows);
            return build(rows, 0, rows.size());
        }

        static void flatten(const Node& v, std::vector<Row>& out) {
            if (v.leaf()) {
                out.insert(out.end(), v.rows.begin(), v.rows.end());
                return;
            }
            flatten(*v.left, out);
            flatten(*v.right, out);
        }

        static bool unbalanced(const Node& v) {
            const std::uint32_t m = std::max(v.left->count, v.right->count);
            return v.count > 2 * kLeafCap && 4 * m > 3 * v.count;
        }

        std::unique_ptr<Node> insert_rec(std::unique_ptr<Node> v, const Row& row) {
            if (!v) return make_leaf({row});
            const Key key = row_key(row);
            if (v->leaf()) {
                auto pos = std::lower_bound(v->rows.begin(), v->rows.end(), key,
                                            [this](const Row& r, const Key& k) {
                                                return row_key(r) < k;
                                            });
                v->rows.insert(pos, row);
                v->count = static_cast<std::uint32_t>(v->rows.size());
                v->minkey = row_key(v->rows.front());
                v->maxkey = row_key(v->rows.back());
                if (v->rows.size() > kLeafCap) {
                    std::vector<Row> rows = std::move(v->rows);
                    return build(rows, 0, rows.size());
                }
                return v;
            }
            v->sub->insert(project(row));
            if (key < v->right->minkey)
                v->left = insert_rec(std::move(v->left), row);
            else
                v->right = insert_rec(std::move(v->right), row);
            pull(*v);
            if (unbalanced(*v)) return rebuild(std::move(v));
            return v;
        }

        std::unique_ptr<Node> erase_rec(std::unique_ptr<Node> v, const Row& row) {
            const Key key = row_key(row);
            if (v->leaf()) {
                for (auto it = v->rows.begin(); it != v->rows.end(); ++it)
                    if (it->seq == row.seq) {
                        v->rows.erase(it);
                        break;
                    }
                if (v->rows.empty()) return nullptr;
                v->count = static_cast<std::uint32_t>(v->rows.size());
                v->minkey = row_key(v->rows.front());
                v->maxkey = row_key(v->rows.back());
                return v;
            }
            v->sub->erase(project(row));
            if (key < v->right->minkey) {
                v->left = erase_rec(std::move(v->left), row);
                if (!v->left) return std::move(v->right);
            } else {
                v->right = erase_rec(std::move(v->right), row);
                if (!v->right) return std::move(v->left);
            }
            pull(*v);
            if (unbalanced(*v)) return rebuild(std::move(v));
            return v;
        }

        void collect_candidates(const Node& v, const Rect& q, ColorSet& cand,
                                MdQueryStats* st) const {
            const Key ka{q.lo(k_ - 1), 0};
            const Key kb{q.hi(k_ - 1), std::numeric_limits<std::uint64_t>::max()};
            if (kb < v.minkey || v.maxkey < ka) return;
            if (!(v.minkey < ka) && !(kb < v.maxkey)) {
                if (st) ++st->canonical_nodes;
                if (v.leaf()) {
                    scan_piece(v, q, cand);
                } else {
                    ColorSet sub = v.sub->query(q.prefix(k_ - 1), nullptr);
                    for (ColorId c : sub) cand.insert(c);
                }
                return;
            }
            if (v.leaf()) {
                if (st) ++st->canonical_nodes;
                scan_piece(v, q, cand);
                return;
            }
            collect_candidates(*v.left, q, cand, st);
            collect_candidates(*v.right, q, cand, st);
        }

        void scan_piece(const Node& v, const Rect& q, ColorSet& cand) const {
            std::vector<std::pair<ColorId, std::uint32_t>> tally;
            std::uint64_t total = 0;
            for (const auto& r : v.rows) {
                bool in = true;
                for (std::size_t a = 0; a < k_; ++a)
                    if (r.coords[a] < q.lo(a) || r.coords[a] > q.hi(a)) {
                        in = false;
                        break;
                    }
                if (!in) continue;
                ++total;
                bool found = false;
                for (auto& [c, cnt] : tally)
                    if (c == r.color) {
                        ++cnt;
                        found = true;
                        break;
                    }
                if (!found) tally.emplace_back(r.color, 1);
            }
            for (const auto& [c, cnt] : tally)
                if (tau_.dominates(cnt, total)) cand.insert(c);
        }

        std::uint64_t count_color_rec(const Node& v, ColorId c, const Rect& q) const {
            const Key ka{q.lo(k_ - 1), 0};
            const Key kb{q.hi(k_ - 1), std::numeric_limits<std::uint64_t>::max()};
            if (kb < v.minkey || v.maxkey < ka) return 0;
            if (!(v.minkey < ka) && !(kb < v.maxkey) && !v.leaf())
                return v.sub->count_color(c, q.prefix(k_ - 1));
            if (v.leaf()) {
                std::uint64_t n = 0;
                for (const auto& r : v.rows) {
                    if (r.color != c) continue;
                    bool in = true;
                    for (std::size_t a = 0; a < k_; ++a)
                        if (r.coords[a] < q.lo(a) || r.coords[a] > q.hi(a)) {
                            in = false;
                            break;
                        }
                    n += in;
                }
                return n;
            }
            return count_color_rec(*v.left, c, q) + count_color_rec(*v.right, c, q);
        }

        std::uint64_t count_points_rec(const Node& v, const Rect& q) const {
            const Key ka{q.lo(k_ - 1), 0};
            const Key kb{q.hi(k_ - 1), std::numeric_limits<std::uint64_t>::max()};
            if (kb < v.minkey || v.maxkey < ka) return 0;
            if (!(v.minkey < ka) && !(kb < v.maxkey) && !v.leaf())
                return v.sub->count_points(q.prefix(k_ - 1));
            if (v.leaf()) {
                std::uint64_t n = 0;
                for (const auto& r : v.rows) {
                    bool in = true;
                    for (std::size_t a = 0; a < k_; ++a)
                        if (r.coords[a] < q.lo(a) || r.coords[a] > q.hi(a)) {
                            in = false;
                            break;
                        }
                    n += in;
                }
                return n;
            }
            return count_points_rec(*v.left, q) + count_points_rec(*v.right, q);
        }
    };

    std::size_t dim_;
    Tau tau_;
    std::size_t n_ = 0;
    std::uint64_t seq_ = 0;
    std::unique_ptr<DynLevel> level_;
    std::map<std::pair<std::vector<Coord>, ColorId>, std::vector<std::uint64_t>> membership_;
};

} // namespace taudom

#endif
