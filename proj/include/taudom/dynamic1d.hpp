#ifndef TAUDOM_DYNAMIC1D_HPP
#define TAUDOM_DYNAMIC1D_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <unordered_map>

#include "taudom/core.hpp"
#include "taudom/order_stat_tree.hpp"

namespace taudom {

// plain: per-color order-statistics trees answer counting probes
// counted: every node keeps a full color->count map C_v instead
enum class DynVariant { plain, counted };

inline const char* to_string(DynVariant v) {
    return v == DynVariant::plain ? "plain" : "C";
}

struct DynQueryStats {
    std::uint64_t visited_nodes = 0;
    std::uint64_t counting_probes = 0;
};

struct DynAudit {
    std::size_t leaves = 0;
    std::size_t height = 0;
    std::size_t max_candidates = 0;  // largest |L'_v| seen
    std::uint64_t cmap_entries = 0;  // sum of |C_v| over all nodes
    bool size_bounds_ok = true;      // |L'_v| within capacity, watermark consistent
    bool lists_exact = true;         // deep audit: stored lists match exact tallies
};

/*
 * Dynamic 1-D domination structure: a weight-balanced tree whose leaves are
 * the points in (coordinate, insertion-sequence) order.  Every internal node
 * stores its exact dominator list L_v and a candidate list L'_v of colors
 * that (tau/2)-dominated its range at the last rebuild, plus per-color
 * counts, so updates retest membership with O(1) arithmetic per tracked
 * color and at most one counting probe for the updated color.
 *
 * L'_v is rebuilt when the leaf count falls to half of its peak since the
 * last rebuild.  Tracking the peak (rather than the count at rebuild time)
 * is what keeps L'_v complete when the subtree grows and then shrinks: a
 * color whose last admission test failed at total T can only become a
 * dominator once the total drops below T/2, and the peak trigger forces a
 * rebuild before that point.  L'_v is also rebuilt when an admission would
 * overflow its capacity of floor(2/tau) + floor(1/tau) entries.
 *
 * Rebalancing is scapegoat-style: no rotations, an out-of-balance subtree is
 * rebuilt flat with all lists recomputed.
 */
class DynTree1D {
public:
    struct PKey {
        Coord x;
        std::uint64_t seq;
        auto operator<=>(const PKey&) const = default;
    };

    explicit DynTree1D(const Tau& tau, DynVariant variant = DynVariant::plain)
        : tau_(tau), tau_half_(tau.halve()), cap_(tau_half_.max_dominators() + tau.max_dominators()),
          variant_(variant) {}

    DynTree1D(std::span<const ColoredPoint> pts, const Tau& tau,
              DynVariant variant = DynVariant::plain)
        : DynTree1D(tau, variant) {
        std::vector<std::pair<PKey, ColorId>> leaves;
        leaves.reserve(pts.size());
        for (const auto& p : pts) {
            if (p.dim() != 1) throw std::invalid_argument("DynTree1D requires 1-D points");
            leaves.push_back({PKey{p.coords[0], seq_++}, p.color});
        }
        std::sort(leaves.begin(), leaves.end());
        if (variant_ == DynVariant::plain)
            for (const auto& [k, c] : leaves) color_trees_[c].insert(k);
        if (!leaves.empty()) {
            CountMap scratch;
            root_ = build_balanced(leaves, 0, leaves.size(), scratch);
        }
    }

    ~DynTree1D() { destroy(root_); }
    DynTree1D(DynTree1D&& o) noexcept
        : tau_(o.tau_), tau_half_(o.tau_half_), cap_(o.cap_), variant_(o.variant_) {
        *this = std::move(o);
    }
    DynTree1D& operator=(DynTree1D&& o) noexcept {
        if (this != &o) {
            destroy(root_);
            root_ = o.root_;
            o.root_ = nullptr;
            tau_ = o.tau_;
            tau_half_ = o.tau_half_;
            cap_ = o.cap_;
            variant_ = o.variant_;
            seq_ = o.seq_;
            work_ = o.work_;
            color_trees_ = std::move(o.color_trees_);
        }
        return *this;
    }
    DynTree1D(const DynTree1D&) = delete;
    DynTree1D& operator=(const DynTree1D&) = delete;

    std::size_t size() const { return root_ ? root_->leaves : 0; }
    const Tau& tau() const { return tau_; }
    DynVariant variant() const { return variant_; }
    std::uint64_t rebuild_work() const { return work_; }
    std::size_t lprime_capacity() const { return cap_; }

    void insert(const ColoredPoint& p) {
        if (p.dim() != 1) throw std::invalid_argument("DynTree1D requires 1-D points");
        insert(p.coords[0], p.color);
    }

    void insert(Coord x, ColorId c) {
        const PKey key{x, seq_++};
        if (variant_ == DynVariant::plain) color_trees_[c].insert(key);
        root_ = insert_rec(root_, key, c);
    }

    // removes the first live point (in key order) with this coordinate+color
    void erase(Coord x, ColorId c) {
        PKey key;
        if (!find_key(x, c, key))
            throw std::invalid_argument("dyn_delete: no such (coordinate, color)");
        if (variant_ == DynVariant::plain) color_trees_[c].erase_one(key);
        root_ = erase_rec(root_, key, c);
    }

    ColorSet query(Coord a, Coord b) const {
        DynQueryStats st;
        return query(a, b, st);
    }

    ColorSet query(Coord a, Coord b, DynQueryStats& st) const {
        st = {};
        if (!root_ || a > b) return {};
        const PKey ka{a, 0};
        const PKey kb{b, std::numeric_limits<std::uint64_t>::max()};
        if (kb < root_->minkey || root_->maxkey < ka) return {};
        const Node* q = root_;
        for (;;) {
            if (!(q->minkey < ka) && !(kb < q->maxkey)) {
                ++st.visited_nodes;
                return dom_set(q); // range fully covered, answer is stored
            }
            if (q->leaf()) {
                ++st.visited_nodes;
                return {};
            }
            if (kb < q->right->minkey) {
                q = q->left;
                continue;
            }
            if (q->left->maxkey < ka) {
                q = q->right;
                continue;
            }
            break;
        }
        auto [sa, ta] = walk_a_side(q->left, ka, st);
        auto [sb, tb] = walk_b_side(q->right, kb, st);
        ColorSet cand = merge(sa, sb);
        return verify(cand, ka, kb, ta + tb, st);
    }

    // live points of color c with coordinate in [a, b]
    std::uint64_t count_color(ColorId c, Coord a, Coord b) const {
        if (!root_ || a > b) return 0;
        return color_in_range(c, PKey{a, 0}, PKey{b, std::numeric_limits<std::uint64_t>::max()});
    }

    // all live points with coordinate in [a, b]
    std::uint64_t count_points(Coord a, Coord b) const {
        if (!root_ || a > b) return 0;
        const PKey ka{a, 0};
        const PKey kb{b, std::numeric_limits<std::uint64_t>::max()};
        return points_below(kb, true) - points_below(ka, false);
    }

    DynAudit audit(bool deep = false) const {
        DynAudit a;
        a.leaves = size();
        if (root_) audit_rec(root_, 1, deep, a);
        return a;
    }

private:
    using CountMap = std::unordered_map<ColorId, std::uint32_t>;

    struct Entry {
        ColorId color;
        std::uint32_t count;
        bool dom;
    };

    struct Node {
        Node* left = nullptr;
        Node* right = nullptr;
        std::uint32_t leaves = 1;
        PKey minkey{}, maxkey{};
        ColorId color = 0;            // leaf payload
        std::vector<Entry> entries;   // internal: L'_v, dominator flags mark L_v
        std::uint32_t watermark = 0;  // peak leaf count since the last L'_v rebuild
        std::unique_ptr<CountMap> cmap;

        bool leaf() const { return left == nullptr; }
    };

    Tau tau_;
    Tau tau_half_;
    std::size_t cap_;
    DynVariant variant_;
    Node* root_ = nullptr;
    std::uint64_t seq_ = 0;
    std::uint64_t work_ = 0;
    std::unordered_map<ColorId, OrderStatTree<PKey>> color_trees_;

    static void destroy(Node* n) {
        if (!n) return;
        destroy(n->left);
        destroy(n->right);
        delete n;
    }

    static void pull(Node* v) {
        v->leaves = v->left->leaves + v->right->leaves;
        v->minkey = v->left->minkey;
        v->maxkey = v->right->maxkey;
    }

    Node* make_leaf(PKey key, ColorId c) const {
        Node* n = new Node;
        n->minkey = n->maxkey = key;
        n->color = c;
        return n;
    }

    // --- counting probes -------------------------------------------------

    // live points of color c with key < k (or <= k when inclusive)
    std::uint64_t color_below(ColorId c, PKey k, bool inclusive) const {
        if (variant_ == DynVariant::plain) {
            auto it = color_trees_.find(c);
            if (it == color_trees_.end()) return 0;
            return inclusive ? it->second.count_le(k) : it->second.count_lt(k);
        }
        std::uint64_t acc = 0;
        const Node* v = root_;
        while (v && !v->leaf()) {
            const bool go_right = inclusive ? !(k < v->right->minkey) : (v->right->minkey < k);
            if (go_right) {
                acc += subtree_color_count(v->left, c);
                v = v->right;
            } else {
                v = v->left;
            }
        }
        if (v && v->leaf() && v->color == c && (inclusive ? !(k < v->minkey) : (v->minkey < k)))
            ++acc;
        return acc;
    }

    std::uint64_t color_in_range(ColorId c, PKey lo, PKey hi) const {
        return color_below(c, hi, true) - color_below(c, lo, false);
    }

    // live points with key < k (or <= k), any color
    std::uint64_t points_below(PKey k, bool inclusive) const {
        std::uint64_t acc = 0;
        const Node* v = root_;
        while (v && !v->leaf()) {
            const bool go_right = inclusive ? !(k < v->right->minkey) : (v->right->minkey < k);
            if (go_right) {
                acc += v->left->leaves;
                v = v->right;
            } else {
                v = v->left;
            }
        }
        if (v && v->leaf() && (inclusive ? !(k < v->minkey) : (v->minkey < k))) ++acc;
        return acc;
    }

    static std::uint64_t subtree_color_count(const Node* v, ColorId c) {
        if (v->leaf()) return v->color == c ? 1 : 0;
        auto it = v->cmap->find(c);
        return it == v->cmap->end() ? 0 : it->second;
    }

    // count of color c in rng(v), used for admission tests
    std::uint64_t color_count_rng(const Node* v, ColorId c) const {
        if (variant_ == DynVariant::counted) return subtree_color_count(v, c);
        auto it = color_trees_.find(c);
        if (it == color_trees_.end()) return 0;
        return it->second.count_range(v->minkey, v->maxkey);
    }

    // --- list maintenance -------------------------------------------------

    Entry* find_entry(Node* v, ColorId c) const {
        for (auto& e : v->entries)
            if (e.color == c) return &e;
        return nullptr;
    }

    void refresh_dom_flags(Node* v) const {
        for (auto& e : v->entries) e.dom = tau_.dominates(e.count, v->leaves);
    }

    // exact recompute of L'_v and L_v; resets the watermark
    void rebuild_lists(Node* v) {
        v->entries.clear();
        if (variant_ == DynVariant::counted) {
            work_ += v->cmap->size();
            for (const auto& [c, cnt] : *v->cmap) admit_exact(v, c, cnt);
        } else {
            CountMap tally;
            collect_counts(v, tally);
            work_ += v->leaves;
            for (const auto& [c, cnt] : tally) admit_exact(v, c, cnt);
        }
        v->watermark = v->leaves;
    }

    void admit_exact(Node* v, ColorId c, std::uint32_t cnt) const {
        if (tau_half_.dominates(cnt, v->leaves))
            v->entries.push_back({c, cnt, tau_.dominates(cnt, v->leaves)});
    }

    static void collect_counts(const Node* v, CountMap& tally) {
        if (v->leaf()) {
            ++tally[v->color];
            return;
        }
        collect_counts(v->left, tally);
        collect_counts(v->right, tally);
    }

    void after_insert(Node* v, ColorId c) {
        const std::uint32_t total = v->leaves;
        v->watermark = std::max(v->watermark, total);
        if (Entry* e = find_entry(v, c)) {
            ++e->count;
        } else {
            const std::uint64_t cnt = color_count_rng(v, c);
            if (tau_half_.dominates(cnt, total)) {
                if (v->entries.size() >= cap_)
                    rebuild_lists(v); // overflow: recompute exactly, c is included
                else
                    v->entries.push_back({c, static_cast<std::uint32_t>(cnt), false});
            }
        }
        refresh_dom_flags(v);
    }

    void after_erase(Node* v, ColorId c) {
        if (Entry* e = find_entry(v, c)) {
            --e->count;
            if (e->count == 0)
                v->entries.erase(v->entries.begin() + (e - v->entries.data()));
        }
        if (v->leaves * 2 <= v->watermark)
            rebuild_lists(v);
        else
            refresh_dom_flags(v);
    }

    // --- updates -----------------------------------------------------------

    Node* insert_rec(Node* v, PKey key, ColorId c) {
        if (!v) return make_leaf(key, c);
        if (v->leaf()) {
            Node* other = make_leaf(key, c);
            Node* parent = new Node;
            parent->color = 0;
            if (key < v->minkey) {
                parent->left = other;
                parent->right = v;
            } else {
                parent->left = v;
                parent->right = other;
            }
            pull(parent);
            if (variant_ == DynVariant::counted) {
                parent->cmap = std::make_unique<CountMap>();
                ++(*parent->cmap)[v->color];
                ++(*parent->cmap)[other->color];
            }
            rebuild_lists(parent);
            return parent;
        }
        if (key < v->right->minkey)
            v->left = insert_rec(v->left, key, c);
        else
            v->right = insert_rec(v->right, key, c);
        pull(v);
        if (variant_ == DynVariant::counted) ++(*v->cmap)[c];
        after_insert(v, c);
        return maybe_rebuild(v);
    }

    Node* erase_rec(Node* v, PKey key, ColorId c) {
        if (v->leaf()) {
            delete v; // callers only descend to the matching leaf
            return nullptr;
        }
        if (key < v->right->minkey) {
            v->left = erase_rec(v->left, key, c);
            if (!v->left) return collapse(v, v->right);
        } else {
            v->right = erase_rec(v->right, key, c);
            if (!v->right) return collapse(v, v->left);
        }
        pull(v);
        if (variant_ == DynVariant::counted) {
            auto it = v->cmap->find(c);
            if (--it->second == 0) v->cmap->erase(it);
        }
        after_erase(v, c);
        return maybe_rebuild(v);
    }

    static Node* collapse(Node* v, Node* survivor) {
        v->left = v->right = nullptr;
        delete v;
        return survivor;
    }

    bool find_key(Coord x, ColorId c, PKey& out) const {
        if (variant_ == DynVariant::plain) {
            auto it = color_trees_.find(c);
            if (it == color_trees_.end()) return false;
            PKey k;
            if (!it->second.lower_bound(PKey{x, 0}, k) || k.x != x) return false;
            out = k;
            return true;
        }
        return find_leaf_key(root_, x, c, out);
    }

    static bool find_leaf_key(const Node* v, Coord x, ColorId c, PKey& out) {
        if (!v) return false;
        if (v->leaf()) {
            if (v->minkey.x == x && v->color == c) {
                out = v->minkey;
                return true;
            }
            return false;
        }
        if (v->maxkey.x < x || x < v->minkey.x) return false;
        if (subtree_color_count(v, c) == 0) return false;
        if (find_leaf_key(v->left, x, c, out)) return true;
        return find_leaf_key(v->right, x, c, out);
    }

    // --- rebalancing --------------------------------------------------------

    static bool unbalanced(const Node* v) {
        const std::uint32_t m = std::max(v->left->leaves, v->right->leaves);
        return 4 * m > 3 * v->leaves;
    }

    Node* maybe_rebuild(Node* v) {
        if (!unbalanced(v)) return v;
        std::vector<std::pair<PKey, ColorId>> leaves;
        leaves.reserve(v->leaves);
        flatten(v, leaves);
        work_ += leaves.size();
        destroy(v);
        CountMap scratch;
        return build_balanced(leaves, 0, leaves.size(), scratch);
    }

    static void flatten(const Node* v, std::vector<std::pair<PKey, ColorId>>& out) {
        if (v->leaf()) {
            out.push_back({v->minkey, v->color});
            return;
        }
        flatten(v->left, out);
        flatten(v->right, out);
    }

    // builds a perfectly balanced subtree; `tally` returns the color counts of
    // the built range so parents can assemble their lists by map merging
    Node* build_balanced(const std::vector<std::pair<PKey, ColorId>>& leaves, std::size_t lo,
                         std::size_t hi, CountMap& tally) {
        if (hi - lo == 1) {
            tally.clear();
            tally.emplace(leaves[lo].second, 1);
            ++work_;
            return make_leaf(leaves[lo].first, leaves[lo].second);
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        CountMap right_tally;
        Node* v = new Node;
        v->left = build_balanced(leaves, lo, mid, tally);
        v->right = build_balanced(leaves, mid, hi, right_tally);
        if (right_tally.size() > tally.size()) tally.swap(right_tally);
        work_ += right_tally.size();
        for (const auto& [c, cnt] : right_tally) tally[c] += cnt;
        pull(v);
        v->entries.clear();
        for (const auto& [c, cnt] : tally) admit_exact(v, c, cnt);
        v->watermark = v->leaves;
        if (variant_ == DynVariant::counted) {
            v->cmap = std::make_unique<CountMap>(tally);
            work_ += tally.size();
        }
        return v;
    }

    // --- queries -------------------------------------------------------------

    ColorSet dom_set(const Node* v) const {
        if (v->leaf()) {
            ColorSet s;
            s.insert(v->color);
            return s;
        }
        std::vector<ColorId> out;
        for (const auto& e : v->entries)
            if (e.dom) out.push_back(e.color);
        return ColorSet::from_unsorted(std::move(out));
    }

    static ColorSet merge(const ColorSet& a, const ColorSet& b) {
        std::vector<ColorId> v;
        v.reserve(a.size() + b.size());
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
        return ColorSet::from_unsorted(std::move(v));
    }

    ColorSet verify(const ColorSet& cand, PKey lo, PKey hi, std::uint64_t total,
                    DynQueryStats& st) const {
        ++st.visited_nodes; // the combining node
        std::vector<ColorId> out;
        for (ColorId c : cand) {
            ++st.counting_probes;
            if (tau_.dominates(color_in_range(c, lo, hi), total)) out.push_back(c);
        }
        return ColorSet::from_unsorted(std::move(out));
    }

    // left side of the split node: the piece is [ka, maxkey(u)] at each step
    std::pair<ColorSet, std::uint64_t> walk_a_side(const Node* top, PKey ka,
                                                   DynQueryStats& st) const {
        std::vector<std::pair<const Node*, bool>> chain; // (node, went_right)
        const Node* n = top;
        while (!(n->leaf()) && ka > n->minkey) {
            const bool right = n->left->maxkey < ka;
            chain.push_back({n, right});
            n = right ? n->right : n->left;
        }
        ColorSet s;
        std::uint64_t total = 0;
        ++st.visited_nodes;
        if (!(ka > n->minkey)) { // fully covered node (often a whole subtree)
            s = dom_set(n);
            total = n->leaves;
        } // otherwise: a leaf below the boundary, empty piece
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Node* u = it->first;
            ++st.visited_nodes;
            if (it->second) continue; // came from the right child: piece unchanged
            ColorSet cand = merge(s, dom_set(u->right));
            total += u->right->leaves;
            const std::uint64_t piece_total = total;
            std::vector<ColorId> keep;
            for (ColorId c : cand) {
                ++st.counting_probes;
                if (tau_.dominates(color_in_range(c, ka, u->maxkey), piece_total))
                    keep.push_back(c);
            }
            s = ColorSet::from_unsorted(std::move(keep));
        }
        return {s, total};
    }

    // right side: the piece is [minkey(u), kb]
    std::pair<ColorSet, std::uint64_t> walk_b_side(const Node* top, PKey kb,
                                                   DynQueryStats& st) const {
        std::vector<std::pair<const Node*, bool>> chain; // (node, went_left)
        const Node* n = top;
        while (!(n->leaf()) && kb < n->maxkey) {
            const bool left = kb < n->right->minkey;
            chain.push_back({n, left});
            n = left ? n->left : n->right;
        }
        ColorSet s;
        std::uint64_t total = 0;
        ++st.visited_nodes;
        if (!(kb < n->maxkey)) {
            s = dom_set(n);
            total = n->leaves;
        } // otherwise: a leaf beyond the boundary, empty piece
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Node* u = it->first;
            ++st.visited_nodes;
            if (it->second) continue; // came from the left child: piece unchanged
            ColorSet cand = merge(dom_set(u->left), s);
            total += u->left->leaves;
            const std::uint64_t piece_total = total;
            std::vector<ColorId> keep;
            for (ColorId c : cand) {
                ++st.counting_probes;
                if (tau_.dominates(color_in_range(c, u->minkey, kb), piece_total))
                    keep.push_back(c);
            }
            s = ColorSet::from_unsorted(std::move(keep));
        }
        return {s, total};
    }

    // --- audits ---------------------------------------------------------------

    void audit_rec(const Node* v, std::size_t depth, bool deep, DynAudit& a) const {
        a.height = std::max(a.height, depth);
        if (v->leaf()) return;
        a.max_candidates = std::max(a.max_candidates, v->entries.size());
        if (v->entries.size() > cap_) a.size_bounds_ok = false;
        if (v->leaves * 2 <= v->watermark || v->watermark < v->leaves) a.size_bounds_ok = false;
        if (v->cmap) a.cmap_entries += v->cmap->size();
        if (deep) {
            CountMap tally;
            collect_counts(v, tally);
            if (v->cmap && *v->cmap != tally) a.lists_exact = false;
            std::size_t doms = 0;
            for (const auto& e : v->entries) {
                auto it = tally.find(e.color);
                const std::uint32_t actual = it == tally.end() ? 0 : it->second;
                if (e.count != actual) a.lists_exact = false;
                if (e.dom != tau_.dominates(e.count, v->leaves)) a.lists_exact = false;
                doms += e.dom;
            }
            std::size_t expected_doms = 0;
            for (const auto& [c, cnt] : tally)
                if (tau_.dominates(cnt, v->leaves)) {
                    ++expected_doms;
                    const Entry* e = nullptr;
                    for (const auto& en : v->entries)
                        if (en.color == c) e = &en;
                    if (!e || !e->dom) a.lists_exact = false;
                }
            if (doms != expected_doms) a.lists_exact = false;
        }
        audit_rec(v->left, depth + 1, deep, a);
        audit_rec(v->right, depth + 1, deep, a);
    }
};

} // namespace taudom

#endif
