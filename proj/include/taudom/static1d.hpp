#ifndef TAUDOM_STATIC1D_HPP
#define TAUDOM_STATIC1D_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>

#include "taudom/core.hpp"
#include "taudom/counting.hpp"

namespace taudom {

// probe backend: global sorted arrays / per-node arrays / grid predecessor
enum class ExpVariant { global_index, per_node_index, grid_index };

inline const char* to_string(ExpVariant v) {
    switch (v) {
        case ExpVariant::global_index: return "A";
        case ExpVariant::per_node_index: return "B";
        case ExpVariant::grid_index: return "G";
    }
    return "?";
}

struct ExpQueryStats {
    std::uint64_t visited_nodes = 0;
    std::uint64_t counting_probes = 0;
    // sum over probes of ceil(log2(probed index size)); the telescoping cost
    // of the per-node variant, nominal for the others
    std::uint64_t probe_cost = 0;
};

struct ExpSpaceStats {
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t max_depth = 0;
    std::uint64_t list_entries = 0;   // total colors stored across all L(i,j)
    std::uint64_t index_elements = 0; // elements in counting indexes (all variants)
};

/*
 * Static 1-D domination structure: the interval containing m points is split
 * into ~m^(1/3) children of ~m^(2/3) points each, every node stores the exact
 * dominator set L(i,j) for each child run i..j, and queries walk the two
 * boundary paths verifying candidate colors with per-color counting probes.
 *
 * Internally everything runs in rank space: the query [a,b] is mapped to the
 * rank interval of the sorted points once, which keeps duplicate coordinates
 * unambiguous when they straddle a child boundary.
 */
class ExpTree {
public:
    static constexpr std::uint32_t kLeafCutoff = 16;

    ExpTree(std::span<const ColoredPoint> pts, const Tau& tau,
            ExpVariant variant = ExpVariant::global_index)
        : tau_(tau), variant_(variant) {
        for (const auto& p : pts)
            if (p.dim() != 1) throw std::invalid_argument("ExpTree requires 1-D points");
        const std::size_t n = pts.size();
        std::vector<std::uint32_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (pts[a].coords[0] != pts[b].coords[0]) return pts[a].coords[0] < pts[b].coords[0];
            return a < b;
        });
        xs_.resize(n);
        cs_.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            xs_[r] = pts[order[r]].coords[0];
            cs_[r] = pts[order[r]].color;
        }
        build_palette();
        build_probe_index();
        if (n > 0) {
            Workspace ws;
            ws.counts.assign(palette_.size(), 0);
            root_ = build_node(0, static_cast<std::uint32_t>(n), ws);
        }
    }

    ExpTree(const std::vector<ColoredPoint>& pts, const Tau& tau,
            ExpVariant variant = ExpVariant::global_index)
        : ExpTree(std::span<const ColoredPoint>(pts), tau, variant) {}

    std::size_t size() const { return xs_.size(); }
    const Tau& tau() const { return tau_; }
    ExpVariant variant() const { return variant_; }
    Coord coord_at(std::size_t rank) const { return xs_[rank]; }
    ColorId color_at(std::size_t rank) const { return cs_[rank]; }

    ColorSet query(Coord a, Coord b) const {
        ExpQueryStats st;
        return query(a, b, st);
    }

    ColorSet query(Coord a, Coord b, ExpQueryStats& st) const {
        st = {};
        if (!root_ || a > b) return {};
        const auto [ra, rb] = locate(a, b);
        if (ra >= rb) return {};
        const Node* node = root_.get();
        std::size_t ca = 0, cb = 0;
        for (;;) {
            if (node->lo == ra && node->hi == rb) {
                ++st.visited_nodes;
                if (node->leaf()) return scan_piece(*node, ra, rb);
                return node->lists[pair_index(0, node->child_count() - 1, node->child_count())];
            }
            if (node->leaf()) {
                ++st.visited_nodes;
                return scan_piece(*node, ra, rb);
            }
            ca = node->child_containing(ra);
            cb = node->child_containing(rb - 1);
            if (ca != cb) break;
            node = node->children[ca].get();
        }
        // node is the lowest ancestor whose children separate ra and rb-1
        ColorSet sa = walk_side(*node->children[ca], ra, rb, true, st);
        ColorSet sb = walk_side(*node->children[cb], ra, rb, false, st);
        ColorSet cand = merge(sa, sb);
        if (cb >= ca + 2)
            cand = merge(cand, node->lists[pair_index(ca + 1, cb - 1, node->child_count())]);
        return verify(*node, ra, rb, cand, st);
    }

    // rank interval of [a,b] in the sorted point order
    std::pair<std::uint32_t, std::uint32_t> locate(Coord a, Coord b) const {
        if (variant_ == ExpVariant::grid_index) {
            const std::uint32_t ra =
                a <= 0 ? 0 : static_cast<std::uint32_t>(coord_grid_.count_le(a - 1));
            const std::uint32_t rb =
                b < 0 ? 0 : static_cast<std::uint32_t>(coord_grid_.count_le(b));
            return {ra, rb};
        }
        const auto ra = std::lower_bound(xs_.begin(), xs_.end(), a) - xs_.begin();
        const auto rb = std::upper_bound(xs_.begin(), xs_.end(), b) - xs_.begin();
        return {static_cast<std::uint32_t>(ra), static_cast<std::uint32_t>(rb)};
    }

    ExpSpaceStats space() const {
        ExpSpaceStats s;
        if (root_) collect_space(*root_, 0, s);
        s.index_elements += global_.stored() + grid_.stored() + coord_grid_.stored();
        return s;
    }

    static std::size_t pair_index(std::size_t i, std::size_t j, std::size_t k) {
        return i * k - i * (i - 1) / 2 + (j - i);
    }

    struct NodeView {
        std::uint32_t lo, hi, depth;
        std::span<const std::uint32_t> child_starts; // empty for leaves
        const std::vector<ColorSet>* lists;          // nullptr for leaves
    };

    template <class F>
    void visit_nodes(F&& f) const {
        if (root_) visit(*root_, 0, f);
    }

private:
    struct Node {
        std::uint32_t lo, hi;
        std::vector<std::uint32_t> child_starts; // size k+1 when internal
        std::vector<std::unique_ptr<Node>> children;
        std::vector<ColorSet> lists;                          // k*(k+1)/2, by pair_index
        std::vector<std::pair<ColorId, std::uint32_t>> pairs; // per-node variant probes

        bool leaf() const { return children.empty(); }
        std::size_t child_count() const { return children.size(); }

        std::size_t child_containing(std::uint32_t r) const {
            const auto it = std::upper_bound(child_starts.begin(), child_starts.end(), r);
            return static_cast<std::size_t>(it - child_starts.begin()) - 1;
        }
    };

    struct Workspace {
        std::vector<std::uint32_t> counts;  // indexed by local color id
        std::vector<std::uint32_t> touched; // local ids with nonzero count
    };

    Tau tau_;
    ExpVariant variant_;
    std::vector<Coord> xs_;   // rank -> coordinate (sorted)
    std::vector<ColorId> cs_; // rank -> color
    std::vector<ColorId> palette_;       // sorted distinct colors
    std::vector<std::uint32_t> local_;   // rank -> palette index
    StaticColorIndex1D global_;          // variant A: (color, rank) pairs
    GridColorIndex1D grid_;              // variant G: (color, rank) over [0, n)
    GridCounter coord_grid_;             // variant G: locate on raw coordinates
    std::unique_ptr<Node> root_;

    void build_palette() {
        palette_ = cs_;
        std::sort(palette_.begin(), palette_.end());
        palette_.erase(std::unique(palette_.begin(), palette_.end()), palette_.end());
        local_.resize(cs_.size());
        for (std::size_t r = 0; r < cs_.size(); ++r)
            local_[r] = static_cast<std::uint32_t>(
                std::lower_bound(palette_.begin(), palette_.end(), cs_[r]) - palette_.begin());
    }

    void build_probe_index() {
        const std::size_t n = xs_.size();
        if (variant_ == ExpVariant::grid_index) {
            if (n > 0 && xs_.front() < 0)
                throw std::invalid_argument("grid variant requires non-negative coordinates");
            coord_grid_.build(xs_, n > 0 ? static_cast<std::uint64_t>(xs_.back()) + 1 : 1);
            std::vector<std::pair<ColorId, Coord>> pairs(n);
            for (std::size_t r = 0; r < n; ++r) pairs[r] = {cs_[r], static_cast<Coord>(r)};
            grid_ = GridColorIndex1D(pairs, std::max<std::uint64_t>(n, 1));
            return;
        }
        if (variant_ == ExpVariant::global_index) {
            std::vector<std::pair<ColorId, Coord>> pairs(n);
            for (std::size_t r = 0; r < n; ++r) pairs[r] = {cs_[r], static_cast<Coord>(r)};
            global_ = StaticColorIndex1D(std::move(pairs));
        }
    }

    std::unique_ptr<Node> build_node(std::uint32_t lo, std::uint32_t hi, Workspace& ws) {
        auto node = std::make_unique<Node>();
        node->lo = lo;
        node->hi = hi;
        const std::uint32_t m = hi - lo;
        if (m <= kLeafCutoff) return node;

        auto beta = static_cast<std::uint32_t>(std::llround(std::cbrt(double(m))));
        beta = std::max<std::uint32_t>(2, std::min(beta, m));
        const std::uint32_t base = m / beta, rem = m % beta;
        node->child_starts.resize(beta + 1);
        node->child_starts[0] = lo;
        for (std::uint32_t k = 0; k < beta; ++k)
            node->child_starts[k + 1] = node->child_starts[k] + base + (k < rem ? 1 : 0);

        node->children.reserve(beta);
        for (std::uint32_t k = 0; k < beta; ++k)
            node->children.push_back(build_node(node->child_starts[k], node->child_starts[k + 1], ws));

        build_lists(*node, ws);

        if (variant_ == ExpVariant::per_node_index) {
            node->pairs.resize(m);
            for (std::uint32_t r = lo; r < hi; ++r) node->pairs[r - lo] = {cs_[r], r};
            std::sort(node->pairs.begin(), node->pairs.end());
        }
        return node;
    }

    // dominators of each child alone, then a sweep over j: a dominator of
    // children i..j must dominate i..j-1 or child j, so candidates never
    // exceed twice the output bound
    void build_lists(Node& node, Workspace& ws) {
        const std::size_t k = node.child_count();
        std::vector<std::vector<std::uint32_t>> childdom(k);
        for (std::size_t c = 0; c < k; ++c) {
            reset(ws);
            const std::uint32_t clo = node.child_starts[c], chi = node.child_starts[c + 1];
            for (std::uint32_t r = clo; r < chi; ++r) add(ws, local_[r]);
            for (std::uint32_t id : ws.touched)
                if (tau_.dominates(ws.counts[id], chi - clo)) childdom[c].push_back(id);
            std::sort(childdom[c].begin(), childdom[c].end());
        }

        node.lists.resize(k * (k + 1) / 2);
        std::vector<std::uint32_t> cand, next;
        for (std::size_t i = 0; i < k; ++i) {
            reset(ws);
            cand.clear();
            for (std::size_t j = i; j < k; ++j) {
                for (std::uint32_t r = node.child_starts[j]; r < node.child_starts[j + 1]; ++r)
                    add(ws, local_[r]);
                const std::uint64_t total = node.child_starts[j + 1] - node.child_starts[i];
                next.clear();
                std::merge(cand.begin(), cand.end(), childdom[j].begin(), childdom[j].end(),
                           std::back_inserter(next));
                next.erase(std::unique(next.begin(), next.end()), next.end());
                cand.clear();
                for (std::uint32_t id : next)
                    if (tau_.dominates(ws.counts[id], total)) cand.push_back(id);
                std::vector<ColorId> global(cand.size());
                for (std::size_t t = 0; t < cand.size(); ++t) global[t] = palette_[cand[t]];
                node.lists[pair_index(i, j, k)] = ColorSet::from_unsorted(std::move(global));
            }
        }
    }

    void reset(Workspace& ws) const {
        for (std::uint32_t id : ws.touched) ws.counts[id] = 0;
        ws.touched.clear();
    }

    void add(Workspace& ws, std::uint32_t id) const {
        if (ws.counts[id]++ == 0) ws.touched.push_back(id);
    }

    // exact dominators of a small leaf piece by direct tally
    ColorSet scan_piece(const Node& node, std::uint32_t lo, std::uint32_t hi) const {
        lo = std::max(lo, node.lo);
        hi = std::min(hi, node.hi);
        if (lo >= hi) return {};
        std::vector<std::pair<ColorId, std::uint32_t>> tally;
        for (std::uint32_t r = lo; r < hi; ++r) {
            bool found = false;
            for (auto& [c, cnt] : tally)
                if (c == cs_[r]) {
                    ++cnt;
                    found = true;
                    break;
                }
            if (!found) tally.emplace_back(cs_[r], 1);
        }
        std::vector<ColorId> out;
        for (const auto& [c, cnt] : tally)
            if (tau_.dominates(cnt, hi - lo)) out.push_back(c);
        return ColorSet::from_unsorted(std::move(out));
    }

    ColorSet walk_side(const Node& top, std::uint32_t ra, std::uint32_t rb, bool a_side,
                       ExpQueryStats& st) const {
        std::vector<std::pair<const Node*, std::size_t>> chain;
        const Node* n = &top;
        while (!n->leaf()) {
            const std::size_t idx = n->child_containing(a_side ? ra : rb - 1);
            chain.emplace_back(n, idx);
            n = n->children[idx].get();
        }
        ++st.visited_nodes;
        ColorSet s = scan_piece(*n, ra, rb);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Node& u = *it->first;
            const std::size_t idx = it->second;
            const std::size_t k = u.child_count();
            ++st.visited_nodes;
            if (a_side) {
                if (idx == k - 1) continue; // piece identical to the child's
                ColorSet cand = merge(s, u.lists[pair_index(idx + 1, k - 1, k)]);
                s = verify(u, ra, u.hi, cand, st);
            } else {
                if (idx == 0) continue;
                ColorSet cand = merge(s, u.lists[pair_index(0, idx - 1, k)]);
                s = verify(u, u.lo, rb, cand, st);
            }
        }
        return s;
    }

    ColorSet verify(const Node& node, std::uint32_t lo, std::uint32_t hi, const ColorSet& cand,
                    ExpQueryStats& st) const {
        const std::uint64_t total = hi - lo;
        std::vector<ColorId> out;
        for (ColorId c : cand) {
            ++st.counting_probes;
            st.probe_cost += probe_cost(node);
            if (tau_.dominates(probe(&node, c, lo, hi), total)) out.push_back(c);
        }
        return ColorSet::from_unsorted(std::move(out));
    }

    std::uint64_t probe(const Node* node, ColorId c, std::uint32_t lo, std::uint32_t hi) const {
        switch (variant_) {
            case ExpVariant::global_index:
                return global_.count(c, lo, static_cast<Coord>(hi) - 1);
            case ExpVariant::grid_index:
                return grid_.count(c, lo, static_cast<Coord>(hi) - 1);
            case ExpVariant::per_node_index: {
                const auto& p = node->pairs;
                const auto b = std::lower_bound(p.begin(), p.end(), std::make_pair(c, lo));
                const auto e = std::lower_bound(p.begin(), p.end(), std::make_pair(c, hi));
                return static_cast<std::uint64_t>(e - b);
            }
        }
        return 0;
    }

    std::uint64_t probe_cost(const Node& node) const {
        switch (variant_) {
            case ExpVariant::global_index:
                return std::bit_width(xs_.size() > 1 ? xs_.size() - 1 : 1);
            case ExpVariant::per_node_index: {
                const std::size_t m = node.hi - node.lo;
                return std::bit_width(m > 1 ? m - 1 : 1);
            }
            case ExpVariant::grid_index:
                return 1;
        }
        return 0;
    }

    static ColorSet merge(const ColorSet& a, const ColorSet& b) {
        std::vector<ColorId> v;
        v.reserve(a.size() + b.size());
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return ColorSet::from_unsorted(std::move(v));
    }

    void collect_space(const Node& node, std::uint64_t depth, ExpSpaceStats& s) const {
        ++s.nodes;
        s.max_depth = std::max(s.max_depth, depth);
        if (node.leaf()) {
            ++s.leaves;
            return;
        }
        for (const auto& l : node.lists) s.list_entries += l.size();
        s.index_elements += node.pairs.size();
        for (const auto& ch : node.children) collect_space(*ch, depth + 1, s);
    }

    template <class F>
    void visit(const Node& node, std::uint32_t depth, F&& f) const {
        NodeView v{node.lo, node.hi, depth,
                   std::span<const std::uint32_t>(node.child_starts),
                   node.leaf() ? nullptr : &node.lists};
        f(v);
        for (const auto& ch : node.children) visit(*ch, depth + 1, f);
    }
};

} // namespace taudom

#endif
