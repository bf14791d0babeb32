#include "doctest.h"

#include <cmath>

#include "taudom/dynamic1d.hpp"
#include "taudom/workload.hpp"

using namespace taudom;

namespace {

enum { R = 0, G = 1, B = 2 };

const std::vector<DynVariant> kVariants = {DynVariant::plain, DynVariant::counted};

std::vector<ColoredPoint> six_points() {
    return {{1, R}, {2, R}, {3, G}, {4, B}, {5, R}, {6, G}};
}

} // namespace

TEST_SUITE("dynamic1d") {

TEST_CASE("bulk build matches the oracle at the root") {
    for (DynVariant v : kVariants) {
        DynTree1D t(six_points(), Tau(1, 3), v);
        CHECK(t.query(1, 6) == ColorSet::from_unsorted({R, G}));
        CHECK(t.query(0, 7) == ColorSet::from_unsorted({R, G})); // full range hits root list
        CHECK(t.query(2, 5) == ColorSet::from_unsorted({R}));    // R=2 of 4
        CHECK(t.query(7, 9).empty());
    }
}

TEST_CASE("empty and single point trees") {
    for (DynVariant v : kVariants) {
        DynTree1D empty(Tau(1, 2), v);
        CHECK(empty.size() == 0);
        CHECK(empty.query(-100, 100).empty());

        DynTree1D one(Tau(1, 7), v);
        one.insert(5, G);
        CHECK(one.query(5, 5) == ColorSet::from_unsorted({G}));
        CHECK(one.query(6, 9).empty());
        one.erase(5, G);
        CHECK(one.size() == 0);
        CHECK(one.query(-100, 100).empty());
    }
}

TEST_CASE("inserting a color until it dominates") {
    for (DynVariant v : kVariants) {
        DynTree1D t(six_points(), Tau(1, 3), v);
        std::vector<ColoredPoint> live = six_points();
        // push B over the threshold at the root, checking the oracle each step
        for (int i = 0; i < 6; ++i) {
            t.insert(4, B);
            live.emplace_back(4, B);
            CHECK(t.query(0, 10) == oracle_dominators(live, Rect(0, 10), Tau(1, 3)));
        }
        CHECK(t.query(0, 10).contains(B));
        // a dominating color stays dominant when its own points arrive
        t.insert(4, B);
        CHECK(t.query(0, 10).contains(B));
    }
}

TEST_CASE("one color everywhere") {
    for (DynVariant v : kVariants) {
        DynTree1D t(Tau(1, 1), v);
        Rng rng(31);
        for (int i = 0; i < 200; ++i) t.insert(rng.range(0, 40), G);
        const auto audit = t.audit(true);
        CHECK(audit.lists_exact);
        CHECK(audit.size_bounds_ok);
        for (int q = 0; q < 50; ++q) {
            Coord a = rng.range(0, 40), b = rng.range(0, 40);
            if (a > b) std::swap(a, b);
            CHECK(t.query(a, b) == ColorSet::from_unsorted({G}));
        }
    }
}

TEST_CASE("deletions promote candidates") {
    for (DynVariant v : kVariants) {
        // G is just below tau = 1/2 until enough R points leave
        std::vector<ColoredPoint> pts = {{1, R}, {2, R}, {3, R}, {4, G}, {5, G}};
        DynTree1D t(pts, Tau(1, 2), v);
        std::vector<ColoredPoint> live = pts;
        CHECK_FALSE(t.query(1, 5).contains(G));
        t.erase(1, R);
        live.erase(live.begin());
        CHECK(t.query(1, 5) == oracle_dominators(live, Rect(1, 5), Tau(1, 2)));
        CHECK(t.query(1, 5).contains(G)); // 2 of 4
        t.erase(2, R);
        CHECK(t.query(1, 5) == ColorSet::from_unsorted({G}));
        // deleting the only point of a dominating color removes it
        t.erase(4, G);
        t.erase(5, G);
        CHECK(t.query(1, 5) == ColorSet::from_unsorted({R}));
    }
}

TEST_CASE("deleting a non-member is an error") {
    for (DynVariant v : kVariants) {
        DynTree1D t(six_points(), Tau(1, 3), v);
        CHECK_THROWS_AS(t.erase(1, G), std::invalid_argument); // coord exists, color wrong
        CHECK_THROWS_AS(t.erase(99, R), std::invalid_argument);
        CHECK(t.size() == 6);
    }
}

TEST_CASE("interleaved fuzz tracks the oracle") {
    for (DynVariant v : kVariants) {
        for (const Tau& tau : {Tau(1, 1), Tau(1, 3), Tau(2, 5)}) {
            Rng rng(32 + tau.max_dominators());
            DynTree1D t(tau, v);
            std::vector<ColoredPoint> live;
            for (int op = 0; op < 3000; ++op) {
                const std::uint64_t act = rng.below(3);
                if (act == 0 || live.empty()) {
                    const ColoredPoint p(rng.range(0, 60), static_cast<ColorId>(rng.below(6)));
                    t.insert(p);
                    live.push_back(p);
                } else if (act == 1) {
                    const std::size_t at = rng.below(live.size());
                    t.erase(live[at].coords[0], live[at].color);
                    live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
                } else {
                    Coord a = rng.range(-2, 62), b = rng.range(-2, 62);
                    if (a > b) std::swap(a, b);
                    const ColorSet got = t.query(a, b);
                    CHECK(got == oracle_dominators(live, Rect(a, b), tau));
                    CHECK(got.size() <= tau.max_dominators());
                }
                if (op % 500 == 0) {
                    const auto audit = t.audit(true);
                    CHECK(audit.lists_exact);
                    CHECK(audit.size_bounds_ok);
                }
            }
        }
    }
}

TEST_CASE("per-node lists stay exact on a 512 point tree") {
    for (DynVariant v : kVariants) {
        Rng rng(33);
        const Tau tau(1, 4);
        DynTree1D t(tau, v);
        std::vector<ColoredPoint> live;
        for (int op = 0; op < 2000; ++op) {
            if ((rng.below(2) == 0 && live.size() < 512) || live.empty()) {
                const ColoredPoint p(rng.range(0, 100), static_cast<ColorId>(rng.below(8)));
                t.insert(p);
                live.push_back(p);
            } else {
                const std::size_t at = rng.below(live.size());
                t.erase(live[at].coords[0], live[at].color);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
            }
            if (op % 50 == 0) {
                const auto audit = t.audit(true);
                CHECK(audit.lists_exact); // every L_v equals the exact dominator set
                CHECK(audit.size_bounds_ok);
                CHECK(audit.max_candidates <= t.lprime_capacity());
            }
        }
    }
}

TEST_CASE("candidate list capacity is floor(2/tau) + floor(1/tau)") {
    CHECK(DynTree1D(Tau(1, 2), DynVariant::plain).lprime_capacity() == 4 + 2);
    CHECK(DynTree1D(Tau(1, 16), DynVariant::plain).lprime_capacity() == 32 + 16);
    CHECK(DynTree1D(Tau(2, 5), DynVariant::plain).lprime_capacity() == 5 + 2);
}

TEST_CASE("counted variant: per-node color maps stay small") {
    Rng rng(34);
    DynTree1D t(Tau(1, 4), DynVariant::counted);
    std::vector<ColoredPoint> live;
    for (int op = 0; op < 4000; ++op) {
        if (rng.below(3) != 0 || live.empty()) {
            const ColoredPoint p(rng.range(0, 500), static_cast<ColorId>(rng.below(12)));
            t.insert(p);
            live.push_back(p);
        } else {
            const std::size_t at = rng.below(live.size());
            t.erase(live[at].coords[0], live[at].color);
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
        }
        if (op % 1000 == 999) {
            const auto audit = t.audit();
            CHECK(audit.cmap_entries <= std::uint64_t(audit.leaves) * audit.height);
        }
    }
}

TEST_CASE("height stays logarithmic under adversarial order") {
    DynTree1D t(Tau(1, 2), DynVariant::plain);
    for (int i = 0; i < 4096; ++i) t.insert(i, R); // sorted insertions
    const auto audit = t.audit();
    CHECK(double(audit.height) <= 3.0 * std::log2(4096.0) + 2.0);
    for (int i = 0; i < 4096; ++i) t.insert(0, G); // all-equal coordinate pileup
    CHECK(double(t.audit().height) <= 3.0 * std::log2(8192.0) + 2.0);
}

TEST_CASE("grow then shrink keeps candidate lists complete") {
    // a color whose insertions all failed the half-threshold admission test
    // (because the range was swollen at the time) must still be reported once
    // deletions shrink the range enough for it to dominate
    for (DynVariant v : kVariants) {
        const Tau tau(1, 3);
        DynTree1D t(tau, v);
        std::vector<ColoredPoint> live;
        auto add = [&](Coord x, ColorId c) {
            t.insert(x, c);
            live.emplace_back(x, c);
        };
        auto del = [&](Coord x, ColorId c) {
            t.erase(x, c);
            for (auto it = live.begin(); it != live.end(); ++it)
                if (it->coords[0] == x && it->color == c) {
                    live.erase(it);
                    break;
                }
        };
        auto check = [&] {
            CHECK(t.query(-1000, 1000) == oracle_dominators(live, Rect(-1000, 1000), tau));
        };
        for (Coord i = 0; i < 3; ++i) add(i, R);
        for (Coord i = 0; i < 3; ++i) add(10 + i, G);
        for (Coord i = 0; i < 54; ++i) add(100 + i, 10 + static_cast<ColorId>(i % 18)); // swell
        for (Coord i = 0; i < 6; ++i) add(50 + i, B); // 6 of 66: below tau/2 = 1/6
        check();
        CHECK_FALSE(t.query(-1000, 1000).contains(B));
        for (Coord i = 0; i < 54; ++i) {
            del(100 + i, 10 + static_cast<ColorId>(i % 18));
            check();
        }
        // 6 B of 12 live points now: B dominates at 1/3
        CHECK(t.query(-1000, 1000).contains(B));
        const auto audit = t.audit(true);
        CHECK(audit.lists_exact);
        CHECK(audit.size_bounds_ok);
    }
}

TEST_CASE("admission overflow rebuilds instead of growing the list") {
    // tau = 1/2: capacity is floor(2/tau) + floor(1/tau) = 6.  Admit fresh
    // colors one after another while older ones rot; the list must stay
    // within capacity and the queries exact throughout.
    for (DynVariant v : kVariants) {
        const Tau tau(1, 2);
        DynTree1D t(tau, v);
        std::vector<ColoredPoint> live;
        Rng rng(36);
        ColorId next = 0;
        auto add = [&](Coord x, ColorId c) {
            t.insert(x, c);
            live.emplace_back(x, c);
        };
        for (int round = 0; round < 12; ++round) {
            // a new color large enough to pass the quarter-fraction test
            const ColorId c = next++;
            const std::size_t want = live.size() / 3 + 1;
            for (std::size_t i = 0; i < want; ++i) add(rng.range(0, 100), c);
            const auto audit = t.audit(true);
            CHECK(audit.max_candidates <= t.lprime_capacity());
            CHECK(audit.lists_exact);
            CHECK(t.query(0, 100) == oracle_dominators(live, Rect(0, 100), tau));
        }
    }
}

TEST_CASE("rebuild work is amortized") {
    for (DynVariant v : kVariants) {
        Rng rng(35);
        DynTree1D t(Tau(1, 4), v);
        std::vector<ColoredPoint> live;
        const std::size_t ops = 20'000;
        std::size_t peak = 2;
        for (std::size_t op = 0; op < ops; ++op) {
            if (rng.below(2) == 0 || live.empty()) {
                const ColoredPoint p(rng.range(0, 2000), static_cast<ColorId>(rng.below(6)));
                t.insert(p);
                live.push_back(p);
            } else {
                const std::size_t at = rng.below(live.size());
                t.erase(live[at].coords[0], live[at].color);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
            }
            peak = std::max(peak, live.size());
        }
        CHECK(double(t.rebuild_work()) <= 24.0 * double(ops) * std::log2(double(peak)));
    }
}

} // TEST_SUITE
