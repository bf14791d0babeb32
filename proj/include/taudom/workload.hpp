#ifndef TAUDOM_WORKLOAD_HPP
#define TAUDOM_WORKLOAD_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "taudom/core.hpp"

namespace taudom {

/*
 * splitmix64: tiny, seedable, and identical on every platform, which is what
 * makes whole harness runs byte-reproducible.  Never use std:: distributions
 * here; their output is implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n); n > 0
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // uniform in [lo, hi] inclusive
    Coord range(Coord lo, Coord hi) {
        return lo + static_cast<Coord>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double unit() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

struct ColorDist {
    enum class Kind { uniform, zipf, planted } kind = Kind::uniform;
    std::size_t palette = 8;   // number of colors
    double zipf_s = 1.0;       // zipf exponent
    std::uint64_t frac_num = 1; // planted fraction
    std::uint64_t frac_den = 2;

    // "uniform:K" | "zipf:S:K" | "planted:NUM/DEN[:K]"
    static ColorDist parse(const std::string& text);
};

struct CoordDist {
    enum class Kind { uniform, clustered } kind = Kind::uniform;
    Coord lo = 0;
    Coord hi = 1'000'000;
    std::size_t clusters = 8;
    Coord spread = 1000;

    // "uniform[:LO:HI]" | "clustered[:K:SPREAD[:LO:HI]]"
    static CoordDist parse(const std::string& text);
};

struct Workload {
    std::size_t dim = 1;
    std::size_t n = 0;
    ColorDist colors;
    CoordDist coords;
    std::uint64_t seed = 0;
};

struct GeneratedWorkload {
    std::vector<ColoredPoint> points;
    // the planted rectangle (central box), meaningful for ColorDist::planted
    std::vector<Coord> plant_lo, plant_hi;
};

inline ColorDist ColorDist::parse(const std::string& text) {
    ColorDist d;
    auto fields = [&] {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i)
            if (i == text.size() || text[i] == ':') {
                out.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        return out;
    }();
    if (fields.empty()) throw std::invalid_argument("empty color distribution");
    if (fields[0] == "uniform") {
        d.kind = Kind::uniform;
        if (fields.size() > 1) d.palette = std::stoull(fields[1]);
    } else if (fields[0] == "zipf") {
        d.kind = Kind::zipf;
        if (fields.size() < 3) throw std::invalid_argument("zipf needs zipf:S:K");
        d.zipf_s = std::stod(fields[1]);
        d.palette = std::stoull(fields[2]);
    } else if (fields[0] == "planted") {
        d.kind = Kind::planted;
        if (fields.size() < 2) throw std::invalid_argument("planted needs planted:NUM/DEN[:K]");
        const auto slash = fields[1].find('/');
        if (slash == std::string::npos) throw std::invalid_argument("planted fraction must be NUM/DEN");
        d.frac_num = std::stoull(fields[1].substr(0, slash));
        d.frac_den = std::stoull(fields[1].substr(slash + 1));
        if (d.frac_num == 0 || d.frac_num > d.frac_den)
            throw std::invalid_argument("planted fraction must be in (0,1]");
        if (fields.size() > 2) d.palette = std::stoull(fields[2]);
    } else {
        throw std::invalid_argument("unknown color distribution: " + fields[0]);
    }
    if (d.palette == 0) throw std::invalid_argument("palette must be nonempty");
    return d;
}

inline CoordDist CoordDist::parse(const std::string& text) {
    CoordDist d;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
        if (i == text.size() || text[i] == ':') {
            fields.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    if (fields.empty()) throw std::invalid_argument("empty coordinate distribution");
    if (fields[0] == "uniform") {
        d.kind = Kind::uniform;
        if (fields.size() > 2) {
            d.lo = std::stoll(fields[1]);
            d.hi = std::stoll(fields[2]);
        }
    } else if (fields[0] == "clustered") {
        d.kind = Kind::clustered;
        if (fields.size() > 2) {
            d.clusters = std::stoull(fields[1]);
            d.spread = std::stoll(fields[2]);
        }
        if (fields.size() > 4) {
            d.lo = std::stoll(fields[3]);
            d.hi = std::stoll(fields[4]);
        }
    } else {
        throw std::invalid_argument("unknown coordinate distribution: " + fields[0]);
    }
    if (d.lo > d.hi) throw std::invalid_argument("coordinate range requires lo <= hi");
    return d;
}

inline GeneratedWorkload generate(const Workload& w) {
    Rng rng(w.seed ^ 0xa5a5a5a5deadbeefULL);
    GeneratedWorkload out;
    out.points.reserve(w.n);

    std::vector<Coord> centers;
    if (w.coords.kind == CoordDist::Kind::clustered) {
        for (std::size_t k = 0; k < w.coords.clusters * w.dim; ++k)
            centers.push_back(rng.range(w.coords.lo, w.coords.hi));
    }
    auto draw_coord = [&](std::size_t axis) -> Coord {
        if (w.coords.kind == CoordDist::Kind::uniform) return rng.range(w.coords.lo, w.coords.hi);
        const std::size_t c = rng.below(w.coords.clusters);
        const Coord center = centers[c * w.dim + axis];
        // sum of four uniforms approximates a bell around the center
        Coord off = 0;
        for (int i = 0; i < 4; ++i) off += rng.range(-w.coords.spread, w.coords.spread);
        return std::clamp(center + off / 4, w.coords.lo, w.coords.hi);
    };

    std::vector<double> zipf_cdf;
    if (w.colors.kind == ColorDist::Kind::zipf) {
        zipf_cdf.resize(w.colors.palette);
        double acc = 0;
        for (std::size_t i = 0; i < w.colors.palette; ++i) {
            acc += 1.0 / std::pow(double(i + 1), w.colors.zipf_s);
            zipf_cdf[i] = acc;
        }
        for (double& v : zipf_cdf) v /= acc;
    }
    auto draw_color = [&]() -> ColorId {
        switch (w.colors.kind) {
            case ColorDist::Kind::zipf: {
                const double u = rng.unit();
                return static_cast<ColorId>(
                    std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), u) - zipf_cdf.begin());
            }
            default:
                return static_cast<ColorId>(rng.below(w.colors.palette));
        }
    };

    for (std::size_t i = 0; i < w.n; ++i) {
        std::vector<Coord> coords(w.dim);
        for (std::size_t a = 0; a < w.dim; ++a) coords[a] = draw_coord(a);
        out.points.emplace_back(std::move(coords), draw_color());
    }

    if (w.colors.kind == ColorDist::Kind::planted && w.n > 0) {
        // central box between the 25% and 75% quantiles per axis
        out.plant_lo.resize(w.dim);
        out.plant_hi.resize(w.dim);
        std::vector<Coord> axis(w.n);
        for (std::size_t a = 0; a < w.dim; ++a) {
            for (std::size_t i = 0; i < w.n; ++i) axis[i] = out.points[i].coords[a];
            std::sort(axis.begin(), axis.end());
            out.plant_lo[a] = axis[w.n / 4];
            out.plant_hi[a] = std::max(out.plant_lo[a], axis[(3 * w.n) / 4]);
        }
        const Rect box(out.plant_lo, out.plant_hi);
        std::vector<std::size_t> inside;
        for (std::size_t i = 0; i < w.n; ++i)
            if (box.contains(out.points[i])) inside.push_back(i);
        // recolor: exactly ceil(frac * |inside|) points of color 0 inside the
        // box, everything else drawn from colors 1..palette
        const std::uint64_t want =
            (w.colors.frac_num * inside.size() + w.colors.frac_den - 1) / w.colors.frac_den;
        for (std::size_t i = 0; i < w.n; ++i)
            out.points[i].color =
                1 + static_cast<ColorId>(rng.below(std::max<std::size_t>(w.colors.palette, 1)));
        for (std::uint64_t k = 0; k < want && k < inside.size(); ++k)
            out.points[inside[k]].color = 0;
        // generator self-check: color 0 must dominate the planted box
        if (!inside.empty() && want > 0) {
            const ColorSet doms =
                oracle_dominators(out.points, box, Tau(w.colors.frac_num, w.colors.frac_den));
            if (!doms.contains(0))
                throw std::logic_error("planted workload failed its own oracle check");
        }
    }
    return out;
}

} // namespace taudom

#endif
