#ifndef TAUDOM_IO_HPP
#define TAUDOM_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "taudom/core.hpp"

namespace taudom {

/*
 * Colors travel through files as arbitrary string tokens; the loader interns
 * them into dense ids (first appearance order) and keeps the labels for
 * output.
 */
class ColorTable {
public:
    ColorId intern(const std::string& label) {
        auto it = ids_.find(label);
        if (it != ids_.end()) return it->second;
        const ColorId id = static_cast<ColorId>(labels_.size());
        ids_.emplace(label, id);
        labels_.push_back(label);
        return id;
    }

    const std::string& label(ColorId id) const { return labels_.at(id); }
    std::size_t size() const { return labels_.size(); }

private:
    std::unordered_map<std::string, ColorId> ids_;
    std::vector<std::string> labels_;
};

struct PointsFile {
    std::size_t dim = 1;
    std::vector<ColoredPoint> points;
    ColorTable colors;
};

// points file: "# taudom v1 d=<d>" header, then per line d tab-separated
// integers and a color token
inline void write_points(std::ostream& os, std::size_t dim,
                         const std::vector<ColoredPoint>& pts, const ColorTable* table = nullptr) {
    os << "# taudom v1 d=" << dim << "\n";
    for (const auto& p : pts) {
        for (std::size_t a = 0; a < dim; ++a) os << p.coords[a] << '\t';
        if (table)
            os << table->label(p.color) << "\n";
        else
            os << 'c' << p.color << "\n";
    }
}

inline void write_points_file(const std::string& path, std::size_t dim,
                              const std::vector<ColoredPoint>& pts,
                              const ColorTable* table = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_points(os, dim, pts, table);
}

inline PointsFile read_points(std::istream& is) {
    PointsFile pf;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("points file: missing header");
    std::size_t dpos = line.find("d=");
    if (line.rfind("# taudom v1", 0) != 0 || dpos == std::string::npos)
        throw std::runtime_error("points file: bad header: " + line);
    pf.dim = std::stoull(line.substr(dpos + 2));
    if (pf.dim == 0) throw std::runtime_error("points file: d must be >= 1");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<Coord> coords(pf.dim);
        for (std::size_t a = 0; a < pf.dim; ++a)
            if (!(ss >> coords[a]))
                throw std::runtime_error("points file: bad point at line " + std::to_string(lineno));
        std::string token;
        if (!(ss >> token))
            throw std::runtime_error("points file: missing color at line " + std::to_string(lineno));
        pf.points.emplace_back(std::move(coords), pf.colors.intern(token));
    }
    return pf;
}

inline PointsFile read_points_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open points file: " + path);
    return read_points(is);
}

// query file: one rectangle per line, 2d tab-separated integers
// (lo1 hi1 lo2 hi2 ...)
inline std::vector<Rect> read_queries(std::istream& is, std::size_t dim) {
    std::vector<Rect> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<Coord> lo(dim), hi(dim);
        for (std::size_t a = 0; a < dim; ++a)
            if (!(ss >> lo[a] >> hi[a]))
                throw std::runtime_error("query file: bad rectangle at line " + std::to_string(lineno));
        out.emplace_back(std::move(lo), std::move(hi));
    }
    return out;
}

inline std::vector<Rect> read_queries_file(const std::string& path, std::size_t dim) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open query file: " + path);
    return read_queries(is, dim);
}

inline void write_queries_file(const std::string& path, const std::vector<Rect>& queries) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& q : queries) {
        for (std::size_t a = 0; a < q.dim(); ++a) {
            if (a) os << '\t';
            os << q.lo(a) << '\t' << q.hi(a);
        }
        os << "\n";
    }
}

// sorted labels for one query result, stable across runs
inline std::string format_result(const ColorSet& set, const ColorTable& table) {
    std::vector<std::string> labels;
    labels.reserve(set.size());
    for (ColorId c : set) labels.push_back(table.label(c));
    std::sort(labels.begin(), labels.end());
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += '\t';
        out += labels[i];
    }
    return out;
}

} // namespace taudom

#endif
