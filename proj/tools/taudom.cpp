// taudom command line: data generation, structure builds, query execution,
// oracle fuzzing with reproducer minimization, and benchmark CSV reports.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "taudom/taudom.hpp"

using namespace taudom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct QueryCounters {
    std::uint64_t probes = 0;
    std::uint64_t visited = 0;
    std::uint64_t canonical = 0;
    std::uint64_t candidates = 0;
};

/*
 * Uniform handle over every structure the harness can drive.  Static
 * structures rebuild on build(); dynamic ones accept updates.
 */
class Subject {
public:
    Subject(const std::string& name, const Tau& tau, std::size_t dim, bool inject_bug)
        : name_(name), tau_(tau), dim_(dim), inject_bug_(inject_bug) {
        if (name == "static1d-A" || name == "static1d-B" || name == "static1d-G") {
            if (dim != 1) throw CLI::ValidationError("--structure", name + " requires --d 1");
            kind_ = Kind::exp_tree;
            exp_variant_ = name == "static1d-A"   ? ExpVariant::global_index
                           : name == "static1d-B" ? ExpVariant::per_node_index
                                                  : ExpVariant::grid_index;
        } else if (name == "dynamic1d" || name == "dynamic1d-C") {
            if (dim != 1) throw CLI::ValidationError("--structure", name + " requires --d 1");
            kind_ = Kind::dyn_tree;
            dyn_variant_ = name == "dynamic1d" ? DynVariant::plain : DynVariant::counted;
        } else if (name == "md-static") {
            kind_ = Kind::md_static;
        } else if (name == "md-dynamic") {
            kind_ = Kind::md_dynamic;
        } else {
            throw CLI::ValidationError("--structure", "unknown structure: " + name);
        }
    }

    bool dynamic() const { return kind_ == Kind::dyn_tree || kind_ == Kind::md_dynamic; }
    const std::string& name() const { return name_; }

    void build(const std::vector<ColoredPoint>& pts) {
        switch (kind_) {
            case Kind::exp_tree: exp_ = std::make_unique<ExpTree>(pts, tau_, exp_variant_); break;
            case Kind::dyn_tree: dyn_ = std::make_unique<DynTree1D>(pts, tau_, dyn_variant_); break;
            case Kind::md_static:
                md_static_ = std::make_unique<StaticRangeTree>(pts, tau_, dim_, md_base_);
                break;
            case Kind::md_dynamic:
                md_dynamic_ = std::make_unique<DynRangeTree>(pts, tau_, dim_);
                break;
        }
    }

    void set_md_base(ExpVariant v) { md_base_ = v; }

    void insert(const ColoredPoint& p) {
        if (kind_ == Kind::dyn_tree)
            dyn_->insert(p);
        else if (kind_ == Kind::md_dynamic)
            md_dynamic_->insert(p);
        else
            throw std::logic_error("insert on a static structure");
    }

    void erase(const ColoredPoint& p) {
        if (kind_ == Kind::dyn_tree)
            dyn_->erase(p.coords[0], p.color);
        else if (kind_ == Kind::md_dynamic)
            md_dynamic_->erase(p);
        else
            throw std::logic_error("erase on a static structure");
    }

    ColorSet query(const Rect& q, QueryCounters& c) {
        ColorSet res;
        switch (kind_) {
            case Kind::exp_tree: {
                ExpQueryStats st;
                res = exp_->query(q.lo(0), q.hi(0), st);
                c.probes += st.counting_probes;
                c.visited += st.visited_nodes;
                break;
            }
            case Kind::dyn_tree: {
                DynQueryStats st;
                res = dyn_->query(q.lo(0), q.hi(0), st);
                c.probes += st.counting_probes;
                c.visited += st.visited_nodes;
                break;
            }
            case Kind::md_static: {
                MdQueryStats st;
                res = md_static_->query(q, st);
                c.probes += st.verification_probes;
                c.canonical += st.canonical_nodes;
                c.candidates += st.candidates;
                break;
            }
            case Kind::md_dynamic: {
                MdQueryStats st;
                res = md_dynamic_->query(q, st);
                c.probes += st.verification_probes;
                c.canonical += st.canonical_nodes;
                c.candidates += st.candidates;
                break;
            }
        }
        if (inject_bug_ && !res.empty()) {
            // deliberate off-by-one used by the harness self test
            std::vector<ColorId> v(res.begin(), res.end());
            v.pop_back();
            res = ColorSet::from_unsorted(std::move(v));
        }
        return res;
    }

    std::uint64_t list_entries() const {
        return kind_ == Kind::exp_tree ? exp_->space().list_entries : 0;
    }
    std::uint64_t index_elements() const {
        return kind_ == Kind::exp_tree ? exp_->space().index_elements : 0;
    }
    std::uint64_t work_counter() const {
        return kind_ == Kind::dyn_tree ? dyn_->rebuild_work() : 0;
    }

private:
    enum class Kind { exp_tree, dyn_tree, md_static, md_dynamic };

    std::string name_;
    Tau tau_;
    std::size_t dim_;
    bool inject_bug_;
    Kind kind_ = Kind::exp_tree;
    ExpVariant exp_variant_ = ExpVariant::global_index;
    ExpVariant md_base_ = ExpVariant::grid_index;
    DynVariant dyn_variant_ = DynVariant::plain;
    std::unique_ptr<ExpTree> exp_;
    std::unique_ptr<DynTree1D> dyn_;
    std::unique_ptr<StaticRangeTree> md_static_;
    std::unique_ptr<DynRangeTree> md_dynamic_;
};

// ---------------------------------------------------------------------------
// fuzz harness: op sequences, oracle comparison, reproducer files

struct FuzzOp {
    enum class Kind { query, insert, erase } kind;
    ColoredPoint point; // insert/erase payload
    Rect rect{0, 0};    // query payload
};

struct FuzzCase {
    std::string structure;
    Tau tau{1, 2};
    std::size_t dim = 1;
    std::vector<ColoredPoint> points; // initial build
    std::vector<FuzzOp> ops;          // last op is the failing query (in reproducers)
};

// runs the case; returns true and fills details on the FIRST query mismatch
struct RunResult {
    bool mismatch = false;
    std::size_t op_index = 0;
    Rect rect{0, 0};
    ColorSet expected, got;
};

RunResult run_case(const FuzzCase& fc, bool inject_bug) {
    RunResult rr;
    Subject subject(fc.structure, fc.tau, fc.dim, inject_bug);
    subject.build(fc.points);
    std::vector<ColoredPoint> live = fc.points;
    for (std::size_t i = 0; i < fc.ops.size(); ++i) {
        const FuzzOp& op = fc.ops[i];
        switch (op.kind) {
            case FuzzOp::Kind::insert:
                subject.insert(op.point);
                live.push_back(op.point);
                break;
            case FuzzOp::Kind::erase:
                subject.erase(op.point);
                for (auto it = live.begin(); it != live.end(); ++it)
                    if (it->coords == op.point.coords && it->color == op.point.color) {
                        live.erase(it);
                        break;
                    }
                break;
            case FuzzOp::Kind::query: {
                QueryCounters qc;
                const ColorSet got = subject.query(op.rect, qc);
                const ColorSet want = oracle_dominators(live, op.rect, fc.tau);
                if (got != want || got.size() > fc.tau.max_dominators()) {
                    rr.mismatch = true;
                    rr.op_index = i;
                    rr.rect = op.rect;
                    rr.expected = want;
                    rr.got = got;
                    return rr;
                }
                break;
            }
        }
    }
    return rr;
}

// a delete of a point that is not live is invalid; used while minimizing
bool valid_case(const FuzzCase& fc) {
    std::vector<ColoredPoint> live = fc.points;
    for (const auto& op : fc.ops) {
        if (op.kind == FuzzOp::Kind::insert) live.push_back(op.point);
        if (op.kind == FuzzOp::Kind::erase) {
            bool found = false;
            for (auto it = live.begin(); it != live.end(); ++it)
                if (it->coords == op.point.coords && it->color == op.point.color) {
                    live.erase(it);
                    found = true;
                    break;
                }
            if (!found) return false;
        }
    }
    return true;
}

bool still_fails(const FuzzCase& fc, bool inject_bug) {
    if (!valid_case(fc)) return false;
    return run_case(fc, inject_bug).mismatch;
}

// greedy shrink: drop ops before the failing query, then drop initial points
FuzzCase minimize(FuzzCase fc, bool inject_bug) {
    for (int pass = 0; pass < 3; ++pass) {
        bool changed = false;
        for (std::size_t i = fc.ops.size(); i-- > 1;) {
            if (i == fc.ops.size() - 1) continue; // keep the failing query
            FuzzCase trial = fc;
            trial.ops.erase(trial.ops.begin() + static_cast<std::ptrdiff_t>(i));
            if (still_fails(trial, inject_bug)) {
                fc = std::move(trial);
                changed = true;
            }
        }
        std::size_t chunk = std::max<std::size_t>(1, fc.points.size() / 2);
        while (chunk >= 1) {
            for (std::size_t at = 0; at + chunk <= fc.points.size();) {
                FuzzCase trial = fc;
                trial.points.erase(trial.points.begin() + static_cast<std::ptrdiff_t>(at),
                                   trial.points.begin() + static_cast<std::ptrdiff_t>(at + chunk));
                if (still_fails(trial, inject_bug)) {
                    fc = std::move(trial);
                    changed = true;
                } else {
                    at += chunk;
                }
            }
            if (chunk == 1) break;
            chunk /= 2;
        }
        if (!changed) break;
    }
    return fc;
}

void write_repro(const std::string& path, const FuzzCase& fc, const RunResult& rr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write reproducer: " + path);
    os << "# taudom repro v1\n";
    os << "structure " << fc.structure << "\n";
    os << "tau " << fc.tau.str() << "\n";
    os << "dim " << fc.dim << "\n";
    os << "points " << fc.points.size() << "\n";
    for (const auto& p : fc.points) {
        for (Coord c : p.coords) os << c << ' ';
        os << p.color << "\n";
    }
    os << "ops " << fc.ops.size() << "\n";
    for (const auto& op : fc.ops) {
        if (op.kind == FuzzOp::Kind::query) {
            os << "Q";
            for (std::size_t a = 0; a < op.rect.dim(); ++a)
                os << ' ' << op.rect.lo(a) << ' ' << op.rect.hi(a);
            os << "\n";
        } else {
            os << (op.kind == FuzzOp::Kind::insert ? "I" : "D");
            for (Coord c : op.point.coords) os << ' ' << c;
            os << ' ' << op.point.color << "\n";
        }
    }
    os << "expected";
    for (ColorId c : rr.expected) os << ' ' << c;
    os << "\ngot";
    for (ColorId c : rr.got) os << ' ' << c;
    os << "\n";
}

FuzzCase read_repro(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open reproducer: " + path);
    FuzzCase fc;
    std::string line, word;
    std::getline(is, line); // header
    is >> word >> fc.structure;
    is >> word >> line;
    fc.tau = Tau::parse(line);
    is >> word >> fc.dim;
    std::size_t npoints = 0;
    is >> word >> npoints;
    for (std::size_t i = 0; i < npoints; ++i) {
        std::vector<Coord> coords(fc.dim);
        for (auto& c : coords) is >> c;
        ColorId col;
        is >> col;
        fc.points.emplace_back(std::move(coords), col);
    }
    std::size_t nops = 0;
    is >> word >> nops;
    for (std::size_t i = 0; i < nops; ++i) {
        std::string tag;
        is >> tag;
        FuzzOp op{FuzzOp::Kind::query, ColoredPoint{}, Rect(0, 0)};
        if (tag == "Q") {
            std::vector<Coord> lo(fc.dim), hi(fc.dim);
            for (std::size_t a = 0; a < fc.dim; ++a) is >> lo[a] >> hi[a];
            op.kind = FuzzOp::Kind::query;
            op.rect = Rect(std::move(lo), std::move(hi));
        } else {
            op.kind = tag == "I" ? FuzzOp::Kind::insert : FuzzOp::Kind::erase;
            std::vector<Coord> coords(fc.dim);
            for (auto& c : coords) is >> c;
            ColorId col;
            is >> col;
            op.point = ColoredPoint(std::move(coords), col);
        }
        fc.ops.push_back(std::move(op));
    }
    return fc;
}

Rect random_rect(Rng& rng, std::size_t dim, Coord lo, Coord hi) {
    std::vector<Coord> a(dim), b(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        a[i] = rng.range(lo, hi);
        b[i] = rng.range(lo, hi);
        if (a[i] > b[i]) std::swap(a[i], b[i]);
    }
    return Rect(std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------

int cmd_gen(const Workload& w, const std::string& out) {
    const GeneratedWorkload gw = generate(w);
    if (out.empty())
        write_points(std::cout, w.dim, gw.points);
    else
        write_points_file(out, w.dim, gw.points);
    if (!gw.plant_lo.empty()) {
        std::cerr << "planted box:";
        for (std::size_t a = 0; a < w.dim; ++a)
            std::cerr << " [" << gw.plant_lo[a] << "," << gw.plant_hi[a] << "]";
        std::cerr << "\n";
    }
    return kExitOk;
}

int cmd_build(const std::string& points_path, const std::string& structure, const Tau& tau,
              const std::string& base) {
    const PointsFile pf = read_points_file(points_path);
    Subject subject(structure, tau, pf.dim, false);
    if (base == "A") subject.set_md_base(ExpVariant::global_index);
    if (base == "B") subject.set_md_base(ExpVariant::per_node_index);
    const auto t0 = std::chrono::steady_clock::now();
    subject.build(pf.points);
    const auto t1 = std::chrono::steady_clock::now();
    std::cout << "structure\t" << structure << "\n"
              << "n\t" << pf.points.size() << "\n"
              << "d\t" << pf.dim << "\n"
              << "tau\t" << tau.str() << "\n"
              << "build_ms\t"
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n"
              << "list_entries\t" << subject.list_entries() << "\n"
              << "index_elements\t" << subject.index_elements() << "\n";
    return kExitOk;
}

int cmd_query(const std::string& points_path, const std::string& queries_path,
              const std::string& structure, const Tau& tau, const std::string& base,
              const std::string& out) {
    const PointsFile pf = read_points_file(points_path);
    const std::vector<Rect> queries = read_queries_file(queries_path, pf.dim);
    Subject subject(structure, tau, pf.dim, false);
    if (base == "A") subject.set_md_base(ExpVariant::global_index);
    if (base == "B") subject.set_md_base(ExpVariant::per_node_index);
    subject.build(pf.points);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open for writing: " + out);
        os = &file;
    }
    for (const auto& q : queries) {
        QueryCounters qc;
        const ColorSet res = subject.query(q, qc);
        *os << format_result(res, pf.colors) << "\n";
    }
    return kExitOk;
}

int cmd_fuzz(const std::string& structure, std::size_t n, std::size_t dim,
             const std::vector<std::string>& tau_texts, std::size_t ops, std::uint64_t seed,
             const std::string& repro_out, bool inject_bug, Coord span) {
    for (const std::string& tau_text : tau_texts) {
        const Tau tau = Tau::parse(tau_text);
        Subject probe(structure, tau, dim, false); // validates the name early
        Rng rng(seed ^ (tau.num() * 1315423911ULL + tau.den()));
        const unsigned palette = 2 + static_cast<unsigned>(rng.below(8));

        FuzzCase fc;
        fc.structure = structure;
        fc.tau = tau;
        fc.dim = dim;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Coord> coords(dim);
            for (auto& c : coords) c = rng.range(0, span);
            fc.points.emplace_back(std::move(coords), static_cast<ColorId>(rng.below(palette)));
        }
        std::vector<ColoredPoint> live = fc.points;
        const bool dynamic = probe.dynamic();
        for (std::size_t i = 0; i < ops; ++i) {
            const std::uint64_t act = dynamic ? rng.below(3) : 2;
            if (act == 0 || (act == 1 && live.empty())) {
                std::vector<Coord> coords(dim);
                for (auto& c : coords) c = rng.range(0, span);
                ColoredPoint p(std::move(coords), static_cast<ColorId>(rng.below(palette)));
                live.push_back(p);
                fc.ops.push_back({FuzzOp::Kind::insert, std::move(p), Rect(0, 0)});
            } else if (act == 1) {
                const std::size_t at = rng.below(live.size());
                fc.ops.push_back({FuzzOp::Kind::erase, live[at], Rect(0, 0)});
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
            } else {
                fc.ops.push_back(
                    {FuzzOp::Kind::query, ColoredPoint{}, random_rect(rng, dim, -2, span + 2)});
            }
        }

        const RunResult rr = run_case(fc, inject_bug);
        if (rr.mismatch) {
            FuzzCase shrunk = fc;
            shrunk.ops.resize(rr.op_index + 1); // everything after the failure is noise
            shrunk = minimize(std::move(shrunk), inject_bug);
            const RunResult final_rr = run_case(shrunk, inject_bug);
            write_repro(repro_out, shrunk, final_rr);
            std::cerr << "fuzz: MISMATCH structure=" << structure << " tau=" << tau.str()
                      << " (points=" << shrunk.points.size() << " ops=" << shrunk.ops.size()
                      << "), reproducer written to " << repro_out << "\n";
            return kExitMismatch;
        }
        std::cout << "fuzz: ok structure=" << structure << " tau=" << tau.str() << " n=" << n
                  << " ops=" << ops << "\n";
    }
    return kExitOk;
}

int cmd_replay(const std::string& path, bool inject_bug) {
    const FuzzCase fc = read_repro(path);
    const RunResult rr = run_case(fc, inject_bug);
    if (rr.mismatch) {
        std::cerr << "replay: mismatch reproduced at op " << rr.op_index << "\n";
        return kExitMismatch;
    }
    std::cout << "replay: no mismatch\n";
    return kExitOk;
}

int cmd_bench(const std::string& structure, std::size_t n, std::size_t dim, const Tau& tau,
              std::size_t queries, std::uint64_t seed, const std::string& out,
              const std::string& base) {
    Workload w;
    w.dim = dim;
    w.n = n;
    w.seed = seed;
    w.colors.palette = 32;
    const GeneratedWorkload gw = generate(w);

    Subject subject(structure, tau, dim, false);
    if (base == "A") subject.set_md_base(ExpVariant::global_index);
    if (base == "B") subject.set_md_base(ExpVariant::per_node_index);
    const auto b0 = std::chrono::steady_clock::now();
    subject.build(gw.points);
    const auto b1 = std::chrono::steady_clock::now();

    Rng rng(seed * 7919 + 13);
    std::vector<double> us(queries);
    QueryCounters totals;
    for (std::size_t i = 0; i < queries; ++i) {
        const Rect q = random_rect(rng, dim, w.coords.lo, w.coords.hi);
        const auto q0 = std::chrono::steady_clock::now();
        const ColorSet res = subject.query(q, totals);
        const auto q1 = std::chrono::steady_clock::now();
        us[i] = std::chrono::duration<double, std::micro>(q1 - q0).count();
        if (res.size() > tau.max_dominators()) {
            std::cerr << "bench: output size bound violated\n";
            return kExitMismatch;
        }
    }
    std::sort(us.begin(), us.end());
    const double med = queries ? us[queries / 2] : 0;
    const double p99 = queries ? us[std::min(queries - 1, (queries * 99) / 100)] : 0;
    const double dq = queries ? double(queries) : 1;

    std::ostringstream csv;
    csv << "# taudom bench v1\n";
    csv << "n,d,tau,structure,seed,queries,build_ms,q_med_us,q_p99_us,mean_probes,mean_visited,"
           "mean_canonical,mean_candidates,list_entries,index_elements,work_counter\n";
    csv << n << ',' << dim << ',' << tau.str() << ',' << structure << ',' << seed << ','
        << queries << ','
        << std::chrono::duration_cast<std::chrono::milliseconds>(b1 - b0).count() << ',' << med
        << ',' << p99 << ',' << double(totals.probes) / dq << ',' << double(totals.visited) / dq
        << ',' << double(totals.canonical) / dq << ',' << double(totals.candidates) / dq << ','
        << subject.list_entries() << ',' << subject.index_elements() << ','
        << subject.work_counter() << '\n';
    if (out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for writing: " + out);
        os << csv.str();
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tau-domination structures: generate, build, query, fuzz, bench"};
    app.require_subcommand(1);

    const std::vector<std::string> structures = {"static1d-A", "static1d-B", "static1d-G",
                                                 "dynamic1d",  "dynamic1d-C", "md-static",
                                                 "md-dynamic"};

    // gen
    auto* gen = app.add_subcommand("gen", "generate a points file");
    Workload w;
    std::string colors_spec = "uniform:8", coords_spec = "uniform:0:1000000", gen_out;
    gen->add_option("--d", w.dim, "dimension")->default_val(1);
    gen->add_option("--n", w.n, "point count")->required();
    gen->add_option("--colors", colors_spec, "uniform:K | zipf:S:K | planted:NUM/DEN[:K]");
    gen->add_option("--coords", coords_spec, "uniform[:LO:HI] | clustered[:K:SPREAD[:LO:HI]]");
    gen->add_option("--seed", w.seed, "rng seed")->default_val(0);
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // build
    auto* build = app.add_subcommand("build", "build a structure and report stats");
    std::string b_points, b_structure, b_tau = "1/2", b_base;
    build->add_option("--points", b_points, "points file")->required();
    build->add_option("--structure", b_structure)->required()->check(CLI::IsMember(structures));
    build->add_option("--tau", b_tau, "threshold num/den");
    build->add_option("--base", b_base, "md-static 1-D base variant (A|B|G)")
        ->check(CLI::IsMember({"A", "B", "G"}));

    // query
    auto* query = app.add_subcommand("query", "run a query file against a structure");
    std::string q_points, q_queries, q_structure, q_tau = "1/2", q_base, q_out;
    query->add_option("--points", q_points)->required();
    query->add_option("--queries", q_queries)->required();
    query->add_option("--structure", q_structure)->required()->check(CLI::IsMember(structures));
    query->add_option("--tau", q_tau);
    query->add_option("--base", q_base)->check(CLI::IsMember({"A", "B", "G"}));
    query->add_option("--out", q_out, "results file (default stdout)");

    // fuzz
    auto* fuzz = app.add_subcommand("fuzz", "randomized oracle comparison");
    std::string f_structure, f_repro = "taudom-repro.txt", f_replay;
    std::vector<std::string> f_taus = {"1/3"};
    std::size_t f_n = 256, f_d = 1, f_ops = 1000;
    std::uint64_t f_seed = 0;
    Coord f_span = 1000;
    bool f_inject = false;
    fuzz->add_option("--structure", f_structure)->check(CLI::IsMember(structures));
    fuzz->add_option("--n", f_n, "initial point count");
    fuzz->add_option("--d", f_d, "dimension");
    fuzz->add_option("--tau", f_taus, "threshold(s) num/den");
    fuzz->add_option("--ops", f_ops, "operation count");
    fuzz->add_option("--seed", f_seed);
    fuzz->add_option("--span", f_span, "coordinate range [0,span]");
    fuzz->add_option("--out", f_repro, "reproducer path on mismatch");
    fuzz->add_option("--replay", f_replay, "re-run a reproducer file instead of fuzzing");
    fuzz->add_flag("--inject-bug", f_inject, "deliberately corrupt results (self test)");

    // bench
    auto* bench = app.add_subcommand("bench", "timing and counter report (CSV)");
    std::string be_structure, be_tau = "1/8", be_out, be_base;
    std::size_t be_n = 1 << 16, be_d = 1, be_queries = 1000;
    std::uint64_t be_seed = 0;
    bench->add_option("--structure", be_structure)->required()->check(CLI::IsMember(structures));
    bench->add_option("--n", be_n);
    bench->add_option("--d", be_d);
    bench->add_option("--tau", be_tau);
    bench->add_option("--queries", be_queries);
    bench->add_option("--seed", be_seed);
    bench->add_option("--base", be_base)->check(CLI::IsMember({"A", "B", "G"}));
    bench->add_option("--out", be_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            w.colors = ColorDist::parse(colors_spec);
            w.coords = CoordDist::parse(coords_spec);
            return cmd_gen(w, gen_out);
        }
        if (build->parsed()) return cmd_build(b_points, b_structure, Tau::parse(b_tau), b_base);
        if (query->parsed())
            return cmd_query(q_points, q_queries, q_structure, Tau::parse(q_tau), q_base, q_out);
        if (fuzz->parsed()) {
            if (!f_replay.empty()) return cmd_replay(f_replay, f_inject);
            if (f_structure.empty())
                throw CLI::ValidationError("--structure", "required unless --replay is given");
            return cmd_fuzz(f_structure, f_n, f_d, f_taus, f_ops, f_seed, f_repro, f_inject,
                            f_span);
        }
        if (bench->parsed())
            return cmd_bench(be_structure, be_n, be_d, Tau::parse(be_tau), be_queries, be_seed,
                             be_out, be_base);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
