// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <geocover/bench.hpp>
#include <geocover/containment.hpp>
#include <geocover/halfspace/envelope.hpp>
#include <geocover/halfspace/large_opt.hpp>
#include <geocover/halfspace/partition_tree.hpp>
#include <geocover/halfspace/r_division.hpp>
#include <geocover/io.hpp>
#include <geocover/mwu.hpp>
#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/generators.hpp>
#include <geocover/oracle/verify.hpp>
#include <geocover/report.hpp>
#include <geocover/squares/level.hpp>
#include <geocover/static_solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

using namespace geocover;
using io::Json;

namespace {

std::vector<std::string> failed;
std::FILE* copy = nullptr;  // acceptance.txt in the working directory

void verdict(const char* name, bool pass, const std::string& detail) {
    for (auto* f : {stdout, copy}) {
        if (!f) continue;
        std::fprintf(f, "%s %-22s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
        std::fflush(f);
    }
    if (!pass) failed.push_back(name);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

oracle::GeneratorSpec spec_of(Kind kind, oracle::Distribution dist, std::uint32_t n, std::uint32_t m, std::uint32_t k,
                              std::uint64_t seed) {
    oracle::GeneratorSpec g;
    g.kind = kind;
    g.dist = dist;
    g.n_points = n;
    g.n_objects = m;
    g.planted_k = k;
    g.seed = seed;
    return g;
}

const Kind kKinds[] = {Kind::squares2d, Kind::disks2d, Kind::halfspaces3d};

report::Mode mode_of(Kind k) {
    return k == Kind::squares2d ? report::Mode::squares : k == Kind::disks2d ? report::Mode::disks : report::Mode::halfspaces;
}

// replays a generated stream against an id-keyed model and checks each emitted cover;
// value rows carry no cover, anything else fails
template <class Inst>
bool stream_covers(const oracle::GeneratedStream& s, const std::vector<Json>& rows, std::size_t& covers) {
    using P = typename Inst::point_type;
    using O = typename Inst::object_type;
    std::map<std::uint32_t, P> pts;
    std::map<std::uint32_t, O> objs;
    std::uint32_t np = 0, no = 0;
    std::size_t row = 0;
    for (const auto& op : s.ops) {
        using T = oracle::StreamOp::Type;
        switch (op.type) {
            case T::insert_point: pts[np++] = io::Codec<Inst>::point(op.data); break;
            case T::insert_object: objs[no++] = io::Codec<Inst>::object(op.data); break;
            case T::delete_point: pts.erase(std::uint32_t(op.id)); break;
            case T::delete_object: objs.erase(std::uint32_t(op.id)); break;
            default: {
                if (row >= rows.size()) return false;
                if (rows[row]["status"] == "value") {
                    ++row;
                    break;
                }
                if (rows[row]["status"] != "cover") return false;
                ++covers;
                for (const auto& [id, p] : pts) {
                    bool hit = false;
                    for (const auto& c : rows[row]["cover"]) {
                        const auto it = objs.find(c.get<std::uint32_t>());
                        if (it == objs.end()) return false;
                        hit = hit || contains(it->second, p);
                    }
                    if (!hit) return false;
                }
                ++row;
            }
        }
    }
    return row == rows.size();
}

void feasibility() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xfea5);
    std::size_t ok = 0, total = 0, values = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Kind kind = kKinds[i % 3];
        const auto dist = static_cast<oracle::Distribution>((i / 3) % 5);
        const auto n = std::uint32_t(std::lround(std::exp2(4.0 + 8.0 * uniform01(rng))));  // 16 .. 4096 elements
        const auto g = oracle::generate(spec_of(kind, dist, std::max(n / 2, 1u), std::max(n - n / 2, 1u),
                                                1 + std::uint32_t(uniform_below(rng, 8)), 1000 + i));
        report::Options opt;
        opt.seed = i;
        const auto row = report::solve(g.instance, "auto", opt);
        if (row["status"] == "value") {
            ++values;
            continue;
        }
        bool good = row["status"] == "cover";
        if (good) {
            const auto cover = row["cover"].get<std::vector<std::uint32_t>>();
            good = std::visit([&](const auto& inst) { return oracle::verify_cover(inst, std::span<const std::uint32_t>(cover)).ok; },
                              g.instance);
        }
        ok += good;
        ++total;
    }
    std::size_t streams_ok = 0, checkpoints = 0, stream_covers_seen = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const Kind kind = kKinds[i % 3];
        const auto dist = static_cast<oracle::Distribution>((i / 3) % 4);
        const auto n = 16 + std::uint32_t(uniform_below(rng, 240));
        const auto s = oracle::generate_stream({spec_of(kind, dist, n, n, 1 + std::uint32_t(uniform_below(rng, 6)), 5000 + i), 300, 25});
        std::istringstream in(io::dump_stream(s));
        std::vector<Json> rows;
        report::Options opt;
        opt.seed = i;
        report::run_stream(in, mode_of(kind), opt, [&](const Json& r) { rows.push_back(r); });
        checkpoints += rows.size();
        bool good;
        if (kind == Kind::squares2d) good = stream_covers<SquaresInstance>(s, rows, stream_covers_seen);
        else if (kind == Kind::disks2d) good = stream_covers<DisksInstance>(s, rows, stream_covers_seen);
        else good = stream_covers<HalfspacesInstance>(s, rows, stream_covers_seen);
        streams_ok += good;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    verdict("feasibility", ok == total && streams_ok == 100 && secs < 600,
            fmt("instance covers %zu/%zu (+%zu value-only), streams %zu/100 (%zu of %zu checkpoints are covers), %.0fs of 600s", ok,
                total, values, streams_ok, stream_covers_seen, checkpoints, secs));
}

void ratio() {
    // corpus maxima recorded with the exact oracle on seeds 1..200: small 19/9, large 3, recursive 2
    const double gate_small = std::min(1.2 * 19.0 / 9.0, 32.0), gate_large = std::min(1.2 * 3.0, 32.0),
                 gate_rec = std::min(1.2 * 2.0, 32.0);
    double small = 0, large = 0, rec = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto r = bench::ratio_row(seed);
        small = std::max(small, double(r.small) / double(r.opt));
        large = std::max(large, double(r.large) / double(r.opt));
        rec = std::max(rec, double(r.recursive) / double(r.disks_opt));
    }
    verdict("ratio", small <= gate_small && large <= gate_large && rec <= gate_rec,
            fmt("max small %.3f <= %.3f, large %.3f <= %.3f, recursive %.3f <= %.3f", small, gate_small, large, gate_large, rec,
                gate_rec));
}

void mwu_bounds() {
    // sizes keep the first sampling rate c0 t log n / |S| below 1
    std::size_t runs = 0, bad_rounds = 0, bad_steps = 0, bad_growth = 0, no_cover = 0, clamped = 0;
    Rng rng(0x3b3);
    for (std::uint64_t i = 0; i < 500; ++i) {
        const Kind kind = kKinds[i % 3];
        const auto k = 2 + std::uint32_t(uniform_below(rng, 4));
        const auto n = 1000 + std::uint32_t(uniform_below(rng, 1000));
        const auto g = oracle::generate(spec_of(kind, oracle::Distribution::planted, n, n, k, 7000 + i));
        const auto lists = std::visit([](const auto& inst) { return containment_lists(inst); }, g.instance);
        MwuConfig cfg;
        cfg.t = std::uint64_t(*g.planted_opt) << uniform_below(rng, 2);
        cfg.n = lists.n_points() + lists.n_objects();
        cfg.seed = i;
        clamped += cfg.c0 * double(cfg.t) * double(log2_ceil(cfg.n)) >= double(lists.n_objects());
        ExplicitOracles o(lists);
        const auto out = run_mwu(o, cfg);
        const double L = log2_ratio_ceil(cfg.n, cfg.t) + 1;
        ++runs;
        no_cover += !out.is_cover();
        bad_rounds += !out.is_cover() || out.stats.rounds > 8 * L;
        bad_steps += !out.is_cover() || double(out.stats.doubling_steps) > 8 * double(cfg.t) * L;
        bad_growth += out.stats.max_round_growth > 2.0;
    }
    const auto cap = runs / 100;
    verdict("mwu-bounds", bad_rounds <= cap && bad_steps <= cap && bad_growth <= cap,
            fmt("%zu runs, over bound: rounds %zu, steps %zu, growth %zu (allowed %zu), no cover %zu, rate clamped %zu", runs,
                bad_rounds, bad_steps, bad_growth, cap, no_cover, clamped));
}

void root_counters() {
    using halfspace::PartitionTree;
    const Coord span = 1 << 20;
    std::size_t steps = 0, mismatches = 0;
    for (std::uint64_t seq = 0; seq < 10; ++seq) {
        Rng rng(mix_seed(0xc0, seq));
        auto u = [&](Coord s) { return Coord(uniform_below(rng, std::uint64_t(2 * s + 1))) - s; };
        auto point = [&] { return Point3{u(span), u(span), u(span)}; };
        std::map<std::uint32_t, std::pair<Point3, std::uint64_t>> model;
        std::vector<std::pair<std::uint32_t, Point3>> init;
        std::uint32_t next = 0;
        for (; next < 512; ++next) {
            init.emplace_back(next, point());
            model[next] = {init.back().second, 0};
        }
        PartitionTree T(init, halfspace::PartitionTreeConfig{8, true});
        std::uint32_t regs = 0;
        for (int step = 0; step < 1000; ++step) {
            const auto op = uniform_below(rng, 10);
            if (op < 2) {
                const auto p = point();
                T.insert(next, p);
                model[next++] = {p, 0};
            } else if (op < 4 && !model.empty()) {
                auto it = model.begin();
                std::advance(it, uniform_below(rng, model.size()));
                T.erase(it->first);
                model.erase(it);
            } else if (op == 4 && regs > 40) {
                T.reset_counters();
                for (auto& [id, e] : model) e.second = 0;
                regs = 0;
            } else {
                const Point3 at = point();
                LinearConstraint3 q{{u(8), u(8), u(8)}, 0};
                q.rhs = q.coef[0] * at.x + q.coef[1] * at.y + q.coef[2] * at.z;
                const auto k = 1 + uniform_below(rng, 2);
                T.register_constraint(q, k);
                for (auto& [id, e] : model) e.second += q.satisfied(e.first) ? k : 0;
                ++regs;
            }
            std::uint64_t d = PartitionTree::kInf;
            Weight m = 0;
            for (const auto& [id, e] : model) {
                d = std::min(d, e.second);
                m += pow2(std::uint32_t(e.second));
            }
            ++steps;
            mismatches += T.root_min() != d || !(T.total_weight() == m);
        }
    }
    verdict("root-counters", mismatches == 0, fmt("%zu steps over 10 sequences with n = 512, %zu mismatches", steps, mismatches));
}

void level_structure() {
    std::size_t over = 0, wrong = 0, cells = 0;
    Rng rng(0x1e7e1);
    for (int build = 0; build < 200; ++build) {
        std::vector<std::pair<Square, std::uint64_t>> R;
        const auto r = 1 + uniform_below(rng, 120);
        const Coord span = 50 + Coord(uniform_below(rng, 2000));
        std::uint64_t total = 0;
        for (std::uint64_t i = 0; i < r; ++i) {
            R.push_back({{Coord(uniform_below(rng, span)), Coord(uniform_below(rng, span)), Coord(1 + uniform_below(rng, span / 4))},
                         1 + uniform_below(rng, 2)});
            total += R.back().second;
        }
        const auto b = uniform_below(rng, 12);
        const auto L = squares::build_level(R, b);
        cells += L.cells.size();
        over += L.cells.size() > 4 * total * (b + 1);
        auto depth = [&](const Point2& p) {
            std::uint64_t d = 0;
            for (const auto& [s, k] : R) d += contains(s, p) ? k : 0;
            return d;
        };
        bool bad = false;
        for (const auto& c : L.cells) bad = bad || c.depth > b || depth(c.representative()) != c.depth;
        for (int q = 0; q < 500 && !bad; ++q) {
            const Point2 p{Coord(uniform_below(rng, span + 40)) - 20, Coord(uniform_below(rng, span + 40)) - 20};
            const auto d = depth(p);
            std::size_t hits = 0;
            for (const auto& c : L.cells) {
                const bool in = c.x0 <= p.x && p.x <= c.x1 && c.y0 <= p.y && p.y <= c.y1;
                hits += in;
                bad = bad || (in && c.depth != d);
            }
            bad = bad || hits != (d <= b ? 1u : 0u);
        }
        wrong += bad;
    }
    verdict("level-structure", over == 0 && wrong == 0,
            fmt("200 builds, %zu cells, over size bound %zu, wrong labels %zu", cells, over, wrong));
}

void sandwich() {
    std::size_t held = 0, used = 0, skipped = 0, sum_total = 0, opt_total = 0, overhead_total = 0;
    for (std::uint64_t seed = 1; used < 100 && seed <= 400; ++seed) {
        const auto dist = seed % 3 == 0 ? oracle::Distribution::clustered : oracle::Distribution::planted;
        const Kind kind = seed % 2 ? Kind::disks2d : Kind::halfspaces3d;
        auto g = oracle::generate(spec_of(kind, dist, 100, 100, 6, 9000 + seed)).instance;
        const auto inst = kind == Kind::disks2d ? lift_instance(std::get<DisksInstance>(g)) : std::get<HalfspacesInstance>(g);
        const auto opt = oracle::exact_opt(inst);
        if (opt.timed_out) {
            ++skipped;
            continue;
        }
        const auto D = halfspace::decompose(inst.points, inst.objects, halfspace::DecompositionConfig{12, 36, seed});
        std::size_t sum = 0;
        bool timed_out = false;
        for (const auto& C : D.clusters) {
            if (C.points.empty()) continue;
            HalfspacesInstance sub;
            for (auto p : C.points) sub.points.push_back(inst.points[p]);
            for (auto s : C.objects) sub.objects.push_back(inst.objects[s]);
            const auto e = oracle::exact_opt(sub);
            timed_out = timed_out || e.timed_out || !e.feasible;
            sum += e.opt_size;
        }
        if (timed_out) {
            ++skipped;
            continue;
        }
        ++used;
        sum_total += sum;
        opt_total += opt.opt_size;
        overhead_total += D.overhead();
        held += sum <= opt.opt_size && opt.opt_size <= sum + D.overhead();
    }
    verdict("sandwich", used == 100 && held >= 99,
            fmt("held on %zu of %zu instances (%zu skipped on oracle budget), totals: clusters %zu, opt %zu, overhead %zu", held,
                used, skipped, sum_total, opt_total, overhead_total));
}

void estimator() {
    const std::size_t m = 10000;
    const double U = 10, T = 1000, eps = 0.5;
    std::vector<double> a(m, 0.0);
    for (std::size_t i = 0; i < std::size_t(T / U); ++i) a[i] = U;
    const auto r = halfspace::prescribed_draws(eps, m, U, T, m);
    Rng rng(0xe57);
    std::size_t fails = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> d;
        for (auto i : sample_without_replacement(rng, std::uint32_t(m), std::uint32_t(r))) d.push_back(a[i]);
        const auto e = halfspace::estimate_sum(d, m);
        fails += e < (1 - eps) * T || e > (1 + eps) * T;
    }
    verdict("estimator", fails <= trials / 100, fmt("%zu failures in %zu trials with %zu draws", fails, trials, std::size_t(r)));
}

void r_division() {
    std::size_t divisions = 0, bad = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto dist = seed % 2 ? oracle::Distribution::clustered : oracle::Distribution::planted;
        const auto inst = std::get<HalfspacesInstance>(oracle::generate(spec_of(Kind::halfspaces3d, dist, 3000, 600, 8, seed)).instance);
        Rng rng(seed);
        const auto R = sample_without_replacement(rng, std::uint32_t(inst.objects.size()), 120);
        halfspace::EnvelopeDecomposition E(inst.points, inst.objects, std::vector<std::uint32_t>(R.begin(), R.end()),
                                           halfspace::EnvelopeConfig{4});
        const auto& G = E.adjacency();
        for (std::size_t g : {4, 9, 36, 144}) {
            const auto ck = halfspace::check_r_division(G, halfspace::r_division(G, g));
            ++divisions;
            bad += !ck.partition || ck.cross_edges != 0 || ck.max_cluster > 4 * g ||
                   double(ck.boundary) > 8.0 * double(G.size()) / std::sqrt(double(g));
            worst = std::max(worst, double(ck.boundary) * std::sqrt(double(g)) / double(G.size()));
        }
    }
    verdict("r-division", bad == 0, fmt("%zu divisions, %zu violating, max boundary*sqrt(g)/m %.3f", divisions, bad, worst));
}

void scaling() {
    std::vector<double> x, y;
    for (std::uint32_t n = 1 << 10; n <= 1 << 15; n *= 2) {
        x.push_back(n);
        y.push_back(bench::squares_small(n, 1).seconds);
    }
    const double e_sq = bench::loglog_slope(x, y);

    // crossing counts step with the tree depth, so several point sets are pooled
    x.clear();
    y.clear();
    for (std::uint32_t n = 1 << 10; n <= 1 << 14; n *= 2) {
        double sum = 0;
        for (std::uint64_t seed = 1; seed <= 4; ++seed) sum += bench::crossed_cells(n, seed, 1024).metric;
        x.push_back(n);
        y.push_back(sum / 4);
    }
    const double e_cc = bench::loglog_slope(x, y);

    // passes run round-robin over the sizes and each point keeps its fastest pass,
    // so a slow stretch of the host does not land on one size only
    const std::uint32_t sizes[] = {12500, 25000, 50000, 100000};
    std::vector<double> best(std::size(sizes), 1e300);
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < std::size(sizes); ++i)
            best[i] = std::min(best[i], bench::static_recursive(sizes[i], 1).seconds + bench::static_recursive(sizes[i], 2).seconds);
    double worst = 0;
    std::string times;
    for (std::size_t i = 0; i < best.size(); ++i) {
        if (i) worst = std::max(worst, best[i] / best[i - 1]);
        times += fmt(" %.2f", best[i]);
    }
    verdict("scaling", e_sq <= 0.5 && e_cc <= 0.80 && worst <= 2.6,
            fmt("squares exponent %.3f <= 0.5, crossed-cell exponent %.3f <= 0.80, recursive doubling ratio %.2f <= 2.6 (s:%s)",
                e_sq, e_cc, worst, times.c_str()));
}

void determinism() {
    std::size_t compared = 0, differ = 0;
    for (std::uint64_t i = 0; i < 30; ++i) {
        const Kind kind = kKinds[i % 3];
        const auto g = oracle::generate(spec_of(kind, static_cast<oracle::Distribution>(i % 5), 300, 300, 5, 400 + i));
        for (const char* algo : {"auto", "mwu", "greedy", "static-recursive"}) {
            report::Options opt;
            opt.seed = i;
            differ += report::solve(g.instance, algo, opt).dump() != report::solve(g.instance, algo, opt).dump();
            ++compared;
        }
        const auto text = io::dump_stream(oracle::generate_stream({spec_of(kind, oracle::Distribution::planted, 80, 80, 4, 600 + i), 150, 30}));
        std::string runs[2];
        for (auto& out : runs) {
            std::istringstream in(text);
            report::Options opt;
            opt.seed = i;
            report::run_stream(in, mode_of(kind), opt, [&](const Json& r) { out += r.dump() + "\n"; });
        }
        differ += runs[0] != runs[1];
        ++compared;
    }
    verdict("determinism", differ == 0, fmt("%zu report pairs, %zu differ", compared, differ));
}

}  // namespace

int main(int argc, char** argv) {
    const std::pair<const char*, void (*)()> all[] = {
        {"feasibility", feasibility}, {"ratio", ratio},         {"mwu-bounds", mwu_bounds}, {"root-counters", root_counters},
        {"level-structure", level_structure}, {"sandwich", sandwich}, {"estimator", estimator}, {"r-division", r_division},
        {"scaling", scaling},         {"determinism", determinism}};
    // usage: test_acceptance [--allow-fail NAME]... [NAME]...
    std::vector<std::string> only, allowed;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--allow-fail") == 0 && i + 1 < argc) allowed.push_back(argv[++i]);
        else only.push_back(argv[i]);
    }
    copy = std::fopen("acceptance.txt", "w");
    for (const auto& [name, f] : all)
        if (only.empty() || std::find(only.begin(), only.end(), name) != only.end()) f();
    if (copy) std::fclose(copy);
    int blocking = 0;
    for (const auto& name : failed) {
        const bool ok = std::find(allowed.begin(), allowed.end(), name) != allowed.end();
        if (ok) std::printf("note: %s is allowed to fail\n", name.c_str());
        blocking += !ok;
    }
    return blocking ? 1 : 0;
}
