// geocover command line: gen, solve, stream, verify, bench.

#include <geocover/bench.hpp>
#include <geocover/io.hpp>
#include <geocover/oracle/verify.hpp>
#include <geocover/report.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace geocover;
using io::Json;

namespace {

constexpr int kOk = 0, kVerifyFail = 1, kInputError = 2, kAnomaly = 3;

std::string read_all(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError(path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError(path + ": cannot write");
    f << text;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GEOCOVER_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw InputError("GEOCOVER_SEED: not an unsigned integer: " + std::string(env));
        return v;
    }
    return 1;
}

Kind kind_arg(const std::string& s) {
    const auto k = io::parse_kind(s);
    if (!k) throw InputError("unknown kind \"" + s + "\"");
    return *k;
}

struct GenArgs {
    std::string kind = "squares2d", dist = "uniform", out;
    std::uint32_t points = 64, objects = 64, planted = 8;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> stream_updates;
    std::uint32_t solve_every = 50;
};

int cmd_gen(const GenArgs& a) {
    oracle::GeneratorSpec g;
    g.kind = kind_arg(a.kind);
    const auto d = oracle::parse_distribution(a.dist);
    if (!d) throw InputError("unknown distribution \"" + a.dist + "\"");
    g.dist = *d;
    g.n_points = a.points;
    g.n_objects = a.objects;
    g.planted_k = a.planted;
    g.seed = resolve_seed(a.seed);
    if (a.stream_updates) {
        const auto s = oracle::generate_stream({g, *a.stream_updates, a.solve_every});
        write_out(a.out, io::dump_stream(s));
    } else {
        write_out(a.out, io::dump_instance(oracle::generate(g).instance));
    }
    return kOk;
}

struct SolveArgs {
    std::string input, algo = "auto", out;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

int cmd_solve(const SolveArgs& a) {
    const auto inst = io::parse_instance(read_all(a.input), a.input);
    report::Options opt;
    opt.seed = resolve_seed(a.seed);
    opt.timing = a.timing;
    write_out(a.out, report::solve(inst, a.algo, opt).dump() + "\n");
    return kOk;
}

struct StreamArgs {
    std::string input, mode = "squares", init, out;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

int cmd_stream(const StreamArgs& a) {
    const auto mode = report::parse_mode(a.mode);
    if (!mode) throw InputError("unknown mode \"" + a.mode + "\"");
    std::optional<oracle::AnyInstance> init;
    if (!a.init.empty()) init = io::parse_instance(read_all(a.init), a.init);
    report::Options opt;
    opt.seed = resolve_seed(a.seed);
    opt.timing = a.timing;
    std::ostringstream rows;
    auto emit = [&](const Json& row) { rows << row.dump() << "\n"; };
    if (a.input == "-") {
        report::run_stream(std::cin, *mode, opt, emit, "stdin", init ? &*init : nullptr);
    } else {
        std::ifstream f(a.input, std::ios::binary);
        if (!f) throw InputError(a.input + ": cannot open");
        report::run_stream(f, *mode, opt, emit, a.input, init ? &*init : nullptr);
    }
    write_out(a.out, rows.str());
    return kOk;
}

struct VerifyArgs {
    std::string input, solution;
};

int cmd_verify(const VerifyArgs& a) {
    const auto any = io::parse_instance(read_all(a.input), a.input);
    const auto cover = io::parse_solution(read_all(a.solution), a.solution);
    Json out;
    std::visit(
        [&](const auto& inst) {
            for (std::size_t i = 0; i < cover.size(); ++i)
                if (cover[i] >= inst.objects.size())
                    throw InputError(a.solution + ": cover[" + std::to_string(i) + "] = " + std::to_string(cover[i]) +
                                     " is not an object id");
            const auto v = oracle::verify_cover(inst, std::span<const std::uint32_t>(cover));
            out["ok"] = v.ok;
            out["solution_size"] = cover.size();
            if (!v.ok) {
                out["uncovered_point"] = *v.uncovered;
                out["point"] = oracle::gen_detail::encode(inst.points[*v.uncovered]);
            }
        },
        any);
    std::cout << out.dump() << "\n";
    return out["ok"].get<bool>() ? kOk : kVerifyFail;
}

struct BenchArgs {
    std::string suite = "scaling", sizes, out;
    std::optional<std::uint64_t> seed;
    std::uint32_t count = 200;
};

std::vector<std::uint32_t> parse_sizes(const std::string& s, std::vector<std::uint32_t> fallback) {
    if (s.empty()) return fallback;
    std::vector<std::uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const auto v = std::strtoul(item.c_str(), &end, 10);
        if (item.empty() || *end != '\0' || v == 0 || v > (1u << 24)) throw InputError("--sizes: bad size \"" + item + "\"");
        out.push_back(std::uint32_t(v));
    }
    return out;
}

int cmd_bench(const BenchArgs& a) {
    const auto seed = resolve_seed(a.seed);
    std::ostringstream csv;
    char buf[256];
    if (a.suite == "scaling") {
        csv << "series,n,seed,seconds,metric\n";
        auto put = [&](const bench::ScalingRow& r) {
            std::snprintf(buf, sizeof buf, "%s,%zu,%llu,%.6f,%.4f\n", r.series.c_str(), r.n, (unsigned long long)r.seed,
                          r.seconds, r.metric);
            csv << buf;
        };
        for (auto n : parse_sizes(a.sizes, {1024, 2048, 4096, 8192, 16384})) {
            put(bench::squares_small(n, seed));
            put(bench::crossed_cells(n, seed));
            put(bench::static_recursive(n, seed));
        }
    } else if (a.suite == "ratio") {
        csv << "seed,n,opt,small,large,disks_opt,recursive\n";
        for (std::uint32_t i = 0; i < a.count; ++i) {
            const auto r = bench::ratio_row(seed + i);
            csv << r.seed << "," << r.n << "," << r.opt << "," << r.small << "," << r.large << "," << r.disks_opt << ","
                << r.recursive << "\n";
        }
    } else if (a.suite == "estimator") {
        // failure rate of the sampled sum at the prescribed draw count
        csv << "m,U,T,eps,draws,trials,failures\n";
        for (auto m : parse_sizes(a.sizes, {10000})) {
            const double U = 10, T = 1000, eps = 0.5;
            if (T / U > m) throw InputError("--sizes: m must be at least T/U = 100");
            std::vector<double> vals(m, 0.0);
            for (std::size_t i = 0; i < std::size_t(T / U); ++i) vals[i] = U;
            const auto r = halfspace::prescribed_draws(eps, m, U, T, m);
            Rng rng(mix_seed(seed, m));
            std::size_t fails = 0;
            for (std::uint32_t t = 0; t < a.count; ++t) {
                std::vector<double> d;
                for (auto i : sample_without_replacement(rng, m, std::uint32_t(r))) d.push_back(vals[i]);
                const auto e = halfspace::estimate_sum(d, m);
                fails += (e < (1 - eps) * T || e > (1 + eps) * T) ? 1 : 0;
            }
            csv << m << "," << U << "," << T << "," << eps << "," << r << "," << a.count << "," << fails << "\n";
        }
    } else {
        throw InputError("unknown suite \"" + a.suite + "\"");
    }
    write_out(a.out, csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geocover: dynamic geometric set cover"};
    app.require_subcommand(1);

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate an instance or an update stream");
    gen->add_option("--kind", ga.kind, "squares2d, disks2d or halfspaces3d");
    gen->add_option("--dist", ga.dist, "uniform, clustered, planted, nested or grid");
    gen->add_option("--points", ga.points);
    gen->add_option("--objects", ga.objects);
    gen->add_option("--planted", ga.planted, "planted optimum size");
    gen->add_option("--seed", ga.seed);
    gen->add_option("--stream", ga.stream_updates, "emit a stream with this many updates");
    gen->add_option("--solve-every", ga.solve_every);
    gen->add_option("-o,--out", ga.out);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "solve a static instance");
    solve->add_option("input", sa.input)->required();
    solve->add_option("--algo", sa.algo, "mwu, greedy, exact, static-recursive or auto");
    solve->add_option("--seed", sa.seed);
    solve->add_flag("--timing", sa.timing, "add wall_time to the report");
    solve->add_option("-o,--out", sa.out);

    StreamArgs st;
    auto* stream = app.add_subcommand("stream", "replay a JSON-lines update stream");
    stream->add_option("input", st.input)->required();
    stream->add_option("--mode", st.mode, "squares, disks or halfspaces");
    stream->add_option("--init", st.init, "initial instance file");
    stream->add_option("--seed", st.seed);
    stream->add_flag("--timing", st.timing);
    stream->add_option("-o,--out", st.out);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "check a cover");
    verify->add_option("input", va.input)->required();
    verify->add_option("solution", va.solution)->required();

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "benchmarks as CSV");
    bench->add_option("--suite", ba.suite, "scaling, ratio or estimator");
    bench->add_option("--sizes", ba.sizes, "comma separated sizes");
    bench->add_option("--count", ba.count, "instances or trials");
    bench->add_option("--seed", ba.seed);
    bench->add_option("-o,--out", ba.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*gen) return cmd_gen(ga);
        if (*solve) return cmd_solve(sa);
        if (*stream) return cmd_stream(st);
        if (*verify) return cmd_verify(va);
        if (*bench) return cmd_bench(ba);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ContractViolation& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const LookupError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const Anomaly& e) {
        std::cerr << "anomaly: " << e.what() << "\n";
        return kAnomaly;
    }
    return kOk;
}
