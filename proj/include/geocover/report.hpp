#pragma once

#include <geocover/error.hpp>
#include <geocover/halfspace/static_recursive.hpp>
#include <geocover/io.hpp>
#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/verify.hpp>
#include <geocover/squares/engine.hpp>
#include <geocover/static_solver.hpp>

#include <chrono>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace geocover::report {

using io::Json;

struct Options {
    std::uint64_t seed = 1;
    bool timing = false;  // wall_time makes rows differ between runs
    std::uint64_t exact_budget = 10'000'000;
};

inline std::optional<std::string> algo_check(const std::string& algo) {
    for (const char* a : {"mwu", "greedy", "exact", "static-recursive", "auto"})
        if (algo == a) return std::nullopt;
    return "unknown algo \"" + algo + "\"";
}

namespace detail {

template <class Inst>
void verified(const Inst& inst, const std::vector<std::uint32_t>& cover) {
    const auto v = oracle::verify_cover(inst, std::span<const std::uint32_t>(cover));
    GEOCOVER_CHECK(v.ok, "emitted cover misses point " + std::to_string(v.uncovered.value_or(0)));
}

inline void put_cover(Json& row, const std::vector<std::uint32_t>& cover) {
    row["status"] = "cover";
    row["solution_size"] = cover.size();
    row["cover"] = cover;
}

inline void put_infeasible(Json& row, std::optional<std::uint32_t> witness) {
    row["status"] = "infeasible";
    row["solution_size"] = nullptr;
    if (witness) row["witness"] = *witness;
}

inline void put_mwu(Json& row, const MwuStats& s) {
    row["guess_t"] = s.t;
    row["rounds"] = s.rounds;
    row["doubling_steps"] = s.doubling_steps;
}

inline Json tree_stats(const halfspace::HalfspaceStats& s) {
    Json j;
    j["registrations"] = s.registrations;
    j["crossings"] = s.crossed_total;
    j["max_crossings"] = s.max_crossed;
    j["dual_registrations"] = s.dual_registrations;
    j["dual_crossings"] = s.dual_crossed_total;
    return j;
}

inline Json estimate_stats(const halfspace::EstimateResult& e) {
    Json j;
    j["sample"] = e.stats.sample;
    j["cells"] = e.stats.cells;
    j["boundary"] = e.stats.boundary_cells;
    j["overhead"] = e.overhead;
    j["clusters"] = e.clusters;
    j["draws"] = e.draws;
    j["cap"] = e.cap;
    j["max_conflict"] = e.stats.max_conflict;
    j["residual_estimate"] = e.residual;
    return j;
}

inline Json recursive_stats(const halfspace::RecursiveStats& s) {
    Json j;
    j["depth"] = s.max_depth;
    j["nodes"] = s.nodes;
    j["base_cases"] = s.base_cases;
    j["case1"] = s.case1;
    j["case2"] = s.case2;
    return j;
}

inline void put_dispatch3d(Json& row, const halfspace::DispatchResult& r) {
    row["path"] = r.path;
    switch (r.kind) {
        case halfspace::DispatchResult::Kind::cover: put_cover(row, r.cover); break;
        case halfspace::DispatchResult::Kind::infeasible: put_infeasible(row, r.witness); break;
        case halfspace::DispatchResult::Kind::value:
            row["status"] = "value";
            row["value"] = r.value;
            break;
    }
    row["guess_t"] = r.guess_t;
    row["rounds"] = r.rounds;
    row["doubling_steps"] = r.doubling_steps;
    Json st;
    st["tree"] = tree_stats(r.tree_stats);
    if (r.estimate) st["estimate"] = estimate_stats(*r.estimate);
    if (r.path == "medium") st["recursive"] = recursive_stats(r.recursive_stats);
    row["structure_stats"] = st;
}

inline void put_squares(Json& row, const squares::DispatchResult& r) {
    row["path"] = squares::path_name(r.path);
    if (r.feasible)
        put_cover(row, r.cover);
    else
        put_infeasible(row, r.witness);
    put_mwu(row, r.mwu);
    row["guess_t"] = r.guess_t;
    Json st;
    st["leaves_used"] = r.leaves_used;
    st["canonical_rects"] = r.canonical_rects;
    st["net_attempts"] = r.mwu.net_attempts;
    st["net_repairs"] = r.mwu.net_repairs;
    row["structure_stats"] = st;
}

template <class Inst>
void solve_into(Json& row, const Inst& inst, const std::string& algo, const Options& opt) {
    StaticConfig cfg;
    cfg.seed = opt.seed;
    constexpr Kind kind = Inst::kind_type::kind;
    if (algo == "greedy") {
        const auto g = greedy_cover(inst);
        if (g) {
            verified(inst, *g);
            put_cover(row, *g);
        } else {
            put_infeasible(row, oracle::uncoverable_point(inst));
        }
        return;
    }
    if (algo == "exact") {
        const auto e = oracle::exact_opt(inst, opt.exact_budget);
        GEOCOVER_CHECK(!e.timed_out, "exact search exceeded its node budget");
        if (!e.feasible) {
            put_infeasible(row, oracle::uncoverable_point(inst));
        } else {
            verified(inst, e.witness);
            put_cover(row, e.witness);
        }
        row["structure_stats"] = Json{{"explored_nodes", e.explored_nodes}};
        return;
    }
    if (algo == "mwu" || (algo == "static-recursive" && kind == Kind::squares2d)) {
        const auto out = static_mwu_cover(inst, cfg);
        if (out.is_cover()) {
            verified(inst, out.cover);
            put_cover(row, out.cover);
        } else {
            put_infeasible(row, out.witness);
        }
        put_mwu(row, out.stats);
        return;
    }
    if (algo == "static-recursive") {
        if constexpr (kind != Kind::squares2d) {
            halfspace::RecursiveStats st;
            const auto out = halfspace::static_recursive_cover(inst, cfg, &st);
            if (out.is_cover()) {
                verified(inst, out.cover);
                put_cover(row, out.cover);
            } else {
                put_infeasible(row, out.witness);
            }
            row["structure_stats"] = recursive_stats(st);
        }
        return;
    }
    // auto
    if constexpr (kind == Kind::squares2d) {
        squares::SquaresEngine eng(inst, opt.seed);
        const auto r = eng.solve();
        if (r.feasible) verified(inst, r.cover);
        put_squares(row, r);
    } else {
        HalfspacesInstance lifted;
        if constexpr (kind == Kind::disks2d)
            lifted = lift_instance(inst);
        else
            lifted = inst;
        halfspace::HalfspaceIndex idx(lifted);
        halfspace::DispatchConfig dc;
        dc.seed = opt.seed;
        const auto r = halfspace::dispatch_solve_3d(idx, dc);
        if (r.kind == halfspace::DispatchResult::Kind::cover) verified(inst, r.cover);
        put_dispatch3d(row, r);
    }
}

}  // namespace detail

/// One report row for a static solve.
inline Json solve(const oracle::AnyInstance& any, const std::string& algo, const Options& opt) {
    if (auto bad = algo_check(algo)) throw InputError(*bad);
    Json row;
    row["command"] = "solve";
    row["algo"] = algo;
    const auto t0 = std::chrono::steady_clock::now();
    std::visit(
        [&](const auto& inst) {
            row["kind"] = kind_name(std::decay_t<decltype(inst)>::kind_type::kind);
            row["n_points"] = inst.points.size();
            row["n_objects"] = inst.objects.size();
            detail::solve_into(row, inst, algo, opt);
        },
        any);
    if (opt.timing) row["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row["seed"] = opt.seed;
    return row;
}

// ---------------------------------------------------------------- streams

enum class Mode { squares, disks, halfspaces };

inline std::optional<Mode> parse_mode(std::string_view s) {
    if (s == "squares") return Mode::squares;
    if (s == "disks") return Mode::disks;
    if (s == "halfspaces") return Mode::halfspaces;
    return std::nullopt;
}

inline std::size_t point_arity(Mode m) { return m == Mode::halfspaces ? 3 : 2; }

/// Replays a stream, emitting one row per solve or estimate record.
/// Returns the number of rows.
inline std::size_t run_stream(std::istream& in, Mode mode, const Options& opt, const std::function<void(const Json&)>& emit,
                              const std::string& where = "stream", const oracle::AnyInstance* init = nullptr) {
    io::StreamReader reader(in, point_arity(mode), where);
    squares::SquaresEngine sq(opt.seed);
    halfspace::HalfspaceIndex hs;
    if (init) {
        // initial contents take ids 0.. in file order
        if (const auto* s = std::get_if<SquaresInstance>(init); s && mode == Mode::squares)
            sq = squares::SquaresEngine(*s, opt.seed);
        else if (const auto* d = std::get_if<DisksInstance>(init); d && mode == Mode::disks)
            hs = halfspace::HalfspaceIndex(lift_instance(*d));
        else if (const auto* h = std::get_if<HalfspacesInstance>(init); h && mode == Mode::halfspaces)
            hs = halfspace::HalfspaceIndex(*h);
        else
            throw InputError(where + ": initial instance kind does not match the stream mode");
    }
    std::optional<double> hint;
    std::size_t rows = 0, updates = 0;
    auto fail = [&](const std::string& msg) {
        throw InputError(where + ":" + std::to_string(reader.line()) + ": " + msg);
    };
    auto checked_id = [&](std::uint64_t id) {
        if (id > 0xffffffffu) fail("id out of range");
        return std::uint32_t(id);
    };
    while (auto op = reader.next()) {
        try {
            switch (op->type) {
                case io::StreamOp::Type::insert_point:
                    if (mode == Mode::squares) sq.insert_point(io::decode_point2(op->data));
                    else if (mode == Mode::disks) hs.insert_point(lift_point(io::decode_point2(op->data)));
                    else hs.insert_point(io::decode_point3(op->data));
                    ++updates;
                    continue;
                case io::StreamOp::Type::insert_object:
                    if (mode == Mode::squares) sq.insert_object(io::decode_square(op->data));
                    else if (mode == Mode::disks) hs.insert_object(lift_disk(io::decode_disk(op->data)));
                    else hs.insert_object(io::decode_halfspace(op->data));
                    ++updates;
                    continue;
                case io::StreamOp::Type::delete_point:
                    if (mode == Mode::squares) sq.erase_point(checked_id(op->id));
                    else hs.erase_point(checked_id(op->id));
                    ++updates;
                    continue;
                case io::StreamOp::Type::delete_object:
                    if (mode == Mode::squares) sq.erase_object(checked_id(op->id));
                    else hs.erase_object(checked_id(op->id));
                    ++updates;
                    continue;
                default: break;
            }
        } catch (const LookupError& e) {
            fail(e.what());
        } catch (const ContractViolation& e) {
            fail(e.what());
        }

        Json row;
        row["command"] = "stream";
        row["checkpoint"] = rows;
        row["line"] = reader.line();
        row["op"] = io::op_name(op->type);
        row["updates"] = updates;
        const auto t0 = std::chrono::steady_clock::now();
        if (mode == Mode::squares) {
            row["n_points"] = sq.index().n_points();
            row["n_objects"] = sq.index().n_objects();
            std::vector<std::uint32_t> pid, oid;
            const auto snap = sq.index().snapshot(&pid, &oid);
            const auto r = op->type == io::StreamOp::Type::solve ? sq.solve() : sq.solve_large();
            if (r.feasible) {
                std::vector<std::uint32_t> local;
                for (auto o : r.cover) local.push_back(std::uint32_t(std::lower_bound(oid.begin(), oid.end(), o) - oid.begin()));
                detail::verified(snap, local);
            }
            detail::put_squares(row, r);
            if (op->type == io::StreamOp::Type::estimate && r.feasible) {
                row["status"] = "value";
                row["value"] = r.cover.size();
                row.erase("cover");
                row.erase("solution_size");
            }
        } else {
            row["n_points"] = hs.n_points();
            row["n_objects"] = hs.n_objects();
            std::vector<std::uint32_t> pid, oid;
            const auto snap = hs.snapshot(&pid, &oid);
            if (op->type == io::StreamOp::Type::solve) {
                halfspace::DispatchConfig dc;
                dc.seed = opt.seed;
                dc.t_hint = hint;
                const auto r = halfspace::dispatch_solve_3d(hs, dc);
                if (r.kind == halfspace::DispatchResult::Kind::cover) {
                    std::vector<std::uint32_t> local;
                    for (auto o : r.cover) local.push_back(std::uint32_t(std::lower_bound(oid.begin(), oid.end(), o) - oid.begin()));
                    detail::verified(snap, local);
                }
                if (r.estimate && r.estimate->residual > 0) hint = r.estimate->residual / 2;
                detail::put_dispatch3d(row, r);
            } else {
                const double n = double(snap.points.size() + snap.objects.size());
                const auto b = std::max<std::uint32_t>(2, std::uint32_t(std::lround(std::pow(std::max(n, 2.0), 3.0 / 13.0))));
                halfspace::EstimateConfig ec;
                ec.b = b;
                ec.g = std::size_t(b) * b;
                ec.t_hint = hint;
                ec.seed = opt.seed;
                if (snap.objects.empty() && !snap.points.empty()) {
                    detail::put_infeasible(row, pid[0]);
                } else {
                    const auto e = halfspace::large_opt_estimate(snap.points, snap.objects, ec);
                    if (e.uncoverable) {
                        detail::put_infeasible(row, pid[*e.uncoverable]);
                    } else {
                        row["status"] = "value";
                        row["value"] = e.value;
                        if (e.residual > 0) hint = e.residual / 2;
                    }
                    row["structure_stats"] = Json{{"estimate", detail::estimate_stats(e)}};
                }
            }
        }
        if (opt.timing) row["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row["seed"] = opt.seed;
        emit(row);
        ++rows;
    }
    return rows;
}

}  // namespace geocover::report
