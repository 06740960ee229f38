#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/oracle/generators.hpp>

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace geocover::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- helpers

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline Json parse_json(std::string_view text, const std::string& where) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw InputError(where + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                         e.what() + ")");
    }
}

inline std::optional<Kind> parse_kind(std::string_view s) {
    if (s == "squares2d") return Kind::squares2d;
    if (s == "disks2d") return Kind::disks2d;
    if (s == "halfspaces3d") return Kind::halfspaces3d;
    return std::nullopt;
}

inline std::vector<Coord> int_row(const Json& row, std::size_t arity, const std::string& where) {
    if (!row.is_array() || row.size() != arity)
        throw InputError(where + ": expected an array of " + std::to_string(arity) + " integers");
    std::vector<Coord> out;
    for (const auto& v : row) {
        if (!v.is_number_integer()) throw InputError(where + ": expected an integer, got " + v.dump());
        out.push_back(v.get<Coord>());
    }
    return out;
}

inline Point2 decode_point2(const std::vector<Coord>& v) { return {v[0], v[1]}; }
inline Point3 decode_point3(const std::vector<Coord>& v) { return {v[0], v[1], v[2]}; }
inline Square decode_square(const std::vector<Coord>& v) { return {v[0], v[1], v[2]}; }
inline Disk decode_disk(const std::vector<Coord>& v) { return {v[0], v[1], v[2]}; }
inline Halfspace3 decode_halfspace(const std::vector<Coord>& v) { return {v[0], v[1], v[2]}; }

template <class Inst>
struct Codec;
template <>
struct Codec<SquaresInstance> {
    static constexpr std::size_t point_arity = 2;
    static Point2 point(const std::vector<Coord>& v) { return decode_point2(v); }
    static Square object(const std::vector<Coord>& v) { return decode_square(v); }
};
template <>
struct Codec<DisksInstance> {
    static constexpr std::size_t point_arity = 2;
    static Point2 point(const std::vector<Coord>& v) { return decode_point2(v); }
    static Disk object(const std::vector<Coord>& v) { return decode_disk(v); }
};
template <>
struct Codec<HalfspacesInstance> {
    static constexpr std::size_t point_arity = 3;
    static Point3 point(const std::vector<Coord>& v) { return decode_point3(v); }
    static Halfspace3 object(const std::vector<Coord>& v) { return decode_halfspace(v); }
};

template <class T>
void checked(const T& v, const std::string& where) {
    try {
        validate(v);
    } catch (const ContractViolation& e) {
        throw InputError(where + ": " + e.what());
    }
}

// ---------------------------------------------------------------- instances

template <class Inst>
Inst decode_instance(const Json& doc, const std::string& where) {
    using C = Codec<Inst>;
    Inst inst;
    for (const char* key : {"points", "objects"})
        if (!doc.contains(key) || !doc[key].is_array()) throw InputError(where + ": missing array \"" + key + "\"");
    const auto& P = doc["points"];
    const auto& O = doc["objects"];
    for (std::size_t i = 0; i < P.size(); ++i) {
        const auto at = where + ": points[" + std::to_string(i) + "]";
        inst.points.push_back(C::point(int_row(P[i], C::point_arity, at)));
        checked(inst.points.back(), at);
    }
    for (std::size_t i = 0; i < O.size(); ++i) {
        const auto at = where + ": objects[" + std::to_string(i) + "]";
        inst.objects.push_back(C::object(int_row(O[i], 3, at)));
        checked(inst.objects.back(), at);
    }
    return inst;
}

inline oracle::AnyInstance parse_instance(std::string_view text, const std::string& where = "instance") {
    const auto doc = parse_json(text, where);
    if (!doc.is_object()) throw InputError(where + ": top level must be an object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw InputError(where + ": missing string \"kind\"");
    const auto kind = parse_kind(doc["kind"].get<std::string>());
    if (!kind) throw InputError(where + ": unknown kind \"" + doc["kind"].get<std::string>() + "\"");
    switch (*kind) {
        case Kind::squares2d: return decode_instance<SquaresInstance>(doc, where);
        case Kind::disks2d: return decode_instance<DisksInstance>(doc, where);
        case Kind::halfspaces3d: return decode_instance<HalfspacesInstance>(doc, where);
    }
    return {};
}

inline std::string row_text(const std::vector<Coord>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

/// One element per line, keys in a fixed order.
inline std::string dump_instance(const oracle::AnyInstance& any) {
    std::string out;
    std::visit(
        [&](const auto& inst) {
            out += "{\"kind\":\"";
            out += kind_name(std::decay_t<decltype(inst)>::kind_type::kind);
            out += "\",\n\"points\":[";
            for (std::size_t i = 0; i < inst.points.size(); ++i)
                out += (i ? ",\n" : "\n") + row_text(oracle::gen_detail::encode(inst.points[i]));
            out += "],\n\"objects\":[";
            for (std::size_t i = 0; i < inst.objects.size(); ++i)
                out += (i ? ",\n" : "\n") + row_text(oracle::gen_detail::encode(inst.objects[i]));
            out += "]}\n";
        },
        any);
    return out;
}

// ---------------------------------------------------------------- streams

using oracle::StreamOp;

inline const char* op_name(StreamOp::Type t) {
    switch (t) {
        case StreamOp::Type::insert_point: return "insert_point";
        case StreamOp::Type::delete_point: return "delete_point";
        case StreamOp::Type::insert_object: return "insert_object";
        case StreamOp::Type::delete_object: return "delete_object";
        case StreamOp::Type::solve: return "solve";
        case StreamOp::Type::estimate: return "estimate";
    }
    return "?";
}

inline std::string dump_op(const StreamOp& op) {
    std::string s = "{\"op\":\"";
    s += op_name(op.type);
    s += "\"";
    if (op.type == StreamOp::Type::insert_point || op.type == StreamOp::Type::insert_object)
        s += ",\"data\":" + row_text(op.data);
    if (op.type == StreamOp::Type::delete_point || op.type == StreamOp::Type::delete_object)
        s += ",\"id\":" + std::to_string(op.id);
    return s + "}";
}

/// Parses one stream line; `arity` is the point arity of the stream's kind.
inline std::optional<StreamOp> parse_op(std::string_view line, std::size_t line_no, std::size_t arity,
                                        const std::string& where = "stream") {
    const auto at = where + ":" + std::to_string(line_no);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return std::nullopt;
    Json doc;
    try {
        doc = Json::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(at + ":" + std::to_string(e.byte) + ": malformed JSON (" + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("op") || !doc["op"].is_string())
        throw InputError(at + ": expected an object with a string \"op\"");
    const auto name = doc["op"].get<std::string>();
    StreamOp op;
    auto need_id = [&] {
        if (!doc.contains("id") || !doc["id"].is_number_unsigned()) throw InputError(at + ": missing id");
        op.id = doc["id"].get<std::uint64_t>();
    };
    auto need_data = [&](std::size_t k) {
        if (!doc.contains("data")) throw InputError(at + ": missing data");
        op.data = int_row(doc["data"], k, at);
    };
    if (name == "insert_point") {
        op.type = StreamOp::Type::insert_point;
        need_data(arity);
    } else if (name == "delete_point") {
        op.type = StreamOp::Type::delete_point;
        need_id();
    } else if (name == "insert_object") {
        op.type = StreamOp::Type::insert_object;
        need_data(3);
    } else if (name == "delete_object") {
        op.type = StreamOp::Type::delete_object;
        need_id();
    } else if (name == "solve") {
        op.type = StreamOp::Type::solve;
    } else if (name == "estimate") {
        op.type = StreamOp::Type::estimate;
    } else {
        throw InputError(at + ": unknown op \"" + name + "\"");
    }
    return op;
}

/// Reads a JSON-lines stream one record at a time.
class StreamReader {
public:
    StreamReader(std::istream& in, std::size_t arity, std::string where = "stream")
        : in_(&in), arity_(arity), where_(std::move(where)) {}

    std::optional<StreamOp> next() {
        std::string line;
        while (std::getline(*in_, line)) {
            ++line_no_;
            if (auto op = parse_op(line, line_no_, arity_, where_)) return op;
        }
        return std::nullopt;
    }
    std::size_t line() const noexcept { return line_no_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::istream* in_;
    std::size_t arity_;
    std::string where_;
    std::size_t line_no_ = 0;
};

inline std::string dump_stream(const oracle::GeneratedStream& s) {
    std::string out;
    for (const auto& op : s.ops) out += dump_op(op) + "\n";
    return out;
}

// ---------------------------------------------------------------- solutions

/// A solution file is a JSON object with a "cover" array of object ids, or
/// a bare array.
inline std::vector<std::uint32_t> parse_solution(std::string_view text, const std::string& where = "solution") {
    const auto doc = parse_json(text, where);
    const Json* arr = &doc;
    if (doc.is_object()) {
        if (!doc.contains("cover")) throw InputError(where + ": missing \"cover\"");
        arr = &doc["cover"];
    }
    if (!arr->is_array()) throw InputError(where + ": cover must be an array");
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto& v = (*arr)[i];
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xffffffffu)
            throw InputError(where + ": cover[" + std::to_string(i) + "] is not an object id");
        out.push_back(v.get<std::uint32_t>());
    }
    return out;
}

}  // namespace geocover::io
