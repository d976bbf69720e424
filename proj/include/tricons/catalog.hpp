#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace tricons {

enum class Kind : uint8_t { Point = 0, Line = 1, Circle = 2, Angle = 3 };

constexpr int kNumKinds = 4;

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Point: return "point";
        case Kind::Line: return "line";
        case Kind::Circle: return "circle";
        case Kind::Angle: return "angle";
    }
    return "?";
}

/// Typed identifier of one catalog object: its kind plus the per-kind index.
struct ObjectId {
    Kind kind = Kind::Point;
    int index = 0;

    friend bool operator==(ObjectId a, ObjectId b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator!=(ObjectId a, ObjectId b) { return !(a == b); }
    friend bool operator<(ObjectId a, ObjectId b) {
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        return a.index < b.index;
    }
};

struct CatalogError : std::runtime_error {
    explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

/// The object universe: ordered per-kind name lists, each entry carrying the
/// tag of the analytic constructor that realizes it on a concrete triangle.
/// Constructor tags are a fixed vocabulary (see instantiate.hpp).
class Catalog {
public:
    struct Entry {
        std::string name;
        std::string ctor;
    };

    void add(Kind kind, std::string name, std::string ctor) {
        auto& v = entries_[static_cast<int>(kind)];
        if (by_name_.count(name))
            throw CatalogError("duplicate catalog object name: " + name);
        if (v.size() >= 64)
            throw CatalogError("catalog limit of 64 objects per kind exceeded");
        by_name_.emplace(name, ObjectId{kind, static_cast<int>(v.size())});
        v.push_back(Entry{std::move(name), std::move(ctor)});
    }

    const std::vector<Entry>& entries(Kind kind) const {
        return entries_[static_cast<int>(kind)];
    }
    int count(Kind kind) const { return static_cast<int>(entries(kind).size()); }

    const std::string& name(ObjectId id) const {
        return entries(id.kind).at(static_cast<size_t>(id.index)).name;
    }
    const std::string& ctor(ObjectId id) const {
        return entries(id.kind).at(static_cast<size_t>(id.index)).ctor;
    }

    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    ObjectId id(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw CatalogError("unknown catalog object: " + name);
        return it->second;
    }

    ObjectId point(const std::string& name) const { return typed_id(name, Kind::Point); }
    ObjectId line(const std::string& name) const { return typed_id(name, Kind::Line); }
    ObjectId circle(const std::string& name) const { return typed_id(name, Kind::Circle); }
    ObjectId angle(const std::string& name) const { return typed_id(name, Kind::Angle); }

private:
    ObjectId typed_id(const std::string& name, Kind kind) const {
        ObjectId oid = id(name);
        if (oid.kind != kind)
            throw CatalogError("object " + name + " is not a " + kind_name(kind));
        return oid;
    }

    std::vector<Entry> entries_[kNumKinds];
    std::map<std::string, ObjectId> by_name_;
};

/// The shipped default: the 16 Wernick points plus auxiliaries (nine-point
/// center, Euler points, circumcircle antipodes, arc midpoints), the classic
/// line families, four circles and the three interior angles.
inline Catalog default_catalog() {
    Catalog cat;
    const char* pts[][2] = {
        {"A", "vertex_a"},          {"B", "vertex_b"},          {"C", "vertex_c"},
        {"O", "circumcenter"},      {"I", "incenter"},          {"H", "orthocenter"},
        {"G", "centroid"},          {"Ha", "altitude_foot_a"},  {"Hb", "altitude_foot_b"},
        {"Hc", "altitude_foot_c"},  {"Ta", "bisector_foot_a"},  {"Tb", "bisector_foot_b"},
        {"Tc", "bisector_foot_c"},  {"Ma", "side_midpoint_a"},  {"Mb", "side_midpoint_b"},
        {"Mc", "side_midpoint_c"},  {"N", "nine_point_center"}, {"Ea", "euler_point_a"},
        {"Eb", "euler_point_b"},    {"Ec", "euler_point_c"},    {"Da", "antipode_a"},
        {"Db", "antipode_b"},       {"Dc", "antipode_c"},       {"Wa", "arc_midpoint_a"},
        {"Wb", "arc_midpoint_b"},   {"Wc", "arc_midpoint_c"},
    };
    for (auto& p : pts) cat.add(Kind::Point, p[0], p[1]);
    const char* lns[][2] = {
        {"a", "side_a"},          {"b", "side_b"},          {"c", "side_c"},
        {"ma", "median_a"},       {"mb", "median_b"},       {"mc", "median_c"},
        {"ha", "altitude_a"},     {"hb", "altitude_b"},     {"hc", "altitude_c"},
        {"ta", "bisector_a"},     {"tb", "bisector_b"},     {"tc", "bisector_c"},
        {"pa", "side_bisector_a"},{"pb", "side_bisector_b"},{"pc", "side_bisector_c"},
        {"euler", "euler_line"},
    };
    for (auto& l : lns) cat.add(Kind::Line, l[0], l[1]);
    cat.add(Kind::Circle, "circumcircle", "circumcircle");
    cat.add(Kind::Circle, "incircle", "incircle");
    cat.add(Kind::Circle, "nine_point_circle", "nine_point_circle");
    cat.add(Kind::Circle, "bic", "circle_bic_a");
    cat.add(Kind::Angle, "alpha", "angle_a");
    cat.add(Kind::Angle, "beta", "angle_b");
    cat.add(Kind::Angle, "gamma", "angle_c");
    return cat;
}

namespace detail {
inline const char* kind_key(Kind k) {
    switch (k) {
        case Kind::Point: return "points";
        case Kind::Line: return "lines";
        case Kind::Circle: return "circles";
        case Kind::Angle: return "angles";
    }
    return "?";
}
} // namespace detail

inline nlohmann::ordered_json catalog_to_json(const Catalog& cat) {
    nlohmann::ordered_json j;
    for (int k = 0; k < kNumKinds; ++k) {
        auto kind = static_cast<Kind>(k);
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : cat.entries(kind))
            arr.push_back({{"name", e.name}, {"ctor", e.ctor}});
        j[detail::kind_key(kind)] = std::move(arr);
    }
    return j;
}

inline Catalog catalog_from_json(const nlohmann::json& j) {
    Catalog cat;
    for (int k = 0; k < kNumKinds; ++k) {
        auto kind = static_cast<Kind>(k);
        const char* key = detail::kind_key(kind);
        if (!j.contains(key)) throw CatalogError(std::string("catalog file missing key ") + key);
        for (const auto& e : j.at(key)) {
            cat.add(kind, e.at("name").get<std::string>(), e.at("ctor").get<std::string>());
        }
    }
    static const char* required[] = {"A", "B", "C", "O", "I", "H", "G", "Ha", "Hb", "Hc",
                                     "Ta", "Tb", "Tc", "Ma", "Mb", "Mc"};
    for (const char* r : required) {
        if (!cat.has(r) || cat.id(r).kind != Kind::Point)
            throw CatalogError(std::string("catalog must contain point ") + r);
    }
    return cat;
}

} // namespace tricons
