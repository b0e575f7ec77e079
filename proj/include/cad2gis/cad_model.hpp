#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cad2gis/geometry.hpp"

namespace cad2gis {

enum class EntityKind { Line, Polyline, Circle, Arc, Text, Unsupported };

inline constexpr std::size_t kEntityKindCount = 6;

std::string_view to_string(EntityKind kind);

struct LineGeom {
  Point2 start;
  Point2 end;
  bool operator==(const LineGeom&) const = default;
};

struct PolylineGeom {
  std::vector<Point2> vertices;
  bool closed = false;
  bool operator==(const PolylineGeom&) const = default;
};

struct CircleGeom {
  Point2 center;
  double radius = 0.0;
  bool operator==(const CircleGeom&) const = default;
};

// Angles in degrees, counter-clockwise from start to end.
struct ArcGeom {
  Point2 center;
  double radius = 0.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
  bool operator==(const ArcGeom&) const = default;
};

struct TextGeom {
  Point2 insert;
  std::string content;
  bool operator==(const TextGeom&) const = default;
};

struct UnsupportedGeom {
  std::string type_name;
  std::string reason;
  bool operator==(const UnsupportedGeom&) const = default;
};

// Alternative order matches EntityKind.
using EntityGeometry =
    std::variant<LineGeom, PolylineGeom, CircleGeom, ArcGeom, TextGeom, UnsupportedGeom>;

struct CadEntity {
  std::string handle;
  std::string layer;
  EntityGeometry geometry;
  // Set by drop_irrelevant for layers whose rule is reference-only.
  bool reference_only = false;

  EntityKind kind() const { return static_cast<EntityKind>(geometry.index()); }
  bool operator==(const CadEntity&) const = default;
};

struct CadDocument {
  std::string source_name;
  std::vector<CadEntity> entities;  // source order
  std::size_t discarded_z_values = 0;

  std::set<std::string> layers() const;
  bool operator==(const CadDocument&) const = default;
};

struct KindCounts {
  std::array<std::size_t, kEntityKindCount> by_kind{};

  std::size_t& operator[](EntityKind k) { return by_kind[static_cast<std::size_t>(k)]; }
  std::size_t operator[](EntityKind k) const { return by_kind[static_cast<std::size_t>(k)]; }
  std::size_t total() const;
};

struct LayerInventory {
  std::map<std::string, KindCounts> layers;  // lexicographic layer order
  std::map<std::string, Box2> layer_bboxes;  // layers with at least one coordinate
  std::optional<Box2> bbox;                  // nullopt when nothing has coordinates
  std::map<std::string, std::size_t> unsupported_types;
  std::size_t unsupported_total = 0;
  std::size_t entity_total = 0;
};

// Counter-clockwise sweep from start to end in (0, 360]; 0 only when start == end.
double arc_sweep_degrees(double start_angle, double end_angle);

// Parses ASCII DXF. Throws ParseError (bad group pairing, bad numbers) or
// StructuralError (binary DXF, missing ENTITIES section).
CadDocument parse_dxf(std::string_view text, std::string source_name = {});

LayerInventory inventory(const CadDocument& doc);

}  // namespace cad2gis
