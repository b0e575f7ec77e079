#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cad2gis/cad_model.hpp"
#include "cad2gis/geometry.hpp"
#include "cad2gis/profile.hpp"

namespace cad2gis {

enum class FeatureClass { Point, Line, Polygon, Annotation };

inline constexpr std::array<FeatureClass, 4> kFeatureClasses = {
    FeatureClass::Point, FeatureClass::Line, FeatureClass::Polygon, FeatureClass::Annotation};

std::string_view to_string(FeatureClass klass);

struct PointGeometry {
  Point2 position;
  bool operator==(const PointGeometry&) const = default;
};

struct LineStringGeometry {
  std::vector<Point2> vertices;  // >= 2
  bool operator==(const LineStringGeometry&) const = default;
};

struct PolygonGeometry {
  std::vector<Point2> ring;  // outer ring, first == last, >= 4 vertices
  bool operator==(const PolygonGeometry&) const = default;
};

using FeatureGeometry = std::variant<PointGeometry, LineStringGeometry, PolygonGeometry>;

using FeatureId = std::uint64_t;
using AttributeMap = std::map<std::string, std::string>;

struct Feature {
  FeatureId id = 0;
  FeatureClass klass = FeatureClass::Line;
  FeatureGeometry geometry;
  AttributeMap attributes;  // always has "layer" and "handle"
  // Open linework from a polygon-producing rule; ring closure looks for these.
  bool ring_candidate = false;

  bool operator==(const Feature&) const = default;
};

struct FeatureSet {
  std::vector<Feature> features;
  std::optional<Crs> crs;  // present iff georeferenced
  bool georeferenced = false;

  bool operator==(const FeatureSet&) const = default;
};

struct ConversionCounts {
  std::array<std::size_t, 4> by_class{};
  std::size_t circles_collapsed = 0;  // circles/arcs emitted directly as points
  std::size_t reference_features = 0;
  std::size_t unsupported_skipped = 0;
  std::size_t ring_candidates = 0;

  std::size_t converted() const;
};

struct ConversionResult {
  FeatureSet features;
  FeatureSet reference;  // reference-only layers, kept for georeferencing checks only
  ConversionCounts counts;
  std::vector<std::string> warnings;
};

// Sets attrs[key] = value; on collision tries key_2, key_3, ... Returns the key used.
std::string add_attribute(AttributeMap& attrs, const std::string& key, std::string value);

// Fixed-point decimal with `digits` fractional digits; never prints "-0.000...".
std::string format_fixed(double value, int digits = 9);

// Vertices along a counter-clockwise arc (degrees), equally spaced in angle, with maximum
// sagitta <= chord_tol. At least 2 segments per arc and 8 per full circle; a full circle
// returns a closed ring. Throws GeometryError for zero sweep or non-positive radius/tolerance.
std::vector<Point2> tessellate_arc(const Point2& center, double radius, double start_deg,
                                   double sweep_deg, double chord_tol);
std::vector<Point2> tessellate_arc(const ArcGeom& arc, double chord_tol);
std::vector<Point2> tessellate_arc(const CircleGeom& circle, double chord_tol);

// One feature per supported entity, in entity order. Unsupported entities are skipped and counted.
ConversionResult convert_document(const CadDocument& doc, const ConversionProfile& profile);

// Visits every coordinate of a feature geometry.
template <typename F>
void for_each_vertex(FeatureGeometry& g, F&& f) {
  std::visit(
      [&](auto& geom) {
        using G = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<G, PointGeometry>) {
          f(geom.position);
        } else if constexpr (std::is_same_v<G, LineStringGeometry>) {
          for (auto& v : geom.vertices) f(v);
        } else {
          for (auto& v : geom.ring) f(v);
        }
      },
      g);
}

}  // namespace cad2gis
