#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cad2gis {

enum class LayerAction { Drop, Point, Line, Polygon, Annotation, ReferenceOnly };

std::string_view to_string(LayerAction action);

enum class Collapse { None, Centroid };

enum class TransformModel { Similarity, Affine };

std::string_view to_string(TransformModel model);

struct LayerRule {
  std::string match;  // glob over layer names: '*' and '?', case-sensitive
  LayerAction action = LayerAction::Drop;
  Collapse collapse = Collapse::None;
  std::map<std::string, std::string> attributes;

  bool operator==(const LayerRule&) const = default;
};

// Drawing-unit tolerances apply before georeferencing, CRS-unit tolerances after.
struct Tolerances {
  double gap_bridge = 2.0;         // drawing units
  double lateral_offset = 0.1;     // drawing units
  double snap = 0.05;              // CRS units
  double ring_close = 0.05;        // CRS units
  double annotation_attach = 2.0;  // CRS units
  double arc_chord = 0.05;         // drawing units, > 0
  double dangle = 0.05;            // CRS units

  bool operator==(const Tolerances&) const = default;
};

struct Crs {
  int epsg = 0;
  std::optional<std::string> wkt;

  bool operator==(const Crs&) const = default;
};

struct ConversionProfile {
  std::vector<LayerRule> rules;  // first match wins
  Tolerances tolerances;
  Crs crs;
  TransformModel transform_model = TransformModel::Similarity;

  bool operator==(const ConversionProfile&) const = default;
};

// Glob match supporting '*' (any run) and '?' (any single byte).
bool glob_match(std::string_view pattern, std::string_view text);

// Parses and validates a JSON profile. Unknown keys are rejected; throws ValidationError
// naming the offending field.
ConversionProfile load_profile(std::string_view json_text);

// Canonical JSON form; load_profile(serialize_profile(p)) == p.
std::string serialize_profile(const ConversionProfile& profile);

// First rule whose pattern matches the layer, or nullptr.
const LayerRule* match_rule(const ConversionProfile& profile, std::string_view layer);

// Action of the first matching rule; unmapped layers drop.
LayerAction classify_layer(const ConversionProfile& profile, std::string_view layer);

}  // namespace cad2gis
