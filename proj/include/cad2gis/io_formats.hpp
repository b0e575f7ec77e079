#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cad2gis/cad_clean.hpp"
#include "cad2gis/cad_model.hpp"
#include "cad2gis/convert.hpp"
#include "cad2gis/georef.hpp"
#include "cad2gis/gis_clean.hpp"

namespace cad2gis {

// ---------------------------------------------------------------------------
// GeoJSON

inline constexpr int kOutputDigits = 9;

// Rounds every coordinate to `digits` fractional digits so that the GeoJSON text and the raw
// doubles written to shapefiles describe the same values.
void quantize_coordinates(FeatureSet& features, int digits = kOutputDigits);

// Attributes as written to every output: the feature's own map plus "unclosed_ring" for
// ring candidates that were never closed.
AttributeMap export_attributes(const Feature& feature);

// One RFC 7946 FeatureCollection holding the features of `klass`, in id order, with
// "epsg" and "feature_class" foreign members. Throws GeometryError if not georeferenced.
std::string write_geojson(const FeatureSet& features, FeatureClass klass);

// Reads a collection written by write_geojson (or a structurally equivalent one).
// Throws ValidationError on malformed input.
FeatureSet read_geojson(std::string_view text);

// ---------------------------------------------------------------------------
// ESRI shapefile (2D, single-part, outer rings only)

enum class ShapeType : std::int32_t { Null = 0, Point = 1, PolyLine = 3, Polygon = 5 };

ShapeType shape_type_for(FeatureClass klass);

struct ShapefileBytes {
  std::vector<std::uint8_t> shp;
  std::vector<std::uint8_t> shx;
  std::vector<std::uint8_t> dbf;
  std::string prj;
  std::map<std::string, std::string> field_names;  // attribute key -> DBF field name
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDbfStringWidth = 254;

// Throws GeometryError when the set holds a class other than `klass` or is not georeferenced.
ShapefileBytes write_shapefile(const FeatureSet& features, FeatureClass klass);

// ---------------------------------------------------------------------------
// QA report

struct ConservationLedger {
  std::size_t total = 0;
  std::size_t converted = 0;
  std::size_t dropped = 0;
  std::size_t merged = 0;  // absorbed by gap bridging or removed as duplicates
  std::size_t unsupported = 0;

  bool balanced() const { return total == converted + dropped + merged + unsupported; }
};

struct GeorefSection {
  bool performed = false;
  TransformModel model = TransformModel::Similarity;
  std::optional<GeoTransform> transform;
  ResidualReport<double> residuals;
  std::vector<std::string> pair_labels;
  std::optional<double> max_residual;
  std::vector<std::size_t> flagged_pairs;  // 0-based pair indices over max_residual
  Crs crs;
};

struct QaReport {
  std::string source;
  LayerInventory inventory;
  std::size_t discarded_z_values = 0;
  std::vector<std::string> unmapped_layers;
  std::vector<std::string> skipped_passes;
  std::vector<CleanFix> fixes;
  ConversionCounts conversion;
  std::vector<std::string> conversion_warnings;
  GeorefSection georef;
  TopologyReport topology;
  std::map<std::string, std::map<std::string, std::string>> dbf_fields;  // class -> key -> field
  std::vector<std::string> output_warnings;
  ConservationLedger ledger;

  std::size_t count_fixes(FixKind kind) const;
  std::size_t collapsed() const { return conversion.circles_collapsed + topology.collapsed_polygons; }
};

// Stable-key-ordered JSON, "report_version":"1".
std::string write_report(const QaReport& report);

}  // namespace cad2gis
