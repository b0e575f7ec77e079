#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cad2gis/error.hpp"
#include "cad2gis/io_formats.hpp"

namespace cad2gis {

void quantize_coordinates(FeatureSet& features, int digits) {
  const double scale = std::pow(10.0, digits);
  for (auto& f : features.features) {
    for_each_vertex(f.geometry, [&](Point2& v) {
      for (int k = 0; k < 2; ++k) {
        const double q = std::round(v[k] * scale) / scale;
        v[k] = q == 0.0 ? 0.0 : q;
      }
    });
  }
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
  out += '"';
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

void append_position(std::string& out, const Point2& p) {
  out += '[';
  out += format_fixed(p.x(), kOutputDigits);
  out += ',';
  out += format_fixed(p.y(), kOutputDigits);
  out += ']';
}

void append_positions(std::string& out, std::span<const Point2> pts) {
  out += '[';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ',';
    append_position(out, pts[i]);
  }
  out += ']';
}

void append_geometry(std::string& out, const FeatureGeometry& g) {
  std::visit(
      [&](const auto& geom) {
        using G = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<G, PointGeometry>) {
          out += R"({"type":"Point","coordinates":)";
          append_position(out, geom.position);
        } else if constexpr (std::is_same_v<G, LineStringGeometry>) {
          out += R"({"type":"LineString","coordinates":)";
          append_positions(out, geom.vertices);
        } else {
          // Exterior rings are counter-clockwise in RFC 7946.
          std::vector<Point2> ring = geom.ring;
          if (signed_area<double>(ring) < 0.0) std::reverse(ring.begin(), ring.end());
          out += R"({"type":"Polygon","coordinates":[)";
          append_positions(out, ring);
          out += ']';
        }
      },
      g);
  out += '}';
}

std::vector<const Feature*> features_of(const FeatureSet& fs, FeatureClass klass) {
  std::vector<const Feature*> out;
  for (const auto& f : fs.features) {
    if (f.klass == klass) out.push_back(&f);
  }
  std::sort(out.begin(), out.end(), [](const Feature* a, const Feature* b) { return a->id < b->id; });
  return out;
}

}  // namespace

std::string write_geojson(const FeatureSet& features, FeatureClass klass) {
  if (!features.georeferenced || !features.crs) {
    throw GeometryError("refusing to export a feature set that is not georeferenced");
  }
  std::string out = R"({"type":"FeatureCollection","feature_class":)";
  append_json_string(out, to_string(klass));
  out += R"(,"epsg":)" + std::to_string(features.crs->epsg) + R"(,"features":[)";
  const auto selected = features_of(features, klass);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const Feature& f = *selected[i];
    out += i ? ",\n" : "\n";
    out += R"({"type":"Feature","id":)" + std::to_string(f.id) + R"(,"geometry":)";
    append_geometry(out, f.geometry);
    out += R"(,"properties":{)";
    bool first = true;
    for (const auto& [k, v] : export_attributes(f)) {
      if (!first) out += ',';
      first = false;
      append_json_string(out, k);
      out += ':';
      append_json_string(out, v);
    }
    out += "}}";
  }
  out += selected.empty() ? "]}\n" : "\n]}\n";
  return out;
}

AttributeMap export_attributes(const Feature& f) {
  AttributeMap attrs = f.attributes;
  if (f.ring_candidate) add_attribute(attrs, "unclosed_ring", "true");
  return attrs;
}

namespace {

using nlohmann::json;

Point2 read_position(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() < 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError(where, "expected a [x, y] position");
  }
  return Point2(v[0].get<double>(), v[1].get<double>());
}

std::vector<Point2> read_positions(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where, "expected an array of positions");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_position(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::optional<FeatureClass> class_named(std::string_view name) {
  for (auto k : kFeatureClasses) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

FeatureSet read_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("geojson", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw ValidationError("type", "expected a FeatureCollection");
  }
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw ValidationError("features", "expected an array");
  }
  std::optional<FeatureClass> collection_class;
  if (doc.contains("feature_class")) {
    if (!doc["feature_class"].is_string()) throw ValidationError("feature_class", "expected a string");
    collection_class = class_named(doc["feature_class"].get<std::string>());
    if (!collection_class) throw ValidationError("feature_class", "unknown feature class");
  }

  FeatureSet fs;
  fs.georeferenced = true;
  fs.crs = Crs{};
  if (doc.contains("epsg")) {
    if (!doc["epsg"].is_number_integer()) throw ValidationError("epsg", "expected an integer");
    fs.crs->epsg = doc["epsg"].get<int>();
  }

  FeatureId next_id = 1;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const std::string where = "features[" + std::to_string(i) + "]";
    const auto& jf = doc["features"][i];
    if (!jf.is_object() || jf.value("type", "") != "Feature") throw ValidationError(where, "expected a Feature");
    if (!jf.contains("geometry") || !jf["geometry"].is_object()) {
      throw ValidationError(where + ".geometry", "expected a geometry object");
    }
    const auto& jg = jf["geometry"];
    const std::string gtype = jg.value("type", "");
    if (!jg.contains("coordinates")) throw ValidationError(where + ".geometry.coordinates", "missing");
    const auto& coords = jg["coordinates"];

    Feature f;
    if (gtype == "Point") {
      f.geometry = PointGeometry{read_position(coords, where + ".geometry.coordinates")};
      f.klass = FeatureClass::Point;
    } else if (gtype == "LineString") {
      auto v = read_positions(coords, where + ".geometry.coordinates");
      if (v.size() < 2) throw ValidationError(where + ".geometry", "LineString needs >= 2 positions");
      f.geometry = LineStringGeometry{std::move(v)};
      f.klass = FeatureClass::Line;
    } else if (gtype == "Polygon") {
      if (!coords.is_array() || coords.empty()) throw ValidationError(where + ".geometry", "Polygon needs a ring");
      auto ring = read_positions(coords[0], where + ".geometry.coordinates[0]");
      if (ring.size() < 4 || !same_point(ring.front(), ring.back())) {
        throw ValidationError(where + ".geometry", "Polygon ring must be closed with >= 4 positions");
      }
      f.geometry = PolygonGeometry{std::move(ring)};
      f.klass = FeatureClass::Polygon;
    } else {
      throw ValidationError(where + ".geometry.type", "unsupported geometry type '" + gtype + "'");
    }
    if (collection_class) {
      const bool point_like = *collection_class == FeatureClass::Point || *collection_class == FeatureClass::Annotation;
      if (point_like != std::holds_alternative<PointGeometry>(f.geometry) ||
          (*collection_class == FeatureClass::Line && gtype != "LineString") ||
          (*collection_class == FeatureClass::Polygon && gtype != "Polygon")) {
        throw ValidationError(where + ".geometry.type", "does not match collection feature_class");
      }
      f.klass = *collection_class;
    }

    if (jf.contains("properties") && jf["properties"].is_object()) {
      for (const auto& [k, v] : jf["properties"].items()) {
        f.attributes[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    if (auto it = f.attributes.find("unclosed_ring"); it != f.attributes.end() && it->second == "true") {
      f.ring_candidate = true;
      f.attributes.erase(it);
    }
    if (jf.contains("id") && jf["id"].is_number_unsigned()) {
      f.id = jf["id"].get<FeatureId>();
    } else {
      f.id = next_id;
    }
    next_id = std::max(next_id, f.id + 1);
    fs.features.push_back(std::move(f));
  }
  return fs;
}

}  // namespace cad2gis
