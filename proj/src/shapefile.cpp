#include <bit>
#include <cstring>
#include <set>

#include "cad2gis/error.hpp"
#include "cad2gis/io_formats.hpp"

namespace cad2gis {

ShapeType shape_type_for(FeatureClass klass) {
  switch (klass) {
    case FeatureClass::Point:
    case FeatureClass::Annotation: return ShapeType::Point;
    case FeatureClass::Line: return ShapeType::PolyLine;
    case FeatureClass::Polygon: return ShapeType::Polygon;
  }
  return ShapeType::Null;
}

namespace {

using Bytes = std::vector<std::uint8_t>;

void put_be32(Bytes& b, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int shift = 24; shift >= 0; shift -= 8) b.push_back(static_cast<std::uint8_t>(u >> shift));
}

void put_le32(Bytes& b, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int shift = 0; shift < 32; shift += 8) b.push_back(static_cast<std::uint8_t>(u >> shift));
}

void put_le16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_le_double(Bytes& b, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int shift = 0; shift < 64; shift += 8) b.push_back(static_cast<std::uint8_t>(u >> shift));
}

void set_be32(Bytes& b, std::size_t at, std::int32_t v) {
  Bytes tmp;
  put_be32(tmp, v);
  std::memcpy(b.data() + at, tmp.data(), 4);
}

void put_box(Bytes& b, const Box2& box) {
  if (box.isEmpty()) {
    for (int i = 0; i < 4; ++i) put_le_double(b, 0.0);
    return;
  }
  put_le_double(b, box.min().x());
  put_le_double(b, box.min().y());
  put_le_double(b, box.max().x());
  put_le_double(b, box.max().y());
}

// 100-byte main file header; the file length is patched in once known.
Bytes file_header(ShapeType type, const Box2& box) {
  Bytes h;
  put_be32(h, 9994);
  for (int i = 0; i < 5; ++i) put_be32(h, 0);
  put_be32(h, 50);
  put_le32(h, 1000);
  put_le32(h, static_cast<std::int32_t>(type));
  put_box(h, box);
  for (int i = 0; i < 4; ++i) put_le_double(h, 0.0);  // Z and M ranges
  return h;
}

std::int32_t words(std::size_t bytes) {
  if (bytes / 2 > static_cast<std::size_t>(INT32_MAX)) throw Error("shapefile exceeds the 2 GB format limit");
  return static_cast<std::int32_t>(bytes / 2);
}

std::vector<Point2> record_points(const Feature& f) {
  return std::visit(
      [](const auto& g) -> std::vector<Point2> {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, PointGeometry>) {
          return {g.position};
        } else if constexpr (std::is_same_v<G, LineStringGeometry>) {
          return g.vertices;
        } else {
          // Outer rings are clockwise in shapefiles.
          std::vector<Point2> ring = g.ring;
          if (signed_area<double>(ring) > 0.0) std::reverse(ring.begin(), ring.end());
          return ring;
        }
      },
      f.geometry);
}

Bytes record_content(ShapeType type, const std::vector<Point2>& pts) {
  Bytes c;
  put_le32(c, static_cast<std::int32_t>(type));
  if (type == ShapeType::Point) {
    put_le_double(c, pts.front().x());
    put_le_double(c, pts.front().y());
    return c;
  }
  put_box(c, bounding_box(pts));
  put_le32(c, 1);  // NumParts
  put_le32(c, static_cast<std::int32_t>(pts.size()));
  put_le32(c, 0);  // Parts[0]
  for (const auto& p : pts) {
    put_le_double(c, p.x());
    put_le_double(c, p.y());
  }
  return c;
}

std::map<std::string, std::string> dbf_field_names(const std::set<std::string>& keys) {
  std::set<std::string> used = {"id"};
  std::map<std::string, std::string> names;
  for (const auto& key : keys) {
    std::string name = key.substr(0, 10);
    for (int k = 2; used.contains(name); ++k) {
      const std::string suffix = "_" + std::to_string(k);
      name = key.substr(0, 10 - suffix.size()) + suffix;
    }
    used.insert(name);
    names[key] = name;
  }
  return names;
}

void put_field_descriptor(Bytes& b, const std::string& name, char type, std::uint8_t width) {
  char raw[11] = {};
  std::memcpy(raw, name.data(), std::min<std::size_t>(name.size(), 10));
  b.insert(b.end(), raw, raw + 11);
  b.push_back(static_cast<std::uint8_t>(type));
  for (int i = 0; i < 4; ++i) b.push_back(0);
  b.push_back(width);
  b.push_back(0);  // decimal count
  for (int i = 0; i < 14; ++i) b.push_back(0);
}

constexpr std::uint8_t kIdWidth = 20;

Bytes write_dbf(const std::vector<const Feature*>& features, ShapefileBytes& out) {
  std::set<std::string> keys;
  std::vector<AttributeMap> attrs;
  for (const auto* f : features) {
    attrs.push_back(export_attributes(*f));
    for (const auto& [k, v] : attrs.back()) keys.insert(k);
  }
  out.field_names = dbf_field_names(keys);

  const std::size_t header_len = 32 + 32 * (keys.size() + 1) + 1;
  const std::size_t record_len = 1 + kIdWidth + kDbfStringWidth * keys.size();
  if (header_len > 0xFFFF || record_len > 0xFFFF) throw Error("too many attributes for a DBF table");

  Bytes b;
  b.push_back(0x03);
  // Fixed last-update date (2000-01-01) keeps output byte-identical across runs.
  b.push_back(100);
  b.push_back(1);
  b.push_back(1);
  put_le32(b, static_cast<std::int32_t>(features.size()));
  put_le16(b, static_cast<std::uint16_t>(header_len));
  put_le16(b, static_cast<std::uint16_t>(record_len));
  for (int i = 0; i < 20; ++i) b.push_back(0);

  put_field_descriptor(b, "id", 'N', kIdWidth);
  for (const auto& key : keys) put_field_descriptor(b, out.field_names[key], 'C', kDbfStringWidth);
  b.push_back(0x0D);

  for (std::size_t r = 0; r < features.size(); ++r) {
    b.push_back(' ');
    std::string id = std::to_string(features[r]->id);
    b.insert(b.end(), kIdWidth - id.size(), ' ');
    b.insert(b.end(), id.begin(), id.end());
    for (const auto& key : keys) {
      std::string value;
      if (const auto it = attrs[r].find(key); it != attrs[r].end()) value = it->second;
      if (value.size() > kDbfStringWidth) {
        out.warnings.push_back("feature " + id + ": attribute '" + key + "' truncated to " +
                               std::to_string(kDbfStringWidth) + " bytes");
        value.resize(kDbfStringWidth);
      }
      b.insert(b.end(), value.begin(), value.end());
      b.insert(b.end(), kDbfStringWidth - value.size(), ' ');
    }
  }
  b.push_back(0x1A);
  return b;
}

}  // namespace

ShapefileBytes write_shapefile(const FeatureSet& features, FeatureClass klass) {
  if (!features.georeferenced || !features.crs) {
    throw GeometryError("refusing to export a feature set that is not georeferenced");
  }
  std::vector<const Feature*> selected;
  for (const auto& f : features.features) {
    if (f.klass != klass) {
      throw GeometryError("shapefile holds one feature class; found " + std::string(to_string(f.klass)) +
                          " in a " + std::string(to_string(klass)) + " file");
    }
    selected.push_back(&f);
  }
  std::sort(selected.begin(), selected.end(), [](const Feature* a, const Feature* b) { return a->id < b->id; });

  const ShapeType type = shape_type_for(klass);
  std::vector<std::vector<Point2>> geometries;
  Box2 extent;
  for (const auto* f : selected) {
    geometries.push_back(record_points(*f));
    for (const auto& p : geometries.back()) extent.extend(p);
  }

  ShapefileBytes out;
  out.shp = file_header(type, extent);
  out.shx = file_header(type, extent);
  for (std::size_t i = 0; i < geometries.size(); ++i) {
    const Bytes content = record_content(type, geometries[i]);
    put_be32(out.shx, words(out.shp.size()));
    put_be32(out.shx, words(content.size()));
    put_be32(out.shp, static_cast<std::int32_t>(i + 1));
    put_be32(out.shp, words(content.size()));
    out.shp.insert(out.shp.end(), content.begin(), content.end());
  }
  set_be32(out.shp, 24, words(out.shp.size()));
  set_be32(out.shx, 24, words(out.shx.size()));

  out.dbf = write_dbf(selected, out);
  if (features.crs->wkt) {
    out.prj = *features.crs->wkt;
  } else {
    out.warnings.push_back("no WKT in profile; " + std::string(to_string(klass)) + ".prj left empty");
  }
  return out;
}

}  // namespace cad2gis
