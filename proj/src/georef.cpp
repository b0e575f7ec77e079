#include "cad2gis/georef.hpp"

#include <charconv>

namespace cad2gis {

Eigen::Matrix2Xd source_points(std::span<const ControlPointPair> pairs) {
  Eigen::Matrix2Xd m(2, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pairs[i].source;
  return m;
}

Eigen::Matrix2Xd target_points(std::span<const ControlPointPair> pairs) {
  Eigen::Matrix2Xd m(2, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pairs[i].target;
  return m;
}

SimilarityTransform<double> estimate_similarity(std::span<const ControlPointPair> pairs) {
  return estimate_similarity(source_points(pairs), target_points(pairs));
}

AffineTransform<double> estimate_affine(std::span<const ControlPointPair> pairs) {
  return estimate_affine(source_points(pairs), target_points(pairs));
}

GeoTransform estimate_transform(std::span<const ControlPointPair> pairs, TransformModel model) {
  if (model == TransformModel::Affine) return estimate_affine(pairs);
  return estimate_similarity(pairs);
}

ResidualReport<double> residuals(const GeoTransform& transform, std::span<const ControlPointPair> pairs) {
  return std::visit(
      [&](const auto& t) { return residuals(t, source_points(pairs), target_points(pairs)); }, transform);
}

Point2 apply(const GeoTransform& transform, const Point2& p) {
  return std::visit([&](const auto& t) -> Point2 { return t(p); }, transform);
}

FeatureSet apply_transform(const FeatureSet& features, const GeoTransform& transform, const Crs& crs) {
  if (features.georeferenced) throw GeometryError("feature set is already georeferenced");
  FeatureSet out = features;
  std::visit(
      [&](const auto& t) {
        const auto linear = t.linear();
        const Point2 offset = t(Point2::Zero());
        for (auto& f : out.features) {
          for_each_vertex(f.geometry, [&](Point2& v) { v = linear * v + offset; });
        }
      },
      transform);
  out.crs = crs;
  out.georeferenced = true;
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_coordinate(std::string_view field, std::size_t line, const char* name) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<ControlPointPair> parse_control_points(std::string_view csv) {
  if (csv.starts_with("\xEF\xBB\xBF")) csv.remove_prefix(3);
  std::vector<ControlPointPair> pairs;
  bool have_header = false;
  bool with_label = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    const auto line = trim(csv.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      const bool base = fields.size() >= 4 && fields[0] == "src_x" && fields[1] == "src_y" &&
                        fields[2] == "dst_x" && fields[3] == "dst_y";
      with_label = fields.size() == 5 && fields[4] == "label";
      if (!base || (fields.size() != 4 && !with_label)) {
        throw ParseError(line_no, "expected header src_x,src_y,dst_x,dst_y[,label]");
      }
      have_header = true;
      continue;
    }
    const std::size_t expected = with_label ? 5 : 4;
    if (fields.size() != expected && !(with_label && fields.size() == 4)) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    ControlPointPair pair;
    pair.source = Point2(parse_coordinate(fields[0], line_no, "src_x"),
                         parse_coordinate(fields[1], line_no, "src_y"));
    pair.target = Point2(parse_coordinate(fields[2], line_no, "dst_x"),
                         parse_coordinate(fields[3], line_no, "dst_y"));
    if (fields.size() == 5) {
      auto label = fields[4];
      if (label.size() >= 2 && label.front() == '"' && label.back() == '"') label = label.substr(1, label.size() - 2);
      pair.label = std::string(label);
    }
    pairs.push_back(std::move(pair));
  }
  if (!have_header) throw ParseError(1, "missing header src_x,src_y,dst_x,dst_y[,label]");
  return pairs;
}

}  // namespace cad2gis
