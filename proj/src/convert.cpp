#include "cad2gis/convert.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cad2gis/error.hpp"

namespace cad2gis {

std::string_view to_string(FeatureClass klass) {
  switch (klass) {
    case FeatureClass::Point: return "point";
    case FeatureClass::Line: return "line";
    case FeatureClass::Polygon: return "polygon";
    case FeatureClass::Annotation: return "annotation";
  }
  return "line";
}

std::size_t ConversionCounts::converted() const {
  std::size_t total = reference_features;
  for (auto c : by_class) total += c;
  return total;
}

std::string add_attribute(AttributeMap& attrs, const std::string& key, std::string value) {
  std::string slot = key;
  for (int suffix = 2; attrs.contains(slot); ++suffix) slot = key + "_" + std::to_string(suffix);
  attrs.emplace(slot, std::move(value));
  return slot;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::vector<Point2> tessellate_arc(const Point2& center, double radius, double start_deg,
                                   double sweep_deg, double chord_tol) {
  if (!(sweep_deg > 0.0)) throw GeometryError("degenerate arc: zero sweep");
  if (!(radius > 0.0)) throw GeometryError("degenerate arc: radius must be positive");
  if (!(chord_tol > 0.0)) throw GeometryError("arc chord tolerance must be positive");

  constexpr double kDeg = std::numbers::pi / 180.0;
  const bool full_circle = sweep_deg >= 360.0;
  const double sweep = std::min(sweep_deg, 360.0) * kDeg;
  const double max_step = 2.0 * std::acos(1.0 - std::min(chord_tol, radius) / radius);
  auto segments = static_cast<std::size_t>(std::ceil(sweep / max_step));
  segments = std::max<std::size_t>(segments, full_circle ? 8 : 2);

  const double start = start_deg * kDeg;
  std::vector<Point2> out;
  out.reserve(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    const double angle = start + sweep * (static_cast<double>(i) / static_cast<double>(segments));
    out.emplace_back(center.x() + radius * std::cos(angle), center.y() + radius * std::sin(angle));
  }
  if (full_circle) out.back() = out.front();
  return out;
}

std::vector<Point2> tessellate_arc(const ArcGeom& arc, double chord_tol) {
  return tessellate_arc(arc.center, arc.radius, arc.start_angle,
                        arc_sweep_degrees(arc.start_angle, arc.end_angle), chord_tol);
}

std::vector<Point2> tessellate_arc(const CircleGeom& circle, double chord_tol) {
  return tessellate_arc(circle.center, circle.radius, 0.0, 360.0, chord_tol);
}

namespace {

std::size_t distinct_count(const std::vector<Point2>& pts) {
  std::vector<Point2> sorted = pts;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  const auto last = std::unique(sorted.begin(), sorted.end(), same_point);
  return static_cast<std::size_t>(last - sorted.begin());
}

// Closed ring from a vertex list, or nullopt when fewer than three distinct vertices.
std::optional<std::vector<Point2>> close_ring(std::vector<Point2> v) {
  if (v.size() > 1 && same_point(v.front(), v.back())) v.pop_back();
  if (distinct_count(v) < 3) return std::nullopt;
  v.push_back(v.front());
  return v;
}

std::vector<Point2> linework(const CadEntity& e) {
  if (const auto* l = std::get_if<LineGeom>(&e.geometry)) return {l->start, l->end};
  const auto& p = std::get<PolylineGeom>(e.geometry);
  std::vector<Point2> v = p.vertices;
  if (p.closed && !same_point(v.front(), v.back())) v.push_back(v.front());
  return v;
}

class Converter {
 public:
  Converter(const ConversionProfile& profile, ConversionResult& out)
      : profile_(profile), out_(out) {}

  void convert(const CadEntity& e) {
    if (e.kind() == EntityKind::Unsupported) {
      ++out_.counts.unsupported_skipped;
      return;
    }
    const LayerRule* rule = match_rule(profile_, e.layer);
    Feature f;
    f.attributes["layer"] = e.layer;
    f.attributes["handle"] = e.handle;
    if (rule) {
      for (const auto& [k, v] : rule->attributes) add_attribute(f.attributes, k, v);
    }

    if (const auto* t = std::get_if<TextGeom>(&e.geometry)) {
      f.klass = FeatureClass::Annotation;
      f.geometry = PointGeometry{t->insert};
      add_attribute(f.attributes, "label", t->content);
    } else if (e.reference_only) {
      natural(e, f);
    } else {
      const auto action = rule ? rule->action : LayerAction::Drop;
      switch (action) {
        case LayerAction::Point: as_point(e, *rule, f); break;
        case LayerAction::Polygon: as_polygon(e, f); break;
        case LayerAction::Line: as_line(e, f); break;
        case LayerAction::Annotation:
          warn(e, "non-text entity on annotation layer kept as linework");
          natural(e, f);
          break;
        case LayerAction::Drop:
        case LayerAction::ReferenceOnly:
          // drop_irrelevant removes these before conversion; keep the feature rather than lose it.
          warn(e, "entity on a dropped layer reached conversion");
          natural(e, f);
          break;
      }
    }

    FeatureSet& target = e.reference_only ? out_.reference : out_.features;
    f.id = next_id_++;
    if (e.reference_only) {
      ++out_.counts.reference_features;
    } else {
      ++out_.counts.by_class[static_cast<std::size_t>(f.klass)];
      if (f.ring_candidate) ++out_.counts.ring_candidates;
    }
    target.features.push_back(std::move(f));
  }

 private:
  void warn(const CadEntity& e, const std::string& what) {
    out_.warnings.push_back(e.handle + " (" + e.layer + "): " + what);
  }

  double chord() const { return profile_.tolerances.arc_chord; }

  void set_linestring(Feature& f, std::vector<Point2> v) {
    f.klass = FeatureClass::Line;
    f.geometry = LineStringGeometry{std::move(v)};
  }

  void natural(const CadEntity& e, Feature& f) {
    if (const auto* c = std::get_if<CircleGeom>(&e.geometry)) {
      f.klass = FeatureClass::Polygon;
      f.geometry = PolygonGeometry{tessellate_arc(*c, chord())};
    } else if (const auto* a = std::get_if<ArcGeom>(&e.geometry)) {
      set_linestring(f, tessellate_arc(*a, chord()));
    } else if (const auto* p = std::get_if<PolylineGeom>(&e.geometry); p && p->closed) {
      if (auto ring = close_ring(p->vertices)) {
        f.klass = FeatureClass::Polygon;
        f.geometry = PolygonGeometry{std::move(*ring)};
      } else {
        set_linestring(f, linework(e));
      }
    } else {
      set_linestring(f, linework(e));
    }
  }

  void as_point(const CadEntity& e, const LayerRule& rule, Feature& f) {
    const Point2* center = nullptr;
    double radius = 0.0;
    if (const auto* c = std::get_if<CircleGeom>(&e.geometry)) {
      center = &c->center;
      radius = c->radius;
    } else if (const auto* a = std::get_if<ArcGeom>(&e.geometry)) {
      center = &a->center;
      radius = a->radius;
    }
    if (center) {
      f.klass = FeatureClass::Point;
      f.geometry = PointGeometry{*center};
      add_attribute(f.attributes, "radius", format_fixed(radius));
      ++out_.counts.circles_collapsed;
      return;
    }
    if (rule.collapse == Collapse::Centroid) {
      // Rings collapse after georeferencing; open outlines wait for ring closure first.
      as_polygon(e, f);
      return;
    }
    f.klass = FeatureClass::Point;
    const auto v = linework(e);
    f.geometry = PointGeometry{vertex_mean<double>(v)};
    warn(e, "linework on point layer placed at its vertex mean");
  }

  void as_polygon(const CadEntity& e, Feature& f) {
    if (const auto* c = std::get_if<CircleGeom>(&e.geometry)) {
      f.klass = FeatureClass::Polygon;
      f.geometry = PolygonGeometry{tessellate_arc(*c, chord())};
      return;
    }
    if (const auto* a = std::get_if<ArcGeom>(&e.geometry)) {
      set_linestring(f, tessellate_arc(*a, chord()));
      warn(e, "arc on polygon layer kept as linework");
      return;
    }
    const auto* p = std::get_if<PolylineGeom>(&e.geometry);
    if (p && p->closed) {
      if (auto ring = close_ring(p->vertices)) {
        f.klass = FeatureClass::Polygon;
        f.geometry = PolygonGeometry{std::move(*ring)};
        return;
      }
      warn(e, "closed polyline with fewer than 3 distinct vertices kept as linework");
      set_linestring(f, linework(e));
      return;
    }
    set_linestring(f, linework(e));
    f.ring_candidate = true;
  }

  void as_line(const CadEntity& e, Feature& f) {
    if (const auto* c = std::get_if<CircleGeom>(&e.geometry)) {
      set_linestring(f, tessellate_arc(*c, chord()));
    } else if (const auto* a = std::get_if<ArcGeom>(&e.geometry)) {
      set_linestring(f, tessellate_arc(*a, chord()));
    } else {
      set_linestring(f, linework(e));
    }
  }

  const ConversionProfile& profile_;
  ConversionResult& out_;
  FeatureId next_id_ = 1;
};

}  // namespace

ConversionResult convert_document(const CadDocument& doc, const ConversionProfile& profile) {
  ConversionResult out;
  Converter converter(profile, out);
  for (const auto& e : doc.entities) converter.convert(e);
  return out;
}

}  // namespace cad2gis
