#include <cmath>
#include <numbers>

#include <json.hpp>

#include "cad2gis/io_formats.hpp"

namespace cad2gis {

std::size_t QaReport::count_fixes(FixKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(fixes.begin(), fixes.end(), [&](const CleanFix& f) { return f.kind == kind; }));
}

namespace {

using nlohmann::json;

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

// nlohmann writes non-finite numbers as null; keep that explicit.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json inventory_json(const QaReport& r) {
  json layers = json::object();
  for (const auto& [name, counts] : r.inventory.layers) {
    json c = json::object();
    for (std::size_t k = 0; k < kEntityKindCount; ++k) {
      if (counts.by_kind[k]) c[std::string(to_string(static_cast<EntityKind>(k)))] = counts.by_kind[k];
    }
    c["total"] = counts.total();
    layers[name] = std::move(c);
  }
  json bbox = nullptr;
  if (r.inventory.bbox) {
    bbox = {{"min", point_json(r.inventory.bbox->min())}, {"max", point_json(r.inventory.bbox->max())}};
  }
  return {
      {"entity_total", r.inventory.entity_total},
      {"layers", std::move(layers)},
      {"bbox", std::move(bbox)},
      {"unsupported_total", r.inventory.unsupported_total},
      {"unsupported_types", r.inventory.unsupported_types},
      {"unmapped_layers", r.unmapped_layers},
      {"discarded_z_values", r.discarded_z_values},
  };
}

json cad_clean_json(const QaReport& r) {
  json fixes = json::array();
  for (const auto& f : r.fixes) {
    fixes.push_back({{"kind", std::string(to_string(f.kind))}, {"handles", f.handles}, {"detail", f.detail}});
  }
  return {
      {"dropped_entities", r.count_fixes(FixKind::DroppedEntity)},
      {"deduped", r.count_fixes(FixKind::Deduped)},
      {"bridged_gaps", r.count_fixes(FixKind::BridgedGap)},
      {"fixes", std::move(fixes)},
  };
}

json conversion_json(const QaReport& r) {
  json by_class = json::object();
  for (auto k : kFeatureClasses) by_class[std::string(to_string(k))] = r.conversion.by_class[static_cast<std::size_t>(k)];
  return {
      {"features_by_class", std::move(by_class)},
      {"circles_collapsed", r.conversion.circles_collapsed},
      {"reference_features", r.conversion.reference_features},
      {"ring_candidates", r.conversion.ring_candidates},
      {"unsupported_skipped", r.conversion.unsupported_skipped},
      {"warnings", r.conversion_warnings},
  };
}

json transform_json(const GeoTransform& t) {
  return std::visit(
      [](const auto& tr) -> json {
        using T = std::decay_t<decltype(tr)>;
        if constexpr (std::is_same_v<T, SimilarityTransform<double>>) {
          return {{"scale", tr.scale},
                  {"rotation_rad", tr.rotation},
                  {"rotation_deg", tr.rotation * 180.0 / std::numbers::pi},
                  {"translation", point_json(tr.translation)}};
        } else {
          const auto& c = tr.coefficients;
          return {{"a", c(0, 0)}, {"b", c(0, 1)}, {"c", c(0, 2)},
                  {"d", c(1, 0)}, {"e", c(1, 1)}, {"f", c(1, 2)},
                  {"determinant", tr.determinant()}};
        }
      },
      t);
}

json georef_json(const QaReport& r) {
  const auto& g = r.georef;
  json crs = {{"epsg", g.crs.epsg}};
  if (g.crs.wkt) crs["wkt"] = *g.crs.wkt;
  json pairs = json::array();
  for (std::size_t i = 0; i < g.residuals.per_pair.size(); ++i) {
    pairs.push_back({{"index", i},
                     {"label", i < g.pair_labels.size() ? g.pair_labels[i] : std::string()},
                     {"residual", g.residuals.per_pair[i]}});
  }
  return {
      {"performed", g.performed},
      {"model", std::string(to_string(g.model))},
      {"parameters", g.transform ? transform_json(*g.transform) : json(nullptr)},
      {"residuals", {{"pairs", std::move(pairs)}, {"rms", g.residuals.rms}, {"max", g.residuals.max}}},
      {"max_residual_threshold", g.max_residual ? json(*g.max_residual) : json(nullptr)},
      {"flagged_pairs", g.flagged_pairs},
      {"crs", std::move(crs)},
  };
}

json topology_json(const QaReport& r) {
  const auto& t = r.topology;
  json dangles = json::array();
  for (const auto& d : t.dangles) {
    dangles.push_back({{"feature", d.feature},
                       {"endpoint", point_json(d.endpoint)},
                       {"nearest_distance", number_or_null(d.nearest_distance)}});
  }
  json unclosed = json::array();
  for (const auto& u : t.unclosed_rings) unclosed.push_back({{"feature", u.feature}, {"gap", u.gap}});
  return {
      {"snap",
       {{"clusters", t.snap.clusters},
        {"moved_nodes", t.snap.moved_nodes},
        {"max_displacement", t.snap.max_displacement},
        {"mean_displacement", t.snap.mean_displacement},
        {"rounds", t.snap.rounds}}},
      {"closed_rings", t.closed_rings},
      {"collapsed_polygons", t.collapsed_polygons},
      {"attached_annotations", t.attached_annotations},
      {"orphan_annotations", t.orphan_annotations},
      {"unclosed_rings", std::move(unclosed)},
      {"dangles", std::move(dangles)},
      {"warnings", t.warnings},
  };
}

}  // namespace

std::string write_report(const QaReport& r) {
  const auto& l = r.ledger;
  json doc = {
      {"report_version", "1"},
      {"source", r.source},
      {"skipped_passes", r.skipped_passes},
      {"inventory", inventory_json(r)},
      {"cad_clean", cad_clean_json(r)},
      {"conversion", conversion_json(r)},
      {"georeferencing", georef_json(r)},
      {"gis_clean", topology_json(r)},
      {"outputs", {{"dbf_fields", r.dbf_fields}, {"warnings", r.output_warnings}}},
      {"ledger",
       {{"total", l.total},
        {"converted", l.converted},
        {"dropped", l.dropped},
        {"merged", l.merged},
        {"unsupported", l.unsupported},
        {"balanced", l.balanced()}}},
      {"summary",
       {{"bridged_gaps", r.count_fixes(FixKind::BridgedGap)},
        {"closed_rings", r.topology.closed_rings},
        {"collapsed", r.collapsed()},
        {"attached_annotations", r.topology.attached_annotations},
        {"orphan_annotations", r.topology.orphan_annotations.size()},
        {"unclosed_rings", r.topology.unclosed_rings.size()},
        {"dangles", r.topology.dangles.size()},
        {"snapped_clusters", r.topology.snap.clusters}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace cad2gis
