#include "cad2gis/gis_clean.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cad2gis/error.hpp"

namespace cad2gis {

namespace {

void require_georeferenced(const FeatureSet& fs, const char* pass) {
  if (!fs.georeferenced) throw GeometryError(std::string(pass) + " requires a georeferenced feature set");
}

// A movable/joinable location: a LineString end or a point feature.
struct NodeRef {
  std::size_t feature;  // index into FeatureSet::features
  int slot;             // 0 = first vertex / point, 1 = last vertex
};

Point2& node_position(FeatureSet& fs, const NodeRef& n) {
  auto& g = fs.features[n.feature].geometry;
  if (auto* p = std::get_if<PointGeometry>(&g)) return p->position;
  auto& v = std::get<LineStringGeometry>(g).vertices;
  return n.slot == 0 ? v.front() : v.back();
}

}  // namespace

std::vector<std::size_t> single_linkage_clusters(std::span<const Point2> points, double tol) {
  UnionFind uf(points.size());
  const PointGrid grid(points, tol);
  for (std::size_t i = 0; i < points.size(); ++i) {
    grid.for_each_within(points[i], tol, [&](std::size_t j) {
      if (j > i) uf.unite(i, j);
    });
  }
  return uf.labels();
}

PassResult<SnapStats> snap_endpoints(const FeatureSet& features, double tol) {
  require_georeferenced(features, "snap_endpoints");
  PassResult<SnapStats> out{features, {}};
  FeatureSet& fs = out.features;

  std::vector<NodeRef> nodes;
  for (std::size_t i = 0; i < fs.features.size(); ++i) {
    const auto& f = fs.features[i];
    if (f.klass == FeatureClass::Annotation) continue;
    if (std::holds_alternative<PointGeometry>(f.geometry)) {
      nodes.push_back({i, 0});
    } else if (const auto* l = std::get_if<LineStringGeometry>(&f.geometry)) {
      // Lines no longer than the tolerance would collapse onto a single node.
      if (polyline_length<double>(l->vertices) <= tol) continue;
      nodes.push_back({i, 0});
      nodes.push_back({i, 1});
    }
  }
  if (nodes.empty()) return out;

  std::vector<Point2> original;
  original.reserve(nodes.size());
  for (const auto& n : nodes) original.push_back(node_position(fs, n));
  std::vector<Point2> current = original;

  UnionFind merged(nodes.size());
  while (true) {
    ++out.stats.rounds;
    const auto labels = single_linkage_clusters(current, tol);
    for (std::size_t i = 0; i < nodes.size(); ++i) merged.unite(i, labels[i]);

    std::map<std::size_t, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < nodes.size(); ++i) clusters[merged.find(i)].push_back(i);

    bool changed = false;
    for (const auto& [root, members] : clusters) {
      if (members.size() < 2) continue;
      const bool settled = std::all_of(members.begin(), members.end(), [&](std::size_t m) {
        return same_point(current[m], current[members.front()]);
      });
      if (settled) continue;
      Point2 centroid = Point2::Zero();
      for (auto m : members) centroid += original[m];
      centroid /= static_cast<double>(members.size());
      for (auto m : members) current[m] = centroid;
      changed = true;
    }
    if (!changed) break;
  }

  std::map<std::size_t, bool> moved_cluster;
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (same_point(current[i], original[i])) continue;
    const double d = (current[i] - original[i]).norm();
    ++out.stats.moved_nodes;
    total += d;
    out.stats.max_displacement = std::max(out.stats.max_displacement, d);
    moved_cluster[merged.find(i)] = true;
    node_position(fs, nodes[i]) = current[i];
  }
  out.stats.clusters = moved_cluster.size();
  if (out.stats.moved_nodes > 0) out.stats.mean_displacement = total / static_cast<double>(out.stats.moved_nodes);
  return out;
}

PassResult<ClosureStats> close_polygons(const FeatureSet& features, double tol) {
  require_georeferenced(features, "close_polygons");
  PassResult<ClosureStats> out{features, {}};
  for (auto& f : out.features.features) {
    if (!f.ring_candidate) continue;
    const auto* line = std::get_if<LineStringGeometry>(&f.geometry);
    if (!line || line->vertices.size() < 4) continue;
    std::vector<Point2> ring = line->vertices;
    if ((ring.back() - ring.front()).norm() > tol) continue;

    std::vector<Point2> distinct(ring.begin(), ring.end() - 1);
    std::sort(distinct.begin(), distinct.end(), lex_less);
    if (std::unique(distinct.begin(), distinct.end(), same_point) - distinct.begin() < 3) continue;

    ring.back() = ring.front();
    f.geometry = PolygonGeometry{std::move(ring)};
    f.klass = FeatureClass::Polygon;
    f.ring_candidate = false;
    ++out.stats.closed;
  }
  return out;
}

PassResult<CollapseStats> collapse_redundant_polygons(const FeatureSet& features,
                                                      const ConversionProfile& profile) {
  require_georeferenced(features, "collapse_redundant_polygons");
  PassResult<CollapseStats> out{features, {}};
  for (auto& f : out.features.features) {
    const auto* poly = std::get_if<PolygonGeometry>(&f.geometry);
    if (!poly) continue;
    const auto layer = f.attributes.find("layer");
    if (layer == f.attributes.end()) continue;
    const auto* rule = match_rule(profile, layer->second);
    if (!rule || rule->action != LayerAction::Point || rule->collapse != Collapse::Centroid) continue;

    const std::span<const Point2> ring(poly->ring);
    Point2 centre;
    if (signed_area<double>(ring) != 0.0) {
      centre = area_centroid<double>(ring);
    } else {
      centre = vertex_mean<double>(ring);
      out.stats.warnings.push_back("feature " + std::to_string(f.id) +
                                   ": zero-area ring collapsed to its vertex mean");
    }
    f.geometry = PointGeometry{centre};
    f.klass = FeatureClass::Point;
    ++out.stats.collapsed;
  }
  return out;
}

namespace {

double distance_to(const Point2& p, const FeatureGeometry& g) {
  return std::visit(
      [&](const auto& geom) -> double {
        using G = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<G, PointGeometry>) {
          return (p - geom.position).norm();
        } else if constexpr (std::is_same_v<G, LineStringGeometry>) {
          return polyline_distance<double>(p, geom.vertices);
        } else {
          return polygon_distance<double>(p, geom.ring);
        }
      },
      g);
}

Box2 geometry_box(FeatureGeometry g) {
  Box2 box;
  for_each_vertex(g, [&](Point2& v) { box.extend(v); });
  return box;
}

}  // namespace

PassResult<AttachStats> attach_annotations(const FeatureSet& features, double tol) {
  require_georeferenced(features, "attach_annotations");
  PassResult<AttachStats> out{features, {}};
  auto& list = out.features.features;

  std::vector<std::size_t> targets;
  std::vector<Box2> boxes;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].klass == FeatureClass::Annotation) continue;
    targets.push_back(i);
    boxes.push_back(geometry_box(list[i].geometry));
  }

  std::vector<std::size_t> annotations;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].klass == FeatureClass::Annotation) annotations.push_back(i);
  }
  std::sort(annotations.begin(), annotations.end(),
            [&](std::size_t a, std::size_t b) { return list[a].id < list[b].id; });

  for (std::size_t ai : annotations) {
    auto& note = list[ai];
    if (note.attributes.contains("attached_to")) continue;
    const Point2 at = std::get<PointGeometry>(note.geometry).position;

    std::size_t best = list.size();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (box_distance(at, boxes[k]) > tol) continue;
      const auto& cand = list[targets[k]];
      const double d = distance_to(at, cand.geometry);
      if (d > tol) continue;
      if (d < best_distance || (d == best_distance && cand.id < list[best].id)) {
        best = targets[k];
        best_distance = d;
      }
    }
    if (best == list.size()) {
      ++out.stats.orphans;
      continue;
    }
    const auto label = note.attributes.find("label");
    add_attribute(list[best].attributes, "label",
                  label == note.attributes.end() ? std::string() : label->second);
    note.attributes["attached_to"] = std::to_string(list[best].id);
    ++out.stats.attached;
  }
  return out;
}

TopologyReport validate_network(const FeatureSet& features, double dangle_tol) {
  TopologyReport report;
  std::vector<Point2> nodes;
  std::vector<std::size_t> endpoint_owner;  // feature index for endpoints, npos for points
  constexpr auto kNotEndpoint = static_cast<std::size_t>(-1);

  for (std::size_t i = 0; i < features.features.size(); ++i) {
    const auto& f = features.features[i];
    if (f.klass == FeatureClass::Annotation) {
      if (!f.attributes.contains("attached_to")) report.orphan_annotations.push_back(f.id);
      continue;
    }
    if (const auto* p = std::get_if<PointGeometry>(&f.geometry)) {
      nodes.push_back(p->position);
      endpoint_owner.push_back(kNotEndpoint);
    } else if (const auto* l = std::get_if<LineStringGeometry>(&f.geometry)) {
      if (f.ring_candidate) {
        report.unclosed_rings.push_back({f.id, (l->vertices.back() - l->vertices.front()).norm()});
        continue;
      }
      nodes.push_back(l->vertices.front());
      endpoint_owner.push_back(i);
      nodes.push_back(l->vertices.back());
      endpoint_owner.push_back(i);
    }
  }

  const PointGrid grid(nodes, dangle_tol);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (endpoint_owner[n] == kNotEndpoint) continue;
    bool joined = false;
    grid.for_each_within(nodes[n], dangle_tol, [&](std::size_t m) { joined = joined || m != n; });
    if (joined) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      if (m != n) nearest = std::min(nearest, (nodes[m] - nodes[n]).norm());
    }
    report.dangles.push_back({features.features[endpoint_owner[n]].id, nodes[n], nearest});
  }
  return report;
}

GisCleanResult clean_features(const FeatureSet& features, const ConversionProfile& profile,
                              const GisCleanOptions& options) {
  const auto& tol = profile.tolerances;
  FeatureSet fs = features;
  SnapStats snap;
  std::size_t closed = 0;
  std::size_t attached = 0;
  CollapseStats collapse;
  if (options.snap) {
    auto r = snap_endpoints(fs, tol.snap);
    fs = std::move(r.features);
    snap = r.stats;
  }
  if (options.close) {
    auto r = close_polygons(fs, tol.ring_close);
    fs = std::move(r.features);
    closed = r.stats.closed;
  }
  if (options.collapse) {
    auto r = collapse_redundant_polygons(fs, profile);
    fs = std::move(r.features);
    collapse = std::move(r.stats);
  }
  if (options.attach) {
    auto r = attach_annotations(fs, tol.annotation_attach);
    fs = std::move(r.features);
    attached = r.stats.attached;
  }
  GisCleanResult out{std::move(fs), {}};
  out.report = validate_network(out.features, tol.dangle);
  out.report.snap = snap;
  out.report.closed_rings = closed;
  out.report.collapsed_polygons = collapse.collapsed;
  out.report.attached_annotations = attached;
  out.report.warnings = std::move(collapse.warnings);
  return out;
}

}  // namespace cad2gis
