#pragma once

#include <span>
#include <string>
#include <vector>

#include "cad2gis/convert.hpp"
#include "cad2gis/geometry.hpp"
#include "cad2gis/profile.hpp"

namespace cad2gis {

struct SnapStats {
  std::size_t clusters = 0;         // clusters of >= 2 nodes that moved
  std::size_t moved_nodes = 0;
  double max_displacement = 0.0;
  double mean_displacement = 0.0;
  std::size_t rounds = 0;
};

struct ClosureStats {
  std::size_t closed = 0;
};

struct AttachStats {
  std::size_t attached = 0;
  std::size_t orphans = 0;
};

struct CollapseStats {
  std::size_t collapsed = 0;
  std::vector<std::string> warnings;
};

struct Dangle {
  FeatureId feature = 0;
  Point2 endpoint;
  double nearest_distance = 0.0;  // infinity when the network has no other node
};

struct UnclosedRing {
  FeatureId feature = 0;
  double gap = 0.0;
};

struct TopologyReport {
  SnapStats snap;
  std::size_t closed_rings = 0;
  std::size_t attached_annotations = 0;
  std::size_t collapsed_polygons = 0;
  std::vector<std::string> warnings;
  // Defects remaining in the final feature set.
  std::vector<UnclosedRing> unclosed_rings;
  std::vector<FeatureId> orphan_annotations;
  std::vector<Dangle> dangles;
};

template <typename Stats>
struct PassResult {
  FeatureSet features;
  Stats stats;
};

// Single-linkage clusters (chains of <= tol hops). label[i] = smallest index in i's cluster.
std::vector<std::size_t> single_linkage_clusters(std::span<const Point2> points, double tol);

// Clusters LineString endpoints and point features and moves each cluster to the centroid of its
// members' original positions, repeating until no cluster forms anew (so a second pass is a no-op).
PassResult<SnapStats> snap_endpoints(const FeatureSet& features, double tol);

// Ring candidates whose end-to-start gap <= tol become polygons (last vertex := first).
PassResult<ClosureStats> close_polygons(const FeatureSet& features, double tol);

// Polygons on point+centroid layers become points at their area centroid.
PassResult<CollapseStats> collapse_redundant_polygons(const FeatureSet& features,
                                                      const ConversionProfile& profile);

// Copies each annotation's label onto the nearest non-annotation feature within tol
// (ties to the smaller id) and records the target in the annotation's "attached_to".
PassResult<AttachStats> attach_annotations(const FeatureSet& features, double tol);

// Lists dangling LineString endpoints, unclosed ring candidates and unattached annotations.
TopologyReport validate_network(const FeatureSet& features, double dangle_tol);

struct GisCleanOptions {
  bool snap = true;
  bool close = true;
  bool collapse = true;
  bool attach = true;
};

struct GisCleanResult {
  FeatureSet features;
  TopologyReport report;
};

// Fixed pass order: snap -> close -> collapse -> attach -> validate.
GisCleanResult clean_features(const FeatureSet& features, const ConversionProfile& profile,
                              const GisCleanOptions& options = {});

}  // namespace cad2gis
