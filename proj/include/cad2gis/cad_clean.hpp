#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cad2gis/cad_model.hpp"
#include "cad2gis/profile.hpp"

namespace cad2gis {

enum class FixKind { DroppedEntity, BridgedGap, Deduped };

std::string_view to_string(FixKind kind);

struct CleanFix {
  FixKind kind = FixKind::DroppedEntity;
  std::vector<std::string> handles;  // never empty
  std::string detail;

  bool operator==(const CleanFix&) const = default;
};

struct CleanResult {
  CadDocument doc;
  std::vector<CleanFix> fixes;
};

// Removes entities on drop (and unmapped) layers; flags reference-only layers.
CleanResult drop_irrelevant(const CadDocument& doc, const ConversionProfile& profile);

// Merges collinear Line/open-Polyline pieces separated by a text-induced gap.
CleanResult bridge_text_gaps(const CadDocument& doc, const Tolerances& tol);

// Removes exact duplicates (kind, layer, geometry), keeping the first occurrence.
CleanResult dedupe_entities(const CadDocument& doc);

// Merge partition computed by bridge_text_gaps: label[i] is the smallest entity index
// in the chain entity i joins (i itself when it is not merged).
std::vector<std::size_t> gap_merge_partition(const CadDocument& doc, const Tolerances& tol);

}  // namespace cad2gis
