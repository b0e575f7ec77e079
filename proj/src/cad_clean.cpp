#include "cad2gis/cad_clean.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <optional>
#include <unordered_set>

namespace cad2gis {

std::string_view to_string(FixKind kind) {
  switch (kind) {
    case FixKind::DroppedEntity: return "dropped-entity";
    case FixKind::BridgedGap: return "bridged-gap";
    case FixKind::Deduped: return "deduped";
  }
  return "dropped-entity";
}

CleanResult drop_irrelevant(const CadDocument& doc, const ConversionProfile& profile) {
  CleanResult out;
  out.doc.source_name = doc.source_name;
  out.doc.discarded_z_values = doc.discarded_z_values;
  for (const auto& e : doc.entities) {
    const auto* rule = match_rule(profile, e.layer);
    const auto action = rule ? rule->action : LayerAction::Drop;
    if (action == LayerAction::Drop) {
      out.fixes.push_back(CleanFix{FixKind::DroppedEntity,
                                   {e.handle},
                                   rule ? "layer '" + e.layer + "' is dropped by profile"
                                        : "layer '" + e.layer + "' is unmapped"});
      continue;
    }
    CadEntity kept = e;
    kept.reference_only = action == LayerAction::ReferenceOnly;
    out.doc.entities.push_back(std::move(kept));
  }
  return out;
}

namespace {

std::vector<Point2> open_chain_vertices(const CadEntity& e) {
  if (const auto* l = std::get_if<LineGeom>(&e.geometry)) return {l->start, l->end};
  if (const auto* p = std::get_if<PolylineGeom>(&e.geometry); p && !p->closed) return p->vertices;
  return {};
}

struct EntityEnd {
  std::size_t entity;
  int side;  // 0 = first vertex, 1 = last vertex
  Point2 point;
  Point2 outward;  // end-segment direction pointing out of the entity
};

struct Join {
  std::size_t a;  // indices into the end list
  std::size_t b;
  double gap;
};

struct JoinPlan {
  std::vector<EntityEnd> ends;
  std::vector<Join> joins;
  std::vector<Point2> texts;
  std::vector<std::string> text_content;
};

bool collinear_across_gap(const EntityEnd& a, const EntityEnd& b, double lateral) {
  const Point2 gap = b.point - a.point;
  if (a.outward.dot(gap) <= 0.0 || b.outward.dot(-gap) <= 0.0) return false;
  return line_distance<double>(b.point, a.point - a.outward, a.point) <= lateral &&
         line_distance<double>(a.point, b.point - b.outward, b.point) <= lateral;
}

// Qualifying end pairs, reduced to a matching: each end joins at most once and no chain closes
// on itself. Pairs are taken shortest gap first with coordinate tie-breaks, so the result does
// not depend on entity order.
JoinPlan plan_joins(const CadDocument& doc, const Tolerances& tol) {
  JoinPlan plan;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const auto& e = doc.entities[i];
    if (const auto* t = std::get_if<TextGeom>(&e.geometry)) {
      plan.texts.push_back(t->insert);
      plan.text_content.push_back(t->content);
      continue;
    }
    const auto v = open_chain_vertices(e);
    if (v.size() < 2) continue;
    plan.ends.push_back(EntityEnd{i, 0, v.front(), v.front() - v[1]});
    plan.ends.push_back(EntityEnd{i, 1, v.back(), v.back() - v[v.size() - 2]});
  }
  if (plan.texts.empty() || plan.ends.empty()) return plan;

  std::vector<Point2> end_points;
  end_points.reserve(plan.ends.size());
  for (const auto& end : plan.ends) end_points.push_back(end.point);
  const PointGrid end_grid(end_points, tol.gap_bridge);
  const PointGrid text_grid(plan.texts, tol.gap_bridge);

  std::vector<Join> candidates;
  for (std::size_t ia = 0; ia < plan.ends.size(); ++ia) {
    const auto& a = plan.ends[ia];
    end_grid.for_each_within(a.point, tol.gap_bridge, [&](std::size_t ib) {
      const auto& b = plan.ends[ib];
      if (b.entity <= a.entity) return;
      if (doc.entities[a.entity].layer != doc.entities[b.entity].layer) return;
      const double gap = (b.point - a.point).norm();
      if (!(gap > 0.0) || gap > tol.gap_bridge) return;
      if (!collinear_across_gap(a, b, tol.lateral_offset)) return;
      const Point2 mid = (a.point + b.point) / 2.0;
      bool near_text = false;
      text_grid.for_each_within(mid, tol.gap_bridge, [&](std::size_t) { near_text = true; });
      if (near_text) candidates.push_back(Join{ia, ib, gap});
    });
  }

  auto key = [&](const Join& j) {
    Point2 p = plan.ends[j.a].point, q = plan.ends[j.b].point;
    Point2 pn = plan.ends[j.a].outward, qn = plan.ends[j.b].outward;
    if (lex_less(q, p) || (same_point(p, q) && lex_less(qn, pn))) {
      std::swap(p, q);
      std::swap(pn, qn);
    }
    return std::array<double, 9>{j.gap, p.x(), p.y(), q.x(), q.y(), pn.x(), pn.y(), qn.x(), qn.y()};
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const Join& l, const Join& r) { return key(l) < key(r); });

  std::vector<bool> used(plan.ends.size(), false);
  UnionFind chains(doc.entities.size());
  for (const auto& j : candidates) {
    if (used[j.a] || used[j.b]) continue;
    if (!chains.unite(plan.ends[j.a].entity, plan.ends[j.b].entity)) continue;
    used[j.a] = used[j.b] = true;
    plan.joins.push_back(j);
  }
  return plan;
}

std::string format_gap_detail(double gap, const std::string& text) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", gap);
  return std::string("gap ") + buf + " bridged at text '" + text + "'";
}

}  // namespace

std::vector<std::size_t> gap_merge_partition(const CadDocument& doc, const Tolerances& tol) {
  const auto plan = plan_joins(doc, tol);
  UnionFind uf(doc.entities.size());
  for (const auto& j : plan.joins) uf.unite(plan.ends[j.a].entity, plan.ends[j.b].entity);
  return uf.labels();
}

CleanResult bridge_text_gaps(const CadDocument& doc, const Tolerances& tol) {
  const auto plan = plan_joins(doc, tol);
  CleanResult out;
  out.doc.source_name = doc.source_name;
  out.doc.discarded_z_values = doc.discarded_z_values;
  if (plan.joins.empty()) {
    out.doc = doc;
    return out;
  }

  const std::size_t n = doc.entities.size();
  // partner[entity][side] = (entity, side) on the other side of the join
  std::vector<std::array<std::optional<std::pair<std::size_t, int>>, 2>> partner(n);
  UnionFind uf(n);
  for (const auto& j : plan.joins) {
    const auto& a = plan.ends[j.a];
    const auto& b = plan.ends[j.b];
    partner[a.entity][a.side] = std::make_pair(b.entity, b.side);
    partner[b.entity][b.side] = std::make_pair(a.entity, a.side);
    uf.unite(a.entity, b.entity);

    const Point2 mid = (a.point + b.point) / 2.0;
    std::size_t nearest = 0;
    for (std::size_t t = 1; t < plan.texts.size(); ++t) {
      if ((plan.texts[t] - mid).norm() < (plan.texts[nearest] - mid).norm()) nearest = t;
    }
    out.fixes.push_back(CleanFix{FixKind::BridgedGap,
                                 {doc.entities[a.entity].handle, doc.entities[b.entity].handle},
                                 format_gap_detail(j.gap, plan.text_content[nearest])});
  }

  const auto labels = uf.labels();
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != i) continue;  // absorbed into an earlier entity's chain
    if (!partner[i][0] && !partner[i][1]) {
      out.doc.entities.push_back(doc.entities[i]);
      continue;
    }
    // Walk from the lowest-index terminal of the chain.
    std::size_t start = n;
    for (std::size_t k = i; k < n && start == n; ++k) {
      if (labels[k] == i && (!partner[k][0] || !partner[k][1])) start = k;
    }
    std::vector<Point2> merged;
    std::size_t current = start;
    int entry = partner[start][0] ? 1 : 0;
    while (true) {
      auto v = open_chain_vertices(doc.entities[current]);
      if (entry == 1) std::reverse(v.begin(), v.end());
      merged.insert(merged.end(), v.begin(), v.end());
      const auto& next = partner[current][1 - entry];
      if (!next) break;
      current = next->first;
      entry = next->second;
    }
    if (lex_less(merged.back(), merged.front())) std::reverse(merged.begin(), merged.end());

    CadEntity e = doc.entities[i];
    e.geometry = PolylineGeom{std::move(merged), false};
    out.doc.entities.push_back(std::move(e));
  }
  return out;
}

namespace {

void append_double(std::string& key, double v) {
  if (v == 0.0) v = 0.0;  // -0.0 and 0.0 compare equal
  const auto bits = std::bit_cast<std::uint64_t>(v);
  key.append(reinterpret_cast<const char*>(&bits), sizeof bits);
}

void append_point(std::string& key, const Point2& p) {
  append_double(key, p.x());
  append_double(key, p.y());
}

std::string identity_key(const CadEntity& e) {
  std::string key;
  key += static_cast<char>(e.kind());
  key += e.layer;
  key += '\0';
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, LineGeom>) {
          append_point(key, g.start);
          append_point(key, g.end);
        } else if constexpr (std::is_same_v<G, PolylineGeom>) {
          key += g.closed ? 'c' : 'o';
          for (const auto& v : g.vertices) append_point(key, v);
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          append_point(key, g.center);
          append_double(key, g.radius);
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          append_point(key, g.center);
          append_double(key, g.radius);
          append_double(key, g.start_angle);
          append_double(key, g.end_angle);
        } else if constexpr (std::is_same_v<G, TextGeom>) {
          append_point(key, g.insert);
          key += g.content;
        } else {
          key += g.type_name;
          key += '\0';
          key += g.reason;
        }
      },
      e.geometry);
  return key;
}

}  // namespace

CleanResult dedupe_entities(const CadDocument& doc) {
  CleanResult out;
  out.doc.source_name = doc.source_name;
  out.doc.discarded_z_values = doc.discarded_z_values;
  std::unordered_map<std::string, std::string> first_handle;
  for (const auto& e : doc.entities) {
    // Unsupported records carry no geometry to compare.
    if (e.kind() == EntityKind::Unsupported) {
      out.doc.entities.push_back(e);
      continue;
    }
    auto [it, inserted] = first_handle.emplace(identity_key(e), e.handle);
    if (!inserted) {
      out.fixes.push_back(CleanFix{FixKind::Deduped,
                                   {e.handle, it->second},
                                   "duplicate of " + it->second + " on layer '" + e.layer + "'"});
      continue;
    }
    out.doc.entities.push_back(e);
  }
  return out;
}

}  // namespace cad2gis
