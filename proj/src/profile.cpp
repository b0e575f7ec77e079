#include "cad2gis/profile.hpp"

#include <cmath>
#include <initializer_list>

#include <json.hpp>

#include "cad2gis/error.hpp"

namespace cad2gis {

using nlohmann::json;

std::string_view to_string(LayerAction action) {
  switch (action) {
    case LayerAction::Drop: return "drop";
    case LayerAction::Point: return "point";
    case LayerAction::Line: return "line";
    case LayerAction::Polygon: return "polygon";
    case LayerAction::Annotation: return "annotation";
    case LayerAction::ReferenceOnly: return "reference-only";
  }
  return "drop";
}

std::string_view to_string(TransformModel model) {
  return model == TransformModel::Affine ? "affine" : "similarity";
}

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t resume = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      resume = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++resume;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(where + key, "unknown key");
  }
}

const json& require_object(const json& v, const std::string& field) {
  if (!v.is_object()) throw ValidationError(field, "expected an object");
  return v;
}

std::string require_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "expected a string");
  return v.get<std::string>();
}

LayerAction parse_action(const std::string& s, const std::string& field) {
  static constexpr LayerAction all[] = {LayerAction::Drop,    LayerAction::Point,
                                        LayerAction::Line,    LayerAction::Polygon,
                                        LayerAction::Annotation, LayerAction::ReferenceOnly};
  for (auto a : all) {
    if (to_string(a) == s) return a;
  }
  throw ValidationError(field, "unknown action '" + s + "'");
}

LayerRule parse_rule(const json& v, const std::string& field) {
  require_object(v, field);
  reject_unknown_keys(v, field + ".", {"match", "action", "collapse", "attributes"});
  LayerRule rule;
  if (!v.contains("match")) throw ValidationError(field + ".match", "missing");
  if (!v.contains("action")) throw ValidationError(field + ".action", "missing");
  rule.match = require_string(v["match"], field + ".match");
  rule.action = parse_action(require_string(v["action"], field + ".action"), field + ".action");
  if (v.contains("collapse")) {
    const auto c = require_string(v["collapse"], field + ".collapse");
    if (c != "centroid") throw ValidationError(field + ".collapse", "unknown collapse '" + c + "'");
    if (rule.action != LayerAction::Point) {
      throw ValidationError(field + ".collapse", "collapse requires action 'point'");
    }
    rule.collapse = Collapse::Centroid;
  }
  if (v.contains("attributes")) {
    const auto& attrs = require_object(v["attributes"], field + ".attributes");
    for (const auto& [key, value] : attrs.items()) {
      rule.attributes[key] = require_string(value, field + ".attributes." + key);
    }
  }
  return rule;
}

Tolerances parse_tolerances(const json& v) {
  require_object(v, "tolerances");
  Tolerances tol;
  const std::pair<const char*, double*> fields[] = {
      {"gap_bridge", &tol.gap_bridge},
      {"lateral_offset", &tol.lateral_offset},
      {"snap", &tol.snap},
      {"ring_close", &tol.ring_close},
      {"annotation_attach", &tol.annotation_attach},
      {"arc_chord", &tol.arc_chord},
      {"dangle", &tol.dangle},
  };
  for (const auto& [key, value] : v.items()) {
    double* slot = nullptr;
    for (const auto& [name, ptr] : fields) {
      if (key == name) slot = ptr;
    }
    const std::string field = "tolerances." + key;
    if (slot == nullptr) throw ValidationError(field, "unknown key");
    if (!value.is_number()) throw ValidationError(field, "expected a number");
    const double d = value.get<double>();
    if (!std::isfinite(d) || d < 0.0) throw ValidationError(field, "must be a finite non-negative number");
    *slot = d;
  }
  if (!(tol.arc_chord > 0.0)) throw ValidationError("tolerances.arc_chord", "must be strictly positive");
  return tol;
}

Crs parse_crs(const json& v) {
  require_object(v, "crs");
  reject_unknown_keys(v, "crs.", {"epsg", "wkt"});
  if (!v.contains("epsg")) throw ValidationError("crs.epsg", "missing");
  if (!v["epsg"].is_number_integer()) throw ValidationError("crs.epsg", "expected an integer");
  Crs crs;
  const auto code = v["epsg"].get<long long>();
  if (code <= 0 || code > 2147483647LL) throw ValidationError("crs.epsg", "must be a positive EPSG code");
  crs.epsg = static_cast<int>(code);
  if (v.contains("wkt")) crs.wkt = require_string(v["wkt"], "crs.wkt");
  return crs;
}

}  // namespace

ConversionProfile load_profile(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("profile", std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "profile");
  reject_unknown_keys(doc, "", {"rules", "tolerances", "crs", "transform_model"});

  ConversionProfile profile;
  if (!doc.contains("rules")) throw ValidationError("rules", "missing");
  if (!doc["rules"].is_array()) throw ValidationError("rules", "expected an array");
  for (std::size_t i = 0; i < doc["rules"].size(); ++i) {
    profile.rules.push_back(parse_rule(doc["rules"][i], "rules[" + std::to_string(i) + "]"));
  }
  if (doc.contains("tolerances")) profile.tolerances = parse_tolerances(doc["tolerances"]);
  if (!doc.contains("crs")) throw ValidationError("crs.epsg", "missing");
  profile.crs = parse_crs(doc["crs"]);
  if (doc.contains("transform_model")) {
    const auto m = require_string(doc["transform_model"], "transform_model");
    if (m == "similarity") {
      profile.transform_model = TransformModel::Similarity;
    } else if (m == "affine") {
      profile.transform_model = TransformModel::Affine;
    } else {
      throw ValidationError("transform_model", "unknown model '" + m + "'");
    }
  }
  return profile;
}

std::string serialize_profile(const ConversionProfile& profile) {
  json rules = json::array();
  for (const auto& r : profile.rules) {
    json rule = {{"match", r.match}, {"action", std::string(to_string(r.action))}};
    if (r.collapse == Collapse::Centroid) rule["collapse"] = "centroid";
    if (!r.attributes.empty()) rule["attributes"] = r.attributes;
    rules.push_back(std::move(rule));
  }
  const auto& t = profile.tolerances;
  json crs = {{"epsg", profile.crs.epsg}};
  if (profile.crs.wkt) crs["wkt"] = *profile.crs.wkt;
  json doc = {
      {"rules", std::move(rules)},
      {"tolerances",
       {{"gap_bridge", t.gap_bridge},
        {"lateral_offset", t.lateral_offset},
        {"snap", t.snap},
        {"ring_close", t.ring_close},
        {"annotation_attach", t.annotation_attach},
        {"arc_chord", t.arc_chord},
        {"dangle", t.dangle}}},
      {"crs", std::move(crs)},
      {"transform_model", std::string(to_string(profile.transform_model))},
  };
  return doc.dump(2) + "\n";
}

const LayerRule* match_rule(const ConversionProfile& profile, std::string_view layer) {
  for (const auto& rule : profile.rules) {
    if (glob_match(rule.match, layer)) return &rule;
  }
  return nullptr;
}

LayerAction classify_layer(const ConversionProfile& profile, std::string_view layer) {
  const auto* rule = match_rule(profile, layer);
  return rule ? rule->action : LayerAction::Drop;
}

}  // namespace cad2gis
