#include <gtest/gtest.h>

#include "cad2gis/error.hpp"
#include "cad2gis/profile.hpp"
#include "fixtures.hpp"

using namespace cad2gis;

namespace {

std::string field_of(const std::string& json) {
  try {
    load_profile(json);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(LoadProfile, MinimalProfileGetsDefaults) {
  const auto p = load_profile(R"({"rules":[{"match":"*","action":"line"}],"crs":{"epsg":3435}})");
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.rules[0].action, LayerAction::Line);
  EXPECT_EQ(p.crs.epsg, 3435);
  EXPECT_FALSE(p.crs.wkt.has_value());
  EXPECT_EQ(p.transform_model, TransformModel::Similarity);
  const Tolerances t = p.tolerances;
  EXPECT_EQ(t.gap_bridge, 2.0);
  EXPECT_EQ(t.lateral_offset, 0.1);
  EXPECT_EQ(t.snap, 0.05);
  EXPECT_EQ(t.ring_close, 0.05);
  EXPECT_EQ(t.annotation_attach, 2.0);
  EXPECT_EQ(t.arc_chord, 0.05);
  EXPECT_EQ(t.dangle, 0.05);
}

TEST(LoadProfile, CollapseRequiresPointAction) {
  EXPECT_EQ(field_of(R"({"rules":[{"match":"X","action":"drop","collapse":"centroid"}],"crs":{"epsg":1}})"),
            "rules[0].collapse");
}

TEST(LoadProfile, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"rules":[{"match":"X","action":"explode"}],"crs":{"epsg":1}})"), "rules[0].action");
  EXPECT_EQ(field_of(R"({"rules":[],"tolerances":{"snap":-1},"crs":{"epsg":1}})"), "tolerances.snap");
  EXPECT_EQ(field_of(R"({"rules":[],"tolerances":{"arc_chord":0},"crs":{"epsg":1}})"), "tolerances.arc_chord");
  EXPECT_EQ(field_of(R"({"rules":[]})"), "crs.epsg");
  EXPECT_EQ(field_of(R"({"rules":[],"crs":{}})"), "crs.epsg");
  EXPECT_EQ(field_of(R"({"rules":[],"crs":{"epsg":0}})"), "crs.epsg");
  EXPECT_EQ(field_of(R"({"rules":[],"crs":{"epsg":1},"colour":"red"})"), "colour");
  EXPECT_EQ(field_of(R"({"rules":[{"match":"X","action":"line","extra":1}],"crs":{"epsg":1}})"),
            "rules[0].extra");
  EXPECT_EQ(field_of(R"({"rules":[],"crs":{"epsg":1},"transform_model":"projective"})"), "transform_model");
  EXPECT_EQ(field_of("not json"), "profile");
}

TEST(ClassifyLayer, FirstMatchWins) {
  const auto p = load_profile(
      R"({"rules":[{"match":"MH*","action":"point"},{"match":"*","action":"line"}],"crs":{"epsg":1}})");
  EXPECT_EQ(classify_layer(p, "MH1"), LayerAction::Point);
  EXPECT_EQ(classify_layer(p, "PIPE"), LayerAction::Line);
}

TEST(ClassifyLayer, DropRuleAndUnmappedDefault) {
  const auto p = load_profile(
      R"({"rules":[{"match":"SIDEWALK","action":"drop"},{"match":"MH?","action":"point"}],"crs":{"epsg":1}})");
  EXPECT_EQ(classify_layer(p, "SIDEWALK"), LayerAction::Drop);
  EXPECT_EQ(classify_layer(p, "MISC"), LayerAction::Drop);
  EXPECT_EQ(match_rule(p, "MISC"), nullptr);
  EXPECT_EQ(classify_layer(p, "MH7"), LayerAction::Point);
  EXPECT_EQ(classify_layer(p, "MH17"), LayerAction::Drop);
}

TEST(GlobMatch, StarQuestionAndCase) {
  EXPECT_TRUE(glob_match("*", ""));
  EXPECT_TRUE(glob_match("C*T", "CONDUIT"));
  EXPECT_TRUE(glob_match("*-TXT", "STORM-TXT"));
  EXPECT_TRUE(glob_match("a*b*c", "aXXbYYbc"));
  EXPECT_FALSE(glob_match("a*b*c", "aXXbYYb"));
  EXPECT_FALSE(glob_match("mh", "MH"));
  EXPECT_FALSE(glob_match("?", ""));
  EXPECT_TRUE(glob_match("[x]", "[x]"));  // no bracket classes
}

TEST(ProfileProperty, SerializeRoundTrip) {
  fixtures::Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    auto p = fixtures::random_profile(rng);
    if (i % 2) p.crs.wkt = "GEOGCS[\"x\"]";
    if (i % 3 == 0) p.transform_model = TransformModel::Affine;
    EXPECT_EQ(load_profile(serialize_profile(p)), p);
    EXPECT_EQ(serialize_profile(load_profile(serialize_profile(p))), serialize_profile(p));
  }
}
