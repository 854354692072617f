#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "draco/data.hpp"
#include "draco/solver.hpp"

namespace {

using namespace draco;

const KnowledgeBase& kb() { return default_knowledge_base(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Facts weather_schema() {
  static const Facts facts = schema_to_facts(infer_schema(read_file(DRACO_TEST_DATA "/seattle-weather.csv")));
  return facts;
}

Facts with_schema(const std::string& text) {
  Facts f = weather_schema();
  for (auto& x : parse_facts(text)) f.push_back(x);
  return f;
}

// A small complete chart: bar of mean temp_max per weather.
const char* kBar = R"(
entity(view,root,v0).
attribute((view,coordinates),v0,cartesian).
entity(mark,v0,m0).
attribute((mark,type),m0,bar).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,x).
attribute((encoding,field),e0,"weather").
entity(encoding,m0,e1).
attribute((encoding,channel),e1,y).
attribute((encoding,field),e1,"temp_max").
attribute((encoding,aggregate),e1,mean).
entity(scale,v0,s0).
attribute((scale,channel),s0,x).
attribute((scale,type),s0,categorical).
entity(scale,v0,s1).
attribute((scale,channel),s1,y).
attribute((scale,type),s1,linear).
)";

TEST(Validate, BarIsValid) { EXPECT_EQ(validate(kb(), with_schema(kBar)), std::vector<std::string>{}); }

TEST(Validate, CircleIsOutOfDomain) {
  std::string text = kBar;
  text.replace(text.find("m0,bar"), 6, "m0,circle");
  EXPECT_EQ(validate(kb(), with_schema(text)), std::vector<std::string>{"invalid_domain"});
}

TEST(Validate, LineWithSize) {
  Facts f = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,line).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,x).
attribute((encoding,field),e0,"date").
entity(encoding,m0,e1).
attribute((encoding,channel),e1,y).
attribute((encoding,field),e1,"temp_max").
entity(encoding,m0,e2).
attribute((encoding,channel),e2,size).
attribute((encoding,field),e2,"wind").
entity(scale,v0,s0).
attribute((scale,channel),s0,x).
attribute((scale,type),s0,linear).
entity(scale,v0,s1).
attribute((scale,channel),s1,y).
attribute((scale,type),s1,linear).
entity(scale,v0,s2).
attribute((scale,channel),s2,size).
attribute((scale,type),s2,linear).
)");
  auto hard = validate(kb(), f);
  EXPECT_NE(std::find(hard.begin(), hard.end(), "size_without_point_text"), hard.end());
}

TEST(Validate, MissingRequiredIsDistinct) {
  Facts f = with_schema("entity(view,root,v0). entity(mark,v0,m0).");
  try {
    validate(kb(), f);
    FAIL();
  } catch (const IncompleteSpecError& e) {
    ASSERT_EQ(e.missing().size(), 1u);
    EXPECT_NE(e.missing()[0].find("(mark,type)"), std::string::npos);
  }
}

TEST(Validate, IntegrityConstraintIsInconsistent) {
  Facts f = with_schema(kBar);
  f.push_back(Fact::attribute({"mark", "type"}, Symbol{"m0"}, Symbol{"point"}));
  auto hard = validate(kb(), f);
  EXPECT_NE(std::find(hard.begin(), hard.end(), "inconsistent"), hard.end());
}

TEST(CountViolations, DatetimeOnY) {
  Facts f = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,line).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,x).
attribute((encoding,field),e0,"temp_max").
entity(encoding,m0,e1).
attribute((encoding,channel),e1,y).
attribute((encoding,field),e1,"date").
entity(scale,v0,s0).
attribute((scale,channel),s0,x).
attribute((scale,type),s0,linear).
entity(scale,v0,s1).
attribute((scale,channel),s1,y).
attribute((scale,type),s1,linear).
)");
  EXPECT_TRUE(validate(kb(), f).empty());
  auto v = count_violations(kb(), f);
  EXPECT_EQ(v.at("time_not_x"), 1);
  EXPECT_EQ(v.at("encoding_count"), 2);
  EXPECT_EQ(v.size(), kb().soft_names().size());
}

TEST(CountViolations, ThreeEncodings) {
  Facts f = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,point).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,x).
attribute((encoding,field),e0,"temp_max").
entity(encoding,m0,e1).
attribute((encoding,channel),e1,y).
attribute((encoding,field),e1,"wind").
entity(encoding,m0,e2).
attribute((encoding,channel),e2,color).
attribute((encoding,field),e2,"weather").
entity(scale,v0,s0).
attribute((scale,channel),s0,x).
attribute((scale,type),s0,linear).
entity(scale,v0,s1).
attribute((scale,channel),s1,y).
attribute((scale,type),s1,linear).
entity(scale,v0,s2).
attribute((scale,channel),s2,color).
attribute((scale,type),s2,categorical).
)");
  EXPECT_TRUE(validate(kb(), f).empty());
  EXPECT_EQ(count_violations(kb(), f).at("encoding_count"), 3);
}

TEST(Cost, Arithmetic) {
  EXPECT_EQ(cost({{"a", 2}, {"b", 5}}, {{"a", 3}, {"b", 0}}), 6);
  EXPECT_EQ(cost({{"a", 2}}, {{"a", 0}}), 0);
  EXPECT_THROW(cost({{"a", 2}}, {{"b", 1}}), Error);
  auto v = count_violations(kb(), with_schema(kBar));
  Weights doubled = kb().weights;
  for (auto& [n, w] : doubled) w *= 2;
  EXPECT_EQ(cost(doubled, v), 2 * cost(kb().weights, v));
}

Query schema_only(std::size_t k) {
  Query q;
  q.base = with_schema("entity(view,root,v0). entity(mark,v0,m0).");
  q.k = k;
  return q;
}

bool has_attribute(const Facts& facts, const AttributePath& p, const Value& v) {
  return std::any_of(facts.begin(), facts.end(),
                     [&](const Fact& f) { return f.is_attribute() && f.path == p && f.value == v; });
}

TEST(Complete, SchemaOnlyTopFive) {
  SearchStats stats;
  auto models = complete_spec(kb(), schema_only(5), &stats);
  ASSERT_EQ(models.size(), 5u);
  for (std::size_t i = 0; i < models.size(); ++i) {
    EXPECT_TRUE(validate(kb(), models[i].facts).empty());
    EXPECT_EQ(models[i].cost, cost(kb().weights, models[i].violations));
    EXPECT_EQ(count_violations(kb(), models[i].facts), models[i].violations);
    if (i > 0) EXPECT_LE(models[i - 1].cost, models[i].cost);
  }
  EXPECT_TRUE(has_attribute(models[0].facts, {"encoding", "aggregate"}, Symbol{"count"})) << print_facts(models[0].facts);
}

TEST(Complete, LineWithSizeHasNoModels) {
  Query q;
  q.base = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,line).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,size).
)");
  q.k = 5;
  EXPECT_TRUE(complete_spec(kb(), q).empty());

  q.base = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,point).
entity(encoding,m0,e0).
attribute((encoding,channel),e0,size).
)");
  EXPECT_FALSE(complete_spec(kb(), q).empty());
}

TEST(Complete, CardinalityHint) {
  Query q = schema_only(3);
  q.extra_rules = asp::parse_program(":- {entity(encoding,_,_)} <= 2.");
  auto models = complete_spec(kb(), q);
  ASSERT_FALSE(models.empty());
  for (const auto& m : models) {
    auto n = std::count_if(m.facts.begin(), m.facts.end(),
                           [](const Fact& f) { return f.is_entity() && f.entity_kind == "encoding"; });
    EXPECT_GE(n, 3);
    EXPECT_TRUE(assess(kb(), m.facts, q.extra_rules).valid());
  }
}

TEST(Complete, ChoiceRulesInHintsAreRejected) {
  Query q = schema_only(1);
  q.extra_rules = asp::parse_program("{ attribute((mark,type),m0,V) : domain((mark,type),V) } = 1.");
  EXPECT_THROW(complete_spec(kb(), q), ProgramError);
}

TEST(Complete, Deterministic) {
  auto a = complete_spec(kb(), schema_only(4));
  auto b = complete_spec(kb(), schema_only(4));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(print_facts(a[i].facts), print_facts(b[i].facts));
}

TEST(Complete, WeightScalingKeepsRanking) {
  auto base = complete_spec(kb(), schema_only(5));
  Weights tripled = kb().weights;
  for (auto& [n, w] : tripled) w *= 3;
  auto scaled = complete_spec(with_weights(kb(), tripled), schema_only(5));
  ASSERT_EQ(base.size(), scaled.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(print_facts(base[i].facts), print_facts(scaled[i].facts));
    EXPECT_EQ(scaled[i].cost, 3 * base[i].cost);
  }
}

TEST(Complete, BaseIsKept) {
  Query q;
  q.base = with_schema(R"(
entity(view,root,v0).
entity(mark,v0,m0).
attribute((mark,type),m0,tick).
)");
  q.k = 3;
  for (const auto& m : complete_spec(kb(), q)) {
    EXPECT_TRUE(has_attribute(m.facts, {"mark", "type"}, Symbol{"tick"}));
  }
}

TEST(Complete, ZeroKIsAnError) { EXPECT_THROW(complete_spec(kb(), schema_only(0)), Error); }

}  // namespace
