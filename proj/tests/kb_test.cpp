#include <gtest/gtest.h>

#include <filesystem>

#include "draco/asp/eval.hpp"
#include "draco/kb.hpp"

namespace {

using namespace draco;

const KnowledgeBase& kb() { return default_knowledge_base(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("draco_kb_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// Values listed by a `domain` fact for a property, via evaluation.
std::vector<std::string> domain_values(const std::string& property) {
  asp::Program defs = kb().program(Role::definitions);
  auto model = asp::evaluate(defs, {});
  std::vector<std::string> out;
  for (const auto& a : model.atoms) {
    if (a.predicate == "domain" && asp::to_string(a.args[0]) == property) out.push_back(asp::to_string(a.args[1]));
  }
  return out;
}

TEST(Kb, DefaultShape) {
  EXPECT_EQ(domain_values("(mark,type)").size(), 7u);
  EXPECT_EQ(domain_values("(encoding,channel)").size(), 6u);
  EXPECT_EQ(domain_values("(scale,type)").size(), 4u);
  EXPECT_EQ(kb().hard_names().size(), 22u);
  EXPECT_EQ(kb().soft_names().size(), 34u);
  EXPECT_TRUE(check_kb(kb()).empty());
}

TEST(Kb, DocumentationIsListed) {
  auto blocks = list_blocks(kb());
  auto it = std::find_if(blocks.begin(), blocks.end(), [](const BlockInfo& b) { return b.name == "size_without_point_text"; });
  ASSERT_NE(it, blocks.end());
  EXPECT_EQ(it->role, Role::hard);
  EXPECT_NE(it->description.find("only works when using point or text"), std::string::npos);
  EXPECT_FALSE(it->weight);
  for (const auto& b : blocks) {
    if (b.role == Role::soft) EXPECT_TRUE(b.weight) << b.name;
  }
  EXPECT_TRUE(list_blocks(KnowledgeBase{}).empty());
}

TEST(Kb, ListingOrderFollowsRolesThenFiles) {
  auto blocks = list_blocks(kb());
  for (std::size_t i = 1; i < blocks.size(); ++i) EXPECT_LE(blocks[i - 1].role, blocks[i].role);
  EXPECT_EQ(blocks.front().name, "kinds");
}

TEST(Kb, DirectoryRoundTrip) {
  auto dir = temp_dir("roundtrip");
  save_kb(kb(), dir);
  EXPECT_EQ(load_kb(dir), kb());
  EXPECT_EQ(kb_from_sources(kb_sources(kb())), kb());
}

TEST(Kb, OrphanWeightIsNamed) {
  auto sources = kb_sources(kb());
  auto w = parse_weights(sources["weights"]);
  w["no_such_block"] = 3;
  sources["weights"] = weights_to_json(w);
  try {
    kb_from_sources(sources);
    FAIL();
  } catch (const KbError& e) {
    ASSERT_EQ(e.problems().size(), 1u);
    EXPECT_NE(e.problems()[0].find("no_such_block"), std::string::npos);
  }
}

TEST(Kb, ProblemsAreReportedTogether) {
  auto sources = kb_sources(kb());
  auto w = parse_weights(sources["weights"]);
  w.erase("time_not_x");
  w["invalid_domain"] = 1;
  w["encoding_count"] = -1;
  sources["weights"] = weights_to_json(w);
  try {
    kb_from_sources(sources);
    FAIL();
  } catch (const KbError& e) {
    EXPECT_EQ(e.problems().size(), 3u) << e.what();
  }
}

TEST(Kb, MissingRoleFile) {
  auto dir = temp_dir("missing");
  save_kb(kb(), dir);
  std::filesystem::remove(dir / "hard.lp");
  EXPECT_THROW(load_kb(dir), KbError);
  EXPECT_THROW(load_kb(dir / "nope"), KbError);
}

TEST(Kb, EmptySoftIsValid) {
  auto sources = kb_sources(kb());
  sources["soft"] = "";
  sources["weights"] = "{}";
  KnowledgeBase k = kb_from_sources(sources);
  EXPECT_TRUE(k.soft_names().empty());
}

TEST(Kb, RoleMisplacementIsRejected) {
  auto sources = kb_sources(kb());
  sources["hard"] += "\n%% sneaky\n% Declares a domain.\ndomain((mark,type),circle).\nviolation(sneaky) :- mark_type(_,circle).\n";
  EXPECT_THROW(kb_from_sources(sources), KbError);

  sources = kb_sources(kb());
  sources["soft"] += "\n%% wrong_name\nviolation(other_name,M) :- mark_type(M,bar).\n";
  auto w = parse_weights(sources["weights"]);
  w["wrong_name"] = 1;
  sources["weights"] = weights_to_json(w);
  EXPECT_THROW(kb_from_sources(sources), KbError);

  sources = kb_sources(kb());
  sources["definitions"] += "\n%% dup\ndomain((view,coordinates2),(a;a)).\n";
  EXPECT_THROW(kb_from_sources(sources), KbError);
}

TEST(Kb, Filter) {
  KnowledgeBase one = filter_blocks(kb(), {"invalid_domain"});
  EXPECT_EQ(one.hard_names(), std::vector<std::string>{"invalid_domain"});
  EXPECT_TRUE(one.soft_names().empty());
  EXPECT_TRUE(one.weights.empty());
  EXPECT_EQ(one.program(Role::definitions), kb().program(Role::definitions));

  KnowledgeBase none = filter_blocks(kb(), {});
  EXPECT_TRUE(none.hard_names().empty());
  EXPECT_TRUE(check_kb(none).empty());

  std::set<std::string> all;
  for (const auto& n : kb().hard_names()) all.insert(n);
  for (const auto& n : kb().soft_names()) all.insert(n);
  EXPECT_EQ(filter_blocks(kb(), all), kb());
  EXPECT_THROW(filter_blocks(kb(), {"nope"}), KbError);
}

TEST(Kb, SetWeight) {
  KnowledgeBase k = set_weight(kb(), "time_not_x", 14);
  EXPECT_EQ(k.weights.at("time_not_x"), 14);
  EXPECT_EQ(kb().weights.at("time_not_x"), 4);
  EXPECT_EQ(set_weight(kb(), "time_not_x", kb().weights.at("time_not_x")), kb());
  EXPECT_THROW(set_weight(kb(), "invalid_domain", 1), KbError);
  EXPECT_THROW(set_weight(kb(), "time_not_x", -1), KbError);
  EXPECT_EQ(set_weight(kb(), "time_not_x", 0).weights.at("time_not_x"), 0);
}

// Any declared domain value for a required property passes invalid_domain.
TEST(Kb, DomainValuesNeverTriggerInvalidDomain) {
  asp::Program p = kb().program(Role::definitions);
  p.append(filter_blocks(kb(), {"invalid_domain"}).program(Role::hard));
  for (const auto& prop : {"(mark,type)", "(encoding,channel)", "(scale,type)", "(scale,channel)", "(facet,channel)"}) {
    for (const auto& v : domain_values(prop)) {
      auto facts = asp::parse_rules(std::string("attribute(") + prop + ",e0," + v + ").");
      auto m = asp::evaluate(p, {*facts[0].head_atom()});
      EXPECT_FALSE(m.contains(asp::Atom{"violation", {asp::Term::symbol("invalid_domain")}})) << prop << " " << v;
    }
  }
}

}  // namespace
