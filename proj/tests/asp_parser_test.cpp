#include <gtest/gtest.h>

#include <random>

#include "draco/asp/parser.hpp"
#include "draco/asp/stratify.hpp"
#include "oracles/random_programs.hpp"

namespace {

using namespace draco::asp;

const char* kInvalidDomain = "violation(invalid_domain) :- attribute(P,_,V), domain(P,_), not domain(P,V).";
const char* kMarkDomain = "domain((mark,type),(point;bar;line;area;text;tick;rect)).";
const char* kGenerate = "{ attribute((N,A),E,V): domain((N,A),V) } = 1 :- entity(N,_,E), required((N,A)).";
const char* kEncodingHint = ":- {entity(encoding,_,_)} <= 2.";

TEST(AspParser, InvalidDomainRule) {
  Program p = parse_program(kInvalidDomain);
  ASSERT_EQ(p.blocks.size(), 1u);
  ASSERT_EQ(p.blocks[0].rules.size(), 1u);
  const Rule& r = p.blocks[0].rules[0];
  ASSERT_NE(r.head_atom(), nullptr);
  EXPECT_EQ(to_string(*r.head_atom()), "violation(invalid_domain)");
  ASSERT_EQ(r.body.size(), 3u);
  EXPECT_EQ(r.body[0].kind, BodyLiteral::Kind::positive);
  EXPECT_EQ(r.body[1].kind, BodyLiteral::Kind::positive);
  EXPECT_EQ(r.body[2].kind, BodyLiteral::Kind::negated);
}

TEST(AspParser, DomainPool) {
  Program p = parse_program(kMarkDomain);
  const Rule& r = p.blocks[0].rules[0];
  ASSERT_TRUE(r.is_fact());
  const Term& pool = r.head_atom()->args[1];
  ASSERT_EQ(pool.kind, Term::Kind::pool);
  EXPECT_EQ(pool.args.size(), 7u);
  EXPECT_EQ(r.head_atom()->args[0], Term::tuple({Term::symbol("mark"), Term::symbol("type")}));
}

TEST(AspParser, ChoiceRule) {
  Program p = parse_program(kGenerate);
  const Rule& r = p.blocks[0].rules[0];
  ASSERT_TRUE(r.is_choice());
  const auto& choice = std::get<ChoiceHead>(r.head);
  EXPECT_EQ(choice.bound, 1);
  EXPECT_EQ(to_string(choice.element), "attribute((N,A),E,V)");
  EXPECT_EQ(to_string(choice.condition), "domain((N,A),V)");
  EXPECT_EQ(r.body.size(), 2u);
}

TEST(AspParser, CardinalityConstraint) {
  Program p = parse_program(kEncodingHint);
  const Rule& r = p.blocks[0].rules[0];
  EXPECT_TRUE(r.is_constraint());
  ASSERT_EQ(r.body.size(), 1u);
  ASSERT_EQ(r.body[0].kind, BodyLiteral::Kind::cardinality);
  EXPECT_EQ(r.body[0].cardinality.op, CompareOp::le);
  EXPECT_EQ(r.body[0].cardinality.bound, 2);
}

TEST(AspParser, VerbatimRulesPrintCanonically) {
  for (const char* text : {kInvalidDomain, kMarkDomain, kGenerate, kEncodingHint}) {
    Program p = parse_program(text);
    EXPECT_EQ(to_string(p.blocks[0].rules[0]), text);
    EXPECT_EQ(parse_program(to_string(p)), p);
  }
}

TEST(AspParser, BlocksAndDescriptions) {
  const char* text =
      "%% invalid_domain\n"
      "% Only valid domain values.\n"
      "% Second line.\n"
      "violation(invalid_domain) :- attribute(P,_,V), domain(P,_), not domain(P,V).\n"
      "\n"
      "%% other\n"
      "p(1).\n"
      "% trailing comments are not descriptions\n"
      "q(X) :- p(X).  % nor are these\n";
  Program p = parse_program(text);
  ASSERT_EQ(p.blocks.size(), 2u);
  EXPECT_EQ(p.blocks[0].name, "invalid_domain");
  EXPECT_EQ(p.blocks[0].description, "Only valid domain values.\nSecond line.");
  EXPECT_EQ(p.blocks[1].name, "other");
  EXPECT_EQ(p.blocks[1].description, "");
  EXPECT_EQ(p.blocks[1].rules.size(), 2u);
  EXPECT_EQ(parse_program(to_string(p)), p);
}

TEST(AspParser, TermsAndComparisons) {
  Program p = parse_program("r(X,\"Temp Max\",-3,(a,),()) :- s(X,Y), X != Y, Y >= -2, bar = X, (X,Y) < (1,2).");
  const Rule& r = p.blocks[0].rules[0];
  EXPECT_EQ(r.head_atom()->args[1], Term::string("Temp Max"));
  EXPECT_EQ(r.head_atom()->args[2], Term::integer(-3));
  EXPECT_EQ(r.head_atom()->args[3], Term::tuple({Term::symbol("a")}));
  EXPECT_EQ(r.head_atom()->args[4], Term::tuple({}));
  EXPECT_EQ(r.body.size(), 5u);
  EXPECT_EQ(r.body[3].comparison.lhs, Term::symbol("bar"));
  EXPECT_EQ(parse_program(to_string(p)), p);
}

TEST(AspParser, SyntaxErrorsCarryPosition) {
  try {
    parse_program("p(a).\nq(b) :- p(.\n");
    FAIL() << "expected ParseError";
  } catch (const draco::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 11u);
  }
  EXPECT_THROW(parse_program("p(a)"), draco::ParseError);
  EXPECT_THROW(parse_program("p(\"unterminated)."), draco::ParseError);
}

TEST(AspParser, RejectsDirectives) {
  try {
    parse_program("p(1).\n#show p/1.\n");
    FAIL();
  } catch (const draco::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported directive '#show'"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(AspParser, RejectsUnsafeRules) {
  EXPECT_THROW(parse_program("p(X) :- q(Y)."), draco::ParseError);
  EXPECT_THROW(parse_program("p(X)."), draco::ParseError);
  EXPECT_THROW(parse_program("p(a) :- q(Y), not r(Z)."), draco::ParseError);
  EXPECT_THROW(parse_program("p(a) :- q(Y), Y < Z."), draco::ParseError);
  EXPECT_THROW(parse_program("p(a) :- q(Y), Y < _."), draco::ParseError);
  EXPECT_THROW(parse_program("{ p(X,V): d(V) } = 1 :- q(Y)."), draco::ParseError);
  EXPECT_THROW(parse_program("p((a;b)) :- q(1)."), draco::ParseError);
  // Anonymous variables under negation are fine.
  EXPECT_NO_THROW(parse_program("p(Y) :- q(Y), not r(Y,_)."));
}

TEST(AspParser, ChoiceBoundMustBeOne) {
  EXPECT_THROW(parse_program("{ p(V): d(V) } = 2."), draco::ParseError);
}

TEST(AspParser, DuplicateBlockName) {
  EXPECT_THROW(parse_program("%% a\np(1).\n%% a\np(2).\n"), draco::ParseError);
}

TEST(AspParser, EmptyInput) {
  EXPECT_TRUE(parse_program("").blocks.empty());
  EXPECT_TRUE(parse_program("% only a comment\n").blocks.empty());
}

TEST(AspParser, RandomProgramsRoundTrip) {
  oracle::ProgramGenerator gen(7);
  for (int i = 0; i < 300; ++i) {
    auto c = gen.next();
    std::string text = to_string(c.program);
    Program reparsed = parse_program(text);
    ASSERT_EQ(reparsed, c.program) << text;
    EXPECT_EQ(to_string(reparsed), text);
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> names(const std::vector<PredicateKey>& layer) {
  std::vector<std::string> out;
  for (const auto& k : layer) out.push_back(k.name);
  return out;
}

TEST(Stratify, InvalidDomainProgram) {
  // Hand-built dependency graph: violation depends on attribute and domain
  // positively and on domain negatively; helper depends on entity.
  Program p = parse_program(std::string(kInvalidDomain) + "\nhas_field(E) :- entity(field,_,E).");
  auto strata = stratify(p);
  ASSERT_EQ(strata.size(), 2u);
  EXPECT_EQ(names(strata[0]), (std::vector<std::string>{"attribute", "domain", "entity", "has_field"}));
  EXPECT_EQ(names(strata[1]), (std::vector<std::string>{"violation"}));
}

TEST(Stratify, SelfNegationIsRejected) {
  try {
    stratify(parse_program("p :- not p."));
    FAIL();
  } catch (const draco::ProgramError& e) {
    EXPECT_NE(std::string(e.what()).find("p/0"), std::string::npos);
  }
  EXPECT_THROW(stratify(parse_program("p(X) :- q(X), not r(X).\nr(X) :- q(X), {p(_)} >= 1.")), draco::ProgramError);
}

TEST(Stratify, EmptyProgram) { EXPECT_TRUE(stratify(Program{}).empty()); }

TEST(Stratify, PositiveRecursionSharesALayer) {
  auto strata = stratify(parse_program("path(X,Y) :- edge(X,Y).\npath(X,Z) :- path(X,Y), edge(Y,Z).\n"
                                       "unreachable(X,Y) :- node(X), node(Y), not path(X,Y)."));
  ASSERT_EQ(strata.size(), 2u);
  EXPECT_EQ(names(strata[0]), (std::vector<std::string>{"edge", "node", "path"}));
  EXPECT_EQ(names(strata[1]), (std::vector<std::string>{"unreachable"}));
}

}  // namespace
