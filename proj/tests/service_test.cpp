#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "draco/service.hpp"

namespace {

using namespace draco;
namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json fixture_json(const std::string& name) { return json::parse(read_file(fs::path(DRACO_TEST_DATA) / "specs" / (name + ".json"))); }

const std::vector<std::string> kTen{"bar",       "scatter", "line",           "tick",      "column_faceted",
                                    "two_layer", "pie",     "datetime_on_y", "histogram", "stacked_bar"};

// A live server on a free port for the whole suite.
class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    service_ = new Service(default_knowledge_base());
    server_ = new httplib::Server();
    configure(*server_, ServerLimits{1 << 20, 60});
    service_->mount(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete service_;
  }

  static httplib::Result post(const std::string& path, const std::string& body,
                              const char* type = "application/json") {
    httplib::Client client("127.0.0.1", port_);
    client.set_read_timeout(120, 0);
    return client.Post(path, body, type);
  }

  static json post_json(const std::string& path, const json& body, int expect = 200) {
    auto r = post(path, body.dump());
    EXPECT_TRUE(r) << path;
    if (!r) return nullptr;
    EXPECT_EQ(r->status, expect) << path << " " << r->body;
    return json::parse(r->body);
  }

  static json schema_json() {
    return schema_to_json(infer_schema(read_file(fs::path(DRACO_TEST_DATA) / "seattle-weather.csv")));
  }

  static inline Service* service_ = nullptr;
  static inline httplib::Server* server_ = nullptr;
  static inline std::thread* thread_ = nullptr;
  static inline int port_ = 0;
};

TEST_F(ServiceTest, ValidateEqualsLibrary) {
  for (const auto& name : kTen) {
    json got = post_json("/validate", {{"spec", fixture_json(name)}});
    json want = validate(default_knowledge_base(), flatten_spec(spec_from_json(fixture_json(name))));
    EXPECT_EQ(got["hard_violations"], want) << name;
  }
  json circle = fixture_json("bar");
  circle["view"][0]["mark"][0]["type"] = "circle";
  EXPECT_EQ(post_json("/validate", {{"spec", circle}})["hard_violations"], json::array({"invalid_domain"}));
}

TEST_F(ServiceTest, FactsAreAcceptedToo) {
  std::string facts = print_facts(flatten_spec(spec_from_json(fixture_json("bar"))));
  EXPECT_EQ(post_json("/validate", {{"facts", facts}}), post_json("/validate", {{"spec", fixture_json("bar")}}));
  post_json("/validate", {{"facts", "entity(view,root"}}, 400);
  post_json("/validate", {{"facts", facts}, {"spec", fixture_json("bar")}}, 400);
}

TEST_F(ServiceTest, RenderEqualsLibrary) {
  for (const auto& name : kTen) {
    EXPECT_EQ(post_json("/render", {{"spec", fixture_json(name)}}), render(spec_from_json(fixture_json(name)))) << name;
  }
  std::string csv = "weather,temp_max\nsun,3\nrain,5\n";
  Table t = parse_csv(csv);
  EXPECT_EQ(post_json("/render", {{"spec", fixture_json("bar")}, {"data", csv}}),
            render(spec_from_json(fixture_json("bar")), &t));
}

TEST_F(ServiceTest, SchemaEqualsLibrary) {
  std::string csv = read_file(fs::path(DRACO_TEST_DATA) / "seattle-weather.csv");
  auto r = post("/schema", csv, "text/csv");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body), schema_to_json(infer_schema(csv)));
  r = post("/schema", "a,b\n1\n", "text/csv");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, DebugEqualsLibrary) {
  json specs = json::array();
  std::vector<LabeledSpec> lib;
  for (const auto& name : kTen) {
    specs.push_back({{"label", name}, {"spec", fixture_json(name)}});
    lib.push_back({name, flatten_spec(spec_from_json(fixture_json(name)))});
  }
  json got = post_json("/debug", {{"specs", specs}});
  EXPECT_EQ(got, debug_to_json(build_matrix(default_knowledge_base(), lib)));
  EXPECT_EQ(got["matrix"]["specs"].size(), kTen.size());

  json bare = post_json("/debug", {{"specs", json::array({fixture_json("bar")})}});
  EXPECT_EQ(bare["matrix"]["specs"][0], "spec 0");
  EXPECT_TRUE(post_json("/debug", {{"specs", json::array()}})["chart"].is_null());
}

TEST_F(ServiceTest, CompleteEqualsLibrary) {
  json schema = schema_json();
  for (const auto& name : kTen) {
    // Each fixture with its mark type removed, completed against the schema.
    json partial = fixture_json(name);
    partial.erase("field");
    partial.erase("number_rows");
    for (auto& v : partial["view"]) {
      for (auto& m : v["mark"]) m.erase("type");
    }
    json got = post_json("/complete", {{"spec", partial}, {"schema", schema}, {"k", 3}, {"max_added", 1}});
    Query q = make_query(with_schema(spec_from_json(partial), schema_from_json(schema)), "", 3);
    q.caps.max_added_encodings = 1;
    EXPECT_EQ(got["models"], models_to_json(complete_spec(default_knowledge_base(), q))) << name;
  }
}

TEST_F(ServiceTest, CompleteWithHintsAndWeights) {
  json schema = schema_json();
  std::string line_size =
      ":- attribute((mark,type),M,T), entity(mark,_,M), T != line.\n"
      ":- not attribute((encoding,channel),_,size).\n";
  json none = post_json("/complete", {{"schema", schema}, {"hints", line_size}, {"k", 3}});
  EXPECT_EQ(none, json({{"models", json::array()}}));

  json plain = post_json("/complete", {{"schema", schema}, {"k", 5}});
  json heavy = post_json("/complete", {{"schema", schema}, {"k", 5}, {"weights", {{"aggregate_penalty", 40}}}});
  Query q = make_query(with_schema({}, schema_from_json(schema)), "", 5);
  EXPECT_EQ(heavy["models"],
            models_to_json(complete_spec(set_weight(default_knowledge_base(), "aggregate_penalty", 40), q)));
  EXPECT_NE(plain, heavy);
  // The override did not stick.
  EXPECT_EQ(post_json("/complete", {{"schema", schema}, {"k", 5}}), plain);
  EXPECT_EQ(service_->knowledge_base(), default_knowledge_base());
}

TEST_F(ServiceTest, KbListing) {
  httplib::Client client("127.0.0.1", port_);
  auto r = client.Get("/kb");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  json got = json::parse(r->body);
  EXPECT_EQ(got["blocks"], blocks_to_json(list_blocks(default_knowledge_base())));
  int hard = 0, soft = 0;
  for (const auto& b : got["blocks"]) {
    hard += b["role"] == "hard";
    soft += b["role"] == "soft" && b.contains("weight");
  }
  EXPECT_GE(hard, 1);
  EXPECT_GE(soft, 1);
}

TEST_F(ServiceTest, StatusCodes) {
  for (const char* path : {"/validate", "/complete", "/schema", "/render", "/debug"}) {
    auto r = post(path, "");
    ASSERT_TRUE(r) << path;
    EXPECT_EQ(r->status, 400) << path;
    EXPECT_TRUE(json::parse(r->body).contains("error")) << path;
  }
  for (const char* path : {"/validate", "/complete", "/render", "/debug"}) {
    auto r = post(path, "{not json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400) << path;
    r = post(path, "[1,2]");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400) << path;
  }
  post_json("/validate", json::object(), 400);
  post_json("/debug", {{"specs", 3}}, 400);
  post_json("/complete", {{"k", "five"}}, 400);

  json partial = fixture_json("bar");
  partial["view"][0]["mark"][0].erase("type");
  json missing = post_json("/validate", {{"spec", partial}}, 422);
  EXPECT_FALSE(missing["detail"]["missing"].empty());
  post_json("/render", {{"spec", partial}}, 422);
  post_json("/complete", {{"schema", schema_json()}, {"weights", {{"no_such", 1}}}}, 422);
  post_json("/complete", {{"schema", schema_json()}, {"hints", "{ attribute((mark,type),m0,V) : domain((mark,type),V) } = 1."}},
            422);
  post_json("/complete", {{"schema", schema_json()}, {"k", 0}}, 422);
  json floats = fixture_json("bar");
  floats["number_rows"] = 1.5;
  post_json("/validate", {{"spec", floats}}, 422);

  httplib::Client client("127.0.0.1", port_);
  auto big = client.Post("/validate", std::string(2 << 20, ' '), "application/json");
  ASSERT_TRUE(big);
  EXPECT_EQ(big->status, 413);
}

TEST_F(ServiceTest, ConcurrentBurstMatchesSerial) {
  json schema = schema_json();
  std::vector<std::pair<std::string, std::string>> requests;
  for (int i = 0; i < 50; ++i) {
    const auto& name = kTen[i % kTen.size()];
    switch (i % 4) {
      case 0:
        requests.push_back({"/validate", json{{"spec", fixture_json(name)}}.dump()});
        break;
      case 1:
        requests.push_back({"/render", json{{"spec", fixture_json(name)}}.dump()});
        break;
      case 2:
        requests.push_back({"/debug", json{{"specs", json::array({fixture_json(name), fixture_json("bar")})}}.dump()});
        break;
      default:
        requests.push_back({"/complete", json{{"schema", schema}, {"k", 1 + i % 3}, {"max_added", 2}}.dump()});
    }
  }
  std::vector<std::string> serial;
  for (const auto& [path, body] : requests) {
    auto r = post(path, body);
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << path;
    serial.push_back(r->body);
  }
  std::vector<std::future<std::string>> futures;
  for (const auto& [path, body] : requests) {
    futures.push_back(std::async(std::launch::async, [path, body] {
      auto r = post(path, body);
      return r ? std::to_string(r->status) + ":" + r->body : "no response: " + httplib::to_string(r.error());
    }));
  }
  for (std::size_t i = 0; i < futures.size(); ++i) EXPECT_EQ(futures[i].get(), "200:" + serial[i]) << i;
}

TEST(ServiceDirect, SameAnswersWithoutHttp) {
  Service s(default_knowledge_base());
  EXPECT_EQ(s.validate("").status, 400);
  Reply r = s.validate(json{{"spec", fixture_json("bar")}}.dump());
  EXPECT_EQ(r.status, 200);
  EXPECT_TRUE(r.body["hard_violations"].empty());
}

}  // namespace
