// draco: validate, complete, render and debug chart specifications.
//
// Exit status: 0 success, 1 the answer is negative (violations found),
// 2 bad usage or unreadable input.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "draco/api.hpp"
#include "draco/learn.hpp"

namespace fs = std::filesystem;
using namespace draco;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

// "-" or empty means stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

bool is_fact_file(const fs::path& p) { return p.extension() == ".lp"; }

ChartSpec load_spec(const fs::path& p) { return read_spec(read_file(p), is_fact_file(p)); }

struct Options {
  std::string kb_dir;
  std::string spec;
  std::string out;
  std::string schema;
  std::string hint;
  std::string weights;
  std::string data;
  std::string chart;
  std::string size = "medium";
  std::string block;
  std::size_t k = 5;
  int max_added = 3;
  std::uint64_t seed = 0;
  int epochs = 200;
  double learning_rate = 0.01;
};

KnowledgeBase load_knowledge_base(const Options& o) {
  if (o.kb_dir.empty()) return default_knowledge_base();
  return load_kb(o.kb_dir);
}

int run_validate(const Options& o) {
  KnowledgeBase kb = load_knowledge_base(o);
  Facts facts = flatten_spec(load_spec(o.spec));
  Assessment a = assess(kb, facts);
  if (!a.missing.empty()) {
    for (const auto& m : a.missing) std::cout << "missing " << m << "\n";
    return kNegative;
  }
  for (const auto& h : a.hard) std::cout << h << "\n";
  if (!a.hard.empty()) return kNegative;
  std::cout << "valid, cost " << a.cost << "\n";
  return kOk;
}

int run_schema(const Options& o) {
  emit(o.out, dump_json(schema_to_json(infer_schema(read_file(o.spec)))));
  return kOk;
}

int run_complete(const Options& o) {
  KnowledgeBase kb = load_knowledge_base(o);
  if (!o.weights.empty()) kb = with_weights(kb, parse_weights(read_file(o.weights)));
  ChartSpec partial = o.spec.empty() ? ChartSpec{} : load_spec(o.spec);
  if (!o.schema.empty()) {
    partial = with_schema(partial, schema_from_json(parse_json_text(read_file(o.schema), o.schema)));
  }
  if (o.k == 0) throw UsageError("-k must be at least 1");
  Query q = make_query(partial, o.hint.empty() ? "" : read_file(o.hint), o.k);
  q.caps.max_added_encodings = o.max_added;
  auto models = complete_spec(kb, q);
  if (models.empty()) std::cerr << "draco: warning: no valid completion exists for this query\n";

  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::string name = "spec_" + std::to_string(i + 1) + ".json";
    write_file(dir / name, dump_json(spec_to_json(nest_facts(models[i].facts))));
    manifest.push_back({{"rank", i + 1},
                        {"file", name},
                        {"cost", models[i].cost},
                        {"violations", violations_to_json(models[i].violations)}});
    std::cout << name << "\t" << models[i].cost << "\n";
  }
  write_file(dir / "costs.json", dump_json(manifest));
  return kOk;
}

int run_render(const Options& o) {
  ChartSpec spec = load_spec(o.spec);
  std::optional<Table> table;
  if (!o.data.empty()) table = parse_csv(read_file(o.data));
  emit(o.out, dump_json(render(spec, table ? &*table : nullptr)));
  return kOk;
}

int run_debug(const Options& o) {
  KnowledgeBase kb = load_knowledge_base(o);
  if (!fs::is_directory(o.spec)) throw UsageError("not a directory: " + o.spec);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.spec)) {
    auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".json" || ext == ".lp")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledSpec> specs;
  for (const auto& f : files) specs.push_back({f.stem().string(), flatten_spec(load_spec(f))});

  DebugMatrix m = build_matrix(kb, specs);
  for (const auto& [label, reason] : m.rejected) std::cerr << "draco: skipped " << label << ": " << reason << "\n";
  emit(o.out, matrix_to_csv(m));
  if (!o.chart.empty()) {
    if (m.spec_labels.empty()) throw UsageError("no valid specs to chart");
    write_file(o.chart, dump_json(emit_debug_chart(m, parse_chart_size(o.size))));
  }
  auto idle = unactivated(m);
  std::cerr << m.spec_labels.size() << " specs, " << m.constraint_names.size() << " soft constraints, " << idle.size()
            << " never violated\n";
  return kOk;
}

int run_learn(const Options& o) {
  KnowledgeBase kb = load_knowledge_base(o);
  auto pairs = pairs_from_json(parse_json_text(read_file(o.spec), o.spec), kb);
  auto names = feature_names(kb);
  LearnConfig config;
  config.seed = o.seed;
  config.epochs = o.epochs;
  config.learning_rate = o.learning_rate;
  auto result = learn_weights(pairs, names.size(), config);
  for (const auto& w : result.warnings) std::cerr << "draco: warning: " << w << "\n";
  emit(o.out, weights_to_json(export_weights(names, result.weights)));
  std::cerr << "pair accuracy " << pair_accuracy(result.weights, pairs) << " on " << pairs.size() << " pairs\n";
  return kOk;
}

int run_kb_list(const Options& o) {
  for (const auto& b : list_blocks(load_knowledge_base(o))) {
    if (b.name.empty()) continue;
    std::string description = b.description;
    std::replace(description.begin(), description.end(), '\n', ' ');
    std::cout << role_name(b.role) << "\t" << b.name << "\t" << (b.weight ? std::to_string(*b.weight) : "-") << "\t"
              << description << "\n";
  }
  return kOk;
}

int run_kb_show(const Options& o) {
  for (const auto& b : list_blocks(load_knowledge_base(o))) {
    if (b.name != o.block) continue;
    std::cout << "role: " << role_name(b.role) << "\n";
    if (b.weight) std::cout << "weight: " << *b.weight << "\n";
    std::cout << "\n" << b.source;
    return kOk;
  }
  throw UsageError("no block named '" + o.block + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-based chart recommendation"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--kb", o.kb_dir, "Knowledge base directory (default: built in)")->envname("DRACO_KB");

  auto* validate = app.add_subcommand("validate", "Print hard violations of a complete spec");
  validate->add_option("spec", o.spec, "Spec as nested JSON or facts (.lp)")->required();

  auto* schema = app.add_subcommand("schema", "Infer a data schema from CSV");
  schema->add_option("data", o.spec, "CSV file")->required();
  schema->add_option("-o,--output", o.out, "Output file (default: stdout)");

  auto* complete = app.add_subcommand("complete", "Complete a partial spec into the k cheapest designs");
  complete->add_option("spec", o.spec, "Partial spec as nested JSON or facts (.lp)");
  complete->add_option("--schema", o.schema, "Data schema JSON");
  complete->add_option("-k", o.k, "Number of designs")->capture_default_str();
  complete->add_option("--hint", o.hint, "Extra rules, usually integrity constraints");
  complete->add_option("--weights", o.weights, "Weight overrides JSON");
  complete->add_option("--max-added", o.max_added, "Encodings the solver may add")->capture_default_str();
  complete->add_option("-o,--output", o.out, "Output directory")->required();

  auto* render_cmd = app.add_subcommand("render", "Write the Vega-Lite document for a spec");
  render_cmd->add_option("spec", o.spec, "Spec as nested JSON or facts (.lp)")->required();
  render_cmd->add_option("--data", o.data, "CSV to inline as data values");
  render_cmd->add_option("-o,--output", o.out, "Output file (default: stdout)");

  auto* debug = app.add_subcommand("debug", "Violation matrix over a directory of specs");
  debug->add_option("specs", o.spec, "Directory of .json and .lp specs")->required();
  debug->add_option("-o,--output", o.out, "Matrix CSV (default: stdout)");
  debug->add_option("--chart", o.chart, "Also write the debug chart here");
  debug->add_option("--size", o.size, "Chart size: small, medium or large")->capture_default_str();

  auto* learn = app.add_subcommand("learn", "Fit soft weights to preference pairs");
  learn->add_option("pairs", o.spec, "Pairs JSON")->required();
  learn->add_option("-o,--output", o.out, "Weights JSON (default: stdout)");
  learn->add_option("--seed", o.seed, "Shuffle seed")->capture_default_str();
  learn->add_option("--epochs", o.epochs)->capture_default_str();
  learn->add_option("--lr", o.learning_rate, "Learning rate")->capture_default_str();

  auto* kb = app.add_subcommand("kb", "Inspect the knowledge base");
  kb->require_subcommand(1);
  auto* kb_list = kb->add_subcommand("list", "List blocks with weights and descriptions");
  auto* kb_show = kb->add_subcommand("show", "Print one block");
  kb_show->add_option("block", o.block)->required();
  auto* kb_export = kb->add_subcommand("export", "Write the knowledge base as editable files");
  kb_export->add_option("dir", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return run_validate(o);
    if (*schema) return run_schema(o);
    if (*complete) return run_complete(o);
    if (*render_cmd) return run_render(o);
    if (*debug) return run_debug(o);
    if (*learn) return run_learn(o);
    if (*kb_list) return run_kb_list(o);
    if (*kb_show) return run_kb_show(o);
    if (*kb_export) {
      save_kb(load_knowledge_base(o), o.out);
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "draco: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
