// branchlab: branch-based vs branch-avoiding graph kernels under a simulated 2-bit predictor.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <branchlab/analysis.hpp>
#include <branchlab/graph.hpp>
#include <branchlab/lemmas.hpp>
#include <branchlab/report.hpp>

namespace {

using namespace branchlab;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("BRANCHLAB_SEED");
  if (!s || !*s) return std::nullopt;
  std::uint64_t v = 0;
  if (!detail::parse_count(s, v)) throw std::invalid_argument("BRANCHLAB_SEED is not a non-negative integer");
  return v;
}

// Writes to the file if given, else stdout.
void emit(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw std::runtime_error("cannot open '" + *path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + *path + "' failed");
}

int cmd_gen(std::uint64_t n, std::uint64_t m, std::optional<std::uint64_t> seed, const std::optional<std::string>& out) {
  if (!seed) seed = env_seed();
  if (!seed) throw std::invalid_argument("gen needs SEED (argument or BRANCHLAB_SEED)");
  if (n > std::numeric_limits<vertex_t>::max()) throw std::invalid_argument("N too large");
  const auto g = generate_random(static_cast<vertex_t>(n), m, *seed);
  std::ostringstream os;
  write_metis(os, g);
  emit(out, os.str());
  return 0;
}

int cmd_run(const RunConfig& config) {
  const auto g = graph_for(config);
  const auto report = execute_run(config, g);
  emit(config.out_path, render(report, config.format));
  if (!report.ok()) {
    std::cerr << "error: branch-based and branch-avoiding results differ\n";
    return 1;
  }
  return 0;
}

int cmd_verify_lemmas() {
  const auto checks = verify_lemmas();
  std::size_t width = 4;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  std::cout << std::left << std::setw(static_cast<int>(width)) << "check" << "  result  max_dev    detail\n";
  for (const auto& c : checks) {
    std::cout << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << (c.passed ? "PASS" : "FAIL")
              << "    " << std::setw(9) << std::setprecision(3) << c.max_deviation << "  " << c.detail << '\n';
  }
  return all_passed(checks) ? 0 : 1;
}

int cmd_correlate(const std::vector<std::string>& files, std::optional<Variant> only, OutputFormat format,
                  const std::optional<std::string>& out) {
  std::vector<json> reports;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open report '" + f + "'");
    reports.push_back(json::parse(in));
  }
  auto samples = samples_from_reports(reports, only);
  const auto before = samples.size();
  std::erase_if(samples, [](const IterationStats& s) { return s.edges_traversed == 0; });
  if (samples.size() != before) {
    std::cerr << "note: skipped " << before - samples.size() << " samples with no traversed edges\n";
  }
  const auto cm = correlate(samples);
  std::ostringstream os;
  if (format == OutputFormat::json) os << to_json(cm).dump(2) << '\n';
  else write_correlation_csv(os, cm);
  emit(out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchlab: branch prediction behaviour of connected components and BFS"};
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv}, {"json", OutputFormat::json}};

  auto* gen = app.add_subcommand("gen", "Write a seeded G(n,m) random graph in METIS format");
  std::uint64_t gen_n = 0, gen_m = 0;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::string> gen_out;
  gen->add_option("N", gen_n, "vertices")->required();
  gen->add_option("M", gen_m, "undirected edges")->required();
  gen->add_option("SEED", gen_seed, "RNG seed (default: BRANCHLAB_SEED)");
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  auto* run = app.add_subcommand("run", "Run cc or bfs under the simulated predictor and report per-iteration stats");
  RunConfig config;
  std::optional<std::string> gen_spec;
  std::string algo = "cc", variant = "both", init = "wnt";
  std::optional<std::uint64_t> root;
  auto* graph_opt = run->add_option("--graph", config.graph_path, "METIS (.graph) or edge-list (.el) file");
  auto* gen_opt = run->add_option("--gen", gen_spec, "generate G(n,m): N,M[,SEED]");
  graph_opt->excludes(gen_opt);
  run->add_option("--algo", algo, "cc or bfs")->check(CLI::IsMember({"cc", "bfs"}));
  run->add_option("--variant", variant, "based, avoiding or both")->check(CLI::IsMember({"based", "avoiding", "both"}));
  run->add_option("--root", root, "BFS root vertex (0-based)");
  run->add_option("--init-state", init, "initial predictor state")->check(CLI::IsMember({"snt", "wnt", "wt", "st"}));
  run->add_option("--format", config.format, "csv or json")->transform(CLI::CheckedTransformer(formats))->option_text("TEXT:{csv,json}");
  run->add_option("--out", config.out_path, "output path (default: stdout)");
  run->add_option("--repetitions", config.timing_repetitions, "timing repetitions per variant")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify-lemmas", "Check the 2-bit predictor lemmas and closed forms");

  auto* corr = app.add_subcommand("correlate", "Pearson correlations of per-edge T, I, B, M, L, S over run reports");
  std::vector<std::string> corr_files;
  std::string corr_variant = "all";
  OutputFormat corr_format = OutputFormat::csv;
  std::optional<std::string> corr_out;
  corr->add_option("reports", corr_files, "JSON reports written by 'run --format json'")->required();
  corr->add_option("--variant", corr_variant, "based, avoiding or all")->check(CLI::IsMember({"based", "avoiding", "all"}));
  corr->add_option("--format", corr_format, "csv or json")->transform(CLI::CheckedTransformer(formats))->option_text("TEXT:{csv,json}");
  corr->add_option("--out", corr_out, "output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_n, gen_m, gen_seed, gen_out);
    if (*run) {
      if (gen_spec) config.generator = parse_generator_spec(*gen_spec, env_seed());
      config.algorithm = algo == "cc" ? Algorithm::cc : Algorithm::bfs;
      config.variant = variant == "based" ? VariantChoice::based
                       : variant == "avoiding" ? VariantChoice::avoiding
                                               : VariantChoice::both;
      if (root) {
        if (*root > std::numeric_limits<vertex_t>::max()) throw std::out_of_range("root too large");
        config.root = static_cast<vertex_t>(*root);
      }
      config.initial_state = parse_predictor_state(init);
      return cmd_run(config);
    }
    if (*verify) return cmd_verify_lemmas();
    if (*corr) {
      std::optional<Variant> only;
      if (corr_variant == "based") only = Variant::branch_based;
      if (corr_variant == "avoiding") only = Variant::branch_avoiding;
      return cmd_correlate(corr_files, only, corr_format, corr_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
