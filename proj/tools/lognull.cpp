#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lognull/lognull.hpp"

using namespace lognull;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LOGNULL_SEED")) {
    std::uint64_t seed = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("LOGNULL_SEED is not an unsigned integer");
    return seed;
  }
  return 1;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json params_json(const EstimatedParams& p) {
  json j;
  if (!std::isnan(p.p_in)) j["p_in"] = finite_or_null(p.p_in);
  if (!std::isnan(p.p_out)) j["p_out"] = finite_or_null(p.p_out);
  if (!std::isnan(p.mu)) j["mu"] = finite_or_null(p.mu);
  if (p.gamma) j["gamma"] = finite_or_null(*p.gamma);
  return j;
}

void add_lfr_flags(CLI::App* cmd, LfrConfig& c) {
  cmd->add_option("--n", c.n, "vertex count")->capture_default_str();
  cmd->add_option("--degree-exponent", c.degree_exponent, "power-law exponent of degrees")->capture_default_str();
  cmd->add_option("--mean-degree", c.mean_degree, "mean degree")->capture_default_str();
  cmd->add_option("--max-degree", c.max_degree, "degree cap (0: min(n-1, 10 * mean))")->capture_default_str();
  cmd->add_option("--size-exponent", c.size_exponent, "power-law exponent of community sizes")->capture_default_str();
  cmd->add_option("--smin", c.min_community, "smallest community")->capture_default_str();
  cmd->add_option("--smax", c.max_community, "largest community")->capture_default_str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double x = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size()) throw UsageError("bad number '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw UsageError("empty list");
  return out;
}

struct Detection {
  Partition partition;
  std::optional<EstimatedParams> params;
  double search_parameter = 0;
  std::optional<double> log_likelihood;
  std::size_t evaluations = 1;
  std::string stop_reason = "fixed";
  std::optional<double> best_seen;
};

// Louvain at a fixed search parameter (gamma for ppm/dcppm/simple/modularity,
// mu for ilfr/ilfrs), followed by a fit of the model to the result.
Detection detect_fixed(const Graph& g, ModelKind kind, double param, std::uint64_t seed) {
  Detection d;
  QualityModel model = kind == ModelKind::SimpleModularity ? QualityModel::simple_modularity(param)
                       : kind == ModelKind::Modularity     ? QualityModel::modularity(param)
                                                           : search_model(kind, param);
  model.validate();
  d.partition = louvain(g, model, seed);
  d.search_parameter = param;
  if (kind != ModelKind::SimpleModularity && kind != ModelKind::Modularity) {
    const Reestimate r = reestimate(kind, compute_stats(g, d.partition), param);
    d.params = r.fit.params;
    d.log_likelihood = r.fit.log_likelihood;
  }
  return d;
}

Detection detect(const Graph& g, ModelKind kind, const std::string& strategy, std::optional<double> param,
                 std::uint64_t seed) {
  if (strategy == "fixed") {
    if (!param) throw UsageError("--strategy fixed needs --param");
    return detect_fixed(g, kind, *param, seed);
  }
  if (kind == ModelKind::SimpleModularity || kind == ModelKind::Modularity)
    throw UsageError("models simple and modularity only run with --strategy fixed");
  const StrategyResult r = strategy == "iterative" ? run_iterative(g, kind, {}, seed) : run_maximization(g, kind, {}, seed);
  Detection d;
  d.partition = r.partition;
  d.params = r.params;
  d.search_parameter = r.search_parameter;
  d.log_likelihood = r.log_likelihood;
  d.evaluations = r.evaluations;
  d.stop_reason = std::string(to_string(r.stop_reason));
  d.best_seen = r.best_seen_log_likelihood;
  return d;
}

int cmd_detect(const std::string& graph_file, const std::string& model_name, const std::string& strategy,
               std::optional<double> param, std::optional<std::uint64_t> seed_flag, const std::string& out_file,
               const std::string& truth_file, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
  const ModelKind kind = parse_model_kind(model_name);
  if (strategy == "fixed" && !param) throw UsageError("--strategy fixed needs --param");
  const Graph g = load_edge_list(graph_file);
  std::optional<Partition> truth;
  if (!truth_file.empty()) truth = load_partition(truth_file, g);
  const Detection d = detect(g, kind, strategy, param, seed);
  const PartitionStats s = compute_stats(g, d.partition);

  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw ValidationError("cannot write " + out_file);
    write_partition(out, g, d.partition);
  }
  json rec;
  rec["dataset"] = std::filesystem::path(graph_file).stem().string();
  rec["model"] = model_name;
  rec["strategy"] = strategy;
  rec["seed"] = seed;
  rec["search_parameter"] = d.search_parameter;
  rec["parameters"] = d.params ? params_json(*d.params) : json::object();
  rec["log_likelihood"] = d.log_likelihood ? finite_or_null(*d.log_likelihood) : json(nullptr);
  rec["modularity"] = modularity(s, 1.0);
  rec["communities"] = d.partition.community_count();
  rec["evaluations"] = d.evaluations;
  rec["stop_reason"] = d.stop_reason;
  if (d.best_seen) rec["best_seen_log_likelihood"] = finite_or_null(*d.best_seen);
  if (truth) {
    rec["metrics"] = {{"nmi", nmi(*truth, d.partition)},
                      {"rand", rand_index(*truth, d.partition)},
                      {"jaccard", jaccard_index(*truth, d.partition)}};
  }
  if (timing)
    rec["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::cout << rec.dump(2) << '\n';
  return 0;
}

int cmd_loglik(const std::string& graph_file, const std::string& partition_file) {
  const Graph g = load_edge_list(graph_file);
  const Partition p = load_partition(partition_file, g);
  const PartitionStats s = compute_stats(g, p);
  std::cout << "model,p_in,p_out,mu,gamma,value\n";
  for (ModelKind kind : {ModelKind::PPM, ModelKind::DCPPM, ModelKind::ILFR, ModelKind::ILFRS}) {
    const Reestimate r = reestimate(kind, s, 1.0);
    const EstimatedParams& e = r.fit.params;
    std::cout << to_string(kind) << ',' << fmt(e.p_in) << ',' << fmt(e.p_out) << ',' << fmt(e.mu) << ','
              << (e.gamma ? fmt(*e.gamma) : "") << ',' << fmt(r.fit.log_likelihood) << '\n';
  }
  std::cout << "simple,,,,1," << fmt(simple_modularity(s, 1.0)) << '\n';
  std::cout << "modularity,,,,1," << fmt(modularity(s, 1.0)) << '\n';
  return 0;
}

json lfr_metadata(const LfrConfig& c, const LfrBenchmark& b) {
  json j;
  j["n"] = c.n;
  j["degree_exponent"] = c.degree_exponent;
  j["mean_degree"] = c.mean_degree;
  j["max_degree"] = c.degree_cap();
  j["size_exponent"] = c.size_exponent;
  j["smin"] = c.min_community;
  j["smax"] = c.max_community;
  j["mu"] = c.mixing;
  j["seed"] = c.seed;
  j["edges"] = b.graph.edge_count();
  j["communities"] = b.community_sizes.size();
  j["realized_mixing"] = b.realized_mixing;
  j["realized_mean_degree"] = b.realized_mean_degree;
  j["mixing_within_tolerance"] = std::abs(b.realized_mixing - c.mixing) <= 0.02;
  j["dropped_edges"] = b.dropped_edges;
  j["rewiring_exhausted"] = b.rewiring_exhausted;
  j["max_degree_deviation"] = b.max_degree_deviation;
  j["compensation_share"] = b.compensation_share;
  j["warnings"] = b.warnings;
  return j;
}

int cmd_generate(LfrConfig config, std::optional<std::uint64_t> seed_flag, const std::string& prefix) {
  config.seed = seed_flag ? *seed_flag : default_seed();
  config.validate();
  const LfrBenchmark b = generate(config);
  const json meta = lfr_metadata(config, b);
  if (!prefix.empty()) {
    std::ofstream edges(prefix + ".edges"), truth(prefix + ".groundtruth"), info(prefix + ".json");
    if (!edges || !truth || !info) throw ValidationError("cannot write files with prefix " + prefix);
    write_edge_list(edges, b.graph);
    write_partition(truth, b.graph, b.partition);
    info << meta.dump(2) << '\n';
  }
  std::cout << meta.dump(2) << '\n';
  return 0;
}

int cmd_eval(const std::string& file_a, const std::string& file_b) {
  auto read = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return read_partition_labels(in);
  };
  const auto rows_a = read(file_a), rows_b = read(file_b);
  std::vector<std::string> labels;
  for (const auto& row : rows_a) labels.push_back(row.first);
  const Partition a = partition_from_labels(rows_a, labels);
  const Partition b = partition_from_labels(rows_b, labels);
  std::cout << "nmi,rand,jaccard\n"
            << fmt(nmi(a, b)) << ',' << fmt(rand_index(a, b)) << ',' << fmt(jaccard_index(a, b)) << '\n';
  return 0;
}

struct SweepRow {
  double mu;
  std::size_t repeat;
  std::string model, strategy;
  std::uint64_t seed;
  double realized_mixing = NAN;
  std::string status = "ok";
  std::string error;
  double log_likelihood = NAN, search_parameter = NAN, nmi_v = NAN, rand_v = NAN, jaccard_v = NAN;
  std::size_t communities = 0, evaluations = 0;
  std::string stop_reason;
};

int cmd_sweep(LfrConfig base, const std::string& mu_list, const std::string& model_list,
              const std::string& strategy_list, std::size_t repeats, std::size_t jobs,
              std::optional<std::uint64_t> seed_flag, const std::string& out_file) {
  if (repeats == 0) throw UsageError("--repeats must be at least 1");
  if (jobs == 0) throw UsageError("--jobs must be at least 1");
  const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
  const auto mus = parse_list(mu_list);
  const auto models = split(model_list);
  const auto strategies = split(strategy_list);
  for (const auto& m : models) {
    const ModelKind kind = parse_model_kind(m);
    if (kind == ModelKind::SimpleModularity || kind == ModelKind::Modularity)
      throw UsageError("sweep takes ppm, dcppm, ilfr or ilfrs");
  }
  for (const auto& s : strategies)
    if (s != "iterative" && s != "max") throw UsageError("sweep strategies are iterative and max");
  for (double mu : mus) {
    LfrConfig c = base;
    c.mixing = mu;
    c.validate();
  }

  const std::size_t per_graph = models.size() * strategies.size();
  std::vector<SweepRow> rows(mus.size() * repeats * per_graph);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next++) < mus.size() * repeats;) {
      const std::size_t mi = task / repeats, r = task % repeats;
      LfrConfig c = base;
      c.mixing = mus[mi];
      c.seed = mix_seed(seed, task);
      std::optional<LfrBenchmark> bench;
      std::string gen_error;
      try {
        bench = generate(c);
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      std::size_t slot = task * per_graph;
      for (const auto& model : models)
        for (const auto& strategy : strategies) {
          SweepRow& row = rows[slot++];
          row.mu = mus[mi];
          row.repeat = r;
          row.model = model;
          row.strategy = strategy;
          row.seed = c.seed;
          if (!bench) {
            row.status = "error";
            row.error = gen_error;
            continue;
          }
          row.realized_mixing = bench->realized_mixing;
          try {
            const Detection d = detect(bench->graph, parse_model_kind(model), strategy, std::nullopt, c.seed);
            row.log_likelihood = d.log_likelihood.value_or(NAN);
            row.search_parameter = d.search_parameter;
            row.nmi_v = nmi(bench->partition, d.partition);
            row.rand_v = rand_index(bench->partition, d.partition);
            row.jaccard_v = jaccard_index(bench->partition, d.partition);
            row.communities = d.partition.community_count();
            row.evaluations = d.evaluations;
            row.stop_reason = d.stop_reason;
          } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
          }
        }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, mus.size() * repeats); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!out_file.empty()) {
    file.open(out_file);
    if (!file) throw ValidationError("cannot write " + out_file);
  }
  std::ostream& out = out_file.empty() ? std::cout : file;
  out << "mu,repeat,model,strategy,seed,realized_mixing,status,log_likelihood,search_parameter,"
         "nmi,rand,jaccard,communities,evaluations,stop_reason,error\n";
  for (const auto& row : rows) {
    std::string error = row.error;
    for (char& ch : error)
      if (ch == ',' || ch == '\n') ch = ';';
    out << fmt(row.mu) << ',' << row.repeat << ',' << row.model << ',' << row.strategy << ',' << row.seed << ','
        << fmt(row.realized_mixing) << ',' << row.status << ',' << fmt(row.log_likelihood) << ','
        << fmt(row.search_parameter) << ',' << fmt(row.nmi_v) << ',' << fmt(row.rand_v) << ','
        << fmt(row.jaccard_v) << ',' << row.communities << ',' << row.evaluations << ',' << row.stop_reason
        << ',' << error << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection with likelihood-based null models"};
  app.require_subcommand(1);

  std::string graph_file, partition_file, out_file, truth_file, model = "ilfrs", strategy = "max";
  std::optional<double> param;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  auto* det = app.add_subcommand("detect", "find communities and print a JSON run record");
  det->add_option("graph", graph_file, "edge list")->required();
  det->add_option("--model", model)->check(CLI::IsMember({"ppm", "dcppm", "ilfr", "ilfrs", "modularity", "simple"}))->capture_default_str();
  det->add_option("--strategy", strategy)->check(CLI::IsMember({"iterative", "max", "fixed"}))->capture_default_str();
  det->add_option("--param", param, "gamma or mu for --strategy fixed");
  det->add_option("--seed", seed, "random seed (default: LOGNULL_SEED or 1)");
  det->add_option("--out", out_file, "partition file to write");
  det->add_option("--truth", truth_file, "ground-truth partition for metric scores");
  det->add_flag("--timing", timing, "include wall time in the record");

  auto* ll = app.add_subcommand("loglik", "log-likelihoods of a partition at fitted parameters (CSV)");
  ll->add_option("graph", graph_file)->required();
  ll->add_option("partition", partition_file)->required();

  LfrConfig lfr;
  std::string prefix;
  auto* gen = app.add_subcommand("generate", "LFR-style benchmark graph");
  add_lfr_flags(gen, lfr);
  gen->add_option("--mu", lfr.mixing, "target mixing fraction")->capture_default_str();
  gen->add_option("--seed", seed);
  gen->add_option("--out", prefix, "write PREFIX.edges, PREFIX.groundtruth, PREFIX.json");

  std::string file_a, file_b;
  auto* ev = app.add_subcommand("eval", "NMI, Rand and Jaccard of two partition files (CSV)");
  ev->add_option("a", file_a)->required();
  ev->add_option("b", file_b)->required();

  std::string mu_list = "0.1,0.2,0.3", models = "ppm,dcppm,ilfr,ilfrs", strategies = "max";
  std::size_t repeats = 5, jobs = 1;
  auto* sw = app.add_subcommand("sweep", "detection quality on LFR graphs over a range of mixing values (CSV)");
  add_lfr_flags(sw, lfr);
  sw->add_option("--mu-list", mu_list)->capture_default_str();
  sw->add_option("--models", models)->capture_default_str();
  sw->add_option("--strategies", strategies)->capture_default_str();
  sw->add_option("--repeats", repeats)->capture_default_str();
  sw->add_option("--jobs", jobs)->capture_default_str();
  sw->add_option("--seed", seed);
  sw->add_option("--out", out_file, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*det) return cmd_detect(graph_file, model, strategy, param, seed, out_file, truth_file, timing);
    if (*ll) return cmd_loglik(graph_file, partition_file);
    if (*gen) return cmd_generate(lfr, seed, prefix);
    if (*ev) return cmd_eval(file_a, file_b);
    if (*sw) return cmd_sweep(lfr, mu_list, models, strategies, repeats, jobs, seed, out_file);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
