#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "rquge/adversarial.hpp"
#include "rquge/baselines.hpp"
#include "rquge/core.hpp"
#include "rquge/error.hpp"
#include "rquge/metaeval.hpp"
#include "rquge/metric.hpp"
#include "rquge/random.hpp"
#include "rquge/rerank.hpp"
#include "rquge/runtime_config.hpp"
#include "rquge/synth.hpp"

namespace rquge::cli {
namespace {

using runtime::Runtime;
using runtime::RuntimeConfig;

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config,
                 "Backend config JSON, or 'stub' for offline stubs (default: $RQUGE_CONFIG)");
  cmd.add_option("--out", c.out, "Output file")->required();
  cmd.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd.add_option("--jobs", c.jobs, "Parallel workers for concurrency-safe backends")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

RuntimeConfig resolve_config(const Common& c) {
  std::string source = c.config;
  if (source.empty()) {
    if (const char* env = std::getenv("RQUGE_CONFIG"); env != nullptr) source = env;
  }
  if (source.empty()) return RuntimeConfig{};
  if (source == "stub") return runtime::stub_runtime_config();
  return runtime::load_runtime_config(source);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json backend_json(const runtime::BackendConfig& b) {
  return Json{{"kind", b.kind}, {"name", b.name}};
}

struct Manifest {
  std::string command;
  std::vector<std::string> args;
  std::optional<RuntimeConfig> config;
  std::uint64_t seed = 0;
  std::vector<std::string> runners;  // qa, scorer, generator, ner, paraphraser, translator
  Json inputs = Json::object();
  std::vector<std::string> outputs;
  Json failures = Json::array();
  Json extra = Json::object();

  void fail(const std::string& id, const std::string& reason) {
    failures.push_back(Json{{"id", id}, {"reason", reason}});
  }

  void write(const std::string& out) const {
    Json runner_json = Json::object();
    if (config) {
      const std::map<std::string, const runtime::BackendConfig*> all = {
          {"qa", &config->qa},         {"scorer", &config->scorer},
          {"generator", &config->generator}, {"ner", &config->ner},
          {"paraphraser", &config->paraphraser}, {"translator", &config->translator}};
      for (const auto& r : runners) runner_json[r] = backend_json(*all.at(r));
    }
    Json j;
    j["command"] = command;
    j["args"] = args;
    j["config"] = config ? runtime::to_json(*config) : Json(nullptr);
    j["seed"] = seed;
    j["runners"] = runner_json;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["timestamp"] = utc_timestamp();
    j["status"] = failures.empty() ? "ok" : "partial";
    j["failures"] = failures;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    std::ofstream f(out + ".manifest.json");
    if (!f) throw Error("cannot write manifest for '" + out + "'");
    f << j.dump(2) << '\n';
  }
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
}

/// Fills empty candidate bags from the generator, seeded per instance.
void generate_missing(std::vector<QGInstance>& instances, Runtime& rt, std::uint64_t seed) {
  for (auto& inst : instances) {
    if (!inst.candidates.empty()) continue;
    try {
      inst.candidates = rt.generator()->generate_candidates(inst.gold_answer, inst.context,
                                                            mix_seed(seed, "generate:" + inst.id));
    } catch (const RunnerError& e) {
      throw e.tagged(inst.id);
    }
  }
}

std::vector<std::string> all_runners_for_metric() { return {"qa", "scorer"}; }

// ---------------------------------------------------------------------------

struct ScoreArgs {
  Common common;
  std::string dataset;
  std::string select = "all";
  std::size_t batch_size = 8;
  bool normalize = false;
  bool generate = false;
};

int cmd_score(const ScoreArgs& a, Manifest& m, std::ostream& out) {
  auto cfg = resolve_config(a.common);
  m.config = cfg;
  auto instances = load_dataset(a.dataset);
  Runtime rt(cfg);
  m.runners = all_runners_for_metric();
  if (a.generate) {
    generate_missing(instances, rt, a.common.seed);
    m.runners.push_back("generator");
  }
  const auto selector = selectors::by_name(a.select);
  Rquge metric(rt.qa(), rt.scorer(), RqugeOptions{a.normalize});
  const auto rows = rquge_batch(instances, selector, metric, BatchOptions{a.batch_size, a.common.jobs});

  std::vector<Json> lines;
  for (const auto& r : rows) {
    lines.push_back(to_json(r));
    if (!r.ok()) m.fail(r.id, r.error);
  }
  write_jsonl(a.common.out, lines);
  m.inputs["dataset"] = a.dataset;
  m.outputs.push_back(a.common.out);
  m.extra["rows"] = rows.size();
  out << "scored " << rows.size() << " rows (" << m.failures.size() << " failed) -> " << a.common.out
      << '\n';
  return m.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------

struct RerankArgs {
  Common common;
  std::string dataset;
  std::vector<int> ks{1};
  std::vector<std::string> metrics;
  bool generate = false;
};

int cmd_rerank(const RerankArgs& a, Manifest& m, std::ostream& out) {
  auto cfg = resolve_config(a.common);
  m.config = cfg;
  auto instances = load_dataset(a.dataset);
  Runtime rt(cfg);
  m.runners = all_runners_for_metric();
  if (a.generate) {
    generate_missing(instances, rt, a.common.seed);
    m.runners.push_back("generator");
  }
  for (const auto& name : a.metrics) {
    if (!baselines::is_reference_metric(name)) throw ConfigError("unknown baseline metric '" + name + "'");
  }
  std::vector<int> ks = a.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty() || ks.front() < 1) throw ConfigError("--k values must be positive");

  std::vector<QGInstance> usable;
  for (auto& inst : instances) {
    const bool has_ppl = std::all_of(inst.candidates.begin(), inst.candidates.end(),
                                     [](const CandidateQuestion& c) { return c.ppl.has_value(); });
    if (inst.candidates.size() < static_cast<std::size_t>(ks.back())) {
      m.fail(inst.id, "fewer candidates than the largest k");
    } else if (!has_ppl) {
      m.fail(inst.id, "candidate without perplexity");
    } else if (!a.metrics.empty() && !inst.reference_question) {
      m.fail(inst.id, "baseline metrics need a reference question");
    } else {
      usable.push_back(std::move(inst));
    }
  }

  Rquge metric(rt.qa(), rt.scorer());
  const auto report = rerank::rerank_sweep(usable, ks, metric, a.metrics);

  std::vector<Json> rows;
  for (const auto& r : report.rows) rows.push_back(rerank::to_json(r));
  write_jsonl(a.common.out, rows);

  std::vector<Json> choices;
  std::size_t redundant = 0;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    Json per_k = Json::array();
    for (const auto& r : report.chosen[i]) per_k.push_back(rerank::to_json(r));
    const bool red = rerank::is_redundant(report.chosen[i]);
    redundant += red ? 1 : 0;
    choices.push_back(Json{{"id", usable[i].id}, {"redundant", red}, {"choices", per_k}});
  }
  const std::string choices_path = a.common.out + ".choices.jsonl";
  write_jsonl(choices_path, choices);

  m.inputs["dataset"] = a.dataset;
  m.outputs = {a.common.out, choices_path};
  m.extra["ks"] = ks;
  m.extra["instances"] = usable.size();
  m.extra["redundant_instances"] = redundant;
  out << "re-ranked " << usable.size() << " instances over " << ks.size() << " k values -> "
      << a.common.out << '\n';
  return m.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------

struct CorruptArgs {
  Common common;
  std::string dataset;
  std::string counts;
  std::size_t total = 0;
  bool auc = false;
  std::string metric = "rquge";
};

adversarial::KindCounts parse_counts(const std::string& spec) {
  adversarial::KindCounts counts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--counts entries look like kind=N, got '" + item + "'");
    try {
      const auto kind = adversarial::corruption_kind_from_string(item.substr(0, eq));
      counts[kind] = static_cast<std::size_t>(std::stoul(item.substr(eq + 1)));
    } catch (const ParseError&) {
      throw ConfigError("unknown corruption kind '" + item.substr(0, eq) + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad count in '" + item + "'");
    }
  }
  return counts;
}

int cmd_corrupt(const CorruptArgs& a, Manifest& m, std::ostream& out) {
  auto cfg = resolve_config(a.common);
  m.config = cfg;
  const auto instances = load_dataset(a.dataset);
  Runtime rt(cfg);

  adversarial::KindCounts counts = a.counts.empty() ? adversarial::default_counts() : parse_counts(a.counts);
  if (a.total > 0) counts = adversarial::scale_counts(counts, a.total);
  const auto wants = [&](adversarial::CorruptionKind k) {
    auto it = counts.find(k);
    return it != counts.end() && it->second > 0;
  };
  adversarial::AdversarialRunners runners;
  if (wants(adversarial::CorruptionKind::entity_swap)) {
    runners.ner = rt.ner().get();
    m.runners.push_back("ner");
  }
  if (wants(adversarial::CorruptionKind::paraphrase_backtranslate)) {
    runners.translator = rt.translator().get();
    m.runners.push_back("translator");
  }
  if (wants(adversarial::CorruptionKind::paraphrase_model)) {
    runners.paraphraser = rt.paraphraser().get();
    m.runners.push_back("paraphraser");
  }

  const auto set = adversarial::build_adversarial_set(instances, counts, a.common.seed, runners);
  std::vector<Json> lines;
  for (const auto& r : set.records) lines.push_back(adversarial::to_json(r));
  write_jsonl(a.common.out, lines);
  m.inputs["dataset"] = a.dataset;
  m.outputs.push_back(a.common.out);
  m.extra["yield"] = adversarial::yield_report(set);
  for (const auto& [kind, y] : set.yield) {
    if (y.produced < y.requested) {
      m.fail(adversarial::to_string(kind), "produced " + std::to_string(y.produced) + " of " +
                                              std::to_string(y.requested) + " requested");
    }
  }

  if (a.auc) {
    std::map<std::string, const QGInstance*> by_id;
    for (const auto& inst : instances) by_id[inst.id] = &inst;
    std::vector<double> scores;
    if (a.metric == "rquge") {
      m.runners.push_back("qa");
      m.runners.push_back("scorer");
      Rquge metric(rt.qa(), rt.scorer());
      for (const auto& r : set.records) scores.push_back(metric.score(*by_id.at(r.instance_id), r.corrupted).kappa);
    } else if (baselines::is_reference_metric(a.metric)) {
      for (const auto& r : set.records) {
        scores.push_back(baselines::reference_metric(a.metric, r.corrupted, *by_id.at(r.instance_id)).value);
      }
    } else {
      throw ConfigError("unknown metric '" + a.metric + "' (expected rquge, bleu4, rouge1 or rougeL)");
    }
    const std::string auc_path = a.common.out + ".auc.json";
    Json report = adversarial::to_json(adversarial::robustness_auc(set.records, scores));
    report["metric"] = a.metric;
    write_text(auc_path, report.dump(2) + "\n");
    m.outputs.push_back(auc_path);
    out << "AUC (" << a.metric << "): " << report["total"].get<double>() << '\n';
  }
  out << "wrote " << set.records.size() << " adversarial records -> " << a.common.out << '\n';
  return m.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------

struct MetaevalArgs {
  Common common;
  std::string dataset;
  std::string annotations;
  std::string criterion = "all";
  std::vector<std::string> metrics{"rquge"};
  std::string select = "first";
};

int cmd_metaeval(const MetaevalArgs& a, Manifest& m, std::ostream& out) {
  auto cfg = resolve_config(a.common);
  m.config = cfg;
  const auto instances = load_dataset(a.dataset);
  const auto annotations = load_annotations(a.annotations);
  if (a.select == "all") throw ConfigError("metaeval needs one question per instance (--select first|reference)");
  const auto selector = selectors::by_name(a.select);

  std::vector<Criterion> criteria;
  if (a.criterion == "all") {
    criteria = {Criterion::grammaticality, Criterion::answerability, Criterion::relevance};
  } else {
    criteria = {criterion_from_string(a.criterion)};
  }

  Runtime rt(cfg);
  std::vector<metaeval::CorrelationReport> reports;
  std::set<std::string> failed;
  for (const auto& name : a.metrics) {
    std::vector<metaeval::MetricScore> scores;
    if (name == "rquge") {
      m.runners = all_runners_for_metric();
      Rquge metric(rt.qa(), rt.scorer());
      for (const auto& row : rquge_batch(instances, selector, metric, BatchOptions{8, a.common.jobs})) {
        if (row.ok()) {
          scores.push_back({row.id, row.score->kappa});
        } else if (failed.insert(row.id).second) {
          m.fail(row.id, row.error);
        }
      }
    } else if (baselines::is_reference_metric(name)) {
      for (const auto& inst : instances) {
        try {
          const auto cand = selector(inst).front();
          scores.push_back({inst.id, baselines::reference_metric(name, cand, inst).value});
        } catch (const Error& e) {
          if (failed.insert(inst.id).second) m.fail(inst.id, e.what());
        }
      }
    } else {
      throw ConfigError("unknown metric '" + name + "'");
    }
    for (const auto c : criteria) {
      try {
        reports.push_back(metaeval::correlate_with_human(name, scores, annotations, c));
      } catch (const UndefinedError& e) {
        m.fail(name + "/" + std::string(to_string(c)), e.what());
      }
    }
  }

  std::set<std::string> excluded;
  for (const auto& r : reports) excluded.insert(r.excluded_ids.begin(), r.excluded_ids.end());
  for (const auto& id : excluded) m.fail(id, "no annotation");

  Json reports_json = Json::array();
  for (const auto& r : reports) reports_json.push_back(metaeval::to_json(r));
  Json result{{"table", metaeval::table_json(reports)},
              {"reports", reports_json},
              {"agreement", metaeval::to_json(metaeval::annotator_agreement(annotations))}};
  write_text(a.common.out, result.dump(2) + "\n");
  const std::string csv_path = a.common.out + ".csv";
  write_text(csv_path, metaeval::table_csv(reports));

  m.inputs["dataset"] = a.dataset;
  m.inputs["annotations"] = a.annotations;
  m.outputs = {a.common.out, csv_path};
  out << metaeval::table_csv(reports);
  return m.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string contexts;
  int k = 1;
  std::string select = "rquge";
  bool all_spans = false;
  int max_answer_tokens = 4;
  int beam_size = 5;
  std::string trainer_config;
};

int cmd_synth(const SynthArgs& a, Manifest& m, std::ostream& out) {
  auto cfg = resolve_config(a.common);
  m.config = cfg;
  const auto contexts = synth::load_contexts(a.contexts);
  Runtime rt(cfg);
  synth::SynthOptions opts;
  opts.k = a.k;
  opts.selection = synth::selection_from_string(a.select);
  if (opts.selection == synth::Selection::external_adapter) {
    throw ConfigError("external_adapter selection is only available through the library API");
  }
  opts.seed = a.common.seed;
  opts.all_spans = a.all_spans;
  opts.max_answer_tokens = a.max_answer_tokens;
  opts.beam_size = a.beam_size;

  if (!a.trainer_config.empty()) {
    std::ifstream f(a.trainer_config);
    if (!f) throw ConfigError("cannot read trainer config '" + a.trainer_config + "'");
    Json j;
    try {
      j = Json::parse(f);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("trainer config: ") + e.what());
    }
    m.extra["trainer"] = synth::to_json(synth::trainer_config_from_json(j));
  }

  Rquge metric(rt.qa(), rt.scorer());
  synth::SynthRunners runners{rt.ner().get(), rt.generator().get(), &metric, nullptr};
  m.runners = {"qa", "scorer", "generator", "ner"};
  const auto result = synth::synthesize(contexts, runners, opts);
  for (const auto& s : result.skipped) m.fail(s.id, s.reason);
  if (result.examples.empty()) throw Error("no synthetic examples were produced");
  synth::emit_training_file(a.common.out, result.examples);

  m.inputs["contexts"] = a.contexts;
  m.outputs.push_back(a.common.out);
  m.extra["k"] = a.k;
  m.extra["selection"] = a.select;
  m.extra["examples"] = result.examples.size();
  out << "wrote " << result.examples.size() << " training records (" << result.skipped.size()
      << " contexts skipped) -> " << a.common.out << '\n';
  // Skipped contexts are reported, not treated as failures.
  m.extra["skipped"] = m.failures;
  m.failures = Json::array();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BaselineArgs {
  Common common;
  std::string dataset;
  std::vector<std::string> metrics{"bleu4"};
  std::string select = "all";
};

int cmd_baseline(const BaselineArgs& a, Manifest& m, std::ostream& out) {
  const auto instances = load_dataset(a.dataset);
  for (const auto& name : a.metrics) {
    if (!baselines::is_reference_metric(name)) {
      throw ConfigError("unknown baseline metric '" + name + "' (expected bleu4, rouge1 or rougeL)");
    }
  }
  const auto selector = selectors::by_name(a.select);
  std::vector<Json> rows;
  for (const auto& inst : instances) {
    std::vector<std::string> cands;
    try {
      cands = selector(inst);
    } catch (const Error& e) {
      rows.push_back(Json{{"id", inst.id}, {"candidate", ""}, {"error", e.what()}});
      m.fail(inst.id, e.what());
      continue;
    }
    for (const auto& c : cands) {
      Json row{{"id", inst.id}, {"candidate", c}};
      try {
        for (const auto& name : a.metrics) row[name] = baselines::reference_metric(name, c, inst).value;
      } catch (const Error& e) {
        row = Json{{"id", inst.id}, {"candidate", c}, {"error", e.what()}};
        m.fail(inst.id, e.what());
      }
      rows.push_back(std::move(row));
    }
  }
  write_jsonl(a.common.out, rows);
  m.inputs["dataset"] = a.dataset;
  m.outputs.push_back(a.common.out);
  out << "wrote " << rows.size() << " baseline rows -> " << a.common.out << '\n';
  return m.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-free question generation evaluation"};
  app.name("rquge");
  app.require_subcommand(1);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score candidate questions with RQUGE");
  add_common(*score_cmd, score.common);
  score_cmd->add_option("--dataset", score.dataset, "Instance JSONL")->required();
  score_cmd->add_option("--select", score.select, "all, first or reference")->capture_default_str();
  score_cmd->add_option("--batch-size", score.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  score_cmd->add_flag("--normalize", score.normalize, "Also report (kappa - 1) / 4");
  score_cmd->add_flag("--generate", score.generate, "Sample candidates for instances without any");

  RerankArgs rr;
  auto* rerank_cmd = app.add_subcommand("rerank", "Re-rank perplexity-sorted candidate bags");
  add_common(*rerank_cmd, rr.common);
  rerank_cmd->add_option("--dataset", rr.dataset, "Instance JSONL")->required();
  rerank_cmd->add_option("--k", rr.ks, "Comma list of prefix sizes")->delimiter(',')->capture_default_str();
  rerank_cmd->add_option("--metric", rr.metrics, "Baseline metrics: bleu4, rouge1, rougeL")->delimiter(',');
  rerank_cmd->add_flag("--generate", rr.generate, "Sample candidates for instances without any");

  CorruptArgs co;
  auto* corrupt_cmd = app.add_subcommand("corrupt", "Build the adversarial subset");
  add_common(*corrupt_cmd, co.common);
  corrupt_cmd->add_option("--dataset", co.dataset, "Instance JSONL with reference questions")->required();
  corrupt_cmd->add_option("--counts", co.counts, "kind=N list (default mix when absent)");
  corrupt_cmd->add_option("--total", co.total, "Scale the count mix to this many records");
  corrupt_cmd->add_flag("--auc", co.auc, "Score the records and write ROC-AUC");
  corrupt_cmd->add_option("--metric", co.metric, "Metric for --auc: rquge, bleu4, rouge1, rougeL")
      ->capture_default_str();

  MetaevalArgs me;
  auto* metaeval_cmd = app.add_subcommand("metaeval", "Correlate metrics with human ratings");
  add_common(*metaeval_cmd, me.common);
  metaeval_cmd->add_option("--dataset", me.dataset, "Instance JSONL")->required();
  metaeval_cmd->add_option("--annotations", me.annotations, "Annotation JSONL")->required();
  metaeval_cmd->add_option("--criterion", me.criterion, "grammaticality, answerability, relevance or all")
      ->capture_default_str();
  metaeval_cmd->add_option("--metric", me.metrics, "rquge and/or bleu4, rouge1, rougeL")
      ->delimiter(',')
      ->capture_default_str();
  metaeval_cmd->add_option("--select", me.select, "first or reference")->capture_default_str();

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic QA training data");
  add_common(*synth_cmd, sy.common);
  synth_cmd->add_option("--contexts,--dataset", sy.contexts, "JSONL with id and context")->required();
  synth_cmd->add_option("--k", sy.k, "Re-ranking prefix size")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--select", sy.select, "rquge, ppl or beam")->capture_default_str();
  synth_cmd->add_flag("--all-spans", sy.all_spans, "One example per answer span");
  synth_cmd->add_option("--max-answer-tokens", sy.max_answer_tokens)->capture_default_str();
  synth_cmd->add_option("--beam-size", sy.beam_size)->capture_default_str();
  synth_cmd->add_option("--trainer-config", sy.trainer_config, "Trainer hyper-parameters to record");

  BaselineArgs bl;
  auto* baseline_cmd = app.add_subcommand("baseline", "Reference-based metrics");
  add_common(*baseline_cmd, bl.common);
  baseline_cmd->add_option("--dataset", bl.dataset, "Instance JSONL")->required();
  baseline_cmd->add_option("--metric", bl.metrics, "bleu4, rouge1, rougeL")->delimiter(',')->capture_default_str();
  baseline_cmd->add_option("--select", bl.select, "all, first or reference")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFatal;
  }

  Manifest m;
  m.args = args;
  try {
    if (score_cmd->parsed()) {
      m.command = "score";
      m.seed = score.common.seed;
      const int rc = cmd_score(score, m, out);
      m.write(score.common.out);
      return rc;
    }
    if (rerank_cmd->parsed()) {
      m.command = "rerank";
      m.seed = rr.common.seed;
      const int rc = cmd_rerank(rr, m, out);
      m.write(rr.common.out);
      return rc;
    }
    if (corrupt_cmd->parsed()) {
      m.command = "corrupt";
      m.seed = co.common.seed;
      const int rc = cmd_corrupt(co, m, out);
      m.write(co.common.out);
      return rc;
    }
    if (metaeval_cmd->parsed()) {
      m.command = "metaeval";
      m.seed = me.common.seed;
      const int rc = cmd_metaeval(me, m, out);
      m.write(me.common.out);
      return rc;
    }
    if (synth_cmd->parsed()) {
      m.command = "synth";
      m.seed = sy.common.seed;
      const int rc = cmd_synth(sy, m, out);
      m.write(sy.common.out);
      return rc;
    }
    if (baseline_cmd->parsed()) {
      m.command = "baseline";
      const int rc = cmd_baseline(bl, m, out);
      m.write(bl.common.out);
      return rc;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace rquge::cli
