#include "rquge/synth.hpp"

#include <fstream>
#include <set>

#include "rquge/error.hpp"
#include "rquge/random.hpp"
#include "rquge/rerank.hpp"
#include "rquge/text.hpp"

namespace rquge::synth {

std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::rquge: return "rquge";
    case Selection::ppl: return "ppl";
    case Selection::beam: return "beam";
    case Selection::external_adapter: return "external_adapter";
  }
  return "unknown";
}

Selection selection_from_string(std::string_view s) {
  for (auto sel : {Selection::rquge, Selection::ppl, Selection::beam, Selection::external_adapter}) {
    if (s == to_string(sel)) return sel;
  }
  throw ConfigError("unknown selection strategy '" + std::string(s) +
                    "' (expected rquge, ppl, beam or external_adapter)");
}

std::vector<SynthContext> load_contexts(const std::filesystem::path& path) {
  std::vector<SynthContext> out;
  std::set<std::string> seen;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("context") ||
        !j["context"].is_string()) {
      throw ParseError(line, "context record needs string fields 'id' and 'context'");
    }
    SynthContext c{j["id"].get<std::string>(), j["context"].get<std::string>()};
    if (c.id.empty()) throw ValidationError("", "id", "empty id");
    if (text::trim(c.context).empty()) throw ValidationError(c.id, "context", "empty context");
    if (!seen.insert(c.id).second) throw ValidationError(c.id, "id", "duplicate id");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<AnswerSpan> extract_answer_spans(std::string_view context, const runtime::NerRunner& ner,
                                             int max_tokens) {
  if (text::trim(context).empty()) throw PreconditionError("cannot extract spans from an empty context");
  std::vector<AnswerSpan> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& e : ner.entities(context)) {
    const auto n_tokens = text::split_whitespace(e.surface).size();
    if (n_tokens == 0 || n_tokens >= static_cast<std::size_t>(max_tokens)) continue;
    const auto begin = text::utf8_byte_offset(context, e.char_start);
    if (!begin || context.substr(*begin, e.surface.size()) != e.surface) continue;
    if (e.surface != text::trim(e.surface)) continue;
    if (!seen.emplace(e.surface, e.char_start).second) continue;
    out.push_back(AnswerSpan{e.surface, e.char_start});
  }
  return out;
}

namespace {

std::size_t pick_by_adapter(const QGInstance& inst, std::size_t k, const baselines::Adapter& adapter) {
  const auto sorted = rerank::sort_by_ppl(inst);
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < k && i < sorted.size(); ++i) {
    baselines::ExternalInput in{sorted[i].first.text, std::nullopt, inst.context, inst.gold_answer.text};
    const double v = adapter.fn(in);
    const bool better = adapter.higher_is_better ? v > best_value : v < best_value;
    if (i == 0 || better) {
      best = i;
      best_value = v;
    }
  }
  return sorted[best].second;
}

SynthExample make_example(const QGInstance& inst, const SynthRunners& runners,
                          const SynthOptions& options) {
  SynthExample ex{inst.id, inst.context, inst.gold_answer, "", 0.0, options.selection};
  if (options.selection == Selection::beam) {
    ex.question = runners.generator->beam_search(inst.gold_answer, inst.context, options.beam_size).text;
    ex.kappa = runners.metric->score(inst, ex.question).kappa;
    return ex;
  }

  QGInstance bag = inst;
  bag.candidates = runners.generator->generate_candidates(
      inst.gold_answer, inst.context, mix_seed(options.seed, "generate:" + inst.id));
  switch (options.selection) {
    case Selection::rquge: {
      const auto r = rerank::rerank(bag, options.k, *runners.metric);
      ex.question = r.chosen.text;
      ex.kappa = r.chosen_score.kappa;
      return ex;
    }
    case Selection::ppl:
      ex.question = rerank::sort_by_ppl(bag).front().first.text;
      break;
    case Selection::external_adapter: {
      const auto& adapter = runners.adapters->get(options.adapter_name);
      ex.question = bag.candidates[pick_by_adapter(bag, static_cast<std::size_t>(options.k), adapter)].text;
      break;
    }
    case Selection::beam:
      break;
  }
  ex.kappa = runners.metric->score(inst, ex.question).kappa;
  return ex;
}

}  // namespace

SynthResult synthesize(std::span<const SynthContext> contexts, const SynthRunners& runners,
                       const SynthOptions& options) {
  if (options.k < 1) throw PreconditionError("k must be at least 1");
  if (!runners.ner || !runners.generator || !runners.metric) {
    throw PreconditionError("synthesis needs NER, generator and RQUGE runners");
  }
  if (options.selection != Selection::beam && options.k > runners.generator->handle().sampling.num_candidates) {
    throw PreconditionError("k exceeds the number of sampled candidates");
  }
  if (options.selection == Selection::external_adapter) {
    if (!runners.adapters) throw PreconditionError("external_adapter selection needs an adapter registry");
    runners.adapters->get(options.adapter_name);
  }

  SynthResult result;
  for (const auto& ctx : contexts) {
    std::vector<AnswerSpan> spans;
    try {
      spans = extract_answer_spans(ctx.context, *runners.ner, options.max_answer_tokens);
    } catch (const RunnerError& e) {
      throw e.tagged(ctx.id);
    }
    if (spans.empty()) {
      result.skipped.push_back({ctx.id, "no answer span"});
      continue;
    }
    std::vector<std::pair<std::string, AnswerSpan>> chosen;
    if (options.all_spans) {
      for (std::size_t i = 0; i < spans.size(); ++i) {
        chosen.emplace_back(ctx.id + "#" + std::to_string(i), spans[i]);
      }
    } else {
      Rng rng(mix_seed(options.seed, "span:" + ctx.id));
      chosen.emplace_back(ctx.id, spans[rng.uniform_index(spans.size())]);
    }
    for (auto& [id, span] : chosen) {
      QGInstance inst{id, ctx.context, std::move(span), std::nullopt, {}};
      try {
        result.examples.push_back(make_example(inst, runners, options));
      } catch (const RunnerError& e) {
        throw e.tagged(id);
      }
    }
  }
  return result;
}

Json training_record(const SynthExample& ex) {
  Json j;
  j["id"] = ex.id;
  j["context"] = ex.context;
  j["question"] = ex.question;
  j["answer"] = Json{{"text", ex.answer.text}, {"char_start", ex.answer.char_start.value_or(0)}};
  j["kappa"] = ex.kappa;
  j["selection"] = to_string(ex.selection);
  return j;
}

void emit_training_file(const std::filesystem::path& path, std::span<const SynthExample> examples) {
  if (examples.empty()) throw PreconditionError("no examples to emit");
  std::vector<Json> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) {
    if (!ex.answer.char_start) {
      throw ValidationError(ex.id, "answer.char_start", "synthetic answers must carry an offset");
    }
    rows.push_back(training_record(ex));
  }
  write_jsonl(path, rows);
}

Json to_json(const TrainerConfig& c) {
  return Json{{"architecture", c.architecture},   {"encoder_layers", c.encoder_layers},
              {"decoder_layers", c.decoder_layers}, {"training_steps", c.training_steps},
              {"dropout", c.dropout},             {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size}};
}

TrainerConfig trainer_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("trainer config must be a JSON object");
  TrainerConfig c;
  try {
    c.architecture = j.value("architecture", c.architecture);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.training_steps = j.value("training_steps", c.training_steps);
    c.dropout = j.value("dropout", c.dropout);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("trainer config: ") + e.what());
  }
  if (c.training_steps < 1 || c.batch_size < 1 || !(c.learning_rate > 0.0) || c.dropout < 0.0 ||
      c.dropout >= 1.0) {
    throw ConfigError("trainer config: values out of range");
  }
  return c;
}

}  // namespace rquge::synth
