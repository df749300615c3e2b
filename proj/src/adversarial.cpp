#include "rquge/adversarial.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

#include "rquge/error.hpp"
#include "rquge/random.hpp"
#include "rquge/text.hpp"

namespace rquge::adversarial {
namespace {

struct KindName {
  CorruptionKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {CorruptionKind::paraphrase_backtranslate, "paraphrase_backtranslate"},
    {CorruptionKind::paraphrase_model, "paraphrase_model"},
    {CorruptionKind::negation, "negation"},
    {CorruptionKind::gender_reverse, "gender_reverse"},
    {CorruptionKind::entity_swap, "entity_swap"},
};

std::string match_case(std::string_view replacement, std::string_view original) {
  std::string out(replacement);
  if (original.empty() || out.empty()) return out;
  const bool all_upper =
      original.size() > 1 && std::all_of(original.begin(), original.end(), [](unsigned char c) {
        return !std::isalpha(c) || std::isupper(c);
      });
  if (all_upper) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (std::isupper(static_cast<unsigned char>(original.front()))) {
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  }
  return out;
}

std::string splice(std::string_view s, std::size_t begin, std::size_t end, std::string_view with) {
  std::string out(s.substr(0, begin));
  out += with;
  out += s.substr(end);
  return out;
}

bool same_question(std::string_view a, std::string_view b) {
  return text::to_lower(text::collapse_whitespace(a)) == text::to_lower(text::collapse_whitespace(b));
}

// Multiset difference of whitespace tokens, e.g. "-developing +expanding".
std::string word_diff(std::string_view original, std::string_view changed) {
  auto a = text::split_whitespace(original);
  auto b = text::split_whitespace(changed);
  std::vector<std::string> removed;
  std::vector<std::string> remaining = b;
  for (const auto& w : a) {
    auto it = std::find(remaining.begin(), remaining.end(), w);
    if (it == remaining.end()) {
      removed.push_back("-" + w);
    } else {
      remaining.erase(it);
    }
  }
  for (auto& w : remaining) w = "+" + w;
  removed.insert(removed.end(), remaining.begin(), remaining.end());
  return text::join(removed, " ");
}

CorruptionRecord make_record(std::string_view original, std::string corrupted, CorruptionKind kind,
                             std::string audit) {
  return CorruptionRecord{"", std::string(original), std::move(corrupted), kind,
                          is_positive(kind) ? 1 : 0, std::move(audit)};
}

bool is_negation_word(std::string_view lower) {
  return lower == "not" || lower == "never" || lower == "cannot" ||
         (lower.size() > 3 && lower.substr(lower.size() - 3) == "n't");
}

}  // namespace

std::string to_string(CorruptionKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

CorruptionKind corruption_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (s == name) return k;
  }
  throw ParseError(0, "unknown corruption kind '" + std::string(s) + "'");
}

bool is_positive(CorruptionKind kind) {
  return kind == CorruptionKind::paraphrase_backtranslate || kind == CorruptionKind::paraphrase_model;
}

Json to_json(const CorruptionRecord& r) {
  Json j;
  j["instance_id"] = r.instance_id;
  j["original"] = r.original;
  j["corrupted"] = r.corrupted;
  j["kind"] = to_string(r.kind);
  j["label"] = r.label;
  j["edit_audit"] = r.edit_audit;
  return j;
}

CorruptionRecord corruption_record_from_json(const Json& j) {
  const std::string id = j.contains("instance_id") && j["instance_id"].is_string()
                             ? j["instance_id"].get<std::string>()
                             : std::string();
  const auto str = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw ValidationError(id, field, "missing or not a string");
    }
    return j[field].get<std::string>();
  };
  CorruptionRecord r;
  r.instance_id = str("instance_id");
  r.original = str("original");
  r.corrupted = str("corrupted");
  try {
    r.kind = corruption_kind_from_string(str("kind"));
  } catch (const ParseError&) {
    throw ValidationError(id, "kind", "unknown corruption kind");
  }
  if (!j.contains("label") || !j["label"].is_number_integer()) {
    throw ValidationError(id, "label", "missing or not an integer");
  }
  r.label = j["label"].get<int>();
  if (r.label != (is_positive(r.kind) ? 1 : 0)) {
    throw ValidationError(id, "label", "label does not match kind " + to_string(r.kind));
  }
  if (j.contains("edit_audit") && j["edit_audit"].is_string()) r.edit_audit = j["edit_audit"];
  return r;
}

// ---------------------------------------------------------------------------

TableAntonymLexicon::TableAntonymLexicon(std::map<std::string, std::string, std::less<>> table)
    : table_(std::move(table)) {}

std::optional<std::string> TableAntonymLexicon::antonym(std::string_view word) const {
  auto it = table_.find(word);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

const TableAntonymLexicon& default_antonyms() {
  static const TableAntonymLexicon lexicon([] {
    const std::pair<const char*, const char*> pairs[] = {
        {"win", "lose"},         {"won", "lost"},           {"increase", "decrease"},
        {"increased", "decreased"}, {"accept", "reject"},   {"accepted", "rejected"},
        {"include", "exclude"},  {"included", "excluded"},  {"allow", "prevent"},
        {"allowed", "prevented"},
    };
    std::map<std::string, std::string, std::less<>> table;
    for (const auto& [a, b] : pairs) {
      table[a] = b;
      table[b] = a;
    }
    return table;
  }());
  return lexicon;
}

bool is_auxiliary(std::string_view w) {
  static const char* const kAux[] = {"am",    "is",    "are",   "was",   "were",  "be",
                                     "been",  "being", "do",    "does",  "did",   "has",
                                     "have",  "had",   "can",   "could", "will",  "would",
                                     "shall", "should", "may",  "might", "must"};
  return std::any_of(std::begin(kAux), std::end(kAux), [&](const char* a) { return w == a; });
}

Outcome corrupt_negate(std::string_view question, std::uint64_t seed, const AntonymLexicon& lexicon) {
  const auto kind = CorruptionKind::negation;
  if (text::trim(question).empty()) return Skip{kind, "empty question"};
  const auto words = text::word_tokens(question);

  std::optional<std::size_t> aux;
  std::optional<std::size_t> verb;
  std::optional<std::string> verb_antonym;
  bool negated = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto lower = text::to_lower(words[i].text);
    if (is_negation_word(lower)) negated = true;
    if (is_auxiliary(lower)) {
      if (!aux) aux = i;
      continue;
    }
    if (!verb) {
      if (auto a = lexicon.antonym(lower)) {
        verb = i;
        verb_antonym = std::move(a);
      }
    }
  }
  if (negated) return Skip{kind, "already negated"};
  if (!aux && !verb) return Skip{kind, "no auxiliary verb or antonym"};

  Rng rng(seed);
  const bool insert = aux && (!verb || rng.coin());
  if (insert) {
    const auto& w = words[*aux];
    return make_record(question, splice(question, w.end, w.end, " not"), kind,
                       "inserted 'not' after '" + w.text + "'");
  }
  const auto& w = words[*verb];
  const std::string replacement = match_case(*verb_antonym, w.text);
  return make_record(question, splice(question, w.begin, w.end, replacement), kind,
                     "replaced '" + w.text + "' with '" + replacement + "'");
}

const std::map<std::string, std::string, std::less<>>& gender_table() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"he", "she"},   {"she", "he"},   {"him", "her"},         {"her", "him"},
      {"his", "hers"}, {"hers", "his"}, {"himself", "herself"}, {"herself", "himself"},
  };
  return table;
}

Outcome corrupt_gender(std::string_view question, std::uint64_t /*seed*/) {
  const auto& table = gender_table();
  std::string out;
  std::vector<std::string> edits;
  std::size_t cursor = 0;
  for (const auto& w : text::word_tokens(question)) {
    auto it = table.find(text::to_lower(w.text));
    if (it == table.end()) continue;
    const std::string replacement = match_case(it->second, w.text);
    out += question.substr(cursor, w.begin - cursor);
    out += replacement;
    cursor = w.end;
    edits.push_back(w.text + "->" + replacement);
  }
  if (edits.empty()) return Skip{CorruptionKind::gender_reverse, "no gendered pronoun"};
  out += question.substr(cursor);
  return make_record(question, std::move(out), CorruptionKind::gender_reverse, text::join(edits, "; "));
}

Outcome corrupt_entity_swap(std::string_view question, std::string_view context,
                            const runtime::NerRunner& ner, std::uint64_t seed) {
  const auto kind = CorruptionKind::entity_swap;
  if (text::trim(context).empty()) throw PreconditionError("entity swap needs a nonempty context");
  const auto q_ents = ner.entities(question);
  if (q_ents.empty()) return Skip{kind, "no question entity"};
  const auto c_ents = ner.entities(context);

  struct Option {
    const runtime::NerEntity* target;
    std::vector<std::string> replacements;
  };
  std::vector<Option> options;
  for (const auto& qe : q_ents) {
    Option opt{&qe, {}};
    for (const auto& ce : c_ents) {
      if (ce.type != qe.type || ce.surface == qe.surface) continue;
      if (std::find(opt.replacements.begin(), opt.replacements.end(), ce.surface) ==
          opt.replacements.end()) {
        opt.replacements.push_back(ce.surface);
      }
    }
    if (!opt.replacements.empty()) options.push_back(std::move(opt));
  }
  if (options.empty()) return Skip{kind, "no same-type context entity"};

  Rng rng(seed);
  const auto& opt = options[rng.uniform_index(options.size())];
  const auto& replacement = opt.replacements[rng.uniform_index(opt.replacements.size())];
  const auto& target = *opt.target;

  auto begin = text::utf8_byte_offset(question, target.char_start);
  if (!begin || question.substr(*begin, target.surface.size()) != target.surface) {
    const auto found = question.find(target.surface);
    if (found == std::string_view::npos) {
      throw RunnerError(ner.handle().name,
                        "entity '" + target.surface + "' does not occur in the analysed text");
    }
    begin = found;
  }
  return make_record(question, splice(question, *begin, *begin + target.surface.size(), replacement),
                     kind, target.surface + " -> " + replacement + " (" + target.type + ")");
}

Outcome paraphrase_positive(std::string_view question, ParaphraseMethod method,
                            const ParaphraseRunners& runners, std::uint64_t seed) {
  if (method == ParaphraseMethod::backtranslate) {
    const auto kind = CorruptionKind::paraphrase_backtranslate;
    if (!runners.translator) throw PreconditionError("back-translation needs a translator");
    Rng rng(seed);
    const bool zh_first = rng.coin();
    for (const char* pivot : zh_first ? std::array{"zh", "fr"} : std::array{"fr", "zh"}) {
      const auto there = runners.translator->translate(question, "en", pivot);
      const auto back = runners.translator->translate(there, pivot, "en");
      if (!same_question(back, question) && !text::trim(back).empty()) {
        return make_record(question, back, kind,
                           "via " + std::string(pivot) + ": " + word_diff(question, back));
      }
    }
    return Skip{kind, "paraphrase equals original"};
  }
  const auto kind = CorruptionKind::paraphrase_model;
  if (!runners.paraphraser) throw PreconditionError("model paraphrasing needs a paraphraser");
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto out = runners.paraphraser->paraphrase(question);
    if (!same_question(out, question) && !text::trim(out).empty()) {
      return make_record(question, out, kind, word_diff(question, out));
    }
  }
  return Skip{kind, "paraphrase equals original"};
}

// ---------------------------------------------------------------------------

KindCounts default_counts() {
  return {
      {CorruptionKind::paraphrase_backtranslate, 625},
      {CorruptionKind::paraphrase_model, 625},
      {CorruptionKind::negation, 1000},
      {CorruptionKind::gender_reverse, 150},
      {CorruptionKind::entity_swap, 100},
  };
}

KindCounts scale_counts(const KindCounts& counts, std::size_t total) {
  std::size_t sum = 0;
  for (const auto& [_, c] : counts) sum += c;
  if (sum == 0) throw PreconditionError("cannot scale an all-zero count map");
  KindCounts out;
  std::vector<std::pair<CorruptionKind, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (const auto& [k, c] : counts) {
    const std::size_t scaled = c * total;
    out[k] = scaled / sum;
    assigned += out[k];
    remainders.emplace_back(k, scaled % sum);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[remainders[i % remainders.size()].first];
  return out;
}

bool AdversarialSet::complete() const {
  return std::all_of(yield.begin(), yield.end(),
                     [](const auto& kv) { return kv.second.produced == kv.second.requested; });
}

AdversarialSet build_adversarial_set(std::span<const QGInstance> instances,
                                     const KindCounts& counts, std::uint64_t seed,
                                     const AdversarialRunners& runners) {
  AdversarialSet set;
  std::vector<const QGInstance*> eligible;
  for (const auto& inst : instances) {
    if (inst.reference_question && !text::trim(*inst.reference_question).empty()) {
      eligible.push_back(&inst);
    } else {
      ++set.instances_without_reference;
    }
  }
  const AntonymLexicon& antonyms = runners.antonyms ? *runners.antonyms : default_antonyms();
  const ParaphraseRunners para{runners.translator, runners.paraphraser};

  for (const auto kind : kAllKinds) {
    auto it = counts.find(kind);
    if (it == counts.end() || it->second == 0) continue;
    if (kind == CorruptionKind::entity_swap && !runners.ner) {
      throw PreconditionError("entity swap requested without an NER runner");
    }
    if (kind == CorruptionKind::paraphrase_backtranslate && !runners.translator) {
      throw PreconditionError("back-translation requested without a translator");
    }
    if (kind == CorruptionKind::paraphrase_model && !runners.paraphraser) {
      throw PreconditionError("model paraphrasing requested without a paraphraser");
    }
    auto& yield = set.yield[kind];
    yield.requested = it->second;

    const std::string name = to_string(kind);
    std::vector<const QGInstance*> order = eligible;
    Rng(mix_seed(seed, "order:" + name)).shuffle(order);
    for (const QGInstance* inst : order) {
      if (yield.produced == yield.requested) break;
      const std::string& q = *inst->reference_question;
      const std::uint64_t rec_seed = mix_seed(seed, name + ":" + inst->id);
      Outcome outcome;
      try {
        switch (kind) {
          case CorruptionKind::negation:
            outcome = corrupt_negate(q, rec_seed, antonyms);
            break;
          case CorruptionKind::gender_reverse:
            outcome = corrupt_gender(q, rec_seed);
            break;
          case CorruptionKind::entity_swap:
            outcome = corrupt_entity_swap(q, inst->context, *runners.ner, rec_seed);
            break;
          case CorruptionKind::paraphrase_backtranslate:
            outcome = paraphrase_positive(q, ParaphraseMethod::backtranslate, para, rec_seed);
            break;
          case CorruptionKind::paraphrase_model:
            outcome = paraphrase_positive(q, ParaphraseMethod::paraphraser, para, rec_seed);
            break;
        }
      } catch (const RunnerError& e) {
        throw e.tagged(inst->id);
      }
      if (auto* rec = std::get_if<CorruptionRecord>(&outcome)) {
        rec->instance_id = inst->id;
        set.records.push_back(std::move(*rec));
        ++yield.produced;
      } else {
        ++yield.skipped[std::get<Skip>(outcome).reason];
      }
    }
  }
  return set;
}

Json yield_report(const AdversarialSet& set) {
  Json kinds = Json::object();
  for (const auto& [kind, y] : set.yield) {
    Json skipped = Json::object();
    for (const auto& [reason, n] : y.skipped) skipped[reason] = n;
    kinds[to_string(kind)] = Json{{"requested", y.requested}, {"produced", y.produced}, {"skipped", skipped}};
  }
  return Json{{"complete", set.complete()},
              {"records", set.records.size()},
              {"instances_without_reference", set.instances_without_reference},
              {"per_kind", kinds}};
}

// ---------------------------------------------------------------------------

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw PreconditionError("scores and labels differ in length");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw PreconditionError("labels must be 0 or 1");
    if (std::isnan(scores[i])) throw PreconditionError("score is NaN");
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedError("AUC needs both positive and negative samples");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of average ranks (1-based) over positives.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[idx[t]] == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

AucReport robustness_auc(std::span<const CorruptionRecord> records, std::span<const double> scores) {
  if (records.size() != scores.size()) throw PreconditionError("every record needs exactly one score");
  AucReport report;
  std::vector<int> labels;
  for (const auto& r : records) labels.push_back(r.label);
  report.total = auc(scores, labels);
  for (const auto kind : kNegativeKinds) {
    std::vector<double> s;
    std::vector<int> l;
    bool present = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == 1 || records[i].kind == kind) {
        s.push_back(scores[i]);
        l.push_back(records[i].label);
        present = present || records[i].kind == kind;
      }
    }
    if (present) report.per_kind[kind] = auc(s, l);
  }
  return report;
}

Json to_json(const AucReport& report) {
  Json per_kind = Json::object();
  for (const auto& [kind, v] : report.per_kind) per_kind[to_string(kind)] = v;
  return Json{{"total", report.total},
              {"per_kind", per_kind},
              {"note", "per-kind AUC compares that kind's negatives with the shared positive pool"}};
}

}  // namespace rquge::adversarial
