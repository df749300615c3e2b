#include "rquge/core.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "rquge/error.hpp"
#include "rquge/text.hpp"

namespace rquge {
namespace {

std::string require_string(const Json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

int require_int(const Json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) {
    throw ParseError(line, std::string("field '") + key + "' must be an integer");
  }
  return it->get<int>();
}

/// First key present among the alternatives.
const Json* find_any(const Json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = j.find(k);
    if (it != j.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

QGInstance instance_from_json_at(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
  QGInstance inst;
  inst.id = require_string(j, "id", line);
  inst.context = require_string(j, "context", line);

  // "answer" and "question" are accepted so that emitted training files load back.
  const Json* gold = find_any(j, {"gold_answer", "answer"});
  if (gold == nullptr) throw ParseError(line, "missing field 'gold_answer'");
  if (!gold->is_object()) throw ParseError(line, "field 'gold_answer' must be an object");
  inst.gold_answer.text = require_string(*gold, "text", line);
  if (auto it = gold->find("char_start"); it != gold->end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      throw ParseError(line, "field 'gold_answer.char_start' must be a non-negative integer");
    }
    inst.gold_answer.char_start = it->get<std::size_t>();
  }

  if (const Json* ref = find_any(j, {"reference_question", "question"})) {
    if (!ref->is_string()) throw ParseError(line, "field 'reference_question' must be a string");
    inst.reference_question = ref->get<std::string>();
  }

  if (auto it = j.find("candidates"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(line, "field 'candidates' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) throw ParseError(line, "candidate must be an object");
      CandidateQuestion cand;
      cand.text = require_string(c, "text", line);
      if (auto p = c.find("ppl"); p != c.end() && !p->is_null()) {
        if (!p->is_number()) throw ParseError(line, "field 'ppl' must be a number");
        cand.ppl = p->get<double>();
      }
      if (auto s = optional_string(c, "source", line)) {
        try {
          cand.source = candidate_source_from_string(*s);
        } catch (const Error& e) {
          throw ParseError(line, e.what());
        }
      }
      inst.candidates.push_back(std::move(cand));
    }
  }
  return inst;
}

AnnotationRecord annotation_from_json_at(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
  AnnotationRecord r;
  r.instance_id = require_string(j, "instance_id", line);
  r.annotator_id = require_string(j, "annotator_id", line);
  r.grammaticality = require_int(j, "grammaticality", line);
  r.answerability = require_int(j, "answerability", line);
  r.relevance = require_int(j, "relevance", line);
  return r;
}

template <typename F>
void for_each_jsonl_line(std::istream& in, F&& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
      on_record(j, line_no);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string_view to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::generated: return "generated";
    case CandidateSource::reference: return "reference";
    case CandidateSource::corrupted: return "corrupted";
    case CandidateSource::external: return "external";
  }
  return "generated";
}

CandidateSource candidate_source_from_string(std::string_view s) {
  if (s == "generated") return CandidateSource::generated;
  if (s == "reference") return CandidateSource::reference;
  if (s == "corrupted") return CandidateSource::corrupted;
  if (s == "external") return CandidateSource::external;
  throw Error("unknown candidate source '" + std::string(s) + "'");
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::grammaticality: return "grammaticality";
    case Criterion::answerability: return "answerability";
    case Criterion::relevance: return "relevance";
  }
  return "answerability";
}

Criterion criterion_from_string(std::string_view s) {
  if (s == "grammaticality") return Criterion::grammaticality;
  if (s == "answerability") return Criterion::answerability;
  if (s == "relevance") return Criterion::relevance;
  throw Error("unknown criterion '" + std::string(s) + "'");
}

int AnnotationRecord::rating(Criterion c) const {
  switch (c) {
    case Criterion::grammaticality: return grammaticality;
    case Criterion::answerability: return answerability;
    case Criterion::relevance: return relevance;
  }
  return 0;
}

double AveragedRating::rating(Criterion c) const {
  switch (c) {
    case Criterion::grammaticality: return grammaticality;
    case Criterion::answerability: return answerability;
    case Criterion::relevance: return relevance;
  }
  return 0.0;
}

void validate(const AnswerSpan& span, const std::string& context, const std::string& id) {
  if (text::trim(span.text).empty()) throw ValidationError(id, "gold_answer.text", "must be nonempty");
  if (span.text != text::trim(span.text)) {
    throw ValidationError(id, "gold_answer.text", "has leading or trailing whitespace");
  }
  if (span.char_start) {
    auto byte = text::utf8_byte_offset(context, *span.char_start);
    if (!byte || context.compare(*byte, span.text.size(), span.text) != 0) {
      throw ValidationError(id, "gold_answer.char_start",
                            "context at offset " + std::to_string(*span.char_start) +
                                " does not match answer text");
    }
  }
}

void validate(const CandidateQuestion& c, const std::string& id) {
  if (text::trim(c.text).empty()) throw ValidationError(id, "candidates.text", "must be nonempty");
  if (c.ppl && (!std::isfinite(*c.ppl) || *c.ppl <= 0.0)) {
    throw ValidationError(id, "candidates.ppl", "must be finite and positive");
  }
}

void validate(const QGInstance& instance) {
  if (instance.id.empty()) throw ValidationError("", "id", "must be nonempty");
  if (text::trim(instance.context).empty()) {
    throw ValidationError(instance.id, "context", "must be nonempty");
  }
  validate(instance.gold_answer, instance.context, instance.id);
  for (const auto& c : instance.candidates) validate(c, instance.id);
}

void validate(const AnnotationRecord& r) {
  if (r.instance_id.empty()) throw ValidationError("", "instance_id", "must be nonempty");
  if (r.annotator_id.empty()) throw ValidationError(r.instance_id, "annotator_id", "must be nonempty");
  auto check = [&](const char* field, int v, int hi) {
    if (v < 1 || v > hi) {
      throw ValidationError(r.instance_id, field,
                            "rating " + std::to_string(v) + " outside 1.." + std::to_string(hi));
    }
  };
  check("grammaticality", r.grammaticality, 3);
  check("answerability", r.answerability, 3);
  check("relevance", r.relevance, 2);
}

Json to_json(const QGInstance& instance) {
  Json j;
  j["id"] = instance.id;
  j["context"] = instance.context;
  Json gold;
  gold["text"] = instance.gold_answer.text;
  if (instance.gold_answer.char_start) gold["char_start"] = *instance.gold_answer.char_start;
  j["gold_answer"] = std::move(gold);
  if (instance.reference_question) j["reference_question"] = *instance.reference_question;
  if (!instance.candidates.empty()) {
    Json cands = Json::array();
    for (const auto& c : instance.candidates) {
      Json cj;
      cj["text"] = c.text;
      if (c.ppl) cj["ppl"] = *c.ppl;
      cj["source"] = std::string(to_string(c.source));
      cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
  }
  return j;
}

QGInstance instance_from_json(const Json& j) { return instance_from_json_at(j, 0); }

Json to_json(const AnnotationRecord& r) {
  Json j;
  j["instance_id"] = r.instance_id;
  j["annotator_id"] = r.annotator_id;
  j["grammaticality"] = r.grammaticality;
  j["answerability"] = r.answerability;
  j["relevance"] = r.relevance;
  return j;
}

AnnotationRecord annotation_from_json(const Json& j) { return annotation_from_json_at(j, 0); }

std::vector<QGInstance> parse_dataset(std::istream& in) {
  std::vector<QGInstance> out;
  std::set<std::string> seen;
  for_each_jsonl_line(in, [&](const Json& j, std::size_t line) {
    QGInstance inst = instance_from_json_at(j, line);
    validate(inst);
    if (!seen.insert(inst.id).second) throw ValidationError(inst.id, "id", "duplicate id");
    out.push_back(std::move(inst));
  });
  return out;
}

std::vector<QGInstance> load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const QGInstance> instances) {
  for (const auto& inst : instances) out << to_json(inst).dump() << '\n';
}

void save_dataset(const std::filesystem::path& path, std::span<const QGInstance> instances) {
  auto out = open_output(path);
  write_dataset(out, instances);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_jsonl_line(in, [&](const Json& j, std::size_t line) {
    AnnotationRecord r = annotation_from_json_at(j, line);
    validate(r);
    if (!seen.emplace(r.instance_id, r.annotator_id).second) {
      throw ValidationError(r.instance_id, "annotator_id",
                            "duplicate rating by annotator '" + r.annotator_id + "'");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_annotations(in);
}

void save_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> records) {
  auto out = open_output(path);
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::map<std::string, std::vector<AnnotationRecord>> group_annotations(
    std::span<const AnnotationRecord> records) {
  std::map<std::string, std::vector<AnnotationRecord>> groups;
  for (const auto& r : records) groups[r.instance_id].push_back(r);
  return groups;
}

std::vector<AveragedRating> average_annotations(std::span<const AnnotationRecord> records) {
  std::vector<AveragedRating> out;
  for (const auto& [id, group] : group_annotations(records)) {
    AveragedRating avg;
    avg.instance_id = id;
    avg.annotators = group.size();
    for (const auto& r : group) {
      avg.grammaticality += r.grammaticality;
      avg.answerability += r.answerability;
      avg.relevance += r.relevance;
    }
    const auto n = static_cast<double>(group.size());
    avg.grammaticality /= n;
    avg.answerability /= n;
    avg.relevance /= n;
    out.push_back(std::move(avg));
  }
  return out;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Json> rows;
  for_each_jsonl_line(in, [&](const Json& j, std::size_t) { rows.push_back(j); });
  return rows;
}

void write_jsonl(const std::filesystem::path& path, std::span<const Json> rows) {
  auto out = open_output(path);
  for (const auto& r : rows) out << r.dump() << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace rquge
