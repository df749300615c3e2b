#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rquge {

using Json = nlohmann::ordered_json;

/// An answer inside a context. char_start counts Unicode code points.
struct AnswerSpan {
  std::string text;
  std::optional<std::size_t> char_start;

  bool operator==(const AnswerSpan&) const = default;
};

enum class CandidateSource { generated, reference, corrupted, external };

std::string_view to_string(CandidateSource s);
CandidateSource candidate_source_from_string(std::string_view s);

struct CandidateQuestion {
  std::string text;
  std::optional<double> ppl;  // generator perplexity
  CandidateSource source = CandidateSource::generated;

  bool operator==(const CandidateQuestion&) const = default;
};

/// One evaluation unit: a context paragraph, the gold answer span, and
/// optionally a human reference question and a bag of candidates.
struct QGInstance {
  std::string id;
  std::string context;
  AnswerSpan gold_answer;
  std::optional<std::string> reference_question;
  std::vector<CandidateQuestion> candidates;

  bool operator==(const QGInstance&) const = default;
};

enum class Criterion { grammaticality, answerability, relevance };

std::string_view to_string(Criterion c);
Criterion criterion_from_string(std::string_view s);

/// One annotator's ratings for one question. Grammaticality and
/// answerability are on a 1-3 scale, relevance on 1-2.
struct AnnotationRecord {
  std::string instance_id;
  std::string annotator_id;
  int grammaticality = 0;
  int answerability = 0;
  int relevance = 0;

  int rating(Criterion c) const;
  bool operator==(const AnnotationRecord&) const = default;
};

/// Mean rating over the annotators of one instance.
struct AveragedRating {
  std::string instance_id;
  double grammaticality = 0.0;
  double answerability = 0.0;
  double relevance = 0.0;
  std::size_t annotators = 0;

  double rating(Criterion c) const;
};

// Validation throws ValidationError naming the record id and field.
void validate(const AnswerSpan& span, const std::string& context, const std::string& id);
void validate(const CandidateQuestion& c, const std::string& id);
void validate(const QGInstance& instance);
void validate(const AnnotationRecord& record);

Json to_json(const QGInstance& instance);
QGInstance instance_from_json(const Json& j);
Json to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const Json& j);

/// Reads JSONL instances. Blank lines are skipped; line numbers in errors
/// are 1-based physical lines.
std::vector<QGInstance> parse_dataset(std::istream& in);
std::vector<QGInstance> load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const QGInstance> instances);
void save_dataset(const std::filesystem::path& path, std::span<const QGInstance> instances);

std::vector<AnnotationRecord> parse_annotations(std::istream& in);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> records);

/// Annotations keyed by instance id, in file order within each group.
std::map<std::string, std::vector<AnnotationRecord>> group_annotations(
    std::span<const AnnotationRecord> records);

/// One row per instance id, sorted by id.
std::vector<AveragedRating> average_annotations(std::span<const AnnotationRecord> records);

/// Reads every nonempty line of a JSONL file as JSON; ParseError on failure.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, std::span<const Json> rows);

}  // namespace rquge
