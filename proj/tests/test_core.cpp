#include <gtest/gtest.h>

#include <sstream>

#include "rquge/core.hpp"
#include "rquge/error.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace rquge;

namespace {

QGInstance sample() {
  QGInstance inst;
  inst.id = "q1";
  inst.context = "The Eiffel Tower is in Paris.";
  inst.gold_answer = {"Paris", 23};
  inst.reference_question = "Where is the Eiffel Tower?";
  inst.candidates = {{"Where is the tower?", 3.5, CandidateSource::generated},
                     {"Which city has the tower?", std::nullopt, CandidateSource::external}};
  return inst;
}

}  // namespace

TEST(Core, ValidInstancePasses) { EXPECT_NO_THROW(validate(sample())); }

TEST(Core, MisalignedOffsetIsRejected) {
  auto inst = sample();
  inst.gold_answer.char_start = 3;
  try {
    validate(inst);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.record_id(), "q1");
    EXPECT_EQ(e.field(), "gold_answer.char_start");
  }
}

TEST(Core, OffsetsAreCodePoints) {
  QGInstance inst;
  inst.id = "u";
  inst.context = "Der Fluss fließt durch Zürich.";
  inst.gold_answer = {"Zürich", 23};
  EXPECT_NO_THROW(validate(inst));
  inst.gold_answer.char_start = 24;  // byte offset, not a character offset
  EXPECT_THROW(validate(inst), ValidationError);
}

TEST(Core, FieldChecks) {
  auto inst = sample();
  inst.gold_answer.text = " Paris";
  inst.gold_answer.char_start.reset();
  EXPECT_THROW(validate(inst), ValidationError);

  inst = sample();
  inst.context = "  ";
  EXPECT_THROW(validate(inst), ValidationError);

  inst = sample();
  inst.id.clear();
  EXPECT_THROW(validate(inst), ValidationError);

  inst = sample();
  inst.candidates[0].ppl = -1.0;
  EXPECT_THROW(validate(inst), ValidationError);

  inst = sample();
  inst.candidates[0].ppl = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(inst), ValidationError);
}

TEST(Core, JsonRoundTrip) {
  const auto inst = sample();
  EXPECT_EQ(instance_from_json(to_json(inst)), inst);
}

TEST(Core, RandomInstancesRoundTripThroughJsonl) {
  gen::Engine e(99);
  std::vector<QGInstance> in;
  for (int i = 0; i < 50; ++i) in.push_back(gen::instance(e, "id" + std::to_string(i), i % 4));
  std::stringstream ss;
  write_dataset(ss, in);
  EXPECT_EQ(parse_dataset(ss), in);
}

TEST(Core, ParseErrorsCarryLineNumbers) {
  std::stringstream ss;
  ss << R"({"id":"a","context":"c d","gold_answer":{"text":"c"}})" << "\n\n"
     << R"({"id":"b","context":"x",)" << "\n";
  try {
    parse_dataset(ss);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Core, MissingGoldAnswerIsAParseError) {
  std::stringstream ss(R"({"id":"a","context":"c"})");
  EXPECT_THROW(parse_dataset(ss), ParseError);
}

TEST(Core, DuplicateIdsRejected) {
  std::stringstream ss;
  ss << R"({"id":"a","context":"c d","gold_answer":{"text":"c"}})" << "\n"
     << R"({"id":"a","context":"e f","gold_answer":{"text":"e"}})" << "\n";
  EXPECT_THROW(parse_dataset(ss), ValidationError);
}

TEST(Core, TrainingRecordAliasesLoad) {
  std::stringstream ss(
      R"({"id":"s1","context":"Paris is big.","question":"What is big?","answer":{"text":"Paris","char_start":0}})");
  const auto d = parse_dataset(ss);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].gold_answer.text, "Paris");
  EXPECT_EQ(d[0].reference_question, "What is big?");
}

TEST(Core, AnnotationBounds) {
  AnnotationRecord r{"i", "a1", 3, 3, 2};
  EXPECT_NO_THROW(validate(r));
  r.relevance = 3;
  EXPECT_THROW(validate(r), ValidationError);
  r = {"i", "a1", 0, 1, 1};
  EXPECT_THROW(validate(r), ValidationError);
  r = {"i", "a1", 1, 4, 1};
  EXPECT_THROW(validate(r), ValidationError);
}

TEST(Core, AnnotationsAverageAndRejectDuplicates) {
  fixture::TempDir dir;
  const std::vector<AnnotationRecord> recs = {
      {"b", "x", 3, 2, 2}, {"b", "y", 2, 3, 1}, {"a", "x", 1, 1, 1}};
  save_annotations(dir / "ann.jsonl", recs);
  const auto loaded = load_annotations(dir / "ann.jsonl");
  EXPECT_EQ(loaded, recs);
  const auto avg = average_annotations(loaded);
  ASSERT_EQ(avg.size(), 2u);
  EXPECT_EQ(avg[0].instance_id, "a");
  EXPECT_EQ(avg[1].instance_id, "b");
  EXPECT_DOUBLE_EQ(avg[1].rating(Criterion::grammaticality), 2.5);
  EXPECT_DOUBLE_EQ(avg[1].rating(Criterion::answerability), 2.5);
  EXPECT_DOUBLE_EQ(avg[1].rating(Criterion::relevance), 1.5);
  EXPECT_EQ(avg[1].annotators, 2u);

  std::stringstream dup;
  dup << to_json(recs[0]).dump() << "\n" << to_json(recs[0]).dump() << "\n";
  EXPECT_THROW(parse_annotations(dup), ValidationError);
}

TEST(Core, EnumsRoundTrip) {
  for (auto c : {Criterion::grammaticality, Criterion::answerability, Criterion::relevance}) {
    EXPECT_EQ(criterion_from_string(to_string(c)), c);
  }
  for (auto s : {CandidateSource::generated, CandidateSource::reference, CandidateSource::corrupted,
                 CandidateSource::external}) {
    EXPECT_EQ(candidate_source_from_string(to_string(s)), s);
  }
}
