#include <gtest/gtest.h>

#include <algorithm>

#include "rquge/error.hpp"
#include "rquge/random.hpp"
#include "rquge/synth.hpp"
#include "rquge/text.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace rquge;
using namespace rquge::synth;

namespace {

std::string named_context(gen::Engine& e) {
  static const std::vector<std::string> names = {"Paris", "Joseph Haas", "Orange County", "Sweden", "Acre",
                                                 "Zürich", "Prussia", "Amazon River"};
  std::string ctx = "In " + std::to_string(1500 + gen::index(e, 500)) + " the " + gen::pick(e, gen::vocabulary()) +
                    " of " + gen::pick(e, names) + " met " + gen::pick(e, names) + ".";
  ctx += " " + gen::sentence(e, 4, 9);
  if (ctx.back() != '.' && ctx.back() != '?') ctx += '.';
  ctx += " About " + std::to_string(10 + gen::index(e, 900)) + " people came from " + gen::pick(e, names) + ".";
  return ctx;
}

std::vector<SynthContext> contexts(std::uint64_t seed, std::size_t n) {
  gen::Engine e(seed);
  std::vector<SynthContext> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"c" + std::to_string(i), named_context(e)});
  return out;
}

struct Stack {
  std::shared_ptr<runtime::NerRunner> ner = fixture::heuristic_ner();
  std::shared_ptr<runtime::Generator> gen = fixture::stub_generator(20);
  Rquge metric = fixture::stub_metric();
  baselines::AdapterRegistry adapters;
  SynthRunners runners() const { return {ner.get(), gen.get(), &metric, &adapters}; }
};

}  // namespace

TEST(Extract, SingleEntity) {
  auto ner = fixture::gazetteer_ner({{"France", "LOC"}});
  const auto spans = extract_answer_spans("Wine from France is famous.", *ner);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0], (AnswerSpan{"France", 10}));
}

TEST(Extract, LongEntitiesAreFiltered) {
  auto ner = fixture::gazetteer_ner({{"United Kingdom of Great Britain", "GPE"}, {"Great Britain", "GPE"},
                                     {"Bank of the United States", "ORG"}});
  const std::string ctx = "The Bank of the United States lent money to Great Britain.";
  const auto spans = extract_answer_spans(ctx, *ner);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].text, "Great Britain");
  EXPECT_EQ(extract_answer_spans(ctx, *ner, 10).size(), 2u);
  EXPECT_THROW(extract_answer_spans(" ", *ner), PreconditionError);
}

TEST(Extract, SurfacesSitAtTheirOffsets) {
  auto ner = fixture::heuristic_ner();
  for (const auto& c : contexts(20, 20)) {
    const auto spans = extract_answer_spans(c.context, *ner);
    EXPECT_FALSE(spans.empty());
    std::set<std::pair<std::string, std::size_t>> seen;
    for (const auto& s : spans) {
      ASSERT_TRUE(s.char_start.has_value());
      const auto b = text::utf8_byte_offset(c.context, *s.char_start);
      ASSERT_TRUE(b.has_value());
      EXPECT_EQ(c.context.substr(*b, s.text.size()), s.text);
      EXPECT_LT(text::split_whitespace(s.text).size(), 4u);
      EXPECT_TRUE(seen.insert({s.text, *s.char_start}).second);
    }
  }
}

TEST(Synthesize, KOneTakesThePerplexityBestCandidate) {
  Stack st;
  const auto ctxs = contexts(1, 1);
  SynthOptions opt;
  opt.k = 1;
  opt.seed = 11;
  const auto res = synthesize(ctxs, st.runners(), opt);
  ASSERT_EQ(res.examples.size(), 1u);
  const auto& ex = res.examples[0];
  const auto cands = st.gen->generate_candidates(ex.answer, ctxs[0].context, mix_seed(11, "generate:c0"));
  const auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return *a.ppl < *b.ppl; });
  EXPECT_EQ(ex.question, best->text);
  EXPECT_EQ(ex.selection, Selection::rquge);
  EXPECT_GE(ex.kappa, 1.0);
  EXPECT_LE(ex.kappa, 5.0);
}

TEST(Synthesize, DeterministicUnderSeed) {
  Stack st;
  const auto ctxs = contexts(2, 8);
  SynthOptions opt;
  opt.k = 5;
  opt.seed = 11;
  const auto a = synthesize(ctxs, st.runners(), opt);
  Stack fresh;
  const auto b = synthesize(ctxs, fresh.runners(), opt);
  EXPECT_EQ(a.examples, b.examples);
  EXPECT_EQ(a.examples.size(), 8u);
}

TEST(Synthesize, LargerKNeverLowersMeanKappa) {
  Stack st;
  const auto ctxs = contexts(3, 30);
  SynthOptions opt;
  opt.seed = 11;
  opt.k = 1;
  const auto k1 = synthesize(ctxs, st.runners(), opt);
  opt.k = 5;
  const auto k5 = synthesize(ctxs, st.runners(), opt);
  ASSERT_EQ(k1.examples.size(), k5.examples.size());
  double m1 = 0, m5 = 0;
  for (std::size_t i = 0; i < k1.examples.size(); ++i) {
    EXPECT_EQ(k1.examples[i].answer, k5.examples[i].answer);
    EXPECT_GE(k5.examples[i].kappa, k1.examples[i].kappa);
    m1 += k1.examples[i].kappa;
    m5 += k5.examples[i].kappa;
  }
  EXPECT_GE(m5, m1);
}

TEST(Synthesize, RqugeSelectionHitsThePrefixMaximum) {
  Stack st;
  const auto ctxs = contexts(4, 10);
  SynthOptions opt;
  opt.seed = 5;
  opt.k = 6;
  for (const auto& ex : synthesize(ctxs, st.runners(), opt).examples) {
    auto cands = st.gen->generate_candidates(ex.answer, ex.context, mix_seed(5, "generate:" + ex.id));
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return *a.ppl < *b.ppl; });
    QGInstance inst{ex.id, ex.context, ex.answer, std::nullopt, {}};
    double best = 0;
    for (int i = 0; i < opt.k; ++i) best = std::max(best, st.metric.score(inst, cands[i].text).kappa);
    EXPECT_DOUBLE_EQ(ex.kappa, best);
  }
}

TEST(Synthesize, OtherSelections) {
  Stack st;
  st.adapters.add("length", {[](const baselines::ExternalInput& in) { return -static_cast<double>(in.candidate.size()); }, true});
  const auto ctxs = contexts(5, 6);
  SynthOptions opt;
  opt.seed = 2;
  opt.k = 8;
  opt.selection = Selection::ppl;
  for (const auto& ex : synthesize(ctxs, st.runners(), opt).examples) {
    const auto cands = st.gen->generate_candidates(ex.answer, ex.context, mix_seed(2, "generate:" + ex.id));
    const auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return *a.ppl < *b.ppl; });
    EXPECT_EQ(ex.question, best->text);
    EXPECT_EQ(ex.selection, Selection::ppl);
  }
  opt.selection = Selection::beam;
  for (const auto& ex : synthesize(ctxs, st.runners(), opt).examples) {
    EXPECT_EQ(ex.question, st.gen->beam_search(ex.answer, ex.context, opt.beam_size).text);
  }
  opt.selection = Selection::external_adapter;
  opt.adapter_name = "length";
  for (const auto& ex : synthesize(ctxs, st.runners(), opt).examples) {
    auto cands = st.gen->generate_candidates(ex.answer, ex.context, mix_seed(2, "generate:" + ex.id));
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return *a.ppl < *b.ppl; });
    std::size_t shortest = 0;
    for (std::size_t i = 1; i < 8; ++i) {
      if (cands[i].text.size() < cands[shortest].text.size()) shortest = i;
    }
    EXPECT_EQ(ex.question, cands[shortest].text);
  }
  opt.adapter_name = "missing";
  EXPECT_THROW(synthesize(ctxs, st.runners(), opt), ConfigError);
  EXPECT_THROW(selection_from_string("random"), ConfigError);
  EXPECT_EQ(selection_from_string("beam"), Selection::beam);
}

TEST(Synthesize, SkipsAndAllSpans) {
  Stack st;
  std::vector<SynthContext> ctxs{{"plain", "nothing here is named at all."}, contexts(6, 1)[0]};
  SynthOptions opt;
  opt.seed = 1;
  const auto res = synthesize(ctxs, st.runners(), opt);
  ASSERT_EQ(res.skipped.size(), 1u);
  EXPECT_EQ(res.skipped[0].id, "plain");
  EXPECT_EQ(res.skipped[0].reason, "no answer span");
  ASSERT_EQ(res.examples.size(), 1u);

  opt.all_spans = true;
  const auto all = synthesize(ctxs, st.runners(), opt);
  const auto spans = extract_answer_spans(ctxs[1].context, *st.ner);
  ASSERT_EQ(all.examples.size(), spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    EXPECT_EQ(all.examples[i].id, "c0#" + std::to_string(i));
    EXPECT_EQ(all.examples[i].answer, spans[i]);
  }
  opt.k = 0;
  EXPECT_THROW(synthesize(ctxs, st.runners(), opt), PreconditionError);
  opt.k = 21;
  EXPECT_THROW(synthesize(ctxs, st.runners(), opt), PreconditionError);
}

TEST(Emit, HundredExamplesRoundTrip) {
  Stack st;
  const auto ctxs = contexts(7, 100);
  SynthOptions opt;
  opt.seed = 9;
  opt.selection = Selection::ppl;
  const auto res = synthesize(ctxs, st.runners(), opt);
  ASSERT_EQ(res.examples.size(), 100u);
  fixture::TempDir dir;
  emit_training_file(dir / "train.jsonl", res.examples);
  const auto text = fixture::read_file(dir / "train.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
  const auto loaded = load_dataset(dir / "train.jsonl");
  ASSERT_EQ(loaded.size(), 100u);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_NO_THROW(validate(loaded[i]));
    EXPECT_EQ(loaded[i].id, res.examples[i].id);
    EXPECT_EQ(loaded[i].context, res.examples[i].context);
    EXPECT_EQ(loaded[i].gold_answer, res.examples[i].answer);
    EXPECT_EQ(loaded[i].reference_question, res.examples[i].question);
  }
}

TEST(Emit, SingleExampleAndErrors) {
  fixture::TempDir dir;
  SynthExample ex{"x", "Wine from France.", {"France", 10}, "Where is the wine from?", 4.0, Selection::rquge};
  emit_training_file(dir / "one.jsonl", std::vector<SynthExample>{ex});
  const auto line = fixture::read_file(dir / "one.jsonl");
  EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
  const auto j = Json::parse(line);
  EXPECT_EQ(j.at("answer").at("char_start"), 10);
  EXPECT_EQ(j.at("selection"), "rquge");
  EXPECT_THROW(emit_training_file(dir / "none.jsonl", std::vector<SynthExample>{}), PreconditionError);
  ex.answer.char_start.reset();
  EXPECT_THROW(emit_training_file(dir / "bad.jsonl", std::vector<SynthExample>{ex}), ValidationError);
}

TEST(Trainer, DefaultsAndJson) {
  const TrainerConfig d;
  EXPECT_EQ(d.architecture, "t5-small");
  EXPECT_EQ(d.training_steps, 2000);
  EXPECT_DOUBLE_EQ(d.learning_rate, 3e-5);
  EXPECT_EQ(d.batch_size, 32);
  const auto back = trainer_config_from_json(to_json(d));
  EXPECT_EQ(to_json(back), to_json(d));
  auto j = to_json(d);
  j["batch_size"] = 0;
  EXPECT_THROW(trainer_config_from_json(j), ConfigError);
  const auto file = trainer_config_from_json(Json::parse(fixture::read_file(std::string(RQUGE_SOURCE_DIR) + "/configs/trainer.json")));
  EXPECT_EQ(to_json(file), to_json(d));
}

TEST(Contexts, LoadAcceptsBothShapes) {
  fixture::TempDir dir;
  fixture::write_file(dir / "c.jsonl",
                      "{\"id\":\"a\",\"context\":\"Paris is big.\"}\n"
                      "{\"id\":\"b\",\"context\":\"Rome too.\",\"gold_answer\":{\"text\":\"Rome\",\"char_start\":0}}\n");
  const auto c = load_contexts(dir / "c.jsonl");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].context, "Rome too.");
  fixture::write_file(dir / "d.jsonl", "{\"id\":\"a\",\"context\":\"x\"}\n{\"id\":\"a\",\"context\":\"y\"}\n");
  EXPECT_THROW(load_contexts(dir / "d.jsonl"), ValidationError);
}
