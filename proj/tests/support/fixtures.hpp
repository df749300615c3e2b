#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "rquge/metric.hpp"
#include "rquge/runtime.hpp"
#include "rquge/stubs.hpp"

namespace fixture {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("rquge-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

/// Answers with the gold span registered for the context.
class EchoQABackend : public rquge::runtime::QABackend, public rquge::stubs::InvocationCounter {
 public:
  void add(const std::string& context, const std::string& gold) { gold_[context] = gold; }
  std::string answer(const rquge::runtime::QAInput& input) override {
    count();
    auto it = gold_.find(input.context);
    return it == gold_.end() ? "" : it->second;
  }

 private:
  std::map<std::string, std::string> gold_;
};

/// Scores by a (question -> raw score) table; unknown questions get 1.
class TableScorerBackend : public rquge::runtime::SpanScorerBackend, public rquge::stubs::InvocationCounter {
 public:
  explicit TableScorerBackend(std::map<std::string, double> table) : table_(std::move(table)) {}
  double raw_score(const rquge::runtime::SpanScorerInput& input) override {
    count();
    auto it = table_.find(input.question);
    return it == table_.end() ? 1.0 : it->second;
  }

 private:
  std::map<std::string, double> table_;
};

inline std::shared_ptr<rquge::runtime::QARunner> qa_runner(std::shared_ptr<rquge::runtime::QABackend> b,
                                                           std::size_t max_len = 512,
                                                           std::shared_ptr<rquge::ResultCache> cache = nullptr) {
  return std::make_shared<rquge::runtime::QARunner>(
      rquge::runtime::QARunnerHandle{"test-qa", max_len, true}, std::move(b), std::move(cache));
}

inline std::shared_ptr<rquge::runtime::SpanScorer> scorer(std::shared_ptr<rquge::runtime::SpanScorerBackend> b,
                                                          std::shared_ptr<rquge::ResultCache> cache = nullptr) {
  return std::make_shared<rquge::runtime::SpanScorer>(rquge::runtime::SpanScorerHandle{"test-scorer", 1.0, 5.0, true},
                                                      std::move(b), std::move(cache));
}

/// Lexical stub QA plus the token-F1 scorer.
inline rquge::Rquge stub_metric(rquge::RqugeOptions options = {}) {
  return rquge::Rquge(qa_runner(std::make_shared<rquge::stubs::LexicalQABackend>()),
                      scorer(std::make_shared<rquge::stubs::OverlapSpanScorerBackend>()), options);
}

inline std::shared_ptr<rquge::runtime::Generator> stub_generator(int num_candidates = 50) {
  rquge::runtime::GeneratorHandle h{"stub-gen", {}, true};
  h.sampling.num_candidates = num_candidates;
  return std::make_shared<rquge::runtime::Generator>(h, std::make_shared<rquge::stubs::TemplateGeneratorBackend>());
}

inline std::shared_ptr<rquge::runtime::NerRunner> heuristic_ner() {
  return std::make_shared<rquge::runtime::NerRunner>(rquge::runtime::AuxHandle{"stub-ner", true},
                                                     std::make_shared<rquge::stubs::HeuristicNerBackend>());
}

inline std::shared_ptr<rquge::runtime::NerRunner> gazetteer_ner(std::map<std::string, std::string> table) {
  return std::make_shared<rquge::runtime::NerRunner>(
      rquge::runtime::AuxHandle{"gazetteer-ner", true},
      std::make_shared<rquge::stubs::GazetteerNerBackend>(std::move(table)));
}

}  // namespace fixture
