#include "rquge/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "rquge/error.hpp"
#include "rquge/text.hpp"

namespace rquge::baselines {
namespace {

using Tokens = std::vector<std::string>;

std::map<Tokens, int> ngram_counts(const Tokens& toks, std::size_t n) {
  std::map<Tokens, int> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Tokens(toks.begin() + static_cast<std::ptrdiff_t>(i),
                    toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double f1(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

void require_reference(std::string_view reference, const char* metric) {
  if (text::trim(reference).empty()) throw ReferenceRequiredError(metric);
}

}  // namespace

double bleu4(std::string_view candidate, std::string_view reference) {
  require_reference(reference, "bleu4");
  const Tokens cand = text::ngram_tokens(candidate);
  const Tokens ref = text::ngram_tokens(reference);
  if (cand.empty()) {
    spdlog::warn("bleu4: empty candidate scores 0");
    return 0.0;
  }
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand_counts = ngram_counts(cand, n);
    const auto ref_counts = ngram_counts(ref, n);
    int matched = 0;
    int total = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      if (auto it = ref_counts.find(gram); it != ref_counts.end()) matched += std::min(count, it->second);
    }
    const double numerator = matched == 0 ? kBleuEpsilon : static_cast<double>(matched);
    const double precision = numerator / static_cast<double>(std::max(total, 1));
    log_sum += std::log(precision);
  }
  const auto c = static_cast<double>(cand.size());
  const auto r = static_cast<double>(ref.size());
  const double brevity = c > r ? 0.0 : 1.0 - r / c;
  return std::clamp(std::exp(log_sum / 4.0 + brevity), 0.0, 1.0);
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge(std::string_view candidate, std::string_view reference, RougeVariant variant) {
  require_reference(reference, variant == RougeVariant::rouge1 ? "rouge1" : "rougeL");
  const Tokens cand = text::ngram_tokens(candidate);
  const Tokens ref = text::ngram_tokens(reference);
  if (cand.empty()) {
    spdlog::warn("rouge: empty candidate scores 0");
    return 0.0;
  }
  if (ref.empty()) return 0.0;
  double overlap = 0.0;
  if (variant == RougeVariant::rouge1) {
    const auto cc = ngram_counts(cand, 1);
    const auto rc = ngram_counts(ref, 1);
    for (const auto& [gram, count] : cc) {
      if (auto it = rc.find(gram); it != rc.end()) overlap += std::min(count, it->second);
    }
  } else {
    overlap = static_cast<double>(lcs_length(cand, ref));
  }
  return f1(overlap / static_cast<double>(cand.size()), overlap / static_cast<double>(ref.size()));
}

QAScore qa_f1_em(std::string_view predicted, std::string_view gold) {
  return QAScore{text::token_f1(predicted, gold),
                 text::normalize_answer(predicted) == text::normalize_answer(gold) ? 1 : 0};
}

void AdapterRegistry::add(std::string name, Adapter adapter) {
  if (!adapter.fn) throw ConfigError("adapter '" + name + "' has no function");
  adapters_[std::move(name)] = std::move(adapter);
}

bool AdapterRegistry::contains(std::string_view name) const { return adapters_.find(name) != adapters_.end(); }

const Adapter& AdapterRegistry::get(std::string_view name) const {
  auto it = adapters_.find(name);
  if (it == adapters_.end()) {
    throw ConfigError("external metric adapter '" + std::string(name) + "' is not registered");
  }
  return it->second;
}

std::vector<std::string> AdapterRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : adapters_) out.push_back(name);
  return out;
}

MetricValue external_metric(const AdapterRegistry& registry, std::string_view adapter_name,
                            const ExternalInput& input) {
  const auto& adapter = registry.get(adapter_name);
  return MetricValue{std::string(adapter_name), adapter.fn(input), adapter.higher_is_better};
}

bool is_reference_metric(std::string_view name) {
  return name == "bleu4" || name == "rouge1" || name == "rougeL";
}

MetricValue reference_metric(std::string_view name, std::string_view candidate,
                             const QGInstance& instance) {
  if (!is_reference_metric(name)) {
    throw ConfigError("unknown reference metric '" + std::string(name) + "'");
  }
  if (!instance.reference_question) throw ReferenceRequiredError(std::string(name));
  const std::string& ref = *instance.reference_question;
  double v = 0.0;
  if (name == "bleu4") {
    v = bleu4(candidate, ref);
  } else if (name == "rouge1") {
    v = rouge(candidate, ref, RougeVariant::rouge1);
  } else {
    v = rouge(candidate, ref, RougeVariant::rougeL);
  }
  return MetricValue{std::string(name), v, true};
}

}  // namespace rquge::baselines
