#include "rquge/metaeval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rquge/error.hpp"

namespace rquge::metaeval {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("correlation inputs differ in length");
  if (x.size() < 3) throw PreconditionError("correlation needs at least 3 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw PreconditionError("correlation inputs must be finite");
    }
  }
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Sorts idx[lo, hi) by key and returns the number of inversions.
std::uint64_t merge_count(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf,
                          std::span<const double> key, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(idx, buf, key, lo, mid) + merge_count(idx, buf, key, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (key[idx[j]] < key[idx[i]]) {
      swaps += mid - i;
      buf[k++] = idx[j++];
    } else {
      buf[k++] = idx[i++];
    }
  }
  while (i < mid) buf[k++] = idx[i++];
  while (j < hi) buf[k++] = idx[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            idx.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in sorted order.
template <typename Eq>
std::uint64_t tied_pairs(const std::vector<std::size_t>& idx, Eq eq) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i + 1;
    while (j < idx.size() && eq(idx[i], idx[j])) ++j;
    const std::uint64_t t = j - i;
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("correlation of a constant sequence");
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i + 1;
    while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[idx[t]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t n3 =
      tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });
  std::vector<std::size_t> buf(n);
  const std::uint64_t swaps = merge_count(idx, buf, y, 0, n);
  const std::uint64_t n2 = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });
  if (n0 == n1 || n0 == n2) throw UndefinedError("correlation of a constant sequence");
  const double s = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                   static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  return clamp_unit(s / denom);
}

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw PreconditionError("label sequences differ in length");
  if (a.empty()) throw PreconditionError("cohen's kappa needs at least one item");
  std::map<int, double> pa, pb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double pe = 0.0;
  for (const auto& [label, count] : pa) {
    if (auto it = pb.find(label); it != pb.end()) pe += (count / n) * (it->second / n);
  }
  const double po = agree / n;
  if (std::abs(1.0 - pe) < 1e-12) throw UndefinedError("cohen's kappa undefined: chance agreement is 1");
  return (po - pe) / (1.0 - pe);
}

CorrelationReport correlate_with_human(std::string metric_name, std::span<const MetricScore> scores,
                                       std::span<const AnnotationRecord> annotations,
                                       Criterion criterion) {
  std::map<std::string, double> human;
  for (const auto& avg : average_annotations(annotations)) human[avg.instance_id] = avg.rating(criterion);

  CorrelationReport report;
  report.metric_name = std::move(metric_name);
  report.criterion = criterion;
  std::set<std::string> seen;
  std::vector<double> metric_values, human_values;
  for (const auto& s : scores) {
    if (!seen.insert(s.instance_id).second) {
      throw PreconditionError("instance '" + s.instance_id + "' scored more than once");
    }
    auto it = human.find(s.instance_id);
    if (it == human.end()) {
      report.excluded_ids.push_back(s.instance_id);
      continue;
    }
    metric_values.push_back(s.value);
    human_values.push_back(it->second);
  }
  report.n = metric_values.size();
  report.pearson = pearson(metric_values, human_values);
  report.spearman = spearman(metric_values, human_values);
  report.kendall = kendall(metric_values, human_values);
  return report;
}

Json to_json(const CorrelationReport& r) {
  return Json{{"metric", r.metric_name},
              {"criterion", to_string(r.criterion)},
              {"pearson", r.pearson},
              {"spearman", r.spearman},
              {"kendall", r.kendall},
              {"n", r.n},
              {"excluded_ids", r.excluded_ids}};
}

AgreementReport annotator_agreement(std::span<const AnnotationRecord> annotations) {
  // annotator -> instance -> summed rating
  std::map<std::string, std::map<std::string, int>> sums;
  for (const auto& a : annotations) {
    sums[a.annotator_id][a.instance_id] = a.grammaticality + a.answerability + a.relevance;
  }
  AgreementReport report;
  double total = 0.0;
  std::size_t defined = 0;
  for (auto i = sums.begin(); i != sums.end(); ++i) {
    for (auto j = std::next(i); j != sums.end(); ++j) {
      PairAgreement pair{i->first, j->first, 0, std::nullopt};
      std::vector<int> la, lb;
      for (const auto& [inst, v] : i->second) {
        if (auto it = j->second.find(inst); it != j->second.end()) {
          la.push_back(v);
          lb.push_back(it->second);
        }
      }
      pair.shared = la.size();
      if (!la.empty()) {
        try {
          pair.kappa = cohens_kappa(la, lb);
          total += *pair.kappa;
          ++defined;
        } catch (const UndefinedError&) {
        }
      }
      report.pairs.push_back(std::move(pair));
    }
  }
  if (defined > 0) report.mean_kappa = total / static_cast<double>(defined);
  return report;
}

Json to_json(const AgreementReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back(Json{{"annotator_a", p.annotator_a},
                         {"annotator_b", p.annotator_b},
                         {"shared", p.shared},
                         {"kappa", p.kappa ? Json(*p.kappa) : Json(nullptr)}});
  }
  return Json{{"mean_kappa", r.mean_kappa ? Json(*r.mean_kappa) : Json(nullptr)},
              {"label", "sum of the three criteria, treated as nominal"},
              {"pairs", pairs}};
}

namespace {

constexpr Criterion kCriteria[] = {Criterion::grammaticality, Criterion::answerability,
                                   Criterion::relevance};

std::vector<std::pair<std::string, std::map<Criterion, const CorrelationReport*>>> group_rows(
    std::span<const CorrelationReport> reports) {
  std::vector<std::pair<std::string, std::map<Criterion, const CorrelationReport*>>> rows;
  for (const auto& r : reports) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& row) { return row.first == r.metric_name; });
    if (it == rows.end()) {
      rows.emplace_back(r.metric_name, std::map<Criterion, const CorrelationReport*>{});
      it = std::prev(rows.end());
    }
    it->second[r.criterion] = &r;
  }
  return rows;
}

}  // namespace

std::string table_csv(std::span<const CorrelationReport> reports) {
  std::ostringstream os;
  os << "metric";
  for (const auto c : kCriteria) {
    const auto name = to_string(c);
    os << ',' << name << "_r," << name << "_rho," << name << "_tau";
  }
  os << '\n';
  for (const auto& [metric, cells] : group_rows(reports)) {
    os << metric;
    for (const auto c : kCriteria) {
      auto it = cells.find(c);
      if (it == cells.end()) {
        os << ",,,";
      } else {
        os << ',' << fmt(it->second->pearson) << ',' << fmt(it->second->spearman) << ','
           << fmt(it->second->kendall);
      }
    }
    os << '\n';
  }
  return os.str();
}

Json table_json(std::span<const CorrelationReport> reports) {
  Json rows = Json::array();
  for (const auto& [metric, cells] : group_rows(reports)) {
    Json row{{"metric", metric}};
    for (const auto c : kCriteria) {
      auto it = cells.find(c);
      if (it == cells.end()) continue;
      row[std::string(to_string(c))] = Json{{"pearson", it->second->pearson},
                               {"spearman", it->second->spearman},
                               {"kendall", it->second->kendall},
                               {"n", it->second->n}};
    }
    rows.push_back(std::move(row));
  }
  return Json{{"rows", rows}};
}

}  // namespace rquge::metaeval
