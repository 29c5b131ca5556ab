#include "deepbarcode/metrics.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "deepbarcode/error.hpp"

namespace deepbarcode {

EvaluationReport evaluate(const LabelVector& true_labels, const LabelVector& retrieved_labels) {
  if (true_labels.size() != retrieved_labels.size()) {
    fail(ErrorKind::Dimension, std::to_string(true_labels.size()) + " true labels vs " +
                                   std::to_string(retrieved_labels.size()) + " retrieved labels");
  }
  if (true_labels.empty()) {
    fail(ErrorKind::Parameter, "cannot evaluate an empty query set");
  }
  EvaluationReport report;
  report.n_tot = true_labels.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    auto& cls = report.per_class[true_labels[i]];
    ++cls.size;
    if (retrieved_labels[i] == true_labels[i]) {
      ++cls.hits;
      ++hits;
    }
  }
  report.eta_p = static_cast<double>(hits) / static_cast<double>(report.n_tot);
  double rate_sum = 0.0;
  for (const auto& [id, cls] : report.per_class) {
    rate_sum += static_cast<double>(cls.hits) / static_cast<double>(cls.size);
  }
  report.eta_w = rate_sum / static_cast<double>(report.per_class.size());
  report.eta_total = total_accuracy(report.eta_p, report.eta_w);
  return report;
}

LabelVector labels_from_results(std::span<const QueryResult> results,
                                const LabelVector& train_labels) {
  std::vector<ClassId> out;
  out.reserve(results.size());
  for (std::size_t q = 0; q < results.size(); ++q) {
    const std::size_t idx = results[q].final_index;
    if (idx >= train_labels.size()) {
      fail(ErrorKind::Bounds, "query " + std::to_string(q) + " matched training row " +
                                  std::to_string(idx) + " but only " +
                                  std::to_string(train_labels.size()) + " labels exist");
    }
    out.push_back(train_labels[idx]);
  }
  return LabelVector(std::move(out));
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), ptr};
}

std::string format_report_text(const EvaluationReport& report) {
  std::array<char, 160> line{};
  std::string out;
  std::snprintf(line.data(), line.size(), "queries     %zu in %zu classes\n", report.n_tot,
                report.per_class.size());
  out += line.data();
  std::snprintf(line.data(), line.size(), "eta_p       %6.2f%%\n", 100.0 * report.eta_p);
  out += line.data();
  std::snprintf(line.data(), line.size(), "eta_w       %6.2f%%\n", 100.0 * report.eta_w);
  out += line.data();
  std::snprintf(line.data(), line.size(), "eta_total   %6.2f%%\n", 100.0 * report.eta_total);
  out += line.data();
  return out;
}

std::string format_report_kv(const EvaluationReport& report) {
  std::string out;
  out += "n_tot=" + std::to_string(report.n_tot) + "\n";
  out += "eta_p=" + format_real(report.eta_p) + "\n";
  out += "eta_w=" + format_real(report.eta_w) + "\n";
  out += "eta_total=" + format_real(report.eta_total) + "\n";
  for (const auto& [id, cls] : report.per_class) {
    out += "per_class=" + std::to_string(id) + " " + std::to_string(cls.hits) + " " +
           std::to_string(cls.size) + "\n";
  }
  return out;
}

}  // namespace deepbarcode
