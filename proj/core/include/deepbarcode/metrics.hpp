#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "deepbarcode/feature_store.hpp"
#include "deepbarcode/pipeline.hpp"

namespace deepbarcode {

struct ClassHits {
  std::size_t hits = 0;
  std::size_t size = 0;

  friend bool operator==(const ClassHits&, const ClassHits&) = default;
};

/// Retrieval accuracies as fractions in [0, 1].
///
///   eta_p      hits / n_tot over all queries
///   eta_w      mean over ground-truth classes of hits_s / size_s
///   eta_total  eta_p * eta_w
///
/// Classes are the distinct ground-truth labels; a retrieved label outside
/// that set is simply a miss.
struct EvaluationReport {
  double eta_p = 0.0;
  double eta_w = 0.0;
  double eta_total = 0.0;
  std::map<ClassId, ClassHits> per_class;
  std::size_t n_tot = 0;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

[[nodiscard]] constexpr double total_accuracy(double eta_p, double eta_w) noexcept {
  return eta_p * eta_w;
}

EvaluationReport evaluate(const LabelVector& true_labels, const LabelVector& retrieved_labels);

/// retrieved[i] = train_labels[results[i].final_index].
LabelVector labels_from_results(std::span<const QueryResult> results,
                                const LabelVector& train_labels);

/// Human-readable summary with percentages.
std::string format_report_text(const EvaluationReport& report);

/// Line-oriented key=value form:
///   n_tot=<int>
///   eta_p=<real>
///   eta_w=<real>
///   eta_total=<real>
///   per_class=<class> <hits> <size>     (one line per class, ascending id)
std::string format_report_kv(const EvaluationReport& report);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace deepbarcode
