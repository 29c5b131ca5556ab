#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "deepbarcode/error.hpp"
#include "deepbarcode/metrics.hpp"
#include "label_builder.hpp"

using namespace deepbarcode;

TEST(Evaluate, HandCountedCase) {
  const auto r = evaluate(LabelVector({0, 0, 1, 1}), LabelVector({0, 0, 1, 0}));
  EXPECT_EQ(r.eta_p, 0.75);
  EXPECT_EQ(r.eta_w, 0.75);
  EXPECT_EQ(r.eta_total, 0.5625);
  EXPECT_EQ(r.n_tot, 4U);
  EXPECT_EQ(r.per_class.at(0), (ClassHits{2, 2}));
  EXPECT_EQ(r.per_class.at(1), (ClassHits{1, 2}));
}

TEST(Evaluate, PerfectRetrieval) {
  const LabelVector labels({3, 1, 4, 1, 5, 9, 2, 6});
  const auto r = evaluate(labels, labels);
  EXPECT_EQ(r.eta_p, 1.0);
  EXPECT_EQ(r.eta_w, 1.0);
  EXPECT_EQ(r.eta_total, 1.0);
}

TEST(Evaluate, WholeScanAccuracyWeightsClassesEqually) {
  // Class 0 has 1 query (hit), class 1 has 3 queries (all missed).
  const auto r = evaluate(LabelVector({0, 1, 1, 1}), LabelVector({0, 0, 0, 0}));
  EXPECT_EQ(r.eta_p, 0.25);
  EXPECT_EQ(r.eta_w, 0.5);
}

TEST(Evaluate, UnknownRetrievedLabelIsAMissNotAClass) {
  const auto r = evaluate(LabelVector({0, 1}), LabelVector({7, 1}));
  EXPECT_EQ(r.per_class.size(), 2U);
  EXPECT_EQ(r.per_class.count(7), 0U);
  EXPECT_EQ(r.eta_p, 0.5);
}

TEST(Evaluate, Errors) {
  try {
    evaluate(LabelVector({0, 1}), LabelVector({0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
  try {
    evaluate(LabelVector{}, LabelVector{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parameter);
  }
}

TEST(Evaluate, ReferenceAccuracyPairsSatisfyTheProductIdentity) {
  // Label sets built so that eta_p and eta_w equal the reference fractions exactly.
  const auto features_l2 = testing_support::labels_with_accuracy({{4000, 2418}, {6000, 4473}});
  const auto r1 = evaluate(features_l2.truth, features_l2.retrieved);
  EXPECT_NEAR(r1.eta_p, 0.6891, 1e-12);
  EXPECT_NEAR(r1.eta_w, 0.6750, 1e-12);
  EXPECT_NEAR(r1.eta_total, 0.4651, 5e-4);

  const auto barcodes = testing_support::labels_with_accuracy({{40000, 24928}, {60000, 46692}});
  const auto r2 = evaluate(barcodes.truth, barcodes.retrieved);
  EXPECT_NEAR(r2.eta_p, 0.7162, 1e-12);
  EXPECT_NEAR(r2.eta_w, 0.7007, 1e-12);
  EXPECT_NEAR(r2.eta_total, 0.5019, 5e-4);

  EXPECT_NEAR(total_accuracy(0.6891, 0.6750), 0.4651, 5e-4);
  EXPECT_NEAR(total_accuracy(0.7162, 0.7007), 0.5019, 5e-4);
}

TEST(EvaluateProperty, InvariantUnderJointPermutation) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ClassId> t(1 + rng() % 200), r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = static_cast<ClassId>(rng() % 5);
      r[i] = rng() % 3 == 0 ? static_cast<ClassId>(rng() % 6) : t[i];
    }
    const auto base = evaluate(LabelVector(t), LabelVector(r));
    EXPECT_DOUBLE_EQ(base.eta_total, base.eta_p * base.eta_w);
    std::vector<std::size_t> perm(t.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ClassId> tp, rp;
    for (std::size_t i : perm) {
      tp.push_back(t[i]);
      rp.push_back(r[i]);
    }
    const auto shuffled = evaluate(LabelVector(tp), LabelVector(rp));
    EXPECT_EQ(shuffled.eta_p, base.eta_p);
    EXPECT_EQ(shuffled.per_class, base.per_class);
    EXPECT_DOUBLE_EQ(shuffled.eta_w, base.eta_w);

    // Duplicating every query keeps eta_w.
    auto td = t, rd = r;
    td.insert(td.end(), t.begin(), t.end());
    rd.insert(rd.end(), r.begin(), r.end());
    EXPECT_DOUBLE_EQ(evaluate(LabelVector(td), LabelVector(rd)).eta_w, base.eta_w);

    std::size_t total = 0;
    for (const auto& [id, c] : base.per_class) {
      EXPECT_LE(c.hits, c.size);
      total += c.size;
    }
    EXPECT_EQ(total, base.n_tot);
  }
}

TEST(LabelsFromResults, LooksUpFinalIndices) {
  std::vector<QueryResult> results(2);
  results[0].final_index = 2;
  results[1].final_index = 0;
  EXPECT_EQ(labels_from_results(results, LabelVector({5, 5, 7})), LabelVector({7, 5}));
  results[0].final_index = 1;
  results[1].final_index = 1;
  EXPECT_EQ(labels_from_results(results, LabelVector({5, 6, 7})), LabelVector({6, 6}));
  results[1].final_index = 3;
  try {
    labels_from_results(results, LabelVector({5, 6, 7}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Bounds);
  }
}

TEST(ReportFormat, KeyValueLines) {
  const auto r = evaluate(LabelVector({0, 0, 1, 1}), LabelVector({0, 0, 1, 0}));
  EXPECT_EQ(format_report_kv(r),
            "n_tot=4\n"
            "eta_p=0.75\n"
            "eta_w=0.75\n"
            "eta_total=0.5625\n"
            "per_class=0 2 2\n"
            "per_class=1 1 2\n");
  const auto text = format_report_text(r);
  EXPECT_NE(text.find("75.00%"), std::string::npos);
  EXPECT_NE(text.find("56.25%"), std::string::npos);
}

TEST(ReportFormat, RealsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 0.0, 1.0, 0.46514175}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}
