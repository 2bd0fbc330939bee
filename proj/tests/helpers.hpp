#pragma once

#include <string>
#include <vector>

#include "hfscreen/corpus.hpp"
#include "hfscreen/features.hpp"

namespace testing {

inline hfscreen::PatientProfile profile(const std::string& pid, const std::vector<std::string>& texts) {
  hfscreen::PatientProfile p;
  p.patient_id = pid;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    hfscreen::ClinicalNote n;
    n.patient_id = pid;
    n.note_id = pid + "-" + std::to_string(i);
    n.note_type = "progress";
    n.text = texts[i];
    p.notes.push_back(std::move(n));
  }
  return p;
}

inline hfscreen::FeatureMatrix matrix(const std::vector<std::vector<double>>& dense,
                                      std::uint64_t fingerprint = 0) {
  const auto rows = static_cast<Eigen::Index>(dense.size());
  const auto cols = dense.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(dense[0].size());
  hfscreen::SparseRows<double> m(rows, cols);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (dense[r][c] != 0) trip.emplace_back(r, c, dense[r][c]);
    }
  }
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return {m, fingerprint};
}

inline hfscreen::FeatureVector row_vector(const hfscreen::FeatureMatrix& x, Eigen::Index r) {
  return {hfscreen::SparseVec<double>(x.rows.row(r)), x.fingerprint};
}

}  // namespace testing
