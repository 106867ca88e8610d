#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ast/error.hpp"
#include "ast/io.hpp"
#include "ast/tracker.hpp"

namespace ast {

struct MetricsReport {
  double mean_cle = 0.0;
  double precision = 0.0;  ///< fraction of frames with CLE <= threshold
  double threshold = 20.0;
  std::size_t frames_evaluated = 0;
};

/// Euclidean distance between box centres (top-left + half size), per frame.
inline std::vector<double> center_location_errors(std::span<const TrackRecord> records,
                                                  std::span<const GroundTruthBox> truth) {
  if (records.size() != truth.size()) {
    throw InvalidInput("record count (" + std::to_string(records.size()) + ") does not match ground truth (" +
                       std::to_string(truth.size()) + ")");
  }
  std::vector<double> cle(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double px = records[i].x + records[i].w / 2.0;
    const double py = records[i].y + records[i].h / 2.0;
    const double tx = truth[i].x + truth[i].w / 2.0;
    const double ty = truth[i].y + truth[i].h / 2.0;
    cle[i] = std::hypot(px - tx, py - ty);
  }
  return cle;
}

inline MetricsReport evaluate(std::span<const TrackRecord> records, std::span<const GroundTruthBox> truth,
                              double threshold = 20.0) {
  const std::vector<double> cle = center_location_errors(records, truth);
  MetricsReport report;
  report.threshold = threshold;
  report.frames_evaluated = cle.size();
  if (cle.empty()) return report;
  double sum = 0.0;
  std::size_t hits = 0;
  for (double e : cle) {
    sum += e;
    if (e <= threshold) ++hits;
  }
  report.mean_cle = sum / static_cast<double>(cle.size());
  report.precision = static_cast<double>(hits) / static_cast<double>(cle.size());
  return report;
}

/// Ground truth rendered as records (scale 1), for self-evaluation.
inline std::vector<TrackRecord> records_from_truth(std::span<const GroundTruthBox> truth) {
  std::vector<TrackRecord> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.push_back(TrackRecord{i + 1, static_cast<double>(truth[i].x), static_cast<double>(truth[i].y), 1.0,
                              truth[i].w, truth[i].h, 0.0});
  }
  return out;
}

}  // namespace ast
