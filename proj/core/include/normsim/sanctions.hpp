#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "normsim/frame.hpp"

namespace normsim {

enum class Visibility : uint8_t { Global = 0, Local = 1 };

// One (sanctioner, target, context, outcome) tuple. The context is the
// sanctioner's rendered observation at the step before the outcome was
// decided; records from one sanctioner in one step share the frame.
struct SanctionRecord {
  uint32_t step = 0;   // time index t: the record reports opportunities at t-1
  uint8_t sanctioner = 0;
  uint8_t target = 0;
  uint8_t outcome = 0;  // 1 = disapproval (zap landed), 0 = approval
  uint32_t witnesses = 0;  // agents whose observation window met the beam footprint
  std::shared_ptr<const Frame> context;
};

// Append-only within an episode; cleared between episodes.
class PublicSanctionLog {
 public:
  void append(SanctionRecord rec) { records_.push_back(std::move(rec)); }
  void clear() { records_.clear(); }
  size_t size() const { return records_.size(); }
  const std::vector<SanctionRecord>& records() const { return records_; }
  const SanctionRecord& operator[](size_t i) const { return records_[i]; }

  // Frees context frames of records older than `step` (training keeps only
  // the active classifier segment alive; full-resolution contexts are heavy).
  void release_contexts_before(uint32_t step);

 private:
  std::vector<SanctionRecord> records_;
};

// Global: the full log, identical for every agent. Local: only records the
// agent sanctioned, suffered, or whose beam footprint crossed its window.
std::vector<SanctionRecord> build_sanction_view(const PublicSanctionLog& log,
                                                Visibility visibility, int agent);

// Line-oriented export: "step sanctioner target outcome frame_offset" plus a
// sidecar blob of raw RGB context frames (offset -1 when the frame was
// released). Throws std::runtime_error on IO failure.
void export_sanction_log(const PublicSanctionLog& log, const std::string& lines_path,
                         const std::string& blob_path);

}  // namespace normsim
