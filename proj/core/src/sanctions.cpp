#include "normsim/sanctions.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

namespace normsim {

void PublicSanctionLog::release_contexts_before(uint32_t step) {
  for (auto& r : records_) {
    if (r.step >= step) break;  // records are step-ordered
    r.context.reset();
  }
}

std::vector<SanctionRecord> build_sanction_view(const PublicSanctionLog& log,
                                                Visibility visibility, int agent) {
  if (visibility == Visibility::Global) return log.records();
  std::vector<SanctionRecord> view;
  const uint32_t bit = 1u << agent;
  for (const auto& r : log.records())
    if (r.sanctioner == agent || r.target == agent || (r.witnesses & bit)) view.push_back(r);
  return view;
}

void export_sanction_log(const PublicSanctionLog& log, const std::string& lines_path,
                         const std::string& blob_path) {
  std::ofstream lines(lines_path);
  std::ofstream blob(blob_path, std::ios::binary);
  if (!lines || !blob) throw std::runtime_error("sanction log export: cannot open output");

  // Frames shared between records are written once.
  std::map<const Frame*, long> offsets;
  long next_offset = 0;
  for (const auto& r : log.records()) {
    long off = -1;
    if (r.context) {
      auto [it, inserted] = offsets.try_emplace(r.context.get(), next_offset);
      if (inserted) {
        blob.write(reinterpret_cast<const char*>(r.context->rgb.data()),
                   static_cast<std::streamsize>(r.context->rgb.size()));
        next_offset += static_cast<long>(r.context->rgb.size());
      }
      off = it->second;
    }
    lines << r.step << ' ' << static_cast<int>(r.sanctioner) << ' '
          << static_cast<int>(r.target) << ' ' << static_cast<int>(r.outcome) << ' ' << off
          << '\n';
  }
  if (!lines || !blob) throw std::runtime_error("sanction log export: write failed");
}

}  // namespace normsim
