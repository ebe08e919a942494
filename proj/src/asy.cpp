#include "bba/asy.hpp"

#include "bba/errors.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {
constexpr const char* kOpen = "[asy]";
constexpr const char* kClose = "[/asy]";
}  // namespace

std::vector<AsymptoteBlock> extract_asymptote(const std::string& text,
                                              const std::string& source_problem) {
  std::vector<AsymptoteBlock> blocks;
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string::npos) {
    std::size_t start = pos + 5;
    std::size_t end = text.find(kClose, start);
    if (end == std::string::npos)
      throw ParseError("unclosed [asy] block", static_cast<long>(pos));
    AsymptoteBlock block;
    block.code = text.substr(start, end - start);
    block.char_length = static_cast<int>(util::trim(block.code).size());
    block.source_problem = source_problem;
    blocks.push_back(std::move(block));
    pos = end + 6;
  }
  return blocks;
}

AsyLengthStats asy_length_stats(const std::vector<Problem>& problems, int lo, int hi) {
  long total = 0;
  int count = 0;
  for (const Problem& p : problems) {
    if (p.domain != TaskDomain::geometry || !p.difficulty.has_value()) continue;
    if (*p.difficulty < lo || *p.difficulty > hi) continue;
    for (const AsymptoteBlock& block : extract_asymptote(p.dsl, p.id)) {
      total += block.char_length;
      ++count;
    }
  }
  AsyLengthStats stats;
  stats.count = count;
  stats.mean = count == 0 ? 0.0 : static_cast<double>(total) / count;
  return stats;
}

}  // namespace bba
