#pragma once

#include <string>
#include <vector>

#include "bba/model.hpp"

namespace bba {

struct AsymptoteBlock {
  std::string code;      // inner region, exactly as found
  int char_length = 0;   // code length after trimming outer whitespace
  std::string source_problem;
};

// Every [asy]...[/asy] region of the text, in document order. Absent
// markers yield an empty list; an unclosed [asy] is a ParseError with
// the opening marker's offset.
std::vector<AsymptoteBlock> extract_asymptote(const std::string& problem_text,
                                              const std::string& source_problem = "");

struct AsyLengthStats {
  double mean = 0.0;
  int count = 0;  // number of blocks; 0 means "no selection", mean is 0
};

// Mean block char_length over the geometry problems whose difficulty lies
// in [lo, hi]. Problems without a difficulty are skipped.
AsyLengthStats asy_length_stats(const std::vector<Problem>& problems, int lo, int hi);

}  // namespace bba
