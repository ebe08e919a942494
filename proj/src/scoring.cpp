#include "bba/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <unordered_map>

#include "bba/errors.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

void remove_all(std::string& s, std::string_view what) { replace_all(s, what, ""); }

// Returns the index one past the matching '}' for the '{' at `open`,
// or npos when unbalanced.
std::size_t match_brace(const std::string& s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string::npos;
}

std::string strip_outer_dollars_and_space(std::string s) {
  for (;;) {
    std::string t = util::trim(s);
    while (!t.empty() && t.front() == '$') t.erase(t.begin());
    while (!t.empty() && t.back() == '$') t.pop_back();
    if (t == s) return s;
    s = std::move(t);
  }
}

// \frac12 -> \frac{1}{2}; already-braced arguments are left alone.
void brace_frac_args(std::string& s) {
  std::size_t pos = 0;
  while ((pos = s.find("\\frac", pos)) != std::string::npos) {
    std::size_t i = pos + 5;
    for (int arg = 0; arg < 2 && i < s.size(); ++arg) {
      if (s[i] == '{') {
        std::size_t close = match_brace(s, i);
        if (close == std::string::npos) { i = s.size(); break; }
        i = close;
      } else if (std::isalnum(static_cast<unsigned char>(s[i]))) {
        s.insert(i, "{");
        s.insert(i + 2, "}");
        i += 3;
      } else {
        break;  // e.g. \frac\pi2 or malformed input: leave untouched
      }
    }
    pos += 5;
  }
}

// \sqrt3 -> \sqrt{3}
void brace_sqrt_args(std::string& s) {
  std::size_t pos = 0;
  while ((pos = s.find("\\sqrt", pos)) != std::string::npos) {
    std::size_t i = pos + 5;
    if (i < s.size() && s[i] != '{' &&
        std::isalnum(static_cast<unsigned char>(s[i]))) {
      s.insert(i, "{");
      s.insert(i + 2, "}");
    }
    pos += 5;
  }
}

const char* kUnitWords[] = {
    "square units", "sq units", "degrees", "degree", "centimeters",
    "centimeter",   "meters",   "meter",   "inches", "inch",
    "feet",         "foot",     "units",   "unit",   "cents",
    "dollars",      "hours",    "hour",    "minutes","minute",
    "seconds",      "second",   "pounds",  "points", "mph",
    "cm",           "mm",       "km",      "ft",     "m",
};

bool digit_precedes(const std::string& s, std::size_t end) {
  while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '~')) --end;
  return end > 0 && (is_digit(s[end - 1]) || s[end - 1] == '}');
}

// Strips one trailing unit word ("12 cm", "45^{\circ}", "3\text{ units}")
// when it follows a number.
std::string strip_trailing_units(std::string s) {
  s = util::trim(s);
  for (const char* suffix : {"^{\\circ}", "^\\circ"}) {
    if (util::ends_with(s, suffix) && digit_precedes(s, s.size() - std::strlen(suffix)))
      return util::trim(s.substr(0, s.size() - std::strlen(suffix)));
  }
  for (const char* unit : kUnitWords) {
    std::size_t ulen = std::strlen(unit);
    // plain "  <unit>" suffix
    if (s.size() > ulen && util::lowercase(s.substr(s.size() - ulen)) == unit) {
      std::size_t cut = s.size() - ulen;
      bool spaced = cut > 0 && (s[cut - 1] == ' ' || s[cut - 1] == '~');
      if (spaced && digit_precedes(s, cut))
        return util::trim(s.substr(0, cut));
    }
    // "\text{ <unit>}" suffix
    std::string wrapped = "\\text{" + std::string(unit) + "}";
    std::string wrapped_sp = "\\text{ " + std::string(unit) + "}";
    for (const std::string& w : {wrapped_sp, wrapped}) {
      if (s.size() > w.size() &&
          util::lowercase(s.substr(s.size() - w.size())) == util::lowercase(w) &&
          digit_precedes(s, s.size() - w.size()))
        return util::trim(s.substr(0, s.size() - w.size()));
    }
  }
  return s;
}

// Removes thousands separators: a comma with a digit before it and
// exactly three digits (then a non-digit) after it.
std::string strip_thousands_commas(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && is_digit(s[i - 1]) && i + 3 < s.size() &&
        is_digit(s[i + 1]) && is_digit(s[i + 2]) && is_digit(s[i + 3]) &&
        (i + 4 >= s.size() || !is_digit(s[i + 4]))) {
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

// ".5" -> "0.5" wherever a decimal point starts a number.
std::string pad_leading_decimal(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1]) &&
        (i == 0 || !is_digit(s[i - 1]))) {
      out.push_back('0');
    }
    out.push_back(s[i]);
  }
  return out;
}

struct KeywordHit {
  std::size_t end = 0;   // one past the last matched char
  std::size_t begin = 0;
  ClassLabel label = ClassLabel::balanced;
  bool found = false;
};

void consider_keyword(const std::string& lower, const std::string& needle,
                      ClassLabel label, KeywordHit& best) {
  std::size_t pos = lower.rfind(needle);
  if (pos == std::string::npos) return;
  std::size_t end = pos + needle.size();
  // Later end wins; on a tie the longer (earlier-starting) match wins,
  // so "non-mutagenic" beats the "mutagenic" inside it.
  if (!best.found || end > best.end || (end == best.end && pos < best.begin)) {
    best = {end, pos, label, true};
  }
}

KeywordHit scan_label_keywords(const std::string& text, TaskDomain domain) {
  std::string lower = util::lowercase(text);
  KeywordHit best;
  if (domain == TaskDomain::chess) {
    consider_keyword(lower, "white", ClassLabel::white_adv, best);
    consider_keyword(lower, "black", ClassLabel::black_adv, best);
    consider_keyword(lower, "balanced", ClassLabel::balanced, best);
  } else if (domain == TaskDomain::molecules) {
    consider_keyword(lower, "mutagenic", ClassLabel::mutagenic, best);
    consider_keyword(lower, "non-mutagenic", ClassLabel::non_mutagenic, best);
    consider_keyword(lower, "non mutagenic", ClassLabel::non_mutagenic, best);
    consider_keyword(lower, "non_mutagenic", ClassLabel::non_mutagenic, best);
    consider_keyword(lower, "nonmutagenic", ClassLabel::non_mutagenic, best);
  }
  return best;
}

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool found = false;
};

// Last \boxed{...} with balanced braces; returns the span of the content.
Span find_last_boxed_content(const std::string& text) {
  std::size_t pos = text.rfind("\\boxed");
  while (pos != std::string::npos) {
    std::size_t brace = pos + 6;
    if (brace < text.size() && text[brace] == '{') {
      std::size_t close = match_brace(text, brace);
      if (close != std::string::npos)
        return {brace + 1, close - 1, true};
    }
    if (pos == 0) break;
    pos = text.rfind("\\boxed", pos - 1);
  }
  return {};
}

// Full extent of a latex command with braced arguments starting at `pos`.
Span latex_command_span(const std::string& text, std::size_t pos,
                        std::size_t name_len, int args) {
  std::size_t i = pos + name_len;
  for (int a = 0; a < args; ++a) {
    if (i >= text.size() || text[i] != '{') return {};
    std::size_t close = match_brace(text, i);
    if (close == std::string::npos) return {};
    i = close;
  }
  return {pos, i, true};
}

// Last plain number: scans back from the last digit.
Span find_last_number(const std::string& text) {
  std::size_t last = text.find_last_of("0123456789");
  if (last == std::string::npos) return {};
  std::size_t begin = last;
  while (begin > 0) {
    char c = text[begin - 1];
    if (is_digit(c) || c == '.' || c == ',') {
      --begin;
    } else {
      break;
    }
  }
  // Leading minus only when it cannot be a binary operator.
  if (begin > 0 && text[begin - 1] == '-') {
    char before = begin >= 2 ? text[begin - 2] : ' ';
    if (!std::isalnum(static_cast<unsigned char>(before)) && before != ')' && before != '}')
      --begin;
  }
  // Drop stray leading separators picked up by the scan ("., 5" cases).
  while (begin < last && (text[begin] == '.' || text[begin] == ',') &&
         !(text[begin] == '.' && begin + 1 <= last && is_digit(text[begin + 1])))
    ++begin;
  return {begin, last + 1, true};
}

}  // namespace

std::optional<std::string> extract_boxed(const std::string& text) {
  Span span = find_last_boxed_content(text);
  if (!span.found) return std::nullopt;
  return text.substr(span.begin, span.end - span.begin);
}

std::string extraction_source_name(ExtractionSource s) {
  switch (s) {
    case ExtractionSource::delimiters: return "delimiters";
    case ExtractionSource::boxed: return "boxed";
    case ExtractionSource::label_keyword: return "label_keyword";
    case ExtractionSource::last_number: return "last_number";
    case ExtractionSource::none: return "none";
  }
  return "none";
}

ExtractionResult extract_answer(const std::string& text, TaskDomain domain) {
  // 1. <answer>...</answer>: last opening delimiter, content kept verbatim.
  std::size_t open = text.rfind(kAnswerOpen);
  if (open != std::string::npos) {
    std::size_t start = open + std::strlen(kAnswerOpen);
    std::size_t close = text.find(kAnswerClose, start);
    if (close != std::string::npos) {
      std::string span = text.substr(start, close - start);
      if (domain == TaskDomain::geometry) {
        if (!util::trim(span).empty())
          return {GoldAnswer::free_form(span), ExtractionSource::delimiters, span};
      } else {
        KeywordHit hit = scan_label_keywords(span, domain);
        if (hit.found)
          return {GoldAnswer::label(hit.label), ExtractionSource::delimiters, span};
        // Delimited but no recognizable label: fall through to the scan
        // over the whole text.
      }
    }
  }

  if (domain == TaskDomain::geometry) {
    // 2. \boxed{...}
    Span boxed = find_last_boxed_content(text);
    if (boxed.found) {
      std::string span = text.substr(boxed.begin, boxed.end - boxed.begin);
      return {GoldAnswer::free_form(span), ExtractionSource::boxed, span};
    }
    // 4. last numeric / LaTeX token
    Span best = find_last_number(text);
    std::size_t frac = text.rfind("\\frac");
    if (frac != std::string::npos) {
      Span s = latex_command_span(text, frac, 5, 2);
      if (s.found && (!best.found || s.end > best.end)) best = s;
    }
    std::size_t sqrt_pos = text.rfind("\\sqrt");
    if (sqrt_pos != std::string::npos) {
      Span s = latex_command_span(text, sqrt_pos, 5, 1);
      if (s.found && (!best.found || s.end > best.end)) best = s;
    }
    if (best.found) {
      std::string span = text.substr(best.begin, best.end - best.begin);
      return {GoldAnswer::free_form(span), ExtractionSource::last_number, span};
    }
  } else {
    // 3. label keywords, scanning from the end
    KeywordHit hit = scan_label_keywords(text, domain);
    if (hit.found) {
      std::string span = text.substr(hit.begin, hit.end - hit.begin);
      return {GoldAnswer::label(hit.label), ExtractionSource::label_keyword, span};
    }
  }
  return {std::nullopt, ExtractionSource::none, ""};
}

std::string normalize_math(const std::string& input) {
  std::string s = strip_outer_dollars_and_space(input);
  remove_all(s, "\\left");
  remove_all(s, "\\right");
  replace_all(s, "\\tfrac", "\\frac");
  replace_all(s, "\\dfrac", "\\frac");
  brace_frac_args(s);
  remove_all(s, "\\!");
  remove_all(s, "\\,");
  s = strip_trailing_units(s);
  if (util::ends_with(s, "\\%")) s = util::trim(s.substr(0, s.size() - 2));
  brace_sqrt_args(s);
  s = strip_thousands_commas(s);
  s = pad_leading_decimal(s);
  return util::trim(s);
}

bool math_equiv(const std::string& a, const std::string& b) {
  return normalize_math(a) == normalize_math(b);
}

bool answers_match(const GoldAnswer& predicted, const GoldAnswer& gold) {
  if (predicted.kind() != gold.kind()) return false;
  if (gold.kind() == GoldAnswer::Kind::label)
    return predicted.class_label() == gold.class_label();
  return math_equiv(predicted.text(), gold.text());
}

double MetricsTable::average(const std::string& method) const {
  auto it = per_dataset.find(method);
  if (it == per_dataset.end() || it->second.empty()) return 0.0;
  long total = 0;
  long correct = 0;
  for (const auto& [domain, cell] : it->second) {
    total += cell.total;
    correct += cell.correct;
  }
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

double MetricsTable::macro_average(const std::string& method) const {
  auto it = per_dataset.find(method);
  if (it == per_dataset.end() || it->second.empty()) return 0.0;
  double sum = 0.0;
  int n = 0;
  for (const auto& [domain, cell] : it->second) {
    sum += cell.accuracy();
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

MetricsTable score_runs(const std::vector<PipelineRun>& runs,
                        const std::vector<Problem>& problems) {
  std::unordered_map<std::string, const Problem*> by_id;
  for (const Problem& p : problems) by_id.emplace(p.id, &p);

  MetricsTable table;
  for (const PipelineRun& run : runs) {
    auto it = by_id.find(run.problem_id);
    if (it == by_id.end())
      throw Error("unresolved problem_id: " + run.problem_id);
    const Problem& p = *it->second;
    bool correct = false;
    if (run.correct.has_value()) {
      correct = *run.correct;
    } else if (run.final_answer.has_value()) {
      correct = answers_match(*run.final_answer, p.gold);
    }
    std::string method = method_name(run.method);
    CellStat& cell = table.per_dataset[method][p.domain];
    cell.total += 1;
    cell.correct += correct ? 1 : 0;
    if (p.difficulty.has_value()) {
      CellStat& level = table.per_level[method][p.domain][*p.difficulty];
      level.total += 1;
      level.correct += correct ? 1 : 0;
    }
  }
  return table;
}

double relative_improvement(double ours, double baseline) {
  if (baseline <= 0) throw Error("relative_improvement: baseline must be positive");
  return 100.0 * (ours - baseline) / baseline;
}

}  // namespace bba
