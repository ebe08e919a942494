#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bba/fen.hpp"
#include "bba/pipelines.hpp"
#include "bba/prompts.hpp"

namespace test_support {

inline bba::ImageBlob tiny_svg() {
  static const std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"8\" height=\"8\">"
      "<rect width=\"8\" height=\"8\" fill=\"#ccc\"/></svg>";
  return bba::ImageBlob{std::vector<std::uint8_t>(svg.begin(), svg.end()), "image/svg+xml"};
}

inline bba::Problem geometry_problem() {
  bba::Problem p;
  p.id = "geo-1";
  p.domain = bba::TaskDomain::geometry;
  p.question = "What is the area of the shaded triangle?";
  p.dsl = "[asy]draw((0,0)--(4,0)--(0,3)--cycle);[/asy]";
  p.image = tiny_svg();
  p.gold = bba::GoldAnswer::free_form("6");
  p.difficulty = 2;
  return p;
}

inline bba::Problem chess_problem() {
  bba::Problem p;
  p.id = "chess-1";
  p.domain = bba::TaskDomain::chess;
  p.question = "Does the position favor White, favor Black, or is it balanced?";
  p.dsl = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
  p.image = bba::ImageBlob{[] {
                             std::string svg = bba::render_board_svg(
                                 bba::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/"
                                                "RNBQKBNR w KQkq - 0 1"));
                             return std::vector<std::uint8_t>(svg.begin(), svg.end());
                           }(),
                           "image/svg+xml"};
  p.gold = bba::GoldAnswer::label(bba::ClassLabel::balanced);
  p.difficulty = 3;
  return p;
}

inline bba::Problem molecules_problem() {
  bba::Problem p;
  p.id = "mol-1";
  p.domain = bba::TaskDomain::molecules;
  p.question = "Classify the compound as mutagenic or non-mutagenic based on its structure.";
  p.dsl = "c1ccc2cc3ccccc3cc2c1";
  p.image = tiny_svg();
  p.gold = bba::GoldAnswer::label(bba::ClassLabel::mutagenic);
  return p;
}

inline std::shared_ptr<const bba::PromptLibrary> library() {
  static std::shared_ptr<const bba::PromptLibrary> lib = bba::PromptLibrary::load_default();
  return lib;
}

// Scripted-backend config; each runs consumes texts in order.
inline bba::PipelineConfig scripted_config(const std::vector<std::string>& texts) {
  bba::PipelineConfig cfg;
  cfg.backend = std::make_shared<bba::ChatBackend>(bba::ScriptedBackend::from_texts(texts));
  cfg.prompts = library();
  return cfg;
}

}  // namespace test_support
