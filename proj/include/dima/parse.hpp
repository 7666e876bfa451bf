#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dima/model.hpp"
#include "dima/sysconfig.hpp"

namespace dima {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

// A model document: any number of automaton sections and at most one system
// section. Grammar: docs/model-format.md.
struct ParsedDocument {
  std::vector<Automaton> automata;
  std::optional<SystemConfig> system;
};

ParsedDocument parse_document(const std::string& text);
ParsedDocument parse_file(const std::string& path);

std::string serialize(const Automaton& a);
std::string serialize(const SystemConfig& cfg);

}  // namespace dima
