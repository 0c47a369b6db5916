#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace ppp::cli {

// Exit codes, one per error class.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kArgument = 2,
  kIo = 3,
  kParse = 4,
  kYieldMismatch = 5,
  kData = 6,
  kConvergence = 7,
};

// Runs one subcommand. `args` excludes the program name. Errors are reported
// on `err` as a single line "error: <class>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand bodies. Every output file is written after all inputs are read.
void cmd_synth(Config& config, std::ostream& out);
void cmd_extract(Config& config, std::ostream& out);
void cmd_score(Config& config, std::ostream& out);
void cmd_cf1(Config& config, std::ostream& out);
void cmd_train(Config& config, std::ostream& out);
void cmd_predict(Config& config, std::ostream& out);
void cmd_evaluate(Config& config, std::ostream& out);
void cmd_plan(Config& config, std::ostream& out);
void cmd_treestats(Config& config, std::ostream& out);

}  // namespace ppp::cli
