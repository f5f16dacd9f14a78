#pragma once
// Command-line pipeline: synth, synth-log, ingest, mine, train, predict, guide, eval,
// export, rc.

#include <ostream>

namespace kgenrich {

// Exit status: 0 ok, 1 internal error, 2 usage error or missing input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kgenrich
