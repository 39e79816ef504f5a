#pragma once

#include <ostream>

namespace nandwalk {

/// Exit codes: 0 success, 1 a checked property failed, 2 usage error.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nandwalk
