#pragma once

#include <iostream>

namespace dfdse {

/// Exit codes: 0 ok, 1 invalid input or failed checks, 2 runtime failure.
int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace dfdse
