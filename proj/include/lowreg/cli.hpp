#pragma once

#include <iosfwd>

namespace lowreg {

// Entry point of the `lowreg` command line tool. Returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lowreg
