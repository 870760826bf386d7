#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace torsionlab {

// Runs the torsion-lab command line. Reports go to `out` (or the --out
// file), diagnostics to `err`. Returns 0 on success, 2 on validation errors
// and 3 when a numeric step is inconclusive.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torsionlab
