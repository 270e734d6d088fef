#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maxhom {

// Runs one command line (the program name excluded), writing the report
// JSON to `out` and diagnostics to `err`. Exit codes: 0 success, 2 usage or
// format problem, 3 cap exceeded, 4 verification failure.
//
// Subcommands: solve, relax, overcast, distance, modulator, pliable-approx,
// reduce, dense, ptas, gen, lp. Reports carry {command, inputs, outputs};
// --timings adds wall-clock times (and breaks byte-reproducibility, so it
// is opt-in), --human adds decimal approximations next to rational fields,
// --out writes the report to a file instead of stdout, and subcommands
// that produce a reusable artifact (gen, modulator, pliable-approx) write
// it bare to the path given by -o so later commands can consume it.
int dispatch(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err);

} // namespace maxhom
