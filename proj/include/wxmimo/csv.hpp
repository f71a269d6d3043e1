// SPDX-License-Identifier: Apache-2.0

#ifndef WXMIMO_CSV_HPP
#define WXMIMO_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace wxmimo::csv {

// Shortest round-trippable decimal form of a double; deterministic for a given
// bit pattern, so repeated runs emit byte-identical files.
std::string num(double v);

std::vector<std::string> split_line(const std::string& line);

} // namespace wxmimo::csv

#endif
