// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace wxmimo::csv {

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) {
            break;
        }
    }
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

} // namespace wxmimo::csv
