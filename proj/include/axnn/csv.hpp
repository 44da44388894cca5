#pragma once

#include <cstdio>
#include <string>

namespace axnn {

// Stable numeric formatting so reruns produce byte-identical reports.
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace axnn
