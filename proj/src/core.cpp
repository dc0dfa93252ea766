#include "skylink/core.hpp"

#include <cstdio>

namespace skylink {

std::string format_db(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.1f dB", to_db(ratio));
    return buf;
}

}  // namespace skylink
