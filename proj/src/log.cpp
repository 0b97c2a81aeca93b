#include "mdimpute/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace mdi {

namespace {
std::mutex sink_mutex;
WarningSink current_sink;
}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    if (current_sink)
        current_sink(message);
    else
        std::cerr << "warning: " << message << '\n';
}

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex);
    std::swap(sink, current_sink);
    return sink;
}

}  // namespace mdi
