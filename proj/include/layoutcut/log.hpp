#ifndef LAYOUTCUT_LOG_HPP_
#define LAYOUTCUT_LOG_HPP_

#include <string_view>

#include <json.hpp>

namespace layoutcut {

// One JSON object per line on stderr: {"event": ..., <fields>}. Lines from
// concurrent workers never interleave.
void log_event(std::string_view event, nlohmann::ordered_json fields = nlohmann::ordered_json::object());

void set_log_enabled(bool enabled);
bool log_enabled();

}  // namespace layoutcut

#endif  // LAYOUTCUT_LOG_HPP_
