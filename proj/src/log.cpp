#include "layoutcut/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>

namespace layoutcut {

namespace {

std::atomic<bool> g_enabled{true};
std::mutex g_mutex;

}  // namespace

void set_log_enabled(bool enabled) { g_enabled = enabled; }

bool log_enabled() { return g_enabled; }

void log_event(std::string_view event, nlohmann::ordered_json fields) {
  if (!g_enabled) return;
  nlohmann::ordered_json line;
  line["event"] = std::string(event);
  for (auto& [key, value] : fields.items()) line[key] = value;
  const std::string text = line.dump() + "\n";
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fwrite(text.data(), 1, text.size(), stderr);
  std::fflush(stderr);
}

}  // namespace layoutcut
