#include "layoutcut/run_config.hpp"

#include <set>
#include <sstream>

#include <toml.hpp>

#include "layoutcut/error.hpp"
#include "layoutcut/file_util.hpp"

namespace layoutcut {

namespace {

class Section {
 public:
  Section(const toml::table& table, std::string name) : table_(table), name_(std::move(name)) {}

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (node == nullptr) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value_exact<bool>()) {
        out = *v;
        return;
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (auto v = node->value_exact<std::int64_t>()) {
        out = static_cast<T>(*v);
        return;
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = node->value<double>()) {
        out = *v;
        return;
      }
    } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
      if (auto v = node->value_exact<std::string>()) {
        out = *v;
        return;
      }
    } else {
      if (auto v = node->value_exact<std::string>()) {
        out = *v;
        return;
      }
    }
    throw Error(ErrorCode::kParse, "wrong type for " + qualified(key));
  }

  const toml::table* sub(const char* key) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) throw Error(ErrorCode::kParse, qualified(key) + " must be a table");
    return node->as_table();
  }

  void reject_unknown() const {
    for (const auto& [key, unused] : table_) {
      if (!seen_.count(std::string(key.str()))) {
        throw Error(ErrorCode::kParse, "unknown key " + qualified(std::string(key.str())));
      }
    }
  }

 private:
  std::string qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  const toml::table& table_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_run_config(std::string_view toml_text, RunConfig base) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at " << e.source().begin;
    throw Error(ErrorCode::kParse, msg.str());
  }
  RunConfig c = std::move(base);
  Section top(root, "");
  top.read("input", c.input);
  top.read("output", c.output);
  top.read("gt", c.gt);
  top.read("overlay_dir", c.overlay_dir);
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  top.read("max_detections", c.max_detections);
  top.read("adapter_cmd", c.adapter_cmd);
  if (const auto* t = top.sub("maskcut")) {
    Section s(*t, "maskcut");
    s.read("n_masks", c.maskcut.n_masks);
    s.read("tau_t", c.maskcut.tau_t);
    s.read("image_size", c.maskcut.image_size);
    s.read("min_patch_area", c.maskcut.min_patch_area);
    s.read("max_cut_eigenvalue", c.maskcut.max_cut_eigenvalue);
    s.reject_unknown();
  }
  if (const auto* t = top.sub("rounds")) {
    Section s(*t, "rounds");
    s.read("total_rounds", c.rounds.total_rounds);
    s.read("conf_start", c.rounds.conf_start);
    s.read("conf_end", c.rounds.conf_end);
    s.read("dedup_iou", c.rounds.dedup_iou);
    s.read("tau_i", c.rounds.tau_i);
    std::string dedup = c.rounds.dedup_kind == IouKind::kBox ? "box" : "mask";
    s.read("dedup", dedup);
    if (dedup != "box" && dedup != "mask") {
      throw Error(ErrorCode::kParse, "rounds.dedup must be \"box\" or \"mask\"");
    }
    c.rounds.dedup_kind = dedup == "box" ? IouKind::kBox : IouKind::kMask;
    s.read("mock", c.mock_mode);
    s.reject_unknown();
  }
  if (const auto* t = top.sub("augment")) {
    Section s(*t, "augment");
    s.read("scale_min", c.augment.scale_min);
    s.read("scale_max", c.augment.scale_max);
    s.read("pastes_per_image", c.augment.pastes_per_image);
    s.read("same_image", c.augment.same_image);
    s.reject_unknown();
  }
  if (const auto* t = top.sub("synth")) {
    Section s(*t, "synth");
    s.read("count", c.synth.count);
    s.read("noise_max", c.synth.noise_max);
    s.read("zero_noise_every", c.synth.zero_noise_every);
    s.read("min_objects", c.synth.layout.min_objects);
    s.read("max_objects", c.synth.layout.max_objects);
    s.read("dim", c.synth.layout.dim);
    s.reject_unknown();
  }
  top.reject_unknown();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  return parse_run_config(read_file(path), std::move(base));
}

void validate(const RunConfig& config) {
  validate(config.maskcut);
  validate(config.rounds);
  validate(config.augment);
  if (config.workers < 1) throw Error(ErrorCode::kInvalidConfig, "workers must be at least 1");
  if (config.max_detections < 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_detections must be non-negative");
  }
  if (config.mock_mode != "echo" && config.mock_mode != "grow") {
    throw Error(ErrorCode::kInvalidConfig, "mock mode must be echo or grow");
  }
  if (!config.input.empty() && !config.output.empty() &&
      config.input.lexically_normal() == config.output.lexically_normal()) {
    throw Error(ErrorCode::kInvalidConfig, "input and output paths must differ");
  }
  const auto& s = config.synth;
  if (s.count < 0 || !(s.noise_max >= 0.0) || s.zero_noise_every < 0) {
    throw Error(ErrorCode::kInvalidConfig, "synth count, noise and zero_noise_every must be >= 0");
  }
}

}  // namespace layoutcut
