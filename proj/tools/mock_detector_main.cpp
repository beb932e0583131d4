// Stand-in detector for the round manager's file-exchange contract.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "layoutcut/error.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/selftrain.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic mock detector"};
  std::string labels;
  std::string out;
  std::string mode = "echo";
  int fail_exit = 0;
  app.add_option("--labels", labels, "training labels")->required();
  app.add_option("--out", out, "prediction file to write")->required();
  app.add_option("--mode", mode, "echo or grow")->check(CLI::IsMember({"echo", "grow"}));
  app.add_option("--fail", fail_exit, "exit with this status without writing");
  CLI11_PARSE(app, argc, argv);
  if (fail_exit != 0) return fail_exit;
  try {
    const auto dataset = layoutcut::read_mask_file(labels);
    const auto mock_mode = mode == "grow" ? layoutcut::MockMode::kGrow : layoutcut::MockMode::kEcho;
    layoutcut::write_mask_file(out, layoutcut::from_detections(layoutcut::mock_predict(dataset, mock_mode)));
  } catch (const layoutcut::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
